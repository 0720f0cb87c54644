//! Hybrid fingernail / pulp fingertip mechanics and five-bar finger linkage
//! synthesis.
//!
//! * [`beam`]: composite cross-section rigidity of the layered fingertip and
//!   its bending energy.
//! * [`hertz`]: Hertzian contact of the pulp against flat, convex and concave
//!   rigid surfaces.
//! * [`partition`]: energy-minimizing split of a fingertip approach into
//!   bending and indentation, plus modulus sweeps and curvature trends.
//! * [`fivebar`]: loop closure, mechanical advantage and workspace maps.
//! * [`design`] and [`cmaes`]: the linkage objective and its optimizer.
//!
//! All quantities are SI. Grid sweeps run on rayon when the `parallel`
//! feature (on by default) is enabled; see [`exec`].

pub mod beam;
pub mod cmaes;
pub mod defaults;
pub mod design;
pub mod error;
pub mod exec;
pub mod fivebar;
pub mod hertz;
pub mod material;
pub mod partition;

pub use error::{ModelError, Result};
