//! Stand-in parameters used whenever a caller does not supply its own.
//!
//! The real fingertip cross-section and material constants of the built hand
//! are not published. The fingertip values below describe an anthropomorphic
//! 14 x 10 mm pulp around an 8 x 6 mm distal phalanx that stops 3 mm short of
//! the tip, capped by a 1 mm, 2 GPa nail and a Shore 10A silicone pulp. Every
//! default lives here; call sites never hard-code their own.

use std::f64::consts::PI;

use crate::beam::FingertipSection;
use crate::design::{ObjectiveConfig, SamplingSpec};
use crate::cmaes::CmaEsConfig;
use crate::fivebar::{Branch, FingerChain, LinkageGeometry};
use crate::hertz::{ContactScenario, Environment};
use crate::material::shore_a_to_modulus;

pub const MM: f64 = 1e-3;
pub const MPA: f64 = 1e6;
pub const GPA: f64 = 1e9;

pub const PULP_SHORE_A: f64 = 10.0;
pub const PULP_POISSON: f64 = 0.49;
pub const PULP_RADIUS: f64 = 9.0 * MM;

/// Fingertip approach used for partitions and heatmaps.
pub const DELTA_TOTAL: f64 = 2.0 * MM;

/// Radius of the curved objects used by the curvature-trend analysis.
pub const TREND_CONVEX_RADIUS: f64 = 25.0 * MM;
pub const TREND_CONCAVE_RADIUS: f64 = 25.0 * MM;

/// Heatmap axes: nail modulus and pulp modulus, log-spaced.
pub const SWEEP_NAIL_MODULUS: (f64, f64) = (1.0 * MPA, 10.0 * GPA);
pub const SWEEP_PULP_MODULUS: (f64, f64) = (0.05 * MPA, 5.0 * MPA);
pub const SWEEP_POINTS: usize = 21;

/// Optimized link lengths L1..L5 of the reference finger (m).
pub const REFERENCE_LINK_LENGTHS: [f64; 5] = [30.0 * MM, 100.25 * MM, 20.5 * MM, 60.0 * MM, 40.4 * MM];
pub const GROUND_ANGLE: f64 = PI;

pub const WORKSPACE_PHI1: (f64, f64) = (0.0, PI / 2.0);
pub const WORKSPACE_PHI2: (f64, f64) = (PI / 2.0, 3.0 * PI / 2.0);
pub const WORKSPACE_RESOLUTION: usize = 100;

pub const FINGER_DISTAL_LENGTH: f64 = 40.0 * MM;

/// Free-link bounds for the linkage synthesis (L1 and L3).
pub const DESIGN_MIN: [f64; 2] = [10.0 * MM, 10.0 * MM];
pub const DESIGN_MAX: [f64; 2] = [60.0 * MM, 60.0 * MM];
pub const OBJECTIVE_WEIGHTS: [f64; 4] = [1.0, 1.0, 1.0, 1e-3];
pub const OBJECTIVE_RESOLUTION: usize = 41;
pub const THETA_TARGET: f64 = PI / 2.0;

pub fn pulp_modulus() -> f64 {
    shore_a_to_modulus(PULP_SHORE_A)
}

pub fn fingertip_section() -> FingertipSection {
    FingertipSection {
        pulp_width: 14.0 * MM,
        pulp_height: 10.0 * MM,
        phalanx_width: 8.0 * MM,
        phalanx_height: 6.0 * MM,
        nail_thickness: 1.0 * MM,
        pulp_modulus: pulp_modulus(),
        phalanx_modulus: 2.0 * GPA,
        nail_modulus: 2.0 * GPA,
        proximal_length: 17.0 * MM,
        distal_length: 3.0 * MM,
    }
}

pub fn contact_scenario() -> ContactScenario {
    ContactScenario {
        pulp_radius: PULP_RADIUS,
        environment: Environment::Flat,
        pulp_modulus: pulp_modulus(),
        pulp_poisson: PULP_POISSON,
    }
}

pub fn linkage_geometry() -> LinkageGeometry {
    LinkageGeometry {
        lengths: REFERENCE_LINK_LENGTHS,
        ground_angle: GROUND_ANGLE,
    }
}

pub fn finger_chain() -> FingerChain {
    FingerChain {
        proximal_length: REFERENCE_LINK_LENGTHS[3],
        distal_length: FINGER_DISTAL_LENGTH,
        base: (0.0, 0.0),
    }
}

pub fn workspace_sampling() -> SamplingSpec {
    SamplingSpec {
        phi1: WORKSPACE_PHI1,
        phi2: WORKSPACE_PHI2,
        resolution: (WORKSPACE_RESOLUTION, WORKSPACE_RESOLUTION),
        branch: Branch::ElbowUp,
    }
}

/// The synthesis samples a broader actuator range than the workspace map so
/// that candidate designs keep a usable feasible region.
pub fn objective_sampling() -> SamplingSpec {
    SamplingSpec {
        phi1: (0.0, PI / 2.0),
        phi2: (-PI / 2.0, PI / 2.0),
        resolution: (OBJECTIVE_RESOLUTION, OBJECTIVE_RESOLUTION),
        branch: Branch::ElbowDown,
    }
}

pub fn objective_config() -> ObjectiveConfig {
    let [_, l2, _, l4, l5] = REFERENCE_LINK_LENGTHS;
    ObjectiveConfig {
        weights: OBJECTIVE_WEIGHTS,
        fixed_lengths: [l2, l4, l5],
        ground_angle: GROUND_ANGLE,
        lower: DESIGN_MIN,
        upper: DESIGN_MAX,
        sampling: objective_sampling(),
        theta_target: THETA_TARGET,
    }
}

pub const CMA_BUDGET: usize = 4000;
pub const CMA_RESTARTS: usize = 6;

/// Linkage design search: default 2-D strategy with IPOP restarts.
pub fn cma_es_config() -> CmaEsConfig {
    CmaEsConfig {
        max_evaluations: CMA_BUDGET,
        max_restarts: CMA_RESTARTS,
        ..CmaEsConfig::for_dimension(2)
    }
}
