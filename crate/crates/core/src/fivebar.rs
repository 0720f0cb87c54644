//! Planar five-bar loop closure and actuator-to-joint mechanical advantage.
//!
//! Angles are absolute, measured in the ground frame, and the link vectors
//! are chained tip to tail in index order so that
//! `sum_i L_i (cos phi_i, sin phi_i) = 0`. The inputs are `phi1` and the
//! actuator angle `phi2`; the ground angle `phi5` is fixed and the loop is
//! closed by links 3 and 4.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::{ModelError, Result};
use crate::exec::{map_indexed, Execution};

/// Below this `|sin(phi2 - phi3)|` the mechanical advantage is singular.
pub const SINGULARITY_TOLERANCE: f64 = 1e-9;

/// Closure residual bound relative to the total link length.
pub const CLOSURE_TOLERANCE: f64 = 1e-10;

const TANGENCY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkageGeometry {
    /// L1..L5 (m).
    pub lengths: [f64; 5],
    pub ground_angle: f64,
}

/// Which of the two closing configurations of links 3 and 4 is used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// Joint between links 3 and 4 lies to the left of the closing chord.
    ElbowUp,
    ElbowDown,
}

impl Branch {
    pub fn name(&self) -> &'static str {
        match self {
            Branch::ElbowUp => "elbow_up",
            Branch::ElbowDown => "elbow_down",
        }
    }

    fn sign(&self) -> f64 {
        match self {
            Branch::ElbowUp => 1.0,
            Branch::ElbowDown => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkageState {
    /// phi1..phi5 (rad).
    pub phi: [f64; 5],
    pub branch: Branch,
}

impl LinkageGeometry {
    pub fn new(lengths: [f64; 5], ground_angle: f64) -> Result<Self> {
        let g = LinkageGeometry { lengths, ground_angle };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lengths.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(ModelError::InvalidGeometry(format!(
                "link lengths must be positive, got {:?}",
                self.lengths
            )));
        }
        if !self.ground_angle.is_finite() {
            return Err(ModelError::InvalidGeometry("ground angle must be finite".into()));
        }
        Ok(())
    }

    pub fn total_length(&self) -> f64 {
        self.lengths.iter().sum()
    }

    /// Norm of `sum_i L_i e^{j phi_i}`.
    pub fn closure_residual(&self, phi: &[f64; 5]) -> f64 {
        let (mut x, mut y) = (0.0, 0.0);
        for (l, p) in self.lengths.iter().zip(phi) {
            x += l * p.cos();
            y += l * p.sin();
        }
        x.hypot(y)
    }
}

fn wrap_angle(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(2.0 * PI) - PI;
    if w == -PI { PI } else { w }
}

/// Two-circle intersection: finds unit directions for links `a` and `b`
/// such that `a e^{j t_a} + b e^{j t_b} = (qx, qy)`.
fn close_two_links(a: f64, b: f64, qx: f64, qy: f64, branch: Branch) -> Result<(f64, f64)> {
    let d = qx.hypot(qy);
    let (min, max) = ((a - b).abs(), a + b);
    let tol = TANGENCY_TOLERANCE * max;
    if d > max + tol || d < min - tol {
        return Err(ModelError::NoClosure { distance: d, min, max });
    }
    if (d - max).abs() <= tol || (d - min).abs() <= tol {
        return Err(ModelError::DegenerateClosure);
    }
    let along = (a * a - b * b + d * d) / (2.0 * d);
    let across = branch.sign() * (a * a - along * along).max(0.0).sqrt();
    let (ux, uy) = (qx / d, qy / d);
    let (jx, jy) = (along * ux - across * uy, along * uy + across * ux);
    Ok((jy.atan2(jx), (qy - jy).atan2(qx - jx)))
}

/// Closes the loop for inputs `(phi1, phi2)` on the requested branch.
pub fn solve_closure(geom: &LinkageGeometry, phi1: f64, phi2: f64, branch: Branch) -> Result<LinkageState> {
    geom.validate()?;
    let [l1, l2, l3, l4, l5] = geom.lengths;
    let phi5 = geom.ground_angle;
    let px = l1 * phi1.cos() + l2 * phi2.cos() + l5 * phi5.cos();
    let py = l1 * phi1.sin() + l2 * phi2.sin() + l5 * phi5.sin();
    let (phi3, phi4) = close_two_links(l3, l4, -px, -py, branch)?;
    Ok(LinkageState {
        phi: [phi1, phi2, phi3, phi4, phi5],
        branch,
    })
}

/// `N = dphi2/dphi4` with `phi1` held fixed.
///
/// Differentiating the loop equation and projecting onto the normal of link
/// 3 gives `L2 sin(phi2 - phi3) dphi2 = L4 sin(phi3 - phi4) dphi4` in this
/// angle convention.
pub fn mechanical_advantage(state: &LinkageState, geom: &LinkageGeometry) -> Result<f64> {
    let [_, phi2, phi3, phi4, _] = state.phi;
    let denom = (phi2 - phi3).sin();
    if denom.abs() < SINGULARITY_TOLERANCE {
        return Err(ModelError::Singularity(denom.abs()));
    }
    Ok(geom.lengths[3] * (phi3 - phi4).sin() / (geom.lengths[1] * denom))
}

/// Transmission quality `|sin(phi2 - phi3)|`, zero at the singularity.
pub fn transmission_sine(state: &LinkageState) -> f64 {
    (state.phi[1] - state.phi[2]).sin().abs()
}

/// Serial chain carried by the linkage: a proximal phalanx along `phi1` and
/// a distal phalanx along `phi4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FingerChain {
    pub proximal_length: f64,
    pub distal_length: f64,
    pub base: (f64, f64),
}

pub fn fingertip_fk(state: &LinkageState, finger: &FingerChain) -> (f64, f64) {
    let (phi1, phi4) = (state.phi[0], state.phi[3]);
    (
        finger.base.0 + finger.proximal_length * phi1.cos() + finger.distal_length * phi4.cos(),
        finger.base.1 + finger.proximal_length * phi1.sin() + finger.distal_length * phi4.sin(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkspaceSample {
    pub state: LinkageState,
    pub position: (f64, f64),
    /// NaN at singular configurations.
    pub mechanical_advantage: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkspaceCell {
    pub phi1: f64,
    pub phi2: f64,
    pub sample: Option<WorkspaceSample>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkspaceMap {
    pub resolution: (usize, usize),
    pub branch: Branch,
    /// Row-major over (phi1, phi2).
    pub cells: Vec<WorkspaceCell>,
}

impl WorkspaceMap {
    pub fn samples(&self) -> impl Iterator<Item = &WorkspaceSample> + '_ {
        self.cells.iter().filter_map(|c| c.sample.as_ref())
    }

    pub fn feasible_count(&self) -> usize {
        self.samples().count()
    }

    pub fn feasibility_mask(&self) -> Vec<bool> {
        self.cells.iter().map(|c| c.sample.is_some()).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("phi1,phi2,feasible,phi3,phi4,x,y,ma\n");
        for c in &self.cells {
            match &c.sample {
                Some(s) => {
                    let ma = if s.mechanical_advantage.is_finite() {
                        s.mechanical_advantage.to_string()
                    } else {
                        String::new()
                    };
                    let _ = writeln!(
                        out,
                        "{},{},1,{},{},{},{},{ma}",
                        c.phi1, c.phi2, s.state.phi[2], s.state.phi[3], s.position.0, s.position.1
                    );
                }
                None => {
                    let _ = writeln!(out, "{},{},0,,,,,", c.phi1, c.phi2);
                }
            }
        }
        out
    }
}

/// `n` evenly spaced points from `lo` to `hi`, endpoints included.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

pub fn workspace_map(
    geom: &LinkageGeometry,
    phi1_range: (f64, f64),
    phi2_range: (f64, f64),
    resolution: (usize, usize),
    branch: Branch,
    finger: &FingerChain,
) -> Result<WorkspaceMap> {
    workspace_map_with(geom, phi1_range, phi2_range, resolution, branch, finger, Execution::default())
}

pub fn workspace_map_with(
    geom: &LinkageGeometry,
    phi1_range: (f64, f64),
    phi2_range: (f64, f64),
    resolution: (usize, usize),
    branch: Branch,
    finger: &FingerChain,
    exec: Execution,
) -> Result<WorkspaceMap> {
    geom.validate()?;
    let (n1, n2) = resolution;
    if n1 < 2 || n2 < 2 {
        return Err(ModelError::InvalidGrid(format!(
            "workspace resolution must be at least 2 per axis, got {n1}x{n2}"
        )));
    }
    for (lo, hi) in [phi1_range, phi2_range] {
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(ModelError::InvalidGrid(format!("angle range [{lo}, {hi}] is empty")));
        }
    }
    let a1 = linspace(phi1_range.0, phi1_range.1, n1);
    let a2 = linspace(phi2_range.0, phi2_range.1, n2);
    let cells = map_indexed(n1 * n2, exec, |k| {
        let (phi1, phi2) = (a1[k / n2], a2[k % n2]);
        let sample = solve_closure(geom, phi1, phi2, branch).ok().map(|state| WorkspaceSample {
            state,
            position: fingertip_fk(&state, finger),
            mechanical_advantage: mechanical_advantage(&state, geom).unwrap_or(f64::NAN),
        });
        WorkspaceCell { phi1, phi2, sample }
    });
    let map = WorkspaceMap {
        resolution,
        branch,
        cells,
    };
    if map.feasible_count() == 0 {
        return Err(ModelError::EmptyWorkspace);
    }
    Ok(map)
}

/// Angular extent of a set of angles on the circle: `2 pi` minus the largest
/// gap between consecutive sorted angles.
pub fn angular_span(angles: impl IntoIterator<Item = f64>) -> f64 {
    let mut a: Vec<f64> = angles.into_iter().map(wrap_angle).collect();
    if a.len() < 2 {
        return 0.0;
    }
    a.sort_by(f64::total_cmp);
    let mut largest_gap = a[0] + 2.0 * PI - a[a.len() - 1];
    for w in a.windows(2) {
        largest_gap = largest_gap.max(w[1] - w[0]);
    }
    2.0 * PI - largest_gap
}
