//! Energy-minimizing split of a prescribed fingertip approach into global
//! bending and local Hertzian indentation.
//!
//! Minimizing `U_b(delta_b) + U_c(delta_c)` subject to
//! `delta_b + delta_c = delta_total` leaves a single scalar equation,
//! `delta_c + beta * delta_c^{3/2} = delta_total`, whose root is found with a
//! safeguarded Newton iteration. Everything else follows in closed form.

use std::fmt::Write as _;

use crate::beam::{bending_energy, section_effective_rigidity, FingertipSection};
use crate::error::{ModelError, Result};
use crate::exec::{map_indexed, Execution};
use crate::hertz::{hertz_energy, ContactScenario, Environment};

const MAX_ITERATIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionResult {
    pub delta_total: f64,
    pub delta_b: f64,
    pub delta_c: f64,
    pub bending_energy: f64,
    pub contact_energy: f64,
    pub total_energy: f64,
    pub eta_contact: f64,
    pub beta: f64,
    pub contact_radius: f64,
}

/// `4 E* sqrt(R_eff) L^3 / (9 EI_eff)`, in m^-1/2.
pub fn beta_from_parts(effective_modulus: f64, effective_radius: f64, length: f64, ei_eff: f64) -> f64 {
    4.0 * effective_modulus * effective_radius.sqrt() * length.powi(3) / (9.0 * ei_eff)
}

pub fn beta(section: &FingertipSection, scenario: &ContactScenario) -> Result<f64> {
    let ei_eff = section_effective_rigidity(section)?;
    Ok(beta_from_parts(
        scenario.effective_modulus(),
        scenario.effective_radius()?,
        section.total_length(),
        ei_eff,
    ))
}

/// Residual tolerance on `delta_c + beta delta_c^{3/2} - delta_total`.
pub fn partition_tolerance(delta_total: f64) -> f64 {
    1e-12 * delta_total.max(1.0)
}

/// Returns `(delta_c, delta_b)`.
pub fn solve_partition(beta: f64, delta_total: f64) -> Result<(f64, f64)> {
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(ModelError::InvalidConfig(format!("beta must be non-negative, got {beta}")));
    }
    if !(delta_total.is_finite() && delta_total >= 0.0) {
        return Err(ModelError::InvalidConfig(format!(
            "delta_total must be non-negative, got {delta_total}"
        )));
    }
    if beta == 0.0 || delta_total == 0.0 {
        return Ok((delta_total, 0.0));
    }

    let g = |d: f64| d + beta * d * d.sqrt() - delta_total;
    let tol = partition_tolerance(delta_total);
    let (mut lo, mut hi) = (0.0, delta_total);
    let mut x = delta_total / (1.0 + beta * delta_total.sqrt());
    for _ in 0..MAX_ITERATIONS {
        let gx = g(x);
        if gx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let slope = 1.0 + 1.5 * beta * x.sqrt();
        let mut next = x - gx / slope;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        // Converged once the step no longer moves x and the residual is met.
        if (next - x).abs() <= 4.0 * f64::EPSILON * x || hi - lo <= 2.0 * f64::EPSILON * hi {
            let root = if g(next).abs() < gx.abs() { next } else { x };
            if g(root).abs() <= tol {
                return Ok((root, delta_total - root));
            }
        }
        x = next;
    }
    if g(x).abs() <= tol {
        return Ok((x, delta_total - x));
    }
    Err(ModelError::NonConvergence {
        what: "partition root",
        iterations: MAX_ITERATIONS,
    })
}

pub fn partition(section: &FingertipSection, scenario: &ContactScenario, delta_total: f64) -> Result<PartitionResult> {
    let ei_eff = section_effective_rigidity(section)?;
    let length = section.total_length();
    let r_eff = scenario.effective_radius()?;
    let factor = scenario.effective_modulus() * r_eff.sqrt();
    let beta = beta_from_parts(scenario.effective_modulus(), r_eff, length, ei_eff);
    let (delta_c, delta_b) = solve_partition(beta, delta_total)?;

    let u_b = bending_energy(ei_eff, length, delta_b);
    let u_c = hertz_energy(factor, delta_c);
    let total = u_b + u_c;
    // At zero approach the limiting fraction is one: U_b/U_c ~ delta^{1/2}.
    let eta = if total > 0.0 { u_c / total } else { 1.0 };
    Ok(PartitionResult {
        delta_total,
        delta_b,
        delta_c,
        bending_energy: u_b,
        contact_energy: u_c,
        total_energy: total,
        eta_contact: eta,
        beta,
        contact_radius: (r_eff * delta_c).sqrt(),
    })
}

/// Named, strictly increasing sample axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        let name = name.into();
        if values.len() < 2 {
            return Err(ModelError::InvalidGrid(format!("axis {name} needs at least 2 points")));
        }
        if values.iter().any(|v| !v.is_finite()) || values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ModelError::InvalidGrid(format!("axis {name} must be strictly increasing")));
        }
        Ok(Axis { name, values })
    }

    /// `points` log-spaced values from `min` to `max`, both included.
    pub fn log_spaced(name: impl Into<String>, min: f64, max: f64, points: usize) -> Result<Self> {
        if !(min > 0.0 && max > min) || points < 2 {
            return Err(ModelError::InvalidGrid(format!(
                "log axis needs 0 < min < max and >= 2 points, got [{min}, {max}] x {points}"
            )));
        }
        let (a, b) = (min.ln(), max.ln());
        let last = (points - 1) as f64;
        let values = (0..points)
            .map(|i| match i {
                0 => min,
                i if i == points - 1 => max,
                i => (a + (b - a) * i as f64 / last).exp(),
            })
            .collect();
        Axis::new(name, values)
    }
}

/// Contact-energy fraction over (nail modulus x pulp modulus).
#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapGrid {
    pub nail_axis: Axis,
    pub pulp_axis: Axis,
    pub delta_total: f64,
    /// Row-major: `eta[i * pulp_axis.len() + j]` is nail value `i`, pulp value `j`.
    pub eta: Vec<f64>,
}

impl HeatmapGrid {
    pub fn get(&self, nail_index: usize, pulp_index: usize) -> f64 {
        self.eta[nail_index * self.pulp_axis.values.len() + pulp_index]
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nail_axis.values.len(), self.pulp_axis.values.len())
    }

    /// Checks that eta never falls as the nail stiffens and never rises as
    /// the pulp stiffens.
    pub fn check_monotonicity(&self) -> Result<()> {
        let (rows, cols) = self.shape();
        let slack = 1e-12;
        for i in 0..rows {
            for j in 0..cols {
                let here = self.get(i, j);
                if i + 1 < rows && self.get(i + 1, j) < here - slack {
                    return Err(ModelError::ModelInconsistency(format!(
                        "eta decreases along nail axis at ({i}, {j})"
                    )));
                }
                if j + 1 < cols && self.get(i, j + 1) > here + slack {
                    return Err(ModelError::ModelInconsistency(format!(
                        "eta increases along pulp axis at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Header `<nail axis>,<pulp axis>,eta`, then one row per cell with the
    /// nail index varying slowest.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{},{},eta",
            self.nail_axis.name, self.pulp_axis.name
        );
        for (i, en) in self.nail_axis.values.iter().enumerate() {
            for (j, ep) in self.pulp_axis.values.iter().enumerate() {
                let _ = writeln!(out, "{en},{ep},{}", self.get(i, j));
            }
        }
        out
    }
}

/// Evaluates the contact-energy fraction on every (nail, pulp) modulus pair.
/// The pulp modulus is substituted into both the section and the contact
/// scenario.
pub fn sweep_eta(
    nail_axis: &Axis,
    pulp_axis: &Axis,
    section: &FingertipSection,
    scenario: &ContactScenario,
    delta_total: f64,
) -> Result<HeatmapGrid> {
    sweep_eta_with(nail_axis, pulp_axis, section, scenario, delta_total, Execution::default())
}

pub fn sweep_eta_with(
    nail_axis: &Axis,
    pulp_axis: &Axis,
    section: &FingertipSection,
    scenario: &ContactScenario,
    delta_total: f64,
    exec: Execution,
) -> Result<HeatmapGrid> {
    let nail_axis = Axis::new(nail_axis.name.clone(), nail_axis.values.clone())?;
    let pulp_axis = Axis::new(pulp_axis.name.clone(), pulp_axis.values.clone())?;
    let cols = pulp_axis.values.len();
    let cells = map_indexed(nail_axis.values.len() * cols, exec, |k| {
        let (en, ep) = (nail_axis.values[k / cols], pulp_axis.values[k % cols]);
        let s = FingertipSection {
            nail_modulus: en,
            pulp_modulus: ep,
            ..*section
        };
        let c = ContactScenario {
            pulp_modulus: ep,
            ..*scenario
        };
        partition(&s, &c, delta_total).map(|r| r.eta_contact)
    });
    let eta = cells.into_iter().collect::<Result<Vec<_>>>()?;
    let grid = HeatmapGrid {
        nail_axis,
        pulp_axis,
        delta_total,
        eta,
    };
    grid.check_monotonicity()?;
    Ok(grid)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrendEntry {
    pub with_nail: bool,
    pub environment: Environment,
    pub effective_radius: f64,
    pub beta: f64,
    pub delta_c: f64,
    pub contact_radius: f64,
    /// `(delta_c - delta_c_flat) / delta_c_flat` for the same section.
    pub relative_change: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrendReport {
    pub delta_total: f64,
    pub entries: Vec<TrendEntry>,
}

impl TrendReport {
    fn find(&self, with_nail: bool, env: &str) -> Option<&TrendEntry> {
        self.entries
            .iter()
            .find(|e| e.with_nail == with_nail && e.environment.name() == env)
    }

    /// Magnitude of the relative indentation change from flat to the named
    /// environment, i.e. how sensitive `delta_c` is to curvature.
    pub fn curvature_sensitivity(&self, with_nail: bool, env: &str) -> Option<f64> {
        self.find(with_nail, env).map(|e| e.relative_change.abs())
    }

    /// True when the nail makes indentation less sensitive to curvature in
    /// every curved environment and lowers beta in every environment.
    pub fn nail_stabilizes(&self) -> bool {
        let curved = ["convex", "concave"].iter().filter_map(|env| {
            Some((self.curvature_sensitivity(true, env)?, self.curvature_sensitivity(false, env)?))
        });
        let sensitivity_ok = curved.clone().count() > 0 && curved.into_iter().all(|(w, wo)| w < wo);
        let beta_ok = self.entries.iter().filter(|e| e.with_nail).all(|w| {
            self.find(false, w.environment.name())
                .is_some_and(|wo| w.beta < wo.beta)
        });
        sensitivity_ok && beta_ok
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "section,environment,env_radius,effective_radius,beta,delta_c,contact_radius,relative_change\n",
        );
        for e in &self.entries {
            let section = if e.with_nail { "with_nail" } else { "without_nail" };
            let radius = e.environment.radius().map(|r| r.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{section},{},{radius},{},{},{},{},{}",
                e.environment.name(),
                e.effective_radius,
                e.beta,
                e.delta_c,
                e.contact_radius,
                e.relative_change
            );
        }
        out
    }
}

/// Compares indentation depth and contact radius of two sections across
/// environments. `environments` must include [`Environment::Flat`], which is
/// the reference for `relative_change`.
pub fn curvature_trend(
    with_nail: &FingertipSection,
    without_nail: &FingertipSection,
    scenario: &ContactScenario,
    environments: &[Environment],
    delta_total: f64,
) -> Result<TrendReport> {
    if !environments.contains(&Environment::Flat) {
        return Err(ModelError::InvalidConfig("curvature trend needs a flat reference".into()));
    }
    let mut entries = Vec::new();
    for (has_nail, section) in [(true, with_nail), (false, without_nail)] {
        let flat = partition(section, &scenario.with_environment(Environment::Flat), delta_total)?;
        for &env in environments {
            let s = scenario.with_environment(env);
            let r = partition(section, &s, delta_total)?;
            let relative_change = if flat.delta_c > 0.0 {
                (r.delta_c - flat.delta_c) / flat.delta_c
            } else {
                0.0
            };
            entries.push(TrendEntry {
                with_nail: has_nail,
                environment: env,
                effective_radius: s.effective_radius()?,
                beta: r.beta,
                delta_c: r.delta_c,
                contact_radius: r.contact_radius,
                relative_change,
            });
        }
    }
    Ok(TrendReport { delta_total, entries })
}
