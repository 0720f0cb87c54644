//! Linkage design objective over the free link lengths `(L1, L3)` and its
//! minimization with CMA-ES.
//!
//! The four terms of the objective are
//!
//! * `coverage_term`: shortfall of the sampled output-joint range (span of
//!   `phi4`) below `theta_target`, `max(0, target - span)` in radians;
//! * `sigma_n`: population standard deviation of the mechanical advantage
//!   over the non-singular samples;
//! * `ti_term`: `1 - min |sin(phi2 - phi3)|`, the worst transmission quality
//!   over the sampled workspace (this transmission-index reading is our own
//!   choice; it uses only the angles that appear in the mechanical advantage);
//! * `length_reg`: `L1^2 + L3^2` with lengths expressed in millimetres, so
//!   that a weight of `1e-3` is per mm^2.
//!
//! Designs whose workspace is empty receive the finite penalty
//! [`INFEASIBLE_PENALTY`].

use crate::cmaes::{cma_es_minimize, Bounds, CmaEsConfig, OptimizationResult};
use crate::error::{ModelError, Result};
use crate::exec::Execution;
use crate::fivebar::{
    angular_span, transmission_sine, workspace_map_with, Branch, FingerChain, LinkageGeometry,
};

pub const INFEASIBLE_PENALTY: f64 = 1e6;

/// Input grid used to sample a linkage's configuration space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingSpec {
    pub phi1: (f64, f64),
    pub phi2: (f64, f64),
    pub resolution: (usize, usize),
    pub branch: Branch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveConfig {
    /// Weights of (coverage, sigma_N, TI, length regularization).
    pub weights: [f64; 4],
    /// L2, L4, L5 (m).
    pub fixed_lengths: [f64; 3],
    pub ground_angle: f64,
    /// Lower bounds on (L1, L3) (m).
    pub lower: [f64; 2],
    pub upper: [f64; 2],
    pub sampling: SamplingSpec,
    pub theta_target: f64,
}

impl ObjectiveConfig {
    pub fn validate(&self) -> Result<()> {
        if self.weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(ModelError::InvalidConfig(format!("weights must be non-negative, got {:?}", self.weights)));
        }
        for i in 0..2 {
            let (lo, hi) = (self.lower[i], self.upper[i]);
            if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
                return Err(ModelError::InvalidConfig(format!("link bound [{lo}, {hi}] must satisfy 0 < min <= max")));
            }
        }
        if self.fixed_lengths.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(ModelError::InvalidConfig("fixed link lengths must be positive".into()));
        }
        let (n1, n2) = self.sampling.resolution;
        if n1 < 2 || n2 < 2 {
            return Err(ModelError::InvalidGrid(format!("sampling resolution must be at least 2, got {n1}x{n2}")));
        }
        if !(self.theta_target.is_finite() && self.theta_target >= 0.0) {
            return Err(ModelError::InvalidConfig("theta target must be non-negative".into()));
        }
        Ok(())
    }

    pub fn geometry(&self, design: [f64; 2]) -> Result<LinkageGeometry> {
        let [l2, l4, l5] = self.fixed_lengths;
        LinkageGeometry::new([design[0], l2, design[1], l4, l5], self.ground_angle)
    }

    pub fn bounds(&self) -> Bounds {
        Bounds {
            lower: self.lower.to_vec(),
            upper: self.upper.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignEvaluation {
    /// (L1, L3) in metres.
    pub design: [f64; 2],
    pub objective: f64,
    pub coverage_term: f64,
    pub sigma_n: f64,
    pub ti_term: f64,
    pub length_reg: f64,
    pub feasible_samples: usize,
    /// Sampled output-joint span (rad).
    pub phi4_span: f64,
}

impl DesignEvaluation {
    pub fn is_feasible(&self) -> bool {
        self.feasible_samples > 0
    }
}

fn population_std(values: &[f64]) -> f64 {
    // Shifted by the first sample so a constant set yields exactly zero.
    let n = values.len() as f64;
    let shift = values[0];
    let mean = values.iter().map(|v| v - shift).sum::<f64>() / n;
    let second = values.iter().map(|v| (v - shift).powi(2)).sum::<f64>() / n;
    (second - mean * mean).max(0.0).sqrt()
}

pub fn evaluate_objective(design: [f64; 2], cfg: &ObjectiveConfig) -> Result<DesignEvaluation> {
    // Inner sampling stays sequential; callers parallelize across designs.
    evaluate_objective_with(design, cfg, Execution::Sequential)
}

pub fn evaluate_objective_with(design: [f64; 2], cfg: &ObjectiveConfig, exec: Execution) -> Result<DesignEvaluation> {
    cfg.validate()?;
    let geom = cfg.geometry(design)?;
    let length_reg = (design[0] / 1e-3).powi(2) + (design[1] / 1e-3).powi(2);
    let penalty = DesignEvaluation {
        design,
        objective: INFEASIBLE_PENALTY,
        coverage_term: cfg.theta_target,
        sigma_n: 0.0,
        ti_term: 1.0,
        length_reg,
        feasible_samples: 0,
        phi4_span: 0.0,
    };
    let finger = FingerChain {
        proximal_length: cfg.fixed_lengths[1],
        distal_length: 0.0,
        base: (0.0, 0.0),
    };
    let s = &cfg.sampling;
    let map = match workspace_map_with(&geom, s.phi1, s.phi2, s.resolution, s.branch, &finger, exec) {
        Ok(m) => m,
        Err(ModelError::EmptyWorkspace) => return Ok(penalty),
        Err(e) => return Err(e),
    };

    let finite_ma: Vec<f64> = map
        .samples()
        .map(|s| s.mechanical_advantage)
        .filter(|v| v.is_finite())
        .collect();
    if finite_ma.is_empty() {
        return Ok(penalty);
    }
    let span = angular_span(map.samples().map(|s| s.state.phi[3]));
    let coverage_term = (cfg.theta_target - span).max(0.0);
    let sigma_n = population_std(&finite_ma);
    let worst = map
        .samples()
        .map(|s| transmission_sine(&s.state))
        .fold(f64::INFINITY, f64::min);
    let ti_term = 1.0 - worst;
    let [w1, w2, w3, w4] = cfg.weights;
    Ok(DesignEvaluation {
        design,
        objective: w1 * coverage_term + w2 * sigma_n + w3 * ti_term + w4 * length_reg,
        coverage_term,
        sigma_n,
        ti_term,
        length_reg,
        feasible_samples: map.feasible_count(),
        phi4_span: span,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkageOptimization {
    pub result: OptimizationResult,
    pub best: DesignEvaluation,
}

impl LinkageOptimization {
    /// `generation,evals,best_J,mean_J,sigma,L1,L3`, one row per generation.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("generation,evals,best_J,mean_J,sigma,L1,L3\n");
        for row in &self.result.trace {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                row.generation, row.evaluations, row.best_value, row.mean_value, row.sigma, row.best_x[0], row.best_x[1]
            ));
        }
        out
    }
}

pub fn optimize_linkage(cfg: &ObjectiveConfig, cma: &CmaEsConfig) -> Result<LinkageOptimization> {
    cfg.validate()?;
    let failure = std::sync::Mutex::new(None);
    let result = cma_es_minimize(
        |x| match evaluate_objective([x[0], x[1]], cfg) {
            Ok(e) => e.objective,
            Err(e) => {
                failure.lock().unwrap().get_or_insert(e);
                INFEASIBLE_PENALTY
            }
        },
        cma,
        &cfg.bounds(),
    )?;
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    let best = evaluate_objective([result.best_x[0], result.best_x[1]], cfg)?;
    Ok(LinkageOptimization { result, best })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::defaults;

    #[test]
    fn zero_weights_give_zero_objective() {
        let cfg = ObjectiveConfig {
            weights: [0.0; 4],
            ..defaults::objective_config()
        };
        for design in [[0.03, 0.0205], [0.012, 0.055]] {
            assert_eq!(evaluate_objective(design, &cfg).unwrap().objective, 0.0);
        }
    }

    #[test]
    fn objective_is_weighted_sum_of_terms() {
        let cfg = defaults::objective_config();
        let e = evaluate_objective([0.02, 0.015], &cfg).unwrap();
        assert!(e.is_feasible());
        let [w1, w2, w3, w4] = cfg.weights;
        assert_eq!(e.objective, w1 * e.coverage_term + w2 * e.sigma_n + w3 * e.ti_term + w4 * e.length_reg);
        assert_eq!(e.length_reg, 20.0f64.powi(2) + 15.0f64.powi(2));
    }

    #[test]
    fn constant_ma_has_zero_spread() {
        assert_eq!(population_std(&[0.7; 12]), 0.0);
        assert!((population_std(&[1.0, 3.0]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn infeasible_design_is_penalized_not_an_error() {
        let cfg = ObjectiveConfig {
            fixed_lengths: [100.25e-3, 1e-3, 40.4e-3],
            lower: [1e-3, 1e-3],
            upper: [2e-3, 2e-3],
            ..defaults::objective_config()
        };
        let e = evaluate_objective([1e-3, 1e-3], &cfg).unwrap();
        assert_eq!(e.objective, INFEASIBLE_PENALTY);
        assert!(!e.is_feasible());
        assert!(e.coverage_term.is_finite() && e.sigma_n.is_finite());
    }

    #[test]
    fn evaluation_is_deterministic() {
        let cfg = defaults::objective_config();
        let a = evaluate_objective([0.03, 0.0205], &cfg).unwrap();
        let b = evaluate_objective_with([0.03, 0.0205], &cfg, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn collapsed_box_returns_its_point() {
        let cfg = ObjectiveConfig {
            lower: [0.03, 0.0205],
            upper: [0.03, 0.0205],
            ..defaults::objective_config()
        };
        let r = optimize_linkage(&cfg, &defaults::cma_es_config()).unwrap();
        assert_eq!(r.best.design, [0.03, 0.0205]);
        assert_eq!(r.best, evaluate_objective([0.03, 0.0205], &cfg).unwrap());
        assert_eq!(r.result.evaluations, 1);
    }

    #[test]
    fn invalid_objective_config_rejected() {
        let cfg = ObjectiveConfig {
            weights: [1.0, -1.0, 0.0, 0.0],
            ..defaults::objective_config()
        };
        assert!(evaluate_objective([0.03, 0.02], &cfg).is_err());
        let cfg = ObjectiveConfig {
            lower: [0.0, 0.01],
            ..defaults::objective_config()
        };
        assert!(cfg.validate().is_err());
    }
}
