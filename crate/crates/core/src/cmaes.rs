//! (mu/mu_w, lambda)-CMA-ES with box constraints.
//!
//! Implements weighted recombination, cumulative step-size adaptation and the
//! rank-one plus rank-mu covariance update with the default learning rates of
//! the standard tutorial formulation. Candidates are drawn sequentially from a
//! seeded ChaCha stream (so the stream is consumed in candidate order) and then
//! evaluated, possibly in parallel.
//!
//! Optional IPOP restarts start a fresh search from a uniformly drawn mean
//! with twice the previous population whenever the search collapses, stalls
//! or diverges; the trace and best point run across restarts.
//!
//! Out-of-bounds candidates are resampled up to [`MAX_RESAMPLES`] times. A
//! candidate that still violates the box is clamped onto it and charged a
//! quadratic penalty, so the objective is never called outside the box.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{ModelError, Result};
use crate::exec::{map_indexed, Execution};

pub const MAX_RESAMPLES: usize = 100;
/// Step size below which the search is considered collapsed.
pub const SIGMA_FLOOR: f64 = 1e-14;
/// Quadratic penalty per squared box-width of clamping distance.
pub const BOUND_PENALTY: f64 = 1e6;

#[derive(Debug, Clone, PartialEq)]
pub struct CmaEsConfig {
    pub population: usize,
    pub parents: usize,
    /// Defaults to the centre of the box.
    pub initial_mean: Option<Vec<f64>>,
    /// Defaults to 20% of the widest box side.
    pub initial_sigma: Option<f64>,
    pub max_evaluations: usize,
    /// Stop once the best objective value is at or below this.
    pub target: Option<f64>,
    pub seed: u64,
    /// Number of restarts with doubled population (IPOP) after the search
    /// collapses or stalls before the budget is spent.
    pub max_restarts: usize,
    pub execution: Execution,
}

impl CmaEsConfig {
    /// `lambda = 4 + floor(3 ln n)`, `mu = lambda / 2`.
    pub fn for_dimension(n: usize) -> Self {
        let population = 4 + (3.0 * (n.max(1) as f64).ln()).floor() as usize;
        CmaEsConfig {
            population,
            parents: population / 2,
            initial_mean: None,
            initial_sigma: None,
            max_evaluations: 1200,
            target: None,
            seed: 0,
            max_restarts: 0,
            execution: Execution::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.population < 4 {
            return Err(ModelError::InvalidConfig(format!(
                "population must be at least 4, got {}",
                self.population
            )));
        }
        if self.parents < 1 || self.parents > self.population / 2 {
            return Err(ModelError::InvalidConfig(format!(
                "parent count must lie in [1, {}], got {}",
                self.population / 2,
                self.parents
            )));
        }
        if let Some(s) = self.initial_sigma {
            if !(s.is_finite() && s > 0.0) {
                return Err(ModelError::InvalidConfig(format!("initial sigma must be positive, got {s}")));
            }
        }
        if self.max_evaluations == 0 {
            return Err(ModelError::InvalidConfig("evaluation budget must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let b = Bounds { lower, upper };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lower.is_empty() || self.lower.len() != self.upper.len() {
            return Err(ModelError::InvalidConfig("bounds must be non-empty and of equal length".into()));
        }
        for (lo, hi) in self.lower.iter().zip(&self.upper) {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(ModelError::InvalidConfig(format!("invalid bound [{lo}, {hi}]")));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(v, (lo, hi))| (*lo..=*hi).contains(v))
    }

    pub fn clamp(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(v, (lo, hi))| v.clamp(*lo, *hi))
            .collect()
    }

    fn widths(&self) -> impl Iterator<Item = f64> + '_ {
        self.lower.iter().zip(&self.upper).map(|(lo, hi)| hi - lo)
    }

    fn penalty(&self, raw: &[f64], clamped: &[f64]) -> f64 {
        raw.iter()
            .zip(clamped)
            .zip(self.widths())
            .map(|((r, c), w)| {
                let scale = if w > 0.0 { w } else { 1.0 };
                ((r - c) / scale).powi(2)
            })
            .sum::<f64>()
            * BOUND_PENALTY
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub generation: usize,
    pub evaluations: usize,
    pub best_value: f64,
    pub mean_value: f64,
    pub sigma: f64,
    pub best_x: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Budget,
    Target,
    SigmaCollapse,
    /// The box has zero volume; its single point was evaluated.
    PointBox,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub best_x: Vec<f64>,
    pub best_value: f64,
    pub evaluations: usize,
    pub trace: Vec<TraceRow>,
    pub termination: Termination,
}

struct Candidate {
    /// Sample in the distribution's own coordinates, `(x - m) / sigma`.
    y: DVector<f64>,
    x: Vec<f64>,
    penalty: f64,
}

struct Strategy {
    lambda: usize,
    weights: Vec<f64>,
    mu_eff: f64,
    c_sigma: f64,
    d_sigma: f64,
    c_c: f64,
    c_1: f64,
    c_mu: f64,
    chi_n: f64,
}

impl Strategy {
    fn new(n: usize, lambda: usize, mu: usize) -> Self {
        let nf = n as f64;
        let raw: Vec<f64> = (0..mu)
            .map(|i| (mu as f64 + 0.5).ln() - ((i + 1) as f64).ln())
            .collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let mu_eff = 1.0 / weights.iter().map(|w| w * w).sum::<f64>();
        let c_sigma = (mu_eff + 2.0) / (nf + mu_eff + 5.0);
        let c_1 = 2.0 / ((nf + 1.3).powi(2) + mu_eff);
        Strategy {
            lambda,
            weights,
            mu_eff,
            c_sigma,
            d_sigma: 1.0 + 2.0 * (((mu_eff - 1.0) / (nf + 1.0)).sqrt() - 1.0).max(0.0) + c_sigma,
            c_c: (4.0 + mu_eff / nf) / (nf + 4.0 + 2.0 * mu_eff / nf),
            c_1,
            c_mu: (1.0 - c_1).min(2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((nf + 2.0).powi(2) + mu_eff)),
            chi_n: nf.sqrt() * (1.0 - 1.0 / (4.0 * nf) + 1.0 / (21.0 * nf * nf)),
        }
    }
}

/// Distribution state of one (re)start.
struct Search {
    mean: DVector<f64>,
    sigma: f64,
    cov: DMatrix<f64>,
    basis: DMatrix<f64>,
    scales: DVector<f64>,
    inv_sqrt: DMatrix<f64>,
    path_sigma: DVector<f64>,
    path_c: DVector<f64>,
    generation: usize,
}

impl Search {
    fn new(mean: DVector<f64>, sigma: f64) -> Self {
        let n = mean.len();
        Search {
            mean,
            sigma,
            cov: DMatrix::identity(n, n),
            basis: DMatrix::identity(n, n),
            scales: DVector::from_element(n, 1.0),
            inv_sqrt: DMatrix::identity(n, n),
            path_sigma: DVector::zeros(n),
            path_c: DVector::zeros(n),
            generation: 0,
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng, bounds: &Bounds) -> Candidate {
        let n = self.mean.len();
        let mut attempt = 0;
        loop {
            let z = DVector::from_iterator(n, (0..n).map(|_| StandardNormal.sample(&mut *rng)));
            let y = &self.basis * self.scales.component_mul(&z);
            let x: Vec<f64> = (&self.mean + self.sigma * &y).iter().copied().collect();
            if bounds.contains(&x) {
                return Candidate { y, x, penalty: 0.0 };
            }
            attempt += 1;
            if attempt > MAX_RESAMPLES {
                let clamped = bounds.clamp(&x);
                let penalty = bounds.penalty(&x, &clamped);
                let y = (DVector::from_column_slice(&clamped) - &self.mean) / self.sigma;
                return Candidate { y, x: clamped, penalty };
            }
        }
    }

    fn update(&mut self, s: &Strategy, candidates: &[Candidate], order: &[usize]) {
        let n = self.mean.len();
        let nf = n as f64;
        let mut y_w = DVector::<f64>::zeros(n);
        for (w, &idx) in s.weights.iter().zip(order) {
            y_w += *w * &candidates[idx].y;
        }
        self.mean += self.sigma * &y_w;

        self.path_sigma = (1.0 - s.c_sigma) * &self.path_sigma
            + (s.c_sigma * (2.0 - s.c_sigma) * s.mu_eff).sqrt() * (&self.inv_sqrt * &y_w);
        let ps_norm = self.path_sigma.norm();
        let decay = 1.0 - (1.0 - s.c_sigma).powi(2 * (self.generation as i32 + 1));
        let h_sigma = if ps_norm / decay.sqrt() < (1.4 + 2.0 / (nf + 1.0)) * s.chi_n {
            1.0
        } else {
            0.0
        };
        self.path_c = (1.0 - s.c_c) * &self.path_c + h_sigma * (s.c_c * (2.0 - s.c_c) * s.mu_eff).sqrt() * &y_w;

        let mut rank_mu = DMatrix::<f64>::zeros(n, n);
        for (w, &idx) in s.weights.iter().zip(order) {
            let y = &candidates[idx].y;
            rank_mu += *w * y * y.transpose();
        }
        let old_weight = 1.0 - s.c_1 - s.c_mu + (1.0 - h_sigma) * s.c_1 * s.c_c * (2.0 - s.c_c);
        self.cov = old_weight * &self.cov + s.c_1 * &self.path_c * self.path_c.transpose() + s.c_mu * rank_mu;
        self.cov = 0.5 * (&self.cov + self.cov.transpose());

        self.sigma *= ((s.c_sigma / s.d_sigma) * (ps_norm / s.chi_n - 1.0)).exp();

        if self.cov.iter().all(|v| v.is_finite()) {
            let eig = SymmetricEigen::new(self.cov.clone());
            self.basis = eig.eigenvectors;
            self.scales = eig.eigenvalues.map(|v| v.max(f64::MIN_POSITIVE).sqrt());
            let inv_diag = DMatrix::from_diagonal(&self.scales.map(|s| 1.0 / s));
            self.inv_sqrt = &self.basis * inv_diag * self.basis.transpose();
        }
        self.generation += 1;
    }

    fn step_size(&self) -> f64 {
        self.sigma * self.scales.max()
    }

    fn is_broken(&self, max_width: f64) -> bool {
        !(self.sigma.is_finite() && self.mean.iter().all(|v| v.is_finite()))
            || self.cov.iter().any(|v| !v.is_finite())
            || self.step_size() > 1e3 * max_width
    }
}

pub fn cma_es_minimize<F>(objective: F, cfg: &CmaEsConfig, bounds: &Bounds) -> Result<OptimizationResult>
where
    F: Fn(&[f64]) -> f64 + Sync + Send,
{
    cfg.validate()?;
    bounds.validate()?;
    let n = bounds.dim();

    if bounds.widths().all(|w| w == 0.0) {
        let x = bounds.lower.clone();
        let value = objective(&x);
        return Ok(OptimizationResult {
            trace: vec![TraceRow {
                generation: 0,
                evaluations: 1,
                best_value: value,
                mean_value: value,
                sigma: 0.0,
                best_x: x.clone(),
            }],
            best_x: x,
            best_value: value,
            evaluations: 1,
            termination: Termination::PointBox,
        });
    }

    let max_width = bounds.widths().fold(0.0, f64::max);
    let initial_sigma = cfg.initial_sigma.unwrap_or(0.2 * max_width);
    let initial_mean = match &cfg.initial_mean {
        Some(m) if m.len() == n => DVector::from_column_slice(&bounds.clamp(m)),
        Some(m) => {
            return Err(ModelError::InvalidConfig(format!(
                "initial mean has {} components, bounds have {n}",
                m.len()
            )))
        }
        None => DVector::from_iterator(
            n,
            bounds.lower.iter().zip(&bounds.upper).map(|(lo, hi)| 0.5 * (lo + hi)),
        ),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut best_x: Vec<f64> = initial_mean.iter().copied().collect();
    let mut best_value = f64::INFINITY;
    let mut evaluations = 0;
    let mut trace = Vec::new();
    let mut generation = 0;
    let mut restart = 0;
    let mut strategy = Strategy::new(n, cfg.population, cfg.parents);
    let mut search = Search::new(initial_mean, initial_sigma);
    let stall_window = 10 + (30.0 * n as f64 / cfg.population as f64).ceil() as usize;
    let mut recent: Vec<f64> = Vec::new();

    let termination = loop {
        let lambda = strategy.lambda;
        let batch = lambda.min(cfg.max_evaluations - evaluations);
        let candidates: Vec<Candidate> = (0..batch).map(|_| search.sample(&mut rng, bounds)).collect();
        let values = map_indexed(batch, cfg.execution, |i| {
            let c = &candidates[i];
            objective(&c.x) + c.penalty
        });
        evaluations += batch;

        let mut order: Vec<usize> = (0..batch).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
        if values[order[0]] < best_value {
            best_value = values[order[0]];
            best_x = candidates[order[0]].x.clone();
        }
        let mean_value = values.iter().sum::<f64>() / batch as f64;
        if batch == lambda {
            search.update(&strategy, &candidates, &order);
        }

        trace.push(TraceRow {
            generation,
            evaluations,
            best_value,
            mean_value,
            sigma: search.sigma,
            best_x: best_x.clone(),
        });
        generation += 1;

        if cfg.target.is_some_and(|t| best_value <= t) {
            break Termination::Target;
        }
        if evaluations >= cfg.max_evaluations {
            break Termination::Budget;
        }

        recent.push(values[order[0]]);
        recent.push(values[order[batch - 1]]);
        if recent.len() > 2 * stall_window {
            recent.drain(..2);
        }
        let spread = recent.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
            - recent.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        let stalled = recent.len() == 2 * stall_window && spread <= 1e-12 * best_value.abs().max(1e-300);
        let collapsed = search.step_size() < SIGMA_FLOOR * max_width.max(1.0) || search.sigma < SIGMA_FLOOR;
        if collapsed || stalled || search.is_broken(max_width) {
            if restart >= cfg.max_restarts {
                break Termination::SigmaCollapse;
            }
            restart += 1;
            let grow = 1usize << restart.min(16);
            strategy = Strategy::new(n, cfg.population * grow, cfg.parents * grow);
            let mean = DVector::from_iterator(
                n,
                bounds
                    .lower
                    .iter()
                    .zip(&bounds.upper)
                    .map(|(lo, hi)| rng.random_range(*lo..=*hi)),
            );
            search = Search::new(mean, initial_sigma);
            recent.clear();
        }
    };

    Ok(OptimizationResult {
        best_x,
        best_value,
        evaluations,
        trace,
        termination,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicUsize, Ordering};

    fn cfg(seed: u64, budget: usize, target: f64) -> CmaEsConfig {
        CmaEsConfig {
            max_evaluations: budget,
            target: Some(target),
            seed,
            ..CmaEsConfig::for_dimension(2)
        }
    }

    #[test]
    fn defaults_for_two_dimensions() {
        let c = CmaEsConfig::for_dimension(2);
        assert_eq!((c.population, c.parents), (6, 3));
    }

    #[test]
    fn invalid_configs_rejected() {
        let b = Bounds::new(vec![0.0], vec![1.0]).unwrap();
        let bad = [
            CmaEsConfig { population: 3, ..CmaEsConfig::for_dimension(1) },
            CmaEsConfig { parents: 0, ..CmaEsConfig::for_dimension(1) },
            CmaEsConfig { parents: 3, ..CmaEsConfig::for_dimension(1) },
            CmaEsConfig { initial_sigma: Some(0.0), ..CmaEsConfig::for_dimension(1) },
        ];
        for c in bad {
            assert_eq!(cma_es_minimize(|x| x[0], &c, &b).unwrap_err().name(), "InvalidConfig");
        }
        assert!(Bounds::new(vec![1.0], vec![0.0]).is_err());
    }

    #[test]
    fn sphere_converges_to_centre() {
        let c = [0.3, -1.7];
        let b = Bounds::new(vec![-5.0, -5.0], vec![5.0, 5.0]).unwrap();
        let r = cma_es_minimize(|x| (x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2), &cfg(1, 5000, 1e-14), &b).unwrap();
        let dist = (r.best_x[0] - c[0]).hypot(r.best_x[1] - c[1]);
        assert!(dist <= 1e-6, "{dist} after {}", r.evaluations);
        assert!(r.evaluations <= 5000);
    }

    #[test]
    fn best_value_never_increases() {
        let b = Bounds::new(vec![-2.0, -2.0], vec![2.0, 2.0]).unwrap();
        let rosen = |x: &[f64]| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2);
        let r = cma_es_minimize(rosen, &cfg(7, 3000, 0.0), &b).unwrap();
        assert!(r.trace.windows(2).all(|w| w[1].best_value <= w[0].best_value));
    }

    #[test]
    fn same_seed_same_trace() {
        let b = Bounds::new(vec![-2.0, -2.0], vec![2.0, 2.0]).unwrap();
        let f = |x: &[f64]| (x[0] - 0.5).powi(2) + 3.0 * (x[1] + 0.25).powi(2);
        let a = cma_es_minimize(f, &cfg(42, 600, 0.0), &b).unwrap();
        let seq = CmaEsConfig { execution: Execution::Sequential, ..cfg(42, 600, 0.0) };
        let c = cma_es_minimize(f, &seq, &b).unwrap();
        assert_eq!(a, c);
        let other = cma_es_minimize(f, &cfg(43, 600, 0.0), &b).unwrap();
        assert_ne!(a.trace, other.trace);
    }

    #[test]
    fn objective_never_sees_out_of_bounds_points() {
        let b = Bounds::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let violations = AtomicUsize::new(0);
        let bb = b.clone();
        // Minimum outside the box pushes the search against the boundary.
        let r = cma_es_minimize(
            |x| {
                if !bb.contains(x) {
                    violations.fetch_add(1, Ordering::Relaxed);
                }
                (x[0] - 3.0).powi(2) + (x[1] + 2.0).powi(2)
            },
            &cfg(3, 2000, f64::NEG_INFINITY),
            &b,
        )
        .unwrap();
        assert_eq!(violations.load(Ordering::Relaxed), 0);
        assert!((r.best_x[0] - 1.0).abs() < 1e-3 && r.best_x[1].abs() < 1e-3, "{:?}", r.best_x);
    }

    #[test]
    fn point_box_returns_the_point() {
        let b = Bounds::new(vec![0.25, 0.5], vec![0.25, 0.5]).unwrap();
        let r = cma_es_minimize(|x| x[0] + x[1], &cfg(0, 100, 0.0), &b).unwrap();
        assert_eq!(r.best_x, vec![0.25, 0.5]);
        assert_eq!(r.best_value, 0.75);
        assert_eq!(r.termination, Termination::PointBox);
    }

    #[test]
    fn budget_is_respected() {
        let b = Bounds::new(vec![-1.0; 3], vec![1.0; 3]).unwrap();
        let c = CmaEsConfig { max_evaluations: 50, ..CmaEsConfig::for_dimension(3) };
        let r = cma_es_minimize(|x| x.iter().map(|v| v.abs()).sum(), &c, &b).unwrap();
        assert_eq!(r.evaluations, 50);
        assert_eq!(r.termination, Termination::Budget);
    }
}
