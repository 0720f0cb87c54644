use hybrid_finger::cmaes::{cma_es_minimize, Bounds, CmaEsConfig, Termination};
use hybrid_finger::exec::Execution;

fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn rosenbrock(x: &[f64]) -> f64 {
    100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2)
}

fn rastrigin(x: &[f64]) -> f64 {
    10.0 * x.len() as f64
        + x.iter()
            .map(|v| v * v - 10.0 * (2.0 * std::f64::consts::PI * v).cos())
            .sum::<f64>()
}

fn config(seed: u64, budget: usize, target: f64) -> CmaEsConfig {
    CmaEsConfig {
        max_evaluations: budget,
        target: Some(target),
        seed,
        ..CmaEsConfig::for_dimension(2)
    }
}

#[test]
fn sphere_reaches_optimum() {
    let b = Bounds::new(vec![-5.0; 2], vec![5.0; 2]).unwrap();
    for seed in 0..5 {
        let r = cma_es_minimize(sphere, &config(seed, 5000, 1e-13), &b).unwrap();
        assert!(r.evaluations <= 5000);
        assert!(r.best_x.iter().all(|v| v.abs() <= 1e-6), "seed {seed}: {:?}", r.best_x);
    }
}

#[test]
fn rosenbrock_reaches_optimum() {
    let b = Bounds::new(vec![-5.0; 2], vec![5.0; 2]).unwrap();
    for seed in 0..5 {
        let r = cma_es_minimize(rosenbrock, &config(seed, 20_000, 1e-10), &b).unwrap();
        assert!(r.evaluations <= 20_000);
        let dist = (r.best_x[0] - 1.0).hypot(r.best_x[1] - 1.0);
        assert!(dist <= 1e-3, "seed {seed}: {:?} after {}", r.best_x, r.evaluations);
    }
}

#[test]
fn fixed_seed_gives_bit_identical_trace() {
    let b = Bounds::new(vec![-2.0; 2], vec![2.0; 2]).unwrap();
    let cfg = CmaEsConfig { max_restarts: 3, ..config(9, 3000, f64::NEG_INFINITY) };
    let a = cma_es_minimize(rosenbrock, &cfg, &b).unwrap();
    let again = cma_es_minimize(rosenbrock, &cfg, &b).unwrap();
    let seq = cma_es_minimize(rosenbrock, &CmaEsConfig { execution: Execution::Sequential, ..cfg.clone() }, &b).unwrap();
    for other in [&again, &seq] {
        assert_eq!(a.trace.len(), other.trace.len());
        for (x, y) in a.trace.iter().zip(&other.trace) {
            assert_eq!(x.best_value.to_bits(), y.best_value.to_bits());
            assert_eq!(x.mean_value.to_bits(), y.mean_value.to_bits());
            assert_eq!(x.sigma.to_bits(), y.sigma.to_bits());
        }
    }
}

#[test]
fn restarts_do_not_lose_the_best_point() {
    let b = Bounds::new(vec![-5.12; 2], vec![5.12; 2]).unwrap();
    for seed in 0..5 {
        let single = cma_es_minimize(rastrigin, &config(seed, 6000, f64::NEG_INFINITY), &b).unwrap();
        let ipop = cma_es_minimize(
            rastrigin,
            &CmaEsConfig { max_restarts: 8, ..config(seed, 6000, f64::NEG_INFINITY) },
            &b,
        )
        .unwrap();
        assert!(ipop.best_value <= single.best_value, "seed {seed}");
        assert!(ipop.trace.windows(2).all(|w| w[1].best_value <= w[0].best_value));
        assert_ne!(single.termination, Termination::Budget);
    }
}
