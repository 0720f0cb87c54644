//! Mechanical advantage against a constrained finite difference built on an
//! independent Newton solve of the loop equation.

use std::f64::consts::PI;

use hybrid_finger::defaults;
use hybrid_finger::fivebar::{mechanical_advantage, solve_closure, transmission_sine, Branch, LinkageGeometry, LinkageState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Solves for `(phi2, phi3)` with `phi1`, `phi4`, `phi5` held, starting from
/// a nearby state.
fn close_for_phi4(g: &LinkageGeometry, phi: [f64; 5], phi4: f64) -> (f64, f64) {
    let l = g.lengths;
    let (mut p2, mut p3) = (phi[1], phi[2]);
    for _ in 0..50 {
        let rx = l[0] * phi[0].cos() + l[1] * p2.cos() + l[2] * p3.cos() + l[3] * phi4.cos() + l[4] * phi[4].cos();
        let ry = l[0] * phi[0].sin() + l[1] * p2.sin() + l[2] * p3.sin() + l[3] * phi4.sin() + l[4] * phi[4].sin();
        // Jacobian columns d/dphi2 and d/dphi3.
        let (a, c) = (-l[1] * p2.sin(), l[1] * p2.cos());
        let (b, d) = (-l[2] * p3.sin(), l[2] * p3.cos());
        let det = a * d - b * c;
        let s2 = (d * rx - b * ry) / det;
        let s3 = (a * ry - c * rx) / det;
        p2 -= s2;
        p3 -= s3;
        if s2.abs().max(s3.abs()) < 1e-15 {
            break;
        }
    }
    (p2, p3)
}

fn finite_difference(g: &LinkageGeometry, s: &LinkageState) -> f64 {
    let h = 1e-6;
    let (up, _) = close_for_phi4(g, s.phi, s.phi[3] + h);
    let (down, _) = close_for_phi4(g, s.phi, s.phi[3] - h);
    (up - down) / (2.0 * h)
}

/// Well-conditioned feasible states: away from the singularity and from
/// vanishing advantage where a relative comparison is meaningless.
fn feasible_states(g: &LinkageGeometry, rng: &mut ChaCha8Rng, count: usize) -> Vec<LinkageState> {
    let mut out = Vec::new();
    for _ in 0..200_000 {
        let branch = if rng.random::<bool>() { Branch::ElbowUp } else { Branch::ElbowDown };
        let (p1, p2) = (rng.random_range(-PI..PI), rng.random_range(-PI..PI));
        if let Ok(s) = solve_closure(g, p1, p2, branch) {
            let ma = mechanical_advantage(&s, g);
            if transmission_sine(&s) > 0.05 && ma.is_ok_and(|m| m.abs() > 1e-3) {
                out.push(s);
                if out.len() == count {
                    break;
                }
            }
        }
    }
    out
}

#[test]
fn mechanical_advantage_matches_constrained_difference() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut geometries = vec![defaults::linkage_geometry()];
    while geometries.len() < 4 {
        let lengths = [(); 5].map(|_| rng.random_range(15e-3..110e-3));
        let g = LinkageGeometry::new(lengths, PI).unwrap();
        if feasible_states(&g, &mut rng.clone(), 200).len() == 200 {
            geometries.push(g);
        }
    }
    for g in &geometries {
        let states = feasible_states(g, &mut rng, 200);
        assert_eq!(states.len(), 200, "{g:?}");
        for s in &states {
            assert!(g.closure_residual(&s.phi) <= 1e-10 * g.total_length());
            let ma = mechanical_advantage(s, g).unwrap();
            let fd = finite_difference(g, s);
            let rel = (ma - fd).abs() / fd.abs();
            assert!(rel <= 1e-4, "{g:?} {s:?}: {ma} vs {fd}");
        }
    }
}
