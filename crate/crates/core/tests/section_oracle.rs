//! Cross-section and effective-rigidity oracles: modulus-weighted Gauss
//! quadrature over an explicit rectangle decomposition of the section, and
//! tip-load strain-energy quadrature along the two-segment beam.

use hybrid_finger::beam::{
    effective_rigidity, section_effective_rigidity, section_properties, FingertipSection, Segment,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// (x0, x1, y0, y1, modulus)
type Patch = (f64, f64, f64, f64, f64);

/// The pulp is split around the phalanx cavity rather than subtracted, so
/// the decomposition shares nothing with the parallel-axis bookkeeping.
fn patches(s: &FingertipSection, segment: Segment) -> Vec<Patch> {
    let (b, h) = (s.pulp_width, s.pulp_height);
    let (bd, hd) = (s.phalanx_width, s.phalanx_height);
    let x0 = 0.5 * (b - bd);
    let x1 = x0 + bd;
    let cavity_floor = h - hd;
    let phalanx = match segment {
        Segment::Proximal => s.phalanx_modulus,
        Segment::Distal => 0.0,
    };
    vec![
        (0.0, b, 0.0, cavity_floor, s.pulp_modulus),
        (0.0, x0, cavity_floor, h, s.pulp_modulus),
        (x1, b, cavity_floor, h, s.pulp_modulus),
        (x0, x1, cavity_floor, h, phalanx),
        (0.0, b, h, h + s.nail_thickness, s.nail_modulus),
    ]
}

/// Tensor 3-point Gauss-Legendre rule on each patch.
fn integrate(patches: &[Patch], f: impl Fn(f64, f64) -> f64) -> f64 {
    let nodes = [-(0.6f64).sqrt(), 0.0, (0.6f64).sqrt()];
    let weights = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
    let mut total = 0.0;
    for &(x0, x1, y0, y1, e) in patches {
        if x1 <= x0 || y1 <= y0 || e == 0.0 {
            continue;
        }
        let (cx, hx, cy, hy) = (0.5 * (x0 + x1), 0.5 * (x1 - x0), 0.5 * (y0 + y1), 0.5 * (y1 - y0));
        for (u, wu) in nodes.iter().zip(&weights) {
            for (v, wv) in nodes.iter().zip(&weights) {
                total += e * wu * wv * hx * hy * f(cx + hx * u, cy + hy * v);
            }
        }
    }
    total
}

fn quadrature_rigidity(s: &FingertipSection, segment: Segment) -> (f64, f64) {
    let p = patches(s, segment);
    let ea = integrate(&p, |_, _| 1.0);
    let axis = integrate(&p, |_, y| y) / ea;
    (axis, integrate(&p, |_, y| (y - axis).powi(2)))
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

fn random_section(rng: &mut ChaCha8Rng, case: usize) -> FingertipSection {
    let pulp_width = rng.random_range(5e-3..30e-3);
    let pulp_height = rng.random_range(4e-3..20e-3);
    let mut s = FingertipSection {
        pulp_width,
        pulp_height,
        phalanx_width: rng.random_range(0.1..1.0) * pulp_width,
        phalanx_height: rng.random_range(0.1..0.9) * pulp_height,
        nail_thickness: rng.random_range(0.1e-3..2e-3),
        pulp_modulus: log_uniform(rng, 1e4, 1e7),
        phalanx_modulus: log_uniform(rng, 1e8, 2e10),
        nail_modulus: log_uniform(rng, 1e6, 1e10),
        proximal_length: rng.random_range(5e-3..30e-3),
        distal_length: rng.random_range(0.0..10e-3),
    };
    match case % 5 {
        0 => s.nail_thickness = 0.0,
        1 => s.phalanx_width = 0.0,
        2 => s.phalanx_height = 0.0,
        3 => {
            s.nail_thickness = 0.0;
            s.phalanx_width = 0.0;
        }
        _ => {}
    }
    s
}

#[test]
fn section_rigidity_matches_area_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for case in 0..50 {
        let s = random_section(&mut rng, case);
        for segment in [Segment::Proximal, Segment::Distal] {
            let p = section_properties(&s, segment).unwrap();
            let (axis, ei) = quadrature_rigidity(&s, segment);
            let rel = (p.flexural_rigidity - ei).abs() / ei;
            assert!(rel <= 1e-6, "case {case} {segment:?}: rel err {rel:e} ({s:?})");
            assert!((p.neutral_axis - axis).abs() <= 1e-9 * s.total_height());
        }
    }
}

/// Strain energy of a tip-loaded cantilever, `int M^2 / (2 EI) dx` with
/// `M = F (L - x)`, split at the end of the proximal segment.
fn tip_load_energy(ei1: f64, ei2: f64, l1: f64, l2: f64, force: f64) -> f64 {
    let l = l1 + l2;
    let panels = 2000;
    let simpson = |a: f64, b: f64, ei: f64| {
        if b <= a {
            return 0.0;
        }
        let h = (b - a) / panels as f64;
        let f = |x: f64| (force * (l - x)).powi(2) / (2.0 * ei);
        let mut sum = f(a) + f(b);
        for k in 1..panels {
            sum += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        sum * h / 3.0
    };
    simpson(0.0, l1, ei1) + simpson(l1, l, ei2)
}

#[test]
fn effective_rigidity_matches_energy_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for case in 0..50 {
        let s = random_section(&mut rng, case);
        let ei1 = section_properties(&s, Segment::Proximal).unwrap().flexural_rigidity;
        let ei2 = section_properties(&s, Segment::Distal).unwrap().flexural_rigidity;
        let l = s.total_length();
        let force = 1.0;
        let energy = tip_load_energy(ei1, ei2, s.proximal_length, s.distal_length, force);
        // A uniform beam of rigidity EI stores F^2 L^3 / (6 EI).
        let oracle = force * force * l.powi(3) / (6.0 * energy);
        let got = section_effective_rigidity(&s).unwrap();
        assert_eq!(got, effective_rigidity(ei1, ei2, s.proximal_length, s.distal_length));
        let rel = (got - oracle).abs() / oracle;
        assert!(rel <= 1e-8, "case {case}: rel err {rel:e}");
    }
}
