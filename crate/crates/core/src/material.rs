//! Elastomer hardness conversion.

/// Young's modulus (Pa) of an elastomer from its Shore A durometer using the
/// Gent relation `E[MPa] = 0.0981 (56 + 7.62336 S) / (0.137505 (254 - 2.54 S))`.
///
/// Valid for `0 <= S < 100`; returns NaN outside that range.
pub fn shore_a_to_modulus(shore_a: f64) -> f64 {
    if !(0.0..100.0).contains(&shore_a) {
        return f64::NAN;
    }
    let mpa = 0.0981 * (56.0 + 7.62336 * shore_a) / (0.137505 * (254.0 - 2.54 * shore_a));
    mpa * 1e6
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shore_10a_is_about_0_4_mpa() {
        // 0.0981 * 132.2336 / (0.137505 * 228.6), worked by hand.
        let e = shore_a_to_modulus(10.0);
        assert!((e - 412_682.556_711_6).abs() < 1e-3, "{e}");
    }

    #[test]
    fn harder_rubber_is_stiffer() {
        assert!(shore_a_to_modulus(20.0) > shore_a_to_modulus(10.0));
        assert!(shore_a_to_modulus(120.0).is_nan());
    }
}
