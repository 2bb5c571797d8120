//! Small numeric helpers shared by the simulator and its reference formulas.

use std::f64::consts::SQRT_2;

/// Convert a decibel power ratio to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10.0_f64.powf(db / 10.0)
}

/// Convert a linear power ratio to decibels.
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Gaussian tail probability Q(x) = P(Z > x) for standard normal Z.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}

/// Bessel function of the first kind, order zero, by power series:
/// J0(x) = sum_m (-1)^m (x^2/4)^m / (m!)^2.
///
/// Converges quickly for the arguments this crate needs (Doppler-lag
/// products, |x| up to a few tens); absolute error is well below 1e-10
/// there.
pub fn bessel_j0(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut m = 1.0;
    // Terms grow until m ~ x/2, so do not stop before that hump.
    while m < 250.0 {
        term *= -q / (m * m);
        sum += term;
        if term.abs() < 1e-17 && m > 0.5 * x.abs() {
            break;
        }
        m += 1.0;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn db_round_trip() {
        for &db in &[-20.0, -3.0, 0.0, 1.0, 10.0, 33.3] {
            assert!((linear_to_db(db_to_linear(db)) - db).abs() < 1e-12);
        }
        assert!((db_to_linear(0.0) - 1.0).abs() < 1e-15);
        assert!((db_to_linear(10.0) - 10.0).abs() < 1e-12);
        assert!((db_to_linear(3.0) - 1.9952623149688795).abs() < 1e-12);
    }

    #[test]
    fn q_function_reference_values() {
        // Q(0) = 1/2 exactly; the other values are classic normal-table
        // entries computed from erfc.
        assert_eq!(q_function(0.0), 0.5);
        assert!((q_function(1.0) - 0.15865525393145707).abs() < 1e-12);
        assert!((q_function(2.0) - 0.022750131948179212).abs() < 1e-12);
        assert!((q_function(3.0) - 1.3498980316300957e-3).abs() < 1e-15);
        // Symmetry Q(-x) = 1 - Q(x).
        for &x in &[0.3, 1.7, 2.9] {
            assert!((q_function(-x) + q_function(x) - 1.0).abs() < 1e-14);
        }
        // Monotone decreasing.
        assert!(q_function(1.0) > q_function(1.5));
    }

    #[test]
    fn bessel_j0_matches_series_landmarks() {
        // J0(0) = 1, and the first zero sits at x = 2.404825557695773.
        assert_eq!(bessel_j0(0.0), 1.0);
        assert!(bessel_j0(2.404825557695773).abs() < 1e-10);
        // Reference values (Abramowitz & Stegun table 9.1).
        assert!((bessel_j0(1.0) - 0.7651976865579666).abs() < 1e-10);
        assert!((bessel_j0(2.0) - 0.22389077914123567).abs() < 1e-10);
        assert!((bessel_j0(5.0) - (-0.1775967713143383)).abs() < 1e-10);
        assert!((bessel_j0(10.0) - (-0.24593576445134835)).abs() < 1e-9);
        // Even function.
        assert_eq!(bessel_j0(3.25), bessel_j0(-3.25));
    }

    #[test]
    fn bessel_j0_agrees_with_integral_definition() {
        // Independent oracle: J0(x) = (1/pi) * integral_0^pi cos(x sin t) dt,
        // evaluated by midpoint rule with a fine grid.
        let oracle = |x: f64| {
            let n = 20_000;
            let h = std::f64::consts::PI / n as f64;
            let mut acc = 0.0;
            for i in 0..n {
                let t = (i as f64 + 0.5) * h;
                acc += (x * t.sin()).cos();
            }
            acc * h / std::f64::consts::PI
        };
        for &x in &[0.1, 0.7, 1.9, 4.4, 8.0, 15.5, 25.0] {
            assert!(
                (bessel_j0(x) - oracle(x)).abs() < 1e-8,
                "J0({x}) series {} vs integral {}",
                bessel_j0(x),
                oracle(x)
            );
        }
    }
}
