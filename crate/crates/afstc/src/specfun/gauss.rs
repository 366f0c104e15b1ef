//! Gaussian tail probability Q(x).

use super::SpecFunError;

/// Q(x) = Pr{N(0,1) > x} = ½·erfc(x/√2).
///
/// Absolute error ≤ 1e-14 over the whole real line (the erfc kernel is
/// correctly rounded to ~1 ulp). Q(40) and beyond underflow to 0, per the
/// module-level underflow policy.
///
/// # Errors
///
/// NaN or ±∞ produce [`SpecFunError::Domain`].
///
/// # Examples
///
/// ```
/// use afstc::specfun::gaussian_q;
///
/// assert_eq!(gaussian_q(0.0).unwrap(), 0.5);
/// let q = gaussian_q(1.0).unwrap();
/// assert!((q - 0.158655253931457).abs() < 1e-14);
/// // Complement identity:
/// let x = 0.73;
/// let s = gaussian_q(x).unwrap() + gaussian_q(-x).unwrap();
/// assert!((s - 1.0).abs() < 1e-15);
/// ```
pub fn gaussian_q(x: f64) -> Result<f64, SpecFunError> {
    if !x.is_finite() {
        return Err(SpecFunError::Domain {
            func: "gaussian_q",
            arg: "x",
            value: x,
            requirement: "must be finite",
        });
    }
    Ok(0.5 * libm::erfc(x / std::f64::consts::SQRT_2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nonfinite_input() {
        for bad in [f64::NAN, f64::INFINITY, f64::NEG_INFINITY] {
            assert!(gaussian_q(bad).is_err());
        }
    }

    #[test]
    fn halves_at_zero_and_decays_monotonically() {
        assert_eq!(gaussian_q(0.0).unwrap(), 0.5);
        // Below x ≈ −8.3 the value saturates to exactly 1.0 in f64, so strict
        // monotonicity is only meaningful on the representable range.
        let grid: Vec<f64> = (-32..=32).map(|i| i as f64 / 4.0).collect();
        for w in grid.windows(2) {
            assert!(gaussian_q(w[0]).unwrap() > gaussian_q(w[1]).unwrap());
        }
    }

    #[test]
    fn far_tail_underflows_to_zero() {
        assert!(gaussian_q(40.0).unwrap() < 1e-300);
    }

    #[test]
    fn matches_two_sigma_textbook_value() {
        // Q(2) = 0.02275013194817921... (to 16 digits)
        assert!((gaussian_q(2.0).unwrap() - 0.022750131948179212).abs() < 1e-14);
    }
}
