//! Special functions: log-gamma, beta, regularized incomplete gamma, and the
//! one-parameter Gauss hypergeometric family used by the decode analysis.

use crate::error::{Error, Result};
use crate::numerics::quad::{adaptive_quadrature, Tolerance};

/// Natural log of the gamma function.
pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// Regularized upper incomplete gamma Q(a, x).
pub fn regularized_gamma_upper(a: f64, x: f64) -> f64 {
    statrs::function::gamma::gamma_ur(a, x)
}

/// Beta function B(a, b) for a, b > 0, computed through log-gamma.
pub fn beta_function(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0) || !(b > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "beta_function requires a, b > 0, got a={a}, b={b}"
        )));
    }
    Ok((ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp())
}

/// Gauss hypergeometric 2F1(1, 2/alpha; 1 + 2/alpha; z) for z <= 0 and
/// alpha > 2.
///
/// For |z| < 1/2 the defining series sum_n b/(b+n) z^n (b = 2/alpha) is used;
/// otherwise the integral representation 2F1(1, b; b+1; -w) =
/// int_0^1 du / (1 + w u^{1/b}) (the substitution t = u^{1/b} of the Euler
/// integral, which removes the endpoint singularity) is evaluated adaptively.
pub fn gauss_2f1_family(alpha: f64, z: f64) -> Result<f64> {
    if !(alpha > 2.0) {
        return Err(Error::InvalidParameter(format!(
            "gauss_2f1_family requires alpha > 2, got {alpha}"
        )));
    }
    if z > 0.0 {
        return Err(Error::InvalidParameter(format!(
            "gauss_2f1_family requires z <= 0, got {z}"
        )));
    }
    let b = 2.0 / alpha;
    if z == 0.0 {
        return Ok(1.0);
    }
    if z > -0.5 {
        // Series: terms b/(b+n) z^n; ratio |z| < 1/2 gives fast convergence.
        let mut sum = 0.0;
        let mut zn = 1.0;
        for n in 0..200 {
            let term = b / (b + n as f64) * zn;
            sum += term;
            if term.abs() < 1e-17 * sum.abs() {
                return Ok(sum);
            }
            zn *= z;
        }
        return Ok(sum);
    }
    let w = -z;
    let inv_b = 1.0 / b;
    let r = adaptive_quadrature(
        |u| 1.0 / (1.0 + w * u.powf(inv_b)),
        0.0,
        1.0,
        Tolerance::new(1e-300, 1e-12),
    );
    if !r.converged {
        return Err(Error::QuadratureNotConverged {
            achieved: r.error_estimate / r.value.abs().max(f64::MIN_POSITIVE),
            requested: 1e-12,
        });
    }
    Ok(r.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn beta_closed_forms() {
        assert_abs_diff_eq!(beta_function(1.0, 1.0).unwrap(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(beta_function(2.0, 3.0).unwrap(), 1.0 / 12.0, epsilon = 1e-14);
        assert!(beta_function(0.0, 1.0).is_err());
        assert!(beta_function(1.0, -2.0).is_err());
    }

    #[test]
    fn beta_matches_factorial_formula() {
        // B(n, l-n+1) = (n-1)! (l-n)! / l! for integers, l <= 20
        let fact = |k: usize| (1..=k).map(|v| v as f64).product::<f64>();
        for l in 1..=20usize {
            for n in 1..=l {
                let exact = fact(n - 1) * fact(l - n) / fact(l);
                let got = beta_function(n as f64, (l - n + 1) as f64).unwrap();
                assert_abs_diff_eq!(got, exact, epsilon = 1e-12 * exact);
            }
        }
    }

    #[test]
    fn hypergeometric_at_origin() {
        assert_abs_diff_eq!(gauss_2f1_family(3.7, 0.0).unwrap(), 1.0, epsilon = 0.0);
    }

    #[test]
    fn hypergeometric_arctangent_identity() {
        // alpha = 4: 2F1(1, 1/2; 3/2; -w^2) = atan(w)/w
        for w in [0.3, 1.0, 2.5, 10.0] {
            let got = gauss_2f1_family(4.0, -w * w).unwrap();
            assert_abs_diff_eq!(got, w.atan() / w, epsilon = 1e-11);
        }
        assert_abs_diff_eq!(gauss_2f1_family(4.0, -1.0).unwrap(), PI / 4.0, epsilon = 1e-11);
    }

    #[test]
    fn hypergeometric_matches_direct_quadrature() {
        // alpha = 3, z = -2 against the raw Euler integral b int t^{b-1}/(1+w t)
        let alpha = 3.0;
        let b = 2.0 / alpha;
        let w = 2.0;
        let direct = adaptive_quadrature(
            |t| b * t.powf(b - 1.0) / (1.0 + w * t),
            0.0,
            1.0,
            Tolerance::new(1e-14, 1e-13),
        );
        let got = gauss_2f1_family(alpha, -w).unwrap();
        assert_abs_diff_eq!(got, direct.value, epsilon = 1e-10);
    }

    #[test]
    fn hypergeometric_continuous_across_method_switch() {
        for alpha in [2.5, 3.0, 4.0, 5.0] {
            let lo = gauss_2f1_family(alpha, -0.5).unwrap(); // integral branch
            let hi = gauss_2f1_family(alpha, -0.5 + 1e-12).unwrap(); // series branch
            assert_abs_diff_eq!(lo, hi, epsilon = 1e-10);
        }
    }

    #[test]
    fn hypergeometric_large_argument() {
        // Large |z| exercises the boundary layer of the integral transform;
        // check against the asymptotic head b*pi/sin(pi b) * w^{-b} + b/(1-b) * (-1/w)...
        // via a direct high-resolution quadrature instead of the expansion.
        let alpha = 4.0;
        let w: f64 = 1.0e10;
        let got = gauss_2f1_family(alpha, -w).unwrap();
        let expect = w.sqrt().atan() / w.sqrt(); // atan identity with w = v^2
        assert_abs_diff_eq!(got, expect, epsilon = 1e-10 * expect.abs().max(1e-10));
    }
}
