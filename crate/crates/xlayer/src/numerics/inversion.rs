//! Tail probabilities from a characteristic function.
//!
//! Implements the inversion integral
//!
//! ```text
//! P[X < rho] = 1/2 - (1/pi) * int_0^inf Im[ psi(w) e^{-i w rho} ] / w dw
//! ```
//!
//! with oscillation-aware panel sizing (panels no wider than a quarter
//! half-period of `e^{-i w rho}`), truncation once the characteristic
//! function has decayed, and an integration-by-parts estimate of the
//! discarded tail.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::quad::{adaptive_quadrature, Tolerance};

/// Which tail of the distribution to return.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailDirection {
    /// P[X < rho]
    Below,
    /// P[X > rho]
    Above,
}

/// Invert a characteristic function into a tail probability at threshold
/// `rho > 0`.
///
/// `cf` must satisfy cf(0) = 1 and |cf| <= 1. The result is accurate to
/// roughly `tol`; values straying outside [0, 1] by more than a small
/// multiple of `tol` are reported as errors rather than clamped.
pub fn cf_inversion<F>(cf: F, rho: f64, tail: TailDirection, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "cf_inversion requires a positive finite threshold, got {rho}"
        )));
    }

    let panel = std::f64::consts::PI / (4.0 * rho);

    // Truncation point: double until the CF has decayed outright or the
    // integration-by-parts bound on the remaining tail is negligible.
    let mut omega_max = panel;
    let mut tail_bound;
    let mut doublings = 0;
    loop {
        let psi = cf(omega_max)?;
        let mag = psi.norm();
        tail_bound = 2.0 * mag / (std::f64::consts::PI * omega_max * rho);
        if mag < 1e-10 || tail_bound < tol / 8.0 {
            break;
        }
        omega_max *= 2.0;
        doublings += 1;
        if doublings > 90 {
            return Err(Error::SlowCfDecay { bound: tail_bound, omega: omega_max });
        }
    }

    let n_panels = (omega_max / panel).ceil() as usize;
    let per_panel_abs = tol * std::f64::consts::PI / (2.0 * n_panels as f64);

    let mut integral = 0.0;
    let mut carry = 0.0; // Kahan compensation
    let failure: std::cell::Cell<Option<Error>> = std::cell::Cell::new(None);
    for k in 0..n_panels {
        let a = k as f64 * panel;
        let b = ((k + 1) as f64 * panel).min(omega_max);
        let r = adaptive_quadrature(
            |w| {
                if w == 0.0 {
                    return 0.0;
                }
                match cf(w) {
                    Ok(psi) => {
                        let v = (psi * Complex64::from_polar(1.0, -w * rho)).im / w;
                        if v.is_finite() {
                            v
                        } else {
                            0.0
                        }
                    }
                    Err(e) => {
                        failure.set(Some(e));
                        0.0
                    }
                }
            },
            a,
            b,
            Tolerance::new(per_panel_abs, 1e-10),
        );
        if let Some(e) = failure.take() {
            return Err(e);
        }
        let y = r.value - carry;
        let t = integral + y;
        carry = (t - integral) - y;
        integral = t;
    }

    // Leading integration-by-parts term of the discarded tail:
    // int_Omega^inf Im[psi e^{-iw rho}]/w dw ~ -Re[psi(Omega) e^{-i Omega rho}] / (Omega rho)
    let psi_end = cf(omega_max)?;
    let tail_term = -(psi_end * Complex64::from_polar(1.0, -omega_max * rho)).re / (omega_max * rho);
    integral += tail_term;

    let below = 0.5 - integral / std::f64::consts::PI;
    let value = match tail {
        TailDirection::Below => below,
        TailDirection::Above => 1.0 - below,
    };

    let clamp_tol = (10.0 * tol).max(1e-9);
    if value < -clamp_tol || value > 1.0 + clamp_tol {
        return Err(Error::ProbabilityOutOfRange { value });
    }
    Ok(value.clamp(0.0, 1.0))
}
