//! Gamma function family for real arguments.

use std::f64::consts::PI;

use crate::error::{domain, Result};

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// Stirling coefficients B_{2k} / (2k (2k - 1)).
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

const STIRLING_MIN: f64 = 10.0;

/// Stirling series, valid for `x >= STIRLING_MIN`.
fn ln_gamma_stirling(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut corr = 0.0;
    let mut pow = inv;
    for c in STIRLING {
        corr += c * pow;
        pow *= inv2;
    }
    (x - 0.5) * x.ln() - x + HALF_LN_2PI + corr
}

/// ln Γ(x) for x > 0 without domain checking.
pub(crate) fn ln_gamma_pos(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    // Exact zeros; the shifted series leaves ~1e-15 absolute error there.
    if x == 1.0 || x == 2.0 {
        return 0.0;
    }
    if x >= STIRLING_MIN {
        return ln_gamma_stirling(x);
    }
    // Shift upward: Γ(x) = Γ(x + n) / (x (x + 1) ... (x + n - 1)).
    let mut shifted = x;
    let mut prod = 1.0;
    while shifted < STIRLING_MIN {
        prod *= shifted;
        shifted += 1.0;
    }
    ln_gamma_stirling(shifted) - prod.ln()
}

/// Natural logarithm of the gamma function for positive arguments.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(domain("ln_gamma", x, "finite x > 0"));
    }
    Ok(ln_gamma_pos(x))
}

/// sin(πx) with exact argument reduction.
pub(crate) fn sin_pi(x: f64) -> f64 {
    // r in [-1, 1]; exact, and keeps full relative precision for small x.
    let r = x - 2.0 * (0.5 * x).round();
    if r == 0.0 || r.abs() == 1.0 {
        return 0.0;
    }
    if r.abs() <= 0.5 {
        (PI * r).sin()
    } else if r > 0.0 {
        (PI * (1.0 - r)).sin()
    } else {
        (PI * (-1.0 - r)).sin()
    }
}

/// `(ln |Γ(x)|, sign Γ(x))` for any real x that is not a pole.
///
/// Returns `None` at the poles x = 0, -1, -2, ...
pub(crate) fn ln_gamma_signed(x: f64) -> Option<(f64, f64)> {
    if x > 0.0 {
        return Some((ln_gamma_pos(x), 1.0));
    }
    if x == x.floor() {
        return None;
    }
    // Reflection: Γ(x) Γ(1 - x) = π / sin(πx).
    let s = sin_pi(x);
    Some((PI.ln() - s.abs().ln() - ln_gamma_pos(1.0 - x), s.signum()))
}

/// Γ(x) for real non-pole x; infinite at the poles.
#[cfg(test)]
pub(crate) fn gamma(x: f64) -> f64 {
    match ln_gamma_signed(x) {
        Some((l, s)) => s * l.exp(),
        None => f64::INFINITY,
    }
}

/// ln of the binomial coefficient C(n, k).
pub(crate) fn ln_binomial(n: u32, k: u32) -> f64 {
    debug_assert!(k <= n);
    ln_gamma_pos(f64::from(n) + 1.0)
        - ln_gamma_pos(f64::from(k) + 1.0)
        - ln_gamma_pos(f64::from(n - k) + 1.0)
}

/// Binomial coefficient through ln Γ, rounded to the nearest integer.
#[cfg(test)]
pub(crate) fn binomial(n: u32, k: u32) -> f64 {
    ln_binomial(n, k).exp().round()
}
