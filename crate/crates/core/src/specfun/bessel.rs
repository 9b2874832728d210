//! Modified Bessel function of the second kind for real order.
//!
//! Temme's method: the order is split as ν = n + μ with |μ| ≤ 1/2. K_μ and
//! K_{μ+1} come from Temme's series for x ≤ 2 or Steed's continued fraction
//! for x > 2, then forward recurrence lifts them to order ν.

use std::f64::consts::PI;

use super::gamma::ln_gamma_pos;
use crate::error::{domain, Result};

const EPS: f64 = 1e-16;
const MAX_ITER: usize = 100_000;
const SERIES_MAX_X: f64 = 2.0;
pub const MAX_ORDER: f64 = 50.0;

/// Returns (Γ₁(μ), Γ₂(μ), 1/Γ(1+μ), 1/Γ(1−μ)) for |μ| ≤ 1/2.
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    let gampl = (-ln_gamma_pos(1.0 + mu)).exp();
    let gammi = (-ln_gamma_pos(1.0 - mu)).exp();
    if mu.abs() >= 0.05 {
        return (
            (gammi - gampl) / (2.0 * mu),
            0.5 * (gammi + gampl),
            gampl,
            gammi,
        );
    }
    // Odd part of the Taylor series of 1/Γ(1+μ); the direct difference cancels.
    let m2 = mu * mu;
    let gam1 = -(0.577_215_664_901_532_9
        + m2 * (-0.042_002_635_034_095_2
            + m2 * (-0.042_197_734_555_544_3 + m2 * 0.007_218_943_246_663_0)));
    (gam1, 0.5 * (gammi + gampl), gampl, gammi)
}

/// Exponentially scaled (e^x K_μ(x), e^x K_{μ+1}(x)) for |μ| ≤ 1/2.
fn k_pair_scaled(mu: f64, x: f64) -> (f64, f64) {
    let mu2 = mu * mu;
    if x <= SERIES_MAX_X {
        let x2 = 0.5 * x;
        let pimu = PI * mu;
        let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
        let d = -x2.ln();
        let e = mu * d;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(mu);
        let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let mut sum = ff;
        let ee = e.exp();
        let mut p = 0.5 * ee / gampl;
        let mut q = 0.5 / (ee * gammi);
        let mut c = 1.0;
        let dd = x2 * x2;
        let mut sum1 = p;
        for i in 1..MAX_ITER {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - mu2);
            c *= dd / fi;
            p /= fi - mu;
            q /= fi + mu;
            let del = c * ff;
            sum += del;
            sum1 += c * (p - fi * ff);
            if del.abs() < sum.abs() * EPS {
                break;
            }
        }
        let scale = x.exp();
        (sum * scale, sum1 * (2.0 / x) * scale)
    } else {
        let mut b = 2.0 * (1.0 + x);
        let mut d = 1.0 / b;
        let mut h = d;
        let mut delh = d;
        let mut q1 = 0.0;
        let mut q2 = 1.0;
        let a1 = 0.25 - mu2;
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        for i in 2..MAX_ITER {
            let fi = i as f64;
            a -= 2.0 * (fi - 1.0);
            c = -a * c / fi;
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh = (b * d - 1.0) * delh;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < EPS {
                break;
            }
        }
        h *= a1;
        let kmu = (PI / (2.0 * x)).sqrt() / s;
        let k1 = kmu * (mu + x + 0.5 - h) / x;
        (kmu, k1)
    }
}

/// e^x K_ν(x) without domain checks.
pub(crate) fn bessel_k_scaled_unchecked(nu: f64, x: f64) -> f64 {
    let nu = nu.abs();
    let n = (nu + 0.5).floor();
    let mu = nu - n;
    let (mut kmu, mut k1) = k_pair_scaled(mu, x);
    let two_over_x = 2.0 / x;
    for i in 1..=(n as usize) {
        let next = (mu + i as f64) * two_over_x * k1 + kmu;
        kmu = k1;
        k1 = next;
    }
    kmu
}

fn check(nu: f64, x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("bessel_k", x, "finite x > 0"));
    }
    if !nu.is_finite() || nu.abs() > MAX_ORDER {
        return Err(domain("bessel_k", nu, "|nu| <= 50"));
    }
    Ok(())
}

/// Modified Bessel function of the second kind K_ν(x).
pub fn bessel_k(nu: f64, x: f64) -> Result<f64> {
    check(nu, x)?;
    Ok(bessel_k_scaled_unchecked(nu, x) * (-x).exp())
}

/// Exponentially scaled e^x K_ν(x), usable where K_ν(x) itself underflows.
pub fn bessel_k_scaled(nu: f64, x: f64) -> Result<f64> {
    check(nu, x)?;
    Ok(bessel_k_scaled_unchecked(nu, x))
}

/// ln K_ν(x).
pub(crate) fn ln_bessel_k(nu: f64, x: f64) -> f64 {
    bessel_k_scaled_unchecked(nu, x).ln() - x
}
