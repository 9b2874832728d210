use crate::error::{domain, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// e^x · E₁(x) for x > 0.
pub(crate) fn exp_e1(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x <= 1.0 {
        // E₁(x) = -γ - ln x - Σ_{k≥1} (-x)^k / (k · k!)
        let mut sum = 0.0;
        let mut fact_term = 1.0;
        for k in 1..60 {
            let kf = k as f64;
            fact_term *= -x / kf;
            let term = fact_term / kf;
            sum += term;
            if term.abs() < 1e-18 {
                break;
            }
        }
        let e1 = -EULER_GAMMA - x.ln() - sum;
        return x.exp() * e1;
    }
    // Even continued fraction e^x E₁(x) = 1/(x+1- 1/(x+3- 4/(x+5- ...))), modified Lentz.
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..1000 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

/// The product e^{x}·Ei(−x) for x > 0, without overflow.
///
/// Equal to −e^{x}E₁(x); always lies in (−1/x, −1/(x+1)).
pub fn exp_ei_neg(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("exp_ei_neg", x, "finite x > 0"));
    }
    Ok(-exp_e1(x))
}
