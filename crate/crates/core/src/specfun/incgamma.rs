use super::erf::erfc;
use super::gamma::ln_gamma_pos;

const EPS: f64 = 1e-16;
const MAX_ITER: usize = 10_000;

/// Regularized lower gamma P(p, x) by the power series, for x < p + 1.
fn lower_series(p: f64, x: f64) -> f64 {
    let mut ap = p;
    let mut del = 1.0 / p;
    let mut sum = del;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * EPS {
            break;
        }
    }
    sum * (-x + p * x.ln() - ln_gamma_pos(p)).exp()
}

/// Regularized upper gamma Q(p, x) by Lentz continued fraction, for x >= p + 1.
fn upper_cf(p: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - p;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - p);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    (-x + p * x.ln() - ln_gamma_pos(p)).exp() * h
}

/// Regularized upper incomplete gamma Γ(p, x)/Γ(p).
///
/// Returns NaN for p <= 0 or x < 0. The p = 1/2 case (the BPSK kernel)
/// goes through erfc.
pub fn gamma_upper_reg(p: f64, x: f64) -> f64 {
    if !(p > 0.0) || !(x >= 0.0) {
        return f64::NAN;
    }
    if x == 0.0 {
        return 1.0;
    }
    if x.is_infinite() {
        return 0.0;
    }
    if p == 0.5 {
        return erfc(x.sqrt());
    }
    if p == 1.0 {
        return (-x).exp();
    }
    if x < p + 1.0 {
        1.0 - lower_series(p, x)
    } else {
        upper_cf(p, x)
    }
}
