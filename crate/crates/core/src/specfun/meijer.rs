//! Meijer G-function for the shapes G^{q,0}_{0,q} and G^{q,1}_{1,q}.
//!
//! Only the case m = q is handled, so all poles of the b-gammas lie to the
//! right of the contour and the function equals the sum of their residues:
//!
//! ```text
//! G = Σ_h Σ_k (-1)^k / k! · Π_{j≠h} Γ(b_j - b_h - k) · Π_{j<n} Γ(1 - a_j + b_h + k) · z^{b_h + k}
//! ```
//!
//! Each inner sum is a generalized hypergeometric series evaluated term by
//! term. When two b-parameters differ by an integer the poles coincide; the
//! tied parameters are shifted by ±ε and the two evaluations averaged.
//!
//! For large z the series terms grow like exp(c·z^{1/(q-n)}) while G itself is
//! small, so the sum cancels catastrophically. There the Mellin–Barnes
//! integral is evaluated directly along the vertical line through the real
//! saddle point of the integrand.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::gamma::{ln_gamma_pos, ln_gamma_signed};
use crate::error::{domain, Error, Result};
use crate::quad::{self, QuadOptions};

/// Parameter tuple of a Meijer G-function G^{m,n}_{p,q}(z | a; b).
#[derive(Debug, Clone, PartialEq)]
pub struct MeijerParams {
    m: usize,
    n: usize,
    a: Vec<f64>,
    b: Vec<f64>,
    z: f64,
}

impl MeijerParams {
    /// Validates the shape. Accepted: G^{5,0}_{0,5}, G^{5,1}_{1,5}, and the
    /// reduced G^{2,0}_{0,2} (whose Bessel identity serves as a test hook).
    pub fn new(m: usize, n: usize, a: Vec<f64>, b: Vec<f64>, z: f64) -> Result<Self> {
        let p = a.len();
        let q = b.len();
        let shape_ok = matches!((m, n, p, q), (5, 0, 0, 5) | (5, 1, 1, 5) | (2, 0, 0, 2));
        if !shape_ok {
            return Err(Error::InvalidParameter {
                field: "meijer shape",
                reason: format!("G^{{{m},{n}}}_{{{p},{q}}} is not supported"),
            });
        }
        if !(z > 0.0) || !z.is_finite() {
            return Err(domain("meijer_g", z, "finite z > 0"));
        }
        if a.iter().chain(&b).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                field: "meijer parameters",
                reason: "non-finite parameter".into(),
            });
        }
        for &aj in &a[..n] {
            for &bh in &b {
                let d = aj - bh;
                if d >= 1.0 && d == d.round() {
                    return Err(Error::InvalidParameter {
                        field: "meijer parameters",
                        reason: format!("a - b = {d} is a positive integer; G is undefined"),
                    });
                }
            }
        }
        Ok(Self { m, n, a, b, z })
    }

    pub fn m(&self) -> usize {
        self.m
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn a(&self) -> &[f64] {
        &self.a
    }
    pub fn b(&self) -> &[f64] {
        &self.b
    }
    pub fn z(&self) -> f64 {
        self.z
    }

    fn with_b(&self, b: Vec<f64>) -> Self {
        Self { b, ..self.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeijerStrategy {
    /// Residue series, contour integral when the series would lose accuracy.
    Auto,
    /// Residue series only.
    Series,
    /// Mellin–Barnes contour integral only.
    Contour,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeijerOptions {
    pub max_terms: usize,
    pub tail_tol: f64,
    pub perturbation: f64,
    pub strategy: MeijerStrategy,
}

impl Default for MeijerOptions {
    fn default() -> Self {
        Self {
            max_terms: 500,
            tail_tol: 1e-12,
            perturbation: 1e-6,
            strategy: MeijerStrategy::Auto,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeijerMethod {
    Series,
    PerturbedSeries,
    Contour,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeijerValue {
    pub value: f64,
    pub method: MeijerMethod,
    /// Estimated relative error (rounding amplification plus truncation).
    pub rel_error: f64,
}

/// Relative error the Auto strategy accepts from the plain series.
const SERIES_ACCEPT: f64 = 1e-10;
/// Relative error the Auto strategy accepts from the perturbed series.
const PERTURBED_ACCEPT: f64 = 1e-9;
/// Terms above this size mean the series is hopeless in double precision.
const TERM_BLOWUP: f64 = 1e13;
/// Differences closer than this to an integer count as coincident poles.
const TIE_TOL: f64 = 1e-7;

/// Evaluates the Meijer G-function with default options.
pub fn meijer_g(params: &MeijerParams) -> Result<f64> {
    meijer_g_with(params, &MeijerOptions::default()).map(|v| v.value)
}

/// Evaluates the Meijer G-function with explicit options.
pub fn meijer_g_with(params: &MeijerParams, opts: &MeijerOptions) -> Result<MeijerValue> {
    match opts.strategy {
        MeijerStrategy::Contour => contour(params),
        MeijerStrategy::Series => series_dispatch(params, opts, false),
        MeijerStrategy::Auto => match series_dispatch(params, opts, true) {
            Ok(v) => {
                let accept = match v.method {
                    MeijerMethod::PerturbedSeries => PERTURBED_ACCEPT,
                    _ => SERIES_ACCEPT,
                };
                if v.rel_error <= accept && v.value.is_finite() {
                    Ok(v)
                } else {
                    contour(params)
                }
            }
            Err(Error::SeriesConvergence { .. }) => contour(params),
            Err(e) => Err(e),
        },
    }
}

/// Perturbation direction breaking every integer tie among the b's, with the
/// size of the largest tied class.
fn tie_breaking_offsets(b: &[f64]) -> Option<(Vec<f64>, usize)> {
    let q = b.len();
    let mut class = vec![usize::MAX; q];
    let mut next_class = 0;
    for i in 0..q {
        if class[i] != usize::MAX {
            continue;
        }
        class[i] = next_class;
        for j in i + 1..q {
            let d = b[j] - b[i];
            if (d - d.round()).abs() < TIE_TOL {
                class[j] = next_class;
            }
        }
        next_class += 1;
    }
    let mut offsets = vec![0.0; q];
    let mut largest = 1;
    for c in 0..next_class {
        let mut rank = 0;
        for i in 0..q {
            if class[i] == c {
                offsets[i] = rank as f64;
                rank += 1;
            }
        }
        largest = largest.max(rank);
    }
    (largest > 1).then_some((offsets, largest))
}

fn series_dispatch(params: &MeijerParams, opts: &MeijerOptions, abort_on_blowup: bool) -> Result<MeijerValue> {
    match tie_breaking_offsets(&params.b) {
        None => {
            let (value, rel_error) = residue_series(params, opts, abort_on_blowup)?;
            Ok(MeijerValue {
                value,
                method: MeijerMethod::Series,
                rel_error,
            })
        }
        Some((offsets, order)) => {
            // A k-fold tie leaves residues of size ε^{1-k} that cancel, so the
            // step grows with k to keep rounding in check.
            let eps = opts.perturbation.powf(2.0 / order as f64);
            let shifted = |sign: f64| {
                let b: Vec<f64> = params
                    .b
                    .iter()
                    .zip(&offsets)
                    .map(|(bj, o)| bj + sign * eps * o)
                    .collect();
                params.with_b(b)
            };
            let (plus, e_plus) = residue_series(&shifted(1.0), opts, abort_on_blowup)?;
            let (minus, e_minus) = residue_series(&shifted(-1.0), opts, abort_on_blowup)?;
            let value = 0.5 * (plus + minus);
            // Rounding from both halves plus the O(ε²) averaging bias, gauged
            // by the first-order spread between the two evaluations.
            let spread = ((plus - minus) / value).abs();
            let rel_error = e_plus.max(e_minus) + spread * eps + eps * eps;
            Ok(MeijerValue {
                value,
                method: MeijerMethod::PerturbedSeries,
                rel_error,
            })
        }
    }
}

/// Sum of residues. Returns (value, estimated relative error).
fn residue_series(params: &MeijerParams, opts: &MeijerOptions, abort_on_blowup: bool) -> Result<(f64, f64)> {
    let b = &params.b;
    let a_num = &params.a[..params.n];
    let z = params.z;
    let ln_z = z.ln();

    let mut total = 0.0;
    let mut total_err = 0.0;
    let mut total_comp = 0.0;
    for (h, &bh) in b.iter().enumerate() {
        // Prefactor Π_{j≠h} Γ(b_j - b_h) Π_{j<n} Γ(1 - a_j + b_h) z^{b_h}, in log form.
        let mut ln_pref = bh * ln_z;
        // Rounding in ln_pref is absolute, so it scales with these magnitudes.
        let mut ln_mag = ln_pref.abs();
        let mut sign = 1.0;
        for (j, &bj) in b.iter().enumerate() {
            if j == h {
                continue;
            }
            match ln_gamma_signed(bj - bh) {
                Some((l, s)) => {
                    ln_pref += l;
                    ln_mag += l.abs();
                    sign *= s;
                }
                None => {
                    return Err(Error::Consistency(format!(
                        "coincident poles b[{j}] - b[{h}] = {} reached the residue series",
                        bj - bh
                    )))
                }
            }
        }
        for &aj in a_num {
            match ln_gamma_signed(1.0 - aj + bh) {
                Some((l, s)) => {
                    ln_pref += l;
                    ln_mag += l.abs();
                    sign *= s;
                }
                None => return Err(domain("meijer_g", aj - bh, "a - b not a positive integer")),
            }
        }

        let mut term: f64 = 1.0;
        let mut sum = 1.0;
        let mut comp = 0.0;
        let mut abs_sum = 1.0;
        let mut max_term: f64 = 1.0;
        let mut converged = false;
        let mut k = 0usize;
        while k < opts.max_terms {
            let kf = k as f64;
            let mut ratio = -z / (kf + 1.0);
            for (j, &bj) in b.iter().enumerate() {
                if j != h {
                    ratio /= bj - bh - kf - 1.0;
                }
            }
            for &aj in a_num {
                ratio *= 1.0 - aj + bh + kf;
            }
            term *= ratio;
            k += 1;
            let t = sum + term;
            if sum.abs() >= term.abs() {
                comp += (sum - t) + term;
            } else {
                comp += (term - t) + sum;
            }
            sum = t;
            abs_sum += term.abs();
            max_term = max_term.max(term.abs());
            if abort_on_blowup && max_term > TERM_BLOWUP {
                return Ok((f64::NAN, f64::INFINITY));
            }
            // Past the peak (ratio < 1/2) the remaining tail is bounded by the last term.
            if ratio.abs() < 0.5 && term.abs() <= opts.tail_tol * (sum + comp).abs() {
                converged = true;
                break;
            }
            if term == 0.0 {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::SeriesConvergence {
                terms: k,
                partial_sum: sum + comp,
                last_term: term.abs(),
            });
        }
        let pref = sign * ln_pref.exp();
        let contribution = pref * (sum + comp);
        let t = total + contribution;
        if total.abs() >= contribution.abs() {
            total_comp += (total - t) + contribution;
        } else {
            total_comp += (contribution - t) + total;
        }
        total = t;
        total_err += pref.abs() * abs_sum * f64::EPSILON * (8.0 + 4.0 * ln_mag);
    }
    let value = total + total_comp;
    let rel_error = if value != 0.0 {
        total_err / value.abs() + opts.tail_tol
    } else {
        f64::INFINITY
    };
    Ok((value, rel_error))
}

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// ln Γ(w) for complex w with Re w > 0 (any branch; only exp() of it is used).
fn ln_gamma_complex(mut w: Complex64) -> Complex64 {
    debug_assert!(w.re > 0.0);
    let mut shift = Complex64::new(0.0, 0.0);
    while w.norm() < 12.0 {
        shift += w.ln();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    const C: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
        1.0 / 156.0,
        -3617.0 / 122_400.0,
    ];
    let mut corr = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for c in C {
        corr += pow * c;
        pow *= inv2;
    }
    (w - 0.5) * w.ln() - w + HALF_LN_2PI + corr - shift
}

/// Direct Mellin–Barnes integral along Re s = c through the real saddle.
fn contour(params: &MeijerParams) -> Result<MeijerValue> {
    let b = &params.b;
    let a_num = &params.a[..params.n];
    let ln_z = params.z.ln();
    let q = b.len() as f64;
    let b_min = b.iter().cloned().fold(f64::INFINITY, f64::min);
    let a_lo = a_num.iter().map(|a| a - 1.0).fold(f64::NEG_INFINITY, f64::max);

    // Real-axis log-magnitude of the integrand, convex in c.
    let phi = |c: f64| {
        let mut v = c * ln_z;
        for &bj in b {
            v += ln_gamma_pos(bj - c);
        }
        for &aj in a_num {
            v += ln_gamma_pos(1.0 - aj + c);
        }
        v
    };
    let (mut lo, mut hi) = if a_lo.is_finite() {
        let width = b_min - a_lo;
        if width <= 0.0 {
            return Err(Error::InvalidParameter {
                field: "meijer parameters",
                reason: "no contour separates the a- and b-poles".into(),
            });
        }
        (a_lo + 0.1 * width, b_min - 0.1 * width)
    } else {
        let reach = 20.0 + 4.0 * params.z.powf(1.0 / q);
        (b_min - reach, b_min - 0.25)
    };
    // Golden-section search for the saddle abscissa.
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = phi(x1);
    let mut f2 = phi(x2);
    for _ in 0..80 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = phi(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = phi(x2);
        }
        if (hi - lo).abs() < 1e-6 {
            break;
        }
    }
    let c = 0.5 * (lo + hi);
    let phi_c = phi(c);

    let log_integrand = |t: f64| {
        let s = Complex64::new(c, t);
        let mut v = s * ln_z;
        for &bj in b {
            v += ln_gamma_complex(bj - s);
        }
        for &aj in a_num {
            v += ln_gamma_complex(1.0 - aj + s);
        }
        v - phi_c
    };
    // The modulus decreases monotonically in |t|; find where it is negligible.
    let mut t_max = 1.0;
    while log_integrand(t_max).re > -45.0 {
        t_max *= 1.5;
        if t_max > 1e6 {
            return Err(Error::Consistency("Mellin-Barnes integrand does not decay".into()));
        }
    }
    let integrand = |t: f64| log_integrand(t).exp().re;
    let opts = QuadOptions {
        abs_tol: 1e-15,
        rel_tol: 1e-12,
        max_intervals: 4000,
    };
    let r = quad::integrate_breakpoints(
        integrand,
        &[0.0, 0.125 * t_max, 0.25 * t_max, 0.5 * t_max, t_max],
        opts,
    )?;
    let scale = phi_c.exp() / PI;
    let value = r.value * scale;
    let rel_error = if r.value != 0.0 {
        (r.error_estimate / r.value.abs()).max(1e-13)
    } else {
        f64::INFINITY
    };
    Ok(MeijerValue {
        value,
        method: MeijerMethod::Contour,
        rel_error,
    })
}
