//! Closed-form and quadrature evaluation of outage probability, average BER
//! and ergodic capacity.
//!
//! The end-to-end CDF follows from conditioning on γ₂: the event SNDR < γ is
//! γ₁ < c·(κ + (E[γ₁(m)] + κ)/γ₂) with c = γ(1+ILR)/(1 − ILR·γ), and the
//! Gamma-Gamma average of exp(−s/γ₂) is a G⁵⁰₀₅ function.

use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};
use crate::fading::{prs_snr_mean, prs_snr_pdf, prs_terms};
use crate::quad::{integrate, integrate_breakpoints, integrate_to_infinity, QuadOptions};
use crate::sndr::{sndr_ceiling, sndr_ceiling_derived, LinkConfig};
use crate::specfun::{gamma_upper_reg, ln_gamma_pos, meijer_g_with, MeijerOptions, MeijerParams};
use crate::sum::sorted_sum;

#[derive(Debug, Clone, PartialEq)]
pub struct ModulationSpec {
    pub p: f64,
    pub q: f64,
    pub name: String,
}

impl ModulationSpec {
    pub fn new(p: f64, q: f64, name: impl Into<String>) -> Result<Self> {
        for (field, v) in [("p", p), ("q", q)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter {
                    field,
                    reason: format!("{v} must be finite and positive"),
                });
            }
        }
        Ok(Self { p, q, name: name.into() })
    }

    /// Conditional BER Γ(p, qγ)/(2Γ(p)) with (p, q) = (1/2, 1).
    pub fn bpsk() -> Self {
        Self {
            p: 0.5,
            q: 1.0,
            name: "bpsk".into(),
        }
    }

    /// Error probability conditioned on SNR γ.
    pub fn conditional_ber(&self, gamma: f64) -> f64 {
        0.5 * gamma_upper_reg(self.p, self.q * gamma)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ClosedForm,
    Quadrature,
    Series,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricResult {
    pub value: f64,
    pub method: Method,
    pub est_abs_error: f64,
    /// The raw value fell outside the valid range and was clamped.
    pub clamped: bool,
}

/// Everything in the outage expression that does not depend on γ.
struct OutageKernel {
    /// (weight·P, rate) per order-statistic term.
    terms: Vec<(f64, f64)>,
    b: Vec<f64>,
    ilr: f64,
    kappa: f64,
    mean_snr_1: f64,
    /// (αβ)²(E[γ₁(m)] + κ)/(16 γ̄₁ μ₂)
    z_scale: f64,
    opts: MeijerOptions,
}

impl OutageKernel {
    fn new(cfg: &LinkConfig) -> Self {
        let (a, b) = (cfg.optical().alpha(), cfg.optical().beta());
        let ln_p = (a + b - 2.0) * LN_2 - PI.ln() - ln_gamma_pos(a) - ln_gamma_pos(b);
        let pref = ln_p.exp();
        let ab = a * b;
        let g1 = cfg.rf().mean_snr();
        Self {
            terms: prs_terms(cfg.rf()).iter().map(|t| (t.weight * pref, t.rate)).collect(),
            b: vec![0.5 * a, 0.5 * (a + 1.0), 0.5 * b, 0.5 * (b + 1.0), 0.0],
            ilr: cfg.ilr(),
            kappa: cfg.kappa(),
            mean_snr_1: g1,
            z_scale: ab * ab * (cfg.mean_selected_snr() + cfg.kappa()) / (16.0 * g1 * cfg.optical().mean_electrical_snr()),
            opts: MeijerOptions::default(),
        }
    }

    /// Returns (1 − F(γ), absolute error estimate).
    fn survival(&self, gamma: f64) -> Result<(f64, f64)> {
        if gamma <= 0.0 {
            return Ok((1.0, 0.0));
        }
        let denom = 1.0 - self.ilr * gamma;
        if denom <= 0.0 {
            return Ok((0.0, 0.0));
        }
        let c = gamma * (1.0 + self.ilr) / denom;
        if !c.is_finite() {
            return Ok((0.0, 0.0));
        }
        let mut parts = Vec::with_capacity(self.terms.len());
        let mut err = 0.0;
        for (n, &(w, rate)) in self.terms.iter().enumerate() {
            let damp = (-rate * c * self.kappa / self.mean_snr_1).exp();
            if damp == 0.0 {
                parts.push(0.0);
                continue;
            }
            let z = self.z_scale * rate * c;
            let params = MeijerParams::new(5, 0, vec![], self.b.clone(), z)?;
            let g = meijer_g_with(&params, &self.opts)
                .map_err(|e| e.context(format!("outage term n = {n}, Meijer argument z = {z:e}")))?;
            let term = w * damp * g.value;
            err += term.abs() * g.rel_error;
            parts.push(term);
        }
        let s = sorted_sum(parts);
        Ok((s, err + 4.0 * f64::EPSILON * self.terms.iter().map(|t| t.0.abs()).sum::<f64>()))
    }
}

/// Pr[SNDR < γ_th].
pub fn outage_probability(gamma_th: f64, cfg: &LinkConfig) -> Result<MetricResult> {
    if !(gamma_th > 0.0) || gamma_th.is_nan() {
        return Err(Error::InvalidParameter {
            field: "gamma_th",
            reason: format!("{gamma_th} must be positive"),
        });
    }
    let ilr = cfg.ilr();
    if ilr > 0.0 && gamma_th >= 1.0 / ilr {
        return Ok(MetricResult {
            value: 1.0,
            method: Method::ClosedForm,
            est_abs_error: 0.0,
            clamped: false,
        });
    }
    let (s, err) = OutageKernel::new(cfg).survival(gamma_th)?;
    Ok(probability(1.0 - s, err, Method::ClosedForm))
}

fn probability(raw: f64, err: f64, method: Method) -> MetricResult {
    let value = raw.clamp(0.0, 1.0);
    MetricResult {
        value,
        method,
        est_abs_error: err + (raw - value).abs(),
        clamped: value != raw,
    }
}

/// High-SNR outage slope for ideal hardware: min(1, α/2, β/2).
pub fn diversity_gain(alpha: f64, beta: f64) -> f64 {
    1f64.min(0.5 * alpha).min(0.5 * beta)
}

/// Average BER (q^p/2Γ(p))·∫ γ^{p−1} e^{−qγ} F(γ) dγ.
///
/// Above γ = 1/ILR the CDF is 1 and the tail is Γ(p, q/ILR)/(2Γ(p)). The head
/// is integrated in t = γ^p, which removes the γ^{p−1} endpoint singularity.
pub fn avg_ber(modulation: &ModulationSpec, cfg: &LinkConfig) -> Result<MetricResult> {
    let (p, q) = (modulation.p, modulation.q);
    // Beyond q·γ = 40 the kernel is below 1e-18.
    let cut = 40.0 / q;
    let ilr = cfg.ilr();
    let (upper, tail, tail_err) = if ilr > 0.0 && 1.0 / ilr < cut {
        (1.0 / ilr, 0.5 * gamma_upper_reg(p, q / ilr), 0.0)
    } else {
        (cut, 0.0, 0.5 * gamma_upper_reg(p, q * cut))
    };
    let kernel = OutageKernel::new(cfg);
    let lead = (p * q.ln() - ln_gamma_pos(p)).exp() / (2.0 * p);
    let inv_p = 1.0 / p;
    let mut failure = None;
    let f = |t: f64| {
        let g = t.powf(inv_p);
        match kernel.survival(g) {
            Ok((s, _)) => lead * (-q * g).exp() * (1.0 - s).clamp(0.0, 1.0),
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        }
    };
    let r = integrate(f, 0.0, upper.powf(p), QuadOptions::new(1e-10, 1e-8));
    if let Some(e) = failure {
        return Err(e.context("BER integrand"));
    }
    let r = r.map_err(|e| e.context("BER quadrature"))?;
    let raw = r.value + tail;
    let value = raw.clamp(0.0, 0.5);
    Ok(MetricResult {
        value,
        method: Method::Quadrature,
        est_abs_error: r.error_estimate + tail_err + (raw - value).abs(),
        clamped: value != raw,
    })
}

/// Ergodic capacity ½·E[log₂(1 + SNDR)] = (1/(2 ln 2))·∫ (1 − F(γ))/(1 + γ) dγ.
pub fn ergodic_capacity(cfg: &LinkConfig) -> Result<MetricResult> {
    let kernel = OutageKernel::new(cfg);
    let scale = 0.5 / LN_2;
    let mut failure = None;
    let f = |g: f64| match kernel.survival(g) {
        Ok((s, _)) => s.clamp(0.0, 1.0) / (1.0 + g),
        Err(e) => {
            failure.get_or_insert(e);
            f64::NAN
        }
    };
    let opts = QuadOptions {
        abs_tol: 1e-8 / scale,
        rel_tol: 1e-10,
        max_intervals: 4000,
    };
    let ilr = cfg.ilr();
    let r = if ilr > 0.0 {
        let top = 1.0 / ilr;
        let pts: Vec<f64> = [0.0, 1e-4, 1e-3, 1e-2, 0.1, 0.5, 0.9, 0.99, 1.0].iter().map(|x| x * top).collect();
        integrate_breakpoints(f, &pts, opts)
    } else {
        let typical = approx_sndr_ratio(cfg).max(1.0);
        integrate_to_infinity(f, 0.0, typical, opts)
    };
    if let Some(e) = failure {
        return Err(e.context("capacity integrand"));
    }
    let r = r.map_err(|e| e.context("capacity quadrature"))?;
    Ok(MetricResult {
        value: scale * r.value,
        method: Method::Quadrature,
        est_abs_error: scale * r.error_estimate,
        clamped: false,
    })
}

/// ½·log₂(1 + γ*) with γ* = 1/((1+ILR)ξ/δ − 1).
pub fn capacity_ceiling(cfg: &LinkConfig) -> Result<f64> {
    Ok(0.5 * (1.0 + sndr_ceiling(cfg)?).log2())
}

/// ½·log₂(1 + γ*) with γ* = 1/((1+ILR)ξ/δ² − 1).
pub fn capacity_ceiling_derived(cfg: &LinkConfig) -> Result<f64> {
    Ok(0.5 * (1.0 + sndr_ceiling_derived(cfg)?).log2())
}

/// Exact γ̄₁ = γ̄₂ → ∞ limit of the ergodic capacity.
///
/// The SNDR tends to 1/(ILR + (1+ILR)K/u) with K = (σ_d²/σ²)/δ² and u the
/// unit-mean selected-relay gain, so the limit keeps the RF-hop randomness.
pub fn capacity_limit(cfg: &LinkConfig) -> Result<f64> {
    let b = cfg.bussgang();
    let k = b.dist_var_ratio / (b.delta * b.delta);
    let ilr = cfg.ilr();
    if k == 0.0 {
        return if ilr > 0.0 {
            Ok(0.5 * (1.0 + 1.0 / ilr).log2())
        } else {
            Err(Error::NoFiniteCeiling { denominator: 0.0 })
        };
    }
    let unit = cfg.rf().with_mean_snr(1.0)?;
    let f = |u: f64| {
        let s = u / (ilr * u + (1.0 + ilr) * k);
        s.ln_1p() * prs_snr_pdf(u, &unit)
    };
    let opts = QuadOptions {
        max_intervals: 4000,
        ..QuadOptions::new(1e-13, 1e-11)
    };
    let r = integrate_to_infinity(f, 0.0, prs_snr_mean(&unit), opts).map_err(|e| e.context("capacity limit"))?;
    Ok(0.5 / LN_2 * r.value)
}

/// J = E[γ₁γ₂/τ] with τ = (1+ILR)(κγ₂ + E[γ₁(m)] + κ).
///
/// With the hops independent, J = E[γ₁(m)]/((1+ILR)κ)·E[γ₂/(γ₂ + D)],
/// D = (E[γ₁(m)] + κ)/κ, and the Gamma-Gamma average is a G⁵¹₁₅ function.
pub fn capacity_j(cfg: &LinkConfig) -> Result<f64> {
    let (a, b) = (cfg.optical().alpha(), cfg.optical().beta());
    let mu = cfg.optical().mean_electrical_snr();
    let kappa = cfg.kappa();
    let e1 = cfg.mean_selected_snr();
    let d = (e1 + kappa) / kappa;
    let s = 0.25 * (a + b);
    let ab = a * b;
    let ln_pf = 2.0 * s * ab.ln() + s * (d / mu).ln() - (4.0 * PI).ln() - ln_gamma_pos(a) - ln_gamma_pos(b);
    let z = ab * ab * d / (16.0 * mu);
    let k0 = -s;
    let k1 = vec![
        0.25 * (a - b),
        0.25 * (a - b + 2.0),
        0.25 * (b - a),
        0.25 * (b - a + 2.0),
        -s,
    ];
    let params = MeijerParams::new(5, 1, vec![k0], k1, z)?;
    let g = meijer_g_with(&params, &MeijerOptions::default())
        .map_err(|e| e.context(format!("capacity bound, Meijer argument z = {z:e}")))?;
    let ratio = ln_pf.exp() * g.value;
    let j = e1 / ((1.0 + cfg.ilr()) * kappa) * ratio;
    if !(j >= 0.0) {
        return Err(Error::Consistency(format!("negative J = {j:e}")));
    }
    Ok(j)
}

/// ½·log₂(1 + J/(ILR·J + 1)), an upper bound on the ergodic capacity.
pub fn capacity_upper_bound(cfg: &LinkConfig) -> Result<f64> {
    let j = capacity_j(cfg)?;
    Ok(0.5 * (1.0 + j / (cfg.ilr() * j + 1.0)).log2())
}

/// E[ψ]/E[φ] for ψ = γ₁γ₂ and φ the SNDR denominator.
fn approx_sndr_ratio(cfg: &LinkConfig) -> f64 {
    let e1 = cfg.mean_selected_snr();
    let g2 = cfg.optical().mean_snr();
    let ilr = cfg.ilr();
    let k = cfg.kappa();
    let e_psi = e1 * g2;
    let e_phi = ilr * e_psi + (1.0 + ilr) * k * g2 + (1.0 + ilr) * (e1 + k);
    e_psi / e_phi
}

/// ½·log₂(1 + E[ψ]/E[φ]).
pub fn capacity_approx(cfg: &LinkConfig) -> f64 {
    0.5 * (1.0 + approx_sndr_ratio(cfg)).log2()
}
