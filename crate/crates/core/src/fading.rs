//! Fading models for both hops.
//!
//! RF hop: SNR of the relay of rank `m` (ascending) among `N` correlated
//! Rayleigh links, selected on outdated CSI with time correlation ρ.
//! Optical hop: Gamma-Gamma irradiance with unit mean, SNR = μ₂·I².

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{domain, Error, Result};
use crate::quad::{integrate, QuadOptions};
use crate::specfun::{ln_bessel_k, ln_binomial, ln_gamma_pos, BESSEL_MAX_ORDER};
use crate::sum::sorted_sum;

/// Largest supported relay count.
pub const MAX_RELAYS: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrsConfig {
    n_relays: u32,
    rank: u32,
    rho: f64,
    mean_snr: f64,
}

impl PrsConfig {
    pub fn new(n_relays: u32, rank: u32, rho: f64, mean_snr: f64) -> Result<Self> {
        if n_relays == 0 || n_relays > MAX_RELAYS {
            return Err(invalid("n_relays", format!("{n_relays} is outside 1..={MAX_RELAYS}")));
        }
        if rank == 0 || rank > n_relays {
            return Err(invalid("rank", format!("{rank} is outside 1..={n_relays}")));
        }
        if !(0.0..=1.0).contains(&rho) {
            return Err(invalid("rho", format!("{rho} is outside [0, 1]")));
        }
        check_positive("mean_snr", mean_snr)?;
        Ok(Self {
            n_relays,
            rank,
            rho,
            mean_snr,
        })
    }

    pub fn n_relays(&self) -> u32 {
        self.n_relays
    }
    pub fn rank(&self) -> u32 {
        self.rank
    }
    pub fn rho(&self) -> f64 {
        self.rho
    }
    pub fn mean_snr(&self) -> f64 {
        self.mean_snr
    }

    pub fn with_mean_snr(&self, mean_snr: f64) -> Result<Self> {
        Self::new(self.n_relays, self.rank, self.rho, mean_snr)
    }
}

/// One exponential of the order-statistic law: the CDF is
/// `1 − Σ weight·exp(−rate·x/γ̄₁)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct PrsTerm {
    pub weight: f64,
    pub rate: f64,
    /// (N−m+n)(1−ρ)+1
    pub spread: f64,
}

pub(crate) fn prs_terms(cfg: &PrsConfig) -> Vec<PrsTerm> {
    let (n_rel, m) = (cfg.n_relays, cfg.rank);
    let ln_lead = f64::from(m).ln() + ln_binomial(n_rel, m);
    (0..m)
        .map(|n| {
            let k = f64::from(n_rel - m + n);
            let spread = k * (1.0 - cfg.rho) + 1.0;
            let magnitude = (ln_lead + ln_binomial(m - 1, n) - (k + 1.0).ln()).exp();
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            PrsTerm {
                weight: sign * magnitude,
                rate: (k + 1.0) / spread,
                spread,
            }
        })
        .collect()
}

/// Density of the selected relay's SNR.
pub fn prs_snr_pdf(x: f64, cfg: &PrsConfig) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    let g = cfg.mean_snr;
    let terms = prs_terms(cfg)
        .iter()
        .map(|t| t.weight * t.rate / g * (-t.rate * x / g).exp())
        .collect();
    sorted_sum(terms).max(0.0)
}

/// CDF of the selected relay's SNR.
pub fn prs_snr_cdf(x: f64, cfg: &PrsConfig) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let g = cfg.mean_snr;
    let mut terms: Vec<f64> = prs_terms(cfg)
        .iter()
        .map(|t| -t.weight * (-t.rate * x / g).exp())
        .collect();
    terms.push(1.0);
    sorted_sum(terms).clamp(0.0, 1.0)
}

/// Mean SNR of the selected relay, E[γ₁(m)].
pub fn prs_snr_mean(cfg: &PrsConfig) -> f64 {
    let g = cfg.mean_snr;
    sorted_sum(prs_terms(cfg).iter().map(|t| t.weight * g / t.rate).collect())
}

/// Draws the transmission-time |h|² of the selected relay with unit-mean links.
#[derive(Debug, Clone, Copy)]
pub struct PrsSampler {
    n_relays: usize,
    rank: usize,
    sqrt_rho: f64,
    sqrt_one_minus_rho: f64,
    mean_snr: f64,
}

impl PrsSampler {
    pub fn new(cfg: &PrsConfig) -> Self {
        Self {
            n_relays: cfg.n_relays as usize,
            rank: cfg.rank as usize,
            sqrt_rho: cfg.rho.sqrt(),
            sqrt_one_minus_rho: (1.0 - cfg.rho).sqrt(),
            mean_snr: cfg.mean_snr,
        }
    }

    /// Unit-mean channel power of the selected relay at transmission time.
    pub fn sample_unit<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut powers = [0.0f64; MAX_RELAYS as usize];
        let mut amps = [Complex64::new(0.0, 0.0); MAX_RELAYS as usize];
        for (p, a) in powers.iter_mut().zip(amps.iter_mut()).take(self.n_relays) {
            *a = complex_normal(rng);
            *p = a.norm_sqr();
        }
        // Rank m ascending = index m − 1 after sorting by selection-time power.
        let mut idx = [0usize; MAX_RELAYS as usize];
        for (i, v) in idx.iter_mut().enumerate().take(self.n_relays) {
            *v = i;
        }
        let idx = &mut idx[..self.n_relays];
        idx.select_nth_unstable_by(self.rank - 1, |&a, &b| powers[a].total_cmp(&powers[b]));
        let selected = amps[idx[self.rank - 1]];
        let h = selected * self.sqrt_rho + complex_normal(rng) * self.sqrt_one_minus_rho;
        h.norm_sqr()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.mean_snr * self.sample_unit(rng)
    }
}

/// Zero-mean circular complex Gaussian with unit variance.
fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// One draw of the selected relay's SNR.
pub fn sample_prs_snr<R: Rng + ?Sized>(cfg: &PrsConfig, rng: &mut R) -> f64 {
    PrsSampler::new(cfg).sample(rng)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalConfig {
    alpha: f64,
    beta: f64,
    mean_electrical_snr: f64,
}

impl OpticalConfig {
    /// From the average electrical SNR μ₂.
    pub fn new(alpha: f64, beta: f64, mean_electrical_snr: f64) -> Result<Self> {
        check_positive("alpha", alpha)?;
        check_positive("beta", beta)?;
        check_positive("mean_electrical_snr", mean_electrical_snr)?;
        Ok(Self {
            alpha,
            beta,
            mean_electrical_snr,
        })
    }

    /// From the average SNR γ̄₂ = μ₂·(σ²_si + 1).
    pub fn from_mean_snr(alpha: f64, beta: f64, mean_snr: f64) -> Result<Self> {
        check_positive("alpha", alpha)?;
        check_positive("beta", beta)?;
        check_positive("mean_snr", mean_snr)?;
        let si = scintillation_index(alpha, beta);
        Self::new(alpha, beta, mean_snr / (si + 1.0))
    }

    /// From the Rytov variance and the average SNR γ̄₂.
    pub fn from_rytov(sigma_r2: f64, mean_snr: f64) -> Result<Self> {
        let (alpha, beta) = rytov_to_alphabeta(sigma_r2)?;
        Self::from_mean_snr(alpha, beta, mean_snr)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    /// μ₂
    pub fn mean_electrical_snr(&self) -> f64 {
        self.mean_electrical_snr
    }
    /// γ̄₂ = E[γ₂]
    pub fn mean_snr(&self) -> f64 {
        self.mean_electrical_snr * (self.scintillation_index() + 1.0)
    }
    pub fn scintillation_index(&self) -> f64 {
        scintillation_index(self.alpha, self.beta)
    }

    pub fn with_mean_snr(&self, mean_snr: f64) -> Result<Self> {
        Self::from_mean_snr(self.alpha, self.beta, mean_snr)
    }
}

/// 1/α + 1/β + 1/(αβ)
pub fn scintillation_index(alpha: f64, beta: f64) -> f64 {
    1.0 / alpha + 1.0 / beta + 1.0 / (alpha * beta)
}

/// Gamma-Gamma parameters (α, β) for a plane wave with Rytov variance σ_R².
pub fn rytov_to_alphabeta(sigma_r2: f64) -> Result<(f64, f64)> {
    if !(sigma_r2 > 0.0) || !sigma_r2.is_finite() {
        return Err(domain("rytov_to_alphabeta", sigma_r2, "finite sigma_r2 > 0"));
    }
    let s125 = sigma_r2.powf(1.2);
    let alpha = 1.0 / (0.49 * sigma_r2 / (1.0 + 1.11 * s125).powf(7.0 / 6.0)).exp_m1();
    let beta = 1.0 / (0.51 * sigma_r2 / (1.0 + 0.69 * s125).powf(5.0 / 6.0)).exp_m1();
    Ok((alpha, beta))
}

/// Density of γ₂ = μ₂·I². Requires |α − β| within the Bessel order range;
/// returns NaN otherwise.
pub fn gg_snr_pdf(x: f64, cfg: &OpticalConfig) -> f64 {
    if !(x > 0.0) {
        return 0.0;
    }
    let (a, b, mu) = (cfg.alpha, cfg.beta, cfg.mean_electrical_snr);
    if (a - b).abs() > BESSEL_MAX_ORDER {
        return f64::NAN;
    }
    if x.is_infinite() {
        return 0.0;
    }
    let ab = a * b;
    let s = 0.25 * (a + b);
    let arg = 2.0 * (ab * (x / mu).sqrt()).sqrt();
    let ln_pdf = 2.0 * s * ab.ln() + (s - 1.0) * x.ln() - ln_gamma_pos(a) - ln_gamma_pos(b) - s * mu.ln()
        + ln_bessel_k(a - b, arg);
    ln_pdf.exp()
}

/// CDF of γ₂ by quadrature of [`gg_snr_pdf`].
///
/// Integrates in t = x^s with s = min(α, β)/2, which removes the x^{s−1}
/// behaviour of the density at the origin.
pub fn gg_snr_cdf(x: f64, cfg: &OpticalConfig) -> Result<f64> {
    if !(x > 0.0) {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    let s = 0.5 * cfg.alpha.min(cfg.beta);
    let inv_s = 1.0 / s;
    let f = |t: f64| {
        if t <= 0.0 {
            return 0.0;
        }
        let xv = t.powf(inv_s);
        gg_snr_pdf(xv, cfg) * inv_s * xv / t
    };
    let r = integrate(f, 0.0, x.powf(s), QuadOptions::new(1e-13, 1e-11))?;
    Ok(r.value.clamp(0.0, 1.0))
}

/// Draws γ₂ = μ₂·(I_X·I_Y)² with I_X ~ Γ(α, 1/α), I_Y ~ Γ(β, 1/β).
#[derive(Debug, Clone, Copy)]
pub struct GgSampler {
    gx: Gamma<f64>,
    gy: Gamma<f64>,
    mean_electrical_snr: f64,
}

impl GgSampler {
    pub fn new(cfg: &OpticalConfig) -> Self {
        // Parameters are validated positive and finite by OpticalConfig.
        Self {
            gx: Gamma::new(cfg.alpha, 1.0 / cfg.alpha).expect("validated alpha"),
            gy: Gamma::new(cfg.beta, 1.0 / cfg.beta).expect("validated beta"),
            mean_electrical_snr: cfg.mean_electrical_snr,
        }
    }

    /// Unit-mean irradiance I.
    pub fn sample_irradiance<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.gx.sample(rng) * self.gy.sample(rng)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let i = self.sample_irradiance(rng);
        self.mean_electrical_snr * i * i
    }
}

/// One draw of the optical-hop SNR.
pub fn sample_gg_snr<R: Rng + ?Sized>(cfg: &OpticalConfig, rng: &mut R) -> f64 {
    GgSampler::new(cfg).sample(rng)
}

fn invalid(field: &'static str, reason: String) -> Error {
    Error::InvalidParameter { field, reason }
}

fn check_positive(field: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, format!("{v} must be finite and positive")))
    }
}
