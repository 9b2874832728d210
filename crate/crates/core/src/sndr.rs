//! End-to-end SNDR of the fixed-gain relay link and its high-SNR limits.

use crate::error::{Error, Result};
use crate::fading::{prs_snr_mean, OpticalConfig, PrsConfig};
use crate::impairments::{bussgang_coeffs, iq_coeffs, BussgangTriple, HpaModel, IqImbalance};

/// Receiver IQ description: physical imbalance or a directly set ILR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IqSpec {
    Imbalance(IqImbalance),
    /// Image-leakage ratio, linear.
    Ilr(f64),
}

/// Complete link description with the derived quantities every metric uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkConfig {
    rf: PrsConfig,
    optical: OpticalConfig,
    hpa: HpaModel,
    iq: IqSpec,
    ilr: f64,
    bussgang: BussgangTriple,
    kappa: f64,
    mean_selected_snr: f64,
}

impl LinkConfig {
    pub fn new(rf: PrsConfig, optical: OpticalConfig, hpa: HpaModel, iq: IqSpec) -> Result<Self> {
        let ilr = match iq {
            IqSpec::Imbalance(imb) => iq_coeffs(&imb)?.2,
            IqSpec::Ilr(v) => {
                if !(v >= 0.0) || !v.is_finite() {
                    return Err(Error::InvalidParameter {
                        field: "ilr",
                        reason: format!("{v} must be finite and non-negative"),
                    });
                }
                v
            }
        };
        let bussgang = bussgang_coeffs(&hpa)?;
        Ok(Self {
            rf,
            optical,
            hpa,
            iq,
            ilr,
            bussgang,
            kappa: kappa(&bussgang, rf.mean_snr()),
            mean_selected_snr: prs_snr_mean(&rf),
        })
    }

    /// Same link with new average SNRs γ̄₁ and γ̄₂.
    pub fn with_mean_snrs(&self, snr1: f64, snr2: f64) -> Result<Self> {
        Self::new(
            self.rf.with_mean_snr(snr1)?,
            self.optical.with_mean_snr(snr2)?,
            self.hpa,
            self.iq,
        )
    }

    pub fn rf(&self) -> &PrsConfig {
        &self.rf
    }
    pub fn optical(&self) -> &OpticalConfig {
        &self.optical
    }
    pub fn hpa(&self) -> &HpaModel {
        &self.hpa
    }
    pub fn iq(&self) -> &IqSpec {
        &self.iq
    }
    pub fn ilr(&self) -> f64 {
        self.ilr
    }
    pub fn bussgang(&self) -> &BussgangTriple {
        &self.bussgang
    }
    pub fn kappa(&self) -> f64 {
        self.kappa
    }
    /// E[γ₁(m)]
    pub fn mean_selected_snr(&self) -> f64 {
        self.mean_selected_snr
    }
}

/// κ = 1 + (σ_d²/σ²)(1 + γ̄₁)/δ²: the relay gain is fixed from the per-relay
/// average channel power, so σ² cancels.
pub fn kappa(b: &BussgangTriple, mean_snr_1: f64) -> f64 {
    1.0 + b.dist_var_ratio * (1.0 + mean_snr_1) / (b.delta * b.delta)
}

/// Instantaneous end-to-end SNDR for hop SNRs γ₁, γ₂.
pub fn e2e_sndr(gamma1: f64, gamma2: f64, cfg: &LinkConfig) -> f64 {
    let num = gamma1 * gamma2;
    if num == 0.0 {
        return 0.0;
    }
    let one_ilr = 1.0 + cfg.ilr;
    num / (cfg.ilr * num + one_ilr * cfg.kappa * gamma2 + one_ilr * (cfg.mean_selected_snr + cfg.kappa))
}

/// High-SNR SNDR limit 1/((1+ILR)·ξ/δ − 1).
pub fn sndr_ceiling(cfg: &LinkConfig) -> Result<f64> {
    let b = &cfg.bussgang;
    ceiling((1.0 + cfg.ilr) * b.clip / b.delta - 1.0)
}

/// Ceiling obtained by letting γ̄ → ∞ in the SNDR with κ ≈ (σ_d²/σ²)γ̄₁/δ²
/// and γ₁ replaced by its scale γ̄₁: 1/((1+ILR)·ξ/δ² − 1).
pub fn sndr_ceiling_derived(cfg: &LinkConfig) -> Result<f64> {
    let b = &cfg.bussgang;
    ceiling((1.0 + cfg.ilr) * b.clip / (b.delta * b.delta) - 1.0)
}

fn ceiling(denominator: f64) -> Result<f64> {
    if denominator > 0.0 {
        Ok(1.0 / denominator)
    } else {
        Err(Error::NoFiniteCeiling { denominator })
    }
}
