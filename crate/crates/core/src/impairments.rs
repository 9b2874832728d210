//! Relay power-amplifier nonlinearity and receiver IQ imbalance.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::specfun::{erfc, exp_ei_neg};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HpaKind {
    /// Soft envelope limiter.
    Sel,
    /// Travelling-wave tube amplifier.
    Twta,
    Ideal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HpaModel {
    kind: HpaKind,
    /// Input back-off A²_sat/σ², linear.
    ibo: f64,
    /// Maximum AM/PM rotation of the TWTA, radians.
    phi0: f64,
}

impl HpaModel {
    pub fn new(kind: HpaKind, ibo: f64, phi0: f64) -> Result<Self> {
        if kind != HpaKind::Ideal && !(ibo > 0.0 && ibo.is_finite()) {
            return Err(Error::InvalidParameter {
                field: "ibo",
                reason: format!("{ibo} must be finite and positive"),
            });
        }
        if !phi0.is_finite() {
            return Err(Error::InvalidParameter {
                field: "phi0",
                reason: format!("{phi0} must be finite"),
            });
        }
        Ok(Self { kind, ibo, phi0 })
    }

    pub fn sel(ibo: f64) -> Result<Self> {
        Self::new(HpaKind::Sel, ibo, 0.0)
    }

    pub fn twta(ibo: f64) -> Result<Self> {
        Self::new(HpaKind::Twta, ibo, 0.0)
    }

    pub fn ideal() -> Self {
        Self {
            kind: HpaKind::Ideal,
            ibo: f64::INFINITY,
            phi0: 0.0,
        }
    }

    pub fn kind(&self) -> HpaKind {
        self.kind
    }
    pub fn ibo(&self) -> f64 {
        self.ibo
    }
    pub fn phi0(&self) -> f64 {
        self.phi0
    }
}

/// Bussgang decomposition y = δ·x + d for a unit-power Gaussian input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BussgangTriple {
    pub delta: f64,
    /// σ_d²/σ²
    pub dist_var_ratio: f64,
    /// Clipping factor ξ = E|y|²/σ².
    pub clip: f64,
}

/// Applies the amplifier to one sample for unit input power.
pub fn hpa_apply(model: &HpaModel, x: Complex64) -> Complex64 {
    hpa_apply_scaled(model, x, 1.0)
}

/// Applies the amplifier for input power σ², so that A²_sat = IBO·σ².
pub fn hpa_apply_scaled(model: &HpaModel, x: Complex64, sigma2: f64) -> Complex64 {
    let a2 = model.ibo * sigma2;
    match model.kind {
        HpaKind::Ideal => x,
        HpaKind::Sel => {
            let r2 = x.norm_sqr();
            if r2 < a2 {
                x
            } else {
                x * (a2 / r2).sqrt()
            }
        }
        HpaKind::Twta => {
            let r2 = x.norm_sqr();
            let gain = a2 / (a2 + r2);
            let phase = model.phi0 * r2 / (a2 + r2);
            x * gain * Complex64::from_polar(1.0, phase)
        }
    }
}

/// Closed-form Bussgang coefficients (AM/PM neglected for the TWTA).
pub fn bussgang_coeffs(model: &HpaModel) -> Result<BussgangTriple> {
    let c = model.ibo;
    let (delta, clip) = match model.kind {
        HpaKind::Ideal => {
            return Ok(BussgangTriple {
                delta: 1.0,
                dist_var_ratio: 0.0,
                clip: 1.0,
            })
        }
        HpaKind::Sel => {
            let clip = -(-c).exp_m1();
            let sc = c.sqrt();
            let delta = clip + 0.5 * std::f64::consts::PI.sqrt() * sc * erfc(sc);
            (delta, clip)
        }
        HpaKind::Twta => {
            let g = exp_ei_neg(c)?;
            let delta = c * (1.0 + c * g);
            let clip = -c * c * ((1.0 + c) * g + 1.0);
            (delta, clip)
        }
    };
    let dist_var_ratio = clip - delta * delta;
    if dist_var_ratio < -1e-12 {
        return Err(Error::Consistency(format!(
            "negative distortion variance {dist_var_ratio:e} for {:?} at IBO {c}",
            model.kind
        )));
    }
    Ok(BussgangTriple {
        delta,
        dist_var_ratio: dist_var_ratio.max(0.0),
        clip,
    })
}

/// Empirical Bussgang estimate from `n` unit-power complex Gaussian inputs:
/// returns (δ̂, σ̂_d²/σ²).
///
/// Samples are split into fixed chunks with one ChaCha8 stream each, so the
/// estimate depends only on (`n`, `seed`).
pub fn bussgang_empirical(model: &HpaModel, n: u64, seed: u64) -> Result<(f64, f64)> {
    if n < 100_000 {
        return Err(Error::InvalidParameter {
            field: "n",
            reason: format!("{n} samples; at least 1e5 are required"),
        });
    }
    const CHUNKS: u64 = 64;
    let sums: Vec<[f64; 3]> = (0..CHUNKS)
        .into_par_iter()
        .map(|c| {
            let count = n / CHUNKS + u64::from(c < n % CHUNKS);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            // Σ|x|², Σ Re(y·x*), Σ|y|²
            let mut acc = [0.0f64; 3];
            for _ in 0..count {
                let x = complex_normal(&mut rng);
                let y = hpa_apply(model, x);
                acc[0] += x.norm_sqr();
                acc[1] += (y * x.conj()).re;
                acc[2] += y.norm_sqr();
            }
            acc
        })
        .collect();
    let mut t = [0.0f64; 3];
    for s in &sums {
        for (a, b) in t.iter_mut().zip(s) {
            *a += b;
        }
    }
    let (sxx, sxy, syy) = (t[0], t[1], t[2]);
    let count = n as f64;
    let delta = sxy / sxx;
    // E|y − δx|² = E|y|² − 2δ E[Re(y x*)] + δ² E|x|²
    let dist = (syy - 2.0 * delta * sxy + delta * delta * sxx) / count;
    let sigma2 = sxx / count;
    Ok((delta, (dist / sigma2).max(0.0)))
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IqImbalance {
    /// Magnitude imbalance ζ (linear amplitude ratio).
    pub zeta: f64,
    /// Phase imbalance θ, radians.
    pub theta: f64,
}

impl IqImbalance {
    pub fn ideal() -> Self {
        Self { zeta: 1.0, theta: 0.0 }
    }
}

/// IQ coefficients (ω₁, ω₂) and the image-leakage ratio |ω₂/ω₁|².
pub fn iq_coeffs(imb: &IqImbalance) -> Result<(Complex64, Complex64, f64)> {
    if !(imb.zeta > 0.0) || !imb.zeta.is_finite() || !imb.theta.is_finite() {
        return Err(Error::InvalidParameter {
            field: "zeta",
            reason: format!("zeta = {}, theta = {} must be finite with zeta > 0", imb.zeta, imb.theta),
        });
    }
    let w1 = (Complex64::new(1.0, 0.0) + Complex64::from_polar(imb.zeta, -imb.theta)) * 0.5;
    let w2 = (Complex64::new(1.0, 0.0) - Complex64::from_polar(imb.zeta, imb.theta)) * 0.5;
    let n1 = w1.norm_sqr();
    if n1 < 1e-20 {
        return Err(Error::DegenerateReceiver {
            zeta: imb.zeta,
            theta: imb.theta,
        });
    }
    Ok((w1, w2, w2.norm_sqr() / n1))
}

/// ω₁·s + ω₂·s*.
pub fn iq_apply(w1: Complex64, w2: Complex64, s: Complex64) -> Complex64 {
    w1 * s + w2 * s.conj()
}

/// Coefficients of the inverse real-linear map: iq_apply with them undoes
/// iq_apply with (ω₁, ω₂).
pub fn iq_inverse(w1: Complex64, w2: Complex64) -> Result<(Complex64, Complex64)> {
    let det = w1.norm_sqr() - w2.norm_sqr();
    if det.abs() < 1e-300 {
        return Err(Error::Consistency("IQ map is singular (|omega1| = |omega2|)".into()));
    }
    Ok((w1.conj() / det, -w2 / det))
}
