//! Monte Carlo estimation of outage probability, BER and ergodic capacity by
//! direct sampling of the end-to-end SNDR.
//!
//! Samples are split into `n_chunks` chunks; chunk `i` draws from the ChaCha8
//! stream `i` of `seed` and accumulates privately. Chunks are merged in index
//! order, so results are bit-identical for any number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analytic::ModulationSpec;
use crate::error::{Error, Result};
use crate::fading::{GgSampler, PrsSampler};
use crate::sndr::{e2e_sndr, LinkConfig};
use crate::specfun::erfc;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSpec {
    pub n_samples: u64,
    pub seed: u64,
    pub n_chunks: u32,
    /// Two-sided confidence level of the reported intervals.
    pub confidence: f64,
}

impl Default for SimSpec {
    fn default() -> Self {
        Self {
            n_samples: 10_000_000,
            seed: 0,
            n_chunks: 64,
            confidence: 0.95,
        }
    }
}

impl SimSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_samples < 1000 {
            return Err(invalid("n_samples", format!("{} is below the minimum of 1000", self.n_samples)));
        }
        if self.n_chunks == 0 || u64::from(self.n_chunks) > self.n_samples {
            return Err(invalid("n_chunks", format!("{} must be in 1..=n_samples", self.n_chunks)));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(invalid("confidence", format!("{} must lie in (0, 1)", self.confidence)));
        }
        Ok(())
    }

    fn chunk_len(&self, chunk: u32) -> u64 {
        let n = u64::from(self.n_chunks);
        self.n_samples / n + u64::from(u64::from(chunk) < self.n_samples % n)
    }

    fn rng(&self, chunk: u32) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(u64::from(chunk));
        rng
    }
}

/// Sample mean with its standard error and confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub ci_halfwidth: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimResult {
    pub op: Estimate,
    pub ber: Estimate,
    pub ec: Estimate,
    pub n_effective: u64,
}

/// Running mean and sum of squared deviations (Welford), mergeable with Chan's
/// formula.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (x - self.mean);
    }

    fn merge(&mut self, o: &Moments) {
        if o.n == 0.0 {
            return;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        self.mean += d * o.n / n;
        self.m2 += o.m2 + d * d * self.n * o.n / n;
        self.n = n;
    }

    fn estimate(&self, z: f64) -> Estimate {
        let var = if self.n > 1.0 { self.m2 / (self.n - 1.0) } else { 0.0 };
        let se = (var / self.n).sqrt();
        Estimate {
            mean: self.mean,
            std_error: se,
            ci_halfwidth: z * se,
        }
    }
}

/// Estimates OP, BER and EC for one link.
pub fn simulate(cfg: &LinkConfig, gamma_th: f64, modulation: &ModulationSpec, spec: &SimSpec) -> Result<SimResult> {
    Ok(simulate_many(std::slice::from_ref(cfg), gamma_th, modulation, spec)?.remove(0))
}

/// Estimates OP, BER and EC for several links that share the fading shape
/// (N, m, ρ, α, β) and differ in average SNRs or impairments. Every link sees
/// the same unit-mean channel draws (common random numbers), so a sweep costs
/// one set of draws.
pub fn simulate_many(
    cfgs: &[LinkConfig],
    gamma_th: f64,
    modulation: &ModulationSpec,
    spec: &SimSpec,
) -> Result<Vec<SimResult>> {
    spec.validate()?;
    if !(gamma_th > 0.0) || !gamma_th.is_finite() {
        return Err(invalid("gamma_th", format!("{gamma_th} must be finite and positive")));
    }
    let Some(first) = cfgs.first() else {
        return Ok(Vec::new());
    };
    for c in cfgs {
        let (a, b) = (c.rf(), first.rf());
        let same = a.n_relays() == b.n_relays()
            && a.rank() == b.rank()
            && a.rho() == b.rho()
            && c.optical().alpha() == first.optical().alpha()
            && c.optical().beta() == first.optical().beta();
        if !same {
            return Err(invalid("cfgs", "links in one batch must share N, m, rho, alpha and beta".into()));
        }
    }
    let prs = PrsSampler::new(first.rf());
    let gg = GgSampler::new(first.optical());
    let certain: Vec<bool> = cfgs.iter().map(|c| c.ilr() > 0.0 && gamma_th >= 1.0 / c.ilr()).collect();
    let chunks: Vec<Vec<[Moments; 3]>> = (0..spec.n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = spec.rng(chunk);
            let mut acc = vec![[Moments::default(); 3]; cfgs.len()];
            for _ in 0..spec.chunk_len(chunk) {
                let u = prs.sample_unit(&mut rng);
                let i = gg.sample_irradiance(&mut rng);
                let i2 = i * i;
                for ((cfg, a), &sure) in cfgs.iter().zip(acc.iter_mut()).zip(&certain) {
                    let g1 = cfg.rf().mean_snr() * u;
                    let g2 = cfg.optical().mean_electrical_snr() * i2;
                    let s = e2e_sndr(g1, g2, cfg);
                    a[0].push(if sure || s < gamma_th { 1.0 } else { 0.0 });
                    a[1].push(modulation.conditional_ber(s));
                    a[2].push(0.5 * s.ln_1p() / std::f64::consts::LN_2);
                }
            }
            acc
        })
        .collect();
    let z = normal_quantile(0.5 + 0.5 * spec.confidence);
    let mut total = vec![[Moments::default(); 3]; cfgs.len()];
    for chunk in &chunks {
        for (t, c) in total.iter_mut().zip(chunk) {
            for k in 0..3 {
                t[k].merge(&c[k]);
            }
        }
    }
    Ok(total
        .iter()
        .map(|t| SimResult {
            op: t[0].estimate(z),
            ber: t[1].estimate(z),
            ec: t[2].estimate(z),
            n_effective: t[0].n as u64,
        })
        .collect())
}

/// Monte Carlo estimate of J = E[γ₁γ₂/τ], τ = (1+ILR)(κγ₂ + E[γ₁(m)] + κ).
pub fn estimate_j(cfg: &LinkConfig, spec: &SimSpec) -> Result<Estimate> {
    spec.validate()?;
    let prs = PrsSampler::new(cfg.rf());
    let gg = GgSampler::new(cfg.optical());
    let one_ilr = 1.0 + cfg.ilr();
    let (k, e1) = (cfg.kappa(), cfg.mean_selected_snr());
    let chunks: Vec<Moments> = (0..spec.n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = spec.rng(chunk);
            let mut m = Moments::default();
            for _ in 0..spec.chunk_len(chunk) {
                let g1 = prs.sample(&mut rng);
                let g2 = gg.sample(&mut rng);
                m.push(g1 * g2 / (one_ilr * (k * g2 + e1 + k)));
            }
            m
        })
        .collect();
    let mut total = Moments::default();
    for c in &chunks {
        total.merge(c);
    }
    Ok(total.estimate(normal_quantile(0.5 + 0.5 * spec.confidence)))
}

/// Draws end-to-end SNDR samples in chunk order.
pub fn sample_sndr(cfg: &LinkConfig, spec: &SimSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let prs = PrsSampler::new(cfg.rf());
    let gg = GgSampler::new(cfg.optical());
    let chunks: Vec<Vec<f64>> = (0..spec.n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = spec.rng(chunk);
            (0..spec.chunk_len(chunk))
                .map(|_| {
                    let g1 = prs.sample(&mut rng);
                    let g2 = gg.sample(&mut rng);
                    e2e_sndr(g1, g2, cfg)
                })
                .collect()
        })
        .collect();
    Ok(chunks.concat())
}

/// Kolmogorov–Smirnov distance sup|F_n − F| between the empirical CDF of
/// `samples` and `cdf`.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if samples.len() < 100 {
        return Err(Error::Samples(format!(
            "KS distance needs at least 100 samples, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|x| x.is_nan()) {
        return Err(Error::Samples("KS distance input contains NaN".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        // Ties: the empirical CDF jumps once over the whole run.
        let x = sorted[i];
        let mut j = i;
        while j < sorted.len() && sorted[j] == x {
            j += 1;
        }
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max(j as f64 / n - f);
        i = j;
    }
    Ok(d)
}

/// Standard normal quantile: Acklam's rational approximation refined by one
/// Halley step against erfc.
pub fn normal_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    if !(p > 0.0 && p < 1.0) {
        return if p == 0.0 {
            f64::NEG_INFINITY
        } else if p == 1.0 {
            f64::INFINITY
        } else {
            f64::NAN
        };
    }
    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    let x = if p < 0.02425 {
        tail((-2.0 * p.ln()).sqrt())
    } else if p > 1.0 - 0.02425 {
        -tail((-2.0 * (1.0 - p).ln()).sqrt())
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };
    let e = 0.5 * erfc(-x / std::f64::consts::SQRT_2) - p;
    let u = e * (2.0 * std::f64::consts::PI).sqrt() * (0.5 * x * x).exp();
    x - u / (1.0 + 0.5 * x * u)
}

fn invalid(field: &'static str, reason: String) -> Error {
    Error::InvalidParameter { field, reason }
}
