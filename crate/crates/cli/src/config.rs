//! Run configuration: JSON document, `table1` preset and flag overrides.

use std::fmt;
use std::path::Path;

use clap::ValueEnum;
use rfso_core::analytic::ModulationSpec;
use rfso_core::fading::{rytov_to_alphabeta, OpticalConfig, PrsConfig};
use rfso_core::impairments::{HpaKind, HpaModel, IqImbalance};
use rfso_core::mcsim::SimSpec;
use rfso_core::sndr::{IqSpec, LinkConfig};
use rfso_core::units::{amplitude_db_to_linear, db_to_linear};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Invalid configuration; `field` names the offending entry.
#[derive(Debug)]
pub struct ConfigError {
    pub field: String,
    pub reason: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid config field `{}`: {}", self.field, self.reason)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Hpa {
    Sel,
    Twta,
    Ideal,
}

impl Hpa {
    pub fn label(self) -> &'static str {
        match self {
            Hpa::Sel => "sel",
            Hpa::Twta => "twta",
            Hpa::Ideal => "ideal",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Metric {
    Outage,
    Ber,
    Capacity,
    CapacityBound,
    CapacityCeiling,
    Montecarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Modulation {
    pub name: String,
    pub p: f64,
    pub q: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub start_db: f64,
    pub stop_db: f64,
    pub step_db: f64,
}

impl Sweep {
    /// Parses `start:stop:step` or a single value.
    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| ConfigError::new("snr_db", format!("`{t}` is not a number")))
        };
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [v] => {
                let v = num(v)?;
                Ok(Self {
                    start_db: v,
                    stop_db: v,
                    step_db: 1.0,
                })
            }
            [a, b, c] => Ok(Self {
                start_db: num(a)?,
                stop_db: num(b)?,
                step_db: num(c)?,
            }),
            _ => Err(ConfigError::new("snr_db", format!("`{s}` is neither `start:stop:step` nor a single value"))),
        }
    }

    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop_db - self.start_db) / self.step_db + 1e-9).floor() as usize;
        (0..=n).map(|i| self.start_db + i as f64 * self.step_db).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sim {
    pub n_samples: u64,
    pub seed: u64,
    pub n_chunks: u32,
    pub confidence: f64,
}

impl From<Sim> for SimSpec {
    fn from(s: Sim) -> Self {
        SimSpec {
            n_samples: s.n_samples,
            seed: s.seed,
            n_chunks: s.n_chunks,
            confidence: s.confidence,
        }
    }
}

/// Everything needed to reproduce a run. Defaults are the `table1` preset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub n_relays: u32,
    pub rank: u32,
    pub rho: f64,
    /// Used when `alpha`/`beta` are absent.
    pub rytov_variance: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub hpa: Hpa,
    pub ibo_db: f64,
    /// TWTA AM/PM rotation, degrees (waveform-level only).
    pub phi0_deg: f64,
    /// Image-leakage ratio; takes precedence over `zeta_db`/`theta_deg`.
    /// With all three absent the receiver is IQ-balanced.
    pub ilr_db: Option<f64>,
    pub zeta_db: Option<f64>,
    pub theta_deg: Option<f64>,
    pub gamma_th_db: f64,
    pub modulation: Modulation,
    pub sweep: Sweep,
    pub sim: Sim,
    pub metrics: Vec<Metric>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self::table1()
    }
}

impl RunConfig {
    /// N = 7, rank 7, ρ = 0.9, Rytov variance 0.16, γ_th = 10 dB, BPSK, with
    /// a SEL amplifier at 8 dB IBO and ILR −15 dB.
    pub fn table1() -> Self {
        Self {
            n_relays: 7,
            rank: 7,
            rho: 0.9,
            rytov_variance: Some(0.16),
            alpha: None,
            beta: None,
            hpa: Hpa::Sel,
            ibo_db: 8.0,
            phi0_deg: 0.0,
            ilr_db: Some(-15.0),
            zeta_db: None,
            theta_deg: None,
            gamma_th_db: 10.0,
            modulation: Modulation {
                name: "bpsk".into(),
                p: 0.5,
                q: 1.0,
            },
            sweep: Sweep {
                start_db: 0.0,
                stop_db: 60.0,
                step_db: 5.0,
            },
            sim: Sim {
                n_samples: 10_000_000,
                seed: 0,
                n_chunks: 64,
                confidence: 0.95,
            },
            metrics: vec![Metric::Outage],
        }
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("config", format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| ConfigError::new(json_field(&e), e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<(), ConfigError> {
        std::fs::write(path, self.to_json() + "\n")
            .map_err(|e| ConfigError::new("save_config", format!("cannot write {}: {e}", path.display())))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the compact JSON form.
    pub fn hash(&self) -> String {
        let compact = serde_json::to_string(self).expect("config serializes");
        format!("{:x}", Sha256::digest(compact.as_bytes()))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let finite = [
            ("rho", Some(self.rho)),
            ("rytov_variance", self.rytov_variance),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("ibo_db", Some(self.ibo_db)),
            ("phi0_deg", Some(self.phi0_deg)),
            ("ilr_db", self.ilr_db),
            ("zeta_db", self.zeta_db),
            ("theta_deg", self.theta_deg),
            ("gamma_th_db", Some(self.gamma_th_db)),
            ("sweep.start_db", Some(self.sweep.start_db)),
            ("sweep.stop_db", Some(self.sweep.stop_db)),
            ("sweep.step_db", Some(self.sweep.step_db)),
        ];
        for (field, v) in finite {
            if let Some(v) = v {
                if !v.is_finite() {
                    return Err(ConfigError::new(field, format!("{v} is not finite")));
                }
            }
        }
        if self.sweep.start_db > self.sweep.stop_db {
            return Err(ConfigError::new("sweep.start_db", "start exceeds stop"));
        }
        if !(self.sweep.step_db > 0.0) {
            return Err(ConfigError::new("sweep.step_db", "step must be positive"));
        }
        if self.sweep.points().len() > 100_000 {
            return Err(ConfigError::new("sweep.step_db", "more than 100000 grid points"));
        }
        if self.alpha.is_some() != self.beta.is_some() {
            return Err(ConfigError::new("alpha", "alpha and beta must be given together"));
        }
        if self.alpha.is_none() && self.rytov_variance.is_none() {
            return Err(ConfigError::new("rytov_variance", "give rytov_variance or alpha and beta"));
        }
        if self.ilr_db.is_none() && self.zeta_db.is_some() != self.theta_deg.is_some() {
            return Err(ConfigError::new("zeta_db", "zeta_db and theta_deg must be given together"));
        }
        SimSpec::from(self.sim).validate().map_err(|e| core_field("sim", e))?;
        self.modulation_spec()?;
        self.link(self.sweep.start_db)?;
        Ok(())
    }

    pub fn gamma_th(&self) -> f64 {
        db_to_linear(self.gamma_th_db)
    }

    pub fn modulation_spec(&self) -> Result<ModulationSpec, ConfigError> {
        ModulationSpec::new(self.modulation.p, self.modulation.q, self.modulation.name.clone())
            .map_err(|e| core_field("modulation", e))
    }

    pub fn hpa_model(&self) -> Result<HpaModel, ConfigError> {
        let kind = match self.hpa {
            Hpa::Sel => HpaKind::Sel,
            Hpa::Twta => HpaKind::Twta,
            Hpa::Ideal => return Ok(HpaModel::ideal()),
        };
        HpaModel::new(kind, db_to_linear(self.ibo_db), self.phi0_deg.to_radians()).map_err(|e| core_field("ibo_db", e))
    }

    pub fn iq_spec(&self) -> IqSpec {
        match (self.ilr_db, self.zeta_db, self.theta_deg) {
            (Some(ilr), _, _) => IqSpec::Ilr(db_to_linear(ilr)),
            (None, Some(z), Some(t)) => IqSpec::Imbalance(IqImbalance {
                zeta: amplitude_db_to_linear(z),
                theta: t.to_radians(),
            }),
            _ => IqSpec::Ilr(0.0),
        }
    }

    /// Link with both hops at average SNR `snr_db`.
    pub fn link(&self, snr_db: f64) -> Result<LinkConfig, ConfigError> {
        let snr = db_to_linear(snr_db);
        let rf = PrsConfig::new(self.n_relays, self.rank, self.rho, snr).map_err(|e| core_field("rf", e))?;
        let (a, b) = match (self.alpha, self.beta) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                let r = self.rytov_variance.unwrap_or(f64::NAN);
                rytov_to_alphabeta(r).map_err(|e| core_field("rytov_variance", e))?
            }
        };
        let optical = OpticalConfig::from_mean_snr(a, b, snr).map_err(|e| core_field("optical", e))?;
        LinkConfig::new(rf, optical, self.hpa_model()?, self.iq_spec()).map_err(|e| core_field("iq", e))
    }
}

fn core_field(group: &str, e: rfso_core::error::Error) -> ConfigError {
    use rfso_core::error::Error;
    match &e {
        Error::InvalidParameter { field, reason } => {
            let name = match group {
                "rf" | "optical" | "iq" => (*field).to_string(),
                _ => format!("{group}.{field}"),
            };
            ConfigError::new(name, reason.clone())
        }
        _ => ConfigError::new(group, e.to_string()),
    }
}

/// Best-effort field name for a JSON error.
fn json_field(e: &serde_json::Error) -> String {
    let msg = e.to_string();
    for marker in ["unknown field `", "missing field `"] {
        if let Some(i) = msg.find(marker) {
            let rest = &msg[i + marker.len()..];
            if let Some(j) = rest.find('`') {
                return rest[..j].to_string();
            }
        }
    }
    "config".into()
}
