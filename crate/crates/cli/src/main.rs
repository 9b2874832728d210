mod config;
mod sweep;
mod table;
mod validate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{ConfigError, Hpa, Metric, RunConfig, Sweep};
use table::Table;

const WORKERS_ENV: &str = "RFSO_WORKERS";

#[derive(Parser)]
#[command(name = "rfso", version, about = "Outage, BER and capacity of mixed RF/FSO relay links with hardware impairments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form outage probability.
    Outage(Common),
    /// Average bit error rate.
    Ber(Common),
    /// Ergodic capacity with its bound, approximation and ceilings.
    Capacity(Common),
    /// Any combination of metrics over the SNR grid.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Comma-separated metrics; defaults to the config's list.
        #[arg(long, value_enum, value_delimiter = ',')]
        metrics: Option<Vec<Metric>>,
    },
    /// Monte Carlo estimates with confidence intervals.
    Montecarlo(Common),
    /// Closed form vs Monte Carlo cross-check for SEL 4/8 dB and TWTA 5/8 dB.
    Validate(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Table1,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModName {
    /// (p, q) = (1/2, 1)
    Bpsk,
    /// Coherent BFSK, (1/2, 1/2)
    Bfsk,
    /// Differential BPSK, (1, 1)
    Dbpsk,
}

#[derive(Args, Default)]
struct Common {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Start from a named preset (the default base).
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    #[arg(long)]
    n_relays: Option<u32>,
    /// Rank of the selected relay (N = best).
    #[arg(long)]
    rank: Option<u32>,
    /// Time correlation of the outdated CSI.
    #[arg(long)]
    rho: Option<f64>,
    /// Rytov variance; replaces explicit alpha/beta.
    #[arg(long)]
    rytov: Option<f64>,
    #[arg(long, requires = "beta")]
    alpha: Option<f64>,
    #[arg(long, requires = "alpha")]
    beta: Option<f64>,
    #[arg(long, value_enum)]
    hpa: Option<Hpa>,
    #[arg(long, allow_hyphen_values = true)]
    ibo_db: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    phi0_deg: Option<f64>,
    /// Image-leakage ratio in dB, or `none` for a balanced receiver.
    #[arg(long, allow_hyphen_values = true)]
    ilr_db: Option<String>,
    /// Amplitude imbalance in dB (with --theta-deg; replaces --ilr-db).
    #[arg(long, allow_hyphen_values = true, requires = "theta_deg")]
    zeta_db: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "zeta_db")]
    theta_deg: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    gamma_th_db: Option<f64>,
    #[arg(long, value_enum)]
    modulation: Option<ModName>,
    /// Conditional-BER parameter p (with --mod-q).
    #[arg(long, requires = "mod_q")]
    mod_p: Option<f64>,
    #[arg(long, requires = "mod_p")]
    mod_q: Option<f64>,
    /// Average SNR per hop: `start:stop:step` or a single value, dB.
    #[arg(long, allow_hyphen_values = true)]
    snr_db: Option<String>,
    /// Monte Carlo sample count.
    #[arg(long)]
    samples: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    chunks: Option<u32>,
    #[arg(long)]
    confidence: Option<f64>,
    /// Output CSV path; standard output when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Write the resolved configuration as JSON.
    #[arg(long)]
    save_config: Option<PathBuf>,
    /// Worker threads (default: $RFSO_WORKERS, else all cores).
    #[arg(long)]
    workers: Option<usize>,
}

enum Failure {
    Config(ConfigError),
    Numeric(rfso_core::error::Error),
    Io(String),
    Validation,
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<rfso_core::error::Error> for Failure {
    fn from(e: rfso_core::error::Error) -> Self {
        Failure::Numeric(e)
    }
}

fn resolve(c: &Common) -> Result<RunConfig, ConfigError> {
    let mut cfg = match (&c.config, c.preset) {
        (Some(path), _) => RunConfig::load(path)?,
        (None, Some(Preset::Table1) | None) => RunConfig::table1(),
    };
    macro_rules! set {
        ($flag:ident => $($field:ident).+) => {
            if let Some(v) = c.$flag {
                cfg.$($field).+ = v;
            }
        };
    }
    set!(n_relays => n_relays);
    set!(rank => rank);
    set!(rho => rho);
    set!(hpa => hpa);
    set!(ibo_db => ibo_db);
    set!(phi0_deg => phi0_deg);
    set!(gamma_th_db => gamma_th_db);
    if let Some(r) = c.rytov {
        cfg.rytov_variance = Some(r);
        cfg.alpha = None;
        cfg.beta = None;
    }
    if c.alpha.is_some() {
        cfg.alpha = c.alpha;
        cfg.beta = c.beta;
    }
    if c.zeta_db.is_some() {
        cfg.zeta_db = c.zeta_db;
        cfg.theta_deg = c.theta_deg;
        cfg.ilr_db = None;
    }
    if let Some(s) = &c.ilr_db {
        cfg.ilr_db = if s.eq_ignore_ascii_case("none") {
            None
        } else {
            Some(
                s.parse()
                    .map_err(|_| ConfigError::new("ilr_db", format!("`{s}` is neither a number nor `none`")))?,
            )
        };
    }
    if let Some(m) = c.modulation {
        let (name, p, q) = match m {
            ModName::Bpsk => ("bpsk", 0.5, 1.0),
            ModName::Bfsk => ("bfsk", 0.5, 0.5),
            ModName::Dbpsk => ("dbpsk", 1.0, 1.0),
        };
        cfg.modulation = config::Modulation {
            name: name.into(),
            p,
            q,
        };
    }
    if let (Some(p), Some(q)) = (c.mod_p, c.mod_q) {
        cfg.modulation = config::Modulation {
            name: "custom".into(),
            p,
            q,
        };
    }
    if let Some(s) = &c.snr_db {
        cfg.sweep = Sweep::parse(s)?;
    }
    if let Some(n) = c.samples {
        if !(n >= 1.0 && n.fract() == 0.0 && n < 1.8e19) {
            return Err(ConfigError::new("sim.n_samples", format!("{n} is not a positive integer")));
        }
        cfg.sim.n_samples = n as u64;
    }
    set!(seed => sim.seed);
    set!(chunks => sim.n_chunks);
    set!(confidence => sim.confidence);
    cfg.validate()?;
    Ok(cfg)
}

fn init_workers(flag: Option<usize>) -> Result<(), ConfigError> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var(WORKERS_ENV) {
            Ok(s) => Some(
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| ConfigError::new(WORKERS_ENV, format!("`{s}` is not a worker count")))?,
            ),
            Err(_) => None,
        },
    };
    if let Some(n) = n {
        if n == 0 {
            return Err(ConfigError::new("workers", "must be at least 1"));
        }
        // Fails only if the pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn emit(table: &Table, output: &Option<PathBuf>) -> Result<(), Failure> {
    let text = table.render();
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn metadata(command: &str, cfg: &RunConfig) -> Vec<String> {
    vec![
        format!("rfso {}", env!("CARGO_PKG_VERSION")),
        format!("command: {command}"),
        format!("config_sha256: {}", cfg.hash()),
        format!("seed: {}", cfg.sim.seed),
    ]
}

/// Summary goes to stdout when the CSV goes to a file, else to stderr.
fn summary(output: &Option<PathBuf>, line: &str) {
    if output.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let (name, common, metrics): (&str, &Common, Option<Vec<Metric>>) = match &cli.command {
        Command::Outage(c) => ("outage", c, Some(vec![Metric::Outage])),
        Command::Ber(c) => ("ber", c, Some(vec![Metric::Ber])),
        Command::Capacity(c) => (
            "capacity",
            c,
            Some(vec![Metric::Capacity, Metric::CapacityBound, Metric::CapacityCeiling]),
        ),
        Command::Sweep { common, metrics } => ("sweep", common, metrics.clone()),
        Command::Montecarlo(c) => ("montecarlo", c, Some(vec![Metric::Montecarlo])),
        Command::Validate(c) => ("validate", c, None),
    };
    let mut cfg = resolve(common)?;
    if name == "sweep" {
        if let Some(m) = metrics.clone() {
            cfg.metrics = m;
        }
        if cfg.metrics.is_empty() {
            return Err(ConfigError::new("metrics", "no metric requested").into());
        }
    }
    init_workers(common.workers)?;
    if let Some(path) = &common.save_config {
        cfg.save(path)?;
    }
    if name == "validate" {
        let outcome = validate::run(&cfg)??;
        let mut table = outcome.table;
        table.meta = metadata(name, &cfg);
        table.meta.extend(outcome.report.iter().cloned());
        emit(&table, &common.output)?;
        for line in &outcome.report {
            summary(&common.output, line);
        }
        return if outcome.passed { Ok(()) } else { Err(Failure::Validation) };
    }
    let mut metrics = if name == "sweep" { cfg.metrics.clone() } else { metrics.unwrap_or_default() };
    metrics.sort();
    metrics.dedup();
    let links = cfg
        .sweep
        .points()
        .iter()
        .map(|&d| cfg.link(d))
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = sweep::run(&cfg, &links, &metrics)?;
    table.meta = metadata(name, &cfg);
    emit(&table, &common.output)?;
    let names: Vec<String> = metrics
        .iter()
        .map(|m| m.to_possible_value().expect("named").get_name().to_string())
        .collect();
    let target = common.output.as_ref().map_or("stdout".into(), |p| p.display().to_string());
    summary(
        &common.output,
        &format!("{name}: {} rows, metrics {} -> {target}", table.rows.len(), names.join(",")),
    );
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(e)) => {
            eprintln!("numerical error: {e}");
            ExitCode::from(3)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Validation) => {
            eprintln!("validation failed: closed form and Monte Carlo disagree beyond tolerance");
            ExitCode::from(1)
        }
    }
}
