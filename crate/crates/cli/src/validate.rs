//! Closed-form vs Monte Carlo cross-check, floor/ceiling analysis and ceiling
//! arbitration.

use rfso_core::analytic::{
    avg_ber, capacity_ceiling, capacity_ceiling_derived, capacity_limit, ergodic_capacity, outage_probability,
};
use rfso_core::error::{Error, Result};
use rfso_core::mcsim::{simulate_many, SimSpec};

use crate::config::{ConfigError, Hpa, RunConfig};
use crate::table::{num, snr, Table};

/// Amplifier cases of the cross-check: (kind, IBO in dB).
pub const CASES: [(Hpa, f64); 4] = [(Hpa::Sel, 4.0), (Hpa::Sel, 8.0), (Hpa::Twta, 5.0), (Hpa::Twta, 8.0)];

/// A metric is checked where it is at least this large (EC: everywhere).
const CHECK_FLOOR: f64 = 1e-4;
const REL_TOL: f64 = 0.05;
const SIGMAS: f64 = 3.0;
/// SNRs of the floor/saturation analysis.
const FLOOR_SNRS: [f64; 2] = [70.0, 80.0];
const CEILING_TOL: f64 = 0.02;

pub const COLUMNS: [&str; 17] = [
    "snr_db", "case", "op", "ber", "ec", "op_mc", "ber_mc", "ec_mc", "op_ok", "ber_ok", "ec_ok", "op_mc_se",
    "ber_mc_se", "ec_mc_se", "op_mc_ci", "ber_mc_ci", "ec_mc_ci",
];

pub struct Outcome {
    pub table: Table,
    pub report: Vec<String>,
    pub passed: bool,
}

fn case_label(hpa: Hpa, ibo_db: f64) -> String {
    format!("{}_ibo{}", hpa.label(), ibo_db)
}

/// `None` when not checked, otherwise whether the closed form lies within
/// max(3σ, 5%) of the estimate.
fn check(closed: f64, mc: f64, se: f64, gated: bool) -> Option<bool> {
    if gated && closed < CHECK_FLOOR {
        return None;
    }
    Some((closed - mc).abs() <= (SIGMAS * se).max(REL_TOL * closed.abs()))
}

fn flag(c: Option<bool>) -> String {
    match c {
        None => "-".into(),
        Some(true) => "1".into(),
        Some(false) => "0".into(),
    }
}

fn pct(x: f64) -> String {
    if x.is_nan() {
        "n/a".into()
    } else {
        format!("{:.3}%", 100.0 * x)
    }
}

pub fn run(base: &RunConfig) -> std::result::Result<Result<Outcome>, ConfigError> {
    let points = base.sweep.points();
    let mut prepared = Vec::new();
    for &(hpa, ibo_db) in &CASES {
        let cfg = RunConfig {
            hpa,
            ibo_db,
            ..base.clone()
        };
        let links = points.iter().map(|&d| cfg.link(d)).collect::<std::result::Result<Vec<_>, _>>()?;
        let tails = FLOOR_SNRS.iter().map(|&d| cfg.link(d)).collect::<std::result::Result<Vec<_>, _>>()?;
        prepared.push((case_label(hpa, ibo_db), links, tails));
    }
    Ok(compute(base, &points, &prepared))
}

type Prepared = (String, Vec<rfso_core::sndr::LinkConfig>, Vec<rfso_core::sndr::LinkConfig>);

fn compute(base: &RunConfig, points: &[f64], prepared: &[Prepared]) -> Result<Outcome> {
    let gamma_th = base.gamma_th();
    let modulation = base.modulation_spec().expect("validated modulation");
    let spec = SimSpec::from(base.sim);
    let mut table = Table::new(COLUMNS.iter().map(|s| s.to_string()).collect());
    let mut report = Vec::new();
    let mut passed = true;
    for (label, links, tails) in prepared {
        let ctx = |db: f64| move |e: Error| e.context(format!("{label} at {db} dB"));
        let mc = simulate_many(links, gamma_th, &modulation, &spec).map_err(|e| e.context(format!("{label} Monte Carlo")))?;
        let mut worst = [0.0f64; 3];
        let mut failures = 0;
        for ((link, &db), r) in links.iter().zip(points).zip(&mc) {
            let closed = [
                outage_probability(gamma_th, link).map_err(ctx(db))?.value,
                avg_ber(&modulation, link).map_err(ctx(db))?.value,
                ergodic_capacity(link).map_err(ctx(db))?.value,
            ];
            let est = [r.op, r.ber, r.ec];
            let mut row = vec![snr(db), label.clone()];
            row.extend(closed.iter().map(|&v| num(v)));
            row.extend(est.iter().map(|e| num(e.mean)));
            for k in 0..3 {
                let c = check(closed[k], est[k].mean, est[k].std_error, k < 2);
                if c.is_some() && closed[k] != 0.0 {
                    worst[k] = worst[k].max(((closed[k] - est[k].mean) / closed[k]).abs());
                }
                if c == Some(false) {
                    failures += 1;
                }
                row.push(flag(c));
            }
            row.extend(est.iter().map(|e| num(e.std_error)));
            row.extend(est.iter().map(|e| num(e.ci_halfwidth)));
            table.rows.push(row);
        }
        passed &= failures == 0;
        report.push(format!(
            "crosscheck {label}: max_rel_dev op={} ber={} ec={} failures={failures}",
            pct(worst[0]),
            pct(worst[1]),
            pct(worst[2])
        ));

        // Floors and saturation between 70 and 80 dB.
        let mut tail_vals = Vec::new();
        for (link, &db) in tails.iter().zip(&FLOOR_SNRS) {
            tail_vals.push([
                outage_probability(gamma_th, link).map_err(ctx(db))?.value,
                avg_ber(&modulation, link).map_err(ctx(db))?.value,
                ergodic_capacity(link).map_err(ctx(db))?.value,
            ]);
        }
        let (lo, hi) = (tail_vals[0], tail_vals[1]);
        let rel = |a: f64, b: f64| ((b - a) / a).abs();
        let flat = rel(lo[0], hi[0]) < 0.05 && rel(lo[1], hi[1]) < 0.05 && hi[2] - lo[2] < 0.01;
        report.push(format!(
            "floor {label}: op70={} op80={} ({}) ber70={} ber80={} ({}) ec80-ec70={} flat={}",
            num(lo[0]),
            num(hi[0]),
            pct(rel(lo[0], hi[0])),
            num(lo[1]),
            num(hi[1]),
            pct(rel(lo[1], hi[1])),
            num(hi[2] - lo[2]),
            if flat { "yes" } else { "no" }
        ));

        // Which ceiling formula the saturated capacity matches.
        let top = &tails[1];
        let ec80 = hi[2];
        let candidates = [
            ("printed", capacity_ceiling(top)),
            ("derived", capacity_ceiling_derived(top)),
        ];
        let mut best: Option<(&str, f64)> = None;
        let mut parts = Vec::new();
        for (name, c) in candidates {
            match c {
                Ok(v) => {
                    let mis = rel(v, ec80);
                    parts.push(format!("{name}={} ({})", num(v), pct(mis)));
                    if mis <= CEILING_TOL && best.is_none_or(|(_, m)| mis < m) {
                        best = Some((name, mis));
                    }
                }
                Err(Error::NoFiniteCeiling { .. }) => parts.push(format!("{name}=none")),
                Err(e) => return Err(e.context(format!("{label} ceiling"))),
            }
        }
        let limit = capacity_limit(top).map_err(|e| e.context(format!("{label} capacity limit")))?;
        report.push(format!(
            "ceiling {label}: ec80={} {} limit={} ({}) winner={}",
            num(ec80),
            parts.join(" "),
            num(limit),
            pct(rel(limit, ec80)),
            best.map_or("none", |(n, _)| n)
        ));
    }
    report.push(format!("verdict: {}", if passed { "PASS" } else { "FAIL" }));
    Ok(Outcome { table, report, passed })
}
