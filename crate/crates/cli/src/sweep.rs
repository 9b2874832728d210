//! Metric sweeps over the average SNR per hop.

use rfso_core::analytic::{
    avg_ber, capacity_approx, capacity_ceiling, capacity_ceiling_derived, capacity_limit, capacity_upper_bound,
    ergodic_capacity, outage_probability,
};
use rfso_core::error::{Error, Result};
use rfso_core::mcsim::{simulate_many, SimSpec};
use rfso_core::sndr::LinkConfig;

use crate::config::{Metric, RunConfig};
use crate::table::{num, snr, Table};

/// Column names in output order for the requested metrics.
pub fn columns(metrics: &[Metric]) -> Vec<String> {
    let has = |m| metrics.contains(&m);
    let mut cols = vec!["snr_db"];
    if has(Metric::Outage) {
        cols.push("op");
    }
    if has(Metric::Ber) {
        cols.push("ber");
    }
    if has(Metric::Capacity) {
        cols.push("ec");
    }
    if has(Metric::CapacityBound) {
        cols.extend(["ec_upper_bound", "ec_approx"]);
    }
    if has(Metric::CapacityCeiling) {
        cols.extend(["ec_ceiling_printed", "ec_ceiling_derived", "ec_limit"]);
    }
    if has(Metric::Montecarlo) {
        cols.extend(["op_mc", "ber_mc", "ec_mc", "op_mc_ci", "ber_mc_ci", "ec_mc_ci"]);
    }
    cols.into_iter().map(String::from).collect()
}

/// `Ok(NaN)` where the quantity has no finite value.
fn finite_or_nan(r: Result<f64>) -> Result<f64> {
    match r {
        Err(Error::NoFiniteCeiling { .. }) => Ok(f64::NAN),
        other => other,
    }
}

pub fn run(cfg: &RunConfig, links: &[LinkConfig], metrics: &[Metric]) -> Result<Table> {
    let points = cfg.sweep.points();
    let has = |m| metrics.contains(&m);
    let gamma_th = cfg.gamma_th();
    let modulation = cfg.modulation_spec().expect("validated modulation");
    let mc = if has(Metric::Montecarlo) {
        Some(simulate_many(links, gamma_th, &modulation, &SimSpec::from(cfg.sim)).map_err(|e| e.context("Monte Carlo"))?)
    } else {
        None
    };
    let mut table = Table::new(columns(metrics));
    for (i, (link, &db)) in links.iter().zip(&points).enumerate() {
        let at = |e: Error| e.context(format!("at {db} dB"));
        let mut row = vec![snr(db)];
        if has(Metric::Outage) {
            row.push(num(outage_probability(gamma_th, link).map_err(at)?.value));
        }
        if has(Metric::Ber) {
            row.push(num(avg_ber(&modulation, link).map_err(at)?.value));
        }
        if has(Metric::Capacity) {
            row.push(num(ergodic_capacity(link).map_err(at)?.value));
        }
        if has(Metric::CapacityBound) {
            row.push(num(capacity_upper_bound(link).map_err(at)?));
            row.push(num(capacity_approx(link)));
        }
        if has(Metric::CapacityCeiling) {
            row.push(num(finite_or_nan(capacity_ceiling(link)).map_err(at)?));
            row.push(num(finite_or_nan(capacity_ceiling_derived(link)).map_err(at)?));
            row.push(num(finite_or_nan(capacity_limit(link)).map_err(at)?));
        }
        if let Some(mc) = &mc {
            let r = &mc[i];
            row.extend([r.op.mean, r.ber.mean, r.ec.mean].map(num));
            row.extend([r.op.ci_halfwidth, r.ber.ci_halfwidth, r.ec.ci_halfwidth].map(num));
        }
        table.rows.push(row);
    }
    Ok(table)
}
