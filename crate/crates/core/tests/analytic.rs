use rfso_core::analytic::*;
use rfso_core::fading::{gg_snr_pdf, rytov_to_alphabeta, OpticalConfig, PrsConfig};
use rfso_core::impairments::HpaModel;
use rfso_core::mcsim::{estimate_j, simulate, SimSpec};
use rfso_core::quad::{integrate_breakpoints, integrate_to_infinity, QuadOptions};
use rfso_core::sndr::{IqSpec, LinkConfig};
use rfso_core::units::db_to_linear;

fn table1(hpa: HpaModel, ilr_db: Option<f64>, snr_db: f64) -> LinkConfig {
    let snr = db_to_linear(snr_db);
    let (a, b) = rytov_to_alphabeta(0.16).unwrap();
    LinkConfig::new(
        PrsConfig::new(7, 7, 0.9, snr).unwrap(),
        OpticalConfig::from_mean_snr(a, b, snr).unwrap(),
        hpa,
        IqSpec::Ilr(ilr_db.map_or(0.0, db_to_linear)),
    )
    .unwrap()
}

fn sel8() -> HpaModel {
    HpaModel::sel(db_to_linear(8.0)).unwrap()
}

fn spec(n: u64, seed: u64) -> SimSpec {
    SimSpec {
        n_samples: n,
        seed,
        ..SimSpec::default()
    }
}

fn agrees(closed: f64, mc: f64, se: f64) -> bool {
    (closed - mc).abs() <= (4.0 * se).max(0.02 * closed.abs())
}

#[test]
fn classical_fixed_gain_outage_matches_quadrature() {
    // IDEAL hardware, ILR = 0, one relay: Pr[γ₁γ₂/(γ₂ + γ̄₁ + 1) < γ_th].
    let snr = 10.0;
    let optical = OpticalConfig::from_mean_snr(4.0, 1.9, snr).unwrap();
    let cfg = LinkConfig::new(
        PrsConfig::new(1, 1, 0.5, snr).unwrap(),
        optical,
        HpaModel::ideal(),
        IqSpec::Ilr(0.0),
    )
    .unwrap();
    let mu = optical.mean_electrical_snr();
    for &gth in &[0.5, 2.0, 10.0] {
        let f = |g2: f64| {
            if g2 <= 0.0 {
                return 0.0;
            }
            -(-gth * (g2 + snr + 1.0) / (g2 * snr)).exp_m1() * gg_snr_pdf(g2, &optical)
        };
        let pts: Vec<f64> = [0.0, 0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0].iter().map(|x| x * mu).collect();
        let opts = QuadOptions::new(1e-14, 1e-12);
        let want = integrate_breakpoints(f, &pts, opts).unwrap().value
            + integrate_to_infinity(f, 20.0 * mu, 20.0 * mu, opts).unwrap().value;
        let got = outage_probability(gth, &cfg).unwrap().value;
        assert!(((got - want) / want).abs() < 1e-7, "gth {gth}: {got} vs {want}");
    }
    let mc = simulate(&cfg, 2.0, &ModulationSpec::bpsk(), &spec(1_000_000, 1)).unwrap();
    assert!(agrees(outage_probability(2.0, &cfg).unwrap().value, mc.op.mean, mc.op.std_error));
}

#[test]
fn closed_forms_match_monte_carlo() {
    let bpsk = ModulationSpec::bpsk();
    for (hpa, ilr_db) in [
        (sel8(), Some(-15.0)),
        (HpaModel::twta(db_to_linear(5.0)).unwrap(), Some(-15.0)),
        (HpaModel::ideal(), None),
    ] {
        for snr_db in [10.0, 20.0, 30.0] {
            let cfg = table1(hpa, ilr_db, snr_db);
            let mc = simulate(&cfg, 10.0, &bpsk, &spec(500_000, 9)).unwrap();
            let op = outage_probability(10.0, &cfg).unwrap().value;
            let ber = avg_ber(&bpsk, &cfg).unwrap().value;
            let ec = ergodic_capacity(&cfg).unwrap().value;
            let tag = format!("{:?} {snr_db} dB", hpa.kind());
            assert!(agrees(op, mc.op.mean, mc.op.std_error), "{tag} OP {op} vs {:?}", mc.op);
            assert!(agrees(ber, mc.ber.mean, mc.ber.std_error), "{tag} BER {ber} vs {:?}", mc.ber);
            assert!(agrees(ec, mc.ec.mean, mc.ec.std_error), "{tag} EC {ec} vs {:?}", mc.ec);
        }
    }
}

#[test]
fn outage_reaches_one_at_inverse_ilr() {
    let cfg = table1(sel8(), Some(-15.0), 30.0);
    let top = 1.0 / cfg.ilr();
    let near = outage_probability(top * (1.0 - 1e-6), &cfg).unwrap().value;
    assert!(near > 1.0 - 1e-4, "{near}");
    assert_eq!(outage_probability(top, &cfg).unwrap().value, 1.0);
    let mut prev = 0.0;
    for i in 1..=20 {
        let op = outage_probability(top * i as f64 / 21.0, &cfg).unwrap().value;
        assert!(op >= prev);
        prev = op;
    }
}

#[test]
fn ideal_outage_slope_matches_diversity_gain() {
    // OP depends on γ̄/γ_th, so a low threshold places 20–30 dB in the asymptotic regime.
    let gth = db_to_linear(-30.0);
    for &(alpha, beta) in &[(4.0, 1.0), (4.0, 1.4), (14.11, 12.54)] {
        let cfg_at = |snr_db: f64| {
            let snr = db_to_linear(snr_db);
            LinkConfig::new(
                PrsConfig::new(7, 7, 0.9, snr).unwrap(),
                OpticalConfig::from_mean_snr(alpha, beta, snr).unwrap(),
                HpaModel::ideal(),
                IqSpec::Ilr(0.0),
            )
            .unwrap()
        };
        let lo = outage_probability(gth, &cfg_at(20.0)).unwrap().value;
        let hi = outage_probability(gth, &cfg_at(30.0)).unwrap().value;
        let slope = -(hi.log10() - lo.log10());
        let d = diversity_gain(alpha, beta);
        assert!(((slope - d) / d).abs() < 0.1, "alpha={alpha} beta={beta}: slope {slope} vs {d}");
    }
}

#[test]
fn ber_is_bounded_and_nonincreasing() {
    let bpsk = ModulationSpec::bpsk();
    let mut prev = 0.5;
    for snr_db in (0..=60).step_by(10) {
        let ber = avg_ber(&bpsk, &table1(sel8(), Some(-15.0), snr_db as f64)).unwrap().value;
        assert!((0.0..=0.5).contains(&ber));
        assert!(ber <= prev * (1.0 + 1e-9), "{snr_db} dB: {ber} > {prev}");
        prev = ber;
    }
}

#[test]
fn capacity_ordering_and_saturation() {
    for snr_db in [10.0, 20.0, 30.0, 40.0, 50.0] {
        let cfg = table1(sel8(), Some(-15.0), snr_db);
        let ec = ergodic_capacity(&cfg).unwrap().value;
        let ub = capacity_upper_bound(&cfg).unwrap();
        assert!(ec <= ub + 1e-9, "{snr_db} dB: {ec} > {ub}");
        assert!(ec <= capacity_limit(&cfg).unwrap() + 1e-9);
        assert!((capacity_approx(&cfg) - ec).abs() < 0.5);
    }
    let ideal = table1(HpaModel::ideal(), Some(-20.0), 30.0);
    assert!((capacity_ceiling(&ideal).unwrap() - 0.5 * 101f64.log2()).abs() < 1e-12);
}

#[test]
fn capacity_limit_is_reached() {
    for hpa in [sel8(), HpaModel::twta(db_to_linear(8.0)).unwrap()] {
        let cfg = table1(hpa, Some(-15.0), 80.0);
        let ec = ergodic_capacity(&cfg).unwrap().value;
        let lim = capacity_limit(&cfg).unwrap();
        assert!((ec - lim).abs() < 1e-3, "{:?}: {ec} vs {lim}", hpa.kind());
    }
}

#[test]
fn j_matches_two_dimensional_monte_carlo() {
    for snr_db in [10.0, 30.0] {
        let cfg = table1(sel8(), Some(-15.0), snr_db);
        let j = capacity_j(&cfg).unwrap();
        let mc = estimate_j(&cfg, &spec(2_000_000, 4)).unwrap();
        assert!(((j - mc.mean) / j).abs() < 0.01, "{snr_db} dB: {j} vs {:?}", mc);
    }
}

#[test]
fn invalid_inputs_are_rejected() {
    let cfg = table1(sel8(), Some(-15.0), 30.0);
    assert!(outage_probability(0.0, &cfg).is_err());
    assert!(outage_probability(f64::NAN, &cfg).is_err());
    assert!(ModulationSpec::new(0.5, -1.0, "x").is_err());
}
