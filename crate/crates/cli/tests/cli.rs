use std::path::Path;
use std::process::{Command, Output};

fn rfso(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rfso")).args(args).output().expect("rfso runs")
}

fn rfso_to(args: &[&str], out: &Path) -> String {
    let o = Command::new(env!("CARGO_BIN_EXE_rfso"))
        .args(args)
        .arg("-o")
        .arg(out)
        .output()
        .expect("rfso runs");
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    std::fs::read_to_string(out).unwrap()
}

fn data(csv: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn outage_sweep_with_monte_carlo() {
    let dir = tempfile::tempdir().unwrap();
    let csv = rfso_to(
        &[
            "sweep", "--preset", "table1", "--hpa", "sel", "--ibo-db", "8", "--ilr-db", "-15", "--snr-db", "0:60:5",
            "--metrics", "outage,montecarlo", "--samples", "2e4",
        ],
        &dir.path().join("s.csv"),
    );
    let (header, rows) = data(&csv);
    assert_eq!(header, ["snr_db", "op", "op_mc", "ber_mc", "ec_mc", "op_mc_ci", "ber_mc_ci", "ec_mc_ci"]);
    assert_eq!(rows.len(), 13);
    assert_eq!(rows[12][0], "60");
    for r in &rows {
        let op: f64 = r[1].parse().unwrap();
        let mc: f64 = r[2].parse().unwrap();
        assert!((0.0..=1.0).contains(&op) && (0.0..=1.0).contains(&mc));
    }
}

#[test]
fn ideal_hardware_ceiling() {
    let dir = tempfile::tempdir().unwrap();
    let csv = rfso_to(
        &["capacity", "--preset", "table1", "--hpa", "ideal", "--ilr-db", "-20", "--snr-db", "30"],
        &dir.path().join("c.csv"),
    );
    let (header, rows) = data(&csv);
    assert_eq!(rows.len(), 1);
    let col = header.iter().position(|h| h == "ec_ceiling_printed").unwrap();
    let v: f64 = rows[0][col].parse().unwrap();
    assert!((v - 0.5 * 101f64.log2()).abs() < 1e-12, "{v}");
    assert!((v - 3.3291).abs() < 1e-4);
}

#[test]
fn metadata_lines() {
    let o = rfso(&["outage", "--snr-db", "10", "--seed", "42"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let meta: Vec<&str> = text.lines().filter(|l| l.starts_with("# ")).collect();
    assert!(meta[0].starts_with("# rfso "));
    assert_eq!(meta[1], "# command: outage");
    let hash = meta[2].strip_prefix("# config_sha256: ").unwrap();
    assert_eq!(hash.len(), 64);
    assert!(hash.chars().all(|c| c.is_ascii_hexdigit()));
    assert_eq!(meta[3], "# seed: 42");
    // The summary goes to stderr when the CSV goes to stdout.
    assert!(String::from_utf8(o.stderr).unwrap().contains("outage: 1 rows"));
}

#[test]
fn invalid_config_exits_2_naming_the_field() {
    let o = rfso(&["outage", "--rho", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("`rho`"));

    let o = rfso(&["outage", "--snr-db", "10:0:5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("sweep"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"n_relays": 7, "bogus": 1}"#).unwrap();
    let o = rfso(&["outage", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bogus"));
}

#[test]
fn numerical_failure_exits_3() {
    // A valid but degenerate operating point the capacity bound cannot resolve.
    let o = rfso(&["capacity", "--snr-db", "-300"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("at -300 dB"));
}

#[test]
fn saved_config_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let a = rfso_to(
        &[
            "sweep", "--metrics", "outage,capacity,montecarlo", "--hpa", "twta", "--ibo-db", "5", "--snr-db", "10:30:10",
            "--samples", "1e4", "--seed", "9", "--save-config", cfg.to_str().unwrap(),
        ],
        &dir.path().join("a.csv"),
    );
    let b = rfso_to(&["sweep", "--config", cfg.to_str().unwrap()], &dir.path().join("b.csv"));
    assert_eq!(a, b);
    let saved: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&cfg).unwrap()).unwrap();
    assert_eq!(saved["hpa"], "twta");
    assert_eq!(saved["sim"]["seed"], 9);
}

#[test]
fn worker_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["montecarlo", "--snr-db", "0:20:10", "--samples", "3e4", "--seed", "5"];
    let one = rfso_to(&[&args[..], &["--workers", "1"]].concat(), &dir.path().join("1.csv"));
    let three = rfso_to(&[&args[..], &["--workers", "3"]].concat(), &dir.path().join("3.csv"));
    assert_eq!(one, three);
}

#[test]
fn balanced_receiver_via_none() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let csv = rfso_to(
        &["capacity", "--hpa", "ideal", "--ilr-db", "none", "--snr-db", "20", "--save-config", cfg.to_str().unwrap()],
        &dir.path().join("c.csv"),
    );
    let saved: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&cfg).unwrap()).unwrap();
    assert!(saved["ilr_db"].is_null());
    // No impairment at all: no finite ceiling.
    let (header, rows) = data(&csv);
    let col = header.iter().position(|h| h == "ec_limit").unwrap();
    assert_eq!(rows[0][col], "nan");
}
