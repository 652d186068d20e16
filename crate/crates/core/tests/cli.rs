use std::path::Path;
use std::process::{Command, Output};

fn spinboson(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinboson"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

fn csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn rates_dip_below_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rates.csv");
    let status = spinboson(&["rates", "--t-max", "5", "--stride", "1", "--out", out.to_str().unwrap()]);
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let (header, rows) = csv(&out);
    assert_eq!(header, spinboson::cli::RATES_HEADER);
    assert_eq!(rows.len(), 1001);
    let g1 = header.iter().position(|h| h == "gamma1").unwrap();
    assert!(rows.iter().any(|r| r[g1] < 0.0));
    // omega0 t column
    assert!((rows[200][1] - 10.0 * rows[200][0]).abs() < 1e-9);
}

#[test]
fn evolve_without_coupling_keeps_coherence() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("evolve.csv");
    let status = spinboson(&["evolve", "--alpha", "0", "--out", out.to_str().unwrap()]);
    assert!(status.status.success());
    let (header, rows) = csv(&out);
    assert_eq!(header, spinboson::cli::EVOLVE_HEADER);
    assert!(rows.iter().all(|r| r[3] == 0.5 && r[5] == 0.5));
}

#[test]
fn numbers_carry_twelve_significant_digits() {
    let out = spinboson(&["rates", "--t-max", "0.1", "--stride", "5"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for field in text.lines().nth(2).unwrap().split(',') {
        let mantissa = field.split('e').next().unwrap().trim_start_matches('-');
        assert_eq!(mantissa.replace('.', "").len(), 12, "{field}");
    }
}

#[test]
fn unravel_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, workers: &str| {
        let path = dir.path().join(name);
        let args = [
            "unravel",
            "--n-traj",
            "2000",
            "--t-max",
            "1",
            "--seed",
            "42",
            "--workers",
            workers,
            "--out",
            path.to_str().unwrap(),
        ];
        assert!(spinboson(&args).status.success());
        std::fs::read(path).unwrap()
    };
    let a = run("a.csv", "1");
    assert_eq!(a, run("b.csv", "1"));
    assert_eq!(a, run("c.csv", "4"));
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().next().unwrap(), spinboson::cli::UNRAVEL_HEADER.join(","));
}

#[test]
fn recoherence_map_rows() {
    let out = spinboson(&[
        "recoherence-map",
        "--t-max",
        "1",
        "--ratio-steps",
        "3",
        "--ratio-max",
        "0.4",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "t,omega0_t,epsilon_over_delta,in_region");
    // 21 times for each of 3 ratios
    assert_eq!(rows.len(), 1 + 63);
    assert!(rows[1..].iter().all(|r| r.ends_with(",0") || r.ends_with(",1")));
    assert!(rows[1..].iter().any(|r| r.ends_with(",1")));
}

#[test]
fn blp_prints_measure() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("blp.csv");
    let result = spinboson(&[
        "blp",
        "--t-max",
        "5",
        "--ratio-steps",
        "2",
        "--ratio-max",
        "0.3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success());
    let stdout = String::from_utf8(result.stdout).unwrap();
    assert!(stdout.starts_with("blp_measure at epsilon_over_delta = "), "{stdout}");
    let (header, rows) = csv(&out);
    assert_eq!(header, spinboson::cli::BLP_HEADER);
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r[1] > 0.0));
}

#[test]
fn config_file_and_print_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "alpha = 0.02\nt_max = 3\nseed = 8\n").unwrap();
    let out = spinboson(&[
        "evolve",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "9",
        "--print-config",
    ]);
    assert!(out.status.success());
    let effective = String::from_utf8(out.stdout).unwrap();
    assert!(
        effective.contains("alpha = 0.02\n") && effective.contains("seed = 9\n") && effective.contains("t_max = 3\n")
    );
    // re-emitting the emitted configuration changes nothing
    let again = dir.path().join("again.cfg");
    std::fs::write(&again, &effective).unwrap();
    let out = spinboson(&["evolve", "--config", again.to_str().unwrap(), "--print-config"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), effective);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| spinboson(args).status.code().unwrap();
    assert_eq!(code(&["rates", "--t-max", "0.1"]), 0);
    assert_eq!(code(&["rates", "--alpha", "-1"]), 2);
    assert_eq!(code(&["rates", "--t-max", "1", "--dt", "0.3"]), 2);
    assert_eq!(code(&["unravel", "--n-traj", "10"]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
    assert_eq!(code(&["rates", "--config", "/nonexistent/run.cfg"]), 2);
    // a step far beyond the rate bound is a numerical failure
    assert_eq!(
        code(&["unravel", "--alpha", "20", "--t-max", "1", "--dt", "0.5", "--n-traj", "100"]),
        3
    );
    let err = spinboson(&["rates", "--omega0-over-omegac", "-3"]);
    assert!(String::from_utf8_lossy(&err.stderr).contains("omega0_over_omegac"));
}
