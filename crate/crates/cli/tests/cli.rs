use std::path::PathBuf;
use std::process::{Command, Output};

fn foxh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_foxh"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// CSV rows below the `#` manifest.
fn body(text: &str) -> Vec<Vec<String>> {
    let csv: String = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect();
    csv::Reader::from_reader(csv.as_bytes())
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect()
}

fn temp_file(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("foxh-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn gamma_demo_prints_the_erlang_value() {
    let o = foxh(&["sum-pdf", "--demo", "gamma2x2", "--x", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text
        .lines()
        .next()
        .unwrap()
        .ends_with("sum-pdf --demo gamma2x2 --x 2"));
    let rows = body(&text);
    let v: f64 = rows[0][1].parse().unwrap();
    // x³e^{-x}/3! at x = 2
    let want = 8.0 * (-2.0f64).exp() / 6.0;
    assert!((v - want).abs() < 1e-8 * want, "{v}");
}

#[test]
fn unknown_config_key_exits_with_two() {
    let cfg = temp_file("bad.toml", "[sweep]\ngamma_th = 6\n");
    let o = foxh(&["outage", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
}

#[test]
fn malformed_grid_exits_with_two() {
    let o = foxh(&["outage", "--gamma0-db-range", "10:0:1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn descriptor_dump_round_trips() {
    let cfg = temp_file(
        "one.toml",
        "[[element]]\nk1 = 2.0\nk2 = 0.5\nphase_bits = 2\n",
    );
    let o = foxh(&[
        "dump-descriptor",
        "--check",
        "--config",
        cfg.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("foxh-density 1"));
}

#[test]
fn outage_sweep_writes_one_row_per_grid_point() {
    let out = temp_file("outage.csv", "");
    let o = foxh(&[
        "outage",
        "--gamma0-db-range",
        "0:20:10",
        "--gamma-th-db",
        "6",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("# parameters:"));
    let rows = body(&text);
    assert_eq!(rows.len(), 3);
    let p: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(p[0] > p[1] && p[1] > p[2]);
    // one K = 1 element at 10 dB
    assert!((p[1] - 0.446_335_113_8).abs() < 1e-8);
}

#[test]
fn simulation_replays_with_the_same_seed() {
    let args = [
        "simulate",
        "--gamma0-db-range",
        "0:10:10",
        "--trials",
        "20000",
        "--seed",
        "4",
    ];
    let a = body(&stdout(&foxh(&args)));
    let b = body(&stdout(&foxh(&args)));
    assert_eq!(a, b);
    assert_eq!(a.len(), 4);
}
