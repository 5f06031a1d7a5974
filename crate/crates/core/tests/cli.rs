use std::path::PathBuf;
use std::process::{Command, Output};

fn gmt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gmt"))
        .args(args)
        .env_remove("GMT_OUT_DIR")
        .output()
        .expect("run gmt")
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("gmt-cli-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn reform_prints_table() {
    let o = gmt(&["reform", "--tm", "0.15"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("95.6") && s.contains("-3.6") && s.contains("92.0"), "{s}");
}

#[test]
fn calibrate_json() {
    let o = gmt(&["calibrate", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["lambda_hat"].as_f64().unwrap() - 2.1).abs() < 0.05);
    assert!((v["delta_hat"].as_f64().unwrap() - 17.8).abs() < 0.2);
}

#[test]
fn unknown_field_is_named() {
    let d = scratch("bad");
    let f = d.join("params.json");
    std::fs::write(&f, r#"{"lambda": 2.1, "delta": 17.8, "H": 40, "phi": 0.9, "Pie": 4623}"#).unwrap();
    let o = gmt(&["solve", "--params", f.to_str().unwrap(), "--tm", "0.1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Pie"));
}

#[test]
fn invalid_value_is_rejected() {
    let d = scratch("phi");
    let f = d.join("params.json");
    std::fs::write(&f, r#"{"lambda": 2.1, "delta": 17.8, "H": 40, "phi": 1.4, "Pi": 4623}"#).unwrap();
    let o = gmt(&["solve", "--params", f.to_str().unwrap(), "--tm", "0.1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("phi"));
}

#[test]
fn verify_is_deterministic() {
    let a = gmt(&["verify", "--samples", "10", "--seed", "7"]);
    let b = gmt(&["verify", "--samples", "10", "--seed", "7"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn sweep_writes_one_file_per_coverage() {
    let d = scratch("sweep");
    let o = Command::new(env!("CARGO_BIN_EXE_gmt"))
        .args(["sweep", "--from", "0.1", "--to", "0.2", "--step", "0.01", "--phi", "0.5,1.0"])
        .env("GMT_OUT_DIR", &d)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for phi in ["0.500", "1.000"] {
        let body = std::fs::read_to_string(d.join(format!("sweep-phi{phi}.csv"))).unwrap();
        assert!(body.starts_with("t_M,regime,"));
        assert!(!body.contains('\r'));
        assert_eq!(body.lines().count(), 12);
    }
}
