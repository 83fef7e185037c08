use std::process::{Command, Output};

fn cifc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cifc")).args(args).output().expect("spawn cifc")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const PDC: &[&str] = &["--a", "0", "--b", "1.3", "--p1", "10", "--p2", "10"];

#[test]
fn classify_reports_pdc() {
    let o = cifc(&[&["classify"], PDC].concat());
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| row[header.iter().position(|h| *h == name).unwrap()];
    assert_eq!(col("pdc"), "true");
    assert_eq!(col("capacity_known"), "pdc");
    assert_eq!(col("margin_31b"), "2.41");
}

#[test]
fn z_channel_and_json() {
    let o = cifc(&["classify", "--b", "0", "--a", "1", "--p1", "1", "--p2", "1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["label"], "z-trivial");
}

#[test]
fn raw_channel_reduces_to_standard_form() {
    let o = cifc(&["classify", "--raw", "h11=2,h12=1,h21=0.5,h22=1,sigma1_sq=4,sigma2_sq=1,p1=10,p2=10"]);
    assert_eq!(o.status.code(), Some(0));
    let bad = cifc(&["classify", "--raw", "h11=0,p1=1,p2=1"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("degenerate direct link"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(cifc(&["classify", "--a", "1", "--b", "oops", "--p1", "1", "--p2", "1"]).status.code(), Some(2));
    assert_eq!(cifc(&["classify", "--a", "1", "--p1", "1", "--p2", "1"]).status.code(), Some(2));
    assert_eq!(cifc(&[&["region"], PDC, &["--ids", "nope"]].concat()).status.code(), Some(2));
    assert_eq!(cifc(&["verify", "--n", "0"]).status.code(), Some(2));
    assert_eq!(cifc(&["atlas", "--p", "10", "--resolution", "1"]).status.code(), Some(2));
}

#[test]
fn regime_mismatch_exits_three() {
    let o = cifc(&[&["region"], PDC, &["--ids", "bc-dms-deg"]].concat());
    assert_eq!(o.status.code(), Some(3));
    let o = cifc(&["gap", "--a", "0.3", "--b", "0.5", "--p1", "1", "--p2", "1", "--outer", "strong", "--inner", "best"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn region_output_is_deterministic() {
    let args = [&["region", "--fast"], PDC, &["--ids", "strong,e:costa1"]].concat();
    let first = cifc(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, cifc(&args).stdout);
    let text = stdout(&first);
    assert!(text.starts_with("# strong\nr1,r2"));
    assert!(text.contains("# e:costa1\nr1,r2,alpha"));
}

#[test]
fn region_files_and_config_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"a": "0", "b": 0.5, "p1": 10, "p2": 10, "ids": ["weak", "b"], "fast": true}"#).unwrap();
    let out = dir.path().join("regions");
    let o = cifc(&["region", "--config", cfg.to_str().unwrap(), "--b", "0.8", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let weak = std::fs::read_to_string(out.join("weak.csv")).unwrap();
    let b = std::fs::read_to_string(out.join("b.csv")).unwrap();
    assert!(weak.starts_with("r1,r2,alpha\n"));
    assert!(b.starts_with("r1,r2,alpha\n"));
    // b = 0.8 from the flag: receiver 2 alone gets C(T) - C(0.64 * 10 * 1) at full private power.
    let last: Vec<f64> = weak.lines().last().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    let expect = (1.0f64 + 6.4 + 10.0).log2() - (1.0f64 + 6.4).log2();
    assert!((last[1] - expect).abs() < 1e-9, "{last:?}");
}

#[test]
fn gap_on_pdc_channel_is_zero() {
    let o = cifc(&[&["gap", "--fast", "--format", "json"], PDC, &["--outer", "best", "--inner", "e:costa1"]].concat());
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["gap"]["additive"].as_f64().unwrap() <= 1e-4);
}

#[test]
fn atlas_csv_header_and_threads() {
    let o = Command::new(env!("CARGO_BIN_EXE_cifc"))
        .args(["atlas", "--p", "10", "--resolution", "5"])
        .env("CIFC_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("a_re,a_im,b,label,margin_5,margin_31a,margin_31b,gap\n"));
    assert_eq!(text.lines().count(), 26);
    let bad = Command::new(env!("CARGO_BIN_EXE_cifc")).args(["atlas", "--p", "10"]).env("CIFC_THREADS", "zero").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn s_slice_has_power_column() {
    let o = cifc(&["atlas", "--s-slice", "--resolution", "3", "--b-max", "30"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("p,a_re,a_im,b,label"));
}

#[test]
fn verify_small_suite_passes() {
    let o = cifc(&["verify", "--seed", "42", "--n", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 5);
}
