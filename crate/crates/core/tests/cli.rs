use std::fs;
use std::path::Path;
use std::process::Command;

use tempfile::tempdir;

const BIN: &str = env!("CARGO_BIN_EXE_symdyn");

fn write_inputs(dir: &Path) {
    fs::write(dir.join("golden.json"), r#"{"schema":"symdyn.shift/1","k":2,"matrix":[[1,1],[1,0]]}"#).unwrap();
    fs::write(dir.join("full2.json"), r#"{"schema":"symdyn.shift/1","k":2,"matrix":[[1,1],[1,1]]}"#).unwrap();
    fs::write(dir.join("flip.json"), r#"{"schema":"symdyn.shift/1","k":2,"matrix":[[0,1],[1,0]]}"#).unwrap();
    fs::write(
        dir.join("ind.json"),
        r#"{"schema":"symdyn.potential/1","range":1,"values":[{"word":[0],"value":0.0},{"word":[1],"value":1.0}]}"#,
    )
    .unwrap();
}

fn run(dir: &Path, args: &[&str]) -> (i32, String) {
    let out = Command::new(BIN).current_dir(dir).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn value_of(stdout: &str, label: &str) -> f64 {
    let line = stdout.lines().find(|l| l.starts_with(label)).unwrap();
    line.split_whitespace().nth(1).unwrap().parse().unwrap()
}

#[test]
fn entropy_subcommand() {
    let d = tempdir().unwrap();
    write_inputs(d.path());
    let (code, out) = run(d.path(), &["entropy", "--beta", "2"]);
    assert_eq!(code, 0);
    assert!((value_of(&out, "log-beta") - 2f64.ln()).abs() < 1e-12);
    assert!(out.contains("(log 2)"));
    let (code, out) = run(d.path(), &["entropy", "--shift", "golden.json", "--method", "spectral"]);
    assert_eq!(code, 0);
    let spectral = value_of(&out, "spectral");
    assert!((spectral - 0.481212).abs() < 1e-6);
    let (_, out) = run(d.path(), &["entropy", "--shift", "golden.json", "--method", "words", "--n", "24"]);
    assert!((value_of(&out, "words") - spectral).abs() <= 0.03);
    assert_eq!(run(d.path(), &["entropy", "--beta", "0.9"]).0, 2);
    assert_eq!(run(d.path(), &["entropy", "--shift", "missing.json"]).0, 2);
    assert_eq!(run(d.path(), &["entropy", "--shift", "flip.json", "--method", "periodic"]).0, 3);
    assert_eq!(run(d.path(), &["entropy"]).0, 2);
}

#[test]
fn spectrum_subcommand() {
    let d = tempdir().unwrap();
    write_inputs(d.path());
    let (code, _) = run(d.path(), &["spectrum", "--shift", "golden.json", "--potential", "ind.json", "--points", "33", "--out", "s.csv"]);
    assert_eq!(code, 0);
    let csv = fs::read_to_string(d.path().join("s.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("a,psi,q_star"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            (v[0], v[1])
        })
        .collect();
    assert!(rows.len() >= 33);
    for t in rows.windows(3) {
        let lin = t[0].1 + (t[2].1 - t[0].1) * (t[1].0 - t[0].0) / (t[2].0 - t[0].0);
        assert!(t[1].1 - lin >= -1e-9);
    }
    assert!(d.path().join("s.csv.manifest.json").exists());
    let flip = ["spectrum", "--shift", "flip.json", "--potential", "ind.json", "--out", "f.csv"];
    assert_eq!(run(d.path(), &flip).0, 3);
    assert_eq!(run(d.path(), &["spectrum", "--shift", "golden.json", "--potential", "golden.json", "--out", "x.csv"]).0, 2);
}

#[test]
fn synthesize_classify_verify() {
    let d = tempdir().unwrap();
    write_inputs(d.path());
    let synth = ["synthesize", "--shift", "full2.json", "--potential", "ind.json", "--class", "I_NOT_QW", "--seed", "7", "--out", "o"];
    assert_eq!(run(d.path(), &synth).0, 0);
    for f in ["orbit.txt", "certificate.json", "manifest.json"] {
        assert!(fs::metadata(d.path().join("o").join(f)).unwrap().len() > 0, "{f}");
    }
    assert_eq!(run(d.path(), &["verify", "--orbit", "o"]).0, 0);
    let (code, table) = run(d.path(), &["classify", "--orbit", "o", "--out", "r.json"]);
    assert_eq!(code, 0);
    assert!(table.contains("self_upper_density_decreasing"));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(report["schema"], "symdyn.report/1");

    // a quarter of the stream certifies but cannot meet full-horizon thresholds
    fs::create_dir(d.path().join("t")).unwrap();
    let text = fs::read_to_string(d.path().join("o/orbit.txt")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    fs::write(d.path().join("t/orbit.txt"), lines[..lines.len() / 4].join("\n")).unwrap();
    fs::copy(d.path().join("o/certificate.json"), d.path().join("t/certificate.json")).unwrap();
    assert_eq!(run(d.path(), &["verify", "--orbit", "t"]).0, 5);

    let cert = fs::read_to_string(d.path().join("o/certificate.json")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&cert).unwrap();
    v["inf_entropy_over_k"] = serde_json::json!(0.69);
    fs::write(d.path().join("t/certificate.json"), serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(run(d.path(), &["verify", "--orbit", "t"]).0, 4);

    let bad = ["synthesize", "--shift", "full2.json", "--potential", "ind.json", "--class", "NOPE", "--out", "b"];
    assert_eq!(run(d.path(), &bad).0, 2);
    let flip = ["synthesize", "--shift", "flip.json", "--potential", "ind.json", "--class", "R_FULL_SUPPORT", "--out", "b"];
    assert_eq!(run(d.path(), &flip).0, 3);
    assert_eq!(run(d.path(), &["verify", "--orbit", "nowhere"]).0, 2);
}

#[test]
fn outputs_are_byte_identical() {
    let runs: Vec<_> = (0..2)
        .map(|_| {
            let d = tempdir().unwrap();
            write_inputs(d.path());
            let synth = ["synthesize", "--shift", "golden.json", "--potential", "ind.json", "--class", "V_NOT_W", "--seed", "3", "--horizon", "65536", "--prefix", "0100", "--out", "o"];
            assert_eq!(run(d.path(), &synth).0, 0);
            run(d.path(), &["spectrum", "--shift", "golden.json", "--potential", "ind.json", "--out", "s.csv"]);
            run(d.path(), &["classify", "--orbit", "o", "--out", "r.json"]);
            d
        })
        .collect();
    for f in ["o/orbit.txt", "o/certificate.json", "o/manifest.json", "s.csv", "s.csv.manifest.json", "r.json"] {
        let a = fs::read(runs[0].path().join(f)).unwrap();
        let b = fs::read(runs[1].path().join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
}
