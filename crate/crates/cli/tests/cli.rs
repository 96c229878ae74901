use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use qwalk_povm::protocols::sic::SicSpec;
use qwalk_povm::protocols::usd::{UsdInput, UsdSpec};
use qwalk_povm::{kraus_from_walk, povm_from_kraus, WalkSpec};
use serde_json::Value;
use tempfile::TempDir;

fn qwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qwalk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = qwalk(args);
    assert!(
        out.status.success(),
        "qwalk {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn table(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn record(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("result.json")).unwrap()).unwrap()
}

/// Table probabilities against `⟨ψ|E_x|ψ⟩` from the extracted POVM.
fn assert_matches_povm(rows: &[Vec<String>], spec: &WalkSpec) {
    let povm = povm_from_kraus(&kraus_from_walk(spec.schedule(), spec.steps(), 0));
    let psi = spec.initial_coin();
    for e in &povm {
        let expected = e.probability(&psi);
        let row = rows.iter().find(|r| r[0] == e.position.to_string());
        match row {
            Some(r) => {
                let p: f64 = r[1].parse().unwrap();
                assert!(
                    (p - expected).abs() < 5e-7,
                    "site {}: {p} vs {expected}",
                    e.position
                );
            }
            None => assert!(expected < 1e-10, "site {} missing", e.position),
        }
    }
}

#[test]
fn usd_table_at_45_degrees() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    ok(&["usd", "--phi", "45", "--input", "plus", "--out", out]);
    let rows = table(&dir.path().join("distribution.csv"));
    assert!(rows.contains(&vec!["1".into(), "0.292893".into()]));
    assert!(rows.contains(&vec!["3".into(), "0.707107".into()]));
    let spec = UsdSpec::new(45.0, UsdInput::Plus)
        .unwrap()
        .walk_spec()
        .unwrap();
    assert_matches_povm(&rows, &spec);
    let rec = record(dir.path());
    assert!(rec["derived"]["povm_residual"].as_f64().unwrap() < 1e-10);
}

#[test]
fn usd_orthogonal_states_are_never_inconclusive() {
    let dir = TempDir::new().unwrap();
    ok(&[
        "usd",
        "--phi",
        "90",
        "--input",
        "plus",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(record(dir.path())["derived"]["eta_err"].as_f64(), Some(0.0));
}

#[test]
fn sic_tables_agree_with_povm() {
    for i in 1..=4 {
        let dir = TempDir::new().unwrap();
        ok(&[
            "sic",
            "--input",
            &i.to_string(),
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        let rows = table(&dir.path().join("distribution.csv"));
        assert_eq!(rows.len(), 4);
        assert_matches_povm(&rows, &SicSpec::new(i).unwrap().walk_spec());
        if i == 1 {
            let expected: Vec<Vec<String>> = [
                ("0", "0.333333"),
                ("2", "0.333333"),
                ("4", "0.333333"),
                ("6", "0.000000"),
            ]
            .iter()
            .map(|(x, p)| vec![x.to_string(), p.to_string()])
            .collect();
            assert_eq!(rows, expected);
        }
    }
}

#[test]
fn sweep_theory_column_is_cosine() {
    let dir = TempDir::new().unwrap();
    ok(&[
        "sweep",
        "--start",
        "45",
        "--stop",
        "90",
        "--step",
        "9",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let rows = table(&dir.path().join("sweep.csv"));
    let theory: Vec<&str> = rows.iter().map(|r| r[1].as_str()).collect();
    assert_eq!(
        theory,
        ["0.707107", "0.587785", "0.453990", "0.309017", "0.156434", "0.000000"]
    );

    let single = TempDir::new().unwrap();
    ok(&[
        "sweep",
        "--start",
        "30",
        "--stop",
        "30",
        "--out",
        single.path().to_str().unwrap(),
    ]);
    assert_eq!(table(&single.path().join("sweep.csv")).len(), 1);

    let fine = TempDir::new().unwrap();
    ok(&[
        "sweep",
        "--start",
        "45",
        "--stop",
        "90",
        "--out",
        fine.path().to_str().unwrap(),
    ]);
    let values: Vec<f64> = table(&fine.path().join("sweep.csv"))
        .iter()
        .map(|r| r[1].parse().unwrap())
        .collect();
    assert!(values.len() >= 46);
    assert!(values.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn empty_sweep_is_an_error() {
    let dir = TempDir::new().unwrap();
    let out = qwalk(&[
        "sweep",
        "--start",
        "60",
        "--stop",
        "50",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty"));
}

#[test]
fn echoed_config_reproduces_the_run() {
    let first = TempDir::new().unwrap();
    let out = first.path().to_str().unwrap();
    ok(&[
        "noise",
        "--protocol",
        "sic",
        "--input",
        "3",
        "--trials",
        "20",
        "--seed",
        "17",
        "--out",
        out,
    ]);
    let rec = record(first.path());
    let echoed: toml::Value =
        toml::from_str(&fs::read_to_string(first.path().join("config.toml")).unwrap()).unwrap();
    assert_eq!(
        serde_json::to_value(&echoed).unwrap()["protocol"],
        rec["config"]["protocol"]
    );
    let before = fs::read(first.path().join("result.json")).unwrap();
    let trials_before = fs::read(first.path().join("trials.csv")).unwrap();

    // rerun from the echoed file alone
    let config = first.path().join("config.toml");
    ok(&["--config", config.to_str().unwrap()]);
    assert_eq!(fs::read(first.path().join("result.json")).unwrap(), before);
    assert_eq!(
        fs::read(first.path().join("trials.csv")).unwrap(),
        trials_before
    );
    assert_eq!(rec["seed"].as_u64(), Some(17));
    assert_eq!(rec["derived"]["trials"].as_u64(), Some(20));
}

#[test]
fn flags_override_config_values() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("exp.toml");
    fs::write(
        &cfg,
        "command = \"usd\"\nseed = 3\n[protocol]\nkind = \"usd\"\nphi = 45.0\ninput = \"plus\"\n",
    )
    .unwrap();
    let out = dir.path().join("run");
    ok(&[
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "usd",
        "--phi",
        "60",
    ]);
    let rec = record(&out);
    assert_eq!(rec["config"]["protocol"]["phi"].as_f64(), Some(60.0));
    assert_eq!(rec["seed"].as_u64(), Some(3));
    assert!((rec["derived"]["eta_err"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn malformed_config_reports_location() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(
        &cfg,
        "command = \"usd\"\n[protocol]\nkind = \"usd\"\nphi = \"wide\"\ninput = \"plus\"\n",
    )
    .unwrap();
    let out = qwalk(&["--config", cfg.to_str().unwrap()]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 4"), "{err}");

    fs::write(&cfg, "comand = \"usd\"\n").unwrap();
    let out = qwalk(&["--config", cfg.to_str().unwrap()]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 1") && err.contains("comand"), "{err}");
}

#[test]
fn domain_errors_pass_through() {
    let dir = TempDir::new().unwrap();
    let out = qwalk(&[
        "usd",
        "--phi",
        "95",
        "--input",
        "plus",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("phi must lie in"));
    let out = qwalk(&["sic", "--input", "7", "--out", dir.path().to_str().unwrap()]);
    assert!(!out.status.success());
}

#[test]
fn compile_and_extract_outputs() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    ok(&[
        "compile",
        "--protocol",
        "usd",
        "--phi",
        "45",
        "--input",
        "minus",
        "--out",
        out,
    ]);
    let plan = fs::read_to_string(dir.path().join("plan.csv")).unwrap();
    assert!(plan.starts_with("step,modes,kind,angle_deg\n"));
    assert!(
        plan.contains("2,1,HWP,12.24") || plan.contains("2,1,HWP,12.23"),
        "{plan}"
    );

    ok(&[
        "extract-povm",
        "--protocol",
        "sic",
        "--input",
        "1",
        "--out",
        out,
    ]);
    let rec = record(dir.path());
    assert!(rec["derived"]["completeness_defect"].as_f64().unwrap() < 1e-10);
    let rows = table(&dir.path().join("povm.csv"));
    assert_eq!(rows.len(), 7);
}

#[test]
fn custom_walk_from_file() {
    let dir = TempDir::new().unwrap();
    let walk = dir.path().join("walk.json");
    let spec = SicSpec::new(4).unwrap().walk_spec();
    fs::write(&walk, serde_json::to_string(&spec).unwrap()).unwrap();
    let out = dir.path().join("run");
    ok(&[
        "simulate",
        "--walk",
        walk.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    let rows = table(&out.join("distribution.csv"));
    assert_matches_povm(&rows, &spec);
}

#[test]
fn tomography_rows_from_csv() {
    let dir = TempDir::new().unwrap();
    let rows = dir.path().join("rows.csv");
    fs::write(
        &rows,
        "p0,p2,p4,p6\n0.3246,0.3277,0.3327,0.0149\n0.3398,0.3135,0.0345,0.3123\n0.0335,0.3137,0.3432,0.3104\n0.3158,0.0329,0.3419,0.3094\n",
    )
    .unwrap();
    let out = dir.path().join("run");
    ok(&[
        "tomography",
        "--rows",
        rows.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    let fidelities: Vec<f64> = record(&out)["derived"]["fidelities"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    for (f, want) in fidelities.iter().zip([0.9701, 0.9311, 0.9330, 0.9342]) {
        assert!((f - want).abs() < 5e-3);
    }
    let lines = table(&out.join("tomography.csv"));
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0].len(), 10);
}

#[test]
fn noisy_simulation_records_counts() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    ok(&[
        "usd", "--phi", "63", "--input", "minus", "--counts", "10000", "--seed", "5", "--out", out,
    ]);
    let rec = record(dir.path());
    assert!(rec["counts"].is_object());
    assert!(rec["distance"].as_f64().unwrap() < 0.05);
    let rows = table(&dir.path().join("distribution.csv"));
    assert!(rows.iter().all(|r| r.len() == 3));
}
