//! End-to-end tests of the `canopy` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_canopy"));
    c.env_remove("CANOPY_MODELS");
    c
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn models_list_shows_registry() {
    let out = ok(&["models", "list"]);
    assert_eq!(out.lines().count(), 6);
    assert!(out.contains("mediterranean-forest,10.69,4.19,0.12,8.05"));
    let v: Value = serde_json::from_str(&ok(&["--format", "json", "models", "list"])).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 5);
}

#[test]
fn registry_override_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let reg = dir.path().join("models.json");
    fs::write(
        &reg,
        r#"[{"name": "flat", "pl_intercept_db": 40, "gamma": 2, "eta_db_per_m": 0, "sigma_sf_db": 1}]"#,
    )
    .unwrap();
    let out = bin().env("CANOPY_MODELS", &reg).args(["models", "list"]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("flat,40,2,0,1"));
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn simulate_is_reproducible_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    ok(&["--seed", "11", "--out-dir", s(&a), "simulate", "--nakagami", "0.64,32.27", "--workers", "1"]);
    ok(&["--seed", "11", "--out-dir", s(&b), "simulate", "--nakagami", "0.64,32.27", "--workers", "4"]);
    let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() >= 5);
    for n in names {
        assert_eq!(fs::read(a.join(&n)).unwrap(), fs::read(b.join(&n)).unwrap(), "{n:?}");
    }
}

#[test]
fn outputs_carry_seed_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    ok(&["--seed", "5", "--out-dir", s(&sim), "simulate"]);
    let fit = dir.path().join("fit");
    ok(&["--seed", "5", "--out-dir", s(&fit), "fit", s(&sim.join("trace.csv")), "--no-separation"]);
    for d in [&sim, &fit] {
        for e in fs::read_dir(d).unwrap() {
            let p = e.unwrap().path();
            let text = fs::read_to_string(&p).unwrap();
            match p.extension().and_then(|x| x.to_str()) {
                Some("csv") => {
                    assert!(text.starts_with("# seed: 5\n# config: {"), "{p:?}");
                }
                Some("json") => {
                    let v: Value = serde_json::from_str(&text).unwrap();
                    assert_eq!(v["seed"], 5, "{p:?}");
                    assert!(v["config"]["settings"].is_object(), "{p:?}");
                }
                _ => panic!("unexpected output {p:?}"),
            }
        }
    }
}

#[test]
fn fit_recovers_simulating_model() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    ok(&["--seed", "3", "--out-dir", s(&sim), "simulate"]);
    let fit = dir.path().join("fit");
    ok(&["--out-dir", s(&fit), "fit", s(&sim.join("trace.csv")), "--no-separation"]);
    let m = &json(&fit.join("model.json"))["model"];
    assert!((m["gamma"].as_f64().unwrap() - 4.19).abs() < 0.05, "{m}");
    assert!((m["eta_db_per_m"].as_f64().unwrap() - 0.12).abs() < 0.03, "{m}");
    // The fitted model is usable as `--model`.
    let sim2 = dir.path().join("sim2");
    ok(&["--model", s(&fit.join("model.json")), "--out-dir", s(&sim2), "simulate", s(&fixture("fixture_mission.json"))]);
    let rse = fs::read_to_string(fit.join("rse.csv")).unwrap();
    assert!(rse.lines().any(|l| l.starts_with("h_m,d_lo_m")));
}

#[test]
fn fit_errors_have_stable_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "").unwrap();
    let out = run(&["--out-dir", s(dir.path()), "fit", s(&empty)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty.csv"));

    let out = run(&["--out-dir", s(dir.path()), "fit", s(&fixture("single_height.csv"))]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("eta unidentifiable"));

    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "timestamp_s,d3d_m,h_m,rssi_dbm,snr_db\n0,100,10,-90,3\n4,x,10,-90,3\n").unwrap();
    let out = run(&["--out-dir", s(dir.path()), "fit", s(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn strict_radio_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("radio.json");
    fs::write(&cfg, r#"{"p_tx_dbm": 14, "gain": 3}"#).unwrap();
    let out = run(&["--radio-config", s(&cfg), "--out-dir", s(dir.path()), "simulate"]);
    assert_eq!(out.status.code(), Some(2));
    fs::write(&cfg, r#"{"sensitivity_dbm": -130}"#).unwrap();
    ok(&["--radio-config", s(&cfg), "--out-dir", s(dir.path()), "simulate", s(&fixture("fixture_mission.json"))]);
}

#[test]
fn compare_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    ok(&["--seed", "8", "--out-dir", s(&sim), "simulate", "--sigma-sf", "0"]);
    let trace = sim.join("trace.csv");

    let self_cmp = dir.path().join("self");
    ok(&["--out-dir", s(&self_cmp), "compare", s(&trace), "--models", "mediterranean-forest"]);
    let v = json(&self_cmp.join("comparison.json"));
    assert_eq!(v["comparisons"].as_array().unwrap().len(), 1);
    assert!(v["comparisons"][0]["median_abs_diff_db"].as_f64().unwrap() < 1e-9);

    let two = dir.path().join("two");
    let out = ok(&["--out-dir", s(&two), "compare", s(&trace), "--models", "3gpp-uma,3gpp-umi"]);
    assert_eq!(out.lines().count(), 3);
    let cdf = fs::read_to_string(two.join("comparison_cdf.csv")).unwrap();
    assert!(cdf.lines().any(|l| l == "model,diff_db,cdf"));

    let out = run(&["--out-dir", s(dir.path()), "compare", s(&trace), "--models", "nope"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn compare_ranks_bundled_model_first() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    ok(&["--seed", "9", "--out-dir", s(&sim), "simulate", "--nakagami", "0.64,32.27"]);
    let cmp = dir.path().join("cmp");
    ok(&["--out-dir", s(&cmp), "compare", s(&sim.join("trace.csv"))]);
    let v = json(&cmp.join("comparison.json"));
    let rows = v["comparisons"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    let best = rows
        .iter()
        .min_by(|a, b| {
            a["median_abs_diff_db"].as_f64().unwrap().total_cmp(&b["median_abs_diff_db"].as_f64().unwrap())
        })
        .unwrap();
    assert_eq!(best["model"], "mediterranean-forest");
}

#[test]
fn fading_reports() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["--out-dir", s(dir.path()), "fading", s(&fixture("nakagami_small_scale.csv"))]);
    let v = json(&dir.path().join("fading.json"));
    assert_eq!(v["best"]["family"], "nakagami");
    assert_eq!(v["worse_than_rayleigh"], true);
    for k in ["level_50_db", "level_99_db", "fade_depth_db", "max_fade_db"] {
        assert!(v["fade_depth"][k].is_f64(), "{k}");
    }
    let fit = json(&dir.path().join("fading_fit.json"));
    assert!(fit["params"]["mu"].is_f64());
    assert!(fit["n"].is_u64());

    let out = run(&["--out-dir", s(dir.path()), "fading", s(&fixture("constant_small_scale.csv"))]);
    assert_eq!(out.status.code(), Some(4));

    let few = dir.path().join("few.csv");
    fs::write(&few, "small_scale_db\n1.0\n-2.0\n3.5\n0.5\n-1.5\n").unwrap();
    let out = run(&["--out-dir", s(dir.path()), "fading", s(&few)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    assert_eq!(json(&dir.path().join("fade_depth.json"))["reliable"], false);
}

#[test]
fn fading_fit_feeds_simulation() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["--out-dir", s(dir.path()), "fading", s(&fixture("nakagami_small_scale.csv"))]);
    let sim = dir.path().join("sim");
    ok(&[
        "--out-dir",
        s(&sim),
        "simulate",
        s(&fixture("fixture_mission.json")),
        "--fading",
        s(&dir.path().join("fading.json")),
    ]);
    let ss = fs::read_to_string(sim.join("small_scale.csv")).unwrap();
    let row = ss.lines().find(|l| !l.starts_with('#') && !l.starts_with("timestamp")).unwrap();
    assert!(!row.ends_with(','), "envelope column filled: {row}");
}

#[test]
fn simulate_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.json");
    fs::write(&m, r#"{"heights_m": [10], "path": [[1, 0], [2, 0]], "speed_mps": -1}"#).unwrap();
    assert_eq!(run(&["--out-dir", s(dir.path()), "simulate", s(&m)]).status.code(), Some(2));
    fs::write(&m, "{not json").unwrap();
    assert_eq!(run(&["--out-dir", s(dir.path()), "simulate", s(&m)]).status.code(), Some(2));
}

#[test]
fn flat_model_two_heights_identical_rows() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("flat.json");
    fs::write(
        &model,
        r#"{"name": "flat", "pl_intercept_db": 10.69, "gamma": 4.19, "eta_db_per_m": 0, "sigma_sf_db": 8.05}"#,
    )
    .unwrap();
    // Receiver midway between the heights: identical d3d at both.
    let mission = dir.path().join("m.json");
    fs::write(
        &mission,
        r#"{"heights_m": [3, 30], "path": [[20, 0], [500, 0]], "speed_mps": 1, "h_rx_m": 16.5}"#,
    )
    .unwrap();
    let out = ok(&[
        "--model",
        s(&model),
        "--out-dir",
        s(dir.path()),
        "simulate",
        s(&mission),
        "--sub-seeding",
        "shared",
        "--nakagami",
        "0.64,32.27",
    ]);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    let tail = |r: &str| r.split_once(',').unwrap().1.to_string();
    assert_eq!(tail(rows[0]), tail(rows[1]));
}

#[test]
fn demo_mission_is_fast() {
    let dir = tempfile::tempdir().unwrap();
    let t = std::time::Instant::now();
    ok(&["--out-dir", s(dir.path()), "simulate", "--nakagami", "0.64,32.27"]);
    assert!(t.elapsed().as_secs_f64() < 5.0);
    let trace = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    let n = trace.lines().filter(|l| !l.starts_with('#')).count() - 1;
    assert!((9_000..=11_000).contains(&n), "{n}");
}

#[test]
fn plf_terms() {
    let dir = tempfile::tempdir().unwrap();
    let d = s(dir.path());
    let v: Value = serde_json::from_str(&ok(&["--out-dir", d, "--format", "json", "plf", "--tx", "0,1,0", "--rx", "0,1,0"])).unwrap();
    assert_eq!(v["plf_db"], 0.0);
    let v: Value = serde_json::from_str(&ok(&["--out-dir", d, "--format", "json", "plf", "--rx", "1,0,0"])).unwrap();
    assert!((v["plf_db"].as_f64().unwrap() + 1.249).abs() < 1e-3);
    let v: Value = serde_json::from_str(&ok(&[
        "--out-dir",
        d,
        "--format",
        "json",
        "plf",
        "--angular",
        s(&fixture("ramp_angular.csv")),
    ]))
    .unwrap();
    assert_eq!(v["g_rx_dbi"], -15.0);
    assert!(json(&dir.path().join("terms.json"))["seed"].is_u64());
    assert_eq!(run(&["--out-dir", d, "plf", "--rx", "1,0"]).status.code(), Some(2));
    assert_eq!(run(&["--out-dir", d, "plf", "--rx", "2,0,0"]).status.code(), Some(2));
}

#[test]
fn geo_schema_with_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(&["--out-dir", s(dir.path()), "compare", "--schema", "geo", s(&fixture("geo_log.csv"))]);
    assert_eq!(out.lines().count(), 6);
    let missing = dir.path().join("log.csv");
    fs::copy(fixture("geo_log.csv"), &missing).unwrap();
    assert_eq!(run(&["--out-dir", s(dir.path()), "compare", "--schema", "geo", s(&missing)]).status.code(), Some(2));
}

#[test]
fn plot_data_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    ok(&["--out-dir", s(&sim), "simulate"]);
    let fit = dir.path().join("fit");
    ok(&["--out-dir", s(&fit), "--format", "plot-data", "fit", s(&sim.join("trace.csv")), "--no-separation"]);
    assert!(fit.join("fit_curve.csv").exists());
    let fad = dir.path().join("fad");
    ok(&["--out-dir", s(&fad), "--format", "plot-data", "fading", s(&fixture("nakagami_small_scale.csv"))]);
    let pdf = fs::read_to_string(fad.join("envelope_pdf.csv")).unwrap();
    assert!(pdf.contains("envelope,rayleigh,nakagami,weibull,rician,log-logistic"));
}
