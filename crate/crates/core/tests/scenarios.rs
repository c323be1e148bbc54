//! Scenario runner: catalog, strict parsing, exit codes, golden reports and
//! byte-identical artifacts.

use std::path::Path;
use std::process::Command;

use qmemsim::scenario::*;
use serde_json::Value;

/// Scenarios that finish in well under a second in an optimised build.
const CHEAP: [&str; 13] = [
    "certify_chain",
    "certify_counting",
    "certify_tv",
    "crib_backward_d2",
    "crib_forward_d2",
    "fig11_fid",
    "fig12_eit",
    "fig13_raman",
    "fig3_2pe_ratio2",
    "fig5_efficiency_compare",
    "fig6_inverted_lorentzian",
    "fig7_lorentzian",
    "fig8_shaded_area",
];

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qmemsim"))
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn catalog_names_its_figures() {
    let cat = list_scenarios();
    assert!(cat.len() >= 10);
    for e in &cat {
        assert!(!e.figure.is_empty(), "{}", e.name);
        assert!(!e.description.is_empty(), "{}", e.name);
    }
    for name in [
        "fig3_2pe_ratio2",
        "fig5_efficiency_compare",
        "fig6_inverted_lorentzian",
        "fig7_lorentzian",
        "fig8_shaded_area",
        "fig10_shome",
        "fig11_fid",
        "fig12_eit",
        "fig13_raman",
        "certify_counting",
        "certify_tv",
        "certify_chain",
    ] {
        assert!(cat.iter().any(|e| e.name == name), "{name} missing");
    }
    let out = bin().arg("--list").output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), cat.len());
}

#[test]
fn validate_only_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    for e in list_scenarios() {
        let out_dir = tmp.path().join(&e.name);
        let out = bin().args(["run", &e.name, "--validate-only", "--out"]).arg(&out_dir).output().unwrap();
        assert_eq!(out.status.code(), Some(0), "{}: {}", e.name, String::from_utf8_lossy(&out.stderr));
        assert!(!out_dir.exists());
    }
}

#[test]
fn unknown_keys_are_rejected() {
    let base = bundled("certify_tv").unwrap();
    assert!(parse_scenario(base).is_ok());
    let top = format!("colour = \"red\"\n{base}");
    assert!(matches!(parse_scenario(&top), Err(ScenarioError::Parse(_))));
    let nested = base.replace("task = \"tv\"", "task = \"tv\"\nextra = 1");
    assert!(matches!(parse_scenario(&nested), Err(ScenarioError::Parse(_))));
    let echo = bundled("crib_forward_d2").unwrap().replace("tau = 10.0", "tau = 10.0\ntua = 3.0");
    assert!(parse_scenario(&echo).is_err());
}

#[test]
fn sections_must_match_kind() {
    let mismatched = bundled("certify_tv").unwrap().replace("kind = \"certify\"", "kind = \"echo\"");
    assert!(matches!(parse_scenario(&mismatched), Err(ScenarioError::Validation(_))));
    let version = bundled("certify_tv").unwrap().replace("schema_version = 1", "schema_version = 7");
    assert!(matches!(parse_scenario(&version), Err(ScenarioError::Validation(_))));
    let negative = bundled("crib_forward_d2").unwrap().replace("d = 2.0", "d = -2.0");
    assert!(matches!(parse_scenario(&negative), Err(ScenarioError::Validation(_) | ScenarioError::Model(_))));
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let chain = |atoms: &str, n_max: usize| {
        format!(
            "schema_version = 1\nkind = \"certify\"\nname = \"chain\"\nfigure = \"test\"\n\n[certify]\ntask = \"chain\"\natoms = [{atoms}]\ndepths = [2.0]\nn_max = {n_max}\n"
        )
    };
    let code = |args: &[&str], path: &Path| {
        let out = bin().args(["run"]).arg(path).args(args).arg("--out").arg(tmp.path().join("o")).output().unwrap();
        (out.status.code().unwrap(), String::from_utf8(out.stderr).unwrap())
    };

    let ok = write(tmp.path(), "ok.toml", &chain("40", 40));
    assert_eq!(code(&[], &ok).0, 0);

    let bad = write(tmp.path(), "bad.toml", &format!("{}\nbogus = 1\n", chain("40", 40)));
    let (c, err) = code(&[], &bad);
    assert_eq!(c, 2);
    let json: Value = serde_json::from_str(err.trim()).unwrap();
    assert_eq!(json["error"]["code"], 2);
    assert_eq!(json["error"]["kind"], "parse");

    let missing = tmp.path().join("nope.toml");
    assert_eq!(code(&[], &missing).0, 2);
    assert_eq!(code(&["--grid-scale", "0"], &ok).0, 2);

    // the inverted chain of 200 atoms needs far more than 10 photons
    let overflow = write(tmp.path(), "overflow.toml", &chain("200", 10));
    let (c, err) = code(&[], &overflow);
    assert_eq!(c, 3, "{err}");
    let json: Value = serde_json::from_str(err.trim()).unwrap();
    assert_eq!(json["error"]["kind"], "convergence");

    // 10 atoms at d = 2 is a coarse chain: a warning, fatal only with --strict
    let coarse = write(tmp.path(), "coarse.toml", &chain("10", 40));
    let (c, err) = code(&[], &coarse);
    assert_eq!(c, 0);
    assert!(err.contains("warning"));
    assert_eq!(code(&["--strict"], &coarse).0, 4);
    assert_eq!(code(&["--strict", "--validate-only"], &coarse).0, 4);
}

/// Same shape and strings; numbers equal to 1e-9 relative.
fn assert_json_close(a: &Value, b: &Value, path: &str) {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64().unwrap(), y.as_f64().unwrap());
            assert!((x - y).abs() <= 1e-9 * x.abs().max(y.abs()), "{path}: {x} vs {y}");
        }
        (Value::Object(x), Value::Object(y)) => {
            let kx: Vec<_> = x.keys().collect();
            let ky: Vec<_> = y.keys().collect();
            assert_eq!(kx, ky, "{path}");
            for k in x.keys() {
                assert_json_close(&x[k], &y[k], &format!("{path}.{k}"));
            }
        }
        (Value::Array(x), Value::Array(y)) => {
            assert_eq!(x.len(), y.len(), "{path}");
            for (i, (p, q)) in x.iter().zip(y).enumerate() {
                assert_json_close(p, q, &format!("{path}[{i}]"));
            }
        }
        _ => assert_eq!(a, b, "{path}"),
    }
}

#[test]
fn reports_match_golden_files() {
    let tmp = tempfile::tempdir().unwrap();
    for name in ["certify_tv", "crib_forward_d2", "fig6_inverted_lorentzian"] {
        let out = tmp.path().join(name);
        run(Path::new(name), &RunOptions { out: Some(out.clone()), ..Default::default() }).unwrap();
        let got: Value = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
        let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.json"));
        let want: Value = serde_json::from_str(&std::fs::read_to_string(golden).unwrap()).unwrap();
        assert_json_close(&got, &want, name);
    }
}

#[test]
fn artifacts_have_the_documented_layout() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("fig5");
    run(Path::new("fig5_efficiency_compare.toml"), &RunOptions { out: Some(out.clone()), ..Default::default() }).unwrap();
    let sweep = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    let mut lines = sweep.lines();
    assert_eq!(lines.next().unwrap(), "d,2pe_analytic,crib_fwd_analytic,crib_bwd_analytic");
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 121);
    assert_eq!(rows[0][0], 0.0);
    assert_eq!(rows[120][0], 6.0);
    let peak = rows.iter().map(|r| r[2]).fold(0.0, f64::max);
    assert!((peak - 4.0 * (-2.0f64).exp()).abs() < 1e-15);

    let out = tmp.path().join("crib");
    run(Path::new("crib_forward_d2"), &RunOptions { out: Some(out.clone()), ..Default::default() }).unwrap();
    let traces = std::fs::read_to_string(out.join("traces.csv")).unwrap();
    assert!(traces.starts_with("field,t,re,im,intensity\n"));
    for field in ["input", "output", "control"] {
        assert!(traces.lines().any(|l| l.starts_with(&format!("{field},"))), "{field}");
    }
    let row = traces.lines().nth(1).unwrap();
    for x in row.split(',').skip(1) {
        // 17 significant digits round-trip exactly
        let v: f64 = x.parse().unwrap();
        assert_eq!(format_float(v), x);
    }
}

fn artifacts(name: &str, threads: usize) -> Vec<(String, String)> {
    let file = load_scenario(Path::new(name)).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    let outcome = pool.install(|| execute(&file, 1.0)).unwrap();
    let mut v = vec![];
    if !outcome.traces.is_empty() {
        v.push(("traces.csv".into(), traces_csv(&outcome.traces).unwrap()));
    }
    if let Some(s) = &outcome.sweep {
        v.push(("sweep.csv".into(), sweep_csv(s).unwrap()));
    }
    v
}

#[test]
fn csv_is_identical_across_runs_and_thread_counts() {
    let mut written = 0;
    for name in CHEAP {
        let one = artifacts(name, 1);
        written += one.len();
        assert_eq!(one, artifacts(name, 1), "{name}: repeated run");
        assert_eq!(one, artifacts(name, 4), "{name}: 1 vs 4 threads");
    }
    // only the counting checks have no CSV
    assert!(written >= CHEAP.len() - 1);
}
