use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sw-semigroup"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn run_config(cmd: &str, config: &str, extra: &[&str], out: &Path) -> Output {
    let path = configs().join(config);
    let mut args = vec![cmd, "--config", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args, out)
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<f64>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("run.toml");
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn missing_config_is_a_validation_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&["simulate", "--config", "/nonexistent/run.toml"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/run.toml"));
}

#[test]
fn bad_flags_and_keys_are_validation_failures() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_config("simulate", "scalar_mv.toml", &["--method", "gauss"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let text = std::fs::read_to_string(configs().join("scalar_mv.toml")).unwrap() + "\nunknown = 1\n";
    let cfg = write_config(tmp.path(), &text);
    let out = run(&["simulate", "--config", cfg.to_str().unwrap()], &tmp.path().join("o"));
    assert_eq!(out.status.code(), Some(2));
    let out = run_config("simulate", "scalar_mv.toml", &["--step", "0.003"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let out = run_config("neutral-compare", "scalar_mv.toml", &[], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unperturbed_scalar_orbit_is_the_exponential() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_config("simulate", "scalar_unperturbed.toml", &[], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&tmp.path().join("orbit.csv"));
    assert_eq!(rows.len(), 101);
    for r in rows {
        assert!((r[2] - (-r[0]).exp()).abs() <= 1e-8);
        assert_eq!(r[1], r[2].abs());
    }
    let m = json(&tmp.path().join("manifest.json"));
    assert_eq!(m["status"], "ok");
    assert_eq!(m["step"], 0.001);
    assert!(tmp.path().join("timing.json").exists());
}

#[test]
fn neumann_on_an_expansion_fails_numerically() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_config(
        "simulate",
        "scalar_violation.toml",
        &["--method", "neumann"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    let m = json(&tmp.path().join("manifest.json"));
    assert_eq!(m["status"], "failed");
    assert!(m["error"].as_str().unwrap().contains("contraction"));
    // the direct solve still works
    let out = run_config("simulate", "scalar_violation.toml", &[], &tmp.path().join("direct"));
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn miyadera_voigt_report() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(
        run_config("admissibility", "scalar_mv.toml", &[], tmp.path())
            .status
            .code(),
        Some(0)
    );
    let r = json(&tmp.path().join("admissibility_report.json"));
    let q = r["constants"]["q_est"].as_f64().unwrap();
    assert!((q - 0.5).abs() < 1e-3, "{q}");
    assert_eq!(r["miyadera_voigt"]["verdict"], "PASS");
    assert_eq!(r["constants"]["schema_version"], 1);
}

#[test]
fn contraction_violation_report() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(
        run_config("admissibility", "scalar_violation.toml", &[], tmp.path())
            .status
            .code(),
        Some(0)
    );
    let r = json(&tmp.path().join("admissibility_report.json"));
    assert!(r["constants"]["io_norm_est"].as_f64().unwrap() > 1.0);
    let v = r["constants"]["verdicts"].as_array().unwrap();
    let io = v.iter().find(|c| c["condition"] == "io_contraction").unwrap();
    assert_eq!(io["verdict"], "FAIL");
}

#[test]
fn zero_control_has_zero_control_constants() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(
        run_config("admissibility", "scalar_zero_control.toml", &[], tmp.path())
            .status
            .code(),
        Some(0)
    );
    let c = &json(&tmp.path().join("admissibility_report.json"))["constants"];
    for key in ["m_b_est", "m_bc_est", "io_norm_est"] {
        assert_eq!(c[key], 0.0, "{key}");
    }
}

#[test]
fn desch_schappacher_report() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(
        run_config("admissibility", "bounded_2x2.toml", &[], tmp.path())
            .status
            .code(),
        Some(0)
    );
    let d = &json(&tmp.path().join("admissibility_report.json"))["desch_schappacher"];
    assert_eq!(d["verdict"], "PASS");
    assert_eq!(d["traces"][0]["term_norms"].as_array().unwrap().len(), 21);
}

#[test]
fn stable_family_passes_everything() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(
        run_config("asymptotics", "scalar_family.toml", &[], tmp.path())
            .status
            .code(),
        Some(0)
    );
    let r = json(&tmp.path().join("asymptotics_report.json"));
    assert_eq!(r["probes"], 7);
    for p in r["properties"].as_array().unwrap() {
        for o in p["outcomes"].as_array().unwrap() {
            assert_eq!(o["base"]["verdict"], "PASS", "{}", p["property"]);
            assert_eq!(o["perturbed"]["verdict"], "PASS", "{}", p["property"]);
        }
    }
    let rows = csv_rows(&tmp.path().join("plot_data.csv"));
    assert_eq!(rows.len(), 7 * 801);
}

#[test]
fn rotation_is_mean_ergodic_but_not_strongly_stable() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(
        run_config("asymptotics", "rotation.toml", &[], tmp.path())
            .status
            .code(),
        Some(0)
    );
    let r = json(&tmp.path().join("asymptotics_report.json"));
    let props = r["properties"].as_array().unwrap();
    let find = |name: &str| props.iter().find(|p| p["property"] == name).unwrap();
    // the first probe lies in the rotation plane
    assert_eq!(find("STRONGLY_STABLE")["outcomes"][0]["base"]["verdict"], "FAIL");
    assert_eq!(find("STRONGLY_STABLE")["base_holds"], false);
    for o in find("MEAN_ERGODIC")["outcomes"].as_array().unwrap() {
        assert_eq!(o["base"]["verdict"], "PASS");
    }
    assert_eq!(find("BOUNDED")["robust"], true);
    assert_eq!(find("MEAN_ERGODIC")["robust"], true);
}

#[test]
fn empty_probe_list_is_a_validation_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(configs().join("scalar_family.toml"))
        .unwrap()
        .replace("random = 4\nstates = [[2.5], [-0.1]]", "random = 0\nbasis = false");
    let cfg = write_config(tmp.path(), &text);
    let out = run(
        &["asymptotics", "--config", cfg.to_str().unwrap()],
        &tmp.path().join("o"),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn neutral_simulation_writes_both_orbits() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(
        run_config("simulate", "neutral_scalar.toml", &[], tmp.path())
            .status
            .code(),
        Some(0)
    );
    let a = csv_rows(&tmp.path().join("orbit_formula.csv"));
    let b = csv_rows(&tmp.path().join("orbit_oracle.csv"));
    assert_eq!(a.len(), 161);
    assert_eq!(a[0].len(), 2 + 1 + 256);
    assert_eq!(a.len(), b.len());
    let s = &json(&tmp.path().join("manifest.json"))["summary"];
    assert!(s["max_deviation"].as_f64().unwrap() <= 1e-3);
    assert_eq!(s["compatible"], true);
}

#[test]
fn seed_changes_random_probes_only() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert_eq!(
        run_config("admissibility", "bounded_2x2.toml", &["--seed", "1"], &a)
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        run_config("admissibility", "bounded_2x2.toml", &["--seed", "2"], &b)
            .status
            .code(),
        Some(0)
    );
    let ra = json(&a.join("admissibility_report.json"));
    let rb = json(&b.join("admissibility_report.json"));
    assert_eq!(ra["seed"], 1);
    assert_ne!(ra["constants"]["m_bc_est"], rb["constants"]["m_bc_est"]);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for dir in [&a, &b] {
        assert_eq!(
            run_config("asymptotics", "rotation.toml", &["--seed", "11"], dir)
                .status
                .code(),
            Some(0)
        );
    }
    for f in ["asymptotics_report.json", "plot_data.csv"] {
        assert_eq!(
            std::fs::read(a.join(f)).unwrap(),
            std::fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
}
