//! End-to-end tests driving the `specnorm` binary.

use std::path::Path;
use std::process::{Command, Output};

use specnorm_core::rng::stream_rng;
use specnorm_core::tensor::{io as tensor_io, outer_product, random_unit_vector};

fn specnorm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_specnorm"))
        .args(args)
        .env_remove("SPECNORM_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout_json(output: &Output) -> serde_json::Value {
    serde_json::from_slice(&output.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&output.stdout)
        )
    })
}

#[test]
fn bound_theorem1_prints_the_closed_form_value() {
    let out = specnorm(&[
        "bound", "--formula", "theorem1", "--shape", "10,10,10", "--sigma", "1", "--delta",
        "0.05",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    let value = report["value"].as_f64().unwrap();
    assert!((value - 26.003580861487825).abs() <= 1e-9, "got {value}");
    assert_eq!(report["formula_id"], "theorem1");
}

#[test]
fn bound_corollary1_below_threshold_exits_3() {
    let out = specnorm(&[
        "bound", "--formula", "corollary1", "--shape", "10,10,10", "--sigma", "1", "--delta",
        "0.05", "--m", "1",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let report = stdout_json(&out);
    let flags = report["validity_flags"].as_array().unwrap();
    assert!(flags[0].as_str().unwrap().contains("M below 2ln(2/delta)"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn estimate_recovers_a_stored_rank_one_scale() {
    let tmp = tempfile::tempdir().unwrap();
    let mut rng = stream_rng(5, &[0x70]);
    let tensor = outer_product(&[
        random_unit_vector(3, &mut rng),
        random_unit_vector(4, &mut rng),
        random_unit_vector(2, &mut rng),
    ])
    .unwrap()
    .scale(4.0)
    .unwrap();
    let path = tmp.path().join("rank_one.json");
    tensor_io::save_tensor(&tensor, &path).unwrap();

    let out = specnorm(&["estimate", "--input", path.to_str().unwrap(), "--restarts", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let result = stdout_json(&out);
    let lower = result["norm_lower"].as_f64().unwrap();
    assert!((lower - 4.0).abs() <= 1e-8, "got {lower}");
    assert_eq!(result["converged"], true);
}

#[test]
fn gen_is_deterministic_and_loadable() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a.json");
    let b = tmp.path().join("b.json");
    for path in [&a, &b] {
        let out = specnorm(&[
            "gen", "--shape", "4,4", "--law", "rademacher", "--sigma", "2", "--seed", "9",
            "--out", path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let tensor = tensor_io::load_tensor(&a).unwrap();
    assert!(tensor.entries().iter().all(|&e| e == 2.0 || e == -2.0));
}

#[test]
fn gen_accepts_a_model_file() {
    let tmp = tempfile::tempdir().unwrap();
    let model_path = tmp.path().join("model.json");
    std::fs::write(
        &model_path,
        r#"{"model":"sampling","m":5,"value_law":{"kind":"rademacher","sigma":1.0},"seed":3}"#,
    )
    .unwrap();
    let out_path = tmp.path().join("t.json");
    let out = specnorm(&[
        "gen", "--shape", "4,4,4", "--model-file", model_path.to_str().unwrap(), "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let tensor = tensor_io::load_tensor(&out_path).unwrap();
    assert_eq!(tensor.entries().iter().filter(|&&e| e != 0.0).count(), 5);
}

#[test]
fn usage_errors_exit_1() {
    let no_args = specnorm(&[]);
    assert_eq!(no_args.status.code(), Some(1));
    let unknown_flag = specnorm(&["bound", "--formula", "theorem1", "--bogus", "1"]);
    assert_eq!(unknown_flag.status.code(), Some(1));
    assert!(!unknown_flag.stderr.is_empty());
    let missing_arg = specnorm(&["bound", "--formula", "net_slack", "--epsilon", "0.1"]);
    assert_eq!(missing_arg.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing_arg.stderr).contains("--k"));
}

#[test]
fn help_exits_0() {
    let out = specnorm(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("estimate"));
}

#[test]
fn runtime_failures_exit_2() {
    let out = specnorm(&["estimate", "--input", "/nonexistent/tensor.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn tail_check_passes_for_the_gaussian_law() {
    let out = specnorm(&[
        "tail", "--shape", "4,4,4", "--trials", "2000", "--seed", "11", "--thresholds",
        "1,2,3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let result = stdout_json(&out);
    assert_eq!(result["all_ok"], true);
    assert_eq!(result["thresholds"].as_array().unwrap().len(), 3);
}

fn write_config(path: &Path, output_dir: Option<&Path>) {
    let mut text = String::from(
        r#"
version = 1
master_seed = 99
trials = 4
delta = 0.1
shapes = [[2, 2], [3, 3]]
deterministic_timing = true

[model]
model = "iid"
law = { kind = "gaussian", sigma = 1.0 }

[estimator]
restarts = 3
max_iters = 50
tol = 1e-9
"#,
    );
    if let Some(dir) = output_dir {
        text.push_str(&format!("output_dir = \"{}\"\n", dir.display()));
    }
    std::fs::write(path, text).unwrap();
}

#[test]
fn experiment_then_report_reproduces_identical_files() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("exp.toml");
    write_config(&config, None);
    let run_dir = tmp.path().join("run");
    let out = specnorm(&[
        "experiment",
        "--config",
        config.to_str().unwrap(),
        "--output-dir",
        run_dir.to_str().unwrap(),
        "--threads",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let result = stdout_json(&out);
    assert_eq!(result["records"], 8);
    assert_eq!(result["failed_trials"], 0);

    let rerender_dir = tmp.path().join("rerender");
    let records = run_dir.join("records.json");
    let out = specnorm(&[
        "report",
        "--records",
        records.to_str().unwrap(),
        "--output-dir",
        rerender_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for file in ["records.csv", "records.json", "summary.json", "plot.svg"] {
        assert_eq!(
            std::fs::read(run_dir.join(file)).unwrap(),
            std::fs::read(rerender_dir.join(file)).unwrap(),
            "{file} differs after re-render"
        );
    }
}

#[test]
fn output_dir_env_var_is_honored_and_flag_overrides_it() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("exp.toml");
    write_config(&config, None);
    let env_dir = tmp.path().join("from-env");
    let out = Command::new(env!("CARGO_BIN_EXE_specnorm"))
        .args(["experiment", "--config", config.to_str().unwrap()])
        .env("SPECNORM_OUT_DIR", &env_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(env_dir.join("records.csv").exists());

    let flag_dir = tmp.path().join("from-flag");
    let out = Command::new(env!("CARGO_BIN_EXE_specnorm"))
        .args([
            "experiment",
            "--config",
            config.to_str().unwrap(),
            "--output-dir",
            flag_dir.to_str().unwrap(),
        ])
        .env("SPECNORM_OUT_DIR", tmp.path().join("ignored"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(flag_dir.join("records.csv").exists());
    assert!(!tmp.path().join("ignored").exists());
}

#[test]
fn experiment_rejects_bad_configs() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("bad.toml");
    std::fs::write(&config, "version = 1\nunknown_key = true\n").unwrap();
    let out = specnorm(&["experiment", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
