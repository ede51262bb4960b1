//! End-to-end checks of the `qsar` binary: outputs and exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn qsar(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsar"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn qsar")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

const RUN_CONFIG: &str = r#"
[environment]
preset = "toy"
m = 1

[experiment]
policies = ["qsar", "qsr", "sr", "q-uniform"]
budgets = [40, 80]
runs = 60
seed = 9
output = "out"
"#;

#[test]
fn run_writes_results_and_plot_script() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.toml"), RUN_CONFIG).unwrap();
    let out = qsar(dir.path(), &["run", "--config", "c.toml", "--crn"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let csv = std::fs::read_to_string(dir.path().join("out/results.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("policy,budget,runs,errors,e_hat,stderr,seed")
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 8);
    // Q-SAR and Q-SR coincide at m = 1 under common random numbers
    assert_eq!(rows[0][3], rows[2][3]);
    assert_eq!(rows[1][3], rows[3][3]);
    let script = std::fs::read_to_string(dir.path().join("out/plot_results.py")).unwrap();
    assert!(script.contains("results.csv"));
}

#[test]
fn seed_and_out_flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.toml"), RUN_CONFIG).unwrap();
    let out = qsar(
        dir.path(),
        &[
            "run",
            "--config",
            "c.toml",
            "--seed",
            "123",
            "--out",
            "elsewhere",
        ],
    );
    assert_eq!(code(&out), 0);
    let csv = std::fs::read_to_string(dir.path().join("elsewhere/results.csv")).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",123")));
}

#[test]
fn config_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        RUN_CONFIG.replace("runs = 60", "runs = 0"),
        RUN_CONFIG.replace("[40, 80]", "[80, 40]"),
        RUN_CONFIG.replace("budgets = [40, 80]", "budgets = [5, 80]"),
        RUN_CONFIG.replace("m = 1", "m = \"one\""),
        "[environment]\nm = 1\narms = [{ kind = \"exponential\", rate = 1.0 }, { kind = \"exponential\", rate = 2.0 }]\n\
         [experiment]\npolicies = [\"qsar\"]\nbudgets = [100]\n"
            .to_string(),
    ];
    for (i, text) in cases.iter().enumerate() {
        let path = dir.path().join(format!("bad{i}.toml"));
        std::fs::write(&path, text).unwrap();
        let out = qsar(dir.path(), &["run", "--config", path.to_str().unwrap()]);
        assert_eq!(
            code(&out),
            1,
            "case {i}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    assert_eq!(code(&qsar(dir.path(), &["run"])), 1);
    assert_eq!(
        code(&qsar(dir.path(), &["run", "--config", "missing.toml"])),
        1
    );
    assert_eq!(code(&qsar(dir.path(), &["frobnicate"])), 1);
    std::fs::write(dir.path().join("c.toml"), RUN_CONFIG).unwrap();
    assert_eq!(
        code(&qsar(
            dir.path(),
            &["run", "--config", "c.toml", "--jobs", "0"]
        )),
        1
    );
}

#[test]
fn runtime_failures_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = qsar(dir.path(), &["ingest-check", "no-such-dir"]);
    assert_eq!(code(&out), 2, "{}", String::from_utf8_lossy(&out.stderr));
    // output directory blocked by a regular file
    std::fs::write(dir.path().join("c.toml"), RUN_CONFIG).unwrap();
    std::fs::write(dir.path().join("out"), "not a directory").unwrap();
    let out = qsar(dir.path(), &["run", "--config", "c.toml"]);
    assert_eq!(code(&out), 2, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn bound_validation_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let suite = "[bounds]\nspecs = [{ kind = \"exponential\", rate = 1.0 }]\nn = [40]\nk = [4]\n\
                 tau = [0.5]\ngamma = [1.0, 2.0]\ntrials = 3000\noracle_trials = 3000\n";
    std::fs::write(dir.path().join("ok.toml"), suite).unwrap();
    std::fs::write(
        dir.path().join("bad.toml"),
        format!("{suite}hazard_floor = 50.0\n"),
    )
    .unwrap();

    let out = qsar(
        dir.path(),
        &["validate-bounds", "--config", "ok.toml", "--out", "v"],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let csv = std::fs::read_to_string(dir.path().join("v/bound_validation.csv")).unwrap();
    assert!(csv.starts_with("spec,n,k,tau,gamma,side,radius,bound,frequency,trials,stderr"));
    assert!(dir.path().join("v/bias_estimates.csv").exists());

    let out = qsar(
        dir.path(),
        &["validate-bounds", "--config", "bad.toml", "--out", "v2"],
    );
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAILED"));
}

#[test]
fn complexity_and_ingest_check() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    std::fs::create_dir(&data).unwrap();
    std::fs::write(data.join("arm_a.csv"), "1\n2\n3\n").unwrap();
    std::fs::write(data.join("arm_b.csv"), "4\n5\n6\n").unwrap();
    let out = qsar(dir.path(), &["ingest-check", "data"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(
        text.contains("2 arms") && text.contains("arm_b.csv"),
        "{text}"
    );

    let cfg = "[environment]\ndata_dir = \"data\"\ntau = 0.5\nm = 1\n";
    std::fs::write(dir.path().join("emp.toml"), cfg).unwrap();
    assert_eq!(
        code(&qsar(dir.path(), &["ingest-check", "--config", "emp.toml"])),
        0
    );
    // empirical arms without L and b
    assert_eq!(
        code(&qsar(dir.path(), &["complexity", "--config", "emp.toml"])),
        1
    );
    std::fs::write(
        dir.path().join("emp2.toml"),
        format!("{cfg}[complexity]\nbudgets = [10, 100]\nhazard_floor = [1.0, 1.0]\nbias = [0.5, 0.5]\n"),
    )
    .unwrap();
    let out = qsar(dir.path(), &["complexity", "--config", "emp2.toml"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("min gap"));

    std::fs::write(data.join("arm_c.csv"), "1\n-1\n").unwrap();
    let out = qsar(dir.path(), &["ingest-check", "data"]);
    assert_ne!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("arm_c.csv"));
}

#[test]
fn shipped_configs_parse() {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs");
    for name in ["quick.toml", "env2.toml", "bounds.toml"] {
        qsar::experiments::ExperimentConfig::load(configs.join(name))
            .unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}
