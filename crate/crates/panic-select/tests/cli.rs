//! End-to-end tests of the `panic-select` binary: exit codes, output
//! formats, config/flag composition, and CSV determinism.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_panic-select"))
}

fn write(path: &Path, content: &str) {
    std::fs::write(path, content).unwrap();
}

fn line_csv(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("line.csv");
    write(&path, "x,y\n1.0,2.0\n2.0,4.0\n3.0,6.0\n-1.0,-2.0\n");
    path
}

fn sparse_csv(dir: &Path, n: usize, seed: u64) -> std::path::PathBuf {
    // Simple deterministic pseudo-random data: y = 2 x1 - 1.5 x2 + noise,
    // x3/x4 inert.
    let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15) | 1;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let mut text = String::from("x1,x2,x3,x4,y\n");
    for _ in 0..n {
        let x: Vec<f64> = (0..4).map(|_| next() * 2.0).collect();
        let y = 2.0 * x[0] - 1.5 * x[1] + 0.2 * next();
        text.push_str(&format!("{},{},{},{},{}\n", x[0], x[1], x[2], x[3], y));
    }
    let path = dir.join("sparse.csv");
    write(&path, &text);
    path
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

#[test]
fn fit_recovers_exact_line() {
    let dir = tempfile::tempdir().unwrap();
    let data = line_csv(dir.path());
    let out = run(bin().args([
        "fit",
        "--data",
        data.to_str().unwrap(),
        "--family",
        "linear",
        "--penalty",
        "l1",
        "--lambda",
        "0",
    ]));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["mode"], "penalized");
    let slope = value["fit"]["beta"]["slopes"][0].as_f64().unwrap();
    assert!((slope - 2.0).abs() < 1e-5);
    assert!(value["fit"]["converged"].as_bool().unwrap());
}

#[test]
fn fit_reports_inactive_constraint() {
    let dir = tempfile::tempdir().unwrap();
    let data = line_csv(dir.path());
    let out = run(bin().args([
        "fit",
        "--data",
        data.to_str().unwrap(),
        "--c",
        "1000",
    ]));
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["mode"], "constrained");
    assert_eq!(value["solution"]["active"], false);
    assert_eq!(value["solution"]["lambda_star"].as_f64().unwrap(), 0.0);
}

#[test]
fn malformed_csv_exits_2_with_row_information() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    write(&path, "x,y\n1.0,2.0\noops,4.0\n");
    let out = run(bin().args(["fit", "--data", path.to_str().unwrap(), "--lambda", "0"]));
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 3"), "stderr: {stderr}");
    assert!(stderr.contains("'x'"), "stderr: {stderr}");
}

#[test]
fn missing_response_column_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("no_y.csv");
    write(&path, "a,b\n1.0,2.0\n");
    let out = run(bin().args(["fit", "--data", path.to_str().unwrap(), "--lambda", "0"]));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("response column"));
}

#[test]
fn invalid_response_for_family_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let data = line_csv(dir.path());
    let out = run(bin().args([
        "fit",
        "--data",
        data.to_str().unwrap(),
        "--family",
        "logistic",
        "--lambda",
        "0.1",
    ]));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn separable_logistic_fit_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sep.csv");
    let mut text = String::from("x,y\n");
    for i in 0..14 {
        let x = i as f64 - 6.5;
        text.push_str(&format!("{},{}\n", x, i32::from(x > 0.0)));
    }
    write(&path, &text);
    let out = run(bin().args([
        "fit",
        "--data",
        path.to_str().unwrap(),
        "--family",
        "logistic",
        "--lambda",
        "0",
    ]));
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("solver-failure"));
}

#[test]
fn select_writes_json_and_table_csv() {
    let dir = tempfile::tempdir().unwrap();
    let data = sparse_csv(dir.path(), 120, 7);
    let out_path = dir.path().join("result.json");
    let out = run(bin().args([
        "select",
        "--data",
        data.to_str().unwrap(),
        "--method",
        "modified-bic",
        "--kappa",
        "1",
        "--epsilon",
        "1e-3",
        "--m",
        "25",
        "--out",
        out_path.to_str().unwrap(),
    ]));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let value: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(value["result"]["method"], "modified-bic");
    let table = std::fs::read_to_string(dir.path().join("result.csv")).unwrap();
    let mut lines = table.lines();
    assert_eq!(
        lines.next().unwrap(),
        "index,radius,lambda,risk,penalty_term,criterion,df_hat,df_tilde,cv_risk,failed"
    );
    assert_eq!(table.lines().count(), 26);

    // df_tilde column is non-decreasing.
    let tilde: Vec<u64> = table
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(7).unwrap().parse().unwrap())
        .collect();
    assert!(tilde.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn select_cv_is_deterministic_under_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let data = sparse_csv(dir.path(), 80, 3);
    let mut outputs = Vec::new();
    for _ in 0..2 {
        let out = run(bin().args([
            "select",
            "--data",
            data.to_str().unwrap(),
            "--method",
            "cv",
            "--folds",
            "5",
            "--seed",
            "11",
            "--m",
            "15",
        ]));
        assert!(out.status.success());
        outputs.push(out.stdout);
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn select_panic_near_true_norm_on_clean_data() {
    let dir = tempfile::tempdir().unwrap();
    // Noiseless responses with unit-variance covariates: the criterion's
    // minimizer sits just below the true norm 3.5 (the radius penalty backs
    // off by about kappa*sqrt(log n / n)/2), well under the anchor.
    let mut text = String::from("x1,x2,y\n");
    let mut state = 0x2545F4914F6CDD1Du64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    for _ in 0..400 {
        let (x1, x2) = (next() * 3.46, next() * 3.46);
        text.push_str(&format!("{},{},{}\n", x1, x2, 2.0 * x1 - 1.5 * x2));
    }
    let path = dir.path().join("clean.csv");
    write(&path, &text);
    let out = run(bin().args([
        "select",
        "--data",
        path.to_str().unwrap(),
        "--method",
        "panic",
        "--m",
        "60",
    ]));
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let chosen = value["result"]["chosen_radius"].as_f64().unwrap();
    assert!(
        chosen < 3.5 && (chosen - 3.5).abs() < 0.25,
        "chosen radius {chosen}, true norm 3.5"
    );
}

#[test]
fn simulate_requires_config_or_preset() {
    let out = run(bin().args(["simulate"]));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_rejects_unknown_config_keys() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    write(&config, "[design]\nfamlly = \"linear\"\n");
    let out = run(bin().args(["simulate", "--config", config.to_str().unwrap()]));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("famlly"));
}

#[test]
fn simulate_flags_override_config_keys() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    write(
        &config,
        r#"
[design]
family = "linear"
n = [60]
sigma = [1.0]
d = 4
s = 2
reps = 5
seed = 9
m = 10

[[method]]
kind = "panic"
kappa = 1.0

[output]
csv = "OVERRIDDEN.csv"
json = "OVERRIDDEN.json"
"#,
    );
    let prefix = dir.path().join("report");
    let out = run(bin().args([
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--reps",
        "3",
        "--out",
        prefix.to_str().unwrap(),
    ]));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    // The flag wins over the config's reps = 5.
    for line in csv.lines().skip(1) {
        assert!(line.contains(",3,"), "reps column should be 3: {line}");
    }
    assert!(dir.path().join("report.json").exists());
    assert!(!Path::new("OVERRIDDEN.csv").exists());
}

#[test]
fn simulate_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    write(
        &config,
        r#"
[design]
family = "linear"
n = [80]
sigma = [1.0]
d = 5
s = 2
reps = 4
seed = 31
m = 12

[[method]]
kind = "modified-bic"

[[method]]
kind = "cv"
folds = 4
"#,
    );
    let mut contents = Vec::new();
    for run_idx in 0..2 {
        let prefix = dir.path().join(format!("r{run_idx}"));
        let out = run(bin().args([
            "simulate",
            "--config",
            config.to_str().unwrap(),
            "--threads",
            "1",
            "--out",
            prefix.to_str().unwrap(),
        ]));
        assert!(out.status.success());
        contents.push(std::fs::read(dir.path().join(format!("r{run_idx}.csv"))).unwrap());
    }
    assert_eq!(contents[0], contents[1]);
}

#[test]
fn simulate_paper_preset_enumerates_cells() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("paper");
    let out = run(bin().args([
        "simulate",
        "--paper-tables",
        "--reps",
        "2",
        "--seed",
        "7",
        "--m",
        "25",
        "--threads",
        "1",
        "--out",
        prefix.to_str().unwrap(),
    ]));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("paper.csv")).unwrap();
    let linear_cells = csv
        .lines()
        .skip(1)
        .filter(|l| l.contains(",linear,") && l.contains(",error,"))
        .count();
    let logistic_cells = csv
        .lines()
        .skip(1)
        .filter(|l| l.contains(",logistic,") && l.contains(",error,"))
        .count();
    assert_eq!(linear_cells, 18, "csv:\n{csv}");
    assert_eq!(logistic_cells, 3, "csv:\n{csv}");
}

#[test]
fn simulate_exceeding_failure_budget_exits_4() {
    // Tiny logistic samples are frequently separable, so the unpenalized
    // anchor fit diverges and the replication is excluded; with most reps
    // failing the cell blows its 5% budget.
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    write(
        &config,
        r#"
[design]
family = "logistic"
n = [12]
d = 4
s = 2
reps = 4
seed = 3
m = 6

[[method]]
kind = "panic"

[solver]
max_iterations = 2000
"#,
    );
    let prefix = dir.path().join("budget");
    let out = run(bin().args([
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--out",
        prefix.to_str().unwrap(),
    ]));
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("failure-budget-exceeded"));
    // The report is still written so the excluded counts can be inspected.
    let csv = std::fs::read_to_string(dir.path().join("budget.csv")).unwrap();
    assert!(csv.lines().count() > 1);
}

#[test]
fn simulate_kappa_sweep_adds_rows() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    write(
        &config,
        r#"
[design]
family = "linear"
n = [60]
sigma = [1.0]
d = 4
s = 2
reps = 2
seed = 5
m = 8

[[method]]
kind = "modified-bic"
"#,
    );
    let prefix = dir.path().join("sweep");
    let out = run(bin().args([
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--kappa-sweep",
        "0.1,0.5,1,2",
        "--out",
        prefix.to_str().unwrap(),
    ]));
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    for kappa in ["0.1", "0.5", "1", "2"] {
        assert!(
            csv.lines().any(|l| l.starts_with(&format!("panic,linear,60,1,{kappa},"))),
            "missing kappa {kappa} rows in:\n{csv}"
        );
    }
}
