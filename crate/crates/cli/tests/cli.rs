use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tollsub"))
}

fn experiment(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../experiments").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn value_after(text: &str, prefix: &str) -> f64 {
    let line = text
        .lines()
        .find(|l| l.starts_with(prefix))
        .unwrap_or_else(|| panic!("no `{prefix}` line in:\n{text}"));
    line[prefix.len()..]
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap()
}

#[test]
fn solve_pigou_reports_four_thirds() {
    let pigou = experiment("pigou1.json");
    let o = run(&["solve", "--instance", pigou.to_str().unwrap(), "--mech", "none"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let poa = value_after(&stdout(&o), "PoA:");
    assert!((poa - 4.0 / 3.0).abs() < 1e-6, "{poa}");
}

#[test]
fn solve_braess_reports_four_thirds() {
    let braess = experiment("braess.json");
    let o = run(&["solve", "--instance", braess.to_str().unwrap()]);
    assert!(o.status.success());
    let poa = value_after(&stdout(&o), "PoA:");
    assert!((poa - 4.0 / 3.0).abs() < 1e-6, "{poa}");
}

#[test]
fn two_class_solve_prints_class_flows() {
    let inst = experiment("two_class_affine.json");
    let o = run(&["solve", "--instance", inst.to_str().unwrap(), "--mech", "smc:sL=1,sU=4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("class 0 flow:"));
    assert!(text.contains("class 1 flow:"));
    assert!(value_after(&text, "PoA:") >= 1.0 - 1e-9);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["solve"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    let pigou = experiment("pigou1.json");
    let bad_mech = run(&["solve", "--instance", pigou.to_str().unwrap(), "--mech", "toll:β=-1"]);
    assert_eq!(bad_mech.status.code(), Some(1));

    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{\"nodes\": [\"o\"]").unwrap();
    assert_eq!(run(&["solve", "--instance", broken.to_str().unwrap()]).status.code(), Some(2));
    let missing = dir.path().join("missing.json");
    assert_eq!(run(&["solve", "--instance", missing.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn csv_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = run(&[
            "fig2a",
            "--beta-grid",
            "0:0.5:0.25",
            "--grid-points",
            "5",
            "--seed",
            "7",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert!(text.lines().next().unwrap().starts_with('#'));
    assert!(text.contains("lower bound"), "{text}");
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    let from_config = dir.path().join("config.csv");
    let from_flag = dir.path().join("flag.csv");
    std::fs::write(
        &config,
        format!(
            "beta_grid = \"0:1:0.5\"\np_max = 2\nout = {:?}\n",
            from_config.to_str().unwrap()
        ),
    )
    .unwrap();

    let o = run(&["fig1", "--config", config.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = data_rows(&std::fs::read_to_string(&from_config).unwrap());
    assert_eq!(rows, 3);

    let o = run(&[
        "fig1",
        "--config",
        config.to_str().unwrap(),
        "--beta-grid",
        "0:1:0.25",
        "--out",
        from_flag.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert_eq!(data_rows(&std::fs::read_to_string(&from_flag).unwrap()), 5);

    std::fs::write(&config, "no_such_key = 1\n").unwrap();
    assert_eq!(run(&["fig1", "--config", config.to_str().unwrap()]).status.code(), Some(1));
}

fn data_rows(csv: &str) -> usize {
    // Comment lines, then a header, then one row per parameter value.
    csv.lines().filter(|l| !l.starts_with('#')).count() - 1
}

#[test]
fn theorem_two_holds_without_heterogeneity() {
    let o = run(&["check", "--theorem", "2", "--q-grid", "1", "--grid-points", "6", "--mass-splits", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS"));
}

#[test]
fn theorem_one_violation_exits_four() {
    // A margin no grid can show forces a violation.
    let o = run(&[
        "check",
        "--theorem",
        "1",
        "--beta-grid",
        "0.5",
        "--grid-points",
        "5",
        "--min-margin",
        "10",
    ]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).contains("FAIL"));
}
