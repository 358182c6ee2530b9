use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_collector-lab"))
}

fn run(args: &[&str]) -> Output {
    bin()
        .args(args)
        .env_remove("COLLECTOR_LAB_WORKERS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn pmf_golden() {
    let o = run(&[
        "pmf", "--m", "2", "--n-max", "2", "--exact", "--format", "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let expected = "\
m,n,k,p_num,p_den,p_float
2,0,0,1,1,1
2,0,1,0,1,0
2,0,2,0,1,0
2,1,0,0,1,0
2,1,1,1,1,1
2,1,2,0,1,0
2,2,0,0,1,0
2,2,1,1,2,0.5
2,2,2,1,2,0.5
";
    assert_eq!(stdout(&o), expected);
}

#[test]
fn stirling_golden() {
    let o = run(&["stirling", "--n-max", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let expected = "\
n,k,a
1,1,1
2,1,1
2,2,1
3,1,1
3,2,3
3,3,1
4,1,1
4,2,7
4,3,6
4,4,1
";
    assert_eq!(stdout(&o), expected);
}

#[test]
fn egf_golden() {
    let o = run(&["egf", "--m", "2", "--order", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let expected = "\
n,k,coeff_num,coeff_den
0,0,1,1
1,0,0,1
1,1,1,1
2,0,0,1
2,1,1,2
2,2,1,2
";
    assert_eq!(stdout(&o), expected);
}

#[test]
fn egf_point_evaluation() {
    let o = run(&[
        "egf", "--m", "3", "--order", "5", "--at", "2,1", "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let value = v["value"].as_f64().unwrap();
    assert!((value - 2.0f64.exp()).abs() < 1e-12);
}

#[test]
fn usage_errors() {
    for args in [
        &["pmf", "--m", "0", "--n-max", "3"][..],
        &["pmf", "--n-max", "3"],
        &["stirling", "--n-max", "0"],
        &["simulate", "--m", "3", "--n", "2", "--trials", "10"],
        &["verify", "--m-max", "0"],
        &["pmf", "--m", "2", "--n-max", "2", "--format", "xml"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty());
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn simulate_is_byte_deterministic() {
    let args = [
        "simulate",
        "--m",
        "6",
        "--n",
        "9",
        "--trials",
        "50000",
        "--seed",
        "17",
        "--compare-exact",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let parallel = bin()
        .args(args)
        .env("COLLECTOR_LAB_WORKERS", "4")
        .output()
        .unwrap();
    assert_eq!(parallel.stdout, a.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("k,count,freq\n0,0,0\n"));
    assert!(text.contains("\nmetric,value\nmax_abs_deviation,"));
}

#[test]
fn simulate_json_has_comparison() {
    let o = run(&[
        "simulate",
        "--m",
        "2",
        "--n",
        "3",
        "--trials",
        "1000",
        "--seed",
        "1",
        "--compare-exact",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
    assert_eq!(v["config"]["trials"], 1000);
    assert!(v["comparison"]["chi_square"].is_number());
}

#[test]
fn verify_default_envelope_passes_deterministically() {
    let a = run(&["verify", "--m-max", "6", "--n-max", "12"]);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    let text = stdout(&a);
    assert!(text.ends_with("overall: PASS\n"));
    for line in text.lines().filter(|l| {
        l.starts_with("stirling.")
            || l.starts_with("distribution.")
            || l.starts_with("genfun.three")
            || l.starts_with("mean.")
    }) {
        let cells: Vec<&str> = line.split_whitespace().collect();
        assert_eq!(cells[cells.len() - 2..], ["PASS", "exact"], "{line}");
    }
    let b = run(&["verify", "--m-max", "6", "--n-max", "12"]);
    assert_eq!(a.stdout, b.stdout);

    let j = run(&[
        "verify", "--m-max", "3", "--n-max", "4", "--trials", "20000", "--format", "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&j)).unwrap();
    assert_eq!(v["overall"], "pass");
    assert!(v["checks"].as_array().unwrap().len() >= 10);
}

#[test]
fn output_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("collector-lab-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("pmf.json");
    let o = run(&[
        "pmf",
        "--m",
        "3",
        "--n-max",
        "4",
        "--float",
        "--format",
        "json",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 5 * 4);
    assert!(rows[0]["p_num"].is_null());
    std::fs::remove_dir_all(&dir).unwrap();

    let bad = run(&[
        "stirling",
        "--n-max",
        "3",
        "--output",
        "/nonexistent-dir/x.csv",
    ]);
    assert_eq!(bad.status.code(), Some(2));
}
