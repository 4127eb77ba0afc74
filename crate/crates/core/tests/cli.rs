use std::fs;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hybridqec"))
}

#[test]
fn simulate_prints_csv_with_fixed_columns() {
    let out = bin()
        .args([
            "simulate",
            "--distances",
            "3",
            "--pz-list",
            "0.005",
            "--trials",
            "200",
            "--seed",
            "4",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "run_id,d,alpha,eta,p_z_single,p_z_ent,p_f,trials,failures,p_L,ci_low,ci_high"
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row.len(), 12);
    assert_eq!(row[1], "3");
    assert_eq!(row[7], "200");
}

#[test]
fn invalid_config_exits_with_2() {
    for args in [
        vec!["simulate", "--distances", "4", "--trials", "10"],
        vec!["simulate", "--distances", "3", "--trials", "0"],
        vec![
            "simulate",
            "--distances",
            "3",
            "--eta",
            "1.5",
            "--trials",
            "10",
        ],
        vec!["resources", "--targets", "0.01"],
        vec!["simulate", "--format", "xml"],
    ] {
        let st = bin().args(&args).output().unwrap().status;
        assert_eq!(st.code(), Some(2), "{args:?}");
    }
}

#[test]
fn unbracketed_threshold_exits_with_3_but_still_writes() {
    let dir = tempfile::tempdir().unwrap();
    let st = bin()
        .args([
            "threshold",
            "--distances",
            "3,5",
            "--pz-list",
            "0.0001,0.0002,0.0003",
            "--trials",
            "50",
        ])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap()
        .status;
    assert_eq!(st.code(), Some(3));
    assert!(dir.path().join("threshold.csv").exists());
}

#[test]
fn threshold_csv_is_identical_across_worker_counts() {
    let mut outputs = Vec::new();
    for w in ["1", "3"] {
        let dir = tempfile::tempdir().unwrap();
        bin()
            .args([
                "threshold",
                "--distances",
                "3,5",
                "--trials",
                "150",
                "--seed",
                "9",
                "--workers",
                w,
            ])
            .arg("--out")
            .arg(dir.path())
            .output()
            .unwrap();
        outputs.push(fs::read(dir.path().join("threshold.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn json_output_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let st = bin()
        .args([
            "simulate",
            "--distances",
            "3",
            "--trials",
            "20",
            "--format",
            "json",
        ])
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(st.success());
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("simulate.json")).unwrap())
            .unwrap();
    assert_eq!(v["command"], "simulate");
    assert_eq!(v["rows"].as_array().unwrap().len(), 1);
    assert_eq!(v["rows"][0]["trials"], 20);
}

#[test]
fn resources_and_oracle_verify_succeed() {
    let out = bin().arg("resources").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().nth(1).unwrap().starts_with("0.000001,14,"));
    let out = bin().arg("oracle-verify").output().unwrap();
    assert!(out.status.success());
    assert!(!String::from_utf8(out.stdout).unwrap().contains("FAIL"));
}
