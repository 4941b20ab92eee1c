use std::process::{Command, Output};

fn polylog(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polylog"))
        .args(args)
        .env_remove("POLYLOG_PRECISION")
        .env_remove("POLYLOG_RIEMANN")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn passing_run_exits_zero() {
    let o = polylog(&["verify", "theorem", "--p", "7", "--n", "2", "--samples", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["schemaVersion"], 1);
    assert_eq!(report["pass"], true);
}

#[test]
fn failing_run_exits_one_and_replays() {
    let o = polylog(&["verify", "theorem", "--p", "7", "--n", "2", "--samples", "2", "--order", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let sample = report["perSample"]
        .as_array()
        .unwrap()
        .iter()
        .find(|s| s["pass"] == false)
        .expect("a failing sample")
        .clone();
    let replay = serde_json::to_string(&sample).unwrap();
    let again = polylog(&["verify", "--replay", &replay]);
    assert_eq!(again.status.code(), Some(1));
    let rerun: serde_json::Value = serde_json::from_str(&stdout(&again)).unwrap();
    assert_eq!(rerun["perSample"][0]["zbar"], sample["zbar"]);
    assert_eq!(rerun["perSample"][0]["w"], sample["w"]);
}

#[test]
fn configuration_errors_exit_two() {
    for args in [
        &["verify", "theorem", "--p", "9"][..],
        &["verify", "theorem", "--p", "3", "--n", "2"],
        &["verify", "nonsense"],
        &["verify"],
        &["verify", "all", "--matrix", "huge"],
        &["coeffs", "--n", "3", "--p", "4"],
    ] {
        assert_eq!(polylog(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["verify", "proposition1", "--p", "5", "--n", "2", "--samples", "4", "--seed", "11", "--format", "csv"];
    let a = polylog(&args);
    let b = polylog(&[&args[..], &["--jobs", "3"]].concat());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn precision_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_polylog"))
        .args(["verify", "theorem", "--p", "7", "--n", "2", "--samples", "1"])
        .env("POLYLOG_PRECISION", "9")
        .output()
        .unwrap();
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["A"], 9);
}

#[test]
fn finite_table_and_coeffs() {
    let o = polylog(&["finite-table", "--p", "5", "--k", "2", "--n", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 26);
    let o = polylog(&["coeffs", "--n", "3", "--p", "7"]);
    let text = stdout(&o);
    assert!(text.contains("a_0 = -3"), "{text}");
    assert!(text.contains("a_2 = -1/2 = 3 mod 7"), "{text}");
    assert!(text.contains("e_3 = -3"), "{text}");
}
