use std::process::{Command, Output};

fn hkt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hkt"))
        .args(args)
        .env_remove("HKT_TOL")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn roots_b3_and_d4() {
    let o = hkt(&["roots", "B3"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("positive roots (9)"));
    assert!(s.contains("highest root: (1, 1, 0)"));
    assert!(s.contains("surgery: A1 + A1"));
    assert!(stdout(&hkt(&["roots", "D4"])).contains("surgery: A1 + A1 + A1"));
    assert!(stdout(&hkt(&["roots", "A1"])).contains("positive roots (1)"));
    assert_eq!(hkt(&["roots", "E6"]).status.code(), Some(2));
}

#[test]
fn verify_exit_codes() {
    let o = hkt(&["verify", "A2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verdict: certified"));
    let o = hkt(&["verify", "A3"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("requires 1 U(1) factor"));
    let o = hkt(&["verify", "A2/"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("expected FACTORS"));
    assert_eq!(hkt(&["verify", "A2", "--tol", "0.5"]).status.code(), Some(2));
    let o = hkt(&["verify", "B3xU1^3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("dimension 24"));
}

#[test]
fn certificate_json_is_canonical() {
    let o = hkt(&["verify", "B3xU1^2/A1:gamma", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["verdict"], "certified");
    assert_eq!(v["dimension"], 20);
    let i = &v["certificate"]["residuals"]["I"];
    for key in ["integrability", "square", "bismut"] {
        assert!(i[key].as_f64().unwrap() >= 0.0);
    }
    let again = Command::new(env!("CARGO_BIN_EXE_hkt"))
        .args(["verify", "B3xU1^2/A1:gamma", "--json"])
        .output()
        .unwrap();
    assert_eq!(stdout(&again), text);
}

#[test]
fn classify_tables() {
    let s = stdout(&hkt(&["classify", "A", "7"]));
    let paddings: Vec<&str> = s
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().nth(1).unwrap())
        .collect();
    assert_eq!(paddings, ["1", "0", "1", "0", "1", "0", "1"]);
    assert!(stdout(&hkt(&["classify", "C", "1"])).contains("Sp(1) x U(1)"));
    assert!(stdout(&hkt(&["classify", "D", "5"])).contains("SO(10) x [U(1)]^3"));
    assert_eq!(hkt(&["classify", "B", "9"]).status.code(), Some(2));
}

#[test]
fn catalog_su4() {
    let o = hkt(&["catalog", "A", "3", "--verify", "--jobs", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert_eq!(s.matches("certified").count(), 4);
    for name in ["SU(4)/SU(2) ", "SU(4)/(SU(2) x U(1)) x U(1)", "SU(4)/U(1) x [U(1)]^2", "SU(4) x U(1)"] {
        assert!(s.contains(name), "{name} missing");
    }
}

#[test]
fn tolerance_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_hkt"))
        .args(["verify", "A2"])
        .env("HKT_TOL", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
