use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cyattract"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn ok_json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn num(v: &Value) -> f64 {
    v.as_str().expect("decimal string").parse().expect("parses as f64")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cyattract-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn k3e_square_lattice() {
    let d = ok_json(&["k3e", "--pp", "2", "--pq", "0", "--qq", "2"]);
    let r = &d["result"];
    assert!(num(&r["tau"]["re"]).abs() < 1e-12);
    assert!((num(&r["tau"]["im"]) - 1.0).abs() < 1e-12);
    assert!((num(&r["abs_z"]) - 2.0).abs() < 1e-12);
    assert_eq!(r["reduced_form"], "(2,0,2)");
    assert_eq!(d["config"]["pp"], 2);
}

#[test]
fn zeta_thirteen_jacobi() {
    let d = ok_json(&["zeta", "--p", "13", "--method", "jacobi"]);
    assert_eq!(d["result"]["quartic"]["c_p"], -6);
    assert_eq!(d["result"]["quartic"]["status"], "split");
    assert_eq!(d["result"]["weil_envelope"]["within"], true);
    let best = &d["result"]["quartic"]["candidates"][0];
    assert_eq!(best["weil"]["passed"], true);
}

#[test]
fn zeta_methods_agree() {
    let j = ok_json(&["zeta", "--p", "5", "--method", "jacobi"]);
    let b = ok_json(&["zeta", "--p", "5", "--method", "brute"]);
    assert_eq!(j["result"]["counts"], b["result"]["counts"]);
}

#[test]
fn identical_runs_are_byte_identical() {
    for args in [
        &["k3e", "--pp", "3", "--pq", "1", "--qq", "5"][..],
        &["zeta", "--p", "7"][..],
        &["flow", "--model", "conifold", "--charge", "0,0,0,1", "--start", "0.2+0.1i"][..],
        &["boundary", "--kind", "N2", "--A", "3/2"][..],
    ] {
        let a = run(args);
        let b = run(args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn echoed_config_reproduces_the_run() {
    let first = run(&["flow", "--model", "conifold", "--charge", "0,0,0,1", "--start", "0.2+0.1i", "--seed", "9"]);
    assert!(first.status.success());
    let doc: Value = serde_json::from_slice(&first.stdout).unwrap();
    let path = scratch("echo.json");
    std::fs::write(&path, serde_json::to_string(&doc["config"]).unwrap()).unwrap();
    let second = run(&["flow", "--config", path.to_str().unwrap()]);
    assert!(second.status.success(), "{}", String::from_utf8_lossy(&second.stderr));
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn toml_config_with_fractions() {
    let path = scratch("zeta.toml");
    std::fs::write(&path, "p = 5\nmethod = \"brute\"\npsi = \"0/3\"\nphi = \"0\"\n").unwrap();
    let d = ok_json(&["zeta", "--config", path.to_str().unwrap()]);
    assert_eq!(d["config"]["psi"], "0");
    assert_eq!(d["config"]["method"], "brute");
    assert_eq!(d["result"]["quartic"]["c_p"], 2);
    // An explicit flag wins over the file.
    let d = ok_json(&["zeta", "--config", path.to_str().unwrap(), "--p", "3"]);
    assert_eq!(d["config"]["p"], 3);
}

#[test]
fn errors_carry_categories() {
    let out = run(&["k3e", "--pp", "1", "--pq", "2", "--qq", "1"]);
    assert_eq!(out.status.code(), Some(15));
    let e: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(e["error"]["category"], "k3e");

    let out = run(&["k3e", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    let e: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(e["error"]["category"], "usage");

    let out = run(&["monodromy", "--transport-tol", "0"]);
    assert_eq!(out.status.code(), Some(3));

    let out = run(&["zeta", "--p", "2"]);
    assert_eq!(out.status.code(), Some(16));
}

#[test]
fn boundary_with_periods_file() {
    let path = scratch("n3.json");
    // (u/z)e₁ + (0, 0, −a·u, −i·b·u) with a = 1, b = 1/2, u = 0.7 + 0.3i.
    std::fs::write(
        &path,
        r#"{"frame":"Symplectic","terms":{"-1":[[0.7,0.3],[0,0],[0,0],[0,0]],"0":[[0,0],[0,0],[-0.7,-0.3],[0.15,-0.35]]}}"#,
    )
    .unwrap();
    let d = ok_json(&["boundary", "--kind", "N3", "--A", "1,1/2,1/2,2", "--periods", path.to_str().unwrap()]);
    assert!(num(&d["result"]["max_residual"]) < 1e-12);
    assert_eq!(d["result"]["lmhs"]["kind"], "two-pure");
}

#[test]
fn selftest_passes() {
    let d = ok_json(&["selftest"]);
    assert_eq!(d["result"]["failed"], 0);
}

#[test]
fn monodromy_zero_loop_matches_closed_form() {
    let d = ok_json(&["monodromy", "--family", "halfs-3", "--loop", "0"]);
    assert!(num(&d["result"]["closed_form_residual"]) < 1e-7);
}

#[test]
fn output_file_and_timing() {
    let path = scratch("out.json");
    let out = run(&["k3e", "--pp", "2", "--pq", "1", "--qq", "3", "--timing", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let d: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(d["timing_ms"].is_string());
}
