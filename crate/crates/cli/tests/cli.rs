use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("../core/corpus/{name}.bf"))
}

fn permred(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_permred"))
        .args(args)
        .env_remove("PERMRED_PRECISION")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn value(o: &Output, key: &str) -> String {
    stdout(o)
        .lines()
        .find_map(|l| {
            l.strip_prefix(key)
                .and_then(|r| r.strip_prefix(' '))
                .map(str::to_string)
        })
        .unwrap_or_else(|| panic!("no {key} line in {}", stdout(o)))
}

#[test]
fn compile_then_recover_and_permanent() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cz.pm.json");
    let cz = corpus("cz");
    let o = permred(&[
        "compile",
        cz.to_str().unwrap(),
        "--variant",
        "y",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{o:?}");
    assert_eq!(value(&o, "N"), "4");
    assert_eq!(value(&o, "gamma"), "1");

    let r = permred(&["recover", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(0));
    assert_eq!(value(&r, "delta"), "2");

    let p = permred(&["permanent", out.to_str().unwrap()]);
    let q = permred(&["permanent", out.to_str().unwrap(), "--algo", "naive"]);
    assert_eq!(value(&p, "permanent"), value(&q, "permanent"));
}

#[test]
fn constant_function_compiles_to_one_by_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.pm.json");
    let o = permred(&[
        "compile",
        corpus("const1").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(value(&o, "N"), "1");
    let b: u32 = value(&o, "b").parse().unwrap();
    let json = std::fs::read_to_string(&out).unwrap();
    assert!(
        json.contains(&format!("\"A\":[[\"{}\"]]", 1u64 << b)),
        "{json}"
    );
    assert_eq!(
        value(&permred(&["recover", out.to_str().unwrap()]), "delta"),
        "2"
    );
}

#[test]
fn plain_matrix_permanents() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.txt");
    std::fs::write(&m, "2\n1 2\n3 4\n").unwrap();
    assert_eq!(
        value(&permred(&["permanent", m.to_str().unwrap()]), "permanent"),
        "10"
    );
    std::fs::write(&m, "3\n1 0 0\n0 1 0\n0 0 1\n").unwrap();
    assert_eq!(
        value(
            &permred(&["permanent", m.to_str().unwrap(), "--algo", "naive"]),
            "permanent"
        ),
        "1"
    );
}

#[test]
fn verify_reports_agreement() {
    for name in ["cz", "majority3", "or2", "table_xnor"] {
        let o = permred(&["verify", corpus(name).to_str().unwrap(), "--variant", "w"]);
        assert_eq!(o.status.code(), Some(0), "{name}: {o:?}");
        assert_eq!(value(&o, "status"), "OK");
    }
}

#[test]
fn signsearch_traces() {
    let o = permred(&["signsearch", corpus("cz").to_str().unwrap()]);
    assert_eq!(value(&o, "delta"), "2");
    let o = permred(&["signsearch", corpus("z1").to_str().unwrap()]);
    assert_eq!(value(&o, "calls"), "1");
    assert_eq!(value(&o, "delta"), "0");

    let dir = tempfile::tempdir().unwrap();
    let neg = dir.path().join("neg.bf");
    std::fs::write(&neg, "n 2\nrepr table\n----\n").unwrap();
    for backend in ["brute", "permanent"] {
        let o = permred(&["signsearch", neg.to_str().unwrap(), "--backend", backend]);
        assert_eq!(value(&o, "delta"), "-4", "{backend}");
        assert!(stdout(&o).starts_with("probe 0 -1\n"));
    }
}

#[test]
fn selftest_passes_and_detects_corruption() {
    assert_eq!(permred(&["selftest", "--quick"]).status.code(), Some(0));
    let o = permred(&["selftest", "--quick", "--corrupt-w"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).contains("FAIL nonlinear sign gadget W"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.bf");
    std::fs::write(&bad, "n 2\nrepr phasepoly\nterm 1 5\n").unwrap();
    assert_eq!(
        permred(&["compile", bad.to_str().unwrap()]).status.code(),
        Some(2)
    );

    let bad_json = dir.path().join("bad.pm.json");
    std::fs::write(&bad_json, "{\"version\": 1").unwrap();
    assert_eq!(
        permred(&["recover", bad_json.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );

    let out = dir.path().join("ccz.pm.json");
    permred(&[
        "compile",
        corpus("ccz").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        permred(&["recover", out.to_str().unwrap(), "--max-dim", "8"])
            .status
            .code(),
        Some(3)
    );

    let o = Command::new(env!("CARGO_BIN_EXE_permred"))
        .args([
            "compile",
            corpus("cz").to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])
        .env("PERMRED_PRECISION", "12")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn precision_override_keeps_the_count() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.pm.json");
    let o = Command::new(env!("CARGO_BIN_EXE_permred"))
        .args([
            "compile",
            corpus("path3").to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])
        .env("PERMRED_PRECISION", "256")
        .output()
        .unwrap();
    assert_eq!(value(&o, "p"), "256");
    assert_eq!(
        value(&permred(&["recover", out.to_str().unwrap()]), "delta"),
        "4"
    );
}

#[test]
fn circuit_text_feeds_amp() {
    let dir = tempfile::tempdir().unwrap();
    let qc = dir.path().join("ccz.qc");
    let o = permred(&["circuit", corpus("ccz").to_str().unwrap()]);
    std::fs::write(&qc, &o.stdout).unwrap();
    let a = permred(&["amp", qc.to_str().unwrap()]);
    let re: f64 = value(&a, "re").parse().unwrap();
    assert!((re - 0.75).abs() < 1e-12, "{re}");
}

#[test]
fn lo_dump_is_json() {
    let o = permred(&["lo", corpus("cz").to_str().unwrap(), "--variant", "y"]);
    assert!(o.status.success());
    assert!(stdout(&o).trim_start().starts_with('{'));
}
