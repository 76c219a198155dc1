use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_wmcfg"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.unwrap_or("").as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn intersect_prints_the_optimal_grammar() {
    let out = stdout(&run(
        &["intersect", "-g", &data("ww.mcfg"), "-a", &data("final0.wfsa")],
        None,
    ));
    assert_eq!(
        out,
        "%start S\nS -> A.0 A.1\nA -> ( 1 , 1 )\nA -> ( 0 A.0 , 0 A.1 )\nA -> ( 1 A.0 , 1 A.1 )\n"
    );
}

#[test]
fn intersect_annotated_and_chart_dump() {
    let ww = data("ww.mcfg");
    let m = data("final0.wfsa");
    let out = stdout(&run(&["intersect", "-g", &ww, "-a", &m, "--annotated"], None));
    assert!(
        out.starts_with("%start S(1,2)\nS(1,2) -> A(1,1)(1,2).0 A(1,1)(1,2).1\n"),
        "{out}"
    );
    let out = stdout(&run(&["intersect", "-g", &ww, "-a", &m, "--dump-chart"], None));
    assert!(out.starts_with("Column 1\n#\tr\tw\tproduction\tH\n"));
    assert!(out.ends_with("A -> ( 1 A.0 , 1 A.1 )\n"));
}

#[test]
fn output_file_and_empty_result() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("out.mcfg");
    let never = dir.path().join("never.wfsa");
    std::fs::write(&never, "%states 1\n%final\n0 0 0 0\n0 1 0 0\n").unwrap();
    let o = run(
        &[
            "intersect",
            "-g",
            &data("ww.mcfg"),
            "-a",
            never.to_str().unwrap(),
            "-o",
            target.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(stdout(&o), "");
    assert_eq!(std::fs::read_to_string(&target).unwrap(), "%start S\n%empty\n");
}

#[test]
fn eval_applies_the_ranking() {
    let o = run(
        &[
            "eval",
            "-g",
            &data("ww.mcfg"),
            "-c",
            &data("final0.wfsa"),
            "-c",
            &data("count_ones.wfsa"),
        ],
        None,
    );
    assert_eq!(
        stdout(&o),
        "%start S\nS -> A.0 A.1\nA -> ( 1 , 1 )\nA -> ( 0 A.0 , 0 A.1 )\n"
    );
    // final0 has an unused non-final state, so it is flagged but still applied.
    assert!(String::from_utf8_lossy(&o.stderr).contains("final0 is not a well-formed constraint"));
    let o = run(&["eval", "-g", &data("ww.mcfg"), "-c", &data("vacuous.wfsa")], None);
    assert_eq!(
        stdout(&o),
        std::fs::read_to_string(data("ww.mcfg"))
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| format!("{l}\n"))
            .collect::<String>()
    );
}

#[test]
fn enumerate_both_kinds() {
    let out = stdout(&run(&["enumerate", "-g", &data("ww.mcfg"), "--max-len", "4"], None));
    assert_eq!(out, "00\t0\n0000\t0\n0101\t0\n1010\t0\n11\t0\n1111\t0\n");
    let out = stdout(&run(
        &["enumerate", "-a", &data("count_ones.wfsa"), "--max-len", "1"],
        None,
    ));
    assert_eq!(out, "\t0\n0\t0\n1\t1\n");
    assert!(!run(&["enumerate", "--max-len", "1"], None).status.success());
}

#[test]
fn encode_decode_round_trip() {
    let table = std::fs::read_to_string(data("cv_cvc.tiers")).unwrap();
    let flat = stdout(&run(&["encode", &data("cv_cvc.tiers")], None));
    assert_eq!(flat.trim().len(), 11 * 13);
    let o = run(&["decode", "--tiers", "C,V", "--check-identity"], Some(&flat));
    let rows: String = table
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect();
    assert_eq!(stdout(&o), rows);
    assert!(String::from_utf8_lossy(&o.stderr).contains("identity: ok"));
    let o = run(&["decode", "--plain", "C", "-"], Some("[-+-]-"));
    assert_eq!(stdout(&o), "C: [ - + - ] -\n");
    assert!(String::from_utf8_lossy(&o.stderr).contains("WARN"));
}

#[test]
fn gen_redup_output_parses() {
    let out = stdout(&run(
        &["gen-redup", "--tiers", "C,V", "--direction", "base-first"],
        None,
    ));
    let g = wmcfg::grammar_text::parse_grammar(&out).unwrap();
    assert_eq!(g.category("Rd1").unwrap().arity(), 3);
    assert!(!run(&["gen-redup", "--tiers", "C,C", "--direction", "red-first"], None)
        .status
        .success());
}

#[test]
fn malformed_input_fails() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.mcfg");
    std::fs::write(&bad, "S -> ( a ,\n").unwrap();
    let o = run(
        &["intersect", "-g", bad.to_str().unwrap(), "-a", &data("final0.wfsa")],
        None,
    );
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
    assert!(
        !run(&["intersect", "-g", "/nonexistent", "-a", &data("final0.wfsa")], None)
            .status
            .success()
    );
    assert!(!run(&["decode", "--tiers", "C"], Some("[-+")).status.success());
    assert!(!run(&["encode", "-"], Some("C: [x]\n")).status.success());
}
