//! End-to-end checks of the command-line surface: exit codes, canonical
//! output, pipelines, and parity with direct library calls.

use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn bratteli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bratteli"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn bratteli_stdin(args: &[&str], input: &str) -> Output {
    use std::io::Write;
    use std::process::Stdio;
    let mut child = Command::new(env!("CARGO_BIN_EXE_bratteli"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary spawns");
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn validate_passes_on_the_worked_example() {
    let out = bratteli(&["validate", data("worked_example.bd").to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("result: valid"));
}

#[test]
fn validate_reports_violations_with_exit_1() {
    let out = bratteli_stdin(
        &["validate", "-"],
        "diagram bad\nlevel 1: v=2\nedges 1: v->w:1\nlevel 2: w=1\n",
    );
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("below the incoming weight"));
}

#[test]
fn parse_errors_exit_2_with_location() {
    let out = bratteli_stdin(&["validate", "-"], "diagram bad\nlevel 1: v=0\n");
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn telescope_reproduces_the_figure() {
    let out = bratteli(&[
        "telescope",
        "--keep",
        "1,3",
        data("telescoping_figure.bd").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("a0->a2:2"), "{text}");
    assert!(text.contains("a0->c2:2"), "{text}");
    assert!(text.contains("c0->c2:1"), "{text}");
    assert!(!text.contains("c0->a2"), "{text}");
}

#[test]
fn verify_prints_per_level_pass_lines() {
    let out = bratteli(&[
        "verify",
        "--depth",
        "3",
        data("worked_example.bd").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    for line in ["level 1: PASS", "level 2: PASS", "level 3: PASS", "result: PASS"] {
        assert!(text.contains(line), "{text}");
    }
}

#[test]
fn verify_structured_format_is_a_block() {
    let out = bratteli(&[
        "verify",
        "--depth",
        "3",
        "--format",
        "structured",
        data("worked_example.bd").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("verify {"), "{text}");
    assert!(text.contains("result = PASS"), "{text}");
}

#[test]
fn trim_refuses_a_scalar_quotient_with_exit_1() {
    let out = bratteli(&["trim", data("example_2_16.bd").to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("scalar quotient"), "{err}");
}

#[test]
fn realize_then_simulate_composes_through_a_pipe() {
    let realized = bratteli(&[
        "realize",
        "--depth",
        "3",
        data("worked_example.bd").to_str().unwrap(),
    ]);
    assert_eq!(code(&realized), 0);
    let doc = stdout(&realized);
    assert!(doc.contains("provenance depth 3"), "{doc}");
    let sim = bratteli_stdin(&["simulate", "--depth", "3", "-"], &doc);
    assert_eq!(code(&sim), 0, "{}", String::from_utf8_lossy(&sim.stderr));
    let text = stdout(&sim);
    assert!(text.contains("shape 2: v=8 w=7"), "{text}");
    assert!(text.contains("shape 3: x=9 y=22 z=16"), "{text}");
}

#[test]
fn realize_row_finite_emits_a_clean_graph() {
    let out = bratteli(&[
        "realize",
        "--depth",
        "4",
        "--row-finite",
        data("strict_chain.bd").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let doc = stdout(&out);
    let check = bratteli_stdin(&["validate", "-"], &doc);
    assert_eq!(code(&check), 0);
    let text = stdout(&check);
    assert!(text.contains("cycles: none"), "{text}");
    assert!(text.contains("sinks: none"), "{text}");
}

#[test]
fn decompose_sinks_reports_blocks_and_errors() {
    let out = bratteli(&["decompose-sinks", data("two_m2.g").to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("# summand l: 2"), "{text}");
    assert!(text.contains("# summand r: 2"), "{text}");

    let out = bratteli(&["decompose-sinks", data("m2.g").to_str().unwrap()]);
    assert!(stdout(&out).contains("# summand w: 2"));

    let out = bratteli(&["decompose-sinks", data("vw_family.g").to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("infinitely many sinks"), "{err}");
}

#[test]
fn classify_table_rows_from_files() {
    let out = bratteli(&["classify", data("uhf2.d").to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("EL: member"), "{text}");
    assert!(text.contains("graph: non_member"), "{text}");
    assert!(text.contains("ultragraph: member"), "{text}");
    assert!(text.contains("RFNS: non_member"), "{text}");

    let out = bratteli(&["classify", data("region_c_unital.d").to_str().unwrap()]);
    let text = stdout(&out);
    assert!(text.contains("EL: non_member [R6]"), "{text}");
    assert!(text.contains("graph: non_member"), "{text}");
    assert!(text.contains("ultragraph: member"), "{text}");
}

#[test]
fn classify_derives_from_a_diagram() {
    let out = bratteli(&["classify", data("example_2_16.bd").to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("EL: non_member"), "{text}");
    assert!(text.contains("RFNS: non_member"), "{text}");

    let out = bratteli(&["classify", data("strict_chain.bd").to_str().unwrap()]);
    let text = stdout(&out);
    for line in ["graph: member", "EL: member", "ultragraph: member", "RFNS: member"] {
        assert!(text.contains(line), "{text}");
    }
}

#[test]
fn find_chain_exit_codes() {
    let realized = stdout(&bratteli(&[
        "realize",
        "--depth",
        "3",
        data("worked_example.bd").to_str().unwrap(),
    ]));
    let found = bratteli_stdin(&["find-chain", "--n", "3", "-"], &realized);
    assert_eq!(code(&found), 0);
    assert!(stdout(&found).starts_with("chain: "));
    let unknown = bratteli_stdin(&["find-chain", "--n", "40", "-"], &realized);
    assert_eq!(code(&unknown), 3);
}

#[test]
fn conversions_compose() {
    // realized ultragraph -> Exel-Laca matrix -> dual graph
    let realized = stdout(&bratteli(&[
        "realize",
        "--depth",
        "3",
        data("worked_example.bd").to_str().unwrap(),
    ]));
    let matrix = bratteli_stdin(&["to-matrix", "-"], &realized);
    assert_eq!(code(&matrix), 0, "{}", String::from_utf8_lossy(&matrix.stderr));
    let mtext = stdout(&matrix);
    assert!(mtext.starts_with("matrix"), "{mtext}");
    let dual = bratteli_stdin(&["expand", "-"], &mtext);
    assert_eq!(code(&dual), 0, "{}", String::from_utf8_lossy(&dual.stderr));
    assert!(stdout(&dual).starts_with("graph"), "{}", stdout(&dual));

    // matrix -> canonical ultragraph round trip
    let ug = bratteli_stdin(&["to-ultragraph", "-"], &mtext);
    assert_eq!(code(&ug), 0);
    let back = bratteli_stdin(&["to-matrix", "-"], &stdout(&ug));
    assert_eq!(code(&back), 0);
}

#[test]
fn m2_unitize_adds_a_unit_vertex() {
    let out = bratteli(&["m2-unitize", data("el_small.u").to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("vertex u"), "{text}");
    assert!(text.contains("edge e_u: u -> { *all !u }"), "{text}");
    // Unitizing is itself pipeable.
    let twice = bratteli_stdin(&["m2-unitize", "-"], &text);
    assert_eq!(code(&twice), 0);
    assert!(stdout(&twice).contains("*all !u1"), "{}", stdout(&twice));
}

#[test]
fn gen_is_deterministic_and_verifiable() {
    let a = bratteli(&["gen", "--seed", "5", "--depth", "4"]);
    let b = bratteli(&["gen", "--seed", "5", "--depth", "4"]);
    assert_eq!(stdout(&a), stdout(&b));
    let verified = bratteli_stdin(&["verify", "--depth", "4", "-"], &stdout(&a));
    assert_eq!(code(&verified), 0, "{}", String::from_utf8_lossy(&verified.stderr));
}

#[test]
fn byte_identical_reruns() {
    for args in [
        vec!["verify", "--depth", "3"],
        vec!["realize", "--depth", "3"],
        vec!["classify"],
    ] {
        let mut full = args.clone();
        let path = data("worked_example.bd");
        full.push(path.to_str().unwrap());
        let a = bratteli(&full);
        let b = bratteli(&full);
        assert_eq!(stdout(&a), stdout(&b), "{args:?}");
        assert_eq!(code(&a), code(&b));
    }
}

/// The CLI is a thin wrapper: its classify output states exactly what the
/// library computes.
#[test]
fn classify_parity_with_the_library() {
    let text = std::fs::read_to_string(data("uhf2.d")).unwrap();
    let docs = bratteli::dsl::parse_all(&text).unwrap();
    let bratteli::dsl::Document::Descriptor(descriptor) = &docs[0] else {
        panic!("expected a descriptor");
    };
    let verdict = bratteli::classify::classify(descriptor).unwrap();
    let out = stdout(&bratteli(&["classify", data("uhf2.d").to_str().unwrap()]));
    for class in bratteli::classify::AlgClass::ALL {
        let status = verdict.status(class);
        assert!(
            out.contains(&format!("{}: {}", class.short(), status)),
            "{out}"
        );
    }
}

#[test]
fn ktilde_witness_files_parse_and_scan() {
    let out = bratteli(&["validate", data("ktilde.g").to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("infinite emitters: v"), "{text}");

    let out = bratteli(&["validate", data("m2ktilde.mx").to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("cycles: none within the represented depth"));

    let out = bratteli(&["validate", data("f2.g").to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("cycles: none"));
}
