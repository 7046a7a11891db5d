//! End-to-end tests of the command-line binary: output formats, witnesses,
//! exit codes, environment overrides, determinism, and generated files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::atomic::{AtomicUsize, Ordering};

const BIN: &str = env!("CARGO_BIN_EXE_ulm-orbits");

const A1: &str = r#"{"ring":{"kind":"int","p_or_q":2},"multiplicities":{"1":1,"2":1}}"#;
const A2: &str = r#"{"ring":{"kind":"int","p_or_q":2},"multiplicities":{"1":1,"3":1}}"#;
const ZERO: &str = r#"{"ring":{"kind":"int","p_or_q":2},"multiplicities":{}}"#;

fn scratch_dir() -> PathBuf {
    static NEXT: AtomicUsize = AtomicUsize::new(0);
    let dir = std::env::temp_dir().join(format!(
        "ulm-orbits-cli-{}-{}",
        std::process::id(),
        NEXT.fetch_add(1, Ordering::Relaxed)
    ));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_file(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn run_with_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(BIN);
    // Isolate from any ambient override so the default cap applies.
    cmd.args(args).env_remove("ULM_ORBITS_BOUND");
    for (key, value) in env {
        cmd.env(key, value);
    }
    cmd.output().expect("binary runs")
}

fn run(args: &[&str]) -> Output {
    run_with_env(args, &[])
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn orbits_table_lists_every_orbit() {
    let dir = scratch_dir();
    let shape = write_file(&dir, "a1.json", A1);
    let out = run(&["orbits", "--shape", shape.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        stdout(&out),
        "orbit\tsize\tulm\tN\trepresentative\n\
         0\t1\tinf\t6\t0,0\n\
         1\t2\t0,inf\t4\t1,0\n\
         2\t4\t0,1,inf\t3\t0,1\n\
         3\t1\t1,inf\t5\t0,2\n"
    );

    let zero = write_file(&dir, "zero.json", ZERO);
    let out = run(&["orbits", "--shape", zero.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "orbit\tsize\tulm\tN\trepresentative\n0\t1\tinf\t0\t\n");

    // Pairs: one header plus the 19 orbits the oracle finds.
    let out = run(&["orbits", "--shape", shape.to_str().unwrap(), "-n", "2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).lines().count(), 20);
}

#[test]
fn orbits_json_is_deterministic_and_complete() {
    let dir = scratch_dir();
    let shape = write_file(&dir, "a1.json", A1);
    let args = ["orbits", "--shape", shape.to_str().unwrap(), "--json"];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout, "repeated runs must be byte-identical");

    let doc: serde_json::Value = serde_json::from_str(&stdout(&first)).unwrap();
    assert_eq!(doc["count"], 4);
    let orbits = doc["orbits"].as_array().unwrap();
    assert_eq!(orbits.len(), 4);
    assert_eq!(orbits[2]["ulm"], "0,1,inf");
    assert_eq!(orbits[2]["size"], 4);
    assert_eq!(orbits[2]["representative"][0]["coords"][0], serde_json::json!([2, 0, 1]));
}

#[test]
fn query_same_orbit_prints_answer_and_witness() {
    let dir = scratch_dir();
    let shape = write_file(&dir, "a1.json", A1);
    let out = run(&["query", "same-orbit", "--shape", shape.to_str().unwrap(), "0,1", "1,3"]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        stdout(&out),
        "true\nwitness: {\"images\":[{\"coords\":[[1,0,1]]},{\"coords\":[[1,0,1],[2,0,3]]}],\
         \"automorphism\":true}\n"
    );

    // A false answer still exits 0 and explains which direction fails.
    let out = run(&["query", "same-orbit", "--shape", shape.to_str().unwrap(), "1,0", "0,2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        stdout(&out),
        "false\nwitness: second tuple does not degenerate to first at level 1 \
         with coefficients 1\n"
    );
}

#[test]
fn query_degenerates_is_directional() {
    let dir = scratch_dir();
    let shape = write_file(&dir, "a1.json", A1);
    let forward =
        run(&["query", "degenerates", "--shape", shape.to_str().unwrap(), "1,0", "0,2"]);
    assert_eq!(code(&forward), 0);
    let text = stdout(&forward);
    assert!(text.starts_with("true\nwitness: "), "got {text:?}");
    let witness: serde_json::Value =
        serde_json::from_str(text.trim_start_matches("true\nwitness: ").trim()).unwrap();
    assert_eq!(witness["automorphism"], false);

    let reverse =
        run(&["query", "degenerates", "--shape", shape.to_str().unwrap(), "0,2", "1,0"]);
    assert_eq!(code(&reverse), 0);
    assert_eq!(
        stdout(&reverse),
        "false\nwitness: heights drop at level 1 with coefficients 1\n"
    );

    let reflexive =
        run(&["query", "degenerates", "--shape", shape.to_str().unwrap(), "1,0", "1,0"]);
    assert_eq!(code(&reflexive), 0);
    assert!(stdout(&reflexive).starts_with("true\n"));
}

#[test]
fn query_submodule_orbit_compares_generated_submodules() {
    let dir = scratch_dir();
    let shape = write_file(&dir, "a1.json", A1);
    let same = run(&[
        "query",
        "submodule-orbit",
        "--shape",
        shape.to_str().unwrap(),
        "1,0",
        "1,2",
    ]);
    assert_eq!(code(&same), 0);
    assert!(stdout(&same).starts_with("true\nwitness: "));

    // Both submodules have order 2 but sit at different heights.
    let different = run(&[
        "query",
        "submodule-orbit",
        "--shape",
        shape.to_str().unwrap(),
        "0,2",
        "1,0",
    ]);
    assert_eq!(code(&different), 0);
    assert_eq!(stdout(&different), "false\n");
}

#[test]
fn poset_dot_output_is_the_hasse_diagram() {
    let dir = scratch_dir();
    let shape = write_file(&dir, "a1.json", A1);
    let out = run(&["poset", "--shape", shape.to_str().unwrap(), "hf"]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        stdout(&out),
        "digraph poset {\n  rankdir=BT;\n  n0 [label=\"inf\"];\n  n1 [label=\"0,inf\"];\n  \
         n2 [label=\"0,1,inf\"];\n  n3 [label=\"1,inf\"];\n  n0 -> n3;\n  n1 -> n2;\n  \
         n3 -> n1;\n}\n"
    );

    // --dot sends the same bytes to a file and prints nothing.
    let target = dir.join("hf.dot");
    let filed = run(&[
        "poset",
        "--shape",
        shape.to_str().unwrap(),
        "hf",
        "--dot",
        target.to_str().unwrap(),
    ]);
    assert_eq!(code(&filed), 0);
    assert!(stdout(&filed).is_empty());
    assert_eq!(std::fs::read(&target).unwrap(), out.stdout);

    // The element view pairs each orbit with a concrete representative.
    let elements = run(&["poset", "--shape", shape.to_str().unwrap(), "elements"]);
    assert!(stdout(&elements).contains("n2 [label=\"0,1,inf [0,1]\"];"));

    let zero = write_file(&dir, "zero.json", ZERO);
    let empty = run(&["poset", "--shape", zero.to_str().unwrap(), "pf"]);
    assert_eq!(code(&empty), 0);
    assert_eq!(stdout(&empty), "digraph poset {\n  rankdir=BT;\n}\n");
}

#[test]
fn poset_json_labels_the_ideal_lattice() {
    let dir = scratch_dir();
    let shape = write_file(&dir, "a2.json", A2);
    let out = run(&["poset", "--shape", shape.to_str().unwrap(), "ideals", "--json"]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let mut nodes: Vec<&str> =
        doc["nodes"].as_array().unwrap().iter().map(|n| n.as_str().unwrap()).collect();
    nodes.sort_unstable();
    assert_eq!(
        nodes,
        ["{(0,1),(1,3)}", "{(0,1)}", "{(0,3)}", "{(1,3)}", "{(2,3)}", "{}"]
    );
    for pair in doc["covers"].as_array().unwrap() {
        let lo = pair[0].as_u64().unwrap();
        let hi = pair[1].as_u64().unwrap();
        assert!(lo < 6 && hi < 6 && lo != hi);
    }
}

#[test]
fn dictionary_translates_both_ways() {
    let dir = scratch_dir();
    let a1 = write_file(&dir, "a1.json", A1);
    let a2 = write_file(&dir, "a2.json", A2);

    let seq = run(&["dictionary", "--shape", a1.to_str().unwrap(), "kappa", "downset{(0,2)}"]);
    assert_eq!(code(&seq), 0);
    assert_eq!(stdout(&seq), "0,1,inf\nround-trip: ok\n");

    let empty = run(&["dictionary", "--shape", a1.to_str().unwrap(), "ideal", "(inf)"]);
    assert_eq!(code(&empty), 0);
    assert_eq!(stdout(&empty), "{}\nround-trip: ok\n");

    // A sequence with a gap picks up one generator per gap.
    let gap = run(&["dictionary", "--shape", a2.to_str().unwrap(), "ideal", "0,2,inf"]);
    assert_eq!(code(&gap), 0);
    assert_eq!(stdout(&gap), "{(0,1),(1,3)}\nround-trip: ok\n");

    // The same sequence is not admissible one shape over.
    let bad = run(&["dictionary", "--shape", a1.to_str().unwrap(), "ideal", "0,2,inf"]);
    assert_eq!(code(&bad), 2);
    assert!(stderr(&bad).contains("not admissible"));
}

#[test]
fn verify_reports_every_suite() {
    let dir = scratch_dir();
    let shape = write_file(&dir, "a1.json", A1);
    let out = run(&["verify", "--shape", shape.to_str().unwrap(), "-n", "2"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS ")).count(), 7);
    assert!(text.ends_with("result: pass\n"));

    let corrupt = write_file(&dir, "bad.json", "{\"ring\":");
    let out = run(&["verify", "--shape", corrupt.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn bound_flag_and_environment_control_the_cap() {
    let dir = scratch_dir();
    let shape = write_file(&dir, "a1.json", A1);
    let path = shape.to_str().unwrap();

    let flagged = run(&["orbits", "--shape", path, "--bound", "3"]);
    assert_eq!(code(&flagged), 3);
    assert!(stderr(&flagged).contains("bound"));

    let via_env = run_with_env(&["orbits", "--shape", path], &[("ULM_ORBITS_BOUND", "3")]);
    assert_eq!(code(&via_env), 3);

    // An explicit flag wins over the environment.
    let both = run_with_env(
        &["orbits", "--shape", path, "--bound", "1048576"],
        &[("ULM_ORBITS_BOUND", "3")],
    );
    assert_eq!(code(&both), 0);

    let junk = run_with_env(&["orbits", "--shape", path], &[("ULM_ORBITS_BOUND", "much")]);
    assert_eq!(code(&junk), 2);
}

#[test]
fn invalid_inputs_exit_2() {
    let dir = scratch_dir();
    let shape = write_file(&dir, "a1.json", A1);
    let path = shape.to_str().unwrap();

    let missing = run(&["orbits", "--shape", dir.join("nope.json").to_str().unwrap()]);
    assert_eq!(code(&missing), 2);

    let wrong_arity = run(&["query", "same-orbit", "--shape", path, "1", "0,0"]);
    assert_eq!(code(&wrong_arity), 2);

    let out_of_range = run(&["query", "same-orbit", "--shape", path, "9,9", "0,0"]);
    assert_eq!(code(&out_of_range), 2);

    let usage = run(&["no-such-command"]);
    assert_eq!(code(&usage), 2);
}

#[test]
fn decompose_splits_into_primary_shapes() {
    let dir = scratch_dir();
    let out_dir = dir.join("shapes");
    let out = run(&["decompose", "12", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        stdout(&out),
        format!(
            "p=2 -> {}\np=3 -> {}\n",
            out_dir.join("shape-p2.json").display(),
            out_dir.join("shape-p3.json").display()
        )
    );
    assert_eq!(
        std::fs::read_to_string(out_dir.join("shape-p2.json")).unwrap(),
        "{\"ring\":{\"kind\":\"int\",\"p_or_q\":2},\"multiplicities\":{\"2\":1}}\n"
    );
    assert_eq!(
        std::fs::read_to_string(out_dir.join("shape-p3.json")).unwrap(),
        "{\"ring\":{\"kind\":\"int\",\"p_or_q\":3},\"multiplicities\":{\"1\":1}}\n"
    );

    // 4 · 2 folds into a single p = 2 document; a generated document is a
    // valid input for the other commands.
    let out = run(&["decompose", "4", "2", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        std::fs::read_to_string(out_dir.join("shape-p2.json")).unwrap(),
        "{\"ring\":{\"kind\":\"int\",\"p_or_q\":2},\"multiplicities\":{\"1\":1,\"2\":1}}\n"
    );
    let reread = run(&[
        "orbits",
        "--shape",
        out_dir.join("shape-p2.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&reread), 0);
    assert_eq!(stdout(&reread).lines().count(), 5);

    let unit = run(&["decompose", "1"]);
    assert_eq!(code(&unit), 2);
}
