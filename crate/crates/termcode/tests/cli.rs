use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use termcode_core::casestudies::TABLE_NAMES;
use termcode_core::{count_solutions, parse_instance, Interpretation};

fn corpus() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/corpus")
}

fn golden(name: &str) -> String {
    fs::read_to_string(corpus().join("golden").join(name)).unwrap()
}

fn termcode(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_termcode"))
        .args(args)
        .env("TERMCODE_CORPUS", corpus())
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = termcode(args, "");
    assert_eq!(
        out.status.code(),
        Some(0),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    termcode(args, "").status.code().unwrap()
}

#[test]
fn documented_examples() {
    assert_eq!(ok(&["bound", "corpus/c5.tc"]), "5/2\n");
    assert_eq!(
        ok(&[
            "search",
            "corpus/sts.tc",
            "--n",
            "3",
            "--mode",
            "exhaustive"
        ]),
        "9 certified\n"
    );
    let empty = termcode(&["parse", "-"], "");
    assert_eq!(empty.status.code(), Some(0));
    assert!(empty.stdout.is_empty());
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["search", "corpus/sts.tc", "--n", "2", "--bogus"]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
    assert_eq!(code(&["graph", "corpus/c5.tc", "--format", "lp"]), 2);
    assert_eq!(code(&["case", "nope"]), 2);
    assert_eq!(code(&["search", "corpus/sts.tc", "--n", "9"]), 1);
    assert_eq!(code(&["bound", "/no/such/file.tc"]), 1);
    assert_eq!(
        termcode(&["parse", "-"], "eq f(x) = ;").status.code(),
        Some(1)
    );
}

#[test]
fn graph_goldens() {
    assert_eq!(ok(&["graph", "corpus/c5.tc"]), golden("c5.dot"));
    assert_eq!(
        ok(&["graph", "corpus/sdos1.tc", "--labelled"]),
        golden("sdos1-labelled.dot")
    );
    let tsv = ok(&["graph", "corpus/c5.tc", "--format", "tsv"]);
    assert_eq!(tsv.lines().count(), 10);
    assert!(tsv.lines().all(|l| l.split('\t').count() == 3));
}

#[test]
fn case_goldens() {
    for name in TABLE_NAMES.iter().filter(|&&n| n != "c5-bounds") {
        assert_eq!(
            ok(&["case", name]),
            golden(&format!("case-{name}.tsv")),
            "table {name}"
        );
    }
    assert_eq!(ok(&["case", "c5-bounds"]), golden("case-c5.tsv"));
    let row = ok(&["case", "relay", "--row", "3"]);
    assert_eq!(row.lines().count(), 3);
    assert!(row.lines().skip(1).all(|l| l.starts_with("3\t")));
    assert_eq!(ok(&["case", "list"]).lines().count(), TABLE_NAMES.len());
}

#[test]
fn local_search_is_byte_deterministic() {
    let args = [
        "search",
        "corpus/sdos1.tc",
        "--n",
        "4",
        "--mode",
        "local",
        "--seed",
        "3",
        "--format",
        "tsv",
    ];
    let first = ok(&args);
    assert_eq!(first, ok(&args));
    let mut threaded = args.to_vec();
    threaded.extend(["--threads", "2"]);
    assert_eq!(first, ok(&threaded));
    assert!(first.starts_with("n\tcount\tideal\tratio\tcertified\n4\t"));
}

#[test]
fn witness_files_rescore() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.interp");
    let p = path.to_str().unwrap();
    let out = ok(&[
        "search",
        "corpus/sts.tc",
        "--n",
        "4",
        "--mode",
        "local",
        "--target",
        "13",
        "--witness",
        p,
    ]);
    assert_eq!(out, "13 uncertified\n");
    let inst = parse_instance(&fs::read_to_string(corpus().join("sts.tc")).unwrap()).unwrap();
    let w =
        Interpretation::parse_text(&inst.signature, &fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(count_solutions(&inst, &w).unwrap().count, 13u32.into());
}

#[test]
fn strategies_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c5.strategy");
    let p = path.to_str().unwrap();
    let best = ok(&["guess", "corpus/c5.tc", "--n", "2", "--witness", p]);
    assert!(best.starts_with("2\t5\t"));
    assert_eq!(
        ok(&["guess", "corpus/c5.tc", "--n", "2", "--strategy", p]),
        best
    );
    assert_eq!(
        code(&["guess", "corpus/c5.tc", "--n", "3", "--strategy", p]),
        1
    );
}

#[test]
fn outputs_and_side_files() {
    let dir = tempfile::tempdir().unwrap();
    let lp = dir.path().join("c5.lp");
    let out = dir.path().join("bound.txt");
    ok(&[
        "bound",
        "corpus/c5.tc",
        "--pretty",
        "--emit-lp",
        lp.to_str().unwrap(),
        "-o",
        out.to_str().unwrap(),
    ]);
    assert!(fs::read_to_string(&out)
        .unwrap()
        .starts_with("optimum: 5/2\n"));
    assert!(fs::read_to_string(&lp).unwrap().contains("Maximize"));
    let ilp = ok(&["ilp", "corpus/sts.tc", "--n", "2"]);
    assert!(ilp.starts_with("\\ term coding 0-1 model"));
    assert!(ilp.ends_with("End\n"));
}

#[test]
fn transformations() {
    let nf = ok(&["normalise", "corpus/c5.tc"]);
    assert!(parse_instance(&nf)
        .unwrap()
        .equations
        .iter()
        .all(|e| e.lhs.depth() <= 1 && e.rhs.depth() <= 1));
    let div = ok(&["diversify", "corpus/sdos1.tc"]);
    assert!(div.contains("fun f@1/2;"));
    assert_eq!(ok(&["normalise", "corpus/sdos1.tc", "--emit", "div"]), div);
    let tsv = ok(&["normalise", "corpus/c5.tc", "--format", "tsv"]);
    assert!(tsv.starts_with("variable\torigin\n"));
    let canonical = ok(&["parse", "corpus/sts.tc"]);
    assert_eq!(
        termcode(&["parse", "-"], &canonical).stdout,
        canonical.as_bytes()
    );
}

#[test]
fn dispersion_and_corpus_override() {
    assert_eq!(
        ok(&["dispersion", "corpus/relay.tc", "--n", "2"]),
        "10 certified\n"
    );
    assert_eq!(
        code(&["dispersion", "corpus/relay.tc", "--n", "2", "--mode", "bnb"]),
        2
    );
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("sts.tc"),
        "var x y;\nfun f/2;\neq f(x,y) = x;\n",
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_termcode"))
        .args(["search", "corpus/sts.tc", "--n", "2"])
        .env("TERMCODE_CORPUS", dir.path())
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "4 certified\n");
}
