use std::path::PathBuf;
use std::process::{Command, Output};

use coulomb_glue_core::problem::ProblemFile;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .to_str()
        .unwrap()
        .to_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coulomb-glue"))
        .args(args)
        .env("COULOMB_GLUE_THREADS", "1")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn exit_codes() {
    let cases = [
        ("chain.json", 0),
        ("split_parallel.json", 1),
        ("loop_identity.json", 1),
        ("dangling_edge.json", 2),
        ("partition_gluing_2_2.json", 0),
        ("chain_explosion.json", 0),
    ];
    for (name, code) in cases {
        let o = run(&["check-gluable", &fixture(name)]);
        assert_eq!(o.status.code(), Some(code), "{name}");
    }
    assert_eq!(
        run(&["check-gluable", "/nonexistent.json"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn flags_change_the_verdict() {
    let file = fixture("split_parallel.json");
    assert_eq!(
        run(&["check-gluable", "--scalar-flavor", &file])
            .status
            .code(),
        Some(0)
    );
}

#[test]
fn bad_thread_count_is_an_input_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_coulomb-glue"))
        .args(["check-gluable", &fixture("chain.json")])
        .env("COULOMB_GLUE_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn negative_verdict_prints_a_witness() {
    let o = run(&["check-gluable", &fixture("split_parallel.json")]);
    let text = stdout(&o);
    assert!(text.starts_with("not gluable"), "{text}");
    assert!(text.contains("mu="), "{text}");
    let o = run(&["check-gluable", "--json", &fixture("split_parallel.json")]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], false);
    assert!(!v["witnesses"].as_array().unwrap().is_empty());
}

#[test]
fn verify_is_consistent_on_fixtures() {
    for name in [
        "chain.json",
        "split_parallel.json",
        "partition_gluing_2_1.json",
    ] {
        let o = run(&["verify", &fixture(name)]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stdout(&o));
        assert!(stdout(&o).contains("consistent up to bound 2"));
    }
}

#[test]
fn constructed_quivers_parse_back() {
    let cases: [&[&str]; 3] = [
        &["construct", "partition-quiver", "4", "2,2"],
        &["construct", "a-legs", "3,1"],
        &[
            "construct",
            "comet",
            "--genus",
            "1",
            "--dim",
            "3",
            "--puncture",
            "2,1",
            "--puncture",
            "1,1,1",
        ],
    ];
    for args in cases {
        let o = run(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}");
        let text = stdout(&o);
        let doc = ProblemFile::parse(&text).unwrap();
        assert_eq!(doc.to_json(), text);
        doc.quiver().unwrap();
    }
    let o = run(&["construct", "partition-quiver", "5", "2,2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn finest_dismemberment_of_the_chain() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["construct", "dismember-finest", &fixture("chain.json")]);
    assert_eq!(o.status.code(), Some(0));
    let doc = ProblemFile::parse(&stdout(&o)).unwrap();
    let d = doc.dismemberment.as_ref().unwrap();
    // Two edges, each on its own component.
    assert_eq!(d.quiver.vertices.len(), 4);
    assert_eq!(d.quiver.edges.len(), 2);
    let path = dir.path().join("finest.json");
    std::fs::write(&path, doc.to_json()).unwrap();
    let o = run(&["check-gluable", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn explode_splits_the_top_vertex() {
    let o = run(&["construct", "explode", &fixture("chain_explosion.json")]);
    assert_eq!(o.status.code(), Some(0));
    let doc = ProblemFile::parse(&stdout(&o)).unwrap();
    let (q, d) = doc.quiver().unwrap();
    assert_eq!(d.get("xc4b1") + d.get("xc4b2"), 4);
    assert_eq!(q.vertices().len(), 5);
}
