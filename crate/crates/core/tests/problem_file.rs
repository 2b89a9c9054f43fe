use std::path::PathBuf;

use coulomb_glue_core::gluability::is_gluable;
use coulomb_glue_core::problem::{decide, problem_of, Flags, ProblemFile, TorusProblemDoc};
use coulomb_glue_core::Error;
use coulomb_glue_testkit::{random_torus_problem, rng};

fn fixture(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name);
    std::fs::read_to_string(path).unwrap()
}

const VALID: [(&str, bool); 7] = [
    ("chain.json", true),
    ("chain_explosion.json", true),
    ("loop_identity.json", false),
    ("partition_gluing_2_1.json", true),
    ("partition_gluing_2_2.json", true),
    ("partition_gluing_3_1.json", true),
    ("split_parallel.json", false),
];

#[test]
fn fixtures_round_trip() {
    for (name, _) in VALID {
        let doc = ProblemFile::parse(&fixture(name)).unwrap();
        let text = doc.to_json();
        let again = ProblemFile::parse(&text).unwrap();
        assert_eq!(doc, again, "{name}");
        assert_eq!(text, again.to_json(), "{name}");
    }
}

#[test]
fn fixture_verdicts() {
    for (name, expected) in VALID {
        let doc = ProblemFile::parse(&fixture(name)).unwrap();
        let r = decide(&doc, Flags::default(), 1).unwrap();
        assert_eq!(r.verdict, expected, "{name}");
    }
}

#[test]
fn dangling_edge_is_rejected() {
    let doc = ProblemFile::parse(&fixture("dangling_edge.json"));
    let err = doc
        .and_then(|d| decide(&d, Flags::default(), 1))
        .unwrap_err();
    assert!(matches!(err, Error::Validation(_)), "{err}");
}

#[test]
fn parse_errors_carry_a_position() {
    let err = ProblemFile::parse("{\n  \"quiver\": [1,\n").unwrap_err();
    assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    let err = ProblemFile::parse("{\"unknown\": 1}").unwrap_err();
    assert!(matches!(err, Error::Parse { .. }), "{err}");
}

#[test]
fn scalar_flavor_flag_glues_the_split_pair() {
    let doc = ProblemFile::parse(&fixture("split_parallel.json")).unwrap();
    let flags = Flags {
        scalar_flavor: true,
        ..Flags::default()
    };
    assert!(decide(&doc, flags, 1).unwrap().verdict);
    let p = problem_of(&doc, flags).unwrap();
    assert!(is_gluable(&p).unwrap().verdict);
}

#[test]
fn torus_problems_survive_serialization() {
    let mut r = rng(17);
    for _ in 0..100 {
        let p = random_torus_problem(&mut r);
        let w = p.weights();
        let weights = w
            .entries()
            .iter()
            .flat_map(|e| std::iter::repeat_n(e.weight.0.clone(), e.multiplicity as usize))
            .collect();
        let doc = ProblemFile {
            torus_problem: Some(TorusProblemDoc {
                source_blocks: p.restriction().source().blocks().to_vec(),
                target_blocks: p.restriction().target().blocks().to_vec(),
                restriction: p.restriction().matrix().to_rows(),
                weights,
                gauge_blocks: None,
                gauge: None,
            }),
            ..ProblemFile::default()
        };
        let back = ProblemFile::parse(&doc.to_json()).unwrap();
        assert_eq!(problem_of(&back, Flags::default()).unwrap(), p);
    }
}
