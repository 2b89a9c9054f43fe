//! JSON problem files.
//!
//! ```json
//! {
//!   "quiver": {"vertices": ["1", "2"], "edges": [{"id": "a", "src": "1", "dst": "2"}]},
//!   "dims": {"1": 1, "2": 1},
//!   "dismemberment": {"quiver": {...}, "vertex_map": {...}, "edge_map": {...}},
//!   "flags": {"quotient_scalar": true}
//! }
//! ```
//!
//! Instead of a dismemberment a file may carry an `explosion` (parts per
//! vertex, decided along the Levi inclusion), a `construction` request, or a
//! raw `torus_problem`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::constructions::{partition_gluing_map, Partition, PunctureData};
use crate::error::{validation, Error, Result};
use crate::gaugerep::{torus_map_of_explosion, weights_of_quiver_rep, WeightMultiset};
use crate::gluability::{
    after_scalar_problem, gluable_after_scalar, gluable_for_quiver_dismemberment, is_gluable_with,
    problem_for_morphism, DecideOptions, DismembermentOptions, GluabilityProblem, GluabilityReport,
};
use crate::lattice::{CharacterVector, IntMatrix, TorusData, TorusMap};
use crate::quiver::{explode, DimensionVector, Edge, QuiverMorphism, QuiverSpec};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuiverDoc {
    pub vertices: Vec<String>,
    #[serde(default)]
    pub edges: Vec<Edge>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DismembermentDoc {
    pub quiver: QuiverDoc,
    pub vertex_map: BTreeMap<String, String>,
    pub edge_map: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplosionDoc {
    /// Exploded dimensions per vertex; unlisted vertices stay whole.
    pub parts: BTreeMap<String, Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ConstructionDoc {
    /// The star quiver glued from legs and an exploded chain.
    PartitionGluing {
        parts: Partition,
    },
    PartitionQuiver {
        parts: Partition,
    },
    ALegs {
        parts: Partition,
    },
    Comet {
        genus: usize,
        dim: usize,
        #[serde(default)]
        punctures: Vec<PunctureData>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorusProblemDoc {
    /// Block sizes of `T̃_H`.
    pub source_blocks: Vec<usize>,
    /// Block sizes of `T̃_G`.
    pub target_blocks: Vec<usize>,
    /// Cocharacter matrix, one row per `T̃_G` coordinate.
    pub restriction: Vec<Vec<i64>>,
    /// Weights on `T̃_G`; repeats add multiplicity.
    pub weights: Vec<Vec<i64>>,
    /// Gauge torus `T_G`; the whole of `T̃_G` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauge_blocks: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauge: Option<Vec<Vec<i64>>>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Flags {
    pub scalar_flavor: bool,
    pub quotient_scalar: bool,
    pub normalize_orientation: bool,
}

impl Flags {
    pub fn is_default(&self) -> bool {
        *self == Flags::default()
    }

    pub fn union(self, other: Flags) -> Flags {
        Flags {
            scalar_flavor: self.scalar_flavor || other.scalar_flavor,
            quotient_scalar: self.quotient_scalar || other.quotient_scalar,
            normalize_orientation: self.normalize_orientation || other.normalize_orientation,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quiver: Option<QuiverDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<BTreeMap<String, usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dismemberment: Option<DismembermentDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub explosion: Option<ExplosionDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub construction: Option<ConstructionDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torus_problem: Option<TorusProblemDoc>,
    #[serde(default, skip_serializing_if = "Flags::is_default")]
    pub flags: Flags,
}

/// Attach a location to validation messages.
fn at(location: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Validation(m) => Error::Validation(format!("{location}: {m}")),
        Error::Dimension { expected, found } => Error::Validation(format!(
            "{location}: expected length {expected}, found {found}"
        )),
        other => other,
    }
}

impl QuiverDoc {
    pub fn from_quiver(q: &QuiverSpec) -> Self {
        QuiverDoc {
            vertices: q.vertices().to_vec(),
            edges: q.edges().to_vec(),
        }
    }

    pub fn to_quiver(&self) -> Result<QuiverSpec> {
        QuiverSpec::new(self.vertices.clone(), self.edges.clone())
    }
}

/// What a problem file asks to decide.
#[derive(Clone, Debug)]
pub enum Task {
    Dismemberment {
        quiver: QuiverSpec,
        dims: DimensionVector,
        morphism: QuiverMorphism,
    },
    Torus(GluabilityProblem),
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    /// Pretty JSON with sorted map keys and a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("problem files always serialize");
        s.push('\n');
        s
    }

    pub fn from_quiver(q: &QuiverSpec, dims: &DimensionVector) -> Self {
        ProblemFile {
            quiver: Some(QuiverDoc::from_quiver(q)),
            dims: Some(dims.as_map().clone()),
            ..Default::default()
        }
    }

    /// The quiver and its dimension vector.
    pub fn quiver(&self) -> Result<(QuiverSpec, DimensionVector)> {
        let doc = self
            .quiver
            .as_ref()
            .ok_or_else(|| validation("missing `quiver`"))?;
        let q = doc.to_quiver().map_err(at("quiver"))?;
        let dims = self
            .dims
            .clone()
            .ok_or_else(|| validation("missing `dims`"))?;
        let d = DimensionVector::new(&q, dims).map_err(at("dims"))?;
        Ok((q, d))
    }

    fn task_count(&self) -> usize {
        [
            self.dismemberment.is_some(),
            self.explosion.is_some(),
            self.construction.is_some(),
            self.torus_problem.is_some(),
        ]
        .iter()
        .filter(|x| **x)
        .count()
    }

    /// The gluability task described by the file.
    pub fn task(&self, quotient_scalar: bool) -> Result<Task> {
        if self.task_count() != 1 {
            return Err(validation(
                "exactly one of `dismemberment`, `explosion`, `construction`, `torus_problem` is required",
            ));
        }
        if let Some(d) = &self.dismemberment {
            let (quiver, dims) = self.quiver()?;
            let source = d.quiver.to_quiver().map_err(at("dismemberment.quiver"))?;
            let morphism = QuiverMorphism::new(
                source,
                quiver.clone(),
                d.vertex_map.clone(),
                d.edge_map.clone(),
            )
            .map_err(at("dismemberment"))?;
            return Ok(Task::Dismemberment {
                quiver,
                dims,
                morphism,
            });
        }
        if let Some(t) = &self.torus_problem {
            return Ok(Task::Torus(t.to_problem().map_err(at("torus_problem"))?));
        }
        match &self.construction {
            Some(ConstructionDoc::PartitionGluing { parts }) => {
                let g = partition_gluing_map(parts).map_err(at("construction"))?;
                Ok(Task::Torus(g.problem(quotient_scalar)?))
            }
            Some(_) => Err(validation(
                "construction: only `partition-gluing` describes a gluability problem",
            )),
            None => {
                // Levi inclusion of the exploded torus, with the weights of N_Q.
                let (quiver, dims) = self.quiver()?;
                let parts = &self.explosion.as_ref().expect("counted above").parts;
                let x = explode(&quiver, &dims, parts).map_err(at("explosion"))?;
                let weights = weights_of_quiver_rep(&quiver, &dims)?;
                let levi = torus_map_of_explosion(&x)?;
                Ok(Task::Torus(if quotient_scalar {
                    GluabilityProblem::quotient_by_scalars(&weights, &levi)?
                } else {
                    GluabilityProblem::with_full_gauge(weights, levi)?
                }))
            }
        }
    }
}

impl TorusProblemDoc {
    pub fn to_problem(&self) -> Result<GluabilityProblem> {
        let source = TorusData::with_blocks(self.source_blocks.clone());
        let target = TorusData::with_blocks(self.target_blocks.clone());
        let matrix = matrix_of(&self.restriction, target.rank(), source.rank())
            .map_err(at("restriction"))?;
        let restriction = TorusMap::new(source, target.clone(), matrix)?;
        let weights = WeightMultiset::from_weights(
            target.rank(),
            self.weights.iter().map(|w| (CharacterVector(w.clone()), 1)),
        )
        .map_err(at("weights"))?;
        let gauge = match (&self.gauge_blocks, &self.gauge) {
            (None, None) => TorusMap::identity(target),
            (Some(blocks), Some(rows)) => {
                let g = TorusData::with_blocks(blocks.clone());
                let m = matrix_of(rows, target.rank(), g.rank()).map_err(at("gauge"))?;
                TorusMap::new(g, target, m)?
            }
            _ => {
                return Err(validation(
                    "`gauge` and `gauge_blocks` must be given together",
                ))
            }
        };
        GluabilityProblem::new(weights, restriction, gauge)
    }
}

fn matrix_of(rows: &[Vec<i64>], r: usize, c: usize) -> Result<IntMatrix> {
    if rows.len() != r {
        return Err(validation(format!(
            "expected {r} rows, found {}",
            rows.len()
        )));
    }
    let mut m = IntMatrix::zeros(r, c);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != c {
            return Err(validation(format!(
                "row {i} has {} entries, expected {c}",
                row.len()
            )));
        }
        for (j, x) in row.iter().enumerate() {
            m.set(i, j, *x);
        }
    }
    Ok(m)
}

/// Decide the file's task under the given flags.
pub fn decide(file: &ProblemFile, flags: Flags, threads: usize) -> Result<GluabilityReport> {
    let flags = file.flags.union(flags);
    let problem = match file.task(flags.quotient_scalar)? {
        Task::Dismemberment {
            quiver,
            dims,
            morphism,
        } => {
            if !flags.scalar_flavor {
                let opts = DismembermentOptions {
                    quotient_scalar: flags.quotient_scalar,
                    normalize_orientation: flags.normalize_orientation,
                    threads,
                };
                return gluable_for_quiver_dismemberment(&quiver, &dims, &morphism, opts);
            }
            let morphism = if flags.normalize_orientation {
                morphism.normalize_orientation()?
            } else {
                morphism
            };
            problem_for_morphism(&morphism, &dims, flags.quotient_scalar)?
        }
        Task::Torus(p) => p,
    };
    if flags.scalar_flavor {
        gluable_after_scalar(&problem)
    } else {
        is_gluable_with(&problem, DecideOptions { threads })
    }
}

/// The gluability problem [`decide`] settles, for cross-checking.
pub fn problem_of(file: &ProblemFile, flags: Flags) -> Result<GluabilityProblem> {
    let flags = file.flags.union(flags);
    let p = match file.task(flags.quotient_scalar)? {
        Task::Dismemberment { dims, morphism, .. } => {
            let morphism = if flags.normalize_orientation {
                morphism.normalize_orientation()?
            } else {
                morphism
            };
            problem_for_morphism(&morphism, &dims, flags.quotient_scalar)?
        }
        Task::Torus(p) => p,
    };
    if flags.scalar_flavor {
        after_scalar_problem(&p)
    } else {
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CHAIN: &str = r#"{
        "quiver": {"vertices": ["1", "2", "3"],
                   "edges": [{"id": "a", "src": "1", "dst": "2"}, {"id": "b", "src": "2", "dst": "3"}]},
        "dims": {"1": 1, "2": 2, "3": 1},
        "dismemberment": {
            "quiver": {"vertices": ["1@1~2", "2@1~2", "2@2~3", "3@2~3"],
                       "edges": [{"id": "a", "src": "1@1~2", "dst": "2@1~2"},
                                 {"id": "b", "src": "2@2~3", "dst": "3@2~3"}]},
            "vertex_map": {"1@1~2": "1", "2@1~2": "2", "2@2~3": "2", "3@2~3": "3"},
            "edge_map": {"a": "a", "b": "b"}
        }
    }"#;

    #[test]
    fn chain_file_round_trips_and_decides() {
        let f = ProblemFile::parse(CHAIN).unwrap();
        assert_eq!(ProblemFile::parse(&f.to_json()).unwrap(), f);
        assert!(decide(&f, Flags::default(), 0).unwrap().verdict);
    }

    #[test]
    fn unknown_key_rejected_with_location() {
        let err = ProblemFile::parse("{\n  \"quiver\": {\"vertices\": []},\n  \"bogus\": 1\n}")
            .unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dangling_edge_is_validation_error() {
        let text = CHAIN.replace(r#""dst": "3"}]"#, r#""dst": "9"}]"#);
        let f = ProblemFile::parse(&text).unwrap();
        let err = decide(&f, Flags::default(), 0).unwrap_err();
        assert!(
            matches!(&err, Error::Validation(m) if m.starts_with("quiver:")),
            "{err}"
        );
    }

    #[test]
    fn torus_problem_file() {
        let text = r#"{"torus_problem": {
            "source_blocks": [1, 1], "target_blocks": [1, 1, 1, 1],
            "restriction": [[1, 0], [0, 1], [1, 0], [0, 1]],
            "weights": [[-1, 1, 0, 0], [0, 0, -1, 1]]}}"#;
        let f = ProblemFile::parse(text).unwrap();
        let r = decide(&f, Flags::default(), 2).unwrap();
        assert!(!r.verdict);
        let r = decide(
            &f,
            Flags {
                scalar_flavor: true,
                ..Default::default()
            },
            0,
        )
        .unwrap();
        assert!(r.verdict);
    }

    #[test]
    fn construction_file() {
        let f = ProblemFile::parse(
            r#"{"construction": {"kind": "partition-gluing", "parts": [2, 2]}}"#,
        )
        .unwrap();
        assert!(
            decide(
                &f,
                Flags {
                    quotient_scalar: true,
                    ..Default::default()
                },
                0
            )
            .unwrap()
            .verdict
        );
        let bad =
            ProblemFile::parse(r#"{"construction": {"kind": "partition-gluing", "parts": [0]}}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn task_must_be_unique() {
        let f = ProblemFile::parse(r#"{"quiver": {"vertices": ["a"]}, "dims": {"a": 1}}"#).unwrap();
        assert!(matches!(
            decide(&f, Flags::default(), 0),
            Err(Error::Validation(_))
        ));
    }
}
