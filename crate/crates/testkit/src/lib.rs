//! Seeded problem corpora and brute-force oracles for the test suites.
//!
//! The oracles avoid the library's decision path: rank is read off `2 x 2`
//! minors and separating cocharacters are found by scanning a box.

use std::collections::BTreeSet;

use coulomb_glue_core::gaugerep::WeightMultiset;
use coulomb_glue_core::gluability::GluabilityProblem;
use coulomb_glue_core::lattice::{CharacterVector, IntMatrix, TorusData, TorusMap};
use coulomb_glue_core::quiver::{
    finest_dismemberment, DimensionVector, Edge, QuiverMorphism, QuiverSpec,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn build(
    vertices: usize,
    edges: &[(usize, usize)],
    dims: &[usize],
) -> (QuiverSpec, DimensionVector) {
    let names: Vec<String> = (0..vertices).map(|i| format!("v{i}")).collect();
    let edges = edges
        .iter()
        .enumerate()
        .map(|(k, &(s, t))| Edge::new(format!("e{k}"), names[s].clone(), names[t].clone()))
        .collect();
    let q = QuiverSpec::new(names, edges).expect("generated quiver is valid");
    let d = DimensionVector::from_ordered(&q, dims).expect("one dim per vertex");
    (q, d)
}

/// Loop-free quiver with at most 5 vertices, 6 edges and dims at most 3.
pub fn random_loop_free_quiver(rng: &mut impl Rng) -> (QuiverSpec, DimensionVector) {
    let nv = rng.gen_range(1..=5);
    let ne = if nv < 2 { 0 } else { rng.gen_range(0..=6) };
    let edges: Vec<(usize, usize)> = (0..ne)
        .map(|_| {
            let s = rng.gen_range(0..nv);
            let mut t = rng.gen_range(0..nv - 1);
            if t >= s {
                t += 1;
            }
            (s, t)
        })
        .collect();
    let dims: Vec<usize> = (0..nv).map(|_| rng.gen_range(0..=3)).collect();
    build(nv, &edges, &dims)
}

#[derive(Clone, Debug)]
pub struct DismembermentCase {
    pub quiver: QuiverSpec,
    pub dims: DimensionVector,
    pub morphism: QuiverMorphism,
}

/// Random loop-free quivers with parallel edges reoriented to agree, each
/// with its finest dismemberment.
pub fn finest_corpus(seed: u64, count: usize) -> Vec<DismembermentCase> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let (q, d) = random_loop_free_quiver(&mut r);
            let q = q
                .normalize_orientation()
                .expect("flips keep the quiver valid");
            let fd = finest_dismemberment(&q, &d).expect("finest dismemberment exists");
            DismembermentCase {
                quiver: q,
                dims: d,
                morphism: fd.morphism,
            }
        })
        .collect()
}

/// Dismemberments that put one edge of a parallel pair on its own component.
pub fn counterexample_corpus(seed: u64, count: usize) -> Vec<DismembermentCase> {
    let mut r = rng(seed);
    (0..count).map(|_| counterexample(&mut r)).collect()
}

fn counterexample(r: &mut impl Rng) -> DismembermentCase {
    let nv = r.gen_range(2..=5);
    let (i, j) = {
        let mut ends: Vec<usize> = (0..nv).collect();
        ends.shuffle(r);
        (ends[0], ends[1])
    };
    // The parallel pair goes first; the second copy may point either way.
    let mut edges = vec![(i, j), if r.gen_bool(0.5) { (i, j) } else { (j, i) }];
    for _ in 0..r.gen_range(0..=4) {
        let s = r.gen_range(0..nv);
        let mut t = r.gen_range(0..nv - 1);
        if t >= s {
            t += 1;
        }
        edges.push((s, t));
    }
    let dims: Vec<usize> = (0..nv)
        .map(|v| {
            if v == i || v == j {
                r.gen_range(1..=3)
            } else {
                r.gen_range(0..=3)
            }
        })
        .collect();
    let (q, d) = build(nv, &edges, &dims);
    let fd = finest_dismemberment(&q, &d).expect("finest dismemberment exists");

    // Move edge e1 onto fresh copies of its endpoints.
    let moved = &q.edges()[1];
    let copy = |v: &str| format!("{v}@split");
    let mut vertices = fd.quiver.vertices().to_vec();
    vertices.push(copy(&moved.src));
    vertices.push(copy(&moved.dst));
    let edges: Vec<Edge> = fd
        .quiver
        .edges()
        .iter()
        .map(|e| {
            if e.id == moved.id {
                Edge::new(e.id.clone(), copy(&moved.src), copy(&moved.dst))
            } else {
                e.clone()
            }
        })
        .collect();
    let mut vertex_map = fd.morphism.vertex_map().clone();
    vertex_map.insert(copy(&moved.src), moved.src.clone());
    vertex_map.insert(copy(&moved.dst), moved.dst.clone());
    let source = QuiverSpec::new(vertices, edges).expect("split quiver is valid");
    let morphism = QuiverMorphism::new(
        source,
        q.clone(),
        vertex_map,
        fd.morphism.edge_map().clone(),
    )
    .expect("split morphism is compatible");
    DismembermentCase {
        quiver: q,
        dims: d,
        morphism,
    }
}

/// Random block sizes summing to `rank`, each at most 3.
pub fn random_blocks(rng: &mut impl Rng, rank: usize) -> Vec<usize> {
    let mut blocks = Vec::new();
    let mut left = rank;
    while left > 0 {
        let b = rng.gen_range(1..=left.min(3));
        blocks.push(b);
        left -= b;
    }
    blocks
}

fn small_vector(rng: &mut impl Rng, len: usize) -> Vec<i64> {
    (0..len).map(|_| rng.gen_range(-1..=1)).collect()
}

/// Problem on a torus of rank at most 5 with at most 12 distinct weights,
/// entries in `{-1, 0, 1}`, full gauge torus.
pub fn random_torus_problem(rng: &mut impl Rng) -> GluabilityProblem {
    let r = rng.gen_range(1..=5);
    let s = rng.gen_range(0..=r);
    let mut m = IntMatrix::zeros(r, s);
    for i in 0..r {
        for j in 0..s {
            m.set(i, j, rng.gen_range(-1..=1));
        }
    }
    let restriction = TorusMap::new(
        TorusData::with_blocks(random_blocks(rng, s)),
        TorusData::with_blocks(random_blocks(rng, r)),
        m,
    )
    .expect("shapes agree");
    let count = rng.gen_range(1..=12);
    let weights = WeightMultiset::from_weights(
        r,
        (0..count).map(|_| (CharacterVector(small_vector(rng, r)), 1)),
    )
    .expect("lengths agree");
    GluabilityProblem::with_full_gauge(weights, restriction).expect("tori agree")
}

/// Injective map from a lower-rank torus into `torus` (rank 0 allowed).
pub fn random_proper_sublattice(rng: &mut impl Rng, torus: &TorusData) -> TorusMap {
    let r = torus.rank();
    assert!(r > 0, "a rank-0 torus has no proper sublattice");
    loop {
        let k = rng.gen_range(0..r);
        let mut m = IntMatrix::zeros(r, k);
        for i in 0..r {
            for j in 0..k {
                m.set(i, j, rng.gen_range(-2..=2));
            }
        }
        if m.rank() == k {
            return TorusMap::new(TorusData::split(k), torus.clone(), m).expect("shapes agree");
        }
    }
}

/// All `2 x 2` minors vanish.
pub fn rank_le_one_by_minors(a: &[i64], b: &[i64]) -> bool {
    (0..a.len()).all(|i| (i + 1..a.len()).all(|j| a[i] * b[j] == a[j] * b[i]))
}

fn forms(p: &GluabilityProblem) -> (Vec<&CharacterVector>, Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let support: Vec<&CharacterVector> = p.weights().support().collect();
    let restricted = support
        .iter()
        .map(|x| {
            p.restriction()
                .matrix()
                .apply_transpose(&x.0)
                .expect("rank agrees")
        })
        .collect();
    let gauge_forms = support
        .iter()
        .map(|x| {
            p.gauge()
                .matrix()
                .apply_transpose(&x.0)
                .expect("rank agrees")
        })
        .collect();
    (support, restricted, gauge_forms)
}

/// Two nonzero linear forms take opposite signs somewhere unless one is a
/// positive multiple of the other.
pub fn opposite_signs_possible(a: &[i64], b: &[i64]) -> bool {
    let nonzero = |v: &[i64]| v.iter().any(|&x| x != 0);
    if !nonzero(a) || !nonzero(b) {
        return false;
    }
    // Proportional nonzero forms share a nonzero coordinate; its sign decides.
    !rank_le_one_by_minors(a, b) || a.iter().zip(b).any(|(x, y)| x * y < 0)
}

/// Bad pairs from the closed-form sign test, exact on any gauge lattice.
pub fn closed_form_bad_pairs(
    p: &GluabilityProblem,
) -> BTreeSet<(CharacterVector, CharacterVector)> {
    let (support, restricted, gauge_forms) = forms(p);
    let mut found = BTreeSet::new();
    for i in 0..support.len() {
        for j in i..support.len() {
            if rank_le_one_by_minors(&restricted[i], &restricted[j])
                && opposite_signs_possible(&gauge_forms[i], &gauge_forms[j])
            {
                found.insert((support[i].clone(), support[j].clone()));
            }
        }
    }
    found
}

/// Bad pairs found by scanning every `μ` in `[-bound, bound]^g` on the gauge
/// torus, as `(xi1, xi2)` with `xi1 <= xi2` in the weight order.
pub fn brute_force_bad_pairs(
    p: &GluabilityProblem,
    bound: i64,
) -> BTreeSet<(CharacterVector, CharacterVector)> {
    let (support, restricted, gauge_forms) = forms(p);
    let mut candidates: Vec<(usize, usize)> = Vec::new();
    for i in 0..support.len() {
        for j in i..support.len() {
            if rank_le_one_by_minors(&restricted[i], &restricted[j]) {
                candidates.push((i, j));
            }
        }
    }
    let g = p.gauge().source().rank();
    let mut found = BTreeSet::new();
    let mut mu = vec![-bound; g];
    loop {
        let signs: Vec<i64> = gauge_forms
            .iter()
            .map(|f| f.iter().zip(&mu).map(|(a, b)| a * b).sum::<i64>().signum())
            .collect();
        candidates.retain(|&(i, j)| {
            if signs[i] * signs[j] < 0 {
                found.insert((i, j));
                false
            } else {
                true
            }
        });
        let mut k = g;
        loop {
            if k == 0 {
                return found
                    .into_iter()
                    .map(|(i, j)| (support[i].clone(), support[j].clone()))
                    .collect();
            }
            k -= 1;
            if mu[k] < bound {
                mu[k] += 1;
                break;
            }
            mu[k] = -bound;
        }
    }
}
