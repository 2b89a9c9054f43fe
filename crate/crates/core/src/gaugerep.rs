//! Gauge tori of quiver gauge groups, weights of quiver representations and
//! the torus maps induced by dismemberments, explosions and scalar quotients.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, validation, Error, Result};
use crate::lattice::{
    quotient_split, CharacterVector, CocharacterVector, IntMatrix, QuotientSplit, TorusData,
    TorusMap,
};
use crate::quiver::{is_dismemberment, DimensionVector, Explosion, QuiverMorphism, QuiverSpec};

/// Maximal torus of `prod_i GL(n_i)`, one block per vertex in vertex order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaugeTorus {
    vertices: Vec<String>,
    offsets: BTreeMap<String, (usize, usize)>,
    torus: TorusData,
}

impl GaugeTorus {
    pub fn new(q: &QuiverSpec, dims: &DimensionVector) -> Self {
        let mut offsets = BTreeMap::new();
        let mut start = 0;
        let mut blocks = Vec::with_capacity(q.vertices().len());
        for v in q.vertices() {
            let n = dims.get(v);
            offsets.insert(v.clone(), (start, n));
            blocks.push(n);
            start += n;
        }
        GaugeTorus {
            vertices: q.vertices().to_vec(),
            offsets,
            torus: TorusData::with_blocks(blocks),
        }
    }

    pub fn torus(&self) -> &TorusData {
        &self.torus
    }

    pub fn rank(&self) -> usize {
        self.torus.rank()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    /// Global index of coordinate `a` (0-based) of vertex `v`.
    pub fn coord(&self, v: &str, a: usize) -> usize {
        let (start, n) = self.offsets[v];
        debug_assert!(a < n);
        start + a
    }

    pub fn dim(&self, v: &str) -> usize {
        self.offsets[v].1
    }

    /// Label `(vertex, a)` of every coordinate, `a` 1-based.
    pub fn labels(&self) -> Vec<(String, usize)> {
        self.vertices
            .iter()
            .flat_map(|v| (1..=self.dim(v)).map(move |a| (v.clone(), a)))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WeightEntry {
    pub weight: CharacterVector,
    pub multiplicity: u64,
}

/// Weights of a torus representation, deduplicated and sorted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightMultiset {
    rank: usize,
    entries: Vec<WeightEntry>,
    scalar_flavor: bool,
}

impl WeightMultiset {
    pub fn empty(rank: usize) -> Self {
        WeightMultiset {
            rank,
            entries: Vec::new(),
            scalar_flavor: false,
        }
    }

    /// Collect weights with multiplicities, merging repeats.
    pub fn from_weights<I>(rank: usize, weights: I) -> Result<Self>
    where
        I: IntoIterator<Item = (CharacterVector, u64)>,
    {
        let mut merged: BTreeMap<CharacterVector, u64> = BTreeMap::new();
        for (w, m) in weights {
            check_len(rank, w.len())?;
            if m == 0 {
                continue;
            }
            let slot = merged.entry(w).or_insert(0);
            *slot = slot
                .checked_add(m)
                .ok_or(Error::Overflow("weight multiplicity"))?;
        }
        let entries = merged
            .into_iter()
            .map(|(weight, multiplicity)| WeightEntry {
                weight,
                multiplicity,
            })
            .collect();
        Ok(WeightMultiset {
            rank,
            entries,
            scalar_flavor: false,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn entries(&self) -> &[WeightEntry] {
        &self.entries
    }

    pub fn scalar_flavor(&self) -> bool {
        self.scalar_flavor
    }

    pub fn support(&self) -> impl Iterator<Item = &CharacterVector> {
        self.entries.iter().map(|e| &e.weight)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_multiplicity(&self) -> u64 {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }

    pub fn multiplicity(&self, w: &CharacterVector) -> u64 {
        self.entries
            .binary_search_by(|e| e.weight.cmp(w))
            .map_or(0, |i| self.entries[i].multiplicity)
    }

    /// Apply `f` to every weight and re-merge. The flavor flag is kept.
    pub fn map_weights<F>(&self, rank: usize, mut f: F) -> Result<WeightMultiset>
    where
        F: FnMut(&CharacterVector) -> Result<CharacterVector>,
    {
        let mapped = self
            .entries
            .iter()
            .map(|e| Ok((f(&e.weight)?, e.multiplicity)))
            .collect::<Result<Vec<_>>>()?;
        let mut out = WeightMultiset::from_weights(rank, mapped)?;
        out.scalar_flavor = self.scalar_flavor;
        Ok(out)
    }

    /// Restrict every weight along `map` (which must land on this torus).
    pub fn restrict(&self, map: &TorusMap) -> Result<WeightMultiset> {
        check_len(self.rank, map.target().rank())?;
        self.map_weights(map.source().rank(), |w| map.restrict_character(w))
    }
}

/// Weights of `N_Q = ⊕_{i->j} Hom(C^{n_i}, C^{n_j})` on the gauge torus.
///
/// An edge `i -> j` contributes `-e_{i,a} + e_{j,b}`; on a loop the `a = b`
/// terms give zero weights.
pub fn weights_of_quiver_rep(q: &QuiverSpec, dims: &DimensionVector) -> Result<WeightMultiset> {
    let t = GaugeTorus::new(q, dims);
    let r = t.rank();
    let mut weights = Vec::new();
    for e in q.edges() {
        for a in 0..t.dim(&e.src) {
            for b in 0..t.dim(&e.dst) {
                let mut w = vec![0; r];
                w[t.coord(&e.src, a)] -= 1;
                w[t.coord(&e.dst, b)] += 1;
                weights.push((CharacterVector(w), 1));
            }
        }
    }
    WeightMultiset::from_weights(r, weights)
}

/// Append the scalar flavor coordinate, on which every weight is 1.
pub fn add_scalar_flavor(w: &WeightMultiset) -> Result<WeightMultiset> {
    if w.scalar_flavor {
        return Err(validation("scalar flavor already present"));
    }
    let mut out = w.map_weights(w.rank + 1, |x| {
        let mut c = x.0.clone();
        c.push(1);
        Ok(CharacterVector(c))
    })?;
    out.scalar_flavor = true;
    Ok(out)
}

/// Diagonal torus map `T_Q -> T_{Q'}` of a morphism `Q' -> Q`: coordinate
/// `(i, a)` goes to the sum of `(j, a)` over the fiber of `i`.
///
/// Only needs `dims_source = dims_target ∘ γ`, not a dismemberment.
pub fn diagonal_torus_map(
    gamma: &QuiverMorphism,
    dims_target: &DimensionVector,
    dims_source: &DimensionVector,
) -> Result<TorusMap> {
    let (q, qc) = (gamma.target(), gamma.source());
    for j in qc.vertices() {
        let expected = dims_target.get(gamma.map_vertex(j));
        if dims_source.get(j) != expected {
            return Err(validation(format!(
                "dimension {} at {j:?} differs from {expected} at its image {:?}",
                dims_source.get(j),
                gamma.map_vertex(j)
            )));
        }
    }
    let (small, big) = (
        GaugeTorus::new(q, dims_target),
        GaugeTorus::new(qc, dims_source),
    );
    let mut m = IntMatrix::zeros(big.rank(), small.rank());
    for j in qc.vertices() {
        let i = gamma.map_vertex(j);
        for a in 0..small.dim(i) {
            m.set(big.coord(j, a), small.coord(i, a), 1);
        }
    }
    TorusMap::new(small.torus().clone(), big.torus().clone(), m)
}

/// Torus map `T_Q -> T_Q̌` of a dismemberment `γ: Q̌ -> Q`.
pub fn torus_map_of_dismemberment(
    gamma: &QuiverMorphism,
    dims_target: &DimensionVector,
    dims_source: &DimensionVector,
) -> Result<TorusMap> {
    if !is_dismemberment(gamma) {
        return Err(validation("morphism is not a dismemberment"));
    }
    diagonal_torus_map(gamma, dims_target, dims_source)
}

/// Levi inclusion of the exploded torus into the original one.
pub fn torus_map_of_explosion(x: &Explosion) -> Result<TorusMap> {
    let small = GaugeTorus::new(&x.quiver, &x.dims);
    let big = GaugeTorus::new(&x.original, &x.original_dims);
    let mut m = IntMatrix::zeros(big.rank(), small.rank());
    for (v, blocks) in &x.blocks {
        for b in blocks {
            for (a, target) in b.coords.clone().enumerate() {
                m.set(big.coord(v, target), small.coord(&b.vertex, a), 1);
            }
        }
    }
    TorusMap::new(small.torus().clone(), big.torus().clone(), m)
}

/// Split model of `T / G_m` for the diagonal `G_m`.
pub fn quotient_by_scalar(torus: &TorusData) -> Result<QuotientSplit> {
    if torus.rank() == 0 {
        return Err(Error::InvalidQuotient(
            "scalar quotient of a rank-0 torus".into(),
        ));
    }
    quotient_split(torus, &CocharacterVector(vec![1; torus.rank()]))
}

/// The map induced on split quotients; `map` must send the source direction
/// into the line of the target direction.
pub fn descend_torus_map(
    map: &TorusMap,
    source: &QuotientSplit,
    target: &QuotientSplit,
) -> Result<TorusMap> {
    check_len(map.source().rank(), source.direction().len())?;
    check_len(map.target().rank(), target.direction().len())?;
    let image = map.push_cocharacter(source.direction())?;
    if !target.cocharacter_to_split(&image)?.is_zero() {
        return Err(Error::InvalidQuotient(format!(
            "{} maps to {image}, outside the quotiented line",
            source.direction()
        )));
    }
    let (rs, rt) = (source.quotient().rank(), target.quotient().rank());
    let mut m = IntMatrix::zeros(rt, rs);
    for k in 0..rs {
        let rep = source.cocharacter_from_split(&CocharacterVector::unit(rs, k))?;
        let col = target.cocharacter_to_split(&map.push_cocharacter(&rep)?)?;
        for (i, x) in col.0.into_iter().enumerate() {
            m.set(i, k, x);
        }
    }
    TorusMap::new(source.quotient().clone(), target.quotient().clone(), m)
}

/// Weights expressed on the split quotient; each must vanish on the direction.
pub fn descend_weights(w: &WeightMultiset, split: &QuotientSplit) -> Result<WeightMultiset> {
    w.map_weights(split.quotient().rank(), |x| split.character_to_split(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::{explode, finest_dismemberment, Edge};
    use proptest::prelude::*;

    fn quiver(vertices: &[&str], edges: &[(&str, &str, &str)]) -> QuiverSpec {
        QuiverSpec::new(
            vertices.iter().map(|s| s.to_string()).collect(),
            edges
                .iter()
                .map(|(i, s, d)| Edge::new(*i, *s, *d))
                .collect(),
        )
        .unwrap()
    }

    fn cv(v: &[i64]) -> CharacterVector {
        CharacterVector(v.to_vec())
    }

    fn support(w: &WeightMultiset) -> Vec<(Vec<i64>, u64)> {
        w.entries()
            .iter()
            .map(|e| (e.weight.0.clone(), e.multiplicity))
            .collect()
    }

    #[test]
    fn single_edge_weights() {
        let q = quiver(&["1", "2"], &[("e", "1", "2")]);
        let w = weights_of_quiver_rep(&q, &DimensionVector::from_ordered(&q, &[1, 1]).unwrap())
            .unwrap();
        assert_eq!(support(&w), vec![(vec![-1, 1], 1)]);
        let w = weights_of_quiver_rep(&q, &DimensionVector::from_ordered(&q, &[1, 2]).unwrap())
            .unwrap();
        assert_eq!(support(&w), vec![(vec![-1, 0, 1], 1), (vec![-1, 1, 0], 1)]);
    }

    #[test]
    fn loop_weights() {
        let q = quiver(&["v"], &[("l", "v", "v")]);
        let w =
            weights_of_quiver_rep(&q, &DimensionVector::from_ordered(&q, &[2]).unwrap()).unwrap();
        assert_eq!(
            support(&w),
            vec![(vec![-1, 1], 1), (vec![0, 0], 2), (vec![1, -1], 1)]
        );
    }

    #[test]
    fn scalar_flavor() {
        let w = WeightMultiset::from_weights(2, [(cv(&[-1, 1]), 1)]).unwrap();
        let f = add_scalar_flavor(&w).unwrap();
        assert_eq!(support(&f), vec![(vec![-1, 1, 1], 1)]);
        assert!(f.scalar_flavor());
        assert!(matches!(add_scalar_flavor(&f), Err(Error::Validation(_))));
        let e = add_scalar_flavor(&WeightMultiset::empty(3)).unwrap();
        assert!(e.is_empty() && e.scalar_flavor() && e.rank() == 4);
        let z = add_scalar_flavor(&WeightMultiset::from_weights(2, [(cv(&[0, 0]), 1)]).unwrap())
            .unwrap();
        assert_eq!(support(&z), vec![(vec![0, 0, 1], 1)]);
    }

    #[test]
    fn identity_dismemberment_gives_identity() {
        let q = quiver(&["1", "2"], &[("e", "1", "2")]);
        let d = DimensionVector::from_ordered(&q, &[2, 1]).unwrap();
        let m = torus_map_of_dismemberment(&QuiverMorphism::identity(&q), &d, &d).unwrap();
        assert_eq!(m.matrix(), &IntMatrix::identity(3));
    }

    #[test]
    fn chain_dismemberment_matrix_and_weights() {
        let q = quiver(&["1", "2", "3"], &[("a", "1", "2"), ("b", "2", "3")]);
        let d = DimensionVector::from_ordered(&q, &[1, 1, 1]).unwrap();
        let fd = finest_dismemberment(&q, &d).unwrap();
        let m = torus_map_of_dismemberment(&fd.morphism, &d, &fd.dims).unwrap();
        // Restriction is the transpose: 3 x 4 gluing the two copies of vertex 2.
        assert_eq!(
            m.matrix().transpose().to_rows(),
            vec![vec![1, 0, 0, 0], vec![0, 1, 1, 0], vec![0, 0, 0, 1]]
        );
        let restricted = weights_of_quiver_rep(&fd.quiver, &fd.dims)
            .unwrap()
            .restrict(&m)
            .unwrap();
        assert_eq!(restricted, weights_of_quiver_rep(&q, &d).unwrap());
        assert_eq!(
            m.restrict_character(&cv(&[-1, 1, 0, 0])).unwrap(),
            cv(&[-1, 1, 0])
        );
    }

    #[test]
    fn incompatible_dims_rejected() {
        let q = quiver(&["1", "2"], &[("e", "1", "2")]);
        let d = DimensionVector::from_ordered(&q, &[2, 1]).unwrap();
        let wrong = DimensionVector::from_ordered(&q, &[1, 1]).unwrap();
        assert!(matches!(
            torus_map_of_dismemberment(&QuiverMorphism::identity(&q), &d, &wrong),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn explosion_maps() {
        let q = quiver(&["i", "j"], &[("e", "i", "j")]);
        let d = DimensionVector::from_ordered(&q, &[2, 1]).unwrap();
        let x = explode(&q, &d, &BTreeMap::new()).unwrap();
        assert_eq!(
            torus_map_of_explosion(&x).unwrap().matrix(),
            &IntMatrix::identity(3)
        );

        let parts = BTreeMap::from([("i".to_string(), vec![1, 1])]);
        let x = explode(&q, &d, &parts).unwrap();
        let m = torus_map_of_explosion(&x).unwrap();
        assert_eq!(m.source().rank(), 3);
        assert_eq!(m.matrix(), &IntMatrix::identity(3));
        let restricted = weights_of_quiver_rep(&q, &d).unwrap().restrict(&m).unwrap();
        assert_eq!(
            restricted,
            weights_of_quiver_rep(&x.quiver, &x.dims).unwrap()
        );
    }

    #[test]
    fn explosion_of_chain_end_blocks() {
        let q = quiver(&["c1", "c2"], &[("e", "c1", "c2")]);
        let d = DimensionVector::from_ordered(&q, &[1, 4]).unwrap();
        let parts = BTreeMap::from([("c2".to_string(), vec![1, 2, 1])]);
        let x = explode(&q, &d, &parts).unwrap();
        let m = torus_map_of_explosion(&x).unwrap();
        assert_eq!(m.source().blocks(), &[1, 1, 2, 1]);
        assert_eq!(m.target().blocks(), &[1, 4]);
        assert_eq!(m.matrix(), &IntMatrix::identity(5));
    }

    #[test]
    fn scalar_quotient_ranks() {
        let one = quotient_by_scalar(&TorusData::split(1)).unwrap();
        assert_eq!(one.quotient().rank(), 0);
        let two = quotient_by_scalar(&TorusData::with_blocks(vec![2])).unwrap();
        assert_eq!(two.quotient().rank(), 1);
        let eta = two.character_to_split(&cv(&[1, -1])).unwrap();
        assert_eq!(two.character_from_split(&eta).unwrap(), cv(&[1, -1]));
        assert!(quotient_by_scalar(&TorusData::split(0)).is_err());
    }

    #[test]
    fn descended_map_commutes() {
        let q = quiver(&["1", "2", "3"], &[("a", "1", "2"), ("b", "2", "3")]);
        let d = DimensionVector::from_ordered(&q, &[1, 2, 1]).unwrap();
        let fd = finest_dismemberment(&q, &d).unwrap();
        let m = torus_map_of_dismemberment(&fd.morphism, &d, &fd.dims).unwrap();
        let (s, t) = (
            quotient_by_scalar(m.source()).unwrap(),
            quotient_by_scalar(m.target()).unwrap(),
        );
        let dm = descend_torus_map(&m, &s, &t).unwrap();
        let w = weights_of_quiver_rep(&fd.quiver, &fd.dims).unwrap();
        for x in w.support() {
            let down_then_restrict = dm
                .restrict_character(&t.character_to_split(x).unwrap())
                .unwrap();
            let restrict_then_down = s
                .character_to_split(&m.restrict_character(x).unwrap())
                .unwrap();
            assert_eq!(down_then_restrict, restrict_then_down);
        }
    }

    fn random_quiver() -> impl Strategy<Value = (QuiverSpec, DimensionVector)> {
        (1usize..5)
            .prop_flat_map(|nv| {
                (
                    Just(nv),
                    proptest::collection::vec((0..nv, 0..nv), 0..6),
                    proptest::collection::vec(0usize..4, nv),
                )
            })
            .prop_map(|(nv, edges, dims)| {
                let vertices: Vec<String> = (0..nv).map(|i| format!("v{i}")).collect();
                let edges = edges
                    .into_iter()
                    .enumerate()
                    .map(|(k, (s, t))| Edge::new(format!("e{k}"), format!("v{s}"), format!("v{t}")))
                    .collect();
                let q = QuiverSpec::new(vertices, edges).unwrap();
                let d = DimensionVector::from_ordered(&q, &dims).unwrap();
                (q, d)
            })
    }

    proptest! {
        #[test]
        fn weights_count_and_weyl_invariance((q, d) in random_quiver(), seed in any::<u64>()) {
            let w = weights_of_quiver_rep(&q, &d).unwrap();
            let expected: u64 = q.edges().iter().map(|e| (d.get(&e.src) * d.get(&e.dst)) as u64).sum();
            prop_assert_eq!(w.total_multiplicity(), expected);

            // Blockwise permutation derived from the seed.
            let t = GaugeTorus::new(&q, &d);
            let mut perm: Vec<usize> = (0..t.rank()).collect();
            let mut s = seed;
            for r in t.torus().block_ranges() {
                let block = &mut perm[r];
                for i in (1..block.len()).rev() {
                    s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    block.swap(i, (s >> 33) as usize % (i + 1));
                }
            }
            let permuted = w.map_weights(w.rank(), |x| {
                Ok(CharacterVector(perm.iter().map(|&p| x.0[p]).collect()))
            }).unwrap();
            prop_assert_eq!(permuted, w);
        }

        #[test]
        fn finest_dismemberment_restricts_weights((q, d) in random_quiver()) {
            let fd = finest_dismemberment(&q, &d).unwrap();
            let m = torus_map_of_dismemberment(&fd.morphism, &d, &fd.dims).unwrap();
            let w = weights_of_quiver_rep(&fd.quiver, &fd.dims).unwrap().restrict(&m).unwrap();
            prop_assert_eq!(w, weights_of_quiver_rep(&q, &d).unwrap());
        }

        #[test]
        fn loop_free_weights_descend((q, d) in random_quiver()) {
            prop_assume!(!q.has_loops());
            let w = weights_of_quiver_rep(&q, &d).unwrap();
            for x in w.support() {
                prop_assert_eq!(x.0.iter().sum::<i64>(), 0);
            }
            let t = GaugeTorus::new(&q, &d);
            if t.rank() > 0 {
                let split = quotient_by_scalar(t.torus()).unwrap();
                prop_assert!(descend_weights(&w, &split).is_ok());
            }
        }
    }
}
