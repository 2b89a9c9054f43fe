//! Named quivers: chains, legs, the star quiver of an ordered partition,
//! comet-shaped quivers, and the gluing of the star quiver from legs and an
//! exploded chain.
//!
//! Id scheme: chain vertices `c1, c2, ...` joined by `e1, e2, ...` pointing up
//! the chain; leg `k` has vertices `L{k}v1, L{k}v2, ...` from its head
//! outward, with edges `L{k}e{m}: L{k}v{m+1} -> L{k}v{m}`. In the star quiver
//! the edge `L{k}e0: c(n-1) -> L{k}v1` continues the chain into each head.
//! Comets have central vertex `z`, loops `z@loop{g}` and edges
//! `L{k}e0: L{k}v1 -> z`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};
use crate::gaugerep::{
    diagonal_torus_map, torus_map_of_explosion, weights_of_quiver_rep, GaugeTorus, WeightMultiset,
};
use crate::gluability::GluabilityProblem;
use crate::lattice::{IntMatrix, TorusMap};
use crate::quiver::{explode, DimensionVector, Edge, Explosion, QuiverMorphism, QuiverSpec};

/// An ordered partition `n = m_1 + ... + m_l` with positive parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition(Vec<usize>);

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() {
            return Err(validation("a partition needs at least one part"));
        }
        if parts.contains(&0) {
            return Err(validation("partition parts must be positive"));
        }
        parts
            .iter()
            .try_fold(0usize, |acc, &x| acc.checked_add(x))
            .ok_or(Error::Overflow("partition size"))?;
        Ok(Partition(parts))
    }

    /// Parse a comma-separated list such as `2,2`.
    pub fn parse(s: &str) -> Result<Self> {
        Partition::new(parse_parts(s)?)
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.iter().sum()
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Partition::new(v)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Self {
        p.0
    }
}

/// Puncture label: a weakly decreasing partition `h_1 >= ... >= h_k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct PunctureData(Vec<usize>);

impl PunctureData {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        let p = Partition::new(parts)?;
        if p.0.windows(2).any(|w| w[0] < w[1]) {
            return Err(validation("puncture partition must be weakly decreasing"));
        }
        Ok(PunctureData(p.0))
    }

    pub fn parse(s: &str) -> Result<Self> {
        PunctureData::new(parse_parts(s)?)
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.iter().sum()
    }

    /// Leg dimensions `n_m = h_{m+1} + ... + h_k` for `m = 1, ..., k-1`.
    pub fn leg_dims(&self) -> Vec<usize> {
        (1..self.0.len())
            .map(|m| self.0[m..].iter().sum())
            .collect()
    }
}

impl TryFrom<Vec<usize>> for PunctureData {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        PunctureData::new(v)
    }
}

impl From<PunctureData> for Vec<usize> {
    fn from(p: PunctureData) -> Self {
        p.0
    }
}

fn parse_parts(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<usize>()
                .map_err(|_| validation(format!("bad partition part {t:?}")))
        })
        .collect()
}

/// All weakly decreasing partitions of `n`, in reverse lexicographic order.
pub fn partitions_of(n: usize) -> Vec<Vec<usize>> {
    fn go(rest: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in (1..=rest.min(max)).rev() {
            prefix.push(part);
            go(rest - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        go(n, n, &mut Vec::new(), &mut out);
    }
    out
}

struct Builder {
    vertices: Vec<String>,
    dims: BTreeMap<String, usize>,
    edges: Vec<Edge>,
}

impl Builder {
    fn new() -> Self {
        Builder {
            vertices: Vec::new(),
            dims: BTreeMap::new(),
            edges: Vec::new(),
        }
    }

    fn vertex(&mut self, id: String, dim: usize) {
        self.dims.insert(id.clone(), dim);
        self.vertices.push(id);
    }

    fn edge(&mut self, id: String, src: String, dst: String) {
        self.edges.push(Edge { id, src, dst });
    }

    fn chain(&mut self, n: usize) {
        for i in 1..=n {
            self.vertex(format!("c{i}"), i);
        }
        for i in 1..n {
            self.edge(format!("e{i}"), format!("c{i}"), format!("c{}", i + 1));
        }
    }

    /// Leg `k` with the given dims from the head outward.
    fn leg(&mut self, k: usize, dims: &[usize]) {
        for (m, &d) in dims.iter().enumerate() {
            self.vertex(format!("L{k}v{}", m + 1), d);
        }
        for m in 1..dims.len() {
            self.edge(
                format!("L{k}e{m}"),
                format!("L{k}v{}", m + 1),
                format!("L{k}v{m}"),
            );
        }
    }

    fn finish(self) -> Result<(QuiverSpec, DimensionVector)> {
        let q = QuiverSpec::new(self.vertices, self.edges)?;
        let d = DimensionVector::new(&q, self.dims)?;
        Ok((q, d))
    }
}

fn descending(m: usize) -> Vec<usize> {
    (1..=m).rev().collect()
}

/// The linear quiver `c1 -> ... -> cn` with dims `1, ..., n`.
pub fn build_a_chain(n: usize) -> Result<(QuiverSpec, DimensionVector)> {
    let mut b = Builder::new();
    b.chain(n);
    b.finish()
}

/// Disjoint legs with dims `m_k, m_k - 1, ..., 1`.
pub fn build_a_legs(p: &Partition) -> Result<(QuiverSpec, DimensionVector)> {
    let mut b = Builder::new();
    for (k, &m) in p.parts().iter().enumerate() {
        b.leg(k + 1, &descending(m));
    }
    b.finish()
}

/// Chain `c1..c(n-1)` with a leg per part attached at `c(n-1)`.
pub fn build_q_partition(p: &Partition) -> Result<(QuiverSpec, DimensionVector)> {
    let n = p.n();
    if n < 2 {
        return Err(Error::Unsupported(format!(
            "star quiver needs n >= 2, got {n}"
        )));
    }
    let mut b = Builder::new();
    b.chain(n - 1);
    for (k, &m) in p.parts().iter().enumerate() {
        b.leg(k + 1, &descending(m));
        b.edge(
            format!("L{}e0", k + 1),
            format!("c{}", n - 1),
            format!("L{}v1", k + 1),
        );
    }
    b.finish()
}

/// Central vertex of dim `n` with `genus` loops and one leg per puncture.
pub fn build_comet(
    genus: usize,
    n: usize,
    punctures: &[PunctureData],
) -> Result<(QuiverSpec, DimensionVector)> {
    let mut b = Builder::new();
    b.vertex("z".into(), n);
    for g in 1..=genus {
        b.edge(format!("z@loop{g}"), "z".into(), "z".into());
    }
    for (k, h) in punctures.iter().enumerate() {
        if h.n() != n {
            return Err(validation(format!(
                "puncture {} sums to {}, expected {n}",
                k + 1,
                h.n()
            )));
        }
        let dims = h.leg_dims();
        if dims.is_empty() {
            continue;
        }
        b.leg(k + 1, &dims);
        b.edge(format!("L{}e0", k + 1), format!("L{}v1", k + 1), "z".into());
    }
    b.finish()
}

/// The star quiver as a diagonal gluing of legs and an exploded chain.
///
/// `A_n` with `c_n` exploded into the parts gives heads `xc{n}b{k}` hanging
/// off `c(n-1)`. Placing the legs `A_m̄` beside it and sending both
/// `xc{n}b{k}` and `L{k}v1` to `L{k}v1` is bijective on edges and recovers
/// the star quiver. The restriction `T_{Q_m̄} -> T_{A_m̄} × T_{A_n}` is that
/// diagonal map followed by the identity on the legs and the Levi inclusion
/// on the chain.
#[derive(Clone, Debug)]
pub struct PartitionGluing {
    pub partition: Partition,
    pub star: QuiverSpec,
    pub star_dims: DimensionVector,
    /// `A_m̄ ⊔ A_n^⊛`, legs first.
    pub glued_from: QuiverSpec,
    pub morphism: QuiverMorphism,
    pub explosion: Explosion,
    /// `A_m̄ ⊔ A_n`, legs first.
    pub ambient: QuiverSpec,
    pub ambient_dims: DimensionVector,
    pub restriction: TorusMap,
}

impl PartitionGluing {
    pub fn weights(&self) -> Result<WeightMultiset> {
        weights_of_quiver_rep(&self.ambient, &self.ambient_dims)
    }

    pub fn problem(&self, quotient_scalar: bool) -> Result<GluabilityProblem> {
        let w = self.weights()?;
        if quotient_scalar {
            GluabilityProblem::quotient_by_scalars(&w, &self.restriction)
        } else {
            GluabilityProblem::with_full_gauge(w, self.restriction.clone())
        }
    }
}

fn disjoint_union(
    first: (&QuiverSpec, &DimensionVector),
    second: (&QuiverSpec, &DimensionVector),
) -> Result<(QuiverSpec, DimensionVector)> {
    let mut b = Builder::new();
    for (q, d) in [first, second] {
        for v in q.vertices() {
            b.vertex(v.clone(), d.get(v));
        }
        b.edges.extend(q.edges().iter().cloned());
    }
    b.finish()
}

pub fn partition_gluing_map(p: &Partition) -> Result<PartitionGluing> {
    let n = p.n();
    let (star, star_dims) = build_q_partition(p)?;
    let (legs, leg_dims) = build_a_legs(p)?;
    let (chain, chain_dims) = build_a_chain(n)?;
    let top = format!("c{n}");
    let explosion = explode(
        &chain,
        &chain_dims,
        &BTreeMap::from([(top.clone(), p.parts().to_vec())]),
    )?;
    let (glued_from, glued_dims) =
        disjoint_union((&legs, &leg_dims), (&explosion.quiver, &explosion.dims))?;

    let heads: BTreeMap<&str, usize> = explosion.blocks[&top]
        .iter()
        .enumerate()
        .map(|(k, block)| (block.vertex.as_str(), k + 1))
        .collect();
    let mut vertex_map = BTreeMap::new();
    for v in glued_from.vertices() {
        let image = match heads.get(v.as_str()) {
            Some(k) => format!("L{k}v1"),
            None => v.clone(),
        };
        vertex_map.insert(v.clone(), image);
    }
    let mut edge_map = BTreeMap::new();
    for e in glued_from.edges() {
        let image = match heads.get(e.dst.as_str()) {
            Some(k) => format!("L{k}e0"),
            None => e.id.clone(),
        };
        edge_map.insert(e.id.clone(), image);
    }
    let morphism = QuiverMorphism::new(glued_from.clone(), star.clone(), vertex_map, edge_map)?;
    if !morphism.is_gluing() {
        return Err(Error::Consistency(
            "star quiver gluing is not edge-bijective".into(),
        ));
    }
    let diagonal = diagonal_torus_map(&morphism, &star_dims, &glued_dims)?;

    let (ambient, ambient_dims) = disjoint_union((&legs, &leg_dims), (&chain, &chain_dims))?;
    let levi = torus_map_of_explosion(&explosion)?;
    let leg_rank = diagonal.target().rank() - levi.source().rank();
    let inclusion = TorusMap::new(
        diagonal.target().clone(),
        GaugeTorus::new(&ambient, &ambient_dims).torus().clone(),
        IntMatrix::identity(leg_rank).direct_sum(levi.matrix()),
    )?;
    let restriction = inclusion.compose(&diagonal)?;
    Ok(PartitionGluing {
        partition: p.clone(),
        star,
        star_dims,
        glued_from,
        morphism,
        explosion,
        ambient,
        ambient_dims,
        restriction,
    })
}
