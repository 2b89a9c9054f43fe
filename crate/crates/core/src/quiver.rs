//! Quivers with loops and parallel edges, quiver morphisms, dismemberments
//! and explosions.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub id: String,
    pub src: String,
    pub dst: String,
}

impl Edge {
    pub fn new(id: impl Into<String>, src: impl Into<String>, dst: impl Into<String>) -> Self {
        Edge {
            id: id.into(),
            src: src.into(),
            dst: dst.into(),
        }
    }

    pub fn is_loop(&self) -> bool {
        self.src == self.dst
    }

    /// Endpoints as an unordered pair.
    fn endpoints(&self) -> (&str, &str) {
        if self.src <= self.dst {
            (&self.src, &self.dst)
        } else {
            (&self.dst, &self.src)
        }
    }
}

/// A finite quiver. Vertex order fixes the order of gauge factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuiverSpec {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    index: HashMap<String, usize>,
}

impl QuiverSpec {
    pub fn new(vertices: Vec<String>, edges: Vec<Edge>) -> Result<Self> {
        let mut index = HashMap::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(validation(format!("duplicate vertex id {v:?}")));
            }
        }
        let mut seen = BTreeSet::new();
        for e in &edges {
            if !seen.insert(e.id.as_str()) {
                return Err(validation(format!("duplicate edge id {:?}", e.id)));
            }
            for end in [&e.src, &e.dst] {
                if !index.contains_key(end) {
                    return Err(validation(format!(
                        "edge {:?} references undeclared vertex {end:?}",
                        e.id
                    )));
                }
            }
        }
        Ok(QuiverSpec {
            vertices,
            edges,
            index,
        })
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn edge(&self, id: &str) -> Option<&Edge> {
        self.edges.iter().find(|e| e.id == id)
    }

    pub fn has_loops(&self) -> bool {
        self.edges.iter().any(Edge::is_loop)
    }

    pub fn degree(&self, v: &str) -> usize {
        self.edges
            .iter()
            .map(|e| usize::from(e.src == v) + usize::from(e.dst == v))
            .sum()
    }

    pub fn is_isolated(&self, v: &str) -> bool {
        self.degree(v) == 0
    }

    pub fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return true;
        }
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            let (a, b) = (self.index[&e.src], self.index[&e.dst]);
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Connected, loop-free and `|E| = |V| - 1`.
    pub fn is_tree(&self) -> bool {
        !self.vertices.is_empty()
            && self.edges.len() + 1 == self.vertices.len()
            && !self.has_loops()
            && self.is_connected()
    }

    /// Copy of the quiver with the given edge reversed.
    pub fn flip_edge(&self, id: &str) -> Result<QuiverSpec> {
        let mut edges = self.edges.clone();
        let e = edges
            .iter_mut()
            .find(|e| e.id == id)
            .ok_or_else(|| validation(format!("no edge {id:?}")))?;
        std::mem::swap(&mut e.src, &mut e.dst);
        QuiverSpec::new(self.vertices.clone(), edges)
    }

    /// Edge ids to flip so that parallel edges share one orientation: the
    /// first listed edge between two vertices sets the direction.
    pub fn orientation_fixes(&self) -> Vec<String> {
        let mut first: HashMap<(&str, &str), &Edge> = HashMap::new();
        let mut flips = Vec::new();
        for e in &self.edges {
            if e.is_loop() {
                continue;
            }
            match first.get(&e.endpoints()) {
                Some(f) if f.src != e.src => flips.push(e.id.clone()),
                Some(_) => {}
                None => {
                    first.insert(e.endpoints(), e);
                }
            }
        }
        flips
    }

    /// Reorient parallel edges to agree with the first edge of their class.
    pub fn normalize_orientation(&self) -> Result<QuiverSpec> {
        let mut q = self.clone();
        for id in self.orientation_fixes() {
            q = q.flip_edge(&id)?;
        }
        Ok(q)
    }
}

/// Nonnegative integer dimension at every vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DimensionVector(BTreeMap<String, usize>);

impl DimensionVector {
    pub fn new(quiver: &QuiverSpec, dims: BTreeMap<String, usize>) -> Result<Self> {
        for v in quiver.vertices() {
            if !dims.contains_key(v) {
                return Err(validation(format!("no dimension given for vertex {v:?}")));
            }
        }
        for k in dims.keys() {
            if quiver.vertex_index(k).is_none() {
                return Err(validation(format!(
                    "dimension given for unknown vertex {k:?}"
                )));
            }
        }
        Ok(DimensionVector(dims))
    }

    /// Dimensions listed in vertex order.
    pub fn from_ordered(quiver: &QuiverSpec, dims: &[usize]) -> Result<Self> {
        if dims.len() != quiver.vertices().len() {
            return Err(Error::Dimension {
                expected: quiver.vertices().len(),
                found: dims.len(),
            });
        }
        Ok(DimensionVector(
            quiver
                .vertices()
                .iter()
                .cloned()
                .zip(dims.iter().copied())
                .collect(),
        ))
    }

    pub fn get(&self, v: &str) -> usize {
        self.0.get(v).copied().unwrap_or(0)
    }

    pub fn as_map(&self) -> &BTreeMap<String, usize> {
        &self.0
    }

    /// Dimensions in the vertex order of `quiver`.
    pub fn ordered(&self, quiver: &QuiverSpec) -> Vec<usize> {
        quiver.vertices().iter().map(|v| self.get(v)).collect()
    }
}

/// A morphism of quivers `source -> target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuiverMorphism {
    source: QuiverSpec,
    target: QuiverSpec,
    vertex_map: BTreeMap<String, String>,
    edge_map: BTreeMap<String, String>,
}

impl QuiverMorphism {
    pub fn new(
        source: QuiverSpec,
        target: QuiverSpec,
        vertex_map: BTreeMap<String, String>,
        edge_map: BTreeMap<String, String>,
    ) -> Result<Self> {
        for v in source.vertices() {
            let image = vertex_map
                .get(v)
                .ok_or_else(|| validation(format!("vertex map misses {v:?}")))?;
            if target.vertex_index(image).is_none() {
                return Err(validation(format!(
                    "vertex {v:?} maps to unknown {image:?}"
                )));
            }
        }
        if vertex_map.len() != source.vertices().len() {
            return Err(validation("vertex map has entries for unknown vertices"));
        }
        if edge_map.len() != source.edges().len() {
            return Err(validation("edge map must cover exactly the source edges"));
        }
        for e in source.edges() {
            let image_id = edge_map
                .get(&e.id)
                .ok_or_else(|| validation(format!("edge map misses {:?}", e.id)))?;
            let image = target.edge(image_id).ok_or_else(|| {
                validation(format!("edge {:?} maps to unknown {image_id:?}", e.id))
            })?;
            if vertex_map[&e.src] != image.src || vertex_map[&e.dst] != image.dst {
                return Err(validation(format!(
                    "edge {:?} ({} -> {}) is not compatible with its image {:?} ({} -> {})",
                    e.id, e.src, e.dst, image.id, image.src, image.dst
                )));
            }
        }
        Ok(QuiverMorphism {
            source,
            target,
            vertex_map,
            edge_map,
        })
    }

    pub fn identity(q: &QuiverSpec) -> Self {
        let vertex_map = q
            .vertices()
            .iter()
            .map(|v| (v.clone(), v.clone()))
            .collect();
        let edge_map = q
            .edges()
            .iter()
            .map(|e| (e.id.clone(), e.id.clone()))
            .collect();
        QuiverMorphism {
            source: q.clone(),
            target: q.clone(),
            vertex_map,
            edge_map,
        }
    }

    pub fn source(&self) -> &QuiverSpec {
        &self.source
    }

    pub fn target(&self) -> &QuiverSpec {
        &self.target
    }

    pub fn vertex_map(&self) -> &BTreeMap<String, String> {
        &self.vertex_map
    }

    pub fn edge_map(&self) -> &BTreeMap<String, String> {
        &self.edge_map
    }

    pub fn map_vertex(&self, v: &str) -> &str {
        &self.vertex_map[v]
    }

    /// Source vertices over `v`, in source vertex order.
    pub fn fiber(&self, v: &str) -> Vec<&str> {
        self.source
            .vertices()
            .iter()
            .filter(|s| self.vertex_map[*s] == v)
            .map(String::as_str)
            .collect()
    }

    fn edge_bijective(&self) -> bool {
        let images: BTreeSet<&String> = self.edge_map.values().collect();
        images.len() == self.edge_map.len() && images.len() == self.target.edges().len()
    }

    /// Bijective on edges and surjective on vertices.
    pub fn is_gluing(&self) -> bool {
        let hit: BTreeSet<&String> = self.vertex_map.values().collect();
        self.edge_bijective() && hit.len() == self.target.vertices().len()
    }

    /// Pull a dimension vector back along the vertex map.
    pub fn pull_back_dims(&self, dims: &DimensionVector) -> Result<DimensionVector> {
        let map = self
            .source
            .vertices()
            .iter()
            .map(|v| (v.clone(), dims.get(&self.vertex_map[v])))
            .collect();
        DimensionVector::new(&self.source, map)
    }

    /// Reverse a target edge together with all of its preimages.
    pub fn flip_target_edge(&self, id: &str) -> Result<QuiverMorphism> {
        let target = self.target.flip_edge(id)?;
        let mut source = self.source.clone();
        for (s, t) in &self.edge_map {
            if t == id {
                source = source.flip_edge(s)?;
            }
        }
        QuiverMorphism::new(
            source,
            target,
            self.vertex_map.clone(),
            self.edge_map.clone(),
        )
    }

    /// Normalize the orientation of parallel target edges, carrying the
    /// source along.
    pub fn normalize_orientation(&self) -> Result<QuiverMorphism> {
        let mut m = self.clone();
        for id in self.target.orientation_fixes() {
            m = m.flip_target_edge(&id)?;
        }
        Ok(m)
    }
}

/// Bijective on edges and on isolated vertices.
pub fn is_dismemberment(gamma: &QuiverMorphism) -> bool {
    if !gamma.edge_bijective() {
        return false;
    }
    let src_isolated: Vec<&String> = gamma
        .source
        .vertices()
        .iter()
        .filter(|v| gamma.source.is_isolated(v))
        .collect();
    let tgt_isolated: BTreeSet<&String> = gamma
        .target
        .vertices()
        .iter()
        .filter(|v| gamma.target.is_isolated(v))
        .collect();
    let images: BTreeSet<&String> = src_isolated.iter().map(|v| &gamma.vertex_map[*v]).collect();
    images.len() == src_isolated.len() && images == tgt_isolated
}

/// A dismemberment together with its pulled-back dimension vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dismemberment {
    pub quiver: QuiverSpec,
    pub dims: DimensionVector,
    pub morphism: QuiverMorphism,
}

/// The dismemberment with one component per pair of adjacent vertices.
///
/// All edges joining `u` and `w` (either direction) live in the component
/// with vertices `u@u~w` and `w@u~w`; loops at `v` stay on a component `v@v`.
/// Isolated vertices keep their ids.
pub fn finest_dismemberment(q: &QuiverSpec, dims: &DimensionVector) -> Result<Dismemberment> {
    let order = |v: &str| q.vertex_index(v).expect("validated");
    let mut components: BTreeMap<(usize, usize), Vec<&Edge>> = BTreeMap::new();
    for e in q.edges() {
        let (a, b) = (order(&e.src), order(&e.dst));
        components.entry((a.min(b), a.max(b))).or_default().push(e);
    }
    let mut vertices = Vec::new();
    let mut vertex_map = BTreeMap::new();
    let mut edges = Vec::new();
    let mut edge_map = BTreeMap::new();
    for (&(a, b), members) in &components {
        let (u, w) = (&q.vertices()[a], &q.vertices()[b]);
        let tag = if a == b {
            u.clone()
        } else {
            format!("{u}~{w}")
        };
        let copy = |v: &str| format!("{v}@{tag}");
        for v in if a == b { vec![u] } else { vec![u, w] } {
            vertices.push(copy(v));
            vertex_map.insert(copy(v), v.clone());
        }
        for e in members {
            edges.push(Edge::new(e.id.clone(), copy(&e.src), copy(&e.dst)));
            edge_map.insert(e.id.clone(), e.id.clone());
        }
    }
    for v in q.vertices() {
        if q.is_isolated(v) {
            vertices.push(v.clone());
            vertex_map.insert(v.clone(), v.clone());
        }
    }
    let quiver = QuiverSpec::new(vertices, edges)?;
    let morphism = QuiverMorphism::new(quiver.clone(), q.clone(), vertex_map, edge_map)?;
    let dims = morphism.pull_back_dims(dims)?;
    Ok(Dismemberment {
        quiver,
        dims,
        morphism,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParallelLiftReport {
    /// Every pair of parallel edges of the target lifts to parallel edges.
    pub lifts_parallel: bool,
    pub violations: Vec<(String, String)>,
    pub has_loops: bool,
    /// All parallel pairs in the target share one orientation.
    pub same_orientation: bool,
}

impl ParallelLiftReport {
    /// Hypotheses under which the dismemberment map is known to be gluable.
    pub fn lifting_hypotheses_hold(&self) -> bool {
        self.lifts_parallel && !self.has_loops && self.same_orientation
    }
}

pub fn parallel_lifting_check(gamma: &QuiverMorphism) -> Result<ParallelLiftReport> {
    if !is_dismemberment(gamma) {
        return Err(validation("parallel lifting check needs a dismemberment"));
    }
    let preimage: HashMap<&str, &Edge> = gamma
        .source
        .edges()
        .iter()
        .map(|e| (gamma.edge_map[&e.id].as_str(), e))
        .collect();
    let edges = gamma.target.edges();
    let mut violations = Vec::new();
    let mut same_orientation = true;
    for (i, e) in edges.iter().enumerate() {
        for f in &edges[i + 1..] {
            if e.endpoints() != f.endpoints() {
                continue;
            }
            if !e.is_loop() && e.src != f.src {
                same_orientation = false;
            }
            if preimage[e.id.as_str()].endpoints() != preimage[f.id.as_str()].endpoints() {
                violations.push((e.id.clone(), f.id.clone()));
            }
        }
    }
    Ok(ParallelLiftReport {
        lifts_parallel: violations.is_empty(),
        violations,
        has_loops: gamma.target.has_loops(),
        same_orientation,
    })
}

/// Consecutive coordinate block of an exploded vertex inside its parent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExplodedBlock {
    pub vertex: String,
    pub coords: Range<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Explosion {
    pub original: QuiverSpec,
    pub original_dims: DimensionVector,
    pub quiver: QuiverSpec,
    pub dims: DimensionVector,
    /// For every original vertex, its preimages in order with their blocks
    /// inside `0..n_i`.
    pub blocks: BTreeMap<String, Vec<ExplodedBlock>>,
    pub parent: BTreeMap<String, String>,
}

/// Name of the `t`-th (1-based) preimage of `v`; unexploded vertices keep
/// their id.
pub fn exploded_vertex_id(v: &str, t: usize, count: usize) -> String {
    if count == 1 {
        v.to_string()
    } else {
        format!("x{v}b{t}")
    }
}

/// Replace vertex `i` by `parts[i].len()` vertices of the listed dimensions and
/// every edge `i -> j` by all edges between preimages.
pub fn explode(
    q: &QuiverSpec,
    dims: &DimensionVector,
    parts: &BTreeMap<String, Vec<usize>>,
) -> Result<Explosion> {
    if q.has_loops() {
        return Err(Error::Unsupported(
            "explosion of a quiver with loops".into(),
        ));
    }
    for k in parts.keys() {
        if q.vertex_index(k).is_none() {
            return Err(validation(format!(
                "explosion given for unknown vertex {k:?}"
            )));
        }
    }
    let default_parts = |v: &String| vec![dims.get(v)];
    let mut vertices = Vec::new();
    let mut new_dims = BTreeMap::new();
    let mut blocks = BTreeMap::new();
    let mut parent = BTreeMap::new();
    let mut preimages: HashMap<&str, Vec<String>> = HashMap::new();
    for v in q.vertices() {
        let p = parts.get(v).cloned().unwrap_or_else(|| default_parts(v));
        if p.is_empty() {
            return Err(validation(format!(
                "vertex {v:?} must explode into at least one vertex"
            )));
        }
        let total: usize = p.iter().sum();
        if total != dims.get(v) {
            return Err(validation(format!(
                "exploded dimensions at {v:?} sum to {total}, expected {}",
                dims.get(v)
            )));
        }
        let mut offset = 0;
        let mut list = Vec::new();
        for (t, &d) in p.iter().enumerate() {
            let id = exploded_vertex_id(v, t + 1, p.len());
            vertices.push(id.clone());
            new_dims.insert(id.clone(), d);
            parent.insert(id.clone(), v.clone());
            list.push(ExplodedBlock {
                vertex: id.clone(),
                coords: offset..offset + d,
            });
            preimages.entry(v).or_default().push(id);
            offset += d;
        }
        blocks.insert(v.clone(), list);
    }
    let mut edges = Vec::new();
    for e in q.edges() {
        let (srcs, dsts) = (&preimages[e.src.as_str()], &preimages[e.dst.as_str()]);
        for (s, a) in srcs.iter().enumerate() {
            for (t, b) in dsts.iter().enumerate() {
                let id = if srcs.len() == 1 && dsts.len() == 1 {
                    e.id.clone()
                } else {
                    format!("{}:{}:{}", e.id, s + 1, t + 1)
                };
                edges.push(Edge::new(id, a.clone(), b.clone()));
            }
        }
    }
    let quiver = QuiverSpec::new(vertices, edges)?;
    let dims_out = DimensionVector::new(&quiver, new_dims)?;
    Ok(Explosion {
        original: q.clone(),
        original_dims: dims.clone(),
        quiver,
        dims: dims_out,
        blocks,
        parent,
    })
}
