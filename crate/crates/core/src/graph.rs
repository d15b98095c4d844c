//! Metric graphs. An edge is an interval `[0, length]`; a vertex is a block of
//! edge endpoints.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance for comparing lengths and positions.
pub const LENGTH_TOL: f64 = 1e-12;

/// Largest edge count accepted by [`MetricGraph::is_isomorphic_up_to_dummies`].
pub const ISOMORPHISM_EDGE_LIMIT: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub u32);

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum End {
    /// The end at position 0.
    Source,
    /// The end at position `length`.
    Target,
}

impl End {
    pub fn opposite(self) -> End {
        match self {
            End::Source => End::Target,
            End::Target => End::Source,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EndpointRef {
    pub edge: EdgeId,
    pub end: End,
}

impl EndpointRef {
    pub fn source(edge: EdgeId) -> Self {
        EndpointRef { edge, end: End::Source }
    }

    pub fn target(edge: EdgeId) -> Self {
        EndpointRef { edge, end: End::Target }
    }

    pub fn opposite(self) -> Self {
        EndpointRef { edge: self.edge, end: self.end.opposite() }
    }
}

impl fmt::Display for EndpointRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.end {
            End::Source => "s",
            End::Target => "t",
        };
        write!(f, "{}{}", self.edge, tag)
    }
}

/// An edge together with its lineage: `root` is the edge of the original
/// graph it was carved out of and `offset` is where its source sits on `root`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub id: EdgeId,
    pub length: f64,
    pub parent: Option<EdgeId>,
    pub root: EdgeId,
    pub offset: f64,
}

impl Edge {
    pub fn new(id: EdgeId, length: f64) -> Self {
        Edge { id, length, parent: None, root: id, offset: 0.0 }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("edge {edge} has non-positive or non-finite length {length}")]
    NonPositiveLength { edge: EdgeId, length: f64 },
    #[error("edge id {0} appears twice")]
    DuplicateEdgeId(EdgeId),
    #[error("endpoint {0} is missing from the vertices or appears twice")]
    EndpointMissingOrDuplicated(EndpointRef),
    #[error("endpoint {0} refers to an unknown edge")]
    UnknownEndpoint(EndpointRef),
    #[error("a vertex has no endpoints")]
    EmptyVertex,
    #[error("a graph needs at least one edge")]
    NoEdges,
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),
    #[error("position {position} is not strictly inside edge {edge} of length {length}")]
    PositionOutOfRange { edge: EdgeId, position: f64, length: f64 },
    #[error("vertex {vertex} has degree {degree}, expected 2")]
    NotDegreeTwo { vertex: usize, degree: usize },
    #[error("vertex {0} is the base of a loop and cannot be smoothed")]
    LoopBase(usize),
    #[error("graph has {edges} edges after smoothing, limit is {limit}")]
    SizeLimitExceeded { edges: usize, limit: usize },
    #[error("graph file: {0}")]
    Format(String),
}

/// Derived combinatorial data.
#[derive(Clone, Debug, PartialEq)]
pub struct Topology {
    pub edges: usize,
    pub vertices: usize,
    pub components: usize,
    pub betti: usize,
    pub leaves: Vec<usize>,
    pub degrees: Vec<usize>,
    pub total_length: f64,
}

#[derive(Clone, Debug)]
pub struct MetricGraph {
    edges: Vec<Edge>,
    vertices: Vec<Vec<EndpointRef>>,
    index: BTreeMap<EdgeId, usize>,
    ends: Vec<[usize; 2]>,
}

impl PartialEq for MetricGraph {
    fn eq(&self, other: &Self) -> bool {
        self.edges.len() == other.edges.len()
            && self
                .edges
                .iter()
                .zip(&other.edges)
                .all(|(a, b)| a.id == b.id && a.length == b.length)
            && self.vertices == other.vertices
    }
}

/// Result of [`MetricGraph::subdivide_many`]: how old edges map onto new ones.
#[derive(Clone, Debug, Default)]
pub struct Refinement {
    /// For each split edge, its pieces in order as `(id, start, length)`.
    pub pieces: BTreeMap<EdgeId, Vec<(EdgeId, f64, f64)>>,
    /// The vertex created at each requested point, in request order.
    pub point_vertices: Vec<usize>,
}

impl Refinement {
    /// Where an endpoint of the old graph lives in the new one.
    pub fn lift(&self, p: EndpointRef) -> EndpointRef {
        match self.pieces.get(&p.edge) {
            None => p,
            Some(pieces) => match p.end {
                End::Source => EndpointRef::source(pieces[0].0),
                End::Target => EndpointRef::target(pieces[pieces.len() - 1].0),
            },
        }
    }

    /// The new edge containing old position `x` on `edge`, with its local coordinate.
    pub fn locate(&self, edge: EdgeId, x: f64) -> (EdgeId, f64) {
        match self.pieces.get(&edge) {
            None => (edge, x),
            Some(pieces) => {
                for &(id, start, len) in pieces {
                    if x <= start + len {
                        return (id, (x - start).max(0.0));
                    }
                }
                let &(id, start, _) = pieces.last().unwrap();
                (id, x - start)
            }
        }
    }

    /// New edges covering an old edge (the edge itself if it was not split).
    pub fn children(&self, edge: EdgeId) -> Vec<EdgeId> {
        match self.pieces.get(&edge) {
            None => vec![edge],
            Some(p) => p.iter().map(|c| c.0).collect(),
        }
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

impl MetricGraph {
    /// Validates and builds a graph from `(id, length)` pairs and endpoint blocks.
    pub fn new(edges: Vec<(EdgeId, f64)>, vertices: Vec<Vec<EndpointRef>>) -> Result<Self, GraphError> {
        let edges = edges.into_iter().map(|(id, l)| Edge::new(id, l)).collect();
        Self::from_parts(edges, vertices)
    }

    pub fn from_parts(edges: Vec<Edge>, mut vertices: Vec<Vec<EndpointRef>>) -> Result<Self, GraphError> {
        if edges.is_empty() {
            return Err(GraphError::NoEdges);
        }
        let mut index = BTreeMap::new();
        for (i, e) in edges.iter().enumerate() {
            if !(e.length.is_finite() && e.length > 0.0) {
                return Err(GraphError::NonPositiveLength { edge: e.id, length: e.length });
            }
            if index.insert(e.id, i).is_some() {
                return Err(GraphError::DuplicateEdgeId(e.id));
            }
        }
        let mut ends = vec![[usize::MAX; 2]; edges.len()];
        for (v, block) in vertices.iter_mut().enumerate() {
            if block.is_empty() {
                return Err(GraphError::EmptyVertex);
            }
            block.sort();
            for p in block.iter() {
                let i = *index.get(&p.edge).ok_or(GraphError::UnknownEndpoint(*p))?;
                let slot = &mut ends[i][p.end as usize];
                if *slot != usize::MAX {
                    return Err(GraphError::EndpointMissingOrDuplicated(*p));
                }
                *slot = v;
            }
        }
        for (i, e) in edges.iter().enumerate() {
            for end in [End::Source, End::Target] {
                if ends[i][end as usize] == usize::MAX {
                    return Err(GraphError::EndpointMissingOrDuplicated(EndpointRef { edge: e.id, end }));
                }
            }
        }
        Ok(MetricGraph { edges, vertices, index, ends })
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertices(&self) -> &[Vec<EndpointRef>] {
        &self.vertices
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_index(&self, id: EdgeId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn edge(&self, id: EdgeId) -> Result<&Edge, GraphError> {
        self.edge_index(id).map(|i| &self.edges[i]).ok_or(GraphError::UnknownEdge(id))
    }

    pub fn length(&self, id: EdgeId) -> f64 {
        self.edges[self.index[&id]].length
    }

    /// Source and target vertex of the edge at position `i`.
    pub fn ends(&self, i: usize) -> [usize; 2] {
        self.ends[i]
    }

    pub fn vertex_of(&self, p: EndpointRef) -> usize {
        self.ends[self.index[&p.edge]][p.end as usize]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.vertices[v].len()
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    pub fn max_edge_id(&self) -> EdgeId {
        self.edges.iter().map(|e| e.id).max().unwrap()
    }

    /// Component label of every vertex, numbered in order of first appearance.
    pub fn vertex_components(&self) -> (Vec<usize>, usize) {
        let mut uf = UnionFind::new(self.vertices.len());
        for e in &self.ends {
            uf.union(e[0], e[1]);
        }
        let mut label = vec![usize::MAX; self.vertices.len()];
        let mut next = 0;
        let mut out = Vec::with_capacity(self.vertices.len());
        for v in 0..self.vertices.len() {
            let r = uf.find(v);
            if label[r] == usize::MAX {
                label[r] = next;
                next += 1;
            }
            out.push(label[r]);
        }
        (out, next)
    }

    /// Edge ids of each component, each list sorted.
    pub fn component_edges(&self) -> Vec<Vec<EdgeId>> {
        let (label, n) = self.vertex_components();
        let mut out = vec![Vec::new(); n];
        for (i, e) in self.edges.iter().enumerate() {
            out[label[self.ends[i][0]]].push(e.id);
        }
        for c in &mut out {
            c.sort();
        }
        out
    }

    pub fn component_count(&self) -> usize {
        self.vertex_components().1
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() == 1
    }

    pub fn betti(&self) -> usize {
        self.edges.len() + self.component_count() - self.vertices.len()
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&v| self.degree(v) == 1).collect()
    }

    pub fn topology(&self) -> Topology {
        Topology {
            edges: self.edges.len(),
            vertices: self.vertices.len(),
            components: self.component_count(),
            betti: self.betti(),
            leaves: self.leaves(),
            degrees: (0..self.vertices.len()).map(|v| self.degree(v)).collect(),
            total_length: self.total_length(),
        }
    }

    /// Length-preserving symmetries, each given as `(image edge index, reversed)`
    /// per edge, the identity first. Stops after `limit` of them.
    pub fn automorphisms(&self, limit: usize) -> Vec<Vec<(usize, bool)>> {
        struct Search<'a> {
            g: &'a MetricGraph,
            limit: usize,
            image: Vec<(usize, bool)>,
            used: Vec<bool>,
            vmap: Vec<Option<usize>>,
            vinv: Vec<Option<usize>>,
            out: Vec<Vec<(usize, bool)>>,
        }
        impl Search<'_> {
            fn bind(&mut self, v: usize, w: usize, log: &mut Vec<usize>) -> bool {
                match (self.vmap[v], self.vinv[w]) {
                    (Some(x), _) => x == w,
                    (None, Some(_)) => false,
                    (None, None) => {
                        self.vmap[v] = Some(w);
                        self.vinv[w] = Some(v);
                        log.push(v);
                        true
                    }
                }
            }

            fn go(&mut self, i: usize) {
                if self.out.len() >= self.limit {
                    return;
                }
                let g = self.g;
                if i == g.edges.len() {
                    self.out.push(self.image.clone());
                    return;
                }
                let [a, b] = g.ends[i];
                let len = g.edges[i].length;
                for j in 0..g.edges.len() {
                    if self.used[j] || (g.edges[j].length - len).abs() > LENGTH_TOL * len.max(1.0) {
                        continue;
                    }
                    for flip in [false, true] {
                        let [c, d] = g.ends[j];
                        let (c, d) = if flip { (d, c) } else { (c, d) };
                        let mut log = Vec::new();
                        if self.bind(a, c, &mut log) && self.bind(b, d, &mut log) {
                            self.used[j] = true;
                            self.image[i] = (j, flip);
                            self.go(i + 1);
                            self.used[j] = false;
                        }
                        for v in log {
                            let w = self.vmap[v].take().unwrap();
                            self.vinv[w] = None;
                        }
                    }
                }
            }
        }
        let n = self.vertices.len();
        let mut s = Search {
            g: self,
            limit: limit.max(1),
            image: vec![(0, false); self.edges.len()],
            used: vec![false; self.edges.len()],
            vmap: vec![None; n],
            vinv: vec![None; n],
            out: Vec::new(),
        };
        s.go(0);
        s.out
    }

    /// Vertex blocks as a sorted list of sorted blocks, for order-free comparison.
    pub fn canonical_vertices(&self) -> Vec<Vec<EndpointRef>> {
        let mut v = self.vertices.clone();
        v.sort();
        v
    }

    /// Adds a degree-2 vertex at distance `t` from the source of `edge`.
    pub fn subdivide(&self, edge: EdgeId, t: f64) -> Result<MetricGraph, GraphError> {
        Ok(self.subdivide_many(&[(edge, t)])?.0)
    }

    /// Subdivides at several points at once. Existing vertices keep their
    /// indices and new vertices are appended, ordered by edge then position.
    /// Points closer than [`LENGTH_TOL`] to each other share a vertex.
    pub fn subdivide_many(&self, points: &[(EdgeId, f64)]) -> Result<(MetricGraph, Refinement), GraphError> {
        let mut per_edge: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        for &(id, t) in points {
            let i = self.edge_index(id).ok_or(GraphError::UnknownEdge(id))?;
            let len = self.edges[i].length;
            if !(t > LENGTH_TOL && t < len - LENGTH_TOL) {
                return Err(GraphError::PositionOutOfRange { edge: id, position: t, length: len });
            }
            per_edge.entry(i).or_default().push(t);
        }
        for ts in per_edge.values_mut() {
            ts.sort_by(f64::total_cmp);
            ts.dedup_by(|a, b| (*a - *b).abs() <= LENGTH_TOL);
        }
        let mut next_id = self.max_edge_id().0 + 1;
        let mut edges = Vec::with_capacity(self.edges.len() + points.len());
        let mut vertices = self.vertices.clone();
        let mut refinement = Refinement::default();
        let mut rename: BTreeMap<EndpointRef, EndpointRef> = BTreeMap::new();
        let mut created: Vec<(EdgeId, f64, usize)> = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            let Some(ts) = per_edge.get(&i) else {
                edges.push(*e);
                continue;
            };
            let mut cuts = vec![0.0];
            cuts.extend(ts.iter().copied());
            cuts.push(e.length);
            let mut pieces = Vec::new();
            for w in cuts.windows(2) {
                let id = EdgeId(next_id);
                next_id += 1;
                let length = w[1] - w[0];
                edges.push(Edge { id, length, parent: Some(e.id), root: e.root, offset: e.offset + w[0] });
                pieces.push((id, w[0], length));
            }
            rename.insert(EndpointRef::source(e.id), EndpointRef::source(pieces[0].0));
            rename.insert(EndpointRef::target(e.id), EndpointRef::target(pieces[pieces.len() - 1].0));
            for j in 0..ts.len() {
                vertices.push(vec![EndpointRef::target(pieces[j].0), EndpointRef::source(pieces[j + 1].0)]);
                created.push((e.id, ts[j], vertices.len() - 1));
            }
            refinement.pieces.insert(e.id, pieces);
        }
        for block in vertices.iter_mut().take(self.vertices.len()) {
            for p in block.iter_mut() {
                if let Some(q) = rename.get(p) {
                    *p = *q;
                }
            }
        }
        for &(id, t) in points {
            let v = created
                .iter()
                .filter(|c| c.0 == id)
                .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))
                .unwrap()
                .2;
            refinement.point_vertices.push(v);
        }
        Ok((MetricGraph::from_parts(edges, vertices)?, refinement))
    }

    /// Whether `v` has degree 2 and is not the base of a loop.
    pub fn is_smoothable(&self, v: usize) -> bool {
        v < self.vertices.len() && self.degree(v) == 2 && self.vertices[v][0].edge != self.vertices[v][1].edge
    }

    /// Removes a degree-2 vertex, merging its two edges. The merged edge gets a
    /// fresh id and takes the place of the earlier of the two.
    pub fn smooth(&self, v: usize) -> Result<MetricGraph, GraphError> {
        if v >= self.vertices.len() {
            return Err(GraphError::UnknownVertex(v));
        }
        if self.degree(v) != 2 {
            return Err(GraphError::NotDegreeTwo { vertex: v, degree: self.degree(v) });
        }
        let (p, q) = (self.vertices[v][0], self.vertices[v][1]);
        if p.edge == q.edge {
            return Err(GraphError::LoopBase(v));
        }
        // Orient so the merged edge runs first along `first` and then along `second`.
        let (first, second) = match (p.end, q.end) {
            (End::Target, _) => (p, q),
            (_, End::Target) => (q, p),
            _ => (p, q),
        };
        let e1 = *self.edge(first.edge)?;
        let e2 = *self.edge(second.edge)?;
        let id = EdgeId(self.max_edge_id().0 + 1);
        let length = e1.length + e2.length;
        let aligned = first.end == End::Target && second.end == End::Source;
        let contiguous = aligned && e1.root == e2.root && (e1.offset + e1.length - e2.offset).abs() <= LENGTH_TOL;
        let merged = if contiguous {
            Edge { id, length, parent: None, root: e1.root, offset: e1.offset }
        } else {
            Edge::new(id, length)
        };
        let far1 = first.opposite();
        let far2 = second.opposite();
        let (i1, i2) = (self.index[&e1.id], self.index[&e2.id]);
        let keep = i1.min(i2);
        let drop = i1.max(i2);
        let mut edges = self.edges.clone();
        edges[keep] = merged;
        edges.remove(drop);
        let mut vertices = self.vertices.clone();
        vertices.remove(v);
        for block in &mut vertices {
            for r in block.iter_mut() {
                if *r == far1 {
                    *r = EndpointRef::source(id);
                } else if *r == far2 {
                    *r = EndpointRef::target(id);
                }
            }
        }
        MetricGraph::from_parts(edges, vertices)
    }

    /// Smooths every degree-2 vertex that is not a loop base.
    pub fn smoothed(&self) -> MetricGraph {
        let mut g = self.clone();
        while let Some(v) = (0..g.vertex_count()).find(|&v| g.is_smoothable(v)) {
            g = g.smooth(v).expect("smoothable vertex");
        }
        g
    }

    /// Isomorphism of metric graphs after smoothing away degree-2 vertices.
    pub fn is_isomorphic_up_to_dummies(&self, other: &MetricGraph) -> Result<bool, GraphError> {
        let a = self.smoothed();
        let b = other.smoothed();
        for g in [&a, &b] {
            if g.edge_count() > ISOMORPHISM_EDGE_LIMIT {
                return Err(GraphError::SizeLimitExceeded { edges: g.edge_count(), limit: ISOMORPHISM_EDGE_LIMIT });
            }
        }
        if a.edge_count() != b.edge_count() || a.vertex_count() != b.vertex_count() {
            return Ok(false);
        }
        let mut da: Vec<usize> = (0..a.vertex_count()).map(|v| a.degree(v)).collect();
        let mut db: Vec<usize> = (0..b.vertex_count()).map(|v| b.degree(v)).collect();
        da.sort_unstable();
        db.sort_unstable();
        if da != db {
            return Ok(false);
        }
        let tol = LENGTH_TOL * a.total_length().max(1.0);
        let mut st = IsoState {
            a: &a,
            b: &b,
            tol,
            vmap: vec![usize::MAX; a.vertex_count()],
            vinv: vec![usize::MAX; b.vertex_count()],
            used: vec![false; b.edge_count()],
        };
        Ok(st.search(0))
    }
}

struct IsoState<'g> {
    a: &'g MetricGraph,
    b: &'g MetricGraph,
    tol: f64,
    vmap: Vec<usize>,
    vinv: Vec<usize>,
    used: Vec<bool>,
}

impl IsoState<'_> {
    fn try_map(&mut self, x: usize, y: usize, undo: &mut Vec<usize>) -> bool {
        if self.vmap[x] == usize::MAX && self.vinv[y] == usize::MAX {
            if self.a.degree(x) != self.b.degree(y) {
                return false;
            }
            self.vmap[x] = y;
            self.vinv[y] = x;
            undo.push(x);
            true
        } else {
            self.vmap[x] == y
        }
    }

    fn search(&mut self, i: usize) -> bool {
        if i == self.a.edge_count() {
            return true;
        }
        let [s, t] = self.a.ends(i);
        let len = self.a.edges[i].length;
        for j in 0..self.b.edge_count() {
            if self.used[j] || (self.b.edges[j].length - len).abs() > self.tol {
                continue;
            }
            let [bs, bt] = self.b.ends(j);
            if (s == t) != (bs == bt) {
                continue;
            }
            for (x, y) in [(bs, bt), (bt, bs)] {
                let mut undo = Vec::new();
                if self.try_map(s, x, &mut undo) && self.try_map(t, y, &mut undo) {
                    self.used[j] = true;
                    if self.search(i + 1) {
                        return true;
                    }
                    self.used[j] = false;
                }
                for v in undo {
                    self.vinv[self.vmap[v]] = usize::MAX;
                    self.vmap[v] = usize::MAX;
                }
            }
        }
        false
    }
}

#[derive(Serialize, Deserialize)]
struct EdgeRecord {
    id: EdgeId,
    length: f64,
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    edges: Vec<EdgeRecord>,
    vertices: Vec<Vec<EndpointRef>>,
}

impl MetricGraph {
    /// Serializes to the JSON graph file format. Lineage is not stored.
    pub fn to_json(&self) -> String {
        let file = GraphFile {
            edges: self.edges.iter().map(|e| EdgeRecord { id: e.id, length: e.length }).collect(),
            vertices: self.vertices.clone(),
        };
        serde_json::to_string_pretty(&file).expect("graph serializes")
    }

    pub fn from_json(text: &str) -> Result<MetricGraph, GraphError> {
        let file: GraphFile = serde_json::from_str(text).map_err(|e| GraphError::Format(e.to_string()))?;
        MetricGraph::new(file.edges.into_iter().map(|r| (r.id, r.length)).collect(), file.vertices)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path2() -> MetricGraph {
        let (a, b) = (EdgeId(0), EdgeId(1));
        MetricGraph::new(
            vec![(a, 1.0), (b, 2.0)],
            vec![
                vec![EndpointRef::source(a)],
                vec![EndpointRef::target(a), EndpointRef::source(b)],
                vec![EndpointRef::target(b)],
            ],
        )
        .unwrap()
    }

    #[test]
    fn symmetry_counts() {
        use crate::catalog::CatalogSpec;
        let count = |s: &str| s.parse::<CatalogSpec>().unwrap().build().automorphisms(1000).len();
        assert_eq!(path2().automorphisms(10).len(), 1);
        assert_eq!(count("interval:1"), 2);
        assert_eq!(count("loop:1"), 2);
        assert_eq!(count("star:3"), 6);
        assert_eq!(count("figure8:1:1"), 8);
        assert_eq!(count("pumpkin_dumbbell:1:1"), 72);
        let g = path2();
        assert_eq!(g.automorphisms(10)[0], vec![(0, false), (1, false)]);
    }

    #[test]
    fn rejects_bad_input() {
        let a = EdgeId(0);
        assert!(matches!(
            MetricGraph::new(vec![(a, 0.0)], vec![vec![EndpointRef::source(a), EndpointRef::target(a)]]),
            Err(GraphError::NonPositiveLength { .. })
        ));
        assert!(matches!(
            MetricGraph::new(vec![(a, 1.0)], vec![vec![EndpointRef::source(a)]]),
            Err(GraphError::EndpointMissingOrDuplicated(_))
        ));
        assert!(matches!(
            MetricGraph::new(
                vec![(a, 1.0)],
                vec![vec![EndpointRef::source(a), EndpointRef::target(a)], vec![EndpointRef::target(a)]]
            ),
            Err(GraphError::EndpointMissingOrDuplicated(_))
        ));
        assert!(matches!(
            MetricGraph::new(vec![(a, 1.0), (a, 2.0)], vec![]),
            Err(GraphError::DuplicateEdgeId(_))
        ));
    }

    #[test]
    fn topology_of_path() {
        let t = path2().topology();
        assert_eq!((t.edges, t.vertices, t.components, t.betti), (2, 3, 1, 0));
        assert_eq!(t.leaves, vec![0, 2]);
        assert_eq!(t.total_length, 3.0);
    }

    #[test]
    fn subdivide_then_smooth() {
        let g = path2();
        let h = g.subdivide(EdgeId(1), 0.5).unwrap();
        assert_eq!(h.vertex_count(), 4);
        assert_eq!(h.vertices()[0], g.vertices()[0]);
        let e = h.edges().iter().find(|e| e.offset == 0.5).unwrap();
        assert_eq!((e.root, e.parent, e.length), (EdgeId(1), Some(EdgeId(1)), 1.5));
        let back = h.smooth(3).unwrap();
        assert!((back.total_length() - 3.0).abs() < 1e-15);
        assert_eq!(back.edges()[1].root, EdgeId(1));
        assert!(back.is_isomorphic_up_to_dummies(&g).unwrap());
    }

    #[test]
    fn refinement_lifts_endpoints() {
        let g = path2();
        let (h, r) = g.subdivide_many(&[(EdgeId(1), 1.5), (EdgeId(1), 0.5)]).unwrap();
        assert_eq!(r.point_vertices, vec![4, 3]);
        let last = r.lift(EndpointRef::target(EdgeId(1)));
        assert_eq!(h.vertex_of(last), 2);
        assert_eq!(r.locate(EdgeId(1), 1.0).1, 0.5);
        assert_eq!(r.children(EdgeId(1)).len(), 3);
    }

    #[test]
    fn loop_base_is_not_smoothable() {
        let a = EdgeId(0);
        let g = MetricGraph::new(vec![(a, 1.0)], vec![vec![EndpointRef::source(a), EndpointRef::target(a)]]).unwrap();
        assert_eq!(g.smooth(0), Err(GraphError::LoopBase(0)));
        assert_eq!(g.betti(), 1);
    }

    #[test]
    fn isomorphism_respects_lengths() {
        let g = path2();
        let (a, b) = (EdgeId(5), EdgeId(7));
        let flipped = MetricGraph::new(
            vec![(a, 2.0), (b, 1.0)],
            vec![
                vec![EndpointRef::target(a)],
                vec![EndpointRef::source(a), EndpointRef::target(b)],
                vec![EndpointRef::source(b)],
            ],
        )
        .unwrap();
        assert!(g.is_isomorphic_up_to_dummies(&flipped).unwrap());
        let single = MetricGraph::new(
            vec![(a, 3.0)],
            vec![vec![EndpointRef::source(a)], vec![EndpointRef::target(a)]],
        )
        .unwrap();
        // smoothing the middle vertex of the path yields one edge of length 3
        assert!(g.is_isomorphic_up_to_dummies(&single).unwrap());
        let other = MetricGraph::new(
            vec![(a, 2.5)],
            vec![vec![EndpointRef::source(a)], vec![EndpointRef::target(a)]],
        )
        .unwrap();
        assert!(!g.is_isomorphic_up_to_dummies(&other).unwrap());
    }

    #[test]
    fn json_round_trip() {
        let g = path2();
        let back = MetricGraph::from_json(&g.to_json()).unwrap();
        assert_eq!(g, back);
        assert!(matches!(MetricGraph::from_json("{"), Err(GraphError::Format(_))));
    }
}
