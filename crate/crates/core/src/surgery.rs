//! Cuts: splitting vertices into finer endpoint blocks, and gluing them back.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::graph::{EndpointRef, GraphError, MetricGraph, LENGTH_TOL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SurgeryError {
    #[error("grouping is not a partition of the endpoints of vertex {0} into at least two blocks")]
    InvalidGrouping(usize),
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),
    #[error("relations do not share the intermediate graph")]
    MismatchedGraphs,
    #[error("gluing needs at least two distinct vertices")]
    TooFewVertices,
    #[error("not a cut: {0}")]
    NotACut(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Witness that `cut` is obtained from `original` by splitting vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct CutRelation {
    original: MetricGraph,
    cut: MetricGraph,
    vertex_map: Vec<usize>,
    cut_set: BTreeSet<usize>,
    rank: usize,
}

impl CutRelation {
    /// Checks that `cut` refines `original` and records the vertex containment.
    pub fn between(original: &MetricGraph, cut: &MetricGraph) -> Result<CutRelation, SurgeryError> {
        if original.edge_count() != cut.edge_count() {
            return Err(SurgeryError::NotACut("edge sets differ".into()));
        }
        for e in cut.edges() {
            let o = original
                .edge(e.id)
                .map_err(|_| SurgeryError::NotACut(format!("edge {} is not in the original", e.id)))?;
            if (o.length - e.length).abs() > LENGTH_TOL * o.length.max(1.0) {
                return Err(SurgeryError::NotACut(format!("edge {} changed length", e.id)));
            }
        }
        let mut vertex_map = Vec::with_capacity(cut.vertex_count());
        let mut hits = vec![0usize; original.vertex_count()];
        for block in cut.vertices() {
            let v = original.vertex_of(block[0]);
            if block.iter().any(|&p| original.vertex_of(p) != v) {
                return Err(SurgeryError::NotACut(format!("a cut vertex straddles original vertices at {}", block[0])));
            }
            vertex_map.push(v);
            hits[v] += 1;
        }
        let cut_set = (0..hits.len()).filter(|&v| hits[v] > 1).collect();
        Ok(CutRelation {
            original: original.clone(),
            cut: cut.clone(),
            vertex_map,
            cut_set,
            rank: cut.vertex_count() - original.vertex_count(),
        })
    }

    pub fn identity(g: &MetricGraph) -> CutRelation {
        CutRelation::between(g, g).expect("a graph is a cut of itself")
    }

    pub fn original(&self) -> &MetricGraph {
        &self.original
    }

    pub fn cut(&self) -> &MetricGraph {
        &self.cut
    }

    /// Original vertex containing each cut vertex.
    pub fn vertex_map(&self) -> &[usize] {
        &self.vertex_map
    }

    pub fn cut_set(&self) -> &BTreeSet<usize> {
        &self.cut_set
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Cut vertices lying inside original vertex `v`.
    pub fn pieces_of(&self, v: usize) -> Vec<usize> {
        (0..self.vertex_map.len()).filter(|&u| self.vertex_map[u] == v).collect()
    }

    /// Same original and same cut vertex blocks, regardless of vertex order.
    pub fn same_as(&self, other: &CutRelation) -> bool {
        self.original == other.original
            && self.cut.canonical_vertices() == other.cut.canonical_vertices()
            && self.rank == other.rank
    }
}

fn replace_vertex(g: &MetricGraph, v: usize, blocks: &[Vec<EndpointRef>]) -> Result<MetricGraph, SurgeryError> {
    let mut vertices = g.vertices().to_vec();
    vertices[v] = blocks[0].clone();
    vertices.extend(blocks[1..].iter().cloned());
    Ok(MetricGraph::from_parts(g.edges().to_vec(), vertices)?)
}

/// Splits vertex `v` into the given blocks. The first block keeps index `v`;
/// the others are appended.
pub fn split_vertex(
    g: &MetricGraph,
    v: usize,
    grouping: &[Vec<EndpointRef>],
) -> Result<(MetricGraph, CutRelation), SurgeryError> {
    if v >= g.vertex_count() {
        return Err(SurgeryError::UnknownVertex(v));
    }
    if grouping.len() < 2 || grouping.iter().any(|b| b.is_empty()) {
        return Err(SurgeryError::InvalidGrouping(v));
    }
    let mut all: Vec<EndpointRef> = grouping.iter().flatten().copied().collect();
    all.sort();
    if all != g.vertices()[v] {
        return Err(SurgeryError::InvalidGrouping(v));
    }
    let cut = replace_vertex(g, v, grouping)?;
    let rel = CutRelation::between(g, &cut)?;
    Ok((cut, rel))
}

/// Splits every vertex of `set` into singletons.
pub fn maximal_cut(g: &MetricGraph, set: &[usize]) -> Result<(MetricGraph, CutRelation), SurgeryError> {
    let mut vertices = g.vertices().to_vec();
    let mut extra = Vec::new();
    let mut seen = BTreeSet::new();
    for &v in set {
        if v >= g.vertex_count() {
            return Err(SurgeryError::UnknownVertex(v));
        }
        if !seen.insert(v) {
            continue;
        }
        let block = g.vertices()[v].clone();
        vertices[v] = vec![block[0]];
        extra.extend(block[1..].iter().map(|&p| vec![p]));
    }
    vertices.extend(extra);
    let cut = MetricGraph::from_parts(g.edges().to_vec(), vertices)?;
    let rel = CutRelation::between(g, &cut)?;
    Ok((cut, rel))
}

/// `rel12` exhibits G1 as a cut of G2 and `rel23` exhibits G2 as a cut of G3;
/// the result exhibits G1 as a cut of G3.
pub fn compose(rel12: &CutRelation, rel23: &CutRelation) -> Result<CutRelation, SurgeryError> {
    if rel12.original != rel23.cut {
        return Err(SurgeryError::MismatchedGraphs);
    }
    let composed = CutRelation::between(&rel23.original, &rel12.cut)?;
    debug_assert!(composed
        .vertex_map
        .iter()
        .zip(&rel12.vertex_map)
        .all(|(&a, &b)| a == rel23.vertex_map[b]));
    Ok(composed)
}

/// Merges the given vertices into one, placed at the smallest index. The
/// returned relation has the input as its cut and the glued graph as original.
pub fn glue(g: &MetricGraph, vertices: &[usize]) -> Result<(MetricGraph, CutRelation), SurgeryError> {
    let set: BTreeSet<usize> = vertices.iter().copied().collect();
    if set.len() < 2 {
        return Err(SurgeryError::TooFewVertices);
    }
    if let Some(&v) = set.iter().find(|&&v| v >= g.vertex_count()) {
        return Err(SurgeryError::UnknownVertex(v));
    }
    let first = *set.iter().next().unwrap();
    let mut merged: Vec<EndpointRef> = set.iter().flat_map(|&v| g.vertices()[v].iter().copied()).collect();
    merged.sort();
    let mut out = Vec::with_capacity(g.vertex_count() - set.len() + 1);
    for (v, block) in g.vertices().iter().enumerate() {
        if v == first {
            out.push(merged.clone());
        } else if !set.contains(&v) {
            out.push(block.clone());
        }
    }
    let glued = MetricGraph::from_parts(g.edges().to_vec(), out)?;
    let rel = CutRelation::between(&glued, g)?;
    Ok((glued, rel))
}

/// Factors a cut into simple cuts, each splitting one block off one vertex.
/// The relations are ordered from `rel.original` towards `rel.cut`.
pub fn simple_cut_sequence(rel: &CutRelation) -> Vec<CutRelation> {
    let mut steps = Vec::with_capacity(rel.rank);
    let mut current = rel.original.clone();
    for &v in &rel.cut_set {
        let mut pieces: Vec<&Vec<EndpointRef>> = rel.pieces_of(v).into_iter().map(|u| &rel.cut.vertices()[u]).collect();
        pieces.sort();
        for piece in &pieces[..pieces.len() - 1] {
            let w = current.vertex_of(piece[0]);
            let rest: Vec<EndpointRef> = current.vertices()[w].iter().filter(|p| !piece.contains(p)).copied().collect();
            let (next, step) =
                split_vertex(&current, w, &[(*piece).clone(), rest]).expect("pieces refine the current vertex");
            steps.push(step);
            current = next;
        }
    }
    steps
}

/// Whether the statement "rank ≥ β + 1 forces a disconnected cut" holds for `rel`.
pub fn check_betti_disconnection(g: &MetricGraph, rel: &CutRelation) -> bool {
    rel.rank < g.betti() + 1 || !rel.cut.is_connected()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::CatalogSpec;
    use crate::graph::EdgeId;

    fn star() -> MetricGraph {
        CatalogSpec::Star(vec![1.0; 3]).build()
    }

    /// One loop and three pendants at a single vertex.
    fn fig_a() -> MetricGraph {
        CatalogSpec::Stower(vec![1.0], vec![1.0; 3]).build()
    }

    #[test]
    fn split_star_center() {
        let g = star();
        let c = g.vertices()[0].clone();
        let (cut, rel) = split_vertex(&g, 0, &[vec![c[0]], vec![c[1], c[2]]]).unwrap();
        assert_eq!(rel.rank(), 1);
        assert_eq!(cut.component_count(), 2);
        assert_eq!(rel.cut_set().iter().copied().collect::<Vec<_>>(), vec![0]);
        assert_eq!(split_vertex(&g, 0, &[c.clone()]), Err(SurgeryError::InvalidGrouping(0)));
        assert_eq!(split_vertex(&g, 0, &[vec![c[0]], vec![c[1]]]), Err(SurgeryError::InvalidGrouping(0)));
    }

    #[test]
    fn maximal_cuts() {
        let (cut, rel) = maximal_cut(&star(), &[0]).unwrap();
        assert_eq!((rel.rank(), cut.component_count()), (2, 3));
        let lp = CatalogSpec::Loop(1.0).build();
        let (cut, rel) = maximal_cut(&lp, &[0]).unwrap();
        assert_eq!((rel.rank(), cut.leaves().len()), (1, 2));
        let (cut, rel) = maximal_cut(&fig_a(), &[0]).unwrap();
        assert_eq!(rel.rank(), 4);
        assert_eq!(cut.component_count(), 4);
        assert_eq!(maximal_cut(&lp, &[3]), Err(SurgeryError::UnknownVertex(3)));
    }

    #[test]
    fn figure_one_chain_has_rank_five() {
        let a = fig_a();
        let v = a.vertices()[0].clone();
        let loop_ends = vec![EndpointRef::source(EdgeId(0)), EndpointRef::target(EdgeId(0))];
        let mut grouping = vec![loop_ends];
        grouping.extend(v.iter().filter(|p| p.edge != EdgeId(0)).map(|&p| vec![p]));
        let (d, ad) = split_vertex(&a, 0, &grouping).unwrap();
        assert_eq!(ad.rank(), 3);
        let (e, de) = split_vertex(&d, 0, &[vec![EndpointRef::source(EdgeId(0))], vec![EndpointRef::target(EdgeId(0))]]).unwrap();
        let (e_direct, _) = maximal_cut(&a, &[0]).unwrap();
        assert_eq!(e.canonical_vertices(), e_direct.canonical_vertices());
        let mid = e.subdivide(EdgeId(0), 0.5).unwrap();
        let dummy = mid.vertex_count() - 1;
        let blocks: Vec<Vec<EndpointRef>> = mid.vertices()[dummy].iter().map(|&p| vec![p]).collect();
        let (f, ef) = split_vertex(&mid, dummy, &blocks).unwrap();
        assert_eq!(ef.rank(), 1);
        let de_ad = compose(&de, &ad).unwrap();
        assert_eq!(de_ad.rank(), 4);
        // relative to (a) with a dummy vertex in the loop
        let a_mid = a.subdivide(EdgeId(0), 0.5).unwrap();
        let af = CutRelation::between(&a_mid, &f).unwrap();
        assert_eq!(af.rank(), 5);
        assert_eq!(simple_cut_sequence(&af).len(), 5);
        assert!(matches!(compose(&ad, &de), Err(SurgeryError::MismatchedGraphs)));
    }

    #[test]
    fn glue_examples() {
        let i = CatalogSpec::Interval(1.0).build();
        let (lp, rel) = glue(&i, &[0, 1]).unwrap();
        assert_eq!((lp.betti(), rel.rank()), (1, 1));
        let (cut, _) = maximal_cut(&star(), &[0]).unwrap();
        let centers: Vec<usize> = (0..cut.vertex_count()).filter(|&v| cut.vertices()[v].iter().all(|p| p.end == crate::graph::End::Source)).collect();
        let (s, _) = glue(&cut, &centers).unwrap();
        assert!(s.is_isomorphic_up_to_dummies(&star()).unwrap());
        assert_eq!(glue(&i, &[0, 0]), Err(SurgeryError::TooFewVertices));
    }

    #[test]
    fn simple_sequence_recomposes() {
        let (_, rel) = maximal_cut(&fig_a(), &[0]).unwrap();
        let steps = simple_cut_sequence(&rel);
        assert_eq!(steps.len(), 4);
        let mut acc = CutRelation::identity(rel.original());
        for s in &steps {
            acc = compose(s, &acc).unwrap();
        }
        assert!(acc.same_as(&rel));
        assert!(simple_cut_sequence(&CutRelation::identity(&star())).is_empty());
    }

    #[test]
    fn figure_eight_rank_two_cut_can_stay_connected() {
        let g = CatalogSpec::Figure8(1.0, 1.0).build();
        let v = g.vertices()[0].clone();
        // every 3-block grouping of the 4 endpoints is a rank-2 cut
        let mut connected = 0;
        for a in 0..4 {
            for b in a + 1..4 {
                let pair = vec![v[a], v[b]];
                let mut grouping = vec![pair];
                grouping.extend((0..4).filter(|&i| i != a && i != b).map(|i| vec![v[i]]));
                let (cut, rel) = split_vertex(&g, 0, &grouping).unwrap();
                assert!(check_betti_disconnection(&g, &rel));
                connected += cut.is_connected() as usize;
            }
        }
        assert!(connected > 0);
    }
}
