//! k-partitions: clusters chosen among the components of a cut graph.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{EdgeId, EndpointRef, GraphError, MetricGraph};
use crate::surgery::{glue, CutRelation, SurgeryError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PartitionError {
    #[error("selection {0:?} is not a connected component of the cut graph")]
    NotAComponent(Vec<EdgeId>),
    #[error("no clusters selected")]
    EmptySelection,
    #[error("the partition is already exhaustive")]
    AlreadyExhaustive,
    #[error("the relation is not a cut of the given host")]
    HostMismatch,
    #[error("search space holds {count} candidates, above the cap of {cap}")]
    SearchSpaceTooLarge { count: u128, cap: u128 },
    #[error("k = {k} exceeds the {max} clusters available at this mesh resolution")]
    InfeasibleK { k: usize, max: usize },
    #[error("the host graph must be connected")]
    Disconnected,
    #[error("cluster index {0} out of range")]
    InvalidIndex(usize),
    #[error(transparent)]
    Surgery(#[from] SurgeryError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cluster {
    /// Sorted edge ids.
    pub edges: Vec<EdgeId>,
    /// Vertices of the minimal cut graph belonging to this cluster.
    pub vertices: Vec<usize>,
    /// Those of `vertices` lying in cut host vertices.
    pub boundary: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MalignReason {
    Leaf,
    Cycle,
    LeafAndCycle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClusterClass {
    Benign,
    Malign(MalignReason),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Partition {
    host: MetricGraph,
    clusters: Vec<Cluster>,
    minimal_cut: CutRelation,
    boundary_vertices: BTreeSet<usize>,
    exhaustive: bool,
    rigid: bool,
}

/// Builds the partition whose clusters are the selected components of `rel.cut()`.
/// The minimal cut graph keeps the cluster vertices and glues everything else
/// back together inside each host vertex.
pub fn partition_from_cut(
    g: &MetricGraph,
    rel: &CutRelation,
    selected: &[Vec<EdgeId>],
) -> Result<Partition, PartitionError> {
    if rel.original() != g {
        return Err(PartitionError::HostMismatch);
    }
    if selected.is_empty() {
        return Err(PartitionError::EmptySelection);
    }
    let cut = rel.cut();
    let components = cut.component_edges();
    let (label, _) = cut.vertex_components();
    let mut chosen = Vec::with_capacity(selected.len());
    for sel in selected {
        let mut s = sel.clone();
        s.sort();
        match components.iter().position(|c| *c == s) {
            Some(c) if !chosen.contains(&c) => chosen.push(c),
            _ => return Err(PartitionError::NotAComponent(s)),
        }
    }
    // cluster blocks grouped by host vertex
    let mut per_host: Vec<Vec<(Vec<EndpointRef>, usize)>> = vec![Vec::new(); g.vertex_count()];
    let mut taken: BTreeSet<EndpointRef> = BTreeSet::new();
    for (u, block) in cut.vertices().iter().enumerate() {
        if let Some(ci) = chosen.iter().position(|&c| c == label[u]) {
            per_host[rel.vertex_map()[u]].push((block.clone(), ci));
            taken.extend(block.iter().copied());
        }
    }
    let mut blocks = Vec::new();
    let mut owner = Vec::new();
    for (v, host_block) in g.vertices().iter().enumerate() {
        let mut pieces = std::mem::take(&mut per_host[v]);
        pieces.sort();
        for (b, ci) in pieces {
            blocks.push(b);
            owner.push(Some(ci));
        }
        let rest: Vec<EndpointRef> = host_block.iter().filter(|p| !taken.contains(p)).copied().collect();
        if !rest.is_empty() {
            blocks.push(rest);
            owner.push(None);
        }
    }
    let minimal = MetricGraph::from_parts(g.edges().to_vec(), blocks)?;
    let minimal_cut = CutRelation::between(g, &minimal)?;
    Ok(assemble(g.clone(), minimal_cut, &owner, selected))
}

fn assemble(host: MetricGraph, minimal_cut: CutRelation, owner: &[Option<usize>], selected: &[Vec<EdgeId>]) -> Partition {
    let k = selected.len();
    let mut clusters: Vec<Cluster> = selected
        .iter()
        .map(|s| {
            let mut e = s.clone();
            e.sort();
            Cluster { edges: e, vertices: Vec::new(), boundary: Vec::new() }
        })
        .collect();
    let mut touching: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for (u, o) in owner.iter().enumerate() {
        if let Some(ci) = *o {
            let v = minimal_cut.vertex_map()[u];
            clusters[ci].vertices.push(u);
            if minimal_cut.cut_set().contains(&v) {
                clusters[ci].boundary.push(u);
            }
            touching.entry(v).or_default().insert(ci);
        }
    }
    let boundary_vertices: BTreeSet<usize> =
        touching.iter().filter(|(_, s)| s.len() >= 2).map(|(&v, _)| v).collect();
    let used: usize = clusters.iter().map(|c| c.edges.len()).sum();
    let exhaustive = used == host.edge_count();
    let rigid = boundary_vertices == *minimal_cut.cut_set();
    debug_assert_eq!(clusters.len(), k);
    Partition { host, clusters, minimal_cut, boundary_vertices, exhaustive, rigid }
}

impl Partition {
    /// All components of a cut graph as clusters.
    pub fn exhaustive_from_cut(g: &MetricGraph, cut: &MetricGraph) -> Result<Partition, PartitionError> {
        let rel = CutRelation::between(g, cut)?;
        partition_from_cut(g, &rel, &cut.component_edges())
    }

    pub fn host(&self) -> &MetricGraph {
        &self.host
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn k(&self) -> usize {
        self.clusters.len()
    }

    pub fn minimal_cut(&self) -> &CutRelation {
        &self.minimal_cut
    }

    pub fn boundary_vertices(&self) -> &BTreeSet<usize> {
        &self.boundary_vertices
    }

    pub fn is_exhaustive(&self) -> bool {
        self.exhaustive
    }

    pub fn is_rigid(&self) -> bool {
        self.rigid
    }

    pub fn rank(&self) -> usize {
        self.minimal_cut.rank()
    }

    /// The cluster as a graph, with its vertices in the order of `Cluster::vertices`.
    pub fn cluster_graph(&self, i: usize) -> MetricGraph {
        let c = &self.clusters[i];
        let edges = c.edges.iter().map(|&e| *self.host.edge(e).unwrap()).collect();
        let cut = self.minimal_cut.cut();
        let vertices = c.vertices.iter().map(|&u| cut.vertices()[u].clone()).collect();
        MetricGraph::from_parts(edges, vertices).expect("clusters are components of the cut graph")
    }

    /// Positions of the boundary vertices within the cluster graph.
    pub fn cluster_dirichlet(&self, i: usize) -> Vec<usize> {
        let c = &self.clusters[i];
        c.vertices.iter().enumerate().filter(|(_, u)| c.boundary.contains(u)).map(|(j, _)| j).collect()
    }

    pub fn classify_cluster(&self, i: usize) -> Result<ClusterClass, PartitionError> {
        if i >= self.clusters.len() {
            return Err(PartitionError::InvalidIndex(i));
        }
        let c = &self.clusters[i];
        let leaf = c.vertices.iter().any(|&u| {
            let v = self.minimal_cut.vertex_map()[u];
            self.host.degree(v) == 1
        });
        let cycle = self.cluster_graph(i).betti() > 0;
        Ok(match (leaf, cycle) {
            (false, false) => ClusterClass::Benign,
            (true, false) => ClusterClass::Malign(MalignReason::Leaf),
            (false, true) => ClusterClass::Malign(MalignReason::Cycle),
            (true, true) => ClusterClass::Malign(MalignReason::LeafAndCycle),
        })
    }

    pub fn malign_count(&self) -> usize {
        (0..self.k()).filter(|&i| self.classify_cluster(i) != Ok(ClusterClass::Benign)).count()
    }

    /// Whether `k − 1 ≤ rank ≤ k − 1 + β` (with `k − c` in place of `k − 1` for a
    /// host with `c` components). Only meaningful for exhaustive partitions.
    pub fn rank_bounds_check(&self) -> bool {
        let c = self.host.component_count();
        let lo = self.k() as i64 - c as i64;
        let r = self.rank() as i64;
        lo <= r && r <= lo + self.host.betti() as i64
    }

    /// Pieces of the original edges covered by cluster `i`, as
    /// `(root edge, start, end)`, with adjacent pieces merged.
    pub fn fragments(&self, i: usize) -> Vec<(EdgeId, f64, f64)> {
        let mut raw: Vec<(EdgeId, f64, f64)> = self.clusters[i]
            .edges
            .iter()
            .map(|&e| {
                let edge = self.host.edge(e).unwrap();
                (edge.root, edge.offset, edge.offset + edge.length)
            })
            .collect();
        raw.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let mut out: Vec<(EdgeId, f64, f64)> = Vec::new();
        for f in raw {
            match out.last_mut() {
                Some(last) if last.0 == f.0 && (last.2 - f.1).abs() <= 1e-12 * f.2.max(1.0) => last.2 = f.2,
                _ => out.push(f),
            }
        }
        out
    }

    /// A human-readable block: one line per cluster.
    pub fn describe(&self) -> String {
        let mut s = String::new();
        for i in 0..self.k() {
            let frags: Vec<String> =
                self.fragments(i).iter().map(|(e, a, b)| format!("{e}[{a:.6},{b:.6}]")).collect();
            let class = match self.classify_cluster(i).unwrap() {
                ClusterClass::Benign => "benign".to_string(),
                ClusterClass::Malign(r) => format!("malign({r:?})").to_lowercase(),
            };
            let _ = writeln!(
                s,
                "cluster {}: {} | boundary vertices {} | {}",
                i + 1,
                frags.join(" "),
                self.clusters[i].boundary.len(),
                class
            );
        }
        s
    }

    /// CSV rows `cluster,edge,start,end,boundary_count,class`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("cluster,edge,start,end,boundary_count,class\n");
        for i in 0..self.k() {
            let class = match self.classify_cluster(i).unwrap() {
                ClusterClass::Benign => "benign",
                ClusterClass::Malign(_) => "malign",
            };
            for (e, a, b) in self.fragments(i) {
                let _ = writeln!(s, "{},{},{},{},{},{}", i + 1, e.0, a, b, self.clusters[i].boundary.len(), class);
            }
        }
        s
    }
}

/// Absorbs the uncovered parts of the host into neighboring clusters, one
/// gluing at a time, until every edge is covered. Returns the new partition
/// and the number of gluings.
pub fn exhaustive_extension(p: &Partition) -> Result<(Partition, usize), PartitionError> {
    if p.exhaustive {
        return Err(PartitionError::AlreadyExhaustive);
    }
    let mut current = p.clone();
    let mut gluings = 0;
    while !current.exhaustive {
        let rel = &current.minimal_cut;
        let cut = rel.cut();
        let (label, _) = cut.vertex_components();
        let cluster_of_label: BTreeMap<usize, usize> = current
            .clusters
            .iter()
            .enumerate()
            .map(|(i, c)| (label[c.vertices[0]], i))
            .collect();
        let mut pick = None;
        'search: for (i, c) in current.clusters.iter().enumerate() {
            for &u in &c.vertices {
                let v = rel.vertex_map()[u];
                for w in rel.pieces_of(v) {
                    if !cluster_of_label.contains_key(&label[w]) {
                        pick = Some((i, u, w));
                        break 'search;
                    }
                }
            }
        }
        let (i, u, w) = pick.ok_or(PartitionError::Disconnected)?;
        let absorbed: Vec<EdgeId> = cut.component_edges().into_iter().find(|edges| {
            let first = cut.edge_index(edges[0]).unwrap();
            label[cut.ends(first)[0]] == label[w]
        }).unwrap();
        let (glued, _) = glue(cut, &[u, w])?;
        let mut selection: Vec<Vec<EdgeId>> = current.clusters.iter().map(|c| c.edges.clone()).collect();
        selection[i].extend(absorbed);
        selection[i].sort();
        let rel = CutRelation::between(&current.host, &glued)?;
        current = partition_from_cut(&current.host, &rel, &selection)?;
        gluings += 1;
    }
    Ok((current, gluings))
}

/// All set partitions of `items` with at most `max_blocks` blocks, blocks
/// ordered by their first element, the single block first.
pub fn set_partitions<T: Clone>(items: &[T], max_blocks: usize) -> Vec<Vec<Vec<T>>> {
    let n = items.len();
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let mut rgs = vec![0usize; n];
    loop {
        let blocks = rgs.iter().max().unwrap() + 1;
        if blocks <= max_blocks {
            let mut groups = vec![Vec::new(); blocks];
            for (i, &b) in rgs.iter().enumerate() {
                groups[b].push(items[i].clone());
            }
            out.push(groups);
        }
        // next restricted growth string
        let mut i = n - 1;
        loop {
            if i == 0 {
                return out;
            }
            let prefix_max = rgs[..i].iter().copied().max().unwrap();
            if rgs[i] <= prefix_max {
                rgs[i] += 1;
                for x in &mut rgs[i + 1..] {
                    *x = 0;
                }
                break;
            }
            i -= 1;
        }
    }
}

/// Vertex degree above which only two-block groupings are enumerated.
pub const FULL_GROUPING_DEGREE: usize = 5;

/// Default cap on enumerated configurations.
pub const DEFAULT_CANDIDATE_CAP: u128 = 2_000_000;

/// Lazily materialized stream of exhaustive k-partitions on a uniform mesh.
pub struct PartitionStream {
    host: MetricGraph,
    options: Vec<Vec<Vec<Vec<EndpointRef>>>>,
    configs: std::vec::IntoIter<Vec<u8>>,
    k: usize,
    /// Vertices whose groupings were restricted to two blocks.
    pub restricted_vertices: Vec<usize>,
}

impl PartitionStream {
    /// The subdivided host every yielded partition lives on.
    pub fn host(&self) -> &MetricGraph {
        &self.host
    }
}

impl Iterator for PartitionStream {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        for config in self.configs.by_ref() {
            let mut blocks = Vec::new();
            for (site, &o) in config.iter().enumerate() {
                blocks.extend(self.options[site][o as usize].iter().cloned());
            }
            let cut = MetricGraph::from_parts(self.host.edges().to_vec(), blocks).expect("valid grouping");
            if cut.component_count() != self.k {
                continue;
            }
            return Some(Partition::exhaustive_from_cut(&self.host, &cut).expect("cut of the host"));
        }
        None
    }
}

/// Every exhaustive k-partition whose interior cut points lie on `{i·|e|/M}`
/// and whose vertex groupings have at most `max_blocks` blocks, in a fixed order.
pub fn enumerate_partitions(
    g: &MetricGraph,
    k: usize,
    mesh: usize,
    max_blocks: usize,
    cap: u128,
) -> Result<PartitionStream, PartitionError> {
    if !g.is_connected() {
        return Err(PartitionError::Disconnected);
    }
    let max = g.edge_count() * mesh.max(1);
    if k == 0 || k > max {
        return Err(PartitionError::InfeasibleK { k, max });
    }
    let points: Vec<(EdgeId, f64)> = g
        .edges()
        .iter()
        .flat_map(|e| (1..mesh).map(move |i| (e.id, e.length * i as f64 / mesh as f64)))
        .collect();
    let host = if points.is_empty() { g.clone() } else { g.subdivide_many(&points)?.0 };
    let mut options = Vec::with_capacity(host.vertex_count());
    let mut restricted = Vec::new();
    for (v, block) in host.vertices().iter().enumerate() {
        let limit = if block.len() > FULL_GROUPING_DEGREE {
            restricted.push(v);
            2
        } else {
            max_blocks.max(1)
        };
        options.push(set_partitions(block, limit));
    }
    let lo = k - 1;
    let hi = k - 1 + g.betti();
    // dp[r] = number of configurations of the sites seen so far with rank r
    let mut dp = vec![0u128; hi + 1];
    dp[0] = 1;
    for opts in &options {
        let mut next = vec![0u128; hi + 1];
        for (r, &n) in dp.iter().enumerate() {
            if n == 0 {
                continue;
            }
            for o in opts {
                let r2 = r + o.len() - 1;
                if r2 <= hi {
                    next[r2] = next[r2].saturating_add(n);
                }
            }
        }
        dp = next;
    }
    let count: u128 = dp[lo..=hi].iter().sum();
    if count > cap {
        return Err(PartitionError::SearchSpaceTooLarge { count, cap });
    }
    let mut configs = Vec::with_capacity(count as usize);
    let mut stack = vec![0u8; options.len()];
    collect_configs(&options, 0, 0, lo, hi, &mut stack, &mut configs);
    Ok(PartitionStream { host, options, configs: configs.into_iter(), k, restricted_vertices: restricted })
}

fn collect_configs(
    options: &[Vec<Vec<Vec<EndpointRef>>>],
    site: usize,
    rank: usize,
    lo: usize,
    hi: usize,
    stack: &mut Vec<u8>,
    out: &mut Vec<Vec<u8>>,
) {
    if site == options.len() {
        if rank >= lo {
            out.push(stack.clone());
        }
        return;
    }
    for (o, grouping) in options[site].iter().enumerate() {
        let r = rank + grouping.len() - 1;
        if r > hi {
            continue;
        }
        stack[site] = o as u8;
        collect_configs(options, site + 1, r, lo, hi, stack, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::CatalogSpec;
    use crate::surgery::{maximal_cut, split_vertex};

    fn fig_a() -> MetricGraph {
        CatalogSpec::Stower(vec![1.0], vec![1.0; 3]).build()
    }

    #[test]
    fn bell_numbers() {
        let counts: Vec<usize> = (1..=5).map(|n| set_partitions(&(0..n).collect::<Vec<_>>(), n).len()).collect();
        assert_eq!(counts, vec![1, 2, 5, 15, 52]);
        assert_eq!(set_partitions(&[1, 2, 3, 4], 2).len(), 8);
        assert_eq!(set_partitions(&[1, 2, 3], 3)[0], vec![vec![1, 2, 3]]);
    }

    /// Maximal cut at v with a dummy cut in the middle of the loop.
    fn fig_f() -> (MetricGraph, MetricGraph) {
        let a = fig_a().subdivide(EdgeId(0), 0.5).unwrap();
        let (f, _) = maximal_cut(&a, &[0, a.vertex_count() - 1]).unwrap();
        (a, f)
    }

    #[test]
    fn figure_two_partition() {
        let (a, f) = fig_f();
        let rel = CutRelation::between(&a, &f).unwrap();
        assert_eq!(rel.rank(), 5);
        let pendants: Vec<Vec<EdgeId>> =
            f.component_edges().into_iter().filter(|c| c.len() == 1 && a.edge(c[0]).unwrap().root != EdgeId(0)).collect();
        assert_eq!(pendants.len(), 3);
        let p = partition_from_cut(&a, &rel, &pendants).unwrap();
        assert_eq!(p.rank(), 3);
        assert!(!p.is_exhaustive());
        // the loop ends stay glued together at v
        let v_blocks: Vec<&Vec<EndpointRef>> =
            (0..p.minimal_cut().cut().vertex_count()).filter(|&u| p.minimal_cut().vertex_map()[u] == 0).map(|u| &p.minimal_cut().cut().vertices()[u]).collect();
        assert_eq!(v_blocks.len(), 4);
        assert!(v_blocks.iter().any(|b| b.len() == 2));
        for i in 0..3 {
            assert_eq!(p.classify_cluster(i).unwrap(), ClusterClass::Malign(MalignReason::Leaf));
        }
        let (ext, gluings) = exhaustive_extension(&p).unwrap();
        assert_eq!((ext.k(), ext.rank(), gluings), (3, 2, 1));
        assert!(ext.is_exhaustive() && ext.rank_bounds_check());
        assert_eq!(exhaustive_extension(&ext), Err(PartitionError::AlreadyExhaustive));
        let everything = f.component_edges();
        let all = partition_from_cut(&a, &rel, &everything).unwrap();
        assert!(all.minimal_cut().same_as(&rel));
        assert!(matches!(
            partition_from_cut(&a, &rel, &[vec![EdgeId(1), EdgeId(2)]]),
            Err(PartitionError::NotAComponent(_))
        ));
        assert_eq!(partition_from_cut(&a, &rel, &[]), Err(PartitionError::EmptySelection));
    }

    #[test]
    fn extension_of_half_path() {
        let g = CatalogSpec::Path(vec![1.0, 1.0]).build();
        let b = g.vertices()[1].clone();
        let (cut, rel) = split_vertex(&g, 1, &[vec![b[0]], vec![b[1]]]).unwrap();
        let p = partition_from_cut(&g, &rel, &[vec![EdgeId(0)]]).unwrap();
        assert_eq!(p.rank(), 1);
        let (q, n) = exhaustive_extension(&p).unwrap();
        assert_eq!((q.k(), q.rank(), n), (1, 0, 1));
        assert_eq!(q.clusters()[0].edges, vec![EdgeId(0), EdgeId(1)]);
        let _ = cut;
    }

    #[test]
    fn path_clusters_classify() {
        let g = CatalogSpec::Path(vec![1.0; 3]).build();
        let (cut, _) = maximal_cut(&g, &[1, 2]).unwrap();
        let p = Partition::exhaustive_from_cut(&g, &cut).unwrap();
        let classes: Vec<ClusterClass> = (0..3).map(|i| p.classify_cluster(i).unwrap()).collect();
        assert_eq!(classes.iter().filter(|c| **c == ClusterClass::Benign).count(), 1);
        assert!(p.is_rigid() && p.rank_bounds_check());
        let lp = CatalogSpec::Lasso(1.0, 1.0).build();
        let p = Partition::exhaustive_from_cut(&lp, &lp).unwrap();
        assert_eq!(p.classify_cluster(0).unwrap(), ClusterClass::Malign(MalignReason::LeafAndCycle));
        assert_eq!(p.classify_cluster(3), Err(PartitionError::InvalidIndex(3)));
    }

    fn count(spec: &str, k: usize, m: usize) -> usize {
        let g: MetricGraph = spec.parse::<CatalogSpec>().unwrap().build();
        enumerate_partitions(&g, k, m, 8, DEFAULT_CANDIDATE_CAP).unwrap().count()
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(count("interval:1", 2, 2), 1);
        assert_eq!(count("loop:1", 2, 4), 6);
        assert_eq!(count("star:3", 2, 1), 3);
        assert_eq!(count("star:3", 3, 1), 1);
        // two interior mesh points on an interval, k = 2: either one
        assert_eq!(count("interval:1", 2, 3), 2);
        let g = CatalogSpec::Loop(1.0).build();
        assert!(matches!(enumerate_partitions(&g, 5, 4, 8, 10), Err(PartitionError::InfeasibleK { .. })));
        assert!(matches!(
            enumerate_partitions(&CatalogSpec::Star(vec![1.0; 3]).build(), 3, 8, 8, 10),
            Err(PartitionError::SearchSpaceTooLarge { .. })
        ));
    }

    #[test]
    fn enumerated_partitions_satisfy_structure() {
        for spec in ["star:3", "loop:1", "lasso:1:1", "figure8:1:1"] {
            let g: MetricGraph = spec.parse::<CatalogSpec>().unwrap().build();
            let (beta, leaves) = (g.betti(), g.leaves().len());
            for k in 1..=3 {
                let stream = match enumerate_partitions(&g, k, 2, 8, DEFAULT_CANDIDATE_CAP) {
                    Err(PartitionError::InfeasibleK { .. }) => continue,
                    s => s.unwrap(),
                };
                for p in stream {
                    assert!(p.is_exhaustive() && p.rank_bounds_check(), "{spec} k={k}");
                    let r = p.rank() + 1 - k;
                    assert!(p.malign_count() + r <= beta + leaves);
                    for &v in p.boundary_vertices() {
                        let owners: BTreeSet<usize> = (0..p.k())
                            .filter(|&i| p.clusters()[i].vertices.iter().any(|&u| p.minimal_cut().vertex_map()[u] == v))
                            .collect();
                        assert!(owners.len() >= 2);
                    }
                    let mut all: Vec<EdgeId> = p.clusters().iter().flat_map(|c| c.edges.clone()).collect();
                    all.sort();
                    all.dedup();
                    assert_eq!(all.len(), p.host().edge_count());
                }
            }
        }
    }
}
