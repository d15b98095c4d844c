#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use qpart::graph::{EdgeId, EndpointRef, MetricGraph};
use qpart::partitions::Partition;
use qpart::surgery::{check_betti_disconnection, compose, simple_cut_sequence, split_vertex, CutRelation};

/// A connected graph with at most `max_edges` edges: a random spanning tree plus extra edges and loops.
pub fn random_graph(rng: &mut StdRng, max_edges: usize) -> MetricGraph {
    let edges = rng.random_range(1..=max_edges);
    let n = rng.random_range(1..=edges + 1);
    let mut ends: Vec<(usize, usize)> = (1..n).map(|v| (rng.random_range(0..v), v)).collect();
    while ends.len() < edges {
        ends.push((rng.random_range(0..n), rng.random_range(0..n)));
    }
    let mut vertices = vec![Vec::new(); n];
    let mut list = Vec::new();
    for (i, &(a, b)) in ends.iter().enumerate() {
        let id = EdgeId(i as u32);
        list.push((id, rng.random_range(0.5..2.0)));
        vertices[a].push(EndpointRef::source(id));
        vertices[b].push(EndpointRef::target(id));
    }
    MetricGraph::new(list, vertices).unwrap()
}

/// Splits one random vertex of degree at least two into two random blocks.
pub fn random_simple_cut(rng: &mut StdRng, g: &MetricGraph) -> Option<(MetricGraph, CutRelation)> {
    let candidates: Vec<usize> = (0..g.vertex_count()).filter(|&v| g.degree(v) >= 2).collect();
    if candidates.is_empty() {
        return None;
    }
    let v = candidates[rng.random_range(0..candidates.len())];
    let block = &g.vertices()[v];
    loop {
        let (a, b): (Vec<EndpointRef>, Vec<EndpointRef>) = block.iter().partition(|_| rng.random_bool(0.5));
        if !a.is_empty() && !b.is_empty() {
            return Some(split_vertex(g, v, &[a, b]).unwrap());
        }
    }
}

/// A cut of `g` made of up to `steps` random simple cuts.
pub fn random_cut(rng: &mut StdRng, g: &MetricGraph, steps: usize) -> CutRelation {
    let mut rel = CutRelation::identity(g);
    for _ in 0..steps {
        match random_simple_cut(rng, rel.cut()) {
            Some((_, step)) => rel = compose(&step, &rel).unwrap(),
            None => break,
        }
    }
    rel
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

/// Rank additivity, simple-cut decomposition and disconnection for a random chain of two cuts.
pub fn cut_chain_holds(seed: u64) -> Result<(), String> {
    let mut rng = StdRng::seed_from_u64(seed);
    let g = random_graph(&mut rng, 6);
    let s1 = rng.random_range(0..4);
    let r01 = random_cut(&mut rng, &g, s1);
    let s2 = rng.random_range(0..4);
    let r12 = random_cut(&mut rng, r01.cut(), s2);
    let r02 = compose(&r12, &r01).map_err(|e| e.to_string())?;
    ensure!(r02.rank() == r01.rank() + r12.rank(), "rank {} != {} + {}", r02.rank(), r01.rank(), r12.rank());
    ensure!(r02.rank() == r02.cut().vertex_count() - g.vertex_count(), "rank is not the vertex gain");

    let steps = simple_cut_sequence(&r02);
    ensure!(steps.len() == r02.rank(), "{} simple cuts for rank {}", steps.len(), r02.rank());
    let mut current = CutRelation::identity(&g);
    for s in &steps {
        ensure!(s.rank() == 1, "step of rank {}", s.rank());
        current = compose(s, &current).map_err(|e| e.to_string())?;
    }
    ensure!(current.same_as(&r02), "simple cuts do not recompose the chain");

    ensure!(check_betti_disconnection(&g, &r02), "disconnection check failed");
    ensure!(r02.rank() <= g.betti() || !r02.cut().is_connected(), "rank {} > beta {} but connected", r02.rank(), g.betti());
    Ok(())
}

/// Rank bounds and the malign cap for an exhaustive partition from a random cut.
pub fn exhaustive_partition_holds(seed: u64) -> Result<(), String> {
    let mut rng = StdRng::seed_from_u64(seed);
    let g = random_graph(&mut rng, 6);
    // a few interior points so that edges can be split between clusters
    let mut points: Vec<(EdgeId, f64)> = Vec::new();
    for e in g.edges() {
        if rng.random_bool(0.4) {
            points.push((e.id, e.length * rng.random_range(0.2..0.8)));
        }
    }
    let host = if points.is_empty() { g.clone() } else { g.subdivide_many(&points).unwrap().0 };
    let steps = rng.random_range(0..6);
    let rel = random_cut(&mut rng, &host, steps);
    let p = Partition::exhaustive_from_cut(&host, rel.cut()).map_err(|e| e.to_string())?;
    let k = p.k();
    ensure!(k == rel.cut().component_count(), "k = {k} for {} components", rel.cut().component_count());
    ensure!(p.is_exhaustive(), "not exhaustive");
    ensure!(p.rank_bounds_check(), "rank bounds check failed");
    ensure!(p.rank() + 1 >= k && p.rank() < k + host.betti(), "rank {} outside [k-1, k-1+beta]", p.rank());
    let r = p.rank() + 1 - k;
    ensure!(
        p.malign_count() + r <= host.betti() + host.leaves().len(),
        "{} malign clusters exceed the cap",
        p.malign_count()
    );
    Ok(())
}
