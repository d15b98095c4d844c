//! Test partitions built from the cluster eigenfunctions of a given partition.

use std::collections::BTreeSet;

use crate::graph::{Edge, EdgeId, End, EndpointRef, MetricGraph, Refinement};
use crate::partitions::{partition_from_cut, Partition};
use crate::spectral::{eigenvalues, SpectralProblem, TrigFunction, TrigPiece, SNAP};
use crate::surgery::maximal_cut;

use super::OptimizeError;

const ZERO_TOL: f64 = 1e-9;

/// Splits every cluster of a natural-energy partition into the nodal domains
/// of its first nonzero eigenfunction, then glues the pieces back across the
/// cut vertices one simple gluing at a time: matching nonzero values are
/// reached by rescaling one side, and a domain that cannot be matched is
/// dropped. The result is a partition of at least `2k − rank` clusters whose
/// Dirichlet energy does not exceed the natural energy of `witness`.
pub fn nodal_partition_from_n_minimizer(witness: &Partition) -> Result<Partition, OptimizeError> {
    let host = witness.host();
    let mut u = TrigFunction::new();
    let mut scale_of = std::collections::BTreeMap::new();
    for i in 0..witness.k() {
        let gi = witness.cluster_graph(i);
        let s = eigenvalues(&SpectralProblem::standard(&gi), 2)?;
        let f = &s.eigenvectors[1];
        let scale = f.scale(&gi);
        for e in gi.edges() {
            u.insert(e.id, *f.piece(e.id));
            scale_of.insert(e.id, scale);
        }
    }
    for e in host.edges() {
        if !scale_of.contains_key(&e.id) {
            u.insert(e.id, TrigPiece::zero(0.0));
            scale_of.insert(e.id, 1.0);
        }
    }
    let dead = |id: EdgeId, f: &TrigFunction, g: &MetricGraph| f.piece(id).amplitude(g.length(id)) <= ZERO_TOL * scale_of[&id];
    let mut points = Vec::new();
    for e in host.edges() {
        if dead(e.id, &u, host) {
            continue;
        }
        for x in u.piece(e.id).zeros(e.length, SNAP) {
            if x > 0.0 && x < e.length {
                points.push((e.id, x));
            }
        }
    }
    let (h, refinement) =
        if points.is_empty() { (host.clone(), Refinement::default()) } else { host.subdivide_many(&points)? };
    let u = if points.is_empty() { u } else { u.refined(&refinement) };
    // the host edge each piece was cut from
    let origin = |e: &Edge| if host.edge_index(e.id).is_some() { e.id } else { e.parent.expect("pieces have a parent") };
    let scale: Vec<f64> = h.edges().iter().map(|e| scale_of[&origin(e)]).collect();
    let n = h.edge_count();
    // per edge: live flag, multiplier, and which ends are zeros of u
    let mut live: Vec<bool> = h.edges().iter().enumerate().map(|(i, e)| u.piece(e.id).amplitude(e.length) > ZERO_TOL * scale[i]).collect();
    let mut alpha = vec![1.0; n];
    let zero_end = |i: usize, end: End| -> bool {
        let e = &h.edges()[i];
        let p = u.piece(e.id);
        let x = if end == End::Source { 0.0 } else { e.length };
        p.value(x).abs() <= ZERO_TOL * scale[i] || p.zeros(e.length, SNAP).contains(&x)
    };
    // domains of the cut graph: edges joined at nonzero blocks
    let cut = witness.minimal_cut().cut();
    let mut blocks: Vec<Vec<EndpointRef>> =
        cut.vertices().iter().map(|b| b.iter().map(|&p| refinement.lift(p)).collect()).collect();
    for w in host.vertex_count()..h.vertex_count() {
        blocks.extend(h.vertices()[w].iter().map(|&p| vec![p]));
    }
    let mut domain: Vec<usize> = (0..n).collect();
    let block_value = |b: &[EndpointRef], live: &[bool], alpha: &[f64]| -> Option<(f64, usize)> {
        for &p in b {
            let i = h.edge_index(p.edge).unwrap();
            if live[i] && !zero_end(i, p.end) {
                return Some((alpha[i] * u.endpoint_value(&h, p), i));
            }
        }
        None
    };
    let merge = |domain: &mut Vec<usize>, a: usize, b: usize| {
        let (da, db) = (domain[a], domain[b]);
        if da != db {
            for d in domain.iter_mut() {
                if *d == db {
                    *d = da;
                }
            }
        }
    };
    for b in &blocks {
        if block_value(b, &live, &alpha).is_some() {
            let idx: Vec<usize> = b.iter().map(|p| h.edge_index(p.edge).unwrap()).collect();
            for &j in &idx[1..] {
                merge(&mut domain, idx[0], j);
            }
        }
    }
    // glue the blocks of every vertex of h back together, one at a time
    for group in group_by_vertex(&h, &blocks) {
        let mut merged: Vec<EndpointRef> = group[0].clone();
        for b in &group[1..] {
            match (block_value(&merged, &live, &alpha), block_value(b, &live, &alpha)) {
                (None, None) => {}
                (Some((vm, im)), Some((vb, ib))) => {
                    if domain[im] != domain[ib] {
                        let factor = vm / vb;
                        let db = domain[ib];
                        for j in 0..n {
                            if domain[j] == db {
                                alpha[j] *= factor;
                            }
                        }
                        merge(&mut domain, im, ib);
                    } else if (vm - vb).abs() > ZERO_TOL * vm.abs().max(vb.abs()) {
                        let d = domain[im];
                        for j in 0..n {
                            if domain[j] == d {
                                live[j] = false;
                            }
                        }
                    }
                }
                (Some((_, i)), None) | (None, Some((_, i))) => {
                    let d = domain[i];
                    for j in 0..n {
                        if domain[j] == d {
                            live[j] = false;
                        }
                    }
                }
            }
            merged.extend(b.iter().copied());
        }
    }
    // nodal partition of the glued function: cut where it vanishes
    let zeros: Vec<usize> = (0..h.vertex_count())
        .filter(|&w| {
            h.vertices()[w].iter().any(|&p| {
                let i = h.edge_index(p.edge).unwrap();
                !live[i] || zero_end(i, p.end)
            })
        })
        .collect();
    let (_, rel) = maximal_cut(&h, &zeros)?;
    let selected: Vec<Vec<EdgeId>> = rel
        .cut()
        .component_edges()
        .into_iter()
        .filter(|c| c.iter().any(|&e| live[h.edge_index(e).unwrap()]))
        .collect();
    Ok(partition_from_cut(&h, &rel, &selected)?)
}

/// Blocks grouped by the vertex of `h` they belong to, for vertices with at least two blocks.
fn group_by_vertex(h: &MetricGraph, blocks: &[Vec<EndpointRef>]) -> Vec<Vec<Vec<EndpointRef>>> {
    let mut groups: Vec<Vec<Vec<EndpointRef>>> = vec![Vec::new(); h.vertex_count()];
    for b in blocks {
        groups[h.vertex_of(b[0])].push(b.clone());
    }
    groups.into_iter().filter(|g| g.len() > 1).collect()
}

/// Cuts every cluster of a Dirichlet-energy partition at the nonzero local
/// extrema of its first eigenfunction and returns all components. Every
/// cluster of the result has natural energy at most the Dirichlet energy of
/// `witness`, and there are at least `k + 1 − n − r` of them when the witness
/// has rank `k − 1 + r` and `n` malign clusters.
pub fn neumann_partition_from_d_minimizer(witness: &Partition) -> Result<Partition, OptimizeError> {
    if witness.k() < 2 {
        return Err(OptimizeError::InvalidK { k: witness.k(), min: 2 });
    }
    let host = witness.host();
    let rel = witness.minimal_cut();
    let mut points: Vec<(EdgeId, f64)> = Vec::new();
    let mut at_vertices: BTreeSet<usize> = BTreeSet::new();
    for i in 0..witness.k() {
        let gi = witness.cluster_graph(i);
        let dirichlet = witness.cluster_dirichlet(i);
        let problem = SpectralProblem::with_dirichlet(&gi, &dirichlet);
        let s = eigenvalues(&problem, 1)?;
        let f = &s.eigenvectors[0];
        let scale = f.scale(&gi);
        let tol = ZERO_TOL * scale;
        for e in gi.edges() {
            let p = f.piece(e.id);
            for x in p.extrema(e.length, SNAP) {
                if p.value(x).abs() <= tol {
                    continue;
                }
                if x > 0.0 && x < e.length {
                    points.push((e.id, x));
                } else {
                    let end = if x == 0.0 { End::Source } else { End::Target };
                    let v = gi.vertex_of(EndpointRef { edge: e.id, end });
                    if problem.is_dirichlet(v) {
                        return Err(OptimizeError::GenericityFailure(format!(
                            "extremum of cluster {} at the cut vertex on {}",
                            i + 1,
                            e.id
                        )));
                    }
                }
            }
        }
        let cluster = &witness.clusters()[i];
        for (j, block) in gi.vertices().iter().enumerate() {
            if problem.is_dirichlet(j) || block.len() < 2 || f.endpoint_value(&gi, block[0]).abs() <= tol {
                continue;
            }
            let flat = block.iter().all(|&p| {
                let k = f.piece(p.edge).k.max(1.0);
                f.outgoing_derivative(&gi, p).abs() <= tol * k
            });
            if flat {
                at_vertices.insert(rel.vertex_map()[cluster.vertices[j]]);
            }
        }
    }
    let (h, _) = if points.is_empty() { (host.clone(), Refinement::default()) } else { host.subdivide_many(&points)? };
    let mut set: Vec<usize> = at_vertices.into_iter().collect();
    set.extend(host.vertex_count()..h.vertex_count());
    let (cut, _) = maximal_cut(&h, &set)?;
    Ok(Partition::exhaustive_from_cut(&h, &cut)?)
}
