//! Nodal and Neumann domains of piecewise-trig functions.

use crate::graph::{EdgeId, MetricGraph};
use crate::partitions::{partition_from_cut, Partition, PartitionError};
use crate::surgery::maximal_cut;

use super::trig::TrigFunction;
use super::{eigenvalues, SpectralError, SpectralProblem, SNAP};

/// Values below this fraction of the function's amplitude count as zero.
const ZERO_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DomainKind {
    Nodal,
    Neumann,
}

#[derive(Clone, Debug)]
pub struct DomainDecomposition {
    pub kind: DomainKind,
    pub count: usize,
    pub partition: Partition,
    /// Some edge carries the zero function.
    pub degenerate: bool,
    /// Simple eigenvalue, no zero at a non-Dirichlet vertex and no degenerate edge.
    pub generic: bool,
    /// The function transferred onto the partition's host.
    pub function: TrigFunction,
}

impl From<PartitionError> for SpectralError {
    fn from(e: PartitionError) -> Self {
        SpectralError::Partition(Box::new(e))
    }
}

struct Shape {
    scale: f64,
    degenerate: Vec<bool>,
}

fn shape(g: &MetricGraph, f: &TrigFunction) -> Result<Shape, SpectralError> {
    let scale = f.scale(g);
    if !(scale > 0.0) {
        return Err(SpectralError::DegenerateEigenfunction);
    }
    let degenerate: Vec<bool> =
        g.edges().iter().map(|e| f.piece(e.id).amplitude(e.length) <= ZERO_TOL * scale).collect();
    if degenerate.iter().all(|&d| d) {
        return Err(SpectralError::DegenerateEigenfunction);
    }
    Ok(Shape { scale, degenerate })
}

/// Vertices where the function vanishes and some incident edge is not degenerate.
fn vertex_zeros(g: &MetricGraph, f: &TrigFunction, s: &Shape) -> Vec<usize> {
    let mut out = Vec::new();
    for (v, block) in g.vertices().iter().enumerate() {
        let mut live = false;
        let mut zero = false;
        for &p in block {
            let i = g.edge_index(p.edge).unwrap();
            if s.degenerate[i] {
                continue;
            }
            live = true;
            let len = g.edges()[i].length;
            let at = if p.end == crate::graph::End::Source { 0.0 } else { len };
            let snapped = f.piece(p.edge).zeros(len, SNAP).contains(&at);
            zero |= snapped || f.endpoint_value(g, p).abs() <= ZERO_TOL * s.scale;
        }
        if live && zero {
            out.push(v);
        }
    }
    out
}

/// Components of the maximal cut of `g` at the vertices `cut_at` and at the
/// interior points `points`, as a partition keeping components accepted by `keep`.
fn cut_and_select(
    g: &MetricGraph,
    f: &TrigFunction,
    cut_at: &[usize],
    points: &[(EdgeId, f64)],
    keep: impl Fn(&MetricGraph, &TrigFunction, &[EdgeId]) -> bool,
) -> Result<(Partition, TrigFunction), SpectralError> {
    let (host, refined) = if points.is_empty() {
        (g.clone(), f.clone())
    } else {
        let (h, r) = g.subdivide_many(points)?;
        let rf = f.refined(&r);
        (h, rf)
    };
    let mut set: Vec<usize> = cut_at.to_vec();
    set.extend(g.vertex_count()..host.vertex_count());
    let (_, rel) = maximal_cut(&host, &set)?;
    let selected: Vec<Vec<EdgeId>> =
        rel.cut().component_edges().into_iter().filter(|c| keep(&host, &refined, c)).collect();
    let p = partition_from_cut(&host, &rel, &selected)?;
    Ok((p, refined))
}

/// Nodal domains: components of the maximal cut at non-degenerate zeros on
/// which the function does not vanish identically.
pub fn nodal_decomposition(
    problem: &SpectralProblem,
    f: &TrigFunction,
    simple: bool,
) -> Result<DomainDecomposition, SpectralError> {
    let g = problem.graph();
    let s = shape(g, f)?;
    let mut points = Vec::new();
    for (i, e) in g.edges().iter().enumerate() {
        if s.degenerate[i] {
            continue;
        }
        for x in f.piece(e.id).zeros(e.length, SNAP) {
            if x > 0.0 && x < e.length {
                points.push((e.id, x));
            }
        }
    }
    let zeros = vertex_zeros(g, f, &s);
    let tol = ZERO_TOL * s.scale;
    let (partition, function) = cut_and_select(g, f, &zeros, &points, |h, u, comp| {
        comp.iter().any(|&e| u.piece(e).amplitude(h.length(e)) > tol)
    })?;
    let degenerate = s.degenerate.iter().any(|&d| d);
    let interior_zero = zeros.iter().any(|&v| !problem.is_dirichlet(v));
    Ok(DomainDecomposition {
        kind: DomainKind::Nodal,
        count: partition.k(),
        generic: simple && !degenerate && !interior_zero,
        degenerate,
        partition,
        function,
    })
}

/// Neumann domains: components of the maximal cut at the nonzero local extrema.
pub fn neumann_decomposition(
    problem: &SpectralProblem,
    f: &TrigFunction,
    simple: bool,
) -> Result<DomainDecomposition, SpectralError> {
    let g = problem.graph();
    let s = shape(g, f)?;
    let tol = ZERO_TOL * s.scale;
    let mut points = Vec::new();
    for (i, e) in g.edges().iter().enumerate() {
        if s.degenerate[i] {
            continue;
        }
        let piece = f.piece(e.id);
        for x in piece.extrema(e.length, SNAP) {
            if x > 0.0 && x < e.length && piece.value(x).abs() > tol {
                points.push((e.id, x));
            }
        }
    }
    let mut extremal = Vec::new();
    for (v, block) in g.vertices().iter().enumerate() {
        if problem.is_dirichlet(v) || f.endpoint_value(g, block[0]).abs() <= tol {
            continue;
        }
        let flat = block.iter().all(|&p| {
            let len = g.length(p.edge);
            let piece = f.piece(p.edge);
            let dtol = ZERO_TOL * s.scale * piece.k.max(1.0);
            let at = if p.end == crate::graph::End::Source { 0.0 } else { len };
            piece.extrema(len, SNAP).contains(&at) || f.outgoing_derivative(g, p).abs() <= dtol
        });
        if flat {
            extremal.push(v);
        }
    }
    let (partition, function) = cut_and_select(g, f, &extremal, &points, |_, _, _| true)?;
    let degenerate = s.degenerate.iter().any(|&d| d);
    let interior_zero = vertex_zeros(g, f, &s).iter().any(|&v| !problem.is_dirichlet(v));
    Ok(DomainDecomposition {
        kind: DomainKind::Neumann,
        count: partition.k(),
        generic: simple && !degenerate && !interior_zero,
        degenerate,
        partition,
        function,
    })
}

fn indexed(problem: &SpectralProblem, index: usize) -> Result<(TrigFunction, bool), SpectralError> {
    if index == 0 {
        return Err(SpectralError::InvalidCount);
    }
    let s = eigenvalues(problem, index)?;
    Ok((s.eigenvectors[index - 1].clone(), s.multiplicities[index - 1] == 1))
}

/// Nodal domains of the `index`-th eigenfunction (1-based).
pub fn nodal_domains(problem: &SpectralProblem, index: usize) -> Result<DomainDecomposition, SpectralError> {
    let (f, simple) = indexed(problem, index)?;
    nodal_decomposition(problem, &f, simple)
}

/// Neumann domains of the `index`-th eigenfunction (1-based).
pub fn neumann_domains(problem: &SpectralProblem, index: usize) -> Result<DomainDecomposition, SpectralError> {
    let (f, simple) = indexed(problem, index)?;
    neumann_decomposition(problem, &f, simple)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::CatalogSpec;
    use crate::spectral::TrigPiece;
    use std::f64::consts::PI;

    #[test]
    fn interval_counts() {
        let p = SpectralProblem::standard(&CatalogSpec::Interval(1.0).build());
        for k in 2..=8 {
            let nu = nodal_domains(&p, k).unwrap();
            let xi = neumann_domains(&p, k).unwrap();
            assert_eq!((nu.count, xi.count), (k, k - 1), "k = {k}");
            assert!(nu.generic && xi.generic);
        }
    }

    #[test]
    fn loop_counts() {
        let p = SpectralProblem::standard(&CatalogSpec::Loop(1.0).build());
        let nu = nodal_domains(&p, 2).unwrap();
        let xi = neumann_domains(&p, 2).unwrap();
        assert_eq!((nu.count, xi.count), (2, 2));
        assert!(!nu.generic);
    }

    #[test]
    fn star_with_a_dead_edge() {
        // sin on two arms with opposite signs, zero on the third: eigenfunction at k = π
        let g = CatalogSpec::Star(vec![1.0; 3]).build();
        let p = SpectralProblem::standard(&g);
        let mut f = TrigFunction::new();
        f.insert(crate::graph::EdgeId(0), TrigPiece::new(0.0, PI, PI / 2.0));
        f.insert(crate::graph::EdgeId(1), TrigPiece::new(0.0, -PI, PI / 2.0));
        f.insert(crate::graph::EdgeId(2), TrigPiece::new(0.0, 0.0, PI / 2.0));
        assert!(p.residual(PI * PI / 4.0, &f) < 1e-12);
        let d = nodal_decomposition(&p, &f, false).unwrap();
        assert!(d.degenerate && !d.generic);
        assert_eq!(d.count, 2);
    }
}
