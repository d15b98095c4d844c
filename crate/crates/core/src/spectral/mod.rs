//! Laplacian eigenvalues on metric graphs with Dirichlet or standard vertex conditions.
//!
//! Eigenvalues come from the secular matrix (see [`eigenvalues`]); an eigenvalue
//! counting function built from the Dirichlet-to-Neumann matrix and a
//! finite-element discretization serve as independent checks.

mod counting;
mod domains;
mod fem;
mod secular;
mod trig;

use thiserror::Error;

use crate::graph::{GraphError, MetricGraph};
use crate::partitions::PartitionError;
use crate::surgery::SurgeryError;

pub use counting::{count_below, nth_eigenvalue};
pub(crate) use counting::EdgeList;
pub use domains::{neumann_decomposition, neumann_domains, nodal_decomposition, nodal_domains, DomainDecomposition, DomainKind};
pub use fem::{fem_count_below, fem_eigenvalues, fem_extrapolated};
pub use secular::{eigenpairs_at, eigenvalues, secular_matrix, secular_sigma, Spectrum, ROOT_THRESHOLD};
pub use trig::{TrigFunction, TrigPiece};

/// Relative distance from an edge end within which zeros and extrema snap to the vertex.
pub const SNAP: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexCondition {
    Dirichlet,
    Standard,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("{got} vertex conditions given for {expected} vertices")]
    ConditionCount { expected: usize, got: usize },
    #[error("could not isolate eigenvalues near k = {k} even after grid refinement")]
    RootIsolationFailure { k: f64 },
    #[error("eigenvector {index} has residual {residual:e}")]
    ResidualTooLarge { index: usize, residual: f64 },
    #[error("the Dirichlet vertex set is empty")]
    EmptyDirichletSet,
    #[error("the graph is disconnected")]
    Disconnected,
    #[error("degenerate finite-element mesh")]
    SingularMass,
    #[error("finite-element resolution {0} is below 8 elements per unit length")]
    InvalidResolution(f64),
    #[error("the function vanishes on every edge")]
    DegenerateEigenfunction,
    #[error("the function is identically zero")]
    ZeroFunction,
    #[error("requested count must be at least 1")]
    InvalidCount,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Surgery(#[from] SurgeryError),
    #[error(transparent)]
    Partition(#[from] Box<PartitionError>),
}

/// A graph with one condition per vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralProblem {
    graph: MetricGraph,
    conditions: Vec<VertexCondition>,
}

impl SpectralProblem {
    pub fn new(graph: MetricGraph, conditions: Vec<VertexCondition>) -> Result<Self, SpectralError> {
        if conditions.len() != graph.vertex_count() {
            return Err(SpectralError::ConditionCount { expected: graph.vertex_count(), got: conditions.len() });
        }
        Ok(SpectralProblem { graph, conditions })
    }

    pub fn standard(graph: &MetricGraph) -> Self {
        SpectralProblem { conditions: vec![VertexCondition::Standard; graph.vertex_count()], graph: graph.clone() }
    }

    pub fn all_dirichlet(graph: &MetricGraph) -> Self {
        SpectralProblem { conditions: vec![VertexCondition::Dirichlet; graph.vertex_count()], graph: graph.clone() }
    }

    /// Dirichlet on `set`, standard elsewhere. Out-of-range indices are ignored.
    pub fn with_dirichlet(graph: &MetricGraph, set: &[usize]) -> Self {
        let mut p = Self::standard(graph);
        for &v in set {
            if v < p.conditions.len() {
                p.conditions[v] = VertexCondition::Dirichlet;
            }
        }
        p
    }

    pub fn graph(&self) -> &MetricGraph {
        &self.graph
    }

    pub fn conditions(&self) -> &[VertexCondition] {
        &self.conditions
    }

    pub fn is_dirichlet(&self, v: usize) -> bool {
        self.conditions[v] == VertexCondition::Dirichlet
    }

    pub fn dirichlet_set(&self) -> Vec<usize> {
        (0..self.conditions.len()).filter(|&v| self.is_dirichlet(v)).collect()
    }

    /// Multiplicity of the eigenvalue 0: components without a Dirichlet vertex.
    pub fn zero_multiplicity(&self) -> usize {
        let (label, n) = self.graph.vertex_components();
        let mut pinned = vec![false; n];
        for (v, &c) in label.iter().enumerate() {
            pinned[c] |= self.is_dirichlet(v);
        }
        pinned.iter().filter(|&&p| !p).count()
    }

    /// Largest violation of the vertex conditions and of `-u'' = λu`, relative
    /// to the size of `u` and of `λu`.
    pub fn residual(&self, lambda: f64, f: &TrigFunction) -> f64 {
        let g = &self.graph;
        let scale = f.scale(g).max(f64::MIN_POSITIVE);
        let dscale = scale * lambda.sqrt().max(1.0);
        let mut r: f64 = 0.0;
        for (v, block) in g.vertices().iter().enumerate() {
            let values: Vec<f64> = block.iter().map(|&p| f.endpoint_value(g, p)).collect();
            if self.is_dirichlet(v) {
                for x in &values {
                    r = r.max(x.abs() / scale);
                }
            } else {
                for x in &values[1..] {
                    r = r.max((x - values[0]).abs() / scale);
                }
                let flux: f64 = block.iter().map(|&p| f.outgoing_derivative(g, p)).sum();
                r = r.max(flux.abs() / dscale);
            }
        }
        for e in g.edges() {
            let p = f.piece(e.id);
            if (p.k * p.k - lambda).abs() > 1e-12 * lambda.max(1.0) {
                return f64::INFINITY;
            }
            for i in 0..=4 {
                let x = e.length * i as f64 / 4.0;
                let ode = -p.second_derivative(x) - lambda * p.value(x);
                r = r.max(ode.abs() / (scale * lambda.max(1.0)));
            }
        }
        r
    }
}

/// `∫|u'|² / ∫|u|²`.
pub fn rayleigh(g: &MetricGraph, f: &TrigFunction) -> Result<f64, SpectralError> {
    let (l2, d2) = f.integrals(g);
    if l2 <= 0.0 {
        return Err(SpectralError::ZeroFunction);
    }
    Ok(d2 / l2)
}

/// First nonzero eigenvalue with standard conditions everywhere.
pub fn mu2(g: &MetricGraph) -> Result<f64, SpectralError> {
    if !g.is_connected() {
        return Err(SpectralError::Disconnected);
    }
    Ok(nth_eigenvalue(&SpectralProblem::standard(g), 2))
}

/// First eigenvalue with Dirichlet conditions on `set`.
pub fn lambda1(g: &MetricGraph, set: &[usize]) -> Result<f64, SpectralError> {
    if !g.is_connected() {
        return Err(SpectralError::Disconnected);
    }
    if set.is_empty() {
        return Err(SpectralError::EmptyDirichletSet);
    }
    Ok(nth_eigenvalue(&SpectralProblem::with_dirichlet(g, set), 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::CatalogSpec;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn closed_form_first_eigenvalues() {
        let lp = CatalogSpec::Loop(2.0).build();
        assert_relative_eq!(mu2(&lp).unwrap(), 4.0 * PI * PI / 4.0, max_relative = 1e-12);
        let i = CatalogSpec::Interval(2.0).build();
        assert_relative_eq!(lambda1(&i, &[0]).unwrap(), PI * PI / 16.0, max_relative = 1e-12);
        assert_relative_eq!(lambda1(&i, &[0, 1]).unwrap(), PI * PI / 4.0, max_relative = 1e-12);
        assert_eq!(lambda1(&i, &[]), Err(SpectralError::EmptyDirichletSet));
    }

    #[test]
    fn rayleigh_quotients() {
        let i = CatalogSpec::Interval(1.0).build();
        let mut f = TrigFunction::new();
        f.insert(crate::graph::EdgeId(0), TrigPiece::new(0.0, PI, PI));
        assert_relative_eq!(rayleigh(&i, &f).unwrap(), PI * PI, max_relative = 1e-12);
        let lp = CatalogSpec::Loop(1.0).build();
        let mut c = TrigFunction::new();
        c.insert(crate::graph::EdgeId(0), TrigPiece::new(1.0, 0.0, 0.0));
        assert_eq!(rayleigh(&lp, &c).unwrap(), 0.0);
        assert_eq!(rayleigh(&lp, &c.scaled(0.0)), Err(SpectralError::ZeroFunction));
    }

    #[test]
    fn condition_count_is_checked() {
        let i = CatalogSpec::Interval(1.0).build();
        assert!(matches!(
            SpectralProblem::new(i, vec![VertexCondition::Standard]),
            Err(SpectralError::ConditionCount { .. })
        ));
    }
}
