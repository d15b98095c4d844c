//! Spectral minimal partitions: energies, mesh search, constructions and bounds.
//!
//! Both energies are maxima over clusters. The Dirichlet energy uses the first
//! eigenvalue of each cluster with Dirichlet conditions on its boundary set,
//! the natural energy the first nonzero eigenvalue with standard conditions.

mod bounds;
mod constructions;
mod search;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::graph::GraphError;
use crate::partitions::{Partition, PartitionError};
use crate::spectral::{nth_eigenvalue, SpectralError, SpectralProblem};
use crate::surgery::SurgeryError;

pub use bounds::{
    bound_table, edgewise_partition, eulerian_cover_count, verify_interlacing, BoundReport, BoundRow, Check,
    InterlacingOptions,
};
pub use constructions::{neumann_partition_from_d_minimizer, nodal_partition_from_n_minimizer};
pub use search::{minimize_energy, SearchOptions, DEFAULT_MAX_CANDIDATES};

/// Largest graph, cluster count and mesh accepted without `allow_large`.
pub const MAX_EDGES: usize = 10;
pub const MAX_K: usize = 6;
pub const MAX_MESH: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EnergyKind {
    Dirichlet,
    Natural,
}

impl fmt::Display for EnergyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EnergyKind::Dirichlet => "D",
            EnergyKind::Natural => "N",
        })
    }
}

impl FromStr for EnergyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "d" | "dirichlet" => Ok(EnergyKind::Dirichlet),
            "n" | "natural" | "neumann" | "standard" => Ok(EnergyKind::Natural),
            _ => Err(format!("unknown energy kind `{s}` (expected D or N)")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OptimizeError {
    #[error("{what} = {value} exceeds the limit {limit}; pass allow_large to override")]
    LimitExceeded { what: &'static str, value: usize, limit: usize },
    #[error("k must be at least {min}, got {k}")]
    InvalidK { k: usize, min: usize },
    #[error("an extremum coincides with a cut vertex: {0}")]
    GenericityFailure(String),
    #[error("the host graph must be connected")]
    Disconnected,
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Surgery(#[from] SurgeryError),
}

/// Result of [`minimize_energy`]: an upper estimate of the optimal energy and
/// the partition attaining it.
#[derive(Clone, Debug)]
pub struct EnergyEstimate {
    pub kind: EnergyKind,
    pub k: usize,
    /// The energy of `witness`.
    pub value: f64,
    pub witness: Partition,
    pub mesh: usize,
    pub refined: bool,
    pub rigid_restricted: bool,
    /// Best energy with all cuts on the mesh.
    pub mesh_value: f64,
    /// Size of the mesh search space in (structure, placement) pairs.
    pub candidates: u128,
    /// Structures passing the combinatorial filters.
    pub structures: usize,
}

/// Energy of cluster `i`.
pub fn cluster_energy(p: &Partition, i: usize, kind: EnergyKind) -> f64 {
    let g = p.cluster_graph(i);
    match kind {
        EnergyKind::Dirichlet => {
            let set = p.cluster_dirichlet(i);
            // without a boundary the smallest nontrivial eigenvalue is the natural one
            if set.is_empty() {
                nth_eigenvalue(&SpectralProblem::standard(&g), 2)
            } else {
                nth_eigenvalue(&SpectralProblem::with_dirichlet(&g, &set), 1)
            }
        }
        EnergyKind::Natural => nth_eigenvalue(&SpectralProblem::standard(&g), 2),
    }
}

/// Largest cluster energy.
pub fn partition_energy(p: &Partition, kind: EnergyKind) -> f64 {
    (0..p.k()).map(|i| cluster_energy(p, i, kind)).fold(0.0, f64::max)
}
