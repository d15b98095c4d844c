//! Piecewise-linear finite elements, used only as an independent check.
//!
//! Eigenvalues are located by bisection on the inertia of `K − σM`: the
//! interior nodes of every edge form a tridiagonal block that is eliminated
//! with a Sturm recurrence, leaving a small dense Schur complement on the
//! standard vertices.

use nalgebra::{DMatrix, SymmetricEigen};

use super::{SpectralError, SpectralProblem};

struct Mesh {
    /// Per edge: element count, element size, and the vertex slots of its ends.
    edges: Vec<(usize, f64, [Option<usize>; 2])>,
    slots: usize,
}

fn mesh(problem: &SpectralProblem, per_unit: f64) -> Result<Mesh, SpectralError> {
    if !(per_unit.is_finite() && per_unit >= 8.0) {
        return Err(SpectralError::InvalidResolution(per_unit));
    }
    let g = problem.graph();
    let mut slot = vec![None; g.vertex_count()];
    let mut slots = 0;
    for (v, s) in slot.iter_mut().enumerate() {
        if !problem.is_dirichlet(v) {
            *s = Some(slots);
            slots += 1;
        }
    }
    let mut edges = Vec::with_capacity(g.edge_count());
    for (i, e) in g.edges().iter().enumerate() {
        let n = ((e.length * per_unit).ceil() as usize).max(2);
        let h = e.length / n as f64;
        if !(h > 0.0) || h <= f64::EPSILON * e.length {
            return Err(SpectralError::SingularMass);
        }
        let [a, b] = g.ends(i);
        edges.push((n, h, [slot[a], slot[b]]));
    }
    Ok(Mesh { edges, slots })
}

/// Number of negative eigenvalues of `K − σM`, i.e. discrete eigenvalues below `σ`.
fn negative_count(mesh: &Mesh, sigma: f64) -> usize {
    let mut schur = DMatrix::<f64>::zeros(mesh.slots, mesh.slots);
    let mut negatives = 0;
    for &(n, h, [sa, sb]) in &mesh.edges {
        let d = 2.0 / h - sigma * 4.0 * h / 6.0;
        let o = -1.0 / h - sigma * h / 6.0;
        let end = 1.0 / h - sigma * 2.0 * h / 6.0;
        let tiny = f64::EPSILON * o.abs();
        let m = n - 1;
        // forward pivots give (T⁻¹)_{mm} and the corner entry, backward ones (T⁻¹)_{11}
        let mut p = d;
        let mut corner = 1.0;
        for _ in 1..m {
            if p == 0.0 {
                p = tiny;
            }
            negatives += (p < 0.0) as usize;
            corner *= -o / p;
            p = d - o * o / p;
        }
        if p == 0.0 {
            p = tiny;
        }
        negatives += (p < 0.0) as usize;
        let g_mm = 1.0 / p;
        let g_1m = corner / p;
        let mut q = d;
        for _ in 1..m {
            if q == 0.0 {
                q = tiny;
            }
            q = d - o * o / q;
        }
        if q == 0.0 {
            q = tiny;
        }
        let g_11 = 1.0 / q;
        if let Some(a) = sa {
            schur[(a, a)] += end - o * o * g_11;
        }
        if let Some(b) = sb {
            schur[(b, b)] += end - o * o * g_mm;
        }
        if let (Some(a), Some(b)) = (sa, sb) {
            if a == b {
                schur[(a, a)] -= 2.0 * o * o * g_1m;
            } else {
                schur[(a, b)] -= o * o * g_1m;
                schur[(b, a)] -= o * o * g_1m;
            }
        }
    }
    if mesh.slots > 0 {
        negatives += SymmetricEigen::new(schur).eigenvalues.iter().filter(|&&x| x < 0.0).count();
    }
    negatives
}

/// Discrete eigenvalues strictly below `lambda` on a mesh with `per_unit` elements per unit length.
pub fn fem_count_below(problem: &SpectralProblem, lambda: f64, per_unit: f64) -> Result<usize, SpectralError> {
    Ok(negative_count(&mesh(problem, per_unit)?, lambda))
}

/// First `n` finite-element eigenvalues.
pub fn fem_eigenvalues(problem: &SpectralProblem, n: usize, per_unit: f64) -> Result<Vec<f64>, SpectralError> {
    if n == 0 {
        return Err(SpectralError::InvalidCount);
    }
    let mesh = mesh(problem, per_unit)?;
    let zero = problem.zero_multiplicity();
    let mut out = Vec::with_capacity(n);
    let mut hi = 1.0 / problem.graph().total_length().powi(2);
    for j in 1..=n {
        if j <= zero {
            out.push(0.0);
            continue;
        }
        let mut lo = out.last().copied().unwrap_or(0.0);
        while negative_count(&mesh, hi) < j {
            lo = hi;
            hi *= 2.0;
        }
        let mut top = hi;
        for _ in 0..200 {
            let mid = 0.5 * (lo + top);
            if mid <= lo || mid >= top || top - lo <= 4.0 * f64::EPSILON * top {
                break;
            }
            if negative_count(&mesh, mid) >= j {
                top = mid;
            } else {
                lo = mid;
            }
        }
        out.push(0.5 * (lo + top));
    }
    Ok(out)
}

/// Richardson extrapolation from meshes with `per_unit` and `2·per_unit` elements per unit length.
pub fn fem_extrapolated(problem: &SpectralProblem, n: usize, per_unit: f64) -> Result<Vec<f64>, SpectralError> {
    let coarse = fem_eigenvalues(problem, n, per_unit)?;
    let fine = fem_eigenvalues(problem, n, 2.0 * per_unit)?;
    Ok(coarse.iter().zip(&fine).map(|(c, f)| (4.0 * f - c) / 3.0).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::CatalogSpec;
    use std::f64::consts::PI;

    #[test]
    fn interval_dirichlet_converges() {
        let i = CatalogSpec::Interval(1.0).build();
        let p = SpectralProblem::all_dirichlet(&i);
        let l = fem_eigenvalues(&p, 1, 64.0).unwrap()[0];
        assert!((l / (PI * PI) - 1.0).abs() < 1e-3);
        assert!(l > PI * PI, "conforming elements overestimate");
        let x = fem_extrapolated(&p, 3, 64.0).unwrap();
        for (j, v) in x.iter().enumerate() {
            let exact = ((j + 1) as f64 * PI).powi(2);
            assert!((v / exact - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn loop_has_double_eigenvalue() {
        let lp = SpectralProblem::standard(&CatalogSpec::Loop(1.0).build());
        let x = fem_extrapolated(&lp, 3, 64.0).unwrap();
        assert_eq!(x[0], 0.0);
        assert!((x[1] / (4.0 * PI * PI) - 1.0).abs() < 1e-5);
        // the pair sits on a pole of the Schur complement, so bisection resolves it to about √ε
        assert!((x[2] / x[1] - 1.0).abs() < 1e-7, "{x:?}");
    }

    #[test]
    fn rejects_coarse_mesh() {
        let i = CatalogSpec::Interval(1.0).build();
        assert_eq!(
            fem_eigenvalues(&SpectralProblem::standard(&i), 1, 4.0),
            Err(SpectralError::InvalidResolution(4.0))
        );
    }
}
