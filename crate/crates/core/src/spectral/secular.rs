//! The secular matrix and eigenpairs from it.
//!
//! Internally an edge function is `a cos(kx) + c sin(kx)/min(k,1)` and
//! derivative rows are divided by `max(k,1)`, which keeps every entry of the
//! matrix bounded by 1 in absolute value for all `k > 0`.


use nalgebra::{DMatrix, DVector};

use super::counting::EdgeList;
use super::trig::{TrigFunction, TrigPiece};
use super::{SpectralError, SpectralProblem};
use crate::graph::{End, EndpointRef};

/// A root is accepted when `σ_min < ROOT_THRESHOLD · ‖M‖₁`.
pub const ROOT_THRESHOLD: f64 = 1e-9;

const RESIDUAL_LIMIT: f64 = 1e-8;
/// Eigenvalues closer than this, relative to `k`, are treated as one multiple eigenvalue.
const MULT_GAP: f64 = 1e-7;

/// Eigenvalues in nondecreasing order, repeated by multiplicity, with an
/// L²-orthonormal eigenvector for each.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// Multiplicity of the eigenvalue at each index.
    pub multiplicities: Vec<usize>,
    pub eigenvectors: Vec<TrigFunction>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Distinct eigenvalues with multiplicity.
    pub fn distinct(&self) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        let mut i = 0;
        while i < self.eigenvalues.len() {
            out.push((self.eigenvalues[i], self.multiplicities[i]));
            i += self.multiplicities[i];
        }
        out
    }
}

fn row_value(p: EndpointRef, th: f64, m: f64) -> (f64, f64) {
    match p.end {
        End::Source => (1.0, 0.0),
        End::Target => (th.cos(), th.sin() / m),
    }
}

fn row_flux(p: EndpointRef, th: f64, m: f64) -> (f64, f64) {
    match p.end {
        End::Source => (0.0, 1.0),
        End::Target => (m * th.sin(), -th.cos()),
    }
}

/// The square vertex-condition matrix at wavenumber `k`. Columns `2i, 2i+1`
/// hold the coefficients of edge `i`.
pub fn secular_matrix(problem: &SpectralProblem, k: f64) -> DMatrix<f64> {
    let g = problem.graph();
    let n = 2 * g.edge_count();
    let m = k.min(1.0);
    let mut mat = DMatrix::zeros(n, n);
    let mut row = 0;
    let col = |p: EndpointRef| 2 * g.edge_index(p.edge).unwrap();
    let theta = |p: EndpointRef| k * g.length(p.edge);
    for (v, block) in g.vertices().iter().enumerate() {
        if problem.is_dirichlet(v) {
            for &p in block {
                let (x, y) = row_value(p, theta(p), m);
                mat[(row, col(p))] += x;
                mat[(row, col(p) + 1)] += y;
                row += 1;
            }
        } else {
            let p0 = block[0];
            let (x0, y0) = row_value(p0, theta(p0), m);
            for &p in &block[1..] {
                let (x, y) = row_value(p, theta(p), m);
                mat[(row, col(p))] += x;
                mat[(row, col(p) + 1)] += y;
                mat[(row, col(p0))] -= x0;
                mat[(row, col(p0) + 1)] -= y0;
                row += 1;
            }
            for &p in block {
                let (x, y) = row_flux(p, theta(p), m);
                mat[(row, col(p))] += x;
                mat[(row, col(p) + 1)] += y;
            }
            row += 1;
        }
    }
    debug_assert_eq!(row, n);
    mat
}

/// The matrix 1-norm, floored at 1 because individual rows can cancel to zero.
fn one_norm(m: &DMatrix<f64>) -> f64 {
    m.column_iter().map(|c| c.iter().map(|x| x.abs()).sum::<f64>()).fold(1.0, f64::max)
}

/// Singular values in increasing order with their right singular vectors.
fn svd_sorted(m: DMatrix<f64>) -> (Vec<f64>, Vec<DVector<f64>>) {
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("requested V");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    let values = idx.iter().map(|&i| svd.singular_values[i]).collect();
    let vectors = idx.iter().map(|&i| vt.row(i).transpose()).collect();
    (values, vectors)
}

/// Smallest singular value of the secular matrix.
pub fn secular_sigma(problem: &SpectralProblem, k: f64) -> f64 {
    let m = secular_matrix(problem, k);
    m.singular_values().iter().copied().fold(f64::INFINITY, f64::min)
}

fn relative_sigma(problem: &SpectralProblem, k: f64) -> f64 {
    let m = secular_matrix(problem, k);
    let norm = one_norm(&m);
    m.singular_values().iter().copied().fold(f64::INFINITY, f64::min) / norm
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a) > 1e-15 * b.abs().max(1.0) {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
        if c >= d {
            break;
        }
    }
    if fc <= fd {
        c
    } else {
        d
    }
}

/// A root of the secular matrix within relative distance `1e-6` of `k`, if there is one.
pub(crate) fn polish(problem: &SpectralProblem, k: f64) -> Option<f64> {
    let d = 1e-6 * k;
    let sigma = |x: f64| relative_sigma(problem, x);
    let kr = golden_min(sigma, k - d, k + d);
    (sigma(kr) < ROOT_THRESHOLD).then_some(kr)
}

/// Eigenvectors for the `mult` smallest singular values at `k`, orthonormal in L².
pub fn eigenpairs_at(problem: &SpectralProblem, k: f64, mult: usize) -> Vec<TrigFunction> {
    let g = problem.graph();
    let (_, vectors) = svd_sorted(secular_matrix(problem, k));
    let big = k.max(1.0);
    let mut out: Vec<TrigFunction> = Vec::with_capacity(mult);
    for v in vectors.iter().take(mult) {
        let mut f = TrigFunction::new();
        for (i, e) in g.edges().iter().enumerate() {
            f.insert(e.id, TrigPiece::new(v[2 * i], v[2 * i + 1] * big, k));
        }
        for prev in &out {
            let c = f.inner(prev, g);
            for (id, p) in f.pieces.iter_mut() {
                let q = prev.piece(*id);
                p.a -= c * q.a;
                p.b -= c * q.b;
            }
        }
        let norm = f.inner(&f, g).sqrt();
        let mut f = f.scaled(1.0 / norm);
        // fix the sign by the largest coefficient
        let lead = f
            .pieces
            .values()
            .flat_map(|p| [p.a, p.b / k])
            .fold(0.0f64, |acc, x| if x.abs() > acc.abs() + 1e-12 { x } else { acc });
        if lead < 0.0 {
            f = f.scaled(-1.0);
        }
        out.push(f);
    }
    out
}

fn zero_modes(problem: &SpectralProblem) -> Vec<TrigFunction> {
    let g = problem.graph();
    let (label, n) = g.vertex_components();
    let mut pinned = vec![false; n];
    let mut length = vec![0.0; n];
    for (v, &c) in label.iter().enumerate() {
        pinned[c] |= problem.is_dirichlet(v);
    }
    for (i, e) in g.edges().iter().enumerate() {
        length[label[g.ends(i)[0]]] += e.length;
    }
    (0..n)
        .filter(|&c| !pinned[c])
        .map(|c| {
            let mut f = TrigFunction::new();
            for (i, e) in g.edges().iter().enumerate() {
                let a = if label[g.ends(i)[0]] == c { 1.0 / length[c].sqrt() } else { 0.0 };
                f.insert(e.id, TrigPiece::new(a, 0.0, 0.0));
            }
            f
        })
        .collect()
}

/// The first `n` eigenvalues with eigenvectors.
///
/// Eigenvalues come from bisection on the exact count, so close pairs are
/// never missed; multiplicities are the count jumps across `k(1 ± MULT_GAP)`.
/// Eigenvectors are the right singular vectors of the secular matrix at the
/// polished root.
pub fn eigenvalues(problem: &SpectralProblem, n: usize) -> Result<Spectrum, SpectralError> {
    if n == 0 {
        return Err(SpectralError::InvalidCount);
    }
    let zero = problem.zero_multiplicity();
    let mut vectors = zero_modes(problem);
    let mut values = vec![0.0; zero];
    let mut mults = vec![zero; zero];
    let list = EdgeList::from_problem(problem);
    let mut j = zero + 1;
    while j <= n {
        let k = list.nth_below(j, f64::INFINITY, 0.0).expect("no cap").sqrt();
        let upto = list.count_below((k * (1.0 + MULT_GAP)).powi(2));
        if upto < j {
            return Err(SpectralError::RootIsolationFailure { k });
        }
        let m = upto + 1 - j;
        let k = polish(problem, k).unwrap_or(k);
        for f in eigenpairs_at(problem, k, m) {
            values.push(k * k);
            mults.push(m);
            vectors.push(f);
        }
        j = upto + 1;
    }
    values.truncate(n);
    mults.truncate(n);
    vectors.truncate(n);
    for (i, (&lam, f)) in values.iter().zip(&vectors).enumerate() {
        let r = problem.residual(lam, f);
        if r.is_nan() || r > RESIDUAL_LIMIT {
            return Err(SpectralError::ResidualTooLarge { index: i, residual: r });
        }
    }
    Ok(Spectrum { eigenvalues: values, multiplicities: mults, eigenvectors: vectors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::CatalogSpec;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn sigma_vanishes_at_roots() {
        let i = CatalogSpec::Interval(1.0).build();
        let dir = SpectralProblem::all_dirichlet(&i);
        assert!(secular_sigma(&dir, PI) < 1e-14);
        assert!(secular_sigma(&dir, PI / 2.0) > 0.1);
        let lp = SpectralProblem::standard(&CatalogSpec::Loop(1.0).build());
        let m = secular_matrix(&lp, 2.0 * PI);
        let (vals, _) = svd_sorted(m);
        assert!(vals.len() == 2 && vals[1] < 1e-14);
        let star = CatalogSpec::Star(vec![1.0; 3]).build();
        let leaves = SpectralProblem::with_dirichlet(&star, &[1, 2, 3]);
        assert!(secular_sigma(&leaves, PI / 2.0) < 1e-14);
    }

    #[test]
    fn interval_spectra() {
        let i = CatalogSpec::Interval(1.0).build();
        let s = eigenvalues(&SpectralProblem::all_dirichlet(&i), 10).unwrap();
        for (j, &lam) in s.eigenvalues.iter().enumerate() {
            assert!((lam - ((j + 1) as f64 * PI).powi(2)).abs() < 1e-8);
        }
        let s = eigenvalues(&SpectralProblem::standard(&i), 10).unwrap();
        for (j, &lam) in s.eigenvalues.iter().enumerate() {
            assert!((lam - (j as f64 * PI).powi(2)).abs() < 1e-8);
        }
    }

    #[test]
    fn loop_and_star_multiplicities() {
        let lp = SpectralProblem::standard(&CatalogSpec::Loop(1.0).build());
        let s = eigenvalues(&lp, 4).unwrap();
        assert_eq!(s.multiplicities, vec![1, 2, 2, 2]);
        assert_relative_eq!(s.eigenvalues[3], 16.0 * PI * PI, max_relative = 1e-12);
        // the two vectors of a double eigenvalue are orthonormal
        let g = lp.graph();
        assert!(s.eigenvectors[1].inner(&s.eigenvectors[2], g).abs() < 1e-10);
        assert_relative_eq!(s.eigenvectors[2].inner(&s.eigenvectors[2], g), 1.0, max_relative = 1e-10);
        let star = SpectralProblem::standard(&CatalogSpec::Star(vec![1.0; 3]).build());
        let s = eigenvalues(&star, 7).unwrap();
        let d: Vec<(f64, usize)> = s.distinct().iter().map(|&(l, m)| ((l / (PI * PI) * 4.0).round() / 4.0, m)).collect();
        assert_eq!(d, vec![(0.0, 1), (0.25, 2), (1.0, 1), (2.25, 2), (4.0, 1)]);
    }
}
