//! Eigenvalue counting through the Dirichlet-to-Neumann matrix.
//!
//! With `k = √λ`, the number of eigenvalues strictly below `λ` equals the
//! number of Dirichlet eigenvalues of the decoupled edges below `λ` plus the
//! number of positive eigenvalues of the Dirichlet-to-Neumann matrix on the
//! standard vertices. Each edge of length `ℓ` adds `-k cot(kℓ)` at both of its
//! ends and `k / sin(kℓ)` between them.

use std::f64::consts::PI;

use super::secular::polish;
use super::SpectralProblem;

/// A graph reduced to what counting needs: edges between numbered vertices
/// and the Dirichlet flag of each vertex.
#[derive(Clone, Debug)]
pub(crate) struct EdgeList {
    pub dirichlet: Vec<bool>,
    pub edges: Vec<(usize, usize, f64)>,
    /// Multiplicity of the eigenvalue 0.
    pub zero_multiplicity: usize,
}

impl EdgeList {
    pub fn from_problem(problem: &SpectralProblem) -> EdgeList {
        let g = problem.graph();
        EdgeList {
            dirichlet: (0..g.vertex_count()).map(|v| problem.is_dirichlet(v)).collect(),
            edges: (0..g.edge_count()).map(|i| {
                let [a, b] = g.ends(i);
                (a, b, g.edges()[i].length)
            }).collect(),
            zero_multiplicity: problem.zero_multiplicity(),
        }
    }

    /// Number of eigenvalues strictly below `lambda`, with multiplicity.
    pub fn count_below(&self, lambda: f64) -> usize {
        if lambda <= 0.0 {
            return 0;
        }
        let (m, n, decoupled) = self.dtn(lambda.sqrt());
        decoupled + positive_count(m, n)
    }

    /// Dirichlet-to-Neumann matrix at `k` (dense, row-major) with its order
    /// and the decoupled edge count. An edge close to one of its own
    /// Dirichlet eigenvalues gets an extra standard vertex, which leaves the
    /// spectrum alone and keeps the entries away from `1 / sin(kℓ)` blowing up.
    fn dtn(&self, k: f64) -> (Vec<f64>, usize, usize) {
        let mut slot = vec![usize::MAX; self.dirichlet.len()];
        let mut n = 0;
        for (s, &d) in slot.iter_mut().zip(&self.dirichlet) {
            if !d {
                *s = n;
                n += 1;
            }
        }
        let mut pieces: Vec<(usize, usize, f64)> = Vec::with_capacity(self.edges.len());
        for &(a, b, len) in &self.edges {
            match split_point(k * len) {
                Some(f) => {
                    slot.push(n);
                    let mid = slot.len() - 1;
                    n += 1;
                    pieces.push((a, mid, f * len));
                    pieces.push((mid, b, (1.0 - f) * len));
                }
                None => pieces.push((a, b, len)),
            }
        }
        let mut m = vec![0.0; n * n];
        let mut decoupled = 0;
        for (a, b, len) in pieces {
            let th = k * len;
            decoupled += (th / PI).floor() as usize;
            let (s, c) = th.sin_cos();
            let (sa, sb) = (slot[a], slot[b]);
            if a == b {
                // both ends at one vertex: 2k(1 − cos θ)/sin θ without the cancellation
                if sa != usize::MAX {
                    m[sa * n + sa] += 2.0 * k * (0.5 * th).tan();
                }
                continue;
            }
            let diag = -k * c / s;
            let off = k / s;
            if sa != usize::MAX {
                m[sa * n + sa] += diag;
            }
            if sb != usize::MAX {
                m[sb * n + sb] += diag;
            }
            if sa != usize::MAX && sb != usize::MAX {
                m[sa * n + sb] += off;
                m[sb * n + sa] += off;
            }
        }
        (m, n, decoupled)
    }

    /// The `j`-th eigenvalue by bisection on the count, bracketing `√λ` to
    /// `rel` (or to rounding), or `None` as soon as it is known to be at least `cap`.
    pub fn nth_below(&self, j: usize, cap: f64, rel: f64) -> Option<f64> {
        assert!(j >= 1);
        if j <= self.zero_multiplicity {
            return Some(0.0);
        }
        let mut lo = 0.0;
        let mut hi;
        if cap.is_finite() {
            if self.count_below(cap) < j {
                return None;
            }
            hi = cap.sqrt();
        } else {
            let longest = self.edges.iter().map(|e| e.2).fold(0.0, f64::max);
            // the j-th eigenvalue never exceeds the j-th Dirichlet eigenvalue of the longest edge
            hi = 1.01 * PI * j as f64 / longest;
            while self.count_below(hi * hi) < j {
                lo = hi;
                hi *= 2.0;
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= rel.max(4.0 * f64::EPSILON) * hi {
                break;
            }
            if self.count_below(mid * mid) >= j {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let k = 0.5 * (lo + hi);
        Some(k * k)
    }
}

/// Closest a piece may come to a Dirichlet eigenvalue, in units of `π`.
const POLE_GAP: f64 = 0.05;

fn pole_distance(th: f64) -> f64 {
    let x = th / PI;
    if x < 0.5 {
        return f64::INFINITY;
    }
    (x - x.round()).abs()
}

/// Where to split an edge of phase `th`, as a fraction of its length, or
/// `None` when the edge is far enough from its Dirichlet eigenvalues.
fn split_point(th: f64) -> Option<f64> {
    if pole_distance(th) >= POLE_GAP {
        return None;
    }
    let worst = |f: f64| pole_distance(f * th).min(pole_distance((1.0 - f) * th));
    [0.5, 0.382, 0.447, 0.309, 0.25, 0.418, 0.35, 0.2]
        .into_iter()
        .max_by(|&a, &b| worst(a).total_cmp(&worst(b)))
}

/// Number of positive eigenvalues of a symmetric matrix, from the pivots of a
/// Bunch–Parlett factorization. A 2×2 pivot always has one eigenvalue of each sign.
pub(crate) fn positive_count(mut a: Vec<f64>, n: usize) -> usize {
    let rho = (1.0 + 17f64.sqrt()) / 8.0;
    let mut live: Vec<usize> = (0..n).collect();
    let mut positive = 0;
    while !live.is_empty() {
        let (mut r, mut diag) = (live[0], 0.0);
        let (mut p, mut q, mut off) = (live[0], live[0], 0.0);
        for (x, &i) in live.iter().enumerate() {
            let d = a[i * n + i].abs();
            if d > diag {
                diag = d;
                r = i;
            }
            for &j in &live[x + 1..] {
                let o = a[i * n + j].abs();
                if o > off {
                    off = o;
                    p = i;
                    q = j;
                }
            }
        }
        if diag == 0.0 && off == 0.0 {
            break;
        }
        if diag >= rho * off {
            let pivot = a[r * n + r];
            positive += (pivot > 0.0) as usize;
            live.retain(|&i| i != r);
            for &i in &live {
                let f = a[i * n + r] / pivot;
                if f != 0.0 {
                    for &j in &live {
                        a[i * n + j] -= f * a[r * n + j];
                    }
                }
            }
        } else {
            let (epp, epq, eqq) = (a[p * n + p], a[p * n + q], a[q * n + q]);
            let det = epp * eqq - epq * epq;
            positive += 1;
            live.retain(|&i| i != p && i != q);
            for &i in &live {
                let (cp, cq) = (a[i * n + p], a[i * n + q]);
                // row i of C·E⁻¹
                let (wp, wq) = ((cp * eqq - cq * epq) / det, (cq * epp - cp * epq) / det);
                for &j in &live {
                    a[i * n + j] -= wp * a[p * n + j] + wq * a[q * n + j];
                }
            }
        }
    }
    positive
}

/// Number of eigenvalues strictly below `lambda`, counted with multiplicity.
///
/// Exact except when `lambda` is itself an eigenvalue, where the answer may be
/// off by the local jump.
pub fn count_below(problem: &SpectralProblem, lambda: f64) -> usize {
    EdgeList::from_problem(problem).count_below(lambda)
}

/// The `j`-th eigenvalue (1-based, with multiplicity) by bisection on the count,
/// polished on the secular matrix.
pub fn nth_eigenvalue(problem: &SpectralProblem, j: usize) -> f64 {
    let lam = nth_eigenvalue_coarse(problem, j, 0.0);
    if lam == 0.0 {
        return 0.0;
    }
    let k = lam.sqrt();
    let k = polish(problem, k).unwrap_or(k);
    k * k
}

/// Bisection only. Accurate to about `1e-8` relative when the eigenvalue sits
/// on a pole of the Dirichlet-to-Neumann matrix.
pub(crate) fn nth_eigenvalue_coarse(problem: &SpectralProblem, j: usize, rel: f64) -> f64 {
    EdgeList::from_problem(problem).nth_below(j, f64::INFINITY, rel).expect("no cap")
}
