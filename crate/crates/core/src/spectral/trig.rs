//! Functions that are `a cos(kx) + b sin(kx)/k` on every edge.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::graph::{EdgeId, End, EndpointRef, MetricGraph};

/// `a cos(kx) + b sin(kx)/k` on `[0, length]`, read as `a + b x` when `k = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrigPiece {
    pub a: f64,
    pub b: f64,
    pub k: f64,
}

/// `sin(t)/t` with the removable singularity filled in.
fn sinc(t: f64) -> f64 {
    if t.abs() < 1e-4 {
        1.0 - t * t / 6.0
    } else {
        t.sin() / t
    }
}

/// The three basic integrals over `[0, l]`: cos², (sin/k)², cos·sin/k.
fn basis_integrals(k: f64, l: f64) -> (f64, f64, f64) {
    let th = k * l;
    let cc = l * (0.5 + 0.5 * sinc(2.0 * th));
    let ss = if th < 1e-2 {
        let t2 = th * th;
        l * l * l * (1.0 / 3.0 - t2 / 15.0 + 2.0 * t2 * t2 / 315.0)
    } else {
        l * l * l * (2.0 * th - (2.0 * th).sin()) / (4.0 * th * th * th)
    };
    let s = sinc(th);
    let cs = 0.5 * l * l * s * s;
    (cc, ss, cs)
}

impl TrigPiece {
    pub fn new(a: f64, b: f64, k: f64) -> Self {
        TrigPiece { a, b, k }
    }

    pub fn zero(k: f64) -> Self {
        TrigPiece { a: 0.0, b: 0.0, k }
    }

    pub fn value(&self, x: f64) -> f64 {
        let kx = self.k * x;
        self.a * kx.cos() + self.b * x * sinc(kx)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let kx = self.k * x;
        -self.a * self.k * kx.sin() + self.b * kx.cos()
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        -self.k * self.k * self.value(x)
    }

    /// The same function restarted at `t`, i.e. `x ↦ u(t + x)`.
    pub fn shifted(&self, t: f64) -> TrigPiece {
        TrigPiece { a: self.value(t), b: self.derivative(t), k: self.k }
    }

    /// `y ↦ u(length − y)`.
    pub fn reversed(&self, length: f64) -> TrigPiece {
        TrigPiece { a: self.value(length), b: -self.derivative(length), k: self.k }
    }

    pub fn scaled(&self, c: f64) -> TrigPiece {
        TrigPiece { a: c * self.a, b: c * self.b, k: self.k }
    }

    /// Sup norm over `[0, length]`, exact for `k > 0` when a full crest fits,
    /// otherwise taken over endpoints and interior extrema.
    pub fn sup(&self, length: f64) -> f64 {
        let mut m = self.value(0.0).abs().max(self.value(length).abs());
        for x in self.critical_points(length) {
            m = m.max(self.value(x).abs());
        }
        m
    }

    /// Amplitude `sqrt(a² + (b/k)²)` for `k > 0`; the sup norm when `k = 0`.
    pub fn amplitude(&self, length: f64) -> f64 {
        if self.k == 0.0 {
            self.sup(length)
        } else {
            self.a.hypot(self.b / self.k)
        }
    }

    /// Phase `φ` with `u(x) = R cos(kx − φ)`.
    fn phase(&self) -> f64 {
        (self.b / self.k).atan2(self.a)
    }

    /// Points `x` in `[0, length]` with `kx = φ + offset + jπ`.
    fn lattice(&self, length: f64, offset: f64) -> Vec<f64> {
        let base = self.phase() + offset;
        let th = self.k * length;
        let j0 = ((-base) / PI).floor() as i64 - 1;
        let mut out = Vec::new();
        let mut j = j0;
        loop {
            let t = base + j as f64 * PI;
            if t > th + 1e-9 * th.max(1.0) {
                break;
            }
            if t >= -1e-9 * th.max(1.0) {
                out.push((t / self.k).clamp(0.0, length));
            }
            j += 1;
        }
        out
    }

    fn critical_points(&self, length: f64) -> Vec<f64> {
        if self.k == 0.0 {
            return Vec::new();
        }
        self.lattice(length, 0.0)
    }

    /// Zeros in `[0, length]`; those within `snap·length` of an end are moved onto it.
    pub fn zeros(&self, length: f64, snap: f64) -> Vec<f64> {
        let raw = if self.k == 0.0 {
            if self.b == 0.0 {
                Vec::new()
            } else {
                let x = -self.a / self.b;
                if (-snap * length..=length * (1.0 + snap)).contains(&x) {
                    vec![x.clamp(0.0, length)]
                } else {
                    Vec::new()
                }
            }
        } else {
            self.lattice(length, PI / 2.0)
        };
        snap_points(raw, length, snap)
    }

    /// Critical points (zeros of `u'`) in `[0, length]`, snapped like [`TrigPiece::zeros`].
    pub fn extrema(&self, length: f64, snap: f64) -> Vec<f64> {
        snap_points(self.critical_points(length), length, snap)
    }

    /// `(∫u², ∫u'²)` over `[0, length]`.
    pub fn integrals(&self, length: f64) -> (f64, f64) {
        let (cc, ss, cs) = basis_integrals(self.k, length);
        let (a, b, k2) = (self.a, self.b, self.k * self.k);
        let l2 = a * a * cc + b * b * ss + 2.0 * a * b * cs;
        let d2 = a * a * k2 * k2 * ss + b * b * cc - 2.0 * a * b * k2 * cs;
        (l2.max(0.0), d2.max(0.0))
    }

    /// `∫u v` for two pieces with the same frequency.
    pub fn inner(&self, other: &TrigPiece, length: f64) -> f64 {
        debug_assert_eq!(self.k, other.k);
        let (cc, ss, cs) = basis_integrals(self.k, length);
        self.a * other.a * cc + self.b * other.b * ss + (self.a * other.b + other.a * self.b) * cs
    }
}

fn snap_points(mut xs: Vec<f64>, length: f64, snap: f64) -> Vec<f64> {
    for x in &mut xs {
        if *x <= snap * length {
            *x = 0.0;
        } else if *x >= length * (1.0 - snap) {
            *x = length;
        }
    }
    xs.dedup_by(|a, b| (*a - *b).abs() <= snap * length);
    xs
}

/// A function given edge by edge.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct TrigFunction {
    pub pieces: BTreeMap<EdgeId, TrigPiece>,
}

impl TrigFunction {
    pub fn new() -> Self {
        TrigFunction::default()
    }

    pub fn piece(&self, e: EdgeId) -> &TrigPiece {
        &self.pieces[&e]
    }

    pub fn insert(&mut self, e: EdgeId, p: TrigPiece) {
        self.pieces.insert(e, p);
    }

    /// Value at an endpoint of the graph.
    pub fn endpoint_value(&self, g: &MetricGraph, p: EndpointRef) -> f64 {
        let piece = self.piece(p.edge);
        match p.end {
            End::Source => piece.value(0.0),
            End::Target => piece.value(g.length(p.edge)),
        }
    }

    /// Derivative pointing into the edge at an endpoint.
    pub fn outgoing_derivative(&self, g: &MetricGraph, p: EndpointRef) -> f64 {
        let piece = self.piece(p.edge);
        match p.end {
            End::Source => piece.derivative(0.0),
            End::Target => -piece.derivative(g.length(p.edge)),
        }
    }

    pub fn scaled(&self, c: f64) -> TrigFunction {
        TrigFunction { pieces: self.pieces.iter().map(|(&e, p)| (e, p.scaled(c))).collect() }
    }

    /// Largest amplitude over the edges of `g`.
    pub fn scale(&self, g: &MetricGraph) -> f64 {
        g.edges().iter().map(|e| self.piece(e.id).amplitude(e.length)).fold(0.0, f64::max)
    }

    /// `(∫u², ∫u'²)` over the edges of `g`.
    pub fn integrals(&self, g: &MetricGraph) -> (f64, f64) {
        g.edges().iter().fold((0.0, 0.0), |acc, e| {
            let (a, b) = self.piece(e.id).integrals(e.length);
            (acc.0 + a, acc.1 + b)
        })
    }

    pub fn inner(&self, other: &TrigFunction, g: &MetricGraph) -> f64 {
        g.edges().iter().map(|e| self.piece(e.id).inner(other.piece(e.id), e.length)).sum()
    }

    /// Restriction to the edges of a subgraph sharing edge ids.
    pub fn restricted(&self, g: &MetricGraph) -> TrigFunction {
        TrigFunction { pieces: g.edges().iter().map(|e| (e.id, self.pieces[&e.id])).collect() }
    }

    /// Transfers the function onto a subdivision of its graph.
    pub fn refined(&self, refinement: &crate::graph::Refinement) -> TrigFunction {
        let mut out = TrigFunction::new();
        for (&e, p) in &self.pieces {
            match refinement.pieces.get(&e) {
                None => out.insert(e, *p),
                Some(children) => {
                    for &(id, start, _) in children {
                        out.insert(id, p.shifted(start));
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Composite Simpson rule, used as an independent check of the closed forms.
    fn simpson(f: impl Fn(f64) -> f64, l: f64) -> f64 {
        let n = 2000;
        let h = l / n as f64;
        let mut s = f(0.0) + f(l);
        for i in 1..n {
            s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    #[test]
    fn integrals_match_quadrature() {
        for &(a, b, k, l) in &[(1.0, 0.3, 2.0, 1.3), (0.2, -1.0, 7.5, 0.7), (0.5, 2.0, 1e-3, 2.0), (1.0, 1.0, 0.0, 1.5)] {
            let p = TrigPiece::new(a, b, k);
            let (u2, d2) = p.integrals(l);
            assert_relative_eq!(u2, simpson(|x| p.value(x).powi(2), l), max_relative = 1e-9);
            assert_relative_eq!(d2, simpson(|x| p.derivative(x).powi(2), l), max_relative = 1e-9, epsilon = 1e-12);
            let q = TrigPiece::new(-0.4, 0.9, k);
            assert_relative_eq!(p.inner(&q, l), simpson(|x| p.value(x) * q.value(x), l), max_relative = 1e-9);
        }
    }

    #[test]
    fn shift_and_reverse() {
        let p = TrigPiece::new(0.3, -1.2, 3.1);
        let s = p.shifted(0.4);
        let r = p.reversed(1.0);
        for x in [0.0, 0.1, 0.35] {
            assert_relative_eq!(s.value(x), p.value(0.4 + x), epsilon = 1e-14);
            assert_relative_eq!(r.value(x), p.value(1.0 - x), epsilon = 1e-14);
        }
    }

    #[test]
    fn zeros_of_cosines() {
        // cos(3πx) on [0,1] vanishes at 1/6, 1/2, 5/6
        let p = TrigPiece::new(1.0, 0.0, 3.0 * PI);
        let z = p.zeros(1.0, 1e-9);
        assert_eq!(z.len(), 3);
        for (x, y) in z.iter().zip([1.0 / 6.0, 0.5, 5.0 / 6.0]) {
            assert_relative_eq!(*x, y, epsilon = 1e-12);
        }
        // extrema of cos(3πx) are at 0, 1/3, 2/3, 1
        assert_eq!(p.extrema(1.0, 1e-9), vec![0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]);
        // sin(πx) has zeros exactly at both ends
        let s = TrigPiece::new(0.0, PI, PI);
        assert_eq!(s.zeros(1.0, 1e-9), vec![0.0, 1.0]);
        assert_eq!(TrigPiece::new(1.0, -2.0, 0.0).zeros(1.0, 1e-9), vec![0.5]);
    }
}
