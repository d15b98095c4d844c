//! Builtin graph families, addressed by strings such as `star:3` or `windmill:1:4:1`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::graph::{EdgeId, EndpointRef, MetricGraph};

#[derive(Clone, Debug, PartialEq)]
pub enum CatalogSpec {
    Interval(f64),
    Path(Vec<f64>),
    /// Edge lengths of the arms.
    Star(Vec<f64>),
    Loop(f64),
    Figure8(f64, f64),
    /// Loop length and stem length.
    Lasso(f64, f64),
    Pumpkin(Vec<f64>),
    /// Two 3-pumpkins with edge length `l` joined by a bridge of length `s`.
    PumpkinDumbbell(f64, f64),
    Dumbbell(f64, f64, f64),
    Flower(Vec<f64>),
    /// Loop lengths then pendant lengths, all attached to one center.
    Stower(Vec<f64>, Vec<f64>),
    /// `2m` lassos with loop length `l` and stem length `s` glued at their stem ends.
    Windmill(usize, f64, f64),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CatalogError {
    #[error("unknown catalog family `{0}`")]
    UnknownFamily(String),
    #[error("bad parameters for `{family}`: {reason}")]
    BadParameters { family: String, reason: String },
}

fn bad(family: &str, reason: impl Into<String>) -> CatalogError {
    CatalogError::BadParameters { family: family.to_string(), reason: reason.into() }
}

/// Incremental builder: vertices are added explicitly, edges attach to them.
struct Builder {
    edges: Vec<(EdgeId, f64)>,
    vertices: Vec<Vec<EndpointRef>>,
}

impl Builder {
    fn new() -> Self {
        Builder { edges: Vec::new(), vertices: Vec::new() }
    }

    fn vertex(&mut self) -> usize {
        self.vertices.push(Vec::new());
        self.vertices.len() - 1
    }

    fn edge(&mut self, from: usize, to: usize, length: f64) {
        let id = EdgeId(self.edges.len() as u32);
        self.edges.push((id, length));
        self.vertices[from].push(EndpointRef::source(id));
        self.vertices[to].push(EndpointRef::target(id));
    }

    fn pendant(&mut self, from: usize, length: f64) {
        let leaf = self.vertex();
        self.edge(from, leaf, length);
    }

    fn finish(self) -> MetricGraph {
        MetricGraph::new(self.edges, self.vertices).expect("catalog graphs are valid")
    }
}

impl CatalogSpec {
    pub fn build(&self) -> MetricGraph {
        let mut b = Builder::new();
        match self {
            CatalogSpec::Interval(l) => {
                let v = b.vertex();
                b.pendant(v, *l);
            }
            CatalogSpec::Path(ls) => {
                let mut v = b.vertex();
                for &l in ls {
                    let w = b.vertex();
                    b.edge(v, w, l);
                    v = w;
                }
            }
            CatalogSpec::Star(ls) => {
                let c = b.vertex();
                for &l in ls {
                    b.pendant(c, l);
                }
            }
            CatalogSpec::Loop(l) => {
                let v = b.vertex();
                b.edge(v, v, *l);
            }
            CatalogSpec::Figure8(l1, l2) => {
                let v = b.vertex();
                b.edge(v, v, *l1);
                b.edge(v, v, *l2);
            }
            CatalogSpec::Lasso(l, s) => {
                let v = b.vertex();
                b.edge(v, v, *l);
                b.pendant(v, *s);
            }
            CatalogSpec::Pumpkin(ls) => {
                let (u, v) = (b.vertex(), b.vertex());
                for &l in ls {
                    b.edge(u, v, l);
                }
            }
            CatalogSpec::PumpkinDumbbell(l, s) => {
                let (a, c) = (b.vertex(), b.vertex());
                let (d, f) = (b.vertex(), b.vertex());
                for _ in 0..3 {
                    b.edge(a, c, *l);
                }
                b.edge(c, d, *s);
                for _ in 0..3 {
                    b.edge(d, f, *l);
                }
            }
            CatalogSpec::Dumbbell(l1, s, l2) => {
                let (u, v) = (b.vertex(), b.vertex());
                b.edge(u, u, *l1);
                b.edge(u, v, *s);
                b.edge(v, v, *l2);
            }
            CatalogSpec::Flower(ls) => {
                let v = b.vertex();
                for &l in ls {
                    b.edge(v, v, l);
                }
            }
            CatalogSpec::Stower(loops, pendants) => {
                let v = b.vertex();
                for &l in loops {
                    b.edge(v, v, l);
                }
                for &l in pendants {
                    b.pendant(v, l);
                }
            }
            CatalogSpec::Windmill(m, l, s) => {
                let c = b.vertex();
                for _ in 0..2 * m {
                    let w = b.vertex();
                    b.edge(c, w, *s);
                    b.edge(w, w, *l);
                }
            }
        }
        b.finish()
    }

    /// The graphs used for cross-checks throughout the test suites.
    pub fn standard_set() -> Vec<CatalogSpec> {
        [
            "star:3",
            "loop:1",
            "lasso:1:1",
            "figure8:1:1",
            "dumbbell:1:1:1",
            "pumpkin:3",
            "pumpkin_dumbbell:1:1",
            "windmill:1:4:1",
            "stower:2:2",
        ]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect()
    }
}

fn lengths(family: &str, parts: &[&str]) -> Result<Vec<f64>, CatalogError> {
    parts
        .iter()
        .map(|p| {
            let x: f64 = p.parse().map_err(|_| bad(family, format!("`{p}` is not a number")))?;
            if x.is_finite() && x > 0.0 {
                Ok(x)
            } else {
                Err(bad(family, format!("length {x} must be positive")))
            }
        })
        .collect()
}

fn count(family: &str, p: &str) -> Result<usize, CatalogError> {
    p.parse().map_err(|_| bad(family, format!("`{p}` is not a count")))
}

/// `n` lengths from `rest`, or all ones when `rest` is empty.
fn n_lengths(family: &str, n: usize, rest: &[&str]) -> Result<Vec<f64>, CatalogError> {
    if rest.is_empty() {
        return Ok(vec![1.0; n]);
    }
    let ls = lengths(family, rest)?;
    if ls.len() != n {
        return Err(bad(family, format!("expected {n} lengths, got {}", ls.len())));
    }
    Ok(ls)
}

fn fixed<const N: usize>(family: &str, rest: &[&str], default: [f64; N]) -> Result<[f64; N], CatalogError> {
    if rest.is_empty() {
        return Ok(default);
    }
    let ls = lengths(family, rest)?;
    ls.try_into().map_err(|v: Vec<f64>| bad(family, format!("expected {N} lengths, got {}", v.len())))
}

impl FromStr for CatalogSpec {
    type Err = CatalogError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.strip_prefix("catalog:").unwrap_or(s);
        let parts: Vec<&str> = s.split(':').collect();
        let (family, rest) = (parts[0], &parts[1..]);
        let spec = match family {
            "interval" => CatalogSpec::Interval(fixed(family, rest, [1.0])?[0]),
            "path" => {
                if rest.is_empty() {
                    return Err(bad(family, "needs at least one length"));
                }
                CatalogSpec::Path(lengths(family, rest)?)
            }
            "star" | "pumpkin" => {
                let m = count(family, rest.first().ok_or_else(|| bad(family, "needs an edge count"))?)?;
                if m == 0 {
                    return Err(bad(family, "needs at least one edge"));
                }
                let ls = n_lengths(family, m, &rest[1..])?;
                if family == "star" {
                    CatalogSpec::Star(ls)
                } else {
                    CatalogSpec::Pumpkin(ls)
                }
            }
            "loop" => CatalogSpec::Loop(fixed(family, rest, [1.0])?[0]),
            "figure8" => {
                let [a, b] = fixed(family, rest, [1.0, 1.0])?;
                CatalogSpec::Figure8(a, b)
            }
            "lasso" => {
                let [a, b] = fixed(family, rest, [1.0, 1.0])?;
                CatalogSpec::Lasso(a, b)
            }
            "pumpkin_dumbbell" => {
                let [a, b] = fixed(family, rest, [1.0, 1.0])?;
                CatalogSpec::PumpkinDumbbell(a, b)
            }
            "dumbbell" => {
                let [a, b, c] = fixed(family, rest, [1.0, 1.0, 1.0])?;
                CatalogSpec::Dumbbell(a, b, c)
            }
            "flower" => {
                if rest.is_empty() {
                    return Err(bad(family, "needs at least one loop length"));
                }
                CatalogSpec::Flower(lengths(family, rest)?)
            }
            "stower" => {
                if rest.len() < 2 {
                    return Err(bad(family, "needs loop and pendant counts"));
                }
                let (nl, np) = (count(family, rest[0])?, count(family, rest[1])?);
                if nl + np == 0 {
                    return Err(bad(family, "needs at least one edge"));
                }
                let ls = n_lengths(family, nl + np, &rest[2..])?;
                CatalogSpec::Stower(ls[..nl].to_vec(), ls[nl..].to_vec())
            }
            "windmill" => {
                if rest.is_empty() {
                    return Err(bad(family, "needs m"));
                }
                let m = count(family, rest[0])?;
                if m == 0 {
                    return Err(bad(family, "m must be positive"));
                }
                let [l, s] = fixed(family, &rest[1..], [4.0, 1.0])?;
                CatalogSpec::Windmill(m, l, s)
            }
            other => return Err(CatalogError::UnknownFamily(other.to_string())),
        };
        Ok(spec)
    }
}

fn join(ls: &[f64]) -> String {
    ls.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(":")
}

impl fmt::Display for CatalogSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CatalogSpec::Interval(l) => write!(f, "interval:{l}"),
            CatalogSpec::Path(ls) => write!(f, "path:{}", join(ls)),
            CatalogSpec::Star(ls) => write!(f, "star:{}:{}", ls.len(), join(ls)),
            CatalogSpec::Loop(l) => write!(f, "loop:{l}"),
            CatalogSpec::Figure8(a, b) => write!(f, "figure8:{a}:{b}"),
            CatalogSpec::Lasso(a, b) => write!(f, "lasso:{a}:{b}"),
            CatalogSpec::Pumpkin(ls) => write!(f, "pumpkin:{}:{}", ls.len(), join(ls)),
            CatalogSpec::PumpkinDumbbell(a, b) => write!(f, "pumpkin_dumbbell:{a}:{b}"),
            CatalogSpec::Dumbbell(a, b, c) => write!(f, "dumbbell:{a}:{b}:{c}"),
            CatalogSpec::Flower(ls) => write!(f, "flower:{}", join(ls)),
            CatalogSpec::Stower(l, p) => {
                let all: Vec<f64> = l.iter().chain(p).copied().collect();
                write!(f, "stower:{}:{}:{}", l.len(), p.len(), join(&all))
            }
            CatalogSpec::Windmill(m, l, s) => write!(f, "windmill:{m}:{l}:{s}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn topo(s: &str) -> (usize, usize, usize, f64) {
        let t = s.parse::<CatalogSpec>().unwrap().build().topology();
        (t.betti, t.leaves.len(), t.components, t.total_length)
    }

    #[test]
    fn families_have_expected_topology() {
        assert_eq!(topo("star:3"), (0, 3, 1, 3.0));
        assert_eq!(topo("loop:2"), (1, 0, 1, 2.0));
        assert_eq!(topo("figure8:1:1"), (2, 0, 1, 2.0));
        assert_eq!(topo("windmill:1:4:1"), (2, 0, 1, 10.0));
        assert_eq!(topo("windmill:2"), (4, 0, 1, 20.0));
        assert_eq!(topo("pumpkin_dumbbell:1:1"), (4, 0, 1, 7.0));
        assert_eq!(topo("stower:1:3"), (1, 3, 1, 4.0));
        assert_eq!(topo("lasso:1:2"), (1, 1, 1, 3.0));
        assert_eq!(topo("path:1:2:3"), (0, 2, 1, 6.0));
    }

    #[test]
    fn star_degrees() {
        let g = CatalogSpec::Star(vec![1.0; 3]).build();
        assert_eq!(g.topology().degrees, vec![3, 1, 1, 1]);
    }

    #[test]
    fn display_round_trips() {
        for s in ["interval:1.5", "star:3:1:2:3", "stower:2:2:1:1:1:1", "windmill:1:4:1", "flower:1:2"] {
            let spec: CatalogSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
            assert_eq!(spec.to_string().parse::<CatalogSpec>().unwrap(), spec);
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(matches!("moebius:1".parse::<CatalogSpec>(), Err(CatalogError::UnknownFamily(_))));
        assert!("interval:-1".parse::<CatalogSpec>().is_err());
        assert!("star:3:1:1".parse::<CatalogSpec>().is_err());
        assert!("star".parse::<CatalogSpec>().is_err());
    }

    #[test]
    fn every_catalog_graph_survives_the_file_format() {
        for spec in CatalogSpec::standard_set() {
            let g = spec.build();
            assert_eq!(MetricGraph::from_json(&g.to_json()).unwrap(), g, "{spec}");
        }
    }
}
