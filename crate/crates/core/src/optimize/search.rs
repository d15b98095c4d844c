//! Mesh search over partition structures, followed by local refinement.
//!
//! A structure fixes how every vertex is split into blocks and how many cut
//! points every edge carries. The clusters are then the components of the
//! block graph, where uncut edges join blocks and a cut edge leaves a pendant
//! piece at each end, plus the middle pieces of edges cut more than once.
//! Only the first and last cut on an edge matter: the middle pieces are
//! intervals and do best when they share the gap equally.
//!
//! Two reductions keep the search small without changing the optimum. For the
//! natural energy cutting inside a cluster never raises its first nonzero
//! eigenvalue, so clusters may be taken to be trees. For the Dirichlet energy
//! a cut inside a cluster only adds Dirichlet points, so partitions may be
//! taken rigid, with the blocks at a vertex in distinct clusters.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use crate::graph::{End, EndpointRef, MetricGraph, Refinement, UnionFind};
use crate::partitions::{set_partitions, Partition, PartitionError, FULL_GROUPING_DEGREE};
use crate::spectral::EdgeList;

use super::{partition_energy, EnergyEstimate, EnergyKind, OptimizeError, MAX_EDGES, MAX_K, MAX_MESH};

/// Structures within this relative margin of the best mesh value are refined.
const KEEP: f64 = 0.05;
/// At most this many structures are refined.
const REFINE_COUNT: usize = 8;
const SWEEPS: usize = 50;
const POSITION_TOL: f64 = 1e-7;
/// Relative bracket of the eigenvalue bisection during the mesh stage.
const MESH_TOL: f64 = 1e-8;
/// Symmetries used to skip equivalent structures.
const SYMMETRY_LIMIT: usize = 256;
/// Shortest piece allowed during refinement, relative to the edge length.
const MIN_PIECE: f64 = 1e-6;

/// Default cap on the number of (structure, placement) pairs.
pub const DEFAULT_MAX_CANDIDATES: u128 = 1_000_000_000_000;

#[derive(Clone, Debug)]
pub struct SearchOptions {
    /// Cut points lie on `{i·|e|/mesh}` before refinement.
    pub mesh: usize,
    pub refine: bool,
    /// Only rigid partitions (always the case for the Dirichlet energy).
    pub rigid_only: bool,
    pub max_candidates: u128,
    /// Lift the limits on edges, k and mesh.
    pub allow_large: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            mesh: 8,
            refine: true,
            rigid_only: false,
            max_candidates: DEFAULT_MAX_CANDIDATES,
            allow_large: false,
        }
    }
}

struct Component {
    blocks: Vec<usize>,
    uncut: Vec<usize>,
    /// `(position in cut_edges, end)` of each pendant piece.
    pendants: Vec<(usize, End)>,
    /// Last position in `cut_edges` the component depends on.
    ready: Option<usize>,
}

struct Template {
    list: EdgeList,
    /// Position of the first pendant in `list.edges`.
    first: usize,
    /// Which eigenvalue is the energy.
    index: usize,
}

impl Template {
    fn set(&mut self, lengths: &[f64]) {
        for (e, &l) in self.list.edges[self.first..].iter_mut().zip(lengths) {
            e.2 = l;
        }
    }
}

struct Layout {
    description: Vec<u16>,
    rank: usize,
    /// Cut points per edge index.
    cuts: Vec<usize>,
    blocks: Vec<Vec<EndpointRef>>,
    /// Block of each block's vertex having at least two blocks.
    split: Vec<bool>,
    comps: Vec<Component>,
    cut_edges: Vec<usize>,
}

struct Enumerator<'a> {
    g: &'a MetricGraph,
    k: usize,
    kind: EnergyKind,
    rigid: bool,
    tree_only: bool,
    lo: usize,
    hi: usize,
    cmax: usize,
    options: Vec<Vec<Vec<Vec<EndpointRef>>>>,
    choice: Vec<usize>,
    cuts: Vec<usize>,
    symmetries: Vec<Symmetry>,
    out: Vec<Layout>,
}

/// A graph symmetry acting on structures.
struct Symmetry {
    vertex: Vec<usize>,
    edge: Vec<usize>,
    /// Image of each grouping option, per vertex.
    option: Vec<Vec<usize>>,
}

fn symmetries(g: &MetricGraph, options: &[Vec<Vec<Vec<EndpointRef>>>]) -> Vec<Symmetry> {
    let canonical = |o: &[Vec<EndpointRef>]| {
        let mut o: Vec<Vec<EndpointRef>> = o.iter().map(|b| {
            let mut b = b.clone();
            b.sort();
            b
        }).collect();
        o.sort();
        o
    };
    let index: Vec<HashMap<Vec<Vec<EndpointRef>>, usize>> =
        options.iter().map(|os| os.iter().enumerate().map(|(i, o)| (canonical(o), i)).collect()).collect();
    g.automorphisms(SYMMETRY_LIMIT)
        .into_iter()
        .skip(1)
        .map(|image| {
            let map = |p: EndpointRef| {
                let (j, flip) = image[g.edge_index(p.edge).unwrap()];
                EndpointRef { edge: g.edges()[j].id, end: if flip { p.end.opposite() } else { p.end } }
            };
            let vertex: Vec<usize> = g.vertices().iter().map(|b| g.vertex_of(map(b[0]))).collect();
            let option = options
                .iter()
                .enumerate()
                .map(|(v, os)| {
                    os.iter()
                        .map(|o| {
                            let mapped: Vec<Vec<EndpointRef>> = o.iter().map(|b| b.iter().map(|&p| map(p)).collect()).collect();
                            index[vertex[v]][&canonical(&mapped)]
                        })
                        .collect()
                })
                .collect();
            Symmetry { vertex, edge: image.iter().map(|x| x.0).collect(), option }
        })
        .collect()
}

impl Enumerator<'_> {
    fn vertex(&mut self, v: usize, rank: usize) {
        if v == self.options.len() {
            self.edge(0, rank);
            return;
        }
        for o in 0..self.options[v].len() {
            let r = rank + self.options[v][o].len() - 1;
            if r <= self.hi {
                self.choice[v] = o;
                self.vertex(v + 1, r);
            }
        }
    }

    fn edge(&mut self, i: usize, rank: usize) {
        if i == self.cuts.len() {
            if rank >= self.lo && self.canonical() {
                if let Some(l) = self.leaf(rank) {
                    self.out.push(l);
                }
            }
            return;
        }
        for c in 0..=self.cmax.min(self.hi - rank) {
            self.cuts[i] = c;
            self.edge(i + 1, rank + c);
        }
        self.cuts[i] = 0;
    }

    /// Whether no symmetry maps the current structure to a smaller description.
    fn canonical(&self) -> bool {
        let nv = self.choice.len();
        let mut image = vec![0usize; nv + self.cuts.len()];
        for s in &self.symmetries {
            for (v, &o) in self.choice.iter().enumerate() {
                image[s.vertex[v]] = s.option[v][o];
            }
            for (e, &c) in self.cuts.iter().enumerate() {
                image[nv + s.edge[e]] = c;
            }
            if image.iter().copied().lt(self.choice.iter().chain(&self.cuts).copied()) {
                return false;
            }
        }
        true
    }

    fn leaf(&self, rank: usize) -> Option<Layout> {
        let g = self.g;
        let mut blocks = Vec::new();
        let mut block_vertex = Vec::new();
        let mut at: BTreeMap<EndpointRef, usize> = BTreeMap::new();
        for (v, &o) in self.choice.iter().enumerate() {
            for b in &self.options[v][o] {
                for &p in b {
                    at.insert(p, blocks.len());
                }
                blocks.push(b.clone());
                block_vertex.push(v);
            }
        }
        let ends: Vec<[usize; 2]> = g
            .edges()
            .iter()
            .map(|e| [at[&EndpointRef::source(e.id)], at[&EndpointRef::target(e.id)]])
            .collect();
        let mut uf = UnionFind::new(blocks.len());
        for (i, e) in ends.iter().enumerate() {
            if self.cuts[i] == 0 {
                uf.union(e[0], e[1]);
            }
        }
        let mut label = vec![usize::MAX; blocks.len()];
        let mut roots: Vec<usize> = Vec::new();
        for b in 0..blocks.len() {
            let r = uf.find(b);
            label[b] = match roots.iter().position(|&x| x == r) {
                Some(c) => c,
                None => {
                    roots.push(r);
                    roots.len() - 1
                }
            };
        }
        let n = roots.len();
        let middles: usize = self.cuts.iter().map(|&c| c.saturating_sub(1)).sum();
        if n + middles != self.k {
            return None;
        }
        let mut comps: Vec<Component> =
            (0..n).map(|_| Component { blocks: Vec::new(), uncut: Vec::new(), pendants: Vec::new(), ready: None }).collect();
        for (b, &c) in label.iter().enumerate() {
            comps[c].blocks.push(b);
        }
        let cut_edges: Vec<usize> = (0..self.cuts.len()).filter(|&i| self.cuts[i] > 0).collect();
        for (i, e) in ends.iter().enumerate() {
            if self.cuts[i] == 0 {
                comps[label[e[0]]].uncut.push(i);
            }
        }
        for (j, &i) in cut_edges.iter().enumerate() {
            for (end, b) in [(End::Source, ends[i][0]), (End::Target, ends[i][1])] {
                let c = &mut comps[label[b]];
                c.pendants.push((j, end));
                c.ready = Some(j);
            }
        }
        if self.tree_only && comps.iter().any(|c| c.uncut.len() + 1 != c.blocks.len()) {
            return None;
        }
        let mut per_vertex: Vec<Vec<usize>> = vec![Vec::new(); g.vertex_count()];
        for (b, &v) in block_vertex.iter().enumerate() {
            per_vertex[v].push(label[b]);
        }
        if self.rigid {
            for labels in per_vertex.iter().filter(|l| l.len() > 1) {
                let mut distinct = labels.clone();
                distinct.sort();
                distinct.dedup();
                let ok = match self.kind {
                    EnergyKind::Dirichlet => distinct.len() == labels.len(),
                    EnergyKind::Natural => distinct.len() > 1,
                };
                if !ok {
                    return None;
                }
            }
            if cut_edges.iter().any(|&i| self.cuts[i] == 1 && label[ends[i][0]] == label[ends[i][1]]) {
                return None;
            }
        }
        let split = block_vertex.iter().map(|&v| per_vertex[v].len() > 1).collect();
        let mut description: Vec<u16> = self.choice.iter().map(|&c| c as u16).collect();
        description.extend(self.cuts.iter().map(|&c| c as u16));
        Some(Layout { description, rank, cuts: self.cuts.clone(), blocks, split, comps, cut_edges })
    }
}

fn structures(g: &MetricGraph, k: usize, kind: EnergyKind, rigid_only: bool, mesh: usize) -> Vec<Layout> {
    let rigid = rigid_only || kind == EnergyKind::Dirichlet;
    let tree_only = !rigid;
    // a single cluster may still be cut open along a cycle to gain a boundary
    let rigid_filter = rigid && !(kind == EnergyKind::Dirichlet && k == 1);
    let hi = k - 1 + g.betti();
    let options: Vec<Vec<Vec<Vec<EndpointRef>>>> = g
        .vertices()
        .iter()
        .map(|block| {
            let limit = if block.len() > FULL_GROUPING_DEGREE { 2 } else { block.len() };
            set_partitions(block, limit).into_iter().filter(|o| o.len() - 1 <= hi).collect()
        })
        .collect();
    let symmetries = symmetries(g, &options);
    let mut e = Enumerator {
        g,
        k,
        kind,
        rigid: rigid_filter,
        tree_only,
        lo: if tree_only { hi } else { k - 1 },
        hi,
        cmax: mesh.saturating_sub(1).min(k),
        options,
        choice: vec![0; g.vertex_count()],
        cuts: vec![0; g.edge_count()],
        symmetries,
        out: Vec::new(),
    };
    e.vertex(0, 0);
    e.out
}

/// Mesh placements `(first, last)` of `c` cuts on an edge, nearest to equal spacing first.
fn placements(c: usize, mesh: usize) -> Vec<(u16, u16)> {
    let mut out: Vec<(u16, u16)> = Vec::new();
    if c == 1 {
        out.extend((1..mesh).map(|t| (t as u16, t as u16)));
    } else {
        for f in 1..mesh {
            for l in f + c - 1..mesh {
                out.push((f as u16, l as u16));
            }
        }
    }
    let step = mesh as f64 / (c + 1) as f64;
    let key = |&(f, l): &(u16, u16)| (f as f64 - step).abs() + (l as f64 - c as f64 * step).abs();
    out.sort_by(|a, b| key(a).total_cmp(&key(b)).then(a.cmp(b)));
    out
}

fn interval_energy(len: f64) -> f64 {
    PI * PI / (len * len)
}

impl Layout {
    /// Energy of component `c` with the given pendant lengths.
    fn energy(&self, g: &MetricGraph, kind: EnergyKind, c: usize, lengths: &[f64], rel: f64) -> f64 {
        let mut t = self.template(g, kind, c);
        t.set(lengths);
        t.list.nth_below(t.index, f64::INFINITY, rel).expect("no cap")
    }

    /// Component `c` as an edge list whose last edges are its pendants.
    fn template(&self, g: &MetricGraph, kind: EnergyKind, c: usize) -> Template {
        let comp = &self.comps[c];
        let block_of = |p: EndpointRef| comp.blocks.iter().position(|&b| self.blocks[b].contains(&p)).unwrap();
        let mut edges: Vec<(usize, usize, f64)> = comp
            .uncut
            .iter()
            .map(|&i| {
                let e = &g.edges()[i];
                (block_of(EndpointRef::source(e.id)), block_of(EndpointRef::target(e.id)), e.length)
            })
            .collect();
        let first = edges.len();
        let mut dirichlet: Vec<bool> = match kind {
            EnergyKind::Dirichlet => comp.blocks.iter().map(|&b| self.split[b]).collect(),
            EnergyKind::Natural => vec![false; comp.blocks.len()],
        };
        for &(j, end) in &comp.pendants {
            let id = g.edges()[self.cut_edges[j]].id;
            edges.push((block_of(EndpointRef { edge: id, end }), dirichlet.len(), 0.0));
            dirichlet.push(kind == EnergyKind::Dirichlet);
        }
        let (index, zero_multiplicity) = match kind {
            EnergyKind::Dirichlet if dirichlet.contains(&true) => (1, 0),
            _ => (2, 1),
        };
        Template { list: EdgeList { dirichlet, edges, zero_multiplicity }, first, index }
    }

    fn pendant_length(&self, g: &MetricGraph, j: usize, end: End, pos: (f64, f64)) -> f64 {
        match end {
            End::Source => pos.0,
            End::Target => g.edges()[self.cut_edges[j]].length - pos.1,
        }
    }

    fn middle_energy(&self, j: usize, pos: (f64, f64)) -> f64 {
        let c = self.cuts[self.cut_edges[j]];
        if c < 2 {
            0.0
        } else {
            interval_energy((pos.1 - pos.0) / (c - 1) as f64)
        }
    }

    /// Lower bound over all placements: every pendant as long as the mesh allows.
    fn floor(&self, g: &MetricGraph, kind: EnergyKind, mesh: usize) -> f64 {
        let mut v: f64 = 0.0;
        for &i in &self.cut_edges {
            let c = self.cuts[i];
            if c >= 2 {
                let span = g.edges()[i].length * (mesh - 2) as f64 / mesh as f64;
                v = v.max(interval_energy(span / (c - 1) as f64));
            }
        }
        for c in 0..self.comps.len() {
            let lengths: Vec<f64> = self.comps[c]
                .pendants
                .iter()
                .map(|&(j, _)| {
                    let i = self.cut_edges[j];
                    g.edges()[i].length * (mesh - self.cuts[i]) as f64 / mesh as f64
                })
                .collect();
            v = v.max(self.energy(g, kind, c, &lengths, MESH_TOL));
        }
        v
    }

    fn candidates(&self, mesh: usize) -> u128 {
        self.cut_edges.iter().fold(1u128, |acc, &i| acc.saturating_mul(placements(self.cuts[i], mesh).len() as u128))
    }
}

struct Dfs<'a> {
    g: &'a MetricGraph,
    layout: &'a Layout,
    mesh: usize,
    options: Vec<Vec<(u16, u16)>>,
    ready_at: Vec<Vec<usize>>,
    /// Components with a pendant on this cut edge that complete later.
    touched_at: Vec<Vec<usize>>,
    /// Component energies, or lower bounds where the evaluation stopped early.
    cache: HashMap<(usize, Vec<u16>), Result<f64, f64>>,
    templates: Vec<Template>,
    current: Vec<(u16, u16)>,
    best: Option<(f64, Vec<(u16, u16)>)>,
    incumbent: &'a AtomicU64,
}

impl Dfs<'_> {
    fn pruned(&self, value: f64) -> bool {
        value >= self.cap()
    }

    /// Values from here up cannot improve this structure or come within `KEEP` of the best one.
    fn cap(&self) -> f64 {
        let inc = f64::from_bits(self.incumbent.load(Ordering::Relaxed)) * (1.0 + KEEP);
        let inc = if inc.is_finite() { inc.next_up() } else { inc };
        self.best.as_ref().map_or(inc, |b| b.0.min(inc))
    }

    fn position(&self, j: usize) -> (f64, f64) {
        let h = self.g.edges()[self.layout.cut_edges[j]].length / self.mesh as f64;
        let (f, l) = self.current[j];
        (f as f64 * h, l as f64 * h)
    }

    fn component(&mut self, c: usize) -> f64 {
        let comp = &self.layout.comps[c];
        let key: Vec<u16> = comp
            .pendants
            .iter()
            .map(|&(j, end)| if end == End::Source { self.current[j].0 } else { self.current[j].1 })
            .collect();
        let cap = self.cap();
        match self.cache.get(&(c, key.clone())) {
            Some(&Ok(v)) => return v,
            Some(&Err(bound)) if bound >= cap => return f64::INFINITY,
            _ => {}
        }
        let lengths: Vec<f64> =
            comp.pendants.iter().map(|&(j, end)| self.layout.pendant_length(self.g, j, end, self.position(j))).collect();
        let t = &mut self.templates[c];
        t.set(&lengths);
        match t.list.nth_below(t.index, cap, MESH_TOL) {
            Some(v) => {
                self.cache.insert((c, key), Ok(v));
                v
            }
            None => {
                self.cache.insert((c, key), Err(cap));
                f64::INFINITY
            }
        }
    }

    /// Whether component `c` must reach `cap` once the cut edges from `placed` on are set.
    fn bound_exceeds(&mut self, c: usize, placed: usize, cap: f64) -> bool {
        let lengths: Vec<f64> = self.layout.comps[c]
            .pendants
            .iter()
            .map(|&(j, end)| {
                if j < placed {
                    self.layout.pendant_length(self.g, j, end, self.position(j))
                } else {
                    let i = self.layout.cut_edges[j];
                    let len = self.g.edges()[i].length;
                    len * (self.mesh - self.layout.cuts[i]) as f64 / self.mesh as f64
                }
            })
            .collect();
        let t = &mut self.templates[c];
        t.set(&lengths);
        cap.is_finite() && t.index > t.list.zero_multiplicity && t.list.count_below(cap) < t.index
    }

    fn run(&mut self, depth: usize, partial: f64) {
        if depth == self.options.len() {
            if self.best.as_ref().is_none_or(|b| partial < b.0) {
                self.best = Some((partial, self.current.clone()));
                self.incumbent.fetch_min(partial.to_bits(), Ordering::Relaxed);
            }
            return;
        }
        for o in 0..self.options[depth].len() {
            self.current[depth] = self.options[depth][o];
            // middle pieces on the mesh: the shortest of a near-equal split
            let c = self.layout.cuts[self.layout.cut_edges[depth]];
            let mut value = partial;
            if c >= 2 {
                let (f, l) = self.current[depth];
                let h = self.g.edges()[self.layout.cut_edges[depth]].length / self.mesh as f64;
                let q = (l - f) as usize / (c - 1);
                value = value.max(interval_energy(q as f64 * h));
            }
            if self.pruned(value) {
                continue;
            }
            let mut ok = true;
            for idx in 0..self.ready_at[depth].len() {
                let comp = self.ready_at[depth][idx];
                value = value.max(self.component(comp));
                if self.pruned(value) {
                    ok = false;
                    break;
                }
            }
            // longer pendants only lower the energy, so the longest ones still to come give a bound
            if ok {
                let cap = self.cap();
                for idx in 0..self.touched_at[depth].len() {
                    let comp = self.touched_at[depth][idx];
                    if self.bound_exceeds(comp, depth + 1, cap) {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                self.run(depth + 1, value);
            }
        }
    }
}

fn search_structure(
    g: &MetricGraph,
    layout: &Layout,
    kind: EnergyKind,
    mesh: usize,
    incumbent: &AtomicU64,
) -> Option<(f64, Vec<(u16, u16)>)> {
    let n = layout.cut_edges.len();
    let mut ready_at = vec![Vec::new(); n];
    let mut touched_at: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut fixed = Vec::new();
    for (c, comp) in layout.comps.iter().enumerate() {
        match comp.ready {
            Some(j) => ready_at[j].push(c),
            None => fixed.push(c),
        }
        for &(j, _) in &comp.pendants {
            if Some(j) != comp.ready && !touched_at[j].contains(&c) {
                touched_at[j].push(c);
            }
        }
    }
    let mut dfs = Dfs {
        g,
        layout,
        mesh,
        options: layout.cut_edges.iter().map(|&i| placements(layout.cuts[i], mesh)).collect(),
        ready_at,
        touched_at,
        cache: HashMap::new(),
        templates: (0..layout.comps.len()).map(|c| layout.template(g, kind, c)).collect(),
        current: vec![(0, 0); n],
        best: None,
        incumbent,
    };
    let mut start: f64 = 0.0;
    for c in fixed {
        start = start.max(dfs.component(c));
        if dfs.pruned(start) {
            return None;
        }
    }
    let cap = dfs.cap();
    if (0..layout.comps.len()).any(|c| layout.comps[c].ready.is_some() && dfs.bound_exceeds(c, 0, cap)) {
        return None;
    }
    dfs.run(0, start);
    dfs.best
}

/// A key on which near-equal energies compare equal.
fn quantized(v: f64) -> i64 {
    if v <= 0.0 {
        i64::MIN
    } else {
        (v.ln() * 1e6).round() as i64
    }
}

fn golden(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > POSITION_TOL {
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
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Coordinate {
    Single,
    First,
    Last,
}

/// Coordinate-wise golden-section descent on the cut positions.
fn refine(g: &MetricGraph, layout: &Layout, kind: EnergyKind, mesh: usize, start: &[(u16, u16)]) -> (f64, Vec<(f64, f64)>) {
    let mut pos: Vec<(f64, f64)> = layout
        .cut_edges
        .iter()
        .zip(start)
        .map(|(&i, &(f, l))| {
            let h = g.edges()[i].length / mesh as f64;
            (f as f64 * h, l as f64 * h)
        })
        .collect();
    let lengths = |c: usize, pos: &[(f64, f64)]| -> Vec<f64> {
        layout.comps[c].pendants.iter().map(|&(j, end)| layout.pendant_length(g, j, end, pos[j])).collect()
    };
    let mut comp_values: Vec<f64> = (0..layout.comps.len()).map(|c| layout.energy(g, kind, c, &lengths(c, &pos), 0.0)).collect();
    let mut coords = Vec::new();
    for (j, &i) in layout.cut_edges.iter().enumerate() {
        if layout.cuts[i] == 1 {
            coords.push((j, Coordinate::Single));
        } else {
            coords.push((j, Coordinate::First));
            coords.push((j, Coordinate::Last));
        }
    }
    for _ in 0..SWEEPS {
        let mut moved: f64 = 0.0;
        for &(j, which) in &coords {
            let i = layout.cut_edges[j];
            let len = g.edges()[i].length;
            let h = len / mesh as f64;
            let c = layout.cuts[i];
            let gap = MIN_PIECE * len;
            let (x0, lo, hi) = match which {
                Coordinate::Single => (pos[j].0, gap, len - gap),
                Coordinate::First => (pos[j].0, gap, pos[j].1 - gap * (c - 1) as f64),
                Coordinate::Last => (pos[j].1, pos[j].0 + gap * (c - 1) as f64, len - gap),
            };
            let affected: Vec<usize> = (0..layout.comps.len())
                .filter(|&cc| {
                    layout.comps[cc].pendants.iter().any(|&(jj, end)| {
                        jj == j
                            && match which {
                                Coordinate::Single => true,
                                Coordinate::First => end == End::Source,
                                Coordinate::Last => end == End::Target,
                            }
                    })
                })
                .collect();
            let place = |x: f64| -> (f64, f64) {
                match which {
                    Coordinate::Single => (x, x),
                    Coordinate::First => (x, pos[j].1),
                    Coordinate::Last => (pos[j].0, x),
                }
            };
            let local = |x: f64| -> f64 {
                let mut trial = pos.clone();
                trial[j] = place(x);
                let mut v = layout.middle_energy(j, trial[j]);
                for &cc in &affected {
                    v = v.max(layout.energy(g, kind, cc, &lengths(cc, &trial), 0.0));
                }
                v
            };
            let a = (x0 - h).max(lo);
            let b = (x0 + h).min(hi);
            if b - a <= POSITION_TOL {
                continue;
            }
            let now = local(x0);
            let (x, v) = golden(&local, a, b);
            if v < now * (1.0 - 1e-12) {
                moved = moved.max((x - x0).abs());
                pos[j] = place(x);
                for &cc in &affected {
                    comp_values[cc] = layout.energy(g, kind, cc, &lengths(cc, &pos), 0.0);
                }
            }
        }
        if moved < POSITION_TOL {
            break;
        }
    }
    let middle = (0..pos.len()).map(|j| layout.middle_energy(j, pos[j])).fold(0.0, f64::max);
    (comp_values.iter().copied().fold(middle, f64::max), pos)
}

fn mesh_positions(g: &MetricGraph, layout: &Layout, mesh: usize, placement: &[(u16, u16)]) -> Vec<f64> {
    let mut out = Vec::new();
    for (&i, &(f, l)) in layout.cut_edges.iter().zip(placement) {
        let c = layout.cuts[i];
        let h = g.edges()[i].length / mesh as f64;
        // distribute the gap as evenly as the mesh allows
        let gap = (l - f) as usize;
        let mut t = f as usize;
        out.push(t as f64 * h);
        for s in 0..c.saturating_sub(1) {
            t += gap / (c - 1) + usize::from(s < gap % (c - 1));
            out.push(t as f64 * h);
        }
    }
    out
}

fn continuous_positions(layout: &Layout, pos: &[(f64, f64)]) -> Vec<f64> {
    let mut out = Vec::new();
    for (&i, &(f, l)) in layout.cut_edges.iter().zip(pos) {
        let c = layout.cuts[i];
        out.push(f);
        for s in 1..c {
            out.push(f + (l - f) * s as f64 / (c - 1) as f64);
        }
    }
    out
}

fn witness(g: &MetricGraph, layout: &Layout, xs: &[f64]) -> Result<Partition, OptimizeError> {
    let mut points = Vec::with_capacity(xs.len());
    let mut it = xs.iter();
    for &i in &layout.cut_edges {
        for _ in 0..layout.cuts[i] {
            points.push((g.edges()[i].id, *it.next().unwrap()));
        }
    }
    let (host, refinement) =
        if points.is_empty() { (g.clone(), Refinement::default()) } else { g.subdivide_many(&points)? };
    let mut blocks: Vec<Vec<EndpointRef>> =
        layout.blocks.iter().map(|b| b.iter().map(|&p| refinement.lift(p)).collect()).collect();
    for w in g.vertex_count()..host.vertex_count() {
        blocks.extend(host.vertices()[w].iter().map(|&p| vec![p]));
    }
    let cut = MetricGraph::from_parts(host.edges().to_vec(), blocks)?;
    Ok(Partition::exhaustive_from_cut(&host, &cut)?)
}

/// Upper estimate of the optimal `k`-partition energy of `g`: the best exhaustive
/// partition with cuts on the mesh, then locally improved if `refine` is set.
pub fn minimize_energy(
    g: &MetricGraph,
    k: usize,
    kind: EnergyKind,
    opts: &SearchOptions,
) -> Result<EnergyEstimate, OptimizeError> {
    if !g.is_connected() {
        return Err(OptimizeError::Disconnected);
    }
    if k == 0 {
        return Err(OptimizeError::InvalidK { k, min: 1 });
    }
    if opts.mesh == 0 {
        return Err(OptimizeError::LimitExceeded { what: "1/mesh", value: 1, limit: 0 });
    }
    if !opts.allow_large {
        for (what, value, limit) in
            [("edges", g.edge_count(), MAX_EDGES), ("k", k, MAX_K), ("mesh", opts.mesh, MAX_MESH)]
        {
            if value > limit {
                return Err(OptimizeError::LimitExceeded { what, value, limit });
            }
        }
    }
    let max = g.edge_count() * opts.mesh;
    if k > max {
        return Err(PartitionError::InfeasibleK { k, max }.into());
    }
    let layouts = structures(g, k, kind, opts.rigid_only, opts.mesh);
    if layouts.is_empty() {
        return Err(PartitionError::InfeasibleK { k, max }.into());
    }
    let candidates = layouts.iter().fold(0u128, |acc, l| acc.saturating_add(l.candidates(opts.mesh)));
    if candidates > opts.max_candidates {
        return Err(PartitionError::SearchSpaceTooLarge { count: candidates, cap: opts.max_candidates }.into());
    }
    let incumbent = AtomicU64::new(f64::INFINITY.to_bits());
    let floors: Vec<f64> = layouts.iter().map(|l| l.floor(g, kind, opts.mesh)).collect();
    // lowest floors first so the cap tightens early
    let mut order: Vec<usize> = (0..layouts.len()).collect();
    order.sort_by(|&a, &b| floors[a].total_cmp(&floors[b]));
    let mut found: Vec<Option<(f64, Vec<(u16, u16)>)>> = vec![None; layouts.len()];
    for &s in &order {
        let cap = f64::from_bits(incumbent.load(Ordering::Relaxed)) * (1.0 + KEEP);
        if floors[s] >= cap.next_up() {
            break;
        }
        found[s] = search_structure(g, &layouts[s], kind, opts.mesh, &incumbent);
    }
    let best = found.iter().flatten().map(|f| f.0).fold(f64::INFINITY, f64::min);
    let mut kept: Vec<(usize, f64, &Vec<(u16, u16)>)> = found
        .iter()
        .enumerate()
        .filter_map(|(s, f)| f.as_ref().map(|f| (s, f.0, &f.1)))
        .filter(|&(_, v, _)| v <= best * (1.0 + KEEP))
        .collect();
    let order = |a: &(usize, f64), b: &(usize, f64)| {
        (quantized(a.1), layouts[a.0].rank, &layouts[a.0].description).cmp(&(
            quantized(b.1),
            layouts[b.0].rank,
            &layouts[b.0].description,
        ))
    };
    kept.sort_by(|a, b| order(&(a.0, a.1), &(b.0, b.1)));
    kept.truncate(REFINE_COUNT);
    let refined: Vec<(usize, f64, Vec<f64>)> = kept
        .par_iter()
        .map(|&(s, v, placement)| {
            let layout = &layouts[s];
            if opts.refine && !layout.cut_edges.is_empty() {
                let (rv, pos) = refine(g, layout, kind, opts.mesh, placement);
                if rv < v {
                    return (s, rv, continuous_positions(layout, &pos));
                }
            }
            (s, v, mesh_positions(g, layout, opts.mesh, placement))
        })
        .collect();
    let (s, _, xs) = refined
        .into_iter()
        .min_by(|a, b| order(&(a.0, a.1), &(b.0, b.1)))
        .expect("at least one structure survives");
    let witness = witness(g, &layouts[s], &xs)?;
    debug_assert_eq!(witness.k(), k);
    let value = partition_energy(&witness, kind);
    Ok(EnergyEstimate {
        kind,
        k,
        value,
        witness,
        mesh: opts.mesh,
        refined: opts.refine,
        rigid_restricted: opts.rigid_only || kind == EnergyKind::Dirichlet,
        mesh_value: best,
        candidates,
        structures: layouts.len(),
    })
}
