//! Graphs with an involution on directed edges.
//!
//! Every undirected edge is an orbit of the involution `iota`. A fixed point of
//! `iota` is a half-loop; a two-element orbit with equal endpoints is a
//! whole-loop. Multi-edges and loops are kept as given.

use std::collections::VecDeque;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_rational::Rational64;
use rand::Rng;

use crate::error::{Error, Result};

pub const DEFAULT_ISO_CAP: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DiGraph {
    pub vertex_count: usize,
    pub dir_edges: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    nv: usize,
    tail: Vec<usize>,
    head: Vec<usize>,
    iota: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphStats {
    /// Number of iota-orbits minus number of vertices.
    pub order: i64,
    /// `#V - #E_dir / 2`, a half-integer when half-loops are present.
    pub euler_char: Rational64,
    pub half_loop_count: usize,
    pub non_half_edge_count: usize,
    pub degree_sequence: Vec<usize>,
}

impl Graph {
    pub fn new(nv: usize, tail: Vec<usize>, head: Vec<usize>, iota: Vec<usize>) -> Result<Self> {
        let m = tail.len();
        if head.len() != m || iota.len() != m {
            return Err(Error::InvalidGraph("edge arrays differ in length".into()));
        }
        for e in 0..m {
            if tail[e] >= nv || head[e] >= nv {
                return Err(Error::InvalidGraph(format!("edge {e} has an endpoint out of range")));
            }
            let f = iota[e];
            if f >= m {
                return Err(Error::InvalidGraph(format!("iota({e}) = {f} is out of range")));
            }
            if iota[f] != e {
                return Err(Error::InvalidGraph(format!("iota is not an involution at {e}")));
            }
            if tail[f] != head[e] {
                return Err(Error::InvalidGraph(format!("tail(iota({e})) != head({e})")));
            }
        }
        Ok(Graph { nv, tail, head, iota })
    }

    pub fn from_digraph(d: &DiGraph, iota: Vec<usize>) -> Result<Self> {
        let (tail, head) = d.dir_edges.iter().copied().unzip();
        Graph::new(d.vertex_count, tail, head, iota)
    }

    pub fn digraph(&self) -> DiGraph {
        DiGraph {
            vertex_count: self.nv,
            dir_edges: self.tail.iter().copied().zip(self.head.iter().copied()).collect(),
        }
    }

    pub fn empty() -> Self {
        Graph { nv: 0, tail: vec![], head: vec![], iota: vec![] }
    }

    pub fn num_vertices(&self) -> usize {
        self.nv
    }

    pub fn num_dir_edges(&self) -> usize {
        self.tail.len()
    }

    /// Number of iota-orbits.
    pub fn num_edges(&self) -> usize {
        (0..self.num_dir_edges()).filter(|&e| e <= self.iota[e]).count()
    }

    #[inline]
    pub fn tail(&self, e: usize) -> usize {
        self.tail[e]
    }

    #[inline]
    pub fn head(&self, e: usize) -> usize {
        self.head[e]
    }

    #[inline]
    pub fn iota(&self, e: usize) -> usize {
        self.iota[e]
    }

    pub fn is_half_loop(&self, e: usize) -> bool {
        self.iota[e] == e
    }

    pub fn is_whole_loop(&self, e: usize) -> bool {
        self.iota[e] != e && self.tail[e] == self.head[e]
    }

    pub fn has_half_loops(&self) -> bool {
        (0..self.num_dir_edges()).any(|e| self.is_half_loop(e))
    }

    /// One representative per iota-orbit (the smaller id).
    pub fn orientation(&self) -> Vec<usize> {
        (0..self.num_dir_edges()).filter(|&e| e <= self.iota[e]).collect()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.tail.iter().filter(|&&t| t == v).count()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.nv];
        for &t in &self.tail {
            d[t] += 1;
        }
        d
    }

    /// Directed edges leaving each vertex, in edge-id order.
    pub fn out_edges(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.nv];
        for (e, &t) in self.tail.iter().enumerate() {
            out[t].push(e);
        }
        out
    }

    pub fn is_regular(&self) -> Option<usize> {
        let d = self.degrees();
        match d.first() {
            Some(&d0) if d.iter().all(|&x| x == d0) => Some(d0),
            _ => None,
        }
    }

    pub fn is_connected(&self) -> bool {
        if self.nv == 0 {
            return true;
        }
        self.components().iter().all(|&c| c == 0)
    }

    /// Component label of each vertex, labels in order of first vertex.
    pub fn components(&self) -> Vec<usize> {
        let out = self.out_edges();
        let mut comp = vec![usize::MAX; self.nv];
        let mut next = 0;
        for s in 0..self.nv {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = next;
            let mut q = VecDeque::from([s]);
            while let Some(v) = q.pop_front() {
                for &e in &out[v] {
                    let w = self.head[e];
                    if comp[w] == usize::MAX {
                        comp[w] = next;
                        q.push_back(w);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    /// Subgraph on the kept vertices and kept directed edges, relabelled in
    /// increasing order. Kept edges must be closed under iota and have kept
    /// endpoints. Returns the graph with the old ids of its vertices and edges.
    pub fn subgraph(&self, keep_v: &[bool], keep_e: &[bool]) -> Result<(Graph, Vec<usize>, Vec<usize>)> {
        let mut vnew = vec![usize::MAX; self.nv];
        let mut vold = Vec::new();
        for v in 0..self.nv {
            if keep_v[v] {
                vnew[v] = vold.len();
                vold.push(v);
            }
        }
        let mut enew = vec![usize::MAX; self.num_dir_edges()];
        let mut eold = Vec::new();
        for e in 0..self.num_dir_edges() {
            if keep_e[e] {
                if !keep_e[self.iota[e]] || !keep_v[self.tail[e]] || !keep_v[self.head[e]] {
                    return Err(Error::InvalidGraph(format!("edge {e} cannot be kept")));
                }
                enew[e] = eold.len();
                eold.push(e);
            }
        }
        let tail = eold.iter().map(|&e| vnew[self.tail[e]]).collect();
        let head = eold.iter().map(|&e| vnew[self.head[e]]).collect();
        let iota = eold.iter().map(|&e| enew[self.iota[e]]).collect();
        Ok((Graph::new(vold.len(), tail, head, iota)?, vold, eold))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "graph {} {}", self.nv, self.num_dir_edges());
        for e in 0..self.num_dir_edges() {
            let _ = writeln!(s, "e {} {} {}", self.tail[e], self.head[e], self.iota[e]);
        }
        s
    }

    /// Parses the line format written by [`Graph::to_text`]. Blank lines and
    /// lines starting with `#` are skipped.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (ln, header) = lines.next().ok_or(Error::Parse { line: 0, msg: "empty input".into() })?;
        let toks: Vec<&str> = header.split_whitespace().collect();
        if toks.len() != 3 || toks[0] != "graph" {
            return Err(Error::Parse { line: ln, msg: "expected `graph <nV> <nDirE>`".into() });
        }
        let nv = parse_num(toks[1], ln)?;
        let m = parse_num(toks[2], ln)?;
        let (mut tail, mut head, mut iota) = (Vec::with_capacity(m), Vec::with_capacity(m), Vec::with_capacity(m));
        for (ln, l) in lines {
            let toks: Vec<&str> = l.split_whitespace().collect();
            if toks.len() != 4 || toks[0] != "e" {
                return Err(Error::Parse { line: ln, msg: "expected `e <tail> <head> <iota>`".into() });
            }
            let (t, h, i) = (parse_num(toks[1], ln)?, parse_num(toks[2], ln)?, parse_num(toks[3], ln)?);
            if t >= nv || h >= nv {
                return Err(Error::Parse { line: ln, msg: format!("vertex out of range (nV = {nv})") });
            }
            if i >= m {
                return Err(Error::Parse { line: ln, msg: format!("iota out of range (nDirE = {m})") });
            }
            tail.push(t);
            head.push(h);
            iota.push(i);
        }
        if tail.len() != m {
            return Err(Error::Parse {
                line: 0,
                msg: format!("header announces {m} edges, found {}", tail.len()),
            });
        }
        Graph::new(nv, tail, head, iota).map_err(|e| Error::Parse { line: 0, msg: e.to_string() })
    }

    /// Short stable fingerprint of the text form (FNV-1a).
    pub fn hash_hex(&self) -> String {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in self.to_text().bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        format!("{h:016x}")
    }
}

fn parse_num(tok: &str, line: usize) -> Result<usize> {
    tok.parse().map_err(|_| Error::Parse { line, msg: format!("bad integer `{tok}`") })
}

/// Incremental construction; `add_edge` creates the two directed edges of an
/// orbit with consecutive ids.
#[derive(Clone, Debug, Default)]
pub struct GraphBuilder {
    nv: usize,
    tail: Vec<usize>,
    head: Vec<usize>,
    iota: Vec<usize>,
}

impl GraphBuilder {
    pub fn new(nv: usize) -> Self {
        GraphBuilder { nv, ..Default::default() }
    }

    pub fn add_vertex(&mut self) -> usize {
        self.nv += 1;
        self.nv - 1
    }

    /// Adds `u -> v` and its reverse; returns the id of `u -> v`. With `u == v`
    /// this is a whole-loop.
    pub fn add_edge(&mut self, u: usize, v: usize) -> usize {
        let e = self.tail.len();
        self.tail.extend([u, v]);
        self.head.extend([v, u]);
        self.iota.extend([e + 1, e]);
        e
    }

    pub fn add_half_loop(&mut self, v: usize) -> usize {
        let e = self.tail.len();
        self.tail.push(v);
        self.head.push(v);
        self.iota.push(e);
        e
    }

    pub fn build(self) -> Graph {
        Graph::new(self.nv, self.tail, self.head, self.iota).expect("builder keeps invariants")
    }
}

pub fn bouquet(whole_loops: usize, half_loops: usize) -> Graph {
    let mut b = GraphBuilder::new(1);
    for _ in 0..whole_loops {
        b.add_edge(0, 0);
    }
    for _ in 0..half_loops {
        b.add_half_loop(0);
    }
    b.build()
}

pub fn figure_eight() -> Graph {
    bouquet(2, 0)
}

pub fn cycle(k: usize) -> Graph {
    assert!(k >= 1);
    let mut b = GraphBuilder::new(k);
    for i in 0..k {
        b.add_edge(i, (i + 1) % k);
    }
    b.build()
}

pub fn path(k: usize) -> Graph {
    let mut b = GraphBuilder::new(k);
    for i in 1..k {
        b.add_edge(i - 1, i);
    }
    b.build()
}

/// Random multigraph with `nv` vertices and `edges` orbits. Endpoints are
/// uniform; with `half_loop_prob > 0` some orbits become half-loops.
pub fn random_graph<R: Rng>(rng: &mut R, nv: usize, edges: usize, allow_loops: bool, half_loop_prob: f64) -> Graph {
    assert!(nv >= 1);
    let mut b = GraphBuilder::new(nv);
    for _ in 0..edges {
        let u = rng.random_range(0..nv);
        if half_loop_prob > 0.0 && rng.random_bool(half_loop_prob) {
            b.add_half_loop(u);
            continue;
        }
        let v = if allow_loops || nv == 1 {
            rng.random_range(0..nv)
        } else {
            let w = rng.random_range(0..nv - 1);
            if w >= u { w + 1 } else { w }
        };
        b.add_edge(u, v);
    }
    b.build()
}

/// Entry `(v1, v2)` counts directed edges from `v1` to `v2`.
pub fn adjacency_matrix(g: &Graph) -> DMatrix<f64> {
    let n = g.num_vertices();
    let mut a = DMatrix::zeros(n, n);
    for e in 0..g.num_dir_edges() {
        a[(g.tail(e), g.head(e))] += 1.0;
    }
    a
}

pub fn degree_matrix(g: &Graph) -> DMatrix<f64> {
    let d = g.degrees();
    DMatrix::from_fn(d.len(), d.len(), |i, j| if i == j { d[i] as f64 } else { 0.0 })
}

/// Non-backtracking matrix: `(e1, e2) = 1` iff `head(e1) = tail(e2)` and `iota(e1) != e2`.
pub fn hashimoto_matrix(g: &Graph) -> DMatrix<f64> {
    let m = g.num_dir_edges();
    let out = g.out_edges();
    let mut h = DMatrix::zeros(m, m);
    for e1 in 0..m {
        for &e2 in &out[g.head(e1)] {
            if g.iota(e1) != e2 {
                h[(e1, e2)] = 1.0;
            }
        }
    }
    h
}

/// Successor lists of the non-backtracking matrix.
pub fn hashimoto_successors(g: &Graph) -> Vec<Vec<usize>> {
    let out = g.out_edges();
    (0..g.num_dir_edges())
        .map(|e1| out[g.head(e1)].iter().copied().filter(|&e2| e2 != g.iota(e1)).collect())
        .collect()
}

pub fn stats(g: &Graph) -> GraphStats {
    let half = (0..g.num_dir_edges()).filter(|&e| g.is_half_loop(e)).count();
    let orbits = g.num_edges();
    GraphStats {
        order: orbits as i64 - g.num_vertices() as i64,
        euler_char: Rational64::new(2 * g.num_vertices() as i64 - g.num_dir_edges() as i64, 2),
        half_loop_count: half,
        non_half_edge_count: orbits - half,
        degree_sequence: g.degrees(),
    }
}

/// Removes vertices of degree at most one until none remain. Also returns the
/// old ids of the surviving vertices and directed edges.
pub fn prune_with_maps(g: &Graph) -> (Graph, Vec<usize>, Vec<usize>) {
    let mut deg = g.degrees();
    let out = g.out_edges();
    let mut alive_v = vec![true; g.num_vertices()];
    let mut alive_e = vec![true; g.num_dir_edges()];
    let mut queue: VecDeque<usize> = (0..g.num_vertices()).filter(|&v| deg[v] <= 1).collect();
    while let Some(v) = queue.pop_front() {
        if !alive_v[v] {
            continue;
        }
        alive_v[v] = false;
        for &e in &out[v] {
            if !alive_e[e] {
                continue;
            }
            let f = g.iota(e);
            alive_e[e] = false;
            alive_e[f] = false;
            let w = g.head(e);
            if w != v {
                deg[w] -= 1;
                if alive_v[w] && deg[w] == 1 {
                    queue.push_back(w);
                }
            }
        }
    }
    g.subgraph(&alive_v, &alive_e).expect("pruning keeps closure")
}

pub fn prune(g: &Graph) -> Graph {
    prune_with_maps(g).0
}

/// Replaces the orbit of `e` by a path of `s` edges through `s - 1` new
/// vertices. Other edges keep their relative order; the path is appended, its
/// first edge leaving `tail(e)`.
pub fn subdivide_edge(g: &Graph, e: usize, s: usize) -> Result<Graph> {
    if e >= g.num_dir_edges() {
        return Err(Error::pre(format!("edge {e} out of range")));
    }
    if g.is_half_loop(e) {
        return Err(Error::pre("cannot subdivide a half-loop"));
    }
    if s == 0 {
        return Err(Error::pre("subdivision length must be positive"));
    }
    let f = g.iota(e);
    let mut b = GraphBuilder::new(g.num_vertices());
    let mut newid = vec![usize::MAX; g.num_dir_edges()];
    let mut next = 0;
    for x in 0..g.num_dir_edges() {
        if x != e && x != f {
            newid[x] = next;
            next += 1;
        }
    }
    for x in 0..g.num_dir_edges() {
        if x != e && x != f {
            b.tail.push(g.tail(x));
            b.head.push(g.head(x));
            b.iota.push(newid[g.iota(x)]);
        }
    }
    let mut prev = g.tail(e);
    for i in 0..s {
        let next_v = if i + 1 == s { g.head(e) } else { b.add_vertex() };
        b.add_edge(prev, next_v);
        prev = next_v;
    }
    Ok(b.build())
}

/// Loop and multiplicity profile used by the isomorphism search.
struct IsoProfile {
    half: Vec<usize>,
    whole: Vec<usize>,
    mult: Vec<Vec<usize>>,
    deg: Vec<usize>,
    nbrs: Vec<Vec<usize>>,
}

impl IsoProfile {
    fn new(g: &Graph) -> Self {
        let n = g.num_vertices();
        let mut half = vec![0; n];
        let mut whole = vec![0; n];
        let mut mult = vec![vec![0; n]; n];
        for e in 0..g.num_dir_edges() {
            let (t, h) = (g.tail(e), g.head(e));
            if g.is_half_loop(e) {
                half[t] += 1;
            } else if t == h {
                if e < g.iota(e) {
                    whole[t] += 1;
                }
            } else {
                mult[t][h] += 1;
            }
        }
        let nbrs = (0..n).map(|v| (0..n).filter(|&w| w != v && mult[v][w] > 0).collect()).collect();
        IsoProfile { half, whole, mult, deg: g.degrees(), nbrs }
    }
}

/// Exact isomorphism test respecting the involution, by backtracking over
/// vertex bijections.
pub fn is_isomorphic(g1: &Graph, g2: &Graph) -> Result<bool> {
    is_isomorphic_capped(g1, g2, DEFAULT_ISO_CAP)
}

pub fn is_isomorphic_capped(g1: &Graph, g2: &Graph, cap: usize) -> Result<bool> {
    Ok(find_isomorphism(g1, g2, cap)?.is_some())
}

/// Returns a vertex bijection `g1 -> g2` when one exists.
pub fn find_isomorphism(g1: &Graph, g2: &Graph, cap: usize) -> Result<Option<Vec<usize>>> {
    for g in [g1, g2] {
        if g.num_vertices() > cap {
            return Err(Error::SizeCap { what: "graph", size: g.num_vertices(), cap });
        }
    }
    if g1.num_vertices() != g2.num_vertices() || g1.num_dir_edges() != g2.num_dir_edges() {
        return Ok(None);
    }
    let (p1, p2) = (IsoProfile::new(g1), IsoProfile::new(g2));
    let mut s1 = p1.deg.clone();
    let mut s2 = p2.deg.clone();
    s1.sort_unstable();
    s2.sort_unstable();
    if s1 != s2 {
        return Ok(None);
    }
    // Visit g1 in BFS order so each new vertex is constrained by earlier ones.
    let n = g1.num_vertices();
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut q = VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            order.push(v);
            for &w in &p1.nbrs[v] {
                if !seen[w] {
                    seen[w] = true;
                    q.push_back(w);
                }
            }
        }
    }
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    if iso_search(&p1, &p2, &order, 0, &mut map, &mut used) {
        Ok(Some(map))
    } else {
        Ok(None)
    }
}

fn iso_search(p1: &IsoProfile, p2: &IsoProfile, order: &[usize], depth: usize, map: &mut [usize], used: &mut [bool]) -> bool {
    if depth == order.len() {
        return true;
    }
    let v = order[depth];
    for w in 0..map.len() {
        if used[w] || p1.deg[v] != p2.deg[w] || p1.half[v] != p2.half[w] || p1.whole[v] != p2.whole[w] {
            continue;
        }
        let consistent = order[..depth].iter().all(|&u| p1.mult[v][u] == p2.mult[w][map[u]]);
        if !consistent {
            continue;
        }
        map[v] = w;
        used[w] = true;
        if iso_search(p1, p2, order, depth + 1, map, used) {
            return true;
        }
        used[w] = false;
        map[v] = usize::MAX;
    }
    false
}
