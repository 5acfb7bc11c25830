//! Coordinatized covers, the random cover models, and B-graphs.

use std::collections::VecDeque;
use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng;

pub const EMBEDDING_EDGE_CAP: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Permutation,
    PermInvolutionEven,
    PermInvolutionOdd,
    Cyclic,
    CyclicInvolutionEven,
    CyclicInvolutionOdd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl ModelKind {
    pub const ALL: [ModelKind; 6] = [
        ModelKind::Permutation,
        ModelKind::PermInvolutionEven,
        ModelKind::PermInvolutionOdd,
        ModelKind::Cyclic,
        ModelKind::CyclicInvolutionEven,
        ModelKind::CyclicInvolutionOdd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Permutation => "permutation",
            ModelKind::PermInvolutionEven => "perm-involution-even",
            ModelKind::PermInvolutionOdd => "perm-involution-odd",
            ModelKind::Cyclic => "cyclic",
            ModelKind::CyclicInvolutionEven => "cyclic-involution-even",
            ModelKind::CyclicInvolutionOdd => "cyclic-involution-odd",
        }
    }

    /// Whole-loops get a uniform n-cycle.
    pub fn is_cyclic(self) -> bool {
        matches!(self, ModelKind::Cyclic | ModelKind::CyclicInvolutionEven | ModelKind::CyclicInvolutionOdd)
    }

    /// Parity of `n` required by the half-loop distribution, if any.
    pub fn parity(self) -> Option<Parity> {
        match self {
            ModelKind::PermInvolutionEven | ModelKind::CyclicInvolutionEven => Some(Parity::Even),
            ModelKind::PermInvolutionOdd | ModelKind::CyclicInvolutionOdd => Some(Parity::Odd),
            _ => None,
        }
    }

    pub fn allows_half_loops(self) -> bool {
        self.parity().is_some()
    }

    pub fn check(self, base: &Graph, n: usize) -> Result<()> {
        let bad = |reason: String| Err(Error::Model { model: self.name().into(), reason });
        if n == 0 {
            return bad("degree must be positive".into());
        }
        if !self.allows_half_loops() && base.has_half_loops() {
            return bad("base has half-loops".into());
        }
        match self.parity() {
            Some(Parity::Even) if !n.is_multiple_of(2) => bad(format!("n = {n} is odd")),
            Some(Parity::Odd) if n % 2 != 1 => bad(format!("n = {n} is even")),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Model { model: s.into(), reason: "unknown model".into() })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub seed: u64,
}

impl ModelSpec {
    pub fn new(kind: ModelKind, seed: u64) -> Self {
        ModelSpec { kind, seed }
    }
}

/// A degree-`n` cover given by one permutation of `[n]` per base directed edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoordCover {
    base: Graph,
    n: usize,
    sigma: Vec<Vec<usize>>,
}

impl CoordCover {
    pub fn new(base: Graph, n: usize, sigma: Vec<Vec<usize>>) -> Result<Self> {
        let c = CoordCover { base, n, sigma };
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidGraph(m));
        if self.sigma.len() != self.base.num_dir_edges() {
            return bad("one permutation per base directed edge is required".into());
        }
        for (e, s) in self.sigma.iter().enumerate() {
            if s.len() != self.n {
                return bad(format!("sigma({e}) has length {}", s.len()));
            }
            let mut seen = vec![false; self.n];
            for &x in s {
                if x >= self.n || seen[x] {
                    return bad(format!("sigma({e}) is not a permutation"));
                }
                seen[x] = true;
            }
        }
        for e in 0..self.sigma.len() {
            let inv = &self.sigma[self.base.iota(e)];
            if (0..self.n).any(|i| inv[self.sigma[e][i]] != i) {
                return bad(format!("sigma(iota {e}) is not the inverse of sigma({e})"));
            }
        }
        Ok(())
    }

    /// The identity cover of degree `n`: `n` disjoint copies of the base.
    pub fn trivial(base: Graph, n: usize) -> Self {
        let sigma = vec![(0..n).collect(); base.num_dir_edges()];
        CoordCover { base, n, sigma }
    }

    pub fn base(&self) -> &Graph {
        &self.base
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn sigma(&self, e: usize) -> &[usize] {
        &self.sigma[e]
    }

    pub fn assignment(&self) -> &[Vec<usize>] {
        &self.sigma
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "cover {} {}", self.n, self.base.hash_hex());
        for perm in &self.sigma {
            let line: Vec<String> = perm.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
        s
    }

    pub fn from_text(base: &Graph, text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
        let (ln, header) = lines.next().ok_or(Error::Parse { line: 0, msg: "empty input".into() })?;
        let toks: Vec<&str> = header.split_whitespace().collect();
        if toks.len() != 3 || toks[0] != "cover" {
            return Err(Error::Parse { line: ln, msg: "expected `cover <n> <base-hash>`".into() });
        }
        let n: usize = toks[1].parse().map_err(|_| Error::Parse { line: ln, msg: "bad degree".into() })?;
        if toks[2] != base.hash_hex() {
            return Err(Error::Parse { line: ln, msg: "base hash does not match".into() });
        }
        let mut sigma = Vec::new();
        for (ln, l) in lines {
            let perm: std::result::Result<Vec<usize>, _> = l.split_whitespace().map(str::parse).collect();
            sigma.push(perm.map_err(|_| Error::Parse { line: ln, msg: "bad permutation entry".into() })?);
        }
        CoordCover::new(base.clone(), n, sigma).map_err(|e| Error::Parse { line: 0, msg: e.to_string() })
    }
}

pub fn uniform_permutation<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// Uniform n-cycle: conjugate `i -> i+1 mod n` by a uniform permutation.
pub fn uniform_full_cycle<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let pi = uniform_permutation(rng, n);
    let mut s = vec![0; n];
    for i in 0..n {
        s[pi[i]] = pi[(i + 1) % n];
    }
    s
}

/// Uniform involution with no fixed point (`n` even) or exactly one (`n` odd).
pub fn uniform_matching<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut s: Vec<usize> = (0..n).collect();
    let mut rest: Vec<usize> = (0..n).collect();
    if n % 2 == 1 {
        let f = rng.random_range(0..n);
        rest.remove(f);
    }
    rest.shuffle(rng);
    for pair in rest.chunks_exact(2) {
        s[pair[0]] = pair[1];
        s[pair[1]] = pair[0];
    }
    s
}

/// Draws the cover for trial `trial`. The `j`-th orbit representative of the
/// base uses random stream `j`; its iota-partner receives the inverse.
pub fn sample(base: &Graph, n: usize, spec: &ModelSpec, trial: u64) -> Result<CoordCover> {
    spec.kind.check(base, n)?;
    Ok(sample_unchecked(base, n, spec, trial))
}

pub(crate) fn sample_unchecked(base: &Graph, n: usize, spec: &ModelSpec, trial: u64) -> CoordCover {
    let mut sigma = vec![Vec::new(); base.num_dir_edges()];
    for (j, e) in base.orientation().into_iter().enumerate() {
        let mut r = rng::stream(spec.seed, trial, j as u64);
        let f = base.iota(e);
        let s = if e == f {
            uniform_matching(&mut r, n)
        } else if spec.kind.is_cyclic() && base.is_whole_loop(e) {
            uniform_full_cycle(&mut r, n)
        } else {
            uniform_permutation(&mut r, n)
        };
        if e != f {
            let mut inv = vec![0; n];
            for (i, &x) in s.iter().enumerate() {
                inv[x] = i;
            }
            sigma[f] = inv;
        }
        sigma[e] = s;
    }
    let c = CoordCover { base: base.clone(), n, sigma };
    debug_assert!(c.validate().is_ok());
    c
}

/// A graph with a morphism to a base graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BGraph {
    pub total: Graph,
    pub base: Graph,
    pub vertex_map: Vec<usize>,
    pub dir_edge_map: Vec<usize>,
}

impl BGraph {
    pub fn new(total: Graph, base: Graph, vertex_map: Vec<usize>, dir_edge_map: Vec<usize>) -> Result<Self> {
        if vertex_map.len() != total.num_vertices() || dir_edge_map.len() != total.num_dir_edges() {
            return Err(Error::InvalidGraph("structure map has the wrong length".into()));
        }
        if vertex_map.iter().any(|&v| v >= base.num_vertices()) || dir_edge_map.iter().any(|&e| e >= base.num_dir_edges()) {
            return Err(Error::InvalidGraph("structure map points outside the base".into()));
        }
        for f in 0..total.num_dir_edges() {
            let e = dir_edge_map[f];
            if vertex_map[total.tail(f)] != base.tail(e)
                || vertex_map[total.head(f)] != base.head(e)
                || dir_edge_map[total.iota(f)] != base.iota(e)
            {
                return Err(Error::InvalidGraph(format!("structure map does not commute at edge {f}")));
            }
        }
        Ok(BGraph { total, base, vertex_map, dir_edge_map })
    }

    /// Sub-B-graph on kept vertices/edges.
    pub fn restrict(&self, keep_v: &[bool], keep_e: &[bool]) -> Result<BGraph> {
        let (g, vold, eold) = self.total.subgraph(keep_v, keep_e)?;
        let vm = vold.iter().map(|&v| self.vertex_map[v]).collect();
        let em = eold.iter().map(|&e| self.dir_edge_map[e]).collect();
        Ok(BGraph { total: g, base: self.base.clone(), vertex_map: vm, dir_edge_map: em })
    }

    pub fn pruned(&self) -> BGraph {
        let (g, vold, eold) = crate::graph::prune_with_maps(&self.total);
        let vm = vold.iter().map(|&v| self.vertex_map[v]).collect();
        let em = eold.iter().map(|&e| self.dir_edge_map[e]).collect();
        BGraph { total: g, base: self.base.clone(), vertex_map: vm, dir_edge_map: em }
    }
}

/// Vertex `(v, i)` gets id `v * n + i`, edge `(e, i)` gets id `e * n + i`.
pub fn realize(c: &CoordCover) -> BGraph {
    let (b, n) = (&c.base, c.n);
    let m = b.num_dir_edges();
    let mut tail = Vec::with_capacity(m * n);
    let mut head = Vec::with_capacity(m * n);
    let mut iota = Vec::with_capacity(m * n);
    let mut emap = Vec::with_capacity(m * n);
    for e in 0..m {
        for i in 0..n {
            let j = c.sigma[e][i];
            tail.push(b.tail(e) * n + i);
            head.push(b.head(e) * n + j);
            iota.push(b.iota(e) * n + j);
            emap.push(e);
        }
    }
    let vmap = (0..b.num_vertices() * n).map(|x| x / n).collect();
    let total = Graph::new(b.num_vertices() * n, tail, head, iota).expect("valid assignment gives a valid cover");
    BGraph { total, base: b.clone(), vertex_map: vmap, dir_edge_map: emap }
}

/// Preimage counts over base directed edges (`a`) and base vertices (`b`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FibreCounts {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

pub fn fibre_counts(s: &BGraph) -> FibreCounts {
    let mut a = vec![0; s.base.num_dir_edges()];
    let mut b = vec![0; s.base.num_vertices()];
    for &e in &s.dir_edge_map {
        a[e] += 1;
    }
    for &v in &s.vertex_map {
        b[v] += 1;
    }
    FibreCounts { a, b }
}

/// Injective on every vertex star.
pub fn is_etale(s: &BGraph) -> bool {
    let mut seen = vec![usize::MAX; s.base.num_dir_edges()];
    for (u, star) in s.total.out_edges().iter().enumerate() {
        for &f in star {
            let e = s.dir_edge_map[f];
            if seen[e] == u {
                return false;
            }
            seen[e] = u;
        }
    }
    true
}

/// Explicit vertex and edge ranks plus an orientation (one directed edge per
/// orbit). Nothing is canonicalized.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ordering {
    pub vertex_rank: Vec<usize>,
    /// Rank of each directed edge's orbit; both members share it.
    pub edge_rank: Vec<usize>,
    pub oriented: Vec<bool>,
}

impl Ordering {
    /// Ranks by id; the smaller id of each orbit is oriented.
    pub fn by_id(g: &Graph) -> Self {
        let orient = g.orientation();
        let mut edge_rank = vec![0; g.num_dir_edges()];
        let mut oriented = vec![false; g.num_dir_edges()];
        for (r, &e) in orient.iter().enumerate() {
            edge_rank[e] = r;
            edge_rank[g.iota(e)] = r;
            oriented[e] = true;
        }
        Ordering { vertex_rank: (0..g.num_vertices()).collect(), edge_rank, oriented }
    }

    pub fn validate(&self, g: &Graph) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidGraph(format!("ordering: {m}")));
        let nv = g.num_vertices();
        let mut seen = vec![false; nv];
        if self.vertex_rank.len() != nv {
            return bad("vertex rank length");
        }
        for &r in &self.vertex_rank {
            if r >= nv || seen[r] {
                return bad("vertex ranks are not a permutation");
            }
            seen[r] = true;
        }
        let ne = g.num_edges();
        let mut seen = vec![false; ne];
        if self.edge_rank.len() != g.num_dir_edges() || self.oriented.len() != g.num_dir_edges() {
            return bad("edge arrays length");
        }
        for e in 0..g.num_dir_edges() {
            let f = g.iota(e);
            if self.edge_rank[e] != self.edge_rank[f] {
                return bad("orbit members with different ranks");
            }
            if e == f && !self.oriented[e] {
                return bad("half-loop must be oriented");
            }
            if e != f && self.oriented[e] == self.oriented[f] {
                return bad("exactly one edge per orbit must be oriented");
            }
            if e <= f {
                let r = self.edge_rank[e];
                if r >= ne || seen[r] {
                    return bad("edge ranks are not a permutation of the orbits");
                }
                seen[r] = true;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedBGraph {
    pub bgraph: BGraph,
    pub ordering: Ordering,
}

impl OrderedBGraph {
    pub fn new(bgraph: BGraph, ordering: Ordering) -> Result<Self> {
        ordering.validate(&bgraph.total)?;
        Ok(OrderedBGraph { bgraph, ordering })
    }

    pub fn by_id(bgraph: BGraph) -> Self {
        let ordering = Ordering::by_id(&bgraph.total);
        OrderedBGraph { bgraph, ordering }
    }
}

/// Number of injective B-graph morphisms `s -> g`, by backtracking over the
/// vertex fibres and then over edge orbits.
pub fn count_embeddings(s: &BGraph, g: &BGraph) -> Result<u64> {
    if s.total.num_edges() > EMBEDDING_EDGE_CAP {
        return Err(Error::SizeCap { what: "pattern edges", size: s.total.num_edges(), cap: EMBEDDING_EDGE_CAP });
    }
    if s.base.num_vertices() != g.base.num_vertices() || s.base.num_dir_edges() != g.base.num_dir_edges() {
        return Err(Error::pre("pattern and target live over different bases"));
    }
    let ns = s.total.num_vertices();
    let mut fibre: Vec<Vec<usize>> = vec![Vec::new(); g.base.num_vertices()];
    for (x, &v) in g.vertex_map.iter().enumerate() {
        fibre[v].push(x);
    }
    // Directed edges of g indexed by (base edge, tail).
    let mut by_edge: Vec<Vec<usize>> = vec![Vec::new(); g.base.num_dir_edges()];
    for (x, &e) in g.dir_edge_map.iter().enumerate() {
        by_edge[e].push(x);
    }
    let order = bfs_order(&s.total);
    let mut pos = vec![0; ns];
    for (i, &u) in order.iter().enumerate() {
        pos[u] = i;
    }
    let s_out = s.total.out_edges();
    let ctx = EmbedCtx { s, g, fibre: &fibre, by_edge: &by_edge, order: &order, pos: &pos, s_out: &s_out };
    let mut phi = vec![usize::MAX; ns];
    let mut used = vec![false; g.total.num_vertices()];
    Ok(ctx.vertices(0, &mut phi, &mut used))
}

struct EmbedCtx<'a> {
    s: &'a BGraph,
    g: &'a BGraph,
    fibre: &'a [Vec<usize>],
    by_edge: &'a [Vec<usize>],
    order: &'a [usize],
    pos: &'a [usize],
    s_out: &'a [Vec<usize>],
}

impl EmbedCtx<'_> {
    fn edge_candidates(&self, f: usize, phi: &[usize]) -> impl Iterator<Item = usize> + '_ {
        let (st, gt) = (&self.s.total, &self.g.total);
        let want_t = phi[st.tail(f)];
        let want_h = phi[st.head(f)];
        let half = st.is_half_loop(f);
        self.by_edge[self.s.dir_edge_map[f]]
            .iter()
            .copied()
            .filter(move |&x| gt.tail(x) == want_t && gt.head(x) == want_h && gt.is_half_loop(x) == half)
    }

    fn vertices(&self, depth: usize, phi: &mut Vec<usize>, used: &mut Vec<bool>) -> u64 {
        if depth == self.order.len() {
            let orbits = self.s.total.orientation();
            let mut eused = vec![false; self.g.total.num_dir_edges()];
            return self.edges(&orbits, 0, phi, &mut eused);
        }
        let u = self.order[depth];
        let mut total = 0;
        for &x in &self.fibre[self.s.vertex_map[u]] {
            if used[x] {
                continue;
            }
            phi[u] = x;
            // Every edge from u to an already placed vertex needs a candidate.
            let ok = self.s_out[u]
                .iter()
                .all(|&f| self.pos[self.s.total.head(f)] > depth || self.edge_candidates(f, phi).next().is_some());
            if ok {
                used[x] = true;
                total += self.vertices(depth + 1, phi, used);
                used[x] = false;
            }
            phi[u] = usize::MAX;
        }
        total
    }

    fn edges(&self, orbits: &[usize], i: usize, phi: &[usize], eused: &mut Vec<bool>) -> u64 {
        if i == orbits.len() {
            return 1;
        }
        let f = orbits[i];
        let cands: Vec<usize> = self.edge_candidates(f, phi).collect();
        let mut total = 0;
        for x in cands {
            let y = self.g.total.iota(x);
            if eused[x] || eused[y] {
                continue;
            }
            eused[x] = true;
            eused[y] = true;
            total += self.edges(orbits, i + 1, phi, eused);
            eused[x] = false;
            eused[y] = false;
        }
        total
    }
}

fn bfs_order(g: &Graph) -> Vec<usize> {
    let out = g.out_edges();
    let mut seen = vec![false; g.num_vertices()];
    let mut order = Vec::with_capacity(g.num_vertices());
    for s in 0..g.num_vertices() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut q = VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            order.push(v);
            for &e in &out[v] {
                let w = g.head(e);
                if !seen[w] {
                    seen[w] = true;
                    q.push_back(w);
                }
            }
        }
    }
    order
}

#[derive(Clone, Debug)]
enum Step {
    /// Any unused index in the fibre.
    Free,
    /// `i_u = sigma(e)[i_parent]`.
    Follow { parent: usize, base_edge: usize },
}

/// A pattern compiled for counting its embeddings into coordinatized covers,
/// where vertex images determine edge images.
#[derive(Clone, Debug)]
pub struct CoverPattern {
    order: Vec<usize>,
    steps: Vec<Step>,
    /// Per vertex in `order`: closing edges `(tail, base edge)` to verify once
    /// the head (this vertex) is placed.
    checks: Vec<Vec<(usize, usize)>>,
    /// Earlier vertices in the same fibre, per position.
    same_fibre: Vec<Vec<usize>>,
    etale: bool,
    nv: usize,
}

impl CoverPattern {
    pub fn new(s: &BGraph) -> Self {
        let g = &s.total;
        let etale = is_etale(s);
        let out = g.out_edges();
        let nv = g.num_vertices();
        let mut pos = vec![usize::MAX; nv];
        let mut order = Vec::with_capacity(nv);
        let mut steps = Vec::with_capacity(nv);
        let mut tree_edge = vec![false; g.num_dir_edges()];
        for s0 in 0..nv {
            if pos[s0] != usize::MAX {
                continue;
            }
            pos[s0] = order.len();
            order.push(s0);
            steps.push(Step::Free);
            let mut q = VecDeque::from([s0]);
            while let Some(v) = q.pop_front() {
                for &f in &out[v] {
                    let w = g.head(f);
                    if pos[w] == usize::MAX {
                        pos[w] = order.len();
                        order.push(w);
                        steps.push(Step::Follow { parent: v, base_edge: s.dir_edge_map[f] });
                        tree_edge[f] = true;
                        tree_edge[g.iota(f)] = true;
                        q.push_back(w);
                    }
                }
            }
        }
        let mut checks = vec![Vec::new(); nv];
        for f in 0..g.num_dir_edges() {
            if tree_edge[f] || f > g.iota(f) {
                continue;
            }
            let (t, h) = (g.tail(f), g.head(f));
            // Check when the later endpoint is placed; orient from the earlier.
            if pos[t] <= pos[h] {
                checks[pos[h]].push((t, s.dir_edge_map[f]));
            } else {
                checks[pos[t]].push((h, s.dir_edge_map[g.iota(f)]));
            }
        }
        let same_fibre = order
            .iter()
            .enumerate()
            .map(|(p, &u)| order[..p].iter().copied().filter(|&w| s.vertex_map[w] == s.vertex_map[u]).collect())
            .collect();
        CoverPattern { order, steps, checks, same_fibre, etale, nv }
    }

    pub fn count(&self, c: &CoordCover) -> u64 {
        if !self.etale {
            return 0;
        }
        let mut idx = vec![usize::MAX; self.nv];
        self.rec(c, 0, &mut idx)
    }

    fn place_ok(&self, c: &CoordCover, p: usize, idx: &[usize]) -> bool {
        let u = self.order[p];
        let i = idx[u];
        self.same_fibre[p].iter().all(|&w| idx[w] != i) && self.checks[p].iter().all(|&(t, e)| c.sigma[e][idx[t]] == i)
    }

    fn rec(&self, c: &CoordCover, p: usize, idx: &mut [usize]) -> u64 {
        if p == self.order.len() {
            return 1;
        }
        let u = self.order[p];
        match self.steps[p] {
            Step::Follow { parent, base_edge } => {
                idx[u] = c.sigma[base_edge][idx[parent]];
                if self.place_ok(c, p, idx) {
                    self.rec(c, p + 1, idx)
                } else {
                    0
                }
            }
            Step::Free => {
                let mut total = 0;
                for i in 0..c.n {
                    idx[u] = i;
                    if self.place_ok(c, p, idx) {
                        total += self.rec(c, p + 1, idx);
                    }
                }
                total
            }
        }
    }
}

pub fn count_embeddings_in_cover(s: &BGraph, c: &CoordCover) -> u64 {
    CoverPattern::new(s).count(c)
}
