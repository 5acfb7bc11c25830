//! Non-backtracking walks, visited subgraphs, coincidences, bead suppression
//! and variable-length graphs.

use std::collections::{BTreeMap, HashMap};

use crate::covers::{BGraph, CoordCover, OrderedBGraph, Ordering};
use crate::error::{Error, Result};
use crate::graph::{hashimoto_successors, Graph, GraphBuilder};

pub const DEFAULT_WALK_BUDGET: u64 = 10_000_000;

/// `v0, e1, ..., ek` in a host graph; vertices are implied by the edges.
#[derive(Clone, Debug)]
pub struct Walk<'a> {
    pub host: &'a Graph,
    pub start: usize,
    pub edges: Vec<usize>,
}

impl<'a> Walk<'a> {
    pub fn new(host: &'a Graph, start: usize, edges: Vec<usize>) -> Result<Self> {
        let w = Walk { host, start, edges };
        if !w.is_valid() {
            return Err(Error::pre("edges do not form a walk from the start vertex"));
        }
        Ok(w)
    }

    pub fn from_edges(host: &'a Graph, edges: Vec<usize>) -> Result<Self> {
        let start = edges.first().map(|&e| host.tail(e)).ok_or_else(|| Error::pre("empty walk needs a start"))?;
        Walk::new(host, start, edges)
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn vertices(&self) -> Vec<usize> {
        let mut v = vec![self.start];
        v.extend(self.edges.iter().map(|&e| self.host.head(e)));
        v
    }

    pub fn end(&self) -> usize {
        self.edges.last().map_or(self.start, |&e| self.host.head(e))
    }

    fn is_valid(&self) -> bool {
        let mut at = self.start;
        for &e in &self.edges {
            if e >= self.host.num_dir_edges() || self.host.tail(e) != at {
                return false;
            }
            at = self.host.head(e);
        }
        at < self.host.num_vertices()
    }

    pub fn is_non_backtracking(&self) -> bool {
        self.edges.windows(2).all(|p| self.host.iota(p[0]) != p[1])
    }

    pub fn is_closed(&self) -> bool {
        self.end() == self.start
    }

    pub fn is_snbc(&self) -> bool {
        match (self.edges.first(), self.edges.last()) {
            (Some(&first), Some(&last)) => self.is_closed() && self.is_non_backtracking() && self.host.iota(last) != first,
            _ => false,
        }
    }
}

/// Rejects enumerations whose search tree (all non-backtracking walks of
/// length at most `k`) has more than `budget` nodes.
fn budget_check(g: &Graph, k: usize, budget: u64) -> Result<()> {
    let succ = hashimoto_successors(g);
    let mut level = vec![1.0f64; g.num_dir_edges()];
    let mut est: f64 = level.iter().sum();
    for _ in 1..k {
        if est > budget as f64 {
            break;
        }
        level = succ.iter().map(|s| s.iter().map(|&f| level[f]).sum()).collect();
        est += level.iter().sum::<f64>();
    }
    if est > budget as f64 {
        return Err(Error::Budget { what: format!("SNBC enumeration of length {k} (estimate {est:.3e})"), budget });
    }
    Ok(())
}

/// Edge sequences of all SNBC walks of length `k`, in lexicographic order.
pub fn snbc_edge_sequences(g: &Graph, k: usize, budget: u64) -> Result<Vec<Vec<usize>>> {
    if k == 0 {
        return Err(Error::pre("walk length must be positive"));
    }
    budget_check(g, k, budget)?;
    let succ = hashimoto_successors(g);
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    for e in 0..g.num_dir_edges() {
        cur.push(e);
        snbc_dfs(g, &succ, k, &mut cur, &mut |w: &[usize]| out.push(w.to_vec()));
        cur.pop();
    }
    Ok(out)
}

fn snbc_dfs(g: &Graph, succ: &[Vec<usize>], k: usize, cur: &mut Vec<usize>, emit: &mut impl FnMut(&[usize])) {
    let last = *cur.last().unwrap();
    if cur.len() == k {
        if g.head(last) == g.tail(cur[0]) && g.iota(last) != cur[0] {
            emit(cur);
        }
        return;
    }
    for &f in &succ[last] {
        cur.push(f);
        snbc_dfs(g, succ, k, cur, emit);
        cur.pop();
    }
}

pub fn enumerate_snbc(g: &Graph, k: usize, budget: u64) -> Result<Vec<Walk<'_>>> {
    Ok(snbc_edge_sequences(g, k, budget)?
        .into_iter()
        .map(|edges| Walk { host: g, start: g.tail(edges[0]), edges })
        .collect())
}

pub fn count_snbc(g: &Graph, k: usize, budget: u64) -> Result<u64> {
    if k == 0 {
        return Err(Error::pre("walk length must be positive"));
    }
    budget_check(g, k, budget)?;
    let succ = hashimoto_successors(g);
    let mut count = 0u64;
    let mut cur = Vec::with_capacity(k);
    for e in 0..g.num_dir_edges() {
        cur.push(e);
        snbc_dfs(g, &succ, k, &mut cur, &mut |_| count += 1);
        cur.pop();
    }
    Ok(count)
}

/// A graph with an explicit ordering.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedGraph {
    pub graph: Graph,
    pub ordering: Ordering,
}

impl OrderedGraph {
    pub fn by_id(graph: Graph) -> Self {
        let ordering = Ordering::by_id(&graph);
        OrderedGraph { graph, ordering }
    }

    /// The graph renumbered by ranks: per orbit in rank order, the ranks of the
    /// oriented edge's tail and head and whether it is a half-loop. Two ordered
    /// graphs are ordered-isomorphic iff these agree.
    pub fn ordered_code(&self) -> Vec<(usize, usize, bool)> {
        let g = &self.graph;
        let mut code = vec![(0, 0, false); g.num_edges()];
        for e in 0..g.num_dir_edges() {
            if self.ordering.oriented[e] {
                code[self.ordering.edge_rank[e]] =
                    (self.ordering.vertex_rank[g.tail(e)], self.ordering.vertex_rank[g.head(e)], g.is_half_loop(e));
            }
        }
        code
    }
}

/// Visited subgraph built from a sequence of traversed host edges, with
/// first-encountered ordering. Host ids are arbitrary keys.
struct VisuBuilder {
    vid: HashMap<usize, usize>,
    eid: HashMap<usize, usize>,
    vorig: Vec<usize>,
    tail: Vec<usize>,
    head: Vec<usize>,
    iota: Vec<usize>,
    eorig: Vec<usize>,
    oriented: Vec<bool>,
    rank: Vec<usize>,
    orbits: usize,
}

impl VisuBuilder {
    fn new(start: usize) -> Self {
        let mut b = VisuBuilder {
            vid: HashMap::new(),
            eid: HashMap::new(),
            vorig: vec![],
            tail: vec![],
            head: vec![],
            iota: vec![],
            eorig: vec![],
            oriented: vec![],
            rank: vec![],
            orbits: 0,
        };
        b.vertex(start);
        b
    }

    fn vertex(&mut self, key: usize) -> (usize, bool) {
        if let Some(&v) = self.vid.get(&key) {
            return (v, false);
        }
        let v = self.vorig.len();
        self.vid.insert(key, v);
        self.vorig.push(key);
        (v, true)
    }

    /// Returns whether the orbit and the head vertex were new.
    fn traverse(&mut self, e: usize, t: usize, h: usize, ie: usize) -> (bool, bool) {
        if self.eid.contains_key(&e) {
            return (false, false);
        }
        let tv = self.vertex(t).0;
        let (hv, new_v) = self.vertex(h);
        let id = self.tail.len();
        self.eid.insert(e, id);
        self.tail.push(tv);
        self.head.push(hv);
        self.eorig.push(e);
        self.oriented.push(true);
        self.rank.push(self.orbits);
        if ie == e {
            self.iota.push(id);
        } else {
            self.eid.insert(ie, id + 1);
            self.iota.push(id + 1);
            self.tail.push(hv);
            self.head.push(tv);
            self.iota.push(id);
            self.eorig.push(ie);
            self.oriented.push(false);
            self.rank.push(self.orbits);
        }
        self.orbits += 1;
        (true, new_v)
    }

    fn order(&self) -> i64 {
        self.orbits as i64 - self.vorig.len() as i64
    }

    fn finish(self) -> (OrderedGraph, Vec<usize>, Vec<usize>) {
        let nv = self.vorig.len();
        let graph = Graph::new(nv, self.tail, self.head, self.iota).expect("visited subgraph is a graph");
        let ordering = Ordering { vertex_rank: (0..nv).collect(), edge_rank: self.rank, oriented: self.oriented };
        (OrderedGraph { graph, ordering }, self.vorig, self.eorig)
    }
}

/// Smallest subgraph containing the walk, with host ids of its vertices and
/// directed edges.
pub fn visited_subgraph_with_origin(w: &Walk) -> (OrderedGraph, Vec<usize>, Vec<usize>) {
    let g = w.host;
    let mut b = VisuBuilder::new(w.start);
    for &e in &w.edges {
        b.traverse(e, g.tail(e), g.head(e), g.iota(e));
    }
    b.finish()
}

pub fn visited_subgraph_ordered(w: &Walk) -> OrderedGraph {
    visited_subgraph_with_origin(w).0
}

/// Visited subgraph of a walk in the total graph of a B-graph, as an ordered
/// B-graph.
pub fn visited_subgraph_bgraph(w: &Walk, host: &BGraph) -> OrderedBGraph {
    let (og, vorig, eorig) = visited_subgraph_with_origin(w);
    let vm = vorig.iter().map(|&v| host.vertex_map[v]).collect();
    let em = eorig.iter().map(|&e| host.dir_edge_map[e]).collect();
    let bg = BGraph::new(og.graph, host.base.clone(), vm, em).expect("restriction of a B-graph");
    OrderedBGraph { bgraph: bg, ordering: og.ordering }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum StepClass {
    Forced,
    Coincidence,
    New,
}

#[derive(Clone, Debug)]
pub struct WalkRecord {
    pub base_edges: Vec<usize>,
    pub i0: usize,
    /// `i_0, ..., i_k` with `i_j = sigma(e_j) i_{j-1}`.
    pub trajectory: Vec<usize>,
    pub classes: Vec<StepClass>,
    /// `ord(gamma_j)` for `j = 0..=k`.
    pub orders: Vec<i64>,
    pub final_graph: OrderedBGraph,
}

impl WalkRecord {
    pub fn coincidences(&self) -> usize {
        self.classes.iter().filter(|&&c| c == StepClass::Coincidence).count()
    }
}

/// Lifts `base_walk` from fibre index `i0` and classifies each step against the
/// subgraph visited so far.
pub fn classify_steps(base_walk: &Walk, i0: usize, c: &CoordCover) -> Result<WalkRecord> {
    let b = c.base();
    if !std::ptr::eq(base_walk.host, b) && base_walk.host != b {
        return Err(Error::pre("walk is not in the cover's base"));
    }
    let n = c.degree();
    if i0 >= n {
        return Err(Error::pre(format!("start index {i0} >= degree {n}")));
    }
    let mut i = i0;
    let mut traj = vec![i0];
    let mut classes = Vec::with_capacity(base_walk.len());
    let mut builder = VisuBuilder::new(base_walk.start * n + i0);
    let mut orders = vec![builder.order()];
    for &e in &base_walk.edges {
        let j = c.sigma(e)[i];
        let key = e * n + i;
        let (new_e, new_v) = builder.traverse(key, b.tail(e) * n + i, b.head(e) * n + j, b.iota(e) * n + j);
        classes.push(match (new_e, new_v) {
            (false, _) => StepClass::Forced,
            (true, false) => StepClass::Coincidence,
            (true, true) => StepClass::New,
        });
        orders.push(builder.order());
        traj.push(j);
        i = j;
    }
    let (og, vorig, eorig) = builder.finish();
    let vm = vorig.iter().map(|&x| x / n).collect();
    let em = eorig.iter().map(|&x| x / n).collect();
    let bg = BGraph::new(og.graph, b.clone(), vm, em).expect("lifted walk maps to the base");
    Ok(WalkRecord {
        base_edges: base_walk.edges.clone(),
        i0,
        trajectory: traj,
        classes,
        orders,
        final_graph: OrderedBGraph { bgraph: bg, ordering: og.ordering },
    })
}

/// Order of the visited subgraph of the lifted walk, or `None` when the lift
/// does not close up. Cheaper than [`classify_steps`].
pub fn lifted_closed_order(base_edges: &[usize], start: usize, i0: usize, c: &CoordCover) -> Option<i64> {
    let b = c.base();
    let n = c.degree();
    let mut i = i0;
    let mut verts: Vec<usize> = vec![start * n + i0];
    let mut orbits: Vec<usize> = Vec::with_capacity(base_edges.len());
    for &e in base_edges {
        let j = c.sigma(e)[i];
        let key = e * n + i;
        let rev = b.iota(e) * n + j;
        let orbit = key.min(rev);
        if !orbits.contains(&orbit) {
            orbits.push(orbit);
        }
        let hv = b.head(e) * n + j;
        if !verts.contains(&hv) {
            verts.push(hv);
        }
        i = j;
    }
    (i == i0).then_some(orbits.len() as i64 - verts.len() as i64)
}

/// Counts SNBC walks of length `k` in the realized cover by the order of
/// their visited subgraphs, by lifting base walks.
pub fn snbc_order_census(c: &CoordCover, k: usize, budget: u64) -> Result<BTreeMap<i64, u64>> {
    let walks = snbc_edge_sequences(c.base(), k, budget)?;
    Ok(census_from_base_walks(c, &walks))
}

pub fn census_from_base_walks(c: &CoordCover, walks: &[Vec<usize>]) -> BTreeMap<i64, u64> {
    let mut census = BTreeMap::new();
    for w in walks {
        let start = c.base().tail(w[0]);
        for i0 in 0..c.degree() {
            if let Some(ord) = lifted_closed_order(w, start, i0, c) {
                *census.entry(ord).or_insert(0) += 1;
            }
        }
    }
    census
}

/// Same census computed from visited subgraphs in an explicit graph.
pub fn snbc_order_census_direct(g: &Graph, k: usize, budget: u64) -> Result<BTreeMap<i64, u64>> {
    let mut census = BTreeMap::new();
    for w in enumerate_snbc(g, k, budget)? {
        let v = visited_subgraph_ordered(&w);
        *census.entry(crate::graph::stats(&v.graph).order).or_insert(0) += 1;
    }
    Ok(census)
}

/// `Trace(H_G^k)` of a coordinatized cover: the number of fixed points of
/// `sigma(e_k)...sigma(e_1)`, summed over base SNBC walks.
pub fn lifted_trace(c: &CoordCover, base_walks: &[Vec<usize>]) -> u64 {
    let n = c.degree();
    let mut total = 0u64;
    for w in base_walks {
        for i0 in 0..n {
            let mut i = i0;
            for &e in w {
                i = c.sigma(e)[i];
            }
            total += u64::from(i == i0);
        }
    }
    total
}

/// Upper bound on the expected number of SNBC walks of length `k` and order at
/// least `r` in a degree-`n` permutation-model cover.
pub fn order_bound(base_trace: u64, n: usize, k: usize, r: usize) -> Option<f64> {
    let denom = n as f64 - 2.0 * k as f64 + 1.0;
    if denom <= 0.0 {
        return None;
    }
    let binom = binomial(k, r + 1);
    Some(base_trace as f64 * n as f64 * binom * (k as f64 / denom).powi(r as i32 + 1))
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Degree-2 vertex not incident to any loop.
pub fn is_bead(g: &Graph, v: usize, out: &[Vec<usize>]) -> bool {
    out[v].len() == 2 && out[v].iter().all(|&e| g.head(e) != v)
}

#[derive(Clone, Debug)]
pub struct HomotopyData {
    pub reduction: OrderedGraph,
    /// Per reduced directed edge.
    pub edge_lengths: Vec<usize>,
    pub suppressed: Vec<usize>,
    /// Per reduced directed edge, the original directed edges along it.
    pub paths: Vec<Vec<usize>>,
    /// Original id of each reduced vertex.
    pub vertex_origin: Vec<usize>,
}

/// Contracts every beaded path through `beads` into a single edge.
pub fn suppress_beads(s: &OrderedGraph, beads: &[usize]) -> Result<HomotopyData> {
    let g = &s.graph;
    let out = g.out_edges();
    let mut in_set = vec![false; g.num_vertices()];
    for &v in beads {
        if v >= g.num_vertices() || !is_bead(g, v, &out) {
            return Err(Error::pre(format!("vertex {v} is not a bead")));
        }
        in_set[v] = true;
    }
    let comp = g.components();
    let ncomp = comp.iter().copied().max().map_or(0, |c| c + 1);
    let mut has_kept = vec![false; ncomp];
    for v in 0..g.num_vertices() {
        if !in_set[v] {
            has_kept[comp[v]] = true;
        }
    }
    if has_kept.iter().any(|&k| !k) {
        return Err(Error::pre("bead set covers a whole component"));
    }
    let mut vnew = vec![usize::MAX; g.num_vertices()];
    let mut vorig = Vec::new();
    let mut kept: Vec<usize> = (0..g.num_vertices()).filter(|&v| !in_set[v]).collect();
    kept.sort_by_key(|&v| s.ordering.vertex_rank[v]);
    for &v in &kept {
        vnew[v] = vorig.len();
        vorig.push(v);
    }
    let mut done = vec![false; g.num_dir_edges()];
    let mut b = GraphBuilder::new(vorig.len());
    let mut paths: Vec<Vec<usize>> = Vec::new();
    let mut key: Vec<(usize, bool)> = Vec::new();
    let mut starts: Vec<usize> = (0..g.num_dir_edges()).filter(|&e| !in_set[g.tail(e)]).collect();
    starts.sort_by_key(|&e| (s.ordering.edge_rank[e], !s.ordering.oriented[e]));
    for x in starts {
        if done[x] {
            continue;
        }
        if g.is_half_loop(x) {
            done[x] = true;
            b.add_half_loop(vnew[g.tail(x)]);
            paths.push(vec![x]);
            key.push((s.ordering.edge_rank[x], true));
            continue;
        }
        let mut p = vec![x];
        let mut cur = x;
        while in_set[g.head(cur)] {
            let back = g.iota(cur);
            let next = *out[g.head(cur)].iter().find(|&&y| y != back).expect("bead has two edges");
            p.push(next);
            cur = next;
        }
        let rev: Vec<usize> = p.iter().rev().map(|&y| g.iota(y)).collect();
        for &y in p.iter().chain(&rev) {
            done[y] = true;
        }
        b.add_edge(vnew[g.tail(x)], vnew[g.head(cur)]);
        let (r, o) = p
            .iter()
            .map(|&y| (s.ordering.edge_rank[y], s.ordering.oriented[y]))
            .min_by_key(|&(r, _)| r)
            .unwrap();
        key.push((r, o));
        key.push((r, !o));
        paths.push(p);
        paths.push(rev);
    }
    let graph = b.build();
    // Rank reduced orbits by their smallest original rank.
    let mut orbit_keys: Vec<(usize, usize)> =
        (0..graph.num_dir_edges()).filter(|&e| e <= graph.iota(e)).map(|e| (key[e].0, e)).collect();
    orbit_keys.sort_unstable();
    let mut edge_rank = vec![0; graph.num_dir_edges()];
    for (r, &(_, e)) in orbit_keys.iter().enumerate() {
        edge_rank[e] = r;
        edge_rank[graph.iota(e)] = r;
    }
    let oriented = (0..graph.num_dir_edges()).map(|e| key[e].1).collect();
    let ordering = Ordering { vertex_rank: (0..vorig.len()).collect(), edge_rank, oriented };
    let edge_lengths = paths.iter().map(Vec::len).collect();
    Ok(HomotopyData {
        reduction: OrderedGraph { graph, ordering },
        edge_lengths,
        suppressed: beads.to_vec(),
        paths,
        vertex_origin: vorig,
    })
}

/// Every bead except those in `keep`.
pub fn all_beads_except(g: &Graph, keep: &[usize]) -> Vec<usize> {
    let out = g.out_edges();
    (0..g.num_vertices()).filter(|&v| !keep.contains(&v) && is_bead(g, v, &out)).collect()
}

/// Replaces each orbit by a path of `k(e)` edges. A half-loop of length `k`
/// becomes a path of `k - 1` edges ending in a half-loop.
pub fn vlg(t: &OrderedGraph, k: &[usize]) -> Result<OrderedGraph> {
    let g = &t.graph;
    if k.len() != g.num_dir_edges() {
        return Err(Error::pre("one length per directed edge is required"));
    }
    for e in 0..g.num_dir_edges() {
        if k[e] == 0 || k[e] != k[g.iota(e)] {
            return Err(Error::pre(format!("bad length at edge {e}")));
        }
    }
    let nv0 = g.num_vertices();
    let mut orient: Vec<usize> = (0..g.num_dir_edges()).filter(|&e| t.ordering.oriented[e]).collect();
    orient.sort_by_key(|&e| t.ordering.edge_rank[e]);
    let mut b = GraphBuilder::new(nv0);
    let mut vrank: Vec<usize> = t.ordering.vertex_rank.clone();
    let mut erank = Vec::new();
    let mut oriented = Vec::new();
    let mut next_rank = 0;
    for &e in &orient {
        let mut prev = g.tail(e);
        let hops = if g.is_half_loop(e) { k[e] - 1 } else { k[e] };
        for step in 0..hops {
            let to = if step + 1 == hops && !g.is_half_loop(e) {
                g.head(e)
            } else {
                vrank.push(vrank.len());
                b.add_vertex()
            };
            b.add_edge(prev, to);
            erank.extend([next_rank, next_rank]);
            oriented.extend([true, false]);
            next_rank += 1;
            prev = to;
        }
        if g.is_half_loop(e) {
            b.add_half_loop(prev);
            erank.push(next_rank);
            oriented.push(true);
            next_rank += 1;
        }
    }
    let graph = b.build();
    let ordering = Ordering { vertex_rank: vrank, edge_rank: erank, oriented };
    ordering.validate(&graph)?;
    Ok(OrderedGraph { graph, ordering })
}

/// Reduction edges of the walk's visited subgraph mapped to the strings of
/// base directed edges along their beaded paths.
#[derive(Clone, Debug)]
pub struct Wording {
    pub homotopy: HomotopyData,
    pub words: Vec<Vec<usize>>,
}

/// Suppresses every bead of the visited subgraph except the start vertex.
pub fn induced_wording(w: &Walk, host: &BGraph) -> Result<Wording> {
    if !w.is_non_backtracking() {
        return Err(Error::pre("walk backtracks"));
    }
    let (og, _, eorig) = visited_subgraph_with_origin(w);
    // The start vertex is id 0 in the visited subgraph.
    let beads = all_beads_except(&og.graph, &[0]);
    let hd = suppress_beads(&og, &beads)?;
    let words = hd
        .paths
        .iter()
        .map(|p| p.iter().map(|&y| host.dir_edge_map[eorig[y]]).collect())
        .collect();
    Ok(Wording { homotopy: hd, words })
}
