//! Exact expected counts of étale B-graphs in the random cover models, their
//! expansions in `1/n`, and Monte Carlo estimates of the same quantities.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::covers::{fibre_counts, is_etale, sample_unchecked, BGraph, CoverPattern, ModelKind, ModelSpec};
use crate::error::{Error, Result};
use crate::graph::{stats, Graph, GraphBuilder};

fn rat(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// Directed edges of `s` lying over `e`, as (tail, head) pairs of `s`.
fn lifts_over(s: &BGraph, e: usize) -> Vec<usize> {
    (0..s.total.num_dir_edges()).filter(|&f| s.dir_edge_map[f] == e).collect()
}

/// Shape of the partial injection `tail -> head` given by the lifts of a
/// whole-loop: `(number of edges, cycle lengths)`.
fn injection_cycles(s: &BGraph, e: usize) -> (usize, Vec<usize>) {
    let lifts = lifts_over(s, e);
    let mut next: HashMap<usize, usize> = HashMap::new();
    for &f in &lifts {
        next.insert(s.total.tail(f), s.total.head(f));
    }
    let mut cycles = Vec::new();
    let mut seen: HashMap<usize, bool> = HashMap::new();
    for &f in &lifts {
        let start = s.total.tail(f);
        if seen.contains_key(&start) {
            continue;
        }
        // Walk forward; a cycle returns to `start` before leaving the map.
        let mut len = 0;
        let mut cur = start;
        let mut closed = false;
        while let Some(&nx) = next.get(&cur) {
            len += 1;
            cur = nx;
            if cur == start {
                closed = true;
                break;
            }
            if len > lifts.len() {
                break;
            }
        }
        if closed {
            let mut c = start;
            loop {
                seen.insert(c, true);
                c = next[&c];
                if c == start {
                    break;
                }
            }
            cycles.push(len);
        }
    }
    (lifts.len(), cycles)
}

/// The lifts of the whole-loop `e` form an acyclic partial injection.
pub fn cyclic_feasible(s: &BGraph, e: usize) -> bool {
    injection_cycles(s, e).1.is_empty()
}

/// Whether the lifts of `e` can be extended to an n-cycle: acyclic, or a
/// single cycle through all `n` points.
pub fn cyclic_feasible_for(s: &BGraph, e: usize, n: usize) -> bool {
    let (a, cycles) = injection_cycles(s, e);
    cycles.is_empty() || (cycles.len() == 1 && a == n && cycles[0] == n)
}

/// Lifts of a half-loop `e`: (half-loops of `s` over it, orbits of size two).
fn half_loop_lifts(s: &BGraph, e: usize) -> (usize, usize) {
    let lifts = lifts_over(s, e);
    let h = lifts.iter().filter(|&&f| s.total.is_half_loop(f)).count();
    (h, (lifts.len() - h) / 2)
}

fn check_model(s: &BGraph, kind: ModelKind) -> Result<()> {
    if !kind.allows_half_loops() && s.base.has_half_loops() {
        return Err(Error::Model { model: kind.name().into(), reason: "base has half-loops".into() });
    }
    Ok(())
}

/// Expected number of injective B-graph morphisms `s -> G` for `G` drawn from
/// the model at degree `n`. Exact whenever every fibre of `s` has at most `n`
/// vertices; zero otherwise.
pub fn expected_count(s: &BGraph, n: usize, kind: ModelKind) -> Result<BigRational> {
    check_model(s, kind)?;
    kind.check(&s.base, n)?;
    if !is_etale(s) {
        return Ok(BigRational::zero());
    }
    let fc = fibre_counts(s);
    if fc.b.iter().any(|&b| b > n) {
        return Ok(BigRational::zero());
    }
    let n = n as i64;
    let mut num = BigInt::one();
    for &b in &fc.b {
        for j in 0..b as i64 {
            num *= n - j;
        }
    }
    let mut den = BigInt::one();
    let base = &s.base;
    for e in base.orientation() {
        if base.is_half_loop(e) {
            let (h, p) = half_loop_lifts(s, e);
            match kind.parity() {
                Some(crate::covers::Parity::Even) => {
                    if h > 0 {
                        return Ok(BigRational::zero());
                    }
                    for j in 0..p as i64 {
                        den *= n - 2 * j - 1;
                    }
                }
                Some(crate::covers::Parity::Odd) => {
                    if h > 1 {
                        return Ok(BigRational::zero());
                    }
                    for j in 0..(p + h) as i64 {
                        den *= n - 2 * j;
                    }
                }
                None => unreachable!("checked above"),
            }
        } else if kind.is_cyclic() && base.is_whole_loop(e) {
            let (a, cycles) = injection_cycles(s, e);
            if cycles.is_empty() {
                for j in 1..=a as i64 {
                    den *= n - j;
                }
            } else if cycles.len() == 1 && a as i64 == n && cycles[0] as i64 == n {
                for j in 1..n {
                    den *= j;
                }
            } else {
                return Ok(BigRational::zero());
            }
        } else {
            for j in 0..fc.a[e] as i64 {
                den *= n - j;
            }
        }
    }
    Ok(BigRational::new(num, den))
}

/// `E * n^{ord S}` as a power series in `x = 1/n`, truncated to `r` terms.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionSeries {
    /// Exponent of `n` in the leading term, `-ord(S)`.
    pub leading_power: i64,
    pub coeffs: Vec<BigRational>,
    pub r: usize,
}

impl ExpansionSeries {
    pub fn evaluate_exact(&self, n: usize) -> BigRational {
        let x = BigRational::new(BigInt::one(), BigInt::from(n));
        let mut acc = BigRational::zero();
        let mut p = BigRational::one();
        for c in &self.coeffs {
            acc += c * &p;
            p *= &x;
        }
        let scale = if self.leading_power >= 0 {
            BigRational::from_integer(BigInt::from(n).pow(self.leading_power as u32))
        } else {
            BigRational::new(BigInt::one(), BigInt::from(n).pow((-self.leading_power) as u32))
        };
        acc * scale
    }

    pub fn evaluate(&self, n: usize) -> f64 {
        self.evaluate_exact(n).to_f64().unwrap_or(f64::NAN)
    }
}

fn series_mul(a: &[BigRational], b: &[BigRational], r: usize) -> Vec<BigRational> {
    let mut c = vec![BigRational::zero(); r];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if i + j < r {
                c[i + j] += x * y;
            }
        }
    }
    c
}

/// `1 - c x`.
fn linear(c: i64, r: usize) -> Vec<BigRational> {
    let mut v = vec![BigRational::zero(); r];
    if r > 0 {
        v[0] = BigRational::one();
    }
    if r > 1 {
        v[1] = rat(-c);
    }
    v
}

/// `1 / (1 - c x)`.
fn geometric(c: i64, r: usize) -> Vec<BigRational> {
    let mut v = Vec::with_capacity(r);
    let mut p = BigRational::one();
    for _ in 0..r {
        v.push(p.clone());
        p *= rat(c);
    }
    v
}

pub fn expansion_series(s: &BGraph, kind: ModelKind, r: usize) -> Result<ExpansionSeries> {
    check_model(s, kind)?;
    let not_occurring = |why: &str| Err(Error::pre(format!("pattern does not occur: {why}")));
    if !is_etale(s) {
        return not_occurring("not étale");
    }
    let fc = fibre_counts(s);
    let mut series = geometric(0, r);
    for &b in &fc.b {
        for j in 0..b as i64 {
            series = series_mul(&series, &linear(j, r), r);
        }
    }
    let base = &s.base;
    for e in base.orientation() {
        let factors: Vec<i64> = if base.is_half_loop(e) {
            let (h, p) = half_loop_lifts(s, e);
            match kind.parity() {
                Some(crate::covers::Parity::Even) => {
                    if h > 0 {
                        return not_occurring("half-loop in an even-degree model");
                    }
                    (0..p as i64).map(|j| 2 * j + 1).collect()
                }
                Some(crate::covers::Parity::Odd) => {
                    if h > 1 {
                        return not_occurring("two half-loops over one base half-loop");
                    }
                    (0..(p + h) as i64).map(|j| 2 * j).collect()
                }
                None => unreachable!("checked above"),
            }
        } else if kind.is_cyclic() && base.is_whole_loop(e) {
            if !cyclic_feasible(s, e) {
                return not_occurring("cycle over a whole-loop in a cyclic model");
            }
            (1..=fc.a[e] as i64).collect()
        } else {
            (0..fc.a[e] as i64).collect()
        };
        for c in factors {
            series = series_mul(&series, &geometric(c, r), r);
        }
    }
    Ok(ExpansionSeries { leading_power: -stats(&s.total).order, coeffs: series, r })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
}

impl McEstimate {
    /// From exact integer moments.
    pub fn from_sums(sum: u128, sum_sq: u128, trials: u64) -> Self {
        let t = trials as f64;
        let mean = sum as f64 / t;
        let var = if trials > 1 {
            // Exact numerator t*sum_sq - sum^2, then scale.
            let num = (trials as u128) * sum_sq - sum * sum;
            num as f64 / (t * (t - 1.0))
        } else {
            0.0
        };
        McEstimate { mean, stderr: (var / t).sqrt(), trials }
    }

    pub fn z_score(&self, exact: f64) -> f64 {
        let d = self.mean - exact;
        if d == 0.0 {
            0.0
        } else {
            d / self.stderr
        }
    }
}

const CHUNK: u64 = 2048;

/// Per-pattern integer sums of counts and squared counts over `trials` covers.
fn sums_many(patterns: &[CoverPattern], base: &Graph, n: usize, spec: &ModelSpec, trials: u64) -> Vec<(u128, u128)> {
    let chunks = trials.div_ceil(CHUNK);
    let partial: Vec<Vec<(u128, u128)>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![(0u128, 0u128); patterns.len()];
            for t in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                let cover = sample_unchecked(base, n, spec, t);
                for (p, a) in patterns.iter().zip(acc.iter_mut()) {
                    let x = p.count(&cover) as u128;
                    a.0 += x;
                    a.1 += x * x;
                }
            }
            acc
        })
        .collect();
    let mut total = vec![(0u128, 0u128); patterns.len()];
    for part in partial {
        for (t, p) in total.iter_mut().zip(part) {
            t.0 += p.0;
            t.1 += p.1;
        }
    }
    total
}

/// Sample mean and standard error of the embedding count over independent
/// covers; trial `t` uses the cover drawn with trial index `t`.
pub fn monte_carlo_expected_count(s: &BGraph, n: usize, spec: &ModelSpec, trials: u64) -> Result<McEstimate> {
    Ok(monte_carlo_many(std::slice::from_ref(s), n, spec, trials)?[0])
}

/// Several patterns over the same base, counted on shared covers.
pub fn monte_carlo_many(patterns: &[BGraph], n: usize, spec: &ModelSpec, trials: u64) -> Result<Vec<McEstimate>> {
    if trials == 0 {
        return Err(Error::pre("at least one trial is required"));
    }
    let Some(first) = patterns.first() else {
        return Ok(vec![]);
    };
    let base = &first.base;
    if patterns.iter().any(|p| &p.base != base) {
        return Err(Error::pre("patterns live over different bases"));
    }
    spec.kind.check(base, n)?;
    let compiled: Vec<CoverPattern> = patterns.iter().map(CoverPattern::new).collect();
    Ok(sums_many(&compiled, base, n, spec, trials)
        .into_iter()
        .map(|(s, q)| McEstimate::from_sums(s, q, trials))
        .collect())
}

/// Labelled étale B-graph given by partial maps on fibres `0..b(v)`: for a
/// non-half-loop orbit representative, `map[x]` is the head index of the lift
/// leaving `x`; for a half-loop, `map` is a partial involution whose fixed
/// points are half-loops.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct EtaleCode {
    b: Vec<usize>,
    maps: Vec<Vec<Option<usize>>>,
}

fn build_etale(base: &Graph, code: &EtaleCode) -> BGraph {
    let mut off = vec![0; code.b.len()];
    for v in 1..code.b.len() {
        off[v] = off[v - 1] + code.b[v - 1];
    }
    let nv: usize = code.b.iter().sum();
    let mut gb = GraphBuilder::new(nv);
    let mut vmap = Vec::with_capacity(nv);
    for (v, &b) in code.b.iter().enumerate() {
        vmap.extend(std::iter::repeat_n(v, b));
    }
    let mut emap = Vec::new();
    for (e, map) in base.orientation().into_iter().zip(&code.maps) {
        let (t, h) = (base.tail(e), base.head(e));
        for (x, y) in map.iter().enumerate() {
            let Some(y) = *y else { continue };
            if base.is_half_loop(e) {
                if y == x {
                    gb.add_half_loop(off[t] + x);
                    emap.push(e);
                } else if x < y {
                    gb.add_edge(off[t] + x, off[t] + y);
                    emap.extend([e, e]);
                }
            } else {
                gb.add_edge(off[t] + x, off[h] + y);
                emap.extend([e, base.iota(e)]);
            }
        }
    }
    BGraph::new(gb.build(), base.clone(), vmap, emap).expect("étale code builds a B-graph")
}

fn partial_injections(src: usize, dst: usize, max_edges: usize, out: &mut Vec<Vec<Option<usize>>>) {
    fn rec(x: usize, src: usize, dst: usize, left: usize, used: &mut Vec<bool>, cur: &mut Vec<Option<usize>>, out: &mut Vec<Vec<Option<usize>>>) {
        if x == src {
            out.push(cur.clone());
            return;
        }
        cur.push(None);
        rec(x + 1, src, dst, left, used, cur, out);
        cur.pop();
        if left == 0 {
            return;
        }
        for y in 0..dst {
            if !used[y] {
                used[y] = true;
                cur.push(Some(y));
                rec(x + 1, src, dst, left - 1, used, cur, out);
                cur.pop();
                used[y] = false;
            }
        }
    }
    rec(0, src, dst, max_edges, &mut vec![false; dst], &mut Vec::new(), out);
}

/// Partial involutions on `0..m` with at most `max_orbits` orbits.
fn partial_involutions(m: usize, max_orbits: usize, out: &mut Vec<Vec<Option<usize>>>) {
    fn rec(cur: &mut Vec<Option<usize>>, left: usize, out: &mut Vec<Vec<Option<usize>>>, decided: &mut Vec<bool>) {
        let Some(x) = decided.iter().position(|&d| !d) else {
            out.push(cur.clone());
            return;
        };
        decided[x] = true;
        rec(cur, left, out, decided);
        if left > 0 {
            cur[x] = Some(x);
            rec(cur, left - 1, out, decided);
            for y in x + 1..cur.len() {
                if !decided[y] {
                    decided[y] = true;
                    cur[x] = Some(y);
                    cur[y] = Some(x);
                    rec(cur, left - 1, out, decided);
                    cur[y] = None;
                    decided[y] = false;
                }
            }
            cur[x] = None;
        }
        decided[x] = false;
    }
    rec(&mut vec![None; m], max_orbits, out, &mut vec![false; m]);
}

fn map_edges(map: &[Option<usize>], half: bool) -> usize {
    let c = map.iter().enumerate().filter(|(x, y)| y.is_some_and(|y| !half || y >= *x)).count();
    c
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..m).collect();
    fn heap(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(cur.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, cur, out);
            if k.is_multiple_of(2) {
                cur.swap(i, k - 1);
            } else {
                cur.swap(0, k - 1);
            }
        }
    }
    heap(m, &mut cur, &mut out);
    out
}

/// Smallest code over all relabellings of the fibres.
fn canonical(base: &Graph, code: &EtaleCode, perms: &[Vec<Vec<usize>>]) -> EtaleCode {
    let orient = base.orientation();
    let mut best: Option<EtaleCode> = None;
    let nvb = code.b.len();
    let mut choice = vec![0usize; nvb];
    loop {
        let pi: Vec<&Vec<usize>> = (0..nvb).map(|v| &perms[code.b[v]][choice[v]]).collect();
        let maps = orient
            .iter()
            .zip(&code.maps)
            .map(|(&e, map)| {
                let (t, h) = (base.tail(e), base.head(e));
                let mut m2 = vec![None; map.len()];
                for (x, y) in map.iter().enumerate() {
                    if let Some(y) = y {
                        m2[pi[t][x]] = Some(pi[h][*y]);
                    }
                }
                m2
            })
            .collect();
        let cand = EtaleCode { b: code.b.clone(), maps };
        if best.as_ref().is_none_or(|b| cand < *b) {
            best = Some(cand);
        }
        let mut v = 0;
        loop {
            if v == nvb {
                return best.unwrap();
            }
            choice[v] += 1;
            if choice[v] < perms[code.b[v]].len() {
                break;
            }
            choice[v] = 0;
            v += 1;
        }
    }
}

/// Étale B-graphs over `base` with at most `max_edges` edges, one per
/// B-isomorphism class, optionally only pruned and/or connected ones. The
/// empty graph is excluded.
///
/// Deduplication tries every relabelling of every fibre, so the cost grows
/// with the factorial of the largest fibre: up to `max_edges` vertices for
/// pruned graphs and `2 * max_edges` otherwise.
pub fn enumerate_etale(base: &Graph, max_edges: usize, pruned_only: bool, connected_only: bool) -> Vec<BGraph> {
    let orient = base.orientation();
    let nvb = base.num_vertices();
    // Pruned graphs have at most as many vertices as edges; otherwise allow
    // every vertex to be an endpoint.
    let max_v = if pruned_only { max_edges } else { 2 * max_edges.max(1) };
    let perms: Vec<Vec<Vec<usize>>> = (0..=max_v).map(permutations).collect();
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    let mut b = vec![0usize; nvb];
    loop {
        let total_v: usize = b.iter().sum();
        if total_v >= 1 && total_v <= max_v {
            let mut codes: Vec<Vec<Vec<Option<usize>>>> = vec![vec![]];
            for &e in &orient {
                let mut opts = Vec::new();
                if base.is_half_loop(e) {
                    partial_involutions(b[base.tail(e)], max_edges, &mut opts);
                } else {
                    partial_injections(b[base.tail(e)], b[base.head(e)], max_edges, &mut opts);
                }
                let half = base.is_half_loop(e);
                let mut next = Vec::new();
                for prefix in &codes {
                    let used: usize =
                        prefix.iter().zip(&orient).map(|(m, &f)| map_edges(m, base.is_half_loop(f))).sum();
                    for o in &opts {
                        if used + map_edges(o, half) <= max_edges {
                            let mut p = prefix.clone();
                            p.push(o.clone());
                            next.push(p);
                        }
                    }
                }
                codes = next;
            }
            for maps in codes {
                let code = EtaleCode { b: b.clone(), maps };
                let s = build_etale(base, &code);
                if pruned_only && (s.total.num_vertices() == 0 || crate::graph::prune(&s.total).num_vertices() != s.total.num_vertices()) {
                    continue;
                }
                if connected_only && !s.total.is_connected() {
                    continue;
                }
                let can = canonical(base, &code, &perms);
                if seen.insert(can) {
                    out.push(s);
                }
            }
        }
        let mut v = 0;
        loop {
            if v == nvb {
                return out;
            }
            b[v] += 1;
            if b.iter().sum::<usize>() <= max_v {
                break;
            }
            b[v] = 0;
            v += 1;
        }
    }
}

/// Short identifier of a B-graph pattern: fibre sizes and edge list.
pub fn pattern_id(s: &BGraph) -> String {
    let fc = fibre_counts(s);
    let b: Vec<String> = fc.b.iter().map(|x| x.to_string()).collect();
    let mut edges = Vec::new();
    for f in s.total.orientation() {
        edges.push(format!("{}-{}:{}", s.total.tail(f), s.total.head(f), s.dir_edge_map[f]));
    }
    format!("b{}|{}", b.join("."), edges.join(","))
}
