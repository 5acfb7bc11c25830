//! Tangles, relative trees, Shannon's valence, and the Rayleigh-quotient and
//! push-forward tools used to compare covers with trees.

use std::collections::{HashSet, VecDeque};

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::covers::{realize, sample_unchecked, BGraph, CoverPattern, ModelSpec};
use crate::error::{Error, Result};
use crate::graph::{adjacency_matrix, degree_matrix, hashimoto_matrix, prune, stats, Graph, GraphBuilder};
use crate::spectra::{new_spectrum, perron_eigenvalue, symmetric_eigenvalues, MATCH_TOL};

/// Perron eigenvalue of the non-backtracking matrix; 0 for a graph without
/// edges.
pub fn mu1(psi: &Graph) -> Result<f64> {
    if psi.num_vertices() == 0 {
        return Err(Error::pre("graph is empty"));
    }
    perron_eigenvalue(&hashimoto_matrix(psi))
}

pub fn m_lower(d: usize) -> Result<usize> {
    if d < 3 {
        return Err(Error::pre(format!("degree {d} < 3")));
    }
    let s = ((d - 1) as f64).sqrt();
    Ok(((s - 1.0) / 2.0).floor() as usize + 1)
}

fn check_mu(mu: f64, d: usize) -> Result<()> {
    if d < 3 {
        return Err(Error::pre(format!("degree {d} < 3")));
    }
    if mu <= ((d - 1) as f64).sqrt() {
        return Err(Error::pre(format!("mu1 = {mu} does not exceed sqrt(d-1)")));
    }
    Ok(())
}

/// `mu + (d-1)/mu - 2 sqrt(d-1)` for `mu = mu1(psi)`.
pub fn epsilon0(psi: &Graph, d: usize) -> Result<f64> {
    let mu = mu1(psi)?;
    epsilon0_from_mu(mu, d)
}

pub fn epsilon0_from_mu(mu: f64, d: usize) -> Result<f64> {
    check_mu(mu, d)?;
    let q = (d - 1) as f64;
    Ok(mu + q / mu - 2.0 * q.sqrt())
}

/// Norm of the adjacency operator of the `d`-regular tree-completion of `psi`.
pub fn tree_radius(psi: &Graph, d: usize) -> Result<f64> {
    if psi.degrees().into_iter().any(|x| x > d) {
        return Err(Error::pre(format!("a vertex has degree above {d}")));
    }
    let mu = mu1(psi)?;
    check_mu(mu, d)?;
    Ok(mu + (d - 1) as f64 / mu)
}

/// `R` rounds of completing every vertex of degree below `d` with pendant
/// edges to fresh leaves. Vertices of `psi` keep their ids.
pub fn build_relative_tree(psi: &Graph, d: usize, depth: usize) -> Result<Graph> {
    let mut deg = psi.degrees();
    if deg.iter().any(|&x| x > d) {
        return Err(Error::pre(format!("a vertex has degree above {d}")));
    }
    let mut out = GraphBuilder::new(psi.num_vertices());
    for e in psi.orientation() {
        if psi.is_half_loop(e) {
            out.add_half_loop(psi.tail(e));
        } else {
            out.add_edge(psi.tail(e), psi.head(e));
        }
    }
    let mut frontier: Vec<usize> = (0..psi.num_vertices()).collect();
    for _ in 0..depth {
        let mut next = Vec::new();
        for &v in &frontier {
            while deg[v] < d {
                let w = out.add_vertex();
                deg.push(1);
                deg[v] += 1;
                out.add_edge(v, w);
                next.push(w);
            }
        }
        frontier = next;
    }
    Ok(out.build())
}

/// Tree completion relative to a base: every vertex of `psi` over `v` gains a
/// lift of each base directed edge at `v` it is missing. Base half-loops are
/// completed by half-loops, other edges by pendant edges to fresh vertices.
pub fn build_relative_tree_over(psi: &BGraph, depth: usize) -> Result<BGraph> {
    let base = &psi.base;
    let mut tail: Vec<usize> = (0..psi.total.num_dir_edges()).map(|e| psi.total.tail(e)).collect();
    let mut head: Vec<usize> = (0..psi.total.num_dir_edges()).map(|e| psi.total.head(e)).collect();
    let mut iota: Vec<usize> = (0..psi.total.num_dir_edges()).map(|e| psi.total.iota(e)).collect();
    let mut vmap = psi.vertex_map.clone();
    let mut emap = psi.dir_edge_map.clone();
    if !crate::covers::is_etale(psi) {
        return Err(Error::pre("pattern is not étale over the base"));
    }
    let base_out = base.out_edges();
    let mut frontier: Vec<usize> = (0..psi.total.num_vertices()).collect();
    for _ in 0..depth {
        let mut next = Vec::new();
        for &u in &frontier {
            let have: HashSet<usize> = (0..tail.len()).filter(|&f| tail[f] == u).map(|f| emap[f]).collect();
            for &e in &base_out[vmap[u]] {
                if have.contains(&e) {
                    continue;
                }
                let id = tail.len();
                if base.is_half_loop(e) {
                    tail.push(u);
                    head.push(u);
                    iota.push(id);
                    emap.push(e);
                } else {
                    let w = vmap.len();
                    vmap.push(base.head(e));
                    tail.extend([u, w]);
                    head.extend([w, u]);
                    iota.extend([id + 1, id]);
                    emap.extend([e, base.iota(e)]);
                    next.push(w);
                }
            }
        }
        frontier = next;
    }
    let total = Graph::new(vmap.len(), tail, head, iota)?;
    BGraph::new(total, base.clone(), vmap, emap)
}

/// Largest adjacency eigenvalue of the depth-`R` completion. Vertices at the
/// same depth below the same vertex of `psi` are interchangeable, so the
/// Perron value is that of the level quotient.
pub fn truncated_tree_radius(psi: &Graph, d: usize, depth: usize) -> Result<f64> {
    let deg = psi.degrees();
    if deg.iter().any(|&x| x > d) {
        return Err(Error::pre(format!("a vertex has degree above {d}")));
    }
    let nv = psi.num_vertices();
    let size = nv + nv * depth;
    let mut q = DMatrix::zeros(size, size);
    let a = adjacency_matrix(psi);
    for i in 0..nv {
        for j in 0..nv {
            q[(i, j)] = a[(i, j)];
        }
    }
    let level = |v: usize, j: usize| nv + v * depth + (j - 1);
    for v in 0..nv {
        let k = d - deg[v];
        if k == 0 || depth == 0 {
            continue;
        }
        q[(v, level(v, 1))] = k as f64;
        q[(level(v, 1), v)] = 1.0;
        for j in 1..depth {
            q[(level(v, j), level(v, j + 1))] = (d - 1) as f64;
            q[(level(v, j + 1), level(v, j))] = 1.0;
        }
    }
    perron_eigenvalue(&q)
}

#[derive(Clone, Debug, Serialize)]
pub struct ShannonResult {
    pub valence: f64,
    pub z0: f64,
    pub bisection_residual: f64,
}

/// `Z(z)[h(e), t(e)] += z^k(e)`.
pub fn length_matrix(t: &Graph, lengths: &[usize], z: f64) -> DMatrix<f64> {
    let n = t.num_vertices();
    let mut m = DMatrix::zeros(n, n);
    for e in 0..t.num_dir_edges() {
        m[(t.head(e), t.tail(e))] += z.powi(lengths[e] as i32);
    }
    m
}

/// Bisection for the `z` where the spectral radius of `Z(z)` equals one.
pub fn shannon_valence(t: &Graph, lengths: &[usize]) -> Result<ShannonResult> {
    if lengths.len() != t.num_dir_edges() || lengths.contains(&0) {
        return Err(Error::pre("one positive length per directed edge is required"));
    }
    if (0..t.num_dir_edges()).any(|e| lengths[e] != lengths[t.iota(e)]) {
        return Err(Error::pre("lengths must agree on iota-orbits"));
    }
    let rho = |z: f64| perron_eigenvalue(&length_matrix(t, lengths, z));
    let at_one = rho(1.0)?;
    if at_one < 1.0 {
        return Err(Error::pre(format!("spectral radius at z = 1 is {at_one} < 1; valence is below 1")));
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut z = 1.0;
    let mut r = at_one - 1.0;
    for _ in 0..200 {
        if r.abs() < 1e-10 || hi - lo < 1e-15 {
            break;
        }
        z = 0.5 * (lo + hi);
        r = rho(z)? - 1.0;
        if r > 0.0 {
            hi = z;
        } else {
            lo = z;
        }
    }
    Ok(ShannonResult { valence: 1.0 / z, z0: z, bisection_residual: r.abs() })
}

/// Coefficients `a_2, ..., a_K` of `(1 - sqrt(1 - 4(d-1) z^2)) / 2`.
pub fn s_d_series(d: usize, k_max: usize) -> Result<Vec<BigRational>> {
    if d < 3 {
        return Err(Error::pre(format!("degree {d} < 3")));
    }
    if k_max > 40 {
        return Err(Error::pre("at most 40 coefficients"));
    }
    let q = BigRational::from_integer(BigInt::from(d - 1));
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut out = Vec::new();
    // binom(1/2, j) (-4(d-1))^j, updated incrementally.
    let mut binom = BigRational::one();
    let mut pw = BigRational::one();
    let minus4q = -BigRational::from_integer(BigInt::from(4)) * &q;
    let mut by_power = vec![BigRational::zero(); k_max + 1];
    for j in 1..=k_max / 2 {
        binom = binom * (&half - BigRational::from_integer(BigInt::from(j - 1))) / BigRational::from_integer(BigInt::from(j));
        pw *= &minus4q;
        by_power[2 * j] = -(&binom * &pw) / BigRational::from_integer(BigInt::from(2));
    }
    for k in 2..=k_max {
        out.push(by_power[k].clone());
    }
    Ok(out)
}

pub fn s_d(d: usize, z: f64) -> f64 {
    (1.0 - (1.0 - 4.0 * (d - 1) as f64 * z * z).sqrt()) / 2.0
}

/// Largest entrywise difference between `I - Z(z)` and
/// `(1 - S)(I - yA + y^2 (D - I))`, over the sample points.
pub fn curious_identity_check(psi: &Graph, d: usize, z_samples: &[f64]) -> Result<f64> {
    if d < 3 {
        return Err(Error::pre(format!("degree {d} < 3")));
    }
    let zmax = 1.0 / (2.0 * ((d - 1) as f64).sqrt());
    let n = psi.num_vertices();
    let a = adjacency_matrix(psi);
    let dm = degree_matrix(psi);
    let id = DMatrix::<f64>::identity(n, n);
    let mut worst: f64 = 0.0;
    for &z in z_samples {
        if !(z > 0.0 && z < zmax) {
            return Err(Error::pre(format!("z = {z} is outside (0, {zmax})")));
        }
        let s = s_d(d, z);
        let zmat = &a * z + (&id * d as f64 - &dm) * (s / (d - 1) as f64);
        let lhs = &id - zmat;
        let y = z / (1.0 - s);
        let rhs = (&id - &a * y + (&dm - &id) * (y * y)) * (1.0 - s);
        worst = worst.max((lhs - rhs).amax());
    }
    Ok(worst)
}

/// Smallest positive root of `det(I - yA + y^2(D - I))` by scanning and
/// bisection on `(0, 1]`.
pub fn ihara_smallest_root(psi: &Graph) -> Option<f64> {
    let n = psi.num_vertices();
    let a = adjacency_matrix(psi);
    let dm = degree_matrix(psi);
    let id = DMatrix::<f64>::identity(n, n);
    let f = |y: f64| crate::spectra::det_lu(&(&id - &a * y + (&dm - &id) * (y * y)));
    let steps = 20_000;
    let mut prev_y = 0.0;
    let mut prev = f(0.0);
    for i in 1..=steps {
        let y = i as f64 / steps as f64;
        let cur = f(y);
        if cur == 0.0 {
            return Some(y);
        }
        if cur.signum() != prev.signum() {
            let (mut lo, mut hi) = (prev_y, y);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let fm = f(mid);
                if fm == 0.0 {
                    return Some(mid);
                }
                if fm.signum() == prev.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Some(0.5 * (lo + hi));
        }
        prev = cur;
        prev_y = y;
    }
    None
}

#[derive(Clone, Debug, Serialize)]
pub struct TangleWitness {
    /// Vertex and directed-edge ids in the searched graph.
    pub vertices: Vec<usize>,
    pub dir_edges: Vec<usize>,
    pub mu1: f64,
    pub order: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TangleReport {
    pub nu: f64,
    pub r: i64,
    pub found: bool,
    pub witness: Option<TangleWitness>,
    pub search_budget_exhausted: bool,
}

/// Hard cap on candidate subgraphs examined by [`has_tangles`].
pub const TANGLE_CANDIDATE_CAP: usize = 200_000;

/// Looks for a connected subgraph of order below `r` with `mu1 >= nu`, growing
/// connected edge sets of the 2-core from each edge up to `edge_budget` edges.
/// Any witness is genuine; absence is only certain when the report says the
/// budget was not exhausted.
pub fn has_tangles(g: &Graph, nu: f64, r: i64, edge_budget: usize) -> Result<TangleReport> {
    if nu <= 1.0 {
        return Err(Error::pre("nu must exceed 1"));
    }
    let (core, vorig, eorig) = crate::graph::prune_with_maps(g);
    let orbits = core.orientation();
    let mut orbit_of = vec![0; core.num_dir_edges()];
    for (i, &e) in orbits.iter().enumerate() {
        orbit_of[e] = i;
        orbit_of[core.iota(e)] = i;
    }
    let out = core.out_edges();
    let mut report = TangleReport { nu, r, found: false, witness: None, search_budget_exhausted: false };
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut queue: VecDeque<Vec<usize>> = VecDeque::new();
    for i in 0..orbits.len() {
        if seen.insert(vec![i]) {
            queue.push_back(vec![i]);
        }
    }
    while let Some(set) = queue.pop_front() {
        if seen.len() > TANGLE_CANDIDATE_CAP {
            report.search_budget_exhausted = true;
            break;
        }
        let mut keep_v = vec![false; core.num_vertices()];
        let mut keep_e = vec![false; core.num_dir_edges()];
        for &i in &set {
            let e = orbits[i];
            keep_e[e] = true;
            keep_e[core.iota(e)] = true;
            keep_v[core.tail(e)] = true;
            keep_v[core.head(e)] = true;
        }
        let (sub, sv, se) = core.subgraph(&keep_v, &keep_e)?;
        let ord = stats(&sub).order;
        if ord >= r {
            continue;
        }
        let pr = prune(&sub);
        if pr.num_dir_edges() > 0 {
            let m = mu1(&pr)?;
            if m >= nu {
                report.found = true;
                report.witness = Some(TangleWitness {
                    vertices: sv.iter().map(|&v| vorig[v]).collect(),
                    dir_edges: se.iter().map(|&e| eorig[e]).collect(),
                    mu1: m,
                    order: ord,
                });
                return Ok(report);
            }
        }
        if set.len() >= edge_budget {
            report.search_budget_exhausted = true;
            continue;
        }
        let mut ext: Vec<usize> = Vec::new();
        for v in (0..core.num_vertices()).filter(|&v| keep_v[v]) {
            for &e in &out[v] {
                let o = orbit_of[e];
                if !set.contains(&o) && !ext.contains(&o) {
                    ext.push(o);
                }
            }
        }
        for o in ext {
            let mut next = set.clone();
            next.push(o);
            next.sort_unstable();
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    Ok(report)
}

/// `(Mf, f) / (f, f)`.
pub fn rayleigh(m: &DMatrix<f64>, f: &DVector<f64>) -> Result<f64> {
    let ff = f.dot(f);
    if ff == 0.0 {
        return Err(Error::pre("zero vector"));
    }
    Ok((m * f).dot(f) / ff)
}

/// Star bijectivity of a B-graph's structure map.
pub fn is_covering(t: &BGraph) -> bool {
    let out_t = t.total.out_edges();
    let out_b = t.base.out_edges();
    out_t.iter().enumerate().all(|(u, star)| {
        let mut imgs: Vec<usize> = star.iter().map(|&f| t.dir_edge_map[f]).collect();
        imgs.sort_unstable();
        let mut want = out_b[t.vertex_map[u]].clone();
        want.sort_unstable();
        imgs == want
    })
}

/// `(pi_* f)(v) = sum over u above v of f(u)`.
pub fn push_forward(pi: &BGraph, f: &[f64]) -> Result<Vec<f64>> {
    if f.len() != pi.total.num_vertices() {
        return Err(Error::pre("vector length differs from the vertex count"));
    }
    if !is_covering(pi) {
        return Err(Error::pre("map is not a covering morphism"));
    }
    let mut out = vec![0.0; pi.base.num_vertices()];
    for (u, &x) in f.iter().enumerate() {
        out[pi.vertex_map[u]] += x;
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct FundamentalRow {
    pub n: usize,
    pub conditioned: bool,
    pub lambda: f64,
    pub draws: u64,
    /// Largest new adjacency eigenvalue of each kept sample.
    pub max_new: Vec<f64>,
}

impl FundamentalRow {
    pub fn fraction_at_least(&self, x: f64) -> f64 {
        if self.max_new.is_empty() {
            return 0.0;
        }
        self.max_new.iter().filter(|&&m| m >= x).count() as f64 / self.max_new.len() as f64
    }
}

fn max_new_eigenvalue(cover: &crate::covers::CoordCover, base_spec: &[f64]) -> Result<f64> {
    let g = realize(cover).total;
    let spec = symmetric_eigenvalues(&adjacency_matrix(&g))?;
    let new = new_spectrum(&spec, base_spec, MATCH_TOL)?;
    Ok(new.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// For each `n`, draws covers until `samples` of them contain `psi` (or, with
/// `conditioned = false`, takes the first `samples` draws) and records the
/// largest new eigenvalue of each.
pub fn fundamental_subgraph_experiment(
    base: &Graph,
    psi: &BGraph,
    n_grid: &[usize],
    spec: &ModelSpec,
    samples: usize,
    conditioned: bool,
    draw_budget: u64,
) -> Result<Vec<FundamentalRow>> {
    let d = base.is_regular().ok_or_else(|| Error::pre("base must be regular"))?;
    let lambda = tree_radius(&psi.total, d)?;
    let base_spec = symmetric_eigenvalues(&adjacency_matrix(base))?;
    let pattern = CoverPattern::new(psi);
    let mut rows = Vec::new();
    for &n in n_grid {
        spec.kind.check(base, n)?;
        let mut kept: Vec<u64> = Vec::new();
        let mut next = 0u64;
        const BATCH: u64 = 4096;
        while kept.len() < samples {
            if next >= draw_budget {
                return Err(Error::Budget { what: format!("conditioned sampling at n = {n}"), budget: draw_budget });
            }
            let end = (next + BATCH).min(draw_budget);
            let hits: Vec<u64> = (next..end)
                .into_par_iter()
                .filter(|&t| !conditioned || pattern.count(&sample_unchecked(base, n, spec, t)) > 0)
                .collect();
            kept.extend(hits.into_iter().take(samples - kept.len()));
            next = end;
        }
        let draws = if conditioned { kept.last().map_or(0, |&t| t + 1) } else { samples as u64 };
        let max_new = kept
            .par_iter()
            .map(|&t| max_new_eigenvalue(&sample_unchecked(base, n, spec, t), &base_spec))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(FundamentalRow { n, conditioned, lambda, draws, max_new });
    }
    Ok(rows)
}
