#![allow(dead_code)]

use cover_spectra::covers::BGraph;
use cover_spectra::graph::{Graph, GraphBuilder};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// B-graph on `nv` vertices over `base`, with one edge `u -> v` lying over the
/// base directed edge `e` per triple. A triple over a base half-loop with
/// `u == v` becomes a half-loop.
pub fn lift(base: &Graph, vmap: &[usize], edges: &[(usize, usize, usize)]) -> BGraph {
    let mut b = GraphBuilder::new(vmap.len());
    let mut emap = Vec::new();
    for &(u, v, e) in edges {
        if base.is_half_loop(e) && u == v {
            b.add_half_loop(u);
            emap.push(e);
        } else {
            b.add_edge(u, v);
            emap.push(e);
            emap.push(base.iota(e));
        }
    }
    BGraph::new(b.build(), base.clone(), vmap.to_vec(), emap).expect("consistent lift")
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// All permutations of `0..n` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

pub fn is_involution(p: &[usize]) -> bool {
    (0..p.len()).all(|i| p[p[i]] == i)
}

pub fn fixed_points(p: &[usize]) -> usize {
    (0..p.len()).filter(|&i| p[i] == i).count()
}

pub fn is_full_cycle(p: &[usize]) -> bool {
    let n = p.len();
    let mut i = 0;
    for step in 1..=n {
        i = p[i];
        if i == 0 {
            return step == n;
        }
    }
    false
}

pub fn shuffled(n: usize, seed: u64) -> Vec<usize> {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(&mut rng(seed));
    v
}

/// Every permutation the model can put on a base orbit representative `e`.
pub fn model_support(base: &Graph, e: usize, n: usize, kind: cover_spectra::covers::ModelKind) -> Vec<Vec<usize>> {
    let all = all_permutations(n);
    if base.is_half_loop(e) {
        let fixed = n % 2;
        all.into_iter().filter(|p| is_involution(p) && fixed_points(p) == fixed).collect()
    } else if kind.is_cyclic() && base.is_whole_loop(e) {
        all.into_iter().filter(|p| is_full_cycle(p)).collect()
    } else {
        all
    }
}

/// Every cover the model can produce at degree `n`, each equally likely.
pub fn all_covers(base: &Graph, n: usize, kind: cover_spectra::covers::ModelKind) -> Vec<cover_spectra::covers::CoordCover> {
    let orient = base.orientation();
    let supports: Vec<Vec<Vec<usize>>> = orient.iter().map(|&e| model_support(base, e, n, kind)).collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; orient.len()];
    loop {
        let mut sigma = vec![Vec::new(); base.num_dir_edges()];
        for (j, &e) in orient.iter().enumerate() {
            let p = supports[j][idx[j]].clone();
            let mut inv = vec![0; n];
            for i in 0..n {
                inv[p[i]] = i;
            }
            sigma[base.iota(e)] = inv;
            sigma[e] = p;
        }
        out.push(cover_spectra::covers::CoordCover::new(base.clone(), n, sigma).unwrap());
        let mut k = 0;
        loop {
            if k == orient.len() {
                return out;
            }
            idx[k] += 1;
            if idx[k] < supports[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Average embedding count over every cover of the model, as an exact rational.
pub fn exhaustive_average(patterns: &[BGraph], covers: &[cover_spectra::covers::CoordCover]) -> Vec<num_rational::BigRational> {
    use cover_spectra::covers::{count_embeddings, realize};
    let mut sums = vec![0u64; patterns.len()];
    for c in covers {
        let g = realize(c);
        for (s, acc) in patterns.iter().zip(sums.iter_mut()) {
            *acc += count_embeddings(s, &g).unwrap();
        }
    }
    sums.into_iter()
        .map(|x| num_rational::BigRational::new(x.into(), (covers.len() as u64).into()))
        .collect()
}

pub fn base_whole_and_half() -> Graph {
    let mut b = GraphBuilder::new(1);
    b.add_edge(0, 0);
    b.add_half_loop(0);
    b.build()
}
