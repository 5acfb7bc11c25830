//! Dense eigenvalue routines, determinants, the Ihara identity and
//! new-spectrum bookkeeping.

use nalgebra::{Complex, DMatrix, DVector};
use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{adjacency_matrix, degree_matrix, hashimoto_matrix, hashimoto_successors, stats, Graph};

pub const JACOBI_MAX_SWEEPS: usize = 100;
pub const JACOBI_REL_TOL: f64 = 1e-11;
pub const SYMMETRY_TOL: f64 = 1e-12;
pub const PERRON_TOL: f64 = 1e-10;
pub const PERRON_MAX_ITER: usize = 1_000_000;
pub const MATCH_TOL: f64 = 1e-7;

#[derive(Clone, Debug)]
pub struct SymEigen {
    /// Descending.
    pub values: Vec<f64>,
    /// Column `j` is the unit eigenvector for `values[j]`.
    pub vectors: DMatrix<f64>,
}

fn check_square(m: &DMatrix<f64>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::pre(format!("matrix is {}x{}, not square", m.nrows(), m.ncols())));
    }
    Ok(m.nrows())
}

fn check_symmetric(m: &DMatrix<f64>) -> Result<usize> {
    let n = check_square(m)?;
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            dev = dev.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    if dev > SYMMETRY_TOL {
        return Err(Error::NotSymmetric(dev));
    }
    Ok(n)
}

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm falls below
/// `1e-11 * ||m||_F`.
pub fn symmetric_eigen(m: &DMatrix<f64>) -> Result<SymEigen> {
    let n = check_symmetric(m)?;
    let mut a = m.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let target = JACOBI_REL_TOL * m.norm();
    let mut converged = false;
    for _ in 0..=JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += a[(i, j)] * a[(i, j)];
                }
            }
        }
        if off.sqrt() <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                a[(p, p)] -= t * apq;
                a[(q, q)] += t * apq;
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for r in 0..n {
                    if r != p && r != q {
                        let g = a[(r, p)];
                        let h = a[(r, q)];
                        let np = g - s * (h + tau * g);
                        let nq = h + s * (g - tau * h);
                        a[(r, p)] = np;
                        a[(p, r)] = np;
                        a[(r, q)] = nq;
                        a[(q, r)] = nq;
                    }
                }
                for r in 0..n {
                    let g = v[(r, p)];
                    let h = v[(r, q)];
                    v[(r, p)] = g - s * (h + tau * g);
                    v[(r, q)] = h + s * (g - tau * h);
                }
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence(JACOBI_MAX_SWEEPS));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let values = idx.iter().map(|&i| a[(i, i)]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, idx[c])]);
    Ok(SymEigen { values, vectors })
}

/// Eigenvalues only, descending, via tridiagonal QR. Used on the Monte Carlo
/// paths where matrices reach a few hundred rows.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    check_symmetric(m)?;
    let mut vals: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    Ok(vals)
}

pub fn perron_eigenvalue(m: &DMatrix<f64>) -> Result<f64> {
    perron_eigenvalue_with(m, PERRON_MAX_ITER)
}

/// Spectral radius of a non-negative matrix by power iteration on `m + I`.
pub fn perron_eigenvalue_with(m: &DMatrix<f64>, max_iter: usize) -> Result<f64> {
    let n = check_square(m)?;
    if m.iter().any(|&x| x < 0.0) {
        return Err(Error::pre("matrix has negative entries"));
    }
    if n == 0 || m.iter().all(|&x| x == 0.0) {
        return Ok(0.0);
    }
    let shifted = m + DMatrix::<f64>::identity(n, n);
    let mut x = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    let mut prev = f64::NAN;
    for _ in 0..max_iter {
        let y = &shifted * &x;
        let est = x.dot(&y);
        let norm = y.norm();
        x = y / norm;
        if (est - prev).abs() < PERRON_TOL {
            return Ok(est - 1.0);
        }
        prev = est;
    }
    Err(Error::NoConvergence(max_iter))
}

/// Determinant by LU with partial pivoting. A pivot below `1e-10` times the
/// largest entry makes the result exactly zero.
pub fn det_lu(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "det_lu needs a square matrix");
    if n == 0 {
        return 1.0;
    }
    let scale = m.amax();
    if scale == 0.0 {
        return 0.0;
    }
    let mut a = m.clone();
    let mut det = 1.0;
    for k in 0..n {
        let (mut piv, mut best) = (k, a[(k, k)].abs());
        for r in k + 1..n {
            if a[(r, k)].abs() > best {
                piv = r;
                best = a[(r, k)].abs();
            }
        }
        if best <= 1e-10 * scale {
            return 0.0;
        }
        if piv != k {
            a.swap_rows(piv, k);
            det = -det;
        }
        let p = a[(k, k)];
        det *= p;
        for r in k + 1..n {
            let f = a[(r, k)] / p;
            if f != 0.0 {
                for c in k + 1..n {
                    let x = a[(k, c)];
                    a[(r, c)] -= f * x;
                }
            }
        }
    }
    det
}

#[derive(Clone, Debug, Serialize)]
pub struct IharaCheckResult {
    pub max_abs_residual: f64,
    pub sample_points: Vec<f64>,
}

/// `2 * #E_dir + 1` evenly spaced points in `[2.1, 3.1]`.
pub fn default_ihara_points(g: &Graph) -> Vec<f64> {
    let count = 2 * g.num_dir_edges() + 1;
    if count == 1 {
        return vec![2.1];
    }
    (0..count).map(|j| 2.1 + j as f64 / (count - 1) as f64).collect()
}

/// Right-hand side of the Ihara determinant formula at `mu`.
pub fn ihara_rhs(g: &Graph, mu: f64) -> f64 {
    let n = g.num_vertices();
    let st = stats(g);
    let a = adjacency_matrix(g);
    let d = degree_matrix(g);
    let id = DMatrix::<f64>::identity(n, n);
    let q = &id * (mu * mu) - a * mu + (d - &id);
    let exp2 = st.non_half_edge_count as i32 - n as i32;
    det_lu(&q) * (mu + 1.0).powi(st.half_loop_count as i32) * (mu * mu - 1.0).powi(exp2)
}

pub fn ihara_lhs(g: &Graph, mu: f64) -> f64 {
    let m = g.num_dir_edges();
    let h = hashimoto_matrix(g);
    det_lu(&(DMatrix::<f64>::identity(m, m) * mu - h))
}

pub fn ihara_check(g: &Graph, sample_points: Option<&[f64]>) -> IharaCheckResult {
    let pts = match sample_points {
        Some(p) => p.to_vec(),
        None => default_ihara_points(g),
    };
    let mut worst: f64 = 0.0;
    for &mu in &pts {
        let l = ihara_lhs(g, mu);
        let r = ihara_rhs(g, mu);
        worst = worst.max((l - r).abs() / (1.0 + r.abs()));
    }
    IharaCheckResult { max_abs_residual: worst, sample_points: pts }
}

/// Non-backtracking spectrum of a `d`-regular graph from its adjacency
/// spectrum: both roots of `mu^2 - lambda mu + (d-1)` for every `lambda`, then
/// `o1` copies of `-1` and `o2 - n` copies each of `+1` and `-1` (removed when
/// that count is negative).
pub fn hashimoto_spectrum_regular(adjacency_spectrum: &[f64], d: usize, o1: usize, o2: usize, n: usize) -> Result<Vec<Complex<f64>>> {
    if d < 3 {
        return Err(Error::pre(format!("degree {d} < 3")));
    }
    let q = (d - 1) as f64;
    let mut out = Vec::with_capacity(2 * adjacency_spectrum.len() + o1 + 2 * o2.abs_diff(n));
    for &lam in adjacency_spectrum {
        let disc = lam * lam - 4.0 * q;
        if disc >= 0.0 {
            let s = disc.sqrt();
            out.push(Complex::new((lam + s) / 2.0, 0.0));
            out.push(Complex::new((lam - s) / 2.0, 0.0));
        } else {
            let s = (-disc).sqrt();
            out.push(Complex::new(lam / 2.0, s / 2.0));
            out.push(Complex::new(lam / 2.0, -s / 2.0));
        }
    }
    out.extend(std::iter::repeat_n(Complex::new(-1.0, 0.0), o1));
    if o2 >= n {
        for _ in 0..o2 - n {
            out.push(Complex::new(1.0, 0.0));
            out.push(Complex::new(-1.0, 0.0));
        }
    } else {
        for _ in 0..n - o2 {
            for target in [1.0, -1.0] {
                let pos = out
                    .iter()
                    .enumerate()
                    .min_by(|a, b| (a.1 - target).norm().total_cmp(&(b.1 - target).norm()))
                    .map(|(i, _)| i)
                    .ok_or_else(|| Error::pre("spectrum too short for the padding"))?;
                out.swap_remove(pos);
            }
        }
    }
    Ok(out)
}

/// Removes from `cover_spectrum` the nearest unmatched value for each base
/// eigenvalue; what remains is returned in input order.
pub fn new_spectrum(cover_spectrum: &[f64], base_spectrum: &[f64], tol: f64) -> Result<Vec<f64>> {
    if cover_spectrum.len() < base_spectrum.len() {
        return Err(Error::pre("cover spectrum shorter than base spectrum"));
    }
    let mut used = vec![false; cover_spectrum.len()];
    for &b in base_spectrum {
        let best = cover_spectrum
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .min_by(|x, y| (x.1 - b).abs().total_cmp(&(y.1 - b).abs()))
            .map(|(i, &x)| (i, (x - b).abs()));
        match best {
            Some((i, dist)) if dist <= tol => used[i] = true,
            Some((_, dist)) => return Err(Error::SpectrumMismatch { value: b, dist, tol }),
            None => return Err(Error::SpectrumMismatch { value: b, dist: f64::INFINITY, tol }),
        }
    }
    Ok(cover_spectrum.iter().zip(&used).filter(|(_, &u)| !u).map(|(&x, _)| x).collect())
}

pub fn alon_bound(d: usize) -> f64 {
    2.0 * ((d as f64) - 1.0).sqrt()
}

pub fn non_alon_count(new_spectrum: &[f64], d: usize, epsilon: f64) -> usize {
    let thr = alon_bound(d) + epsilon;
    new_spectrum.iter().filter(|x| x.abs() > thr).count()
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralReport {
    pub full_adjacency_spectrum: Vec<f64>,
    pub new_spectrum: Vec<f64>,
    pub non_alon_count: usize,
    pub epsilon: f64,
    pub alon_bound: f64,
}

/// Report for a cover of a `d`-regular base.
pub fn spectral_report(cover: &Graph, base: &Graph, d: usize, epsilon: f64) -> Result<SpectralReport> {
    let full = symmetric_eigenvalues(&adjacency_matrix(cover))?;
    let base_spec = symmetric_eigenvalues(&adjacency_matrix(base))?;
    let new = new_spectrum(&full, &base_spec, MATCH_TOL)?;
    Ok(SpectralReport {
        non_alon_count: non_alon_count(&new, d, epsilon),
        full_adjacency_spectrum: full,
        new_spectrum: new,
        epsilon,
        alon_bound: alon_bound(d),
    })
}

/// `Trace(H^k)` by repeated squaring of the integer matrix, in `u64` with
/// overflow checks and a big-integer fallback.
pub fn hashimoto_trace_exact(g: &Graph, k: usize) -> BigUint {
    let succ = hashimoto_successors(g);
    let m = succ.len();
    let mut base = vec![0u64; m * m];
    for (e, s) in succ.iter().enumerate() {
        for &f in s {
            base[e * m + f] += 1;
        }
    }
    match power_trace_u64(&base, m, k) {
        Some(t) => BigUint::from(t),
        None => power_trace_big(&base, m, k),
    }
}

fn matmul_u64(a: &[u64], b: &[u64], m: usize) -> Option<Vec<u64>> {
    let mut c = vec![0u64; m * m];
    for i in 0..m {
        for l in 0..m {
            let x = a[i * m + l];
            if x == 0 {
                continue;
            }
            for j in 0..m {
                let p = x.checked_mul(b[l * m + j])?;
                c[i * m + j] = c[i * m + j].checked_add(p)?;
            }
        }
    }
    Some(c)
}

fn power_trace_u64(base: &[u64], m: usize, k: usize) -> Option<u64> {
    let mut result: Vec<u64> = (0..m * m).map(|i| u64::from(i / m == i % m)).collect();
    let mut sq = base.to_vec();
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            result = matmul_u64(&result, &sq, m)?;
        }
        e >>= 1;
        if e > 0 {
            sq = matmul_u64(&sq, &sq, m)?;
        }
    }
    (0..m).try_fold(0u64, |acc, i| acc.checked_add(result[i * m + i]))
}

fn power_trace_big(base: &[u64], m: usize, k: usize) -> BigUint {
    let big: Vec<BigUint> = base.iter().map(|&x| BigUint::from(x)).collect();
    let mul = |a: &[BigUint], b: &[BigUint]| {
        let mut c = vec![BigUint::zero(); m * m];
        for i in 0..m {
            for l in 0..m {
                if a[i * m + l].is_zero() {
                    continue;
                }
                for j in 0..m {
                    c[i * m + j] += &a[i * m + l] * &b[l * m + j];
                }
            }
        }
        c
    };
    let mut result: Vec<BigUint> = (0..m * m).map(|i| BigUint::from(u8::from(i / m == i % m))).collect();
    let mut sq = big;
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            result = mul(&result, &sq);
        }
        e >>= 1;
        if e > 0 {
            sq = mul(&sq, &sq);
        }
    }
    (0..m).map(|i| result[i * m + i].clone()).sum()
}

pub fn hashimoto_trace_u64(g: &Graph, k: usize) -> Option<u64> {
    hashimoto_trace_exact(g, k).to_u64()
}

/// `sum_i lambda_i^k` of a real spectrum.
pub fn power_sum(spec: &[f64], k: usize) -> f64 {
    spec.iter().map(|x| x.powi(k as i32)).sum()
}
