use std::fs;

use cover_spectra::covers::{realize, sample, ModelKind, ModelSpec};
use cover_spectra::expectations::{enumerate_etale, expected_count, monte_carlo_many, pattern_id};
use cover_spectra::graph::{adjacency_matrix, figure_eight, random_graph, stats, Graph};
use cover_spectra::spectra::{alon_bound, ihara_check, new_spectrum, symmetric_eigenvalues, MATCH_TOL};
use cover_spectra::tangles::{has_tangles, shannon_valence};
use cover_spectra::trace_lab::{
    fit_scan, markov_bounds, nonalon_probability_scan, puder_comparison, r_default, trace_scan, TangleFilter,
};
use num_traits::ToPrimitive;
use rand::Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::args::*;
use crate::error::CliError;
use crate::output::{f, Table};

pub struct Report {
    pub config: Value,
    pub summary: Value,
    pub table: Table,
    pub markdown: bool,
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Invalid(msg.into()))
}

fn load_base(b: &BaseArgs) -> Result<Graph, CliError> {
    match &b.base {
        None => Ok(figure_eight()),
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))?;
            Graph::from_text(&text).map_err(|source| CliError::Library { context: path.display().to_string(), source })
        }
    }
}

fn check_trials(t: u64) -> Result<(), CliError> {
    if t == 0 {
        return invalid("--trials must be at least 1");
    }
    Ok(())
}

fn check_degrees(kind: ModelKind, base: &Graph, ns: &[usize]) -> Result<(), CliError> {
    if ns.is_empty() {
        return invalid("--n needs at least one value");
    }
    for &n in ns {
        if n == 0 {
            return invalid("--n values must be positive");
        }
        kind.check(base, n)?;
    }
    Ok(())
}

fn config<T: serde::Serialize>(args: &T) -> Value {
    serde_json::to_value(args).expect("arguments serialize")
}

fn spec(m: &ModelArgs) -> ModelSpec {
    ModelSpec::new(m.model, m.seed)
}

pub fn generate(a: &GenerateArgs) -> Result<Report, CliError> {
    let base = load_base(&a.base)?;
    check_trials(a.trials)?;
    check_degrees(a.model.model, &base, &[a.n])?;
    let sp = spec(&a.model);
    let mut t = Table::new(&["trial", "n", "vertices", "edges", "connected", "hash"]);
    if a.graph {
        let g = realize(&sample(&base, a.n, &sp, 0)?).total;
        t = Table::new(&[]);
        t.rows.push(vec![g.to_text().trim_end().to_string()]);
        return Ok(Report { config: config(a), summary: json!({"hash": g.hash_hex()}), table: t, markdown: false });
    }
    let rows: Vec<Vec<String>> = (0..a.trials)
        .into_par_iter()
        .map(|trial| {
            let g = realize(&sample(&base, a.n, &sp, trial)?).total;
            Ok(vec![
                trial.to_string(),
                a.n.to_string(),
                g.num_vertices().to_string(),
                g.num_edges().to_string(),
                (g.is_connected() as u8).to_string(),
                g.hash_hex(),
            ])
        })
        .collect::<cover_spectra::Result<_>>()?;
    t.rows = rows;
    Ok(Report { config: config(a), summary: json!({}), table: t, markdown: false })
}

pub fn spectrum(a: &SpectrumArgs) -> Result<Report, CliError> {
    let base = load_base(&a.base)?;
    check_trials(a.trials)?;
    check_degrees(a.model.model, &base, &[a.n])?;
    if a.eps <= 0.0 {
        return invalid("--eps must be positive");
    }
    let d = base.is_regular();
    let base_spec = symmetric_eigenvalues(&adjacency_matrix(&base))?;
    let sp = spec(&a.model);
    let per_trial: Vec<(Vec<f64>, Vec<f64>)> = (0..a.trials)
        .into_par_iter()
        .map(|trial| {
            let g = realize(&sample(&base, a.n, &sp, trial)?).total;
            let full = symmetric_eigenvalues(&adjacency_matrix(&g))?;
            let new = new_spectrum(&full, &base_spec, MATCH_TOL)?;
            Ok((full, new))
        })
        .collect::<cover_spectra::Result<_>>()?;
    let mut t = Table::new(&["trial", "part", "rank", "eigenvalue", "non_alon"]);
    let bound = d.map(|d| alon_bound(d) + a.eps);
    let mut non_alon_covers = 0;
    for (trial, (full, new)) in per_trial.iter().enumerate() {
        let mut any = false;
        for (part, vals) in [("full", full), ("new", new)] {
            for (i, &x) in vals.iter().enumerate() {
                let flag = match bound {
                    Some(b) if part == "new" => {
                        let hit = x.abs() > b;
                        any |= hit;
                        (hit as u8).to_string()
                    }
                    Some(_) => "0".into(),
                    None => "NA".into(),
                };
                t.push(vec![trial.to_string(), part.into(), i.to_string(), f(x), flag]);
            }
        }
        non_alon_covers += any as u64;
    }
    let summary = json!({"d": d, "alon_bound": d.map(alon_bound), "covers_with_non_alon": non_alon_covers});
    Ok(Report { config: config(a), summary, table: t, markdown: false })
}

pub fn nonalon(a: &NonalonArgs) -> Result<Report, CliError> {
    let base = load_base(&a.base)?;
    check_trials(a.trials)?;
    check_degrees(a.model.model, &base, &a.n)?;
    let d = match (base.is_regular(), a.d) {
        (None, _) => return invalid("nonalon needs a regular base graph"),
        (Some(d), Some(want)) if d != want => return invalid(format!("base is {d}-regular, --d is {want}")),
        (Some(d), _) => d,
    };
    if d < 3 {
        return invalid(format!("base degree {d} is below 3"));
    }
    if a.eps <= 0.0 {
        return invalid("--eps must be positive");
    }
    let scan = nonalon_probability_scan(&base, &spec(&a.model), a.eps, &a.n, a.trials)?;
    let mut t = Table::new(&["n", "trials", "hits", "p_hat", "stderr"]);
    for r in &scan.rows {
        t.push(vec![r.n.to_string(), r.trials.to_string(), r.hits.to_string(), f(r.p_hat), f(r.stderr)]);
    }
    let summary = json!({"d": d, "alon_bound": alon_bound(d), "slope": scan.slope, "slope_stderr": scan.slope_stderr});
    Ok(Report { config: config(a), summary, table: t, markdown: false })
}

pub fn tangles(a: &TanglesArgs) -> Result<Report, CliError> {
    let base = load_base(&a.base)?;
    if a.nu <= 1.0 {
        return invalid("--nu must exceed 1");
    }
    if a.edge_budget == 0 {
        return invalid("--edge-budget must be positive");
    }
    let graphs: Vec<Graph> = match a.n {
        None => vec![base.clone()],
        Some(n) => {
            check_trials(a.trials)?;
            check_degrees(a.model.model, &base, &[n])?;
            let sp = spec(&a.model);
            (0..a.trials)
                .into_par_iter()
                .map(|t| Ok(realize(&sample(&base, n, &sp, t)?).total))
                .collect::<cover_spectra::Result<_>>()?
        }
    };
    let reports = graphs
        .par_iter()
        .map(|g| has_tangles(g, a.nu, a.r, a.edge_budget))
        .collect::<cover_spectra::Result<Vec<_>>>()?;
    let mut t = Table::new(&["trial", "found", "budget_exhausted", "witness_vertices", "witness_dir_edges", "witness_order", "witness_mu1"]);
    let mut found = 0;
    for (i, r) in reports.iter().enumerate() {
        found += r.found as u64;
        let (wv, we, wo, wm) = match &r.witness {
            Some(w) => (w.vertices.len().to_string(), w.dir_edges.len().to_string(), w.order.to_string(), f(w.mu1)),
            None => ("NA".into(), "NA".into(), "NA".into(), "NA".into()),
        };
        t.push(vec![i.to_string(), (r.found as u8).to_string(), (r.search_budget_exhausted as u8).to_string(), wv, we, wo, wm]);
    }
    Ok(Report { config: config(a), summary: json!({"graphs": reports.len(), "with_tangle": found}), table: t, markdown: false })
}

pub fn trace_scan_cmd(a: &TraceScanArgs) -> Result<Report, CliError> {
    let base = load_base(&a.base)?;
    check_trials(a.trials)?;
    check_degrees(a.model.model, &base, &a.n)?;
    if a.k.is_empty() || a.k.contains(&0) {
        return invalid("--k values must be positive");
    }
    let filter = match a.nu {
        None => None,
        Some(nu) if nu <= 1.0 => return invalid("--nu must exceed 1"),
        Some(nu) => Some(TangleFilter { nu, r: a.r, edge_budget: a.edge_budget }),
    };
    let scan = trace_scan(&base, &spec(&a.model), &a.k, &a.n, a.trials, filter)?;
    let mut t = Table::new(&["k", "n", "mean", "stderr", "trials", "flagged"]);
    for c in &scan.cells {
        t.push(vec![c.k.to_string(), c.n.to_string(), f(c.mean), f(c.stderr), c.trials.to_string(), c.flagged.to_string()]);
    }
    let mut fits = Vec::new();
    if let Some(r) = a.fit {
        for &k in &a.k {
            fits.push(match fit_scan(&scan, k, r) {
                Ok(fit) => json!(fit),
                Err(e) => json!({"k": k, "error": e.to_string()}),
            });
        }
    }
    Ok(Report { config: config(a), summary: json!({"fits": fits}), table: t, markdown: false })
}

pub fn expect(a: &ExpectArgs) -> Result<Report, CliError> {
    let base = load_base(&a.base)?;
    check_degrees(a.model.model, &base, &a.n)?;
    if a.max_edges == 0 || a.max_edges > 6 {
        return invalid("--max-edges must be between 1 and 6");
    }
    let pats = enumerate_etale(&base, a.max_edges, true, a.connected);
    let sp = spec(&a.model);
    let mut t = Table::new(&["pattern", "vertices", "edges", "order", "n", "exact", "exact_value", "mc_mean", "mc_stderr", "z"]);
    for &n in &a.n {
        let mcs = if a.trials > 0 { Some(monte_carlo_many(&pats, n, &sp, a.trials)?) } else { None };
        for (i, s) in pats.iter().enumerate() {
            let e = expected_count(s, n, a.model.model)?;
            let ev = e.to_f64().unwrap_or(f64::NAN);
            let (m, se, z) = match &mcs {
                Some(v) => (f(v[i].mean), f(v[i].stderr), f(v[i].z_score(ev))),
                None => ("NA".into(), "NA".into(), "NA".into()),
            };
            t.push(vec![
                pattern_id(s),
                s.total.num_vertices().to_string(),
                s.total.num_edges().to_string(),
                stats(&s.total).order.to_string(),
                n.to_string(),
                e.to_string(),
                f(ev),
                m,
                se,
                z,
            ]);
        }
    }
    Ok(Report { config: config(a), summary: json!({"patterns": pats.len()}), table: t, markdown: false })
}

pub fn shannon(a: &ShannonArgs) -> Result<Report, CliError> {
    let g = load_base(&a.base)?;
    let orbits = g.orientation();
    let per_orbit = if a.lengths.is_empty() { vec![1; orbits.len()] } else { a.lengths.clone() };
    if per_orbit.len() != orbits.len() {
        return invalid(format!("{} lengths given for {} edges", per_orbit.len(), orbits.len()));
    }
    let mut lengths = vec![0; g.num_dir_edges()];
    for (&e, &k) in orbits.iter().zip(&per_orbit) {
        lengths[e] = k;
        lengths[g.iota(e)] = k;
    }
    let r = shannon_valence(&g, &lengths)?;
    let mut t = Table::new(&["valence", "z0", "bisection_residual"]);
    t.push(vec![f(r.valence), f(r.z0), format!("{:e}", r.bisection_residual)]);
    Ok(Report { config: config(a), summary: json!(r), table: t, markdown: false })
}

pub fn bounds(a: &BoundsArgs) -> Result<Report, CliError> {
    if a.d.iter().any(|&d| d < 3) {
        return invalid("--d values must be at least 3");
    }
    if a.r == Some(0) {
        return invalid("--r must be positive");
    }
    let mut t = Table::new(&["d", "r", "hashimoto", "adjacency (balanced)", "adjacency (as written)", "alon", "puder"]);
    let mut rows = Vec::new();
    for &d in &a.d {
        let r = a.r.unwrap_or_else(|| r_default(d));
        let b = markov_bounds(d, r)?;
        let p = puder_comparison(d)?;
        t.push(vec![
            d.to_string(),
            r.to_string(),
            format!("{:.4}", b.hashimoto_bound),
            format!("{:.4}", b.adjacency_bound_balanced),
            format!("{:.4}", b.adjacency_bound_as_written),
            format!("{:.4}", p.alon),
            format!("{:.4}", p.puder_bound),
        ]);
        rows.push(json!({"markov": b, "puder": p}));
    }
    Ok(Report { config: config(a), summary: json!({"rows": rows}), table: t, markdown: true })
}

pub fn ihara(a: &IharaArgs) -> Result<Report, CliError> {
    let graphs: Vec<Graph> = match a.random {
        Some(0) => return invalid("--random must be positive"),
        Some(count) => {
            if a.max_v == 0 {
                return invalid("--max-v must be positive");
            }
            (0..count as u64)
                .map(|i| {
                    let mut rng = cover_spectra::rng::stream(a.seed, i, 0);
                    let nv = rng.random_range(1..=a.max_v);
                    let ne = rng.random_range(0..=2 * nv);
                    random_graph(&mut rng, nv, ne, true, 0.15)
                })
                .collect()
        }
        None => vec![load_base(&a.base)?],
    };
    let results: Vec<_> = graphs.par_iter().map(|g| ihara_check(g, None)).collect();
    let mut t = Table::new(&["graph", "vertices", "dir_edges", "points", "max_residual"]);
    let mut worst: f64 = 0.0;
    for (i, (g, r)) in graphs.iter().zip(&results).enumerate() {
        worst = worst.max(r.max_abs_residual);
        t.push(vec![
            i.to_string(),
            g.num_vertices().to_string(),
            g.num_dir_edges().to_string(),
            r.sample_points.len().to_string(),
            format!("{:e}", r.max_abs_residual),
        ]);
    }
    Ok(Report { config: config(a), summary: json!({"max_residual": worst}), table: t, markdown: false })
}
