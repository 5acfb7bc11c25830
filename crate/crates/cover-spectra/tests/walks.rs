mod common;

use common::*;
use cover_spectra::covers::*;
use cover_spectra::graph::*;
use cover_spectra::spectra::hashimoto_trace_exact;
use cover_spectra::walks::*;
use cover_spectra::Error;
use num_traits::ToPrimitive;
use proptest::prelude::*;

const B: u64 = DEFAULT_WALK_BUDGET;

#[test]
fn snbc_examples() {
    assert_eq!(enumerate_snbc(&figure_eight(), 2, B).unwrap().len(), 12);
    assert_eq!(enumerate_snbc(&cycle(3), 3, B).unwrap().len(), 6);
    assert_eq!(enumerate_snbc(&bouquet(0, 1), 1, B).unwrap().len(), 0);
    let fig8 = figure_eight();
    let w = enumerate_snbc(&fig8, 3, B).unwrap();
    assert!(w.iter().all(|w| w.is_snbc()));
    assert!(enumerate_snbc(&cycle(3), 0, B).is_err());
}

#[test]
fn snbc_budget() {
    assert!(matches!(count_snbc(&bouquet(3, 0), 12, 1000), Err(Error::Budget { .. })));
}

#[test]
fn walk_flags() {
    let g = figure_eight();
    // loop 0 forward, then backwards along it
    let w = Walk::from_edges(&g, vec![0, 1]).unwrap();
    assert!(!w.is_non_backtracking());
    let w = Walk::from_edges(&g, vec![0, 2]).unwrap();
    assert!(w.is_snbc());
    // closed, non-backtracking, but last edge reverses the first
    let w = Walk::from_edges(&g, vec![0, 2, 1]).unwrap();
    assert!(w.is_non_backtracking() && w.is_closed() && !w.is_snbc());
    assert!(Walk::new(&path(3), 0, vec![2]).is_err());
}

#[test]
fn visited_subgraph_examples() {
    let c3 = cycle(3);
    // edges 0: 0->1, 2: 1->2, 4: 2->0
    let w = Walk::from_edges(&c3, vec![0, 2, 4]).unwrap();
    let v = visited_subgraph_ordered(&w);
    assert!(is_isomorphic(&v.graph, &c3).unwrap());
    assert_eq!(v.ordering.vertex_rank, vec![0, 1, 2]);
    assert_eq!(v.ordered_code(), vec![(0, 1, false), (1, 2, false), (2, 0, false)]);

    let one = visited_subgraph_ordered(&Walk::from_edges(&c3, vec![0]).unwrap());
    assert_eq!(one.graph.num_vertices(), 2);
    assert_eq!(one.ordered_code(), vec![(0, 1, false)]);

    let twice = visited_subgraph_ordered(&Walk::from_edges(&c3, vec![0, 2, 4, 0, 2, 4]).unwrap());
    assert_eq!(twice, v);

    // Starting elsewhere relabels by first encounter.
    let other = visited_subgraph_ordered(&Walk::from_edges(&c3, vec![2, 4, 0]).unwrap());
    assert_eq!(other.ordered_code(), v.ordered_code());
}

#[test]
fn classify_examples() {
    let base = figure_eight();
    // n = 1: the lift is the base walk itself
    let c = CoordCover::trivial(base.clone(), 1);
    let w = Walk::from_edges(&base, vec![0, 2, 0, 2]).unwrap();
    let rec = classify_steps(&w, 0, &c).unwrap();
    assert_eq!(rec.classes, vec![StepClass::Coincidence, StepClass::Coincidence, StepClass::Forced, StepClass::Forced]);
    assert_eq!(stats(&rec.final_graph.bgraph.total).order, 1);

    // both loops act as the 4-cycle i -> i+1: a lift of e0 e2 is a path
    let shift: Vec<usize> = (0..4).map(|i| (i + 1) % 4).collect();
    let back: Vec<usize> = (0..4).map(|i| (i + 3) % 4).collect();
    let c = CoordCover::new(base.clone(), 4, vec![shift.clone(), back.clone(), shift.clone(), back.clone()]).unwrap();
    let w = Walk::from_edges(&base, vec![0, 2]).unwrap();
    let rec = classify_steps(&w, 0, &c).unwrap();
    assert_eq!(rec.classes, vec![StepClass::New, StepClass::New]);
    assert_eq!(*rec.orders.last().unwrap(), -1);
    assert_eq!(rec.trajectory, vec![0, 1, 2]);

    // four steps around e0 close a 4-cycle: one coincidence, order 0
    let w = Walk::from_edges(&base, vec![0, 0, 0, 0]).unwrap();
    let rec = classify_steps(&w, 2, &c).unwrap();
    assert_eq!(rec.coincidences(), 1);
    assert_eq!(*rec.orders.last().unwrap(), 0);
    assert_eq!(rec.trajectory, vec![2, 3, 0, 1, 2]);
    assert!(classify_steps(&w, 4, &c).is_err());
}

#[test]
fn census_examples() {
    let base = figure_eight();
    for k in 1..=5 {
        let c = CoordCover::trivial(base.clone(), 1);
        assert_eq!(snbc_order_census(&c, k, B).unwrap(), snbc_order_census_direct(&base, k, B).unwrap());
    }
    let c = CoordCover::new(base.clone(), 2, vec![vec![1, 0], vec![1, 0], vec![0, 1], vec![0, 1]]).unwrap();
    let g = realize(&c).total;
    for k in 1..=6 {
        let census = snbc_order_census(&c, k, B).unwrap();
        let total: u64 = census.values().sum();
        assert_eq!(total, hashimoto_trace_exact(&g, k).to_u64().unwrap());
        assert_eq!(census, snbc_order_census_direct(&g, k, B).unwrap());
    }
}

#[test]
fn suppress_examples() {
    let c4 = OrderedGraph::by_id(cycle(4));
    let hd = suppress_beads(&c4, &[1, 2, 3]).unwrap();
    assert_eq!(hd.reduction.graph.num_vertices(), 1);
    assert_eq!(hd.reduction.graph.num_edges(), 1);
    assert!(hd.reduction.graph.is_whole_loop(0));
    assert_eq!(hd.edge_lengths, vec![4, 4]);

    assert!(suppress_beads(&c4, &[0, 1, 2, 3]).is_err());
    assert!(suppress_beads(&OrderedGraph::by_id(figure_eight()), &[0]).is_err());

    // barbell: loops at 0 and 3, path 0-1-2-3
    let mut b = GraphBuilder::new(4);
    b.add_edge(0, 0);
    b.add_edge(0, 1);
    b.add_edge(1, 2);
    b.add_edge(2, 3);
    b.add_edge(3, 3);
    let bar = OrderedGraph::by_id(b.build());
    let hd = suppress_beads(&bar, &[1, 2]).unwrap();
    assert_eq!(hd.reduction.graph.num_vertices(), 2);
    let mut lens: Vec<usize> = hd.edge_lengths.clone();
    lens.sort_unstable();
    assert_eq!(lens, vec![1, 1, 1, 1, 3, 3]);

    let same = suppress_beads(&bar, &[]).unwrap();
    assert_eq!(same.reduction.ordered_code(), bar.ordered_code());
    assert!(same.edge_lengths.iter().all(|&l| l == 1));
}

#[test]
fn vlg_examples() {
    let f8 = OrderedGraph::by_id(figure_eight());
    let v = vlg(&f8, &[2, 2, 2, 2]).unwrap();
    let mut b = GraphBuilder::new(3);
    b.add_edge(0, 1);
    b.add_edge(1, 0);
    b.add_edge(0, 2);
    b.add_edge(2, 0);
    assert!(is_isomorphic(&v.graph, &b.build()).unwrap());

    let v = vlg(&f8, &[1, 1, 1, 1]).unwrap();
    assert_eq!(v.ordered_code(), f8.ordered_code());

    let mut b = GraphBuilder::new(2);
    for _ in 0..3 {
        b.add_edge(0, 1);
    }
    let theta = OrderedGraph::by_id(b.build());
    let v = vlg(&theta, &[1, 1, 2, 2, 3, 3]).unwrap();
    assert_eq!(v.graph.num_vertices(), 2 + 1 + 2);
    assert_eq!(v.graph.degrees().iter().filter(|&&d| d == 3).count(), 2);
    assert!(vlg(&theta, &[1, 2, 1, 1, 1, 1]).is_err());
    assert!(vlg(&theta, &[0, 0, 1, 1, 1, 1]).is_err());
}

#[test]
fn wording_examples() {
    let base = figure_eight();
    let c = CoordCover::trivial(base.clone(), 3);
    let g = realize(&c);
    // lift of e0 at fibre 0 is the directed edge 0 * 3 + 0
    let w = Walk::from_edges(&g.total, vec![0]).unwrap();
    let wd = induced_wording(&w, &g).unwrap();
    // one word per directed edge of the reduced graph
    let mut words = wd.words.clone();
    words.sort();
    assert_eq!(words, vec![vec![0], vec![1]]);

    // e0 then e2 through a path: midpoint is a bead, so one word "e0 e2"
    let shift: Vec<usize> = (0..3).map(|i| (i + 1) % 3).collect();
    let back: Vec<usize> = (0..3).map(|i| (i + 2) % 3).collect();
    let c = CoordCover::new(base.clone(), 3, vec![shift.clone(), back.clone(), shift, back]).unwrap();
    let g = realize(&c);
    let w = Walk::from_edges(&g.total, vec![0, 2 * 3 + 1]).unwrap();
    let wd = induced_wording(&w, &g).unwrap();
    assert!(wd.words.contains(&vec![0, 2]));
    assert!(wd.words.contains(&vec![3, 1]));
    assert_eq!(wd.homotopy.edge_lengths.iter().copied().max(), Some(2));
}

#[test]
fn broder_shamir_bound_holds_empirically() {
    let base = figure_eight();
    let spec = ModelSpec::new(ModelKind::Permutation, 99);
    let trials = 400u64;
    for k in [3usize, 4, 5] {
        let walks = snbc_edge_sequences(&base, k, B).unwrap();
        let tb = walks.len() as u64;
        for n in [20usize, 40] {
            let censuses: Vec<_> = (0..trials).map(|t| census_from_base_walks(&sample(&base, n, &spec, t).unwrap(), &walks)).collect();
            for r in 0..3i64 {
                let vals: Vec<f64> = censuses.iter().map(|c| c.range(r..).map(|(_, &x)| x as f64).sum()).collect();
                let mean = vals.iter().sum::<f64>() / trials as f64;
                let var = vals.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (trials as f64 - 1.0);
                let se = (var / trials as f64).sqrt();
                let bound = order_bound(tb, n, k, r as usize).unwrap();
                assert!(mean <= bound + 3.0 * se, "k={k} n={n} r={r}: {mean} > {bound}");
            }
        }
    }
}

fn arb_graph(max_v: usize, max_e: usize) -> impl Strategy<Value = Graph> {
    (1..=max_v, 0..=max_e, any::<u64>()).prop_map(|(nv, ne, seed)| random_graph(&mut rng(seed), nv, ne, true, 0.15))
}

fn arb_cover() -> impl Strategy<Value = CoordCover> {
    (1usize..=2, 1usize..=3, 1usize..=6, 0usize..6, any::<u64>()).prop_map(|(nv, ne, n, k, seed)| {
        let base = random_graph(&mut rng(seed), nv, ne, true, 0.3);
        let ok: Vec<ModelKind> = ModelKind::ALL.into_iter().filter(|m| m.check(&base, n).is_ok()).collect();
        let kind = if ok.is_empty() { ModelKind::PermInvolutionOdd } else { ok[k % ok.len()] };
        let n = if kind.check(&base, n).is_ok() { n } else { n + 1 };
        sample(&base, n, &ModelSpec::new(kind, seed), 0).unwrap()
    })
}

/// Random pruned graph with some subdivided edges so that beads occur.
fn arb_pruned() -> impl Strategy<Value = Graph> {
    (1usize..=5, 1usize..=7, any::<u64>(), proptest::collection::vec((0usize..20, 1usize..4), 0..3)).prop_map(|(nv, ne, seed, subs)| {
        let mut g = prune(&random_graph(&mut rng(seed), nv, ne, true, 0.1));
        for (e, s) in subs {
            if g.num_dir_edges() == 0 || g.num_vertices() + s > 12 {
                break;
            }
            let e = e % g.num_dir_edges();
            if !g.is_half_loop(e) {
                g = subdivide_edge(&g, e, s).unwrap();
            }
        }
        g
    })
}

fn component_representatives(g: &Graph) -> Vec<usize> {
    let comp = g.components();
    let mut reps: Vec<usize> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for v in 0..g.num_vertices() {
        if seen.insert(comp[v]) {
            reps.push(v);
        }
    }
    reps
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn snbc_count_is_hashimoto_trace(g in arb_graph(7, 6), k in 1usize..7) {
        let walks = enumerate_snbc(&g, k, B).unwrap();
        prop_assert_eq!(walks.len() as u64, hashimoto_trace_exact(&g, k).to_u64().unwrap());
        prop_assert_eq!(count_snbc(&g, k, B).unwrap(), walks.len() as u64);
        for w in &walks {
            prop_assert!(w.is_snbc());
            let v = visited_subgraph_ordered(w);
            prop_assert_eq!(prune(&v.graph), v.graph.clone());
            v.ordering.validate(&v.graph).unwrap();
        }
    }

    #[test]
    fn coincidence_law(c in arb_cover(), k in 1usize..7, i0 in 0usize..8) {
        let walks = enumerate_snbc(c.base(), k, B).unwrap();
        let i0 = i0 % c.degree();
        for w in walks.iter().take(40) {
            let rec = classify_steps(w, i0, &c).unwrap();
            let ord = stats(&rec.final_graph.bgraph.total).order;
            prop_assert_eq!(ord, rec.coincidences() as i64 - 1);
            prop_assert_eq!(*rec.orders.last().unwrap(), ord);
            for j in 1..rec.trajectory.len() {
                prop_assert_eq!(rec.trajectory[j], c.sigma(w.edges[j - 1])[rec.trajectory[j - 1]]);
            }
            let closes = *rec.trajectory.last().unwrap() == i0;
            prop_assert_eq!(lifted_closed_order(&w.edges, w.start, i0, &c), closes.then_some(ord));
        }
    }

    #[test]
    fn census_by_lifting_matches_direct(c in arb_cover(), k in 1usize..6) {
        let g = realize(&c).total;
        prop_assert_eq!(snbc_order_census(&c, k, B).unwrap(), snbc_order_census_direct(&g, k, B).unwrap());
        let walks = snbc_edge_sequences(c.base(), k, B).unwrap();
        prop_assert_eq!(lifted_trace(&c, &walks), hashimoto_trace_exact(&g, k).to_u64().unwrap());
    }

    #[test]
    fn suppress_then_vlg_round_trips(g in arb_pruned()) {
        prop_assume!(g.num_vertices() > 0);
        let og = OrderedGraph::by_id(g.clone());
        let beads = all_beads_except(&g, &component_representatives(&g));
        let hd = suppress_beads(&og, &beads).unwrap();
        let back = vlg(&hd.reduction, &hd.edge_lengths).unwrap();
        prop_assert!(is_isomorphic(&back.graph, &g).unwrap());
        prop_assert_eq!(stats(&back.graph).order, stats(&g).order);
        prop_assert_eq!(hd.edge_lengths.iter().sum::<usize>(), g.num_dir_edges());
    }

    #[test]
    fn vlg_then_suppress_round_trips(g in arb_pruned(), lens in proptest::collection::vec(1usize..4, 12)) {
        let t = OrderedGraph::by_id(g.clone());
        let mut k = vec![1; g.num_dir_edges()];
        for (i, e) in g.orientation().into_iter().enumerate() {
            if !g.is_half_loop(e) {
                k[e] = lens[i % lens.len()];
                k[g.iota(e)] = k[e];
            }
        }
        let v = vlg(&t, &k).unwrap();
        let new: Vec<usize> = (g.num_vertices()..v.graph.num_vertices()).collect();
        let hd = suppress_beads(&v, &new).unwrap();
        prop_assert_eq!(hd.reduction.ordered_code(), t.ordered_code());
        let mut want: Vec<(usize, bool, usize)> =
            (0..g.num_dir_edges()).map(|e| (t.ordering.edge_rank[e], t.ordering.oriented[e], k[e])).collect();
        let r = &hd.reduction;
        let mut got: Vec<(usize, bool, usize)> =
            (0..r.graph.num_dir_edges()).map(|e| (r.ordering.edge_rank[e], r.ordering.oriented[e], hd.edge_lengths[e])).collect();
        want.sort_unstable();
        got.sort_unstable();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn wording_lengths_and_reversal(c in arb_cover(), k in 2usize..7, i0 in 0usize..8) {
        let g = realize(&c);
        let walks = enumerate_snbc(c.base(), k, B).unwrap();
        let n = c.degree();
        for w in walks.iter().take(10) {
            let i0 = i0 % n;
            let mut i = i0;
            let mut lifted = Vec::new();
            for &e in &w.edges {
                lifted.push(e * n + i);
                i = c.sigma(e)[i];
            }
            let lw = Walk::from_edges(&g.total, lifted).unwrap();
            let wd = induced_wording(&lw, &g).unwrap();
            let red = &wd.homotopy.reduction.graph;
            for e in 0..red.num_dir_edges() {
                prop_assert_eq!(wd.words[e].len(), wd.homotopy.edge_lengths[e]);
                let rev: Vec<usize> = wd.words[e].iter().rev().map(|&x| c.base().iota(x)).collect();
                prop_assert_eq!(&wd.words[red.iota(e)], &rev);
            }
        }
    }
}
