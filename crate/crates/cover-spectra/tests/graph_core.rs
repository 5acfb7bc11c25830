use cover_spectra::graph::*;
use cover_spectra::Error;
use nalgebra::DMatrix;
use num_rational::Rational64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn arb_graph(max_v: usize, max_e: usize, half: bool) -> impl Strategy<Value = Graph> {
    (1..=max_v, 0..=max_e, any::<u64>()).prop_map(move |(nv, ne, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        random_graph(&mut rng, nv, ne, true, if half { 0.2 } else { 0.0 })
    })
}

fn half_loop_vertex() -> Graph {
    bouquet(0, 1)
}

#[test]
fn adjacency_examples() {
    assert_eq!(adjacency_matrix(&half_loop_vertex()), DMatrix::from_row_slice(1, 1, &[1.0]));
    assert_eq!(adjacency_matrix(&figure_eight()), DMatrix::from_row_slice(1, 1, &[4.0]));
    assert_eq!(adjacency_matrix(&path(2)), DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
    assert_eq!(adjacency_matrix(&bouquet(1, 0)), DMatrix::from_row_slice(1, 1, &[2.0]));
}

#[test]
fn hashimoto_examples() {
    let h = hashimoto_matrix(&figure_eight());
    assert_eq!(h.shape(), (4, 4));
    for i in 0..4 {
        assert_eq!(h.row(i).sum(), 3.0);
    }
    // J - P where P swaps each loop with its reverse.
    let g = figure_eight();
    for e1 in 0..4 {
        for e2 in 0..4 {
            let want = if g.iota(e1) == e2 { 0.0 } else { 1.0 };
            assert_eq!(h[(e1, e2)], want);
        }
    }
    let h1 = hashimoto_matrix(&half_loop_vertex());
    assert_eq!(h1, DMatrix::from_row_slice(1, 1, &[0.0]));

    // cycle-3: every directed edge has exactly one continuation, and H^3 = I
    let h3 = hashimoto_matrix(&cycle(3));
    for i in 0..6 {
        assert_eq!(h3.row(i).sum(), 1.0);
    }
    assert_eq!(&h3 * &h3 * &h3, DMatrix::identity(6, 6));
}

#[test]
fn stats_examples() {
    let s = stats(&figure_eight());
    assert_eq!(s.order, 1);
    assert_eq!(s.euler_char, Rational64::from_integer(-1));
    assert_eq!((s.half_loop_count, s.non_half_edge_count), (0, 2));
    assert_eq!(s.degree_sequence, vec![4]);

    let s = stats(&bouquet(0, 2));
    assert_eq!(s.order, 1);
    assert_eq!((s.half_loop_count, s.non_half_edge_count), (2, 0));
    assert_eq!(s.euler_char, Rational64::from_integer(0));

    assert_eq!(stats(&cycle(5)).order, 0);
    assert_eq!(stats(&bouquet(0, 1)).euler_char, Rational64::new(1, 2));
}

#[test]
fn prune_examples() {
    assert_eq!(prune(&path(3)).num_vertices(), 0);
    let mut b = GraphBuilder::new(5);
    b.add_edge(0, 1);
    b.add_edge(1, 2);
    b.add_edge(2, 0);
    b.add_edge(2, 3);
    b.add_edge(3, 4);
    let p = prune(&b.build());
    assert!(is_isomorphic(&p, &cycle(3)).unwrap());
    assert_eq!(prune(&figure_eight()), figure_eight());
}

#[test]
fn subdivide_examples() {
    let c4 = subdivide_edge(&cycle(3), 0, 2).unwrap();
    assert!(is_isomorphic(&c4, &cycle(4)).unwrap());

    let g = subdivide_edge(&figure_eight(), 0, 2).unwrap();
    let mut b = GraphBuilder::new(2);
    b.add_edge(0, 0);
    b.add_edge(0, 1);
    b.add_edge(1, 0);
    assert!(is_isomorphic(&g, &b.build()).unwrap());

    let same = subdivide_edge(&figure_eight(), 2, 1).unwrap();
    assert!(is_isomorphic(&same, &figure_eight()).unwrap());

    let hl = bouquet(1, 1);
    let half = (0..hl.num_dir_edges()).find(|&e| hl.is_half_loop(e)).unwrap();
    assert!(matches!(subdivide_edge(&hl, half, 2), Err(Error::Precondition(_))));
    assert!(subdivide_edge(&cycle(3), 0, 0).is_err());
}

#[test]
fn isomorphism_examples() {
    let mut b = GraphBuilder::new(3);
    b.add_edge(2, 0);
    b.add_edge(1, 2);
    b.add_edge(0, 1);
    assert!(is_isomorphic(&cycle(3), &b.build()).unwrap());
    assert!(!is_isomorphic(&cycle(3), &cycle(4)).unwrap());
    assert!(!is_isomorphic(&bouquet(1, 0), &bouquet(0, 2)).unwrap());
    assert!(matches!(is_isomorphic(&cycle(25), &cycle(25)), Err(Error::SizeCap { .. })));
    assert!(is_isomorphic_capped(&cycle(25), &cycle(25), 30).unwrap());
}

#[test]
fn text_format_and_parse_errors() {
    let g = bouquet(2, 1);
    let t = g.to_text();
    assert!(t.starts_with("graph 1 5\n"));
    assert_eq!(Graph::from_text(&t).unwrap(), g);
    let bad = "graph 2 2\ne 0 1 1\ne 1 7 0\n";
    match Graph::from_text(bad) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
    assert!(Graph::from_text("graph 1 1\ne 0 0 0\ne 0 0 0\n").is_err());
}

#[test]
fn invalid_graphs_are_rejected() {
    // iota not an involution
    assert!(Graph::new(2, vec![0, 1], vec![1, 0], vec![1, 1]).is_err());
    // t(iota e) != h(e)
    assert!(Graph::new(2, vec![0, 0], vec![1, 1], vec![1, 0]).is_err());
    // fixed point with distinct endpoints
    assert!(Graph::new(2, vec![0], vec![1], vec![0]).is_err());
}

/// All graphs with `nv` vertices and `ne` whole edges, without half-loops.
fn all_small_graphs(nv: usize, ne: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..nv).flat_map(|u| (u..nv).map(move |v| (u, v))).collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; ne];
    loop {
        let mut b = GraphBuilder::new(nv);
        for &i in &idx {
            b.add_edge(pairs[i].0, pairs[i].1);
        }
        out.push(b.build());
        // next non-decreasing index vector
        let mut k = ne;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if idx[k] + 1 < pairs.len() {
                idx[k] += 1;
                for j in k + 1..ne {
                    idx[j] = idx[k];
                }
                break;
            }
        }
    }
}

fn is_cycle_graph(g: &Graph) -> bool {
    g.num_vertices() >= 1 && g.is_connected() && g.degrees().iter().all(|&d| d == 2) && !g.has_half_loops()
}

#[test]
fn connected_pruned_order_zero_iff_cycle() {
    let mut checked = 0;
    for nv in 1..=4 {
        for ne in 1..=5 {
            for g in all_small_graphs(nv, ne) {
                if !g.is_connected() || prune(&g) != g {
                    continue;
                }
                checked += 1;
                assert_eq!(stats(&g).order == 0, is_cycle_graph(&g), "{}", g.to_text());
            }
        }
    }
    assert!(checked > 50);
}

proptest! {
    #[test]
    fn involution_invariants(g in arb_graph(8, 14, true)) {
        for e in 0..g.num_dir_edges() {
            prop_assert_eq!(g.iota(g.iota(e)), e);
            prop_assert_eq!(g.tail(g.iota(e)), g.head(e));
            if g.iota(e) == e {
                prop_assert_eq!(g.tail(e), g.head(e));
            }
        }
    }

    #[test]
    fn adjacency_symmetric_with_degree_column_sums(g in arb_graph(8, 14, true)) {
        let a = adjacency_matrix(&g);
        prop_assert_eq!(&a, &a.transpose());
        let degs = stats(&g).degree_sequence;
        for v in 0..g.num_vertices() {
            prop_assert_eq!(a.column(v).sum(), degs[v] as f64);
        }
    }

    #[test]
    fn hashimoto_row_sums(g in arb_graph(8, 14, true)) {
        let h = hashimoto_matrix(&g);
        for e in 0..g.num_dir_edges() {
            prop_assert_eq!(h.row(e).sum(), (g.degree(g.head(e)) - 1) as f64);
        }
    }

    #[test]
    fn prune_idempotent_and_min_degree(g in arb_graph(10, 12, true)) {
        let p = prune(&g);
        prop_assert_eq!(prune(&p), p.clone());
        prop_assert!(p.degrees().iter().all(|&d| d >= 2));
    }

    #[test]
    fn order_vs_euler_characteristic(g in arb_graph(8, 12, true)) {
        let s = stats(&g);
        let minus_chi = -s.euler_char;
        prop_assert!(Rational64::from_integer(s.order) >= minus_chi);
        prop_assert_eq!(Rational64::from_integer(s.order) == minus_chi, s.half_loop_count == 0);
        prop_assert_eq!(s.half_loop_count + s.non_half_edge_count, g.num_edges());
    }

    #[test]
    fn text_round_trip(g in arb_graph(8, 12, true)) {
        let t = g.to_text();
        let back = Graph::from_text(&t).unwrap();
        prop_assert_eq!(back.to_text(), t);
        prop_assert_eq!(back, g);
    }

    #[test]
    fn relabeled_graphs_are_isomorphic(g in arb_graph(7, 10, true), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut p: Vec<usize> = (0..g.num_vertices()).collect();
        p.shuffle(&mut rng);
        let m = g.num_dir_edges();
        let mut q: Vec<usize> = (0..m).collect();
        q.shuffle(&mut rng);
        let mut tail = vec![0; m];
        let mut head = vec![0; m];
        let mut iota = vec![0; m];
        for e in 0..m {
            tail[q[e]] = p[g.tail(e)];
            head[q[e]] = p[g.head(e)];
            iota[q[e]] = q[g.iota(e)];
        }
        let h = Graph::new(g.num_vertices(), tail, head, iota).unwrap();
        prop_assert!(is_isomorphic(&g, &h).unwrap());
    }

    #[test]
    fn subdivision_adds_vertices_and_keeps_order(g in arb_graph(6, 8, false), s in 1usize..5) {
        prop_assume!(g.num_dir_edges() > 0);
        let h = subdivide_edge(&g, 0, s).unwrap();
        prop_assert_eq!(h.num_vertices(), g.num_vertices() + s - 1);
        prop_assert_eq!(stats(&h).order, stats(&g).order);
    }
}
