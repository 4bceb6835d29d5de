use graphabstract::automorphism::find_nontrivial_automorphism;
use graphabstract::bridges::find_bridges;
use graphabstract::graph::{double_edge_swap, ensure_connected, EdgeList, Graph};
use graphabstract::spectral::spectral_gap;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random simple graph on 2..=max nodes.
fn arb_graph(max: usize) -> impl Strategy<Value = Graph> {
    (2..=max).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        proptest::collection::vec(any::<bool>(), pairs).prop_map(move |bits| {
            let mut g = Graph::new(n);
            let mut k = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if bits[k] {
                        g.add_edge(u, v);
                    }
                    k += 1;
                }
            }
            g
        })
    })
}

fn arb_connected(max: usize) -> impl Strategy<Value = Graph> {
    (arb_graph(max), any::<u64>()).prop_map(|(g, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ensure_connected(&g, &mut rng).0
    })
}

fn arb_perm(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn edges_are_sorted_and_unique(g in arb_graph(12)) {
        let edges = g.edges();
        prop_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(edges.iter().all(|&(u, v)| u < v));
        prop_assert_eq!(edges.len(), g.num_edges());
        prop_assert_eq!(g.degrees().iter().sum::<usize>(), 2 * g.num_edges());
    }

    #[test]
    fn edge_list_round_trips(g in arb_graph(12)) {
        let list = EdgeList::from(&g);
        prop_assert_eq!(Graph::try_from(list).unwrap(), g);
    }

    #[test]
    fn repair_connects_and_only_adds(g in arb_graph(14), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (h, added) = ensure_connected(&g, &mut rng);
        prop_assert!(h.is_connected());
        prop_assert_eq!(h.num_edges(), g.num_edges() + added);
        for (u, v) in g.edges() {
            prop_assert!(h.has_edge(u, v));
        }
    }

    #[test]
    fn swaps_preserve_degrees(g in arb_graph(12), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if let Ok(h) = double_edge_swap(&g, &mut rng, 200) {
            prop_assert_eq!(h.degrees(), g.degrees());
            prop_assert_eq!(h.num_edges(), g.num_edges());
            prop_assert!(h != g);
        }
    }

    #[test]
    fn relabeling_preserves_labels((g, perm) in arb_connected(10).prop_flat_map(|g| {
        let n = g.num_nodes();
        (Just(g), arb_perm(n))
    })) {
        let h = g.permuted(&perm);
        prop_assert_eq!(find_bridges(&h).count(), find_bridges(&g).count());
        prop_assert_eq!(
            find_nontrivial_automorphism(&h).unwrap().symmetric,
            find_nontrivial_automorphism(&g).unwrap().symmetric
        );
        prop_assert!((spectral_gap(&h).unwrap().lambda2 - spectral_gap(&g).unwrap().lambda2).abs() < 1e-8);
    }

    #[test]
    fn spectrum_is_bounded_and_sums_to_n(g in arb_connected(14)) {
        let s = spectral_gap(&g).unwrap();
        let n = g.num_nodes() as f64;
        prop_assert!(s.eigenvalues.iter().all(|&x| (-1e-8..=2.0 + 1e-8).contains(&x)));
        prop_assert!((s.eigenvalues.iter().sum::<f64>() - n).abs() < 1e-8);
        prop_assert_eq!(s.eigenvalues.iter().filter(|x| x.abs() < 1e-8).count(), 1);
        prop_assert!(s.lambda2 > 0.0);
    }
}
