use proptest::prelude::*;
use spanner_core::buckets::{bucket_index, partition_edges};
use spanner_core::dsu::{classic_uf_session, links_as_unions, static_tree_uf_session_with, StaticTreeMode, UfOp};
use spanner_core::hz::{hz_spanner, max_hop_stretch, UnweightedGraph};
use spanner_core::oracle::{greedy_spanner, verify_edge_subset};
use spanner_core::registry::AlgorithmRegistry;
use spanner_core::{BuildParams, WeightedGraph};

/// Connected graph: a random tree plus random chords, weights in [1, 64].
fn connected_graph(max_n: usize) -> impl Strategy<Value = WeightedGraph> {
    (2..=max_n).prop_flat_map(|n| {
        let tree = proptest::collection::vec((any::<prop::sample::Index>(), 1.0f64..64.0), n - 1);
        let chords = proptest::collection::vec((0..n, 0..n, 1.0f64..64.0), 0..3 * n);
        (Just(n), tree, chords).prop_map(|(n, tree, chords)| {
            let mut edges: Vec<(usize, usize, f64)> =
                tree.into_iter().enumerate().map(|(i, (p, w))| (i + 1, p.index(i + 1), w)).collect();
            edges.extend(chords.into_iter().filter(|(u, v, _)| u != v));
            WeightedGraph::from_edges(n, edges).unwrap()
        })
    })
}

fn simple_graph(max_n: usize) -> impl Strategy<Value = UnweightedGraph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n), 0..4 * n).prop_map(move |pairs| {
            let mut e: Vec<(usize, usize)> =
                pairs.into_iter().filter(|(u, v)| u != v).map(|(u, v)| (u.min(v), u.max(v))).collect();
            e.sort_unstable();
            e.dedup();
            UnweightedGraph::new(n, e).unwrap()
        })
    })
}

/// Rooted tree as a parent array plus a legal link/find trace on it.
fn tree_trace(max_n: usize) -> impl Strategy<Value = (Vec<Option<usize>>, Vec<UfOp>)> {
    (1..=max_n).prop_flat_map(|n| {
        let parents = proptest::collection::vec(any::<prop::sample::Index>(), n - 1);
        let picks = proptest::collection::vec((any::<bool>(), 0..n), 0..3 * n);
        (Just(n), parents, picks, any::<prop::sample::Index>()).prop_map(|(n, parents, picks, rot)| {
            // vertex (i + shift) mod n gets a parent among earlier ones
            let shift = rot.index(n);
            let lab = |i: usize| (i + shift) % n;
            let mut parent = vec![None; n];
            for (i, p) in parents.iter().enumerate() {
                parent[lab(i + 1)] = Some(lab(p.index(i + 1)));
            }
            let mut linked = vec![false; n];
            let mut ops = Vec::new();
            for (link, v) in picks {
                if link && parent[v].is_some() && !linked[v] {
                    linked[v] = true;
                    ops.push(UfOp::Link(v));
                } else {
                    ops.push(UfOp::Find(v));
                }
            }
            (parent, ops)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn bucket_index_matches_thresholds(j in 0i32..200, frac in 0.02f64..0.98, eps in 0.05f64..0.95) {
        // w sits strictly inside (T_{j-1}, T_j]
        let w = (1.0 + eps).powf(j as f64 - frac);
        let mu = ((1.0 / eps).ln() / (1.0 + eps).ln()).ceil().max(1.0) as i32;
        let (sigma, i) = bucket_index(w, eps, 1.0).unwrap();
        prop_assert_eq!((sigma as i32, i as i32), (j % mu, j / mu));
    }

    #[test]
    fn partition_covers_every_edge_once(g in connected_graph(30), eps in 0.05f64..0.95) {
        let min = g.min_weight().unwrap();
        let scaled = WeightedGraph::from_edges(g.n(), g.edges().iter().map(|e| (e.u, e.v, e.w / min))).unwrap();
        let b = partition_edges(&scaled, eps).unwrap();
        let mut seen = vec![0; scaled.m()];
        for class in b.classes.values() {
            let mut prev_max: Option<f64> = None;
            for (_, ids) in &class.levels {
                let ws: Vec<f64> = ids.iter().map(|&id| scaled.edge(id).w).collect();
                let (lo, hi) = ws.iter().fold((f64::MAX, 0.0f64), |(a, b), &w| (a.min(w), b.max(w)));
                prop_assert!(hi <= lo * (1.0 + eps) * (1.0 + 1e-12));
                if let Some(p) = prev_max {
                    prop_assert!(lo >= p / (1.0 + eps) / eps * (1.0 - 1e-12));
                }
                prev_max = Some(hi);
                for &id in ids {
                    seen[id] += 1;
                }
            }
        }
        prop_assert!(seen.iter().all(|&c| c == 1));
    }

    #[test]
    fn greedy_is_a_spanner_and_a_fixed_point(g in connected_graph(25), t in 1.0f64..6.0) {
        let h = greedy_spanner(&g, t);
        prop_assert!(verify_edge_subset(&g, &h, t).unwrap().pass);
        let sub = g.subgraph(&h);
        prop_assert_eq!(greedy_spanner(&sub, t).len(), sub.m());
    }

    #[test]
    fn extra_edges_never_raise_stretch(g in connected_graph(25), k in 1usize..4, extra in any::<prop::sample::Index>()) {
        let h = greedy_spanner(&g, (2 * k - 1) as f64);
        let before = verify_edge_subset(&g, &h, f64::INFINITY).unwrap().max_stretch;
        let mut more = h.clone();
        more.push(extra.index(g.m()));
        more.sort_unstable();
        more.dedup();
        let after = verify_edge_subset(&g, &more, f64::INFINITY).unwrap().max_stretch;
        prop_assert!(after <= before + 1e-12);
    }

    #[test]
    fn uf_engines_agree((parent, ops) in tree_trace(200)) {
        let classic = classic_uf_session(parent.len(), &links_as_unions(&parent, &ops)).unwrap();
        for mode in [StaticTreeMode::MicroMacro, StaticTreeMode::PathCompression] {
            let st = static_tree_uf_session_with(&parent, &ops, mode).unwrap();
            prop_assert_eq!(&st.answers, &classic.answers);
        }
    }

    #[test]
    fn hz_hop_stretch(g in simple_graph(60), k in 1usize..5) {
        let out = hz_spanner(&g, k).unwrap();
        prop_assert!(out.edges.iter().all(|&e| e < g.m()));
        prop_assert!(max_hop_stretch(&g, &out.edges) <= 2 * k - 1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_algorithm_meets_its_target(g in connected_graph(40), k in 1usize..5, eps in 0.05f64..0.9) {
        let reg = AlgorithmRegistry::with_defaults();
        let params = BuildParams::new(k, eps);
        for algo in ["greedy", "pm", "linear", "light"] {
            let s = reg.build(algo, &g, &params).unwrap();
            prop_assert!(s.edges.windows(2).all(|w| w[0] < w[1]));
            let r = verify_edge_subset(&g, &s.edges, params.target_stretch()).unwrap();
            prop_assert!(r.pass, "{} stretch {} > {}", algo, r.max_stretch, r.target);
            prop_assert_eq!(&reg.build(algo, &g, &params).unwrap().edges, &s.edges);
        }
    }

    #[test]
    fn light_checkers_hold_with_nominal_eps(g in connected_graph(40), k in 1usize..4) {
        let params = BuildParams::new(k, 0.02).checked().with_nominal_eps(true);
        let s = AlgorithmRegistry::with_defaults().build("light", &g, &params).unwrap();
        prop_assert!(verify_edge_subset(&g, &s.edges, params.target_stretch()).unwrap().pass);
        let v = s.report.unwrap().violations();
        prop_assert!(v.is_empty(), "{:?}", v);
    }
}
