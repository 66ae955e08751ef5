use proptest::prelude::*;

use paracc::eval::{ari, best_f1_tracking};
use paracc::exact::{brute_force_optimum, hopcroft_karp, matching_clustering};
use paracc::expansions::clique_expand;
use paracc::heuristics::{lambda_louvain, LouvainConfig};
use paracc::lp::max_triangle_violation;
use paracc::objectives::star_equivalence_check;
use paracc::rounding::{gen_round, pivot, approximation_check, RoundingParams, SignedGraph};
use paracc::{
    build_bicluster_deletion, build_cc_from_expansion, build_cc_from_pbcc, cc_objective, hyperlam_objective,
    pbcc_objective, solve_metric_lp, BipartiteGraph, Clustering, CutPenalty, Hypergraph, LpOptions, LpProblem,
    WeightMode, WeightedGraph,
};

fn bipartite() -> impl Strategy<Value = BipartiteGraph> {
    (1usize..=4, 1usize..=4)
        .prop_flat_map(|(n1, n2)| (Just(n1), Just(n2), prop::collection::vec(any::<bool>(), n1 * n2)))
        .prop_map(|(n1, n2, mask)| {
            let edges = (0..n1 * n2).filter(|&k| mask[k]).map(|k| (k / n2, k % n2));
            BipartiteGraph::new(n1, n2, edges).unwrap()
        })
}

fn labels(n: usize) -> impl Strategy<Value = Clustering> {
    prop::collection::vec(0..n.max(1), n).prop_map(Clustering::new)
}

fn hypergraph(max_n: usize) -> impl Strategy<Value = Hypergraph> {
    (2..=max_n)
        .prop_flat_map(|n| (Just(n), prop::collection::vec(prop::collection::vec(0..n, 1..=n.min(5)), 1..8)))
        .prop_map(|(n, edges)| Hypergraph::new(n, edges).unwrap())
}

fn with_clustering<S: Strategy>(s: S, n: impl Fn(&S::Value) -> usize + Clone + 'static) -> impl Strategy<Value = (S::Value, Clustering)>
where
    S::Value: Clone + std::fmt::Debug,
{
    s.prop_flat_map(move |g| {
        let k = n(&g);
        (Just(g), labels(k))
    })
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()))
}

/// Simple augmenting-path matching used as an independent size oracle.
fn kuhn_size(g: &BipartiteGraph) -> usize {
    fn augment(i: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for &j in &adj[i] {
            if !seen[j] {
                seen[j] = true;
                if owner[j].is_none_or(|o| augment(o, adj, seen, owner)) {
                    owner[j] = Some(i);
                    return true;
                }
            }
        }
        false
    }
    let adj = g.left_adjacency();
    let mut owner = vec![None; g.n2()];
    (0..g.n1())
        .filter(|&i| augment(i, &adj, &mut vec![false; g.n2()], &mut owner))
        .count()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn pbcc_matches_cc_objective(
        (g, c) in with_clustering(bipartite(), |g: &BipartiteGraph| g.n()),
        mu1 in 0.0..=1.0f64, mu2 in 0.0..=1.0f64, beta in 0.0..=1.0f64,
    ) {
        let direct = pbcc_objective(&g, &c, mu1, mu2, beta).unwrap();
        let via = cc_objective(&build_cc_from_pbcc(&g, mu1, mu2, beta).unwrap(), &c);
        prop_assert!(close(direct, via), "{direct} vs {via}");
    }

    #[test]
    fn hyperlam_zero_lambda_is_total_penalty((h, c) in with_clustering(hypergraph(8), |h: &Hypergraph| h.n())) {
        for p in [CutPenalty::AllOrNothing, CutPenalty::Linear] {
            let total: f64 = h.edges().iter().map(|e| p.evaluate(e, &c)).sum();
            let v = hyperlam_objective(&h, &c, 0.0, p, WeightMode::Degree).unwrap();
            prop_assert!(close(v, total));
        }
    }

    #[test]
    fn penalty_relations((h, c) in with_clustering(hypergraph(8), |h: &Hypergraph| h.n())) {
        for e in h.edges() {
            let aon = CutPenalty::AllOrNothing.evaluate(e, &c);
            let lin = CutPenalty::Linear.evaluate(e, &c);
            let inside = e.nodes().iter().all(|&v| c.cluster_of(v) == c.cluster_of(e.nodes()[0]));
            prop_assert!(aon == 0.0 || aon == e.weight());
            prop_assert_eq!(aon == 0.0, inside);
            prop_assert_eq!(lin == 0.0, inside);
            prop_assert!(lin >= 0.0 && lin <= aon * (e.len() - 1) as f64 + 1e-12);
        }
    }

    #[test]
    fn clique_cut_within_penalty_bounds((h, c) in with_clustering(hypergraph(8), |h: &Hypergraph| h.n())) {
        for e in h.edges().iter().filter(|e| e.len() >= 2) {
            let single = Hypergraph::new(h.n(), vec![e.nodes().to_vec()]).unwrap();
            let g = clique_expand(&single);
            let cut: f64 = g.edges().iter().filter(|&&(i, j, _)| c.separated(i, j)).map(|x| x.2).sum();
            let aon = CutPenalty::AllOrNothing.evaluate(e, &c);
            prop_assert!(cut >= aon - 1e-12);
            prop_assert!(cut <= e.len() as f64 / 2.0 * aon + 1e-12);
        }
    }

    #[test]
    fn clique_preserves_degree(h in hypergraph(8)) {
        let d = clique_expand(&h).weighted_degrees();
        for v in 0..h.n() {
            let expect = h.edges().iter().filter(|e| e.len() >= 2 && e.nodes().contains(&v)).count() as f64;
            prop_assert!(close(d[v], expect));
        }
    }

    #[test]
    fn star_equivalence_holds((h, c) in with_clustering(hypergraph(8), |h: &Hypergraph| h.n()), lambda in 0.0..2.0f64) {
        let (direct, star) = star_equivalence_check(&h, &c, lambda).unwrap();
        prop_assert!((direct - star).abs() <= 1e-12 * (1.0 + direct.abs()));
    }

    #[test]
    fn ari_symmetric_and_label_free(a in labels(9), b in labels(9), shift in 1usize..5) {
        let ab = ari(&a, &b).unwrap();
        prop_assert!(close(ab, ari(&b, &a).unwrap()));
        let relabeled = Clustering::new(a.assignment().iter().map(|&x| (x + shift) * 7));
        prop_assert!(close(ab, ari(&relabeled, &b).unwrap()));
        prop_assert!(close(ari(&a, &a).unwrap(), 1.0));
    }

    #[test]
    fn best_f1_range(c in labels(9), target in prop::collection::btree_set(0usize..9, 1..9)) {
        let t: Vec<usize> = target.into_iter().collect();
        let f = best_f1_tracking(&c, &t).unwrap();
        prop_assert!(f > 0.0 && f <= 1.0);
        let exact = c.clusters().iter().any(|s| *s == t);
        prop_assert_eq!(exact, f == 1.0);
    }

    #[test]
    fn matching_is_maximum(g in bipartite()) {
        let m = hopcroft_karp(&g);
        prop_assert!(m.is_valid(&g));
        prop_assert_eq!(m.len(), kuhn_size(&g));
        let c = matching_clustering(&g, &m);
        prop_assert!(c.sizes().iter().all(|&s| s <= 2));
    }

    #[test]
    fn pivot_deterministic_and_separates_negatives(
        n in 1usize..9, mask in prop::collection::vec(any::<bool>(), 36), seed in any::<u64>(),
    ) {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let pos: Vec<(usize, usize)> = pairs.iter().copied().enumerate().filter(|&(k, _)| mask[k]).map(|p| p.1).collect();
        let g = SignedGraph::from_positive_pairs(n, pos);
        let c = pivot(&g, seed);
        prop_assert_eq!(&c, &pivot(&g, seed));
        // Every non-pivot member of a cluster is positive to some member.
        for cluster in c.clusters() {
            if cluster.len() > 1 {
                prop_assert!(cluster.iter().any(|&p| cluster.iter().all(|&v| v == p || g.is_positive(p, v))));
            }
        }
    }

    #[test]
    fn louvain_never_worse_than_singletons(
        n in 2usize..10, w in prop::collection::vec(0.0..2.0f64, 45), lambda in 0.0..1.0f64, seed in any::<u64>(),
    ) {
        let edges: Vec<(usize, usize, f64)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .enumerate()
            .filter(|&(k, _)| w[k] > 1.0)
            .map(|(k, (i, j))| (i, j, w[k] - 1.0))
            .collect();
        let g = WeightedGraph::new(n, edges).unwrap();
        let g = { let d = g.weighted_degrees(); g.with_node_weights(d).unwrap() };
        let cfg = LouvainConfig::new(lambda, seed);
        let c = lambda_louvain(&g, &cfg).unwrap();
        prop_assert_eq!(&c, &lambda_louvain(&g, &cfg).unwrap());
        let inst = build_cc_from_expansion(&g, lambda).unwrap();
        prop_assert!(cc_objective(&inst, &c) <= cc_objective(&inst, &Clustering::singletons(n)) + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn lp_sound_on_small_pbcc(g in bipartite(), mu in 0.0..0.5f64, beta in 0.0..=1.0f64, seed in any::<u64>()) {
        let inst = build_cc_from_pbcc(&g, mu, mu, beta).unwrap();
        let sol = solve_metric_lp(&LpProblem::from_instance(&inst).unwrap(), &LpOptions::default()).unwrap();
        prop_assert!(sol.feasibility_violation <= 1e-6);
        prop_assert!(max_triangle_violation(&sol.x) <= 1e-6);
        prop_assert!(sol.x.values().iter().all(|&v| (0.0..=1.0).contains(&v)));
        let (_, opt) = brute_force_optimum(&inst).unwrap();
        if sol.converged {
            prop_assert!(sol.lower_bound <= opt + 1e-9, "bound {} > opt {}", sol.lower_bound, opt);
            prop_assert!(sol.lower_bound <= sol.objective_value + 1e-12);
        }
        for w in sol.history.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12 * (1.0 + w[0].abs()), "history rose: {:?}", sol.history);
        }
        // A passing checker certifies the rounded cost against the LP value.
        let delta = 0.4;
        let check = approximation_check(&inst, &sol.x, delta, 5.0);
        if sol.converged && check.passed {
            let c = gen_round(&sol.x, &RoundingParams::new(delta, seed).unwrap());
            prop_assert!(cc_objective(&inst, &c) <= 5.0 * sol.objective_value + 1e-6);
        }
    }

    #[test]
    fn pinned_pairs_stay_at_one(g in bipartite()) {
        let inst = build_bicluster_deletion(&g);
        let sol = solve_metric_lp(&LpProblem::from_instance(&inst).unwrap(), &LpOptions::default()).unwrap();
        for &(i, j) in inst.fixed_pairs() {
            prop_assert_eq!(sol.x.get(i, j), 1.0);
        }
    }
}
