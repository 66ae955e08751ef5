//! Node-weighted Lambda-Louvain: greedy local moves plus coarsening for the
//! correlation clustering cost `Σ w⁺ [cut] + Σ lambda w_i w_j [together]` on a
//! weighted graph.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{check_nonnegative, Result};
use crate::expansions::{clique_expand, star_expand};
use crate::graph::{build_cc_from_expansion, cc_objective, Clustering, Hypergraph, WeightMode, WeightedGraph};

/// Moves must lower the cost by more than this to be accepted.
const MIN_GAIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LouvainConfig {
    pub lambda: f64,
    pub seed: u64,
    /// Coarsening levels.
    pub max_levels: usize,
    /// Node-move passes per level.
    pub max_passes: usize,
}

impl LouvainConfig {
    pub fn new(lambda: f64, seed: u64) -> Self {
        Self {
            lambda,
            seed,
            max_levels: 20,
            max_passes: 100,
        }
    }
}

/// An accepted move, reported to observers.
pub struct LouvainEvent<'a> {
    pub level: usize,
    /// Node id at the current level.
    pub node: usize,
    pub from: usize,
    pub to: usize,
    /// Cost change of the move (negative).
    pub delta: f64,
    /// Running cost after the move, tracked incrementally.
    pub objective: f64,
    base: &'a [usize],
    labels: &'a [usize],
}

impl LouvainEvent<'_> {
    /// Current clustering of the original nodes.
    pub fn original_assignment(&self) -> Clustering {
        Clustering::new(self.base.iter().map(|&b| self.labels[b]))
    }
}

struct Level {
    adj: Vec<Vec<(usize, f64)>>,
    weight: Vec<f64>,
}

pub fn lambda_louvain(g: &WeightedGraph, cfg: &LouvainConfig) -> Result<Clustering> {
    lambda_louvain_observed(g, cfg, &mut |_| {})
}

/// Lambda-Louvain with a callback on every accepted move. Starts from
/// singletons, so the result never costs more than all-singletons; the
/// one-cluster solution is returned instead if it is cheaper.
pub fn lambda_louvain_observed(
    g: &WeightedGraph,
    cfg: &LouvainConfig,
    observer: &mut dyn FnMut(&LouvainEvent<'_>),
) -> Result<Clustering> {
    check_nonnegative("lambda", cfg.lambda)?;
    let n = g.n();
    let lambda = cfg.lambda;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut level = Level {
        adj: g.adjacency(),
        weight: g.node_weights().to_vec(),
    };
    let mut base: Vec<usize> = (0..n).collect();
    let mut objective = g.total_edge_weight();

    for depth in 0..cfg.max_levels {
        let m = level.weight.len();
        let mut labels: Vec<usize> = (0..m).collect();
        let mut cw = level.weight.clone();
        let mut size = vec![1usize; m];
        let mut empty: Vec<usize> = Vec::new();
        let mut scratch = vec![0.0; m];
        let mut touched: Vec<usize> = Vec::new();
        let mut order: Vec<usize> = (0..m).collect();
        let mut moved_any = false;

        for _ in 0..cfg.max_passes {
            order.shuffle(&mut rng);
            let mut moved = false;
            for &i in &order {
                let s = labels[i];
                let wi = level.weight[i];
                for &(v, w) in &level.adj[i] {
                    let c = labels[v];
                    if scratch[c] == 0.0 {
                        touched.push(c);
                    }
                    scratch[c] += w;
                }
                let pos_s = scratch[s];
                let rest_s = cw[s] - wi;
                let mut best: Option<(usize, f64)> = None;
                for &t in &touched {
                    if t == s {
                        continue;
                    }
                    let d = pos_s - scratch[t] + lambda * wi * (cw[t] - rest_s);
                    if best.is_none_or(|(_, b)| d < b) {
                        best = Some((t, d));
                    }
                }
                if size[s] > 1 {
                    let d = pos_s - lambda * wi * rest_s;
                    if best.is_none_or(|(_, b)| d < b) {
                        let t = *empty.last().expect("a cluster with >1 node leaves an empty id");
                        best = Some((t, d));
                    }
                }
                for &c in &touched {
                    scratch[c] = 0.0;
                }
                touched.clear();
                let Some((t, d)) = best else { continue };
                if d >= -MIN_GAIN {
                    continue;
                }
                if size[t] == 0 {
                    empty.pop();
                }
                labels[i] = t;
                cw[s] -= wi;
                cw[t] += wi;
                size[s] -= 1;
                size[t] += 1;
                if size[s] == 0 {
                    cw[s] = 0.0;
                    empty.push(s);
                }
                objective += d;
                moved = true;
                observer(&LouvainEvent {
                    level: depth,
                    node: i,
                    from: s,
                    to: t,
                    delta: d,
                    objective,
                    base: &base,
                    labels: &labels,
                });
            }
            if cfg!(debug_assertions) {
                let mut check = vec![0.0; m];
                for v in 0..m {
                    check[labels[v]] += level.weight[v];
                }
                for c in 0..m {
                    debug_assert!((check[c] - cw[c]).abs() <= 1e-9 * (1.0 + check[c].abs()));
                }
            }
            if !moved {
                break;
            }
            moved_any = true;
        }

        let relabel = Clustering::new(labels.iter().copied());
        for b in base.iter_mut() {
            *b = relabel.cluster_of(*b);
        }
        if !moved_any {
            break;
        }
        level = coarsen(&level, &relabel);
    }

    let result = Clustering::new(base.iter().copied());
    let inst = build_cc_from_expansion(g, lambda)?;
    let one = Clustering::single(n);
    if n > 0 && cc_objective(&inst, &one) < cc_objective(&inst, &result) {
        return Ok(one);
    }
    Ok(result)
}

fn coarsen(level: &Level, c: &Clustering) -> Level {
    let k = c.num_clusters();
    let mut weight = vec![0.0; k];
    for (v, &w) in level.weight.iter().enumerate() {
        weight[c.cluster_of(v)] += w;
    }
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    for (v, nbrs) in level.adj.iter().enumerate() {
        for &(u, w) in nbrs {
            let (a, b) = (c.cluster_of(v), c.cluster_of(u));
            if v < u && a != b {
                edges.push((a.min(b), a.max(b), w));
            }
        }
    }
    edges.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));
    let mut adj = vec![Vec::new(); k];
    let mut idx = 0;
    while idx < edges.len() {
        let (a, b, mut w) = edges[idx];
        idx += 1;
        while idx < edges.len() && (edges[idx].0, edges[idx].1) == (a, b) {
            w += edges[idx].2;
            idx += 1;
        }
        adj[a].push((b, w));
        adj[b].push((a, w));
    }
    Level { adj, weight }
}

/// How the hypergraph is reduced before running Lambda-Louvain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpansionKind {
    /// Clique expansion; approximates the all-or-nothing penalty.
    AonViaClique,
    /// Star expansion with weight-0 auxiliary nodes; models the linear penalty exactly.
    LinearViaStar,
}

/// Expand `h`, run Lambda-Louvain and return the clustering of the original
/// nodes (star auxiliaries dropped).
pub fn hyperlam_louvain(
    h: &Hypergraph,
    lambda: f64,
    kind: ExpansionKind,
    mode: WeightMode,
    seed: u64,
) -> Result<Clustering> {
    let h = h.clone().with_weight_mode(mode);
    let cfg = LouvainConfig::new(lambda, seed);
    match kind {
        ExpansionKind::AonViaClique => lambda_louvain(&clique_expand(&h), &cfg),
        ExpansionKind::LinearViaStar => {
            let star = star_expand(&h);
            Ok(lambda_louvain(&star.graph, &cfg)?.restrict(star.original_count))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::brute_force_optimum;

    fn two_cliques() -> WeightedGraph {
        let mut e = Vec::new();
        for base in [0, 4] {
            for i in 0..4 {
                for j in i + 1..4 {
                    e.push((base + i, base + j, 1.0));
                }
            }
        }
        e.push((3, 4, 1.0));
        WeightedGraph::new(8, e).unwrap()
    }

    #[test]
    fn zero_lambda_merges_components() {
        let g = WeightedGraph::new(5, [(0, 1, 1.0), (1, 2, 1.0), (3, 4, 2.0)]).unwrap();
        let c = lambda_louvain(&g, &LouvainConfig::new(0.0, 1)).unwrap();
        assert_eq!(c.assignment(), &[0, 0, 0, 1, 1]);
    }

    #[test]
    fn large_lambda_gives_singletons() {
        let c = lambda_louvain(&two_cliques(), &LouvainConfig::new(1.5, 1)).unwrap();
        assert_eq!(c.num_clusters(), 8);
    }

    #[test]
    fn two_cliques_recovered() {
        let g = two_cliques();
        let inst = build_cc_from_expansion(&g, 0.3).unwrap();
        let (opt_c, opt) = brute_force_optimum(&inst).unwrap();
        for seed in 0..5 {
            let c = lambda_louvain(&g, &LouvainConfig::new(0.3, seed)).unwrap();
            assert_eq!(c, opt_c);
            assert!((cc_objective(&inst, &c) - opt).abs() < 1e-12);
        }
    }

    #[test]
    fn incremental_objective_tracks_recompute() {
        let g = two_cliques();
        let inst = build_cc_from_expansion(&g, 0.2).unwrap();
        let mut last = f64::INFINITY;
        let mut events = 0;
        lambda_louvain_observed(&g, &LouvainConfig::new(0.2, 7), &mut |e| {
            let exact = cc_objective(&inst, &e.original_assignment());
            assert!((exact - e.objective).abs() < 1e-9);
            assert!(e.objective < last);
            last = e.objective;
            events += 1;
        })
        .unwrap();
        assert!(events > 0);
    }

    #[test]
    fn single_hyperedge_small_lambda() {
        let h = Hypergraph::new(4, vec![vec![0, 1, 2, 3]]).unwrap();
        for kind in [ExpansionKind::AonViaClique, ExpansionKind::LinearViaStar] {
            let c = hyperlam_louvain(&h, 0.01, kind, WeightMode::Degree, 0).unwrap();
            assert_eq!(c.num_clusters(), 1);
        }
    }
}
