//! Hypergraph to graph reductions and triangle-motif hypergraphs.

use crate::error::{ParaccError, Result};
use crate::graph::{Hypergraph, WeightedGraph};

/// Clique expansion: every hyperedge `e` with `|e| >= 2` becomes a clique with
/// pair weight `w_e / (|e| - 1)`. Overlapping pairs sum. Node weights are
/// copied from `h`.
pub fn clique_expand(h: &Hypergraph) -> WeightedGraph {
    let mut skipped = 0usize;
    let mut pairs = Vec::new();
    for e in h.edges() {
        let k = e.len();
        if k < 2 {
            skipped += 1;
            continue;
        }
        let w = e.weight() / (k - 1) as f64;
        let nodes = e.nodes();
        for a in 0..k {
            for b in a + 1..k {
                pairs.push((nodes[a], nodes[b], w));
            }
        }
    }
    if skipped > 0 {
        log::warn!("clique expansion skipped {skipped} singleton hyperedge(s)");
    }
    WeightedGraph::new(h.n(), pairs)
        .expect("hyperedge members are valid distinct nodes")
        .with_node_weights(h.node_weights().to_vec())
        .expect("hypergraph node weights are valid")
}

/// Star expansion of a hypergraph.
#[derive(Debug, Clone, PartialEq)]
pub struct StarExpansion {
    /// Bipartite graph over `V` (ids `0..n`) and one auxiliary node per
    /// hyperedge (ids `n..n+m`).
    pub graph: WeightedGraph,
    pub original_count: usize,
    /// `aux_of_edge[e]` is the auxiliary node for hyperedge `e`.
    pub aux_of_edge: Vec<usize>,
}

/// Each hyperedge `e` gets an auxiliary node `v_e` joined to every member by an
/// edge of weight `w_e` (1 for unweighted hypergraphs). Original nodes keep
/// their weights; auxiliary nodes get weight 0.
pub fn star_expand(h: &Hypergraph) -> StarExpansion {
    let n = h.n();
    let m = h.num_edges();
    let aux_of_edge: Vec<usize> = (n..n + m).collect();
    let edges = h
        .edges()
        .iter()
        .enumerate()
        .flat_map(|(idx, e)| e.nodes().iter().map(move |&v| (v, n + idx, e.weight())));
    let mut weights = h.node_weights().to_vec();
    weights.resize(n + m, 0.0);
    let graph = WeightedGraph::new(n + m, edges)
        .expect("star edges join distinct nodes")
        .with_node_weights(weights)
        .expect("weights are nonnegative");
    StarExpansion {
        graph,
        original_count: n,
        aux_of_edge,
    }
}

/// One 3-node hyperedge per triangle of `g`, emitted in lexicographic order of
/// `(i, j, k)` with `i < j < k`. Edge weights of `g` are ignored.
pub fn triangle_motif_hypergraph(g: &WeightedGraph) -> Hypergraph {
    let n = g.n();
    // Forward adjacency: neighbours with larger id, sorted.
    let mut fwd: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(i, j, _) in g.edges() {
        fwd[i].push(j);
    }
    for list in &mut fwd {
        list.sort_unstable();
    }
    let mut tri = Vec::new();
    for i in 0..n {
        for &j in &fwd[i] {
            let (a, b) = (&fwd[i], &fwd[j]);
            let (mut p, mut q) = (0, 0);
            while p < a.len() && q < b.len() {
                match a[p].cmp(&b[q]) {
                    std::cmp::Ordering::Less => p += 1,
                    std::cmp::Ordering::Greater => q += 1,
                    std::cmp::Ordering::Equal => {
                        if a[p] > j {
                            tri.push(vec![i, j, a[p]]);
                        }
                        p += 1;
                        q += 1;
                    }
                }
            }
        }
    }
    Hypergraph::new(n, tri).expect("triangle nodes are in range")
}

/// Rescale edge weights so the total weighted degree equals `target`.
pub fn normalize_volume(g: &WeightedGraph, target: f64) -> Result<WeightedGraph> {
    let vol = 2.0 * g.total_edge_weight();
    if vol <= 0.0 {
        return Err(ParaccError::ZeroVolume);
    }
    g.scaled(target / vol)
}
