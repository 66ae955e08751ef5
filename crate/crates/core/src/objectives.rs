//! Objective and quotient evaluators: hypergraph objective with a resolution
//! parameter, PBCC, normalized cuts and the cut/volume-product quotients.

use crate::error::{check_nonnegative, check_unit_interval, ParaccError, Result};
use crate::expansions::star_expand;
use crate::graph::{build_cc_from_expansion, cc_objective, BipartiteGraph, Clustering, Hyperedge, Hypergraph, WeightMode, WeightedGraph};

/// Hyperedge cut penalty `zeta(e, C)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CutPenalty {
    /// `w_e` if `e` spans two or more clusters, else 0.
    AllOrNothing,
    /// `w_e * (|e| - max_S |e ∩ S|)`.
    Linear,
}

impl CutPenalty {
    pub fn evaluate(self, e: &Hyperedge, c: &Clustering) -> f64 {
        let nodes = e.nodes();
        let first = c.cluster_of(nodes[0]);
        if nodes.iter().all(|&v| c.cluster_of(v) == first) {
            return 0.0;
        }
        match self {
            CutPenalty::AllOrNothing => e.weight(),
            CutPenalty::Linear => {
                let (_, best) = majority_cluster(nodes, c);
                e.weight() * (nodes.len() - best) as f64
            }
        }
    }
}

/// Cluster holding the most members of `nodes` and that count; ties go to the
/// lowest cluster id.
pub(crate) fn majority_cluster(nodes: &[usize], c: &Clustering) -> (usize, usize) {
    let mut counts: Vec<(usize, usize)> = nodes.iter().map(|&v| (c.cluster_of(v), 0)).collect();
    counts.sort_unstable();
    counts.dedup();
    for &v in nodes {
        let id = c.cluster_of(v);
        let slot = counts.binary_search_by(|p| p.0.cmp(&id)).unwrap();
        counts[slot].1 += 1;
    }
    let mut best = counts[0];
    for &p in &counts[1..] {
        if p.1 > best.1 {
            best = p;
        }
    }
    best
}

/// `Σ_e zeta(e, C) + Σ_{i<j} lambda w_i w_j [i, j together]` with node weights
/// chosen by `mode`.
pub fn hyperlam_objective(
    h: &Hypergraph,
    c: &Clustering,
    lambda: f64,
    penalty: CutPenalty,
    mode: WeightMode,
) -> Result<f64> {
    hyperlam_objective_weighted(h, c, lambda, penalty, &h.weights_for(mode))
}

/// As [`hyperlam_objective`] with explicit node weights.
pub fn hyperlam_objective_weighted(
    h: &Hypergraph,
    c: &Clustering,
    lambda: f64,
    penalty: CutPenalty,
    weights: &[f64],
) -> Result<f64> {
    check_nonnegative("lambda", lambda)?;
    check_cover(h.n(), c)?;
    if weights.len() != h.n() {
        return Err(ParaccError::InvalidGraph(format!(
            "{} node weights for {} nodes",
            weights.len(),
            h.n()
        )));
    }
    let cut: f64 = h.edges().iter().map(|e| penalty.evaluate(e, c)).sum();
    Ok(cut + pairwise_repulsion(c, lambda, weights))
}

/// `lambda/2 * Σ_S [(Σ_{i∈S} w_i)^2 - Σ_{i∈S} w_i^2]`.
fn pairwise_repulsion(c: &Clustering, lambda: f64, weights: &[f64]) -> f64 {
    let k = c.num_clusters();
    let mut sum = vec![0.0; k];
    let mut sq = vec![0.0; k];
    for (v, &w) in weights.iter().enumerate() {
        sum[c.cluster_of(v)] += w;
        sq[c.cluster_of(v)] += w * w;
    }
    (0..k).map(|s| 0.5 * lambda * (sum[s] * sum[s] - sq[s])).sum()
}

fn check_cover(n: usize, c: &Clustering) -> Result<()> {
    if c.len() != n {
        return Err(ParaccError::InvalidGraph(format!(
            "clustering covers {} nodes, graph has {n}",
            c.len()
        )));
    }
    Ok(())
}

/// PBCC objective over the combined id space (`V2` shifted by `n1`),
/// evaluated from per-cluster side counts.
pub fn pbcc_objective(g: &BipartiteGraph, c: &Clustering, mu1: f64, mu2: f64, beta: f64) -> Result<f64> {
    check_unit_interval("mu1", mu1)?;
    check_unit_interval("mu2", mu2)?;
    check_unit_interval("beta", beta)?;
    check_cover(g.n(), c)?;
    let n1 = g.n1();
    let k = c.num_clusters();
    let mut left = vec![0u64; k];
    let mut right = vec![0u64; k];
    for v in 0..g.n() {
        if v < n1 {
            left[c.cluster_of(v)] += 1;
        } else {
            right[c.cluster_of(v)] += 1;
        }
    }
    let mut cut_edges = 0u64;
    let mut inner = vec![0u64; k];
    for (i, j) in g.combined_edges() {
        if c.separated(i, j) {
            cut_edges += 1;
        } else {
            inner[c.cluster_of(i)] += 1;
        }
    }
    let mut same1 = 0u64;
    let mut same2 = 0u64;
    let mut cross_nonedges = 0u64;
    for s in 0..k {
        same1 += left[s] * left[s].saturating_sub(1) / 2;
        same2 += right[s] * right[s].saturating_sub(1) / 2;
        cross_nonedges += left[s] * right[s] - inner[s];
    }
    Ok((1.0 - beta) * cut_edges as f64
        + beta * cross_nonedges as f64
        + mu1 * same1 as f64
        + mu2 * same2 as f64)
}

fn membership(n: usize, s: &[usize]) -> Result<Vec<bool>> {
    let mut inside = vec![false; n];
    for &v in s {
        if v >= n {
            return Err(ParaccError::InvalidGraph(format!("node {v} out of range")));
        }
        inside[v] = true;
    }
    Ok(inside)
}

/// Graph normalized cut `cut(S)/vol(S) + cut(S)/vol(S̄)` with weighted degrees.
pub fn ncut(g: &WeightedGraph, s: &[usize]) -> Result<f64> {
    let inside = membership(g.n(), s)?;
    let deg = g.weighted_degrees();
    let vol_s: f64 = (0..g.n()).filter(|&v| inside[v]).map(|v| deg[v]).sum();
    let vol_t: f64 = (0..g.n()).filter(|&v| !inside[v]).map(|v| deg[v]).sum();
    if vol_s <= 0.0 || vol_t <= 0.0 {
        return Err(ParaccError::ZeroVolume);
    }
    let cut: f64 = g
        .edges()
        .iter()
        .filter(|&&(i, j, _)| inside[i] != inside[j])
        .map(|e| e.2)
        .sum();
    Ok(cut / vol_s + cut / vol_t)
}

/// Two-way hypergraph cut functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HyperCut {
    /// `w_e` for every hyperedge crossing the boundary.
    Boundary,
    /// `w_e * min(|S ∩ e|, |S̄ ∩ e|)`.
    Linear,
}

pub fn hyper_cut(h: &Hypergraph, inside: &[bool], kind: HyperCut) -> f64 {
    h.edges()
        .iter()
        .map(|e| {
            let a = e.nodes().iter().filter(|&&v| inside[v]).count();
            let b = e.len() - a;
            match kind {
                HyperCut::Boundary if a > 0 && b > 0 => e.weight(),
                HyperCut::Boundary => 0.0,
                HyperCut::Linear => e.weight() * a.min(b) as f64,
            }
        })
        .sum()
}

fn side_volumes(h: &Hypergraph, inside: &[bool]) -> Result<(f64, f64)> {
    let d = h.degrees();
    let mut vs = 0.0;
    let mut vt = 0.0;
    for v in 0..h.n() {
        if inside[v] {
            vs += d[v] as f64;
        } else {
            vt += d[v] as f64;
        }
    }
    if vs <= 0.0 || vt <= 0.0 {
        return Err(ParaccError::ZeroVolume);
    }
    Ok((vs, vt))
}

/// Hypergraph normalized cut `cut_H(S)/vol_H(S) + cut_H(S)/vol_H(S̄)`.
pub fn hyper_ncut(h: &Hypergraph, s: &[usize], kind: HyperCut) -> Result<f64> {
    let inside = membership(h.n(), s)?;
    hyper_ncut_mask(h, &inside, kind)
}

pub(crate) fn hyper_ncut_mask(h: &Hypergraph, inside: &[bool], kind: HyperCut) -> Result<f64> {
    let (vs, vt) = side_volumes(h, inside)?;
    let cut = hyper_cut(h, inside, kind);
    Ok(cut / vs + cut / vt)
}

/// `psi(S) = cut_H(S) / (vol_H(S) vol_H(S̄))`.
pub fn psi(h: &Hypergraph, s: &[usize], kind: HyperCut) -> Result<f64> {
    let inside = membership(h.n(), s)?;
    psi_mask(h, &inside, kind)
}

pub(crate) fn psi_mask(h: &Hypergraph, inside: &[bool], kind: HyperCut) -> Result<f64> {
    let (vs, vt) = side_volumes(h, inside)?;
    Ok(hyper_cut(h, inside, kind) / (vs * vt))
}

/// Auxiliary placement for the star expansion: each hyperedge's auxiliary node
/// joins the cluster holding most of its members (lowest id on ties).
/// Returns labels over `V ∪ V_E`.
pub fn natural_extension(h: &Hypergraph, c: &Clustering) -> Clustering {
    let mut labels = c.assignment().to_vec();
    labels.extend(h.edges().iter().map(|e| majority_cluster(e.nodes(), c).0));
    Clustering::new(labels)
}

/// Multiway quotient `Σ_S cut(S̃) / Σ_S vol_H(S) vol_H(V∖S)` where `S̃` is the
/// natural extension of `S` in the star expansion.
pub fn capital_psi(h: &Hypergraph, c: &Clustering) -> Result<f64> {
    check_cover(h.n(), c)?;
    if c.num_clusters() < 2 {
        return Err(ParaccError::Undefined("quotient needs at least two clusters".into()));
    }
    let ext = natural_extension(h, c);
    let n = h.n();
    // Each cut star edge is counted once from each of its two clusters.
    let mut cut_sum = 0.0;
    for (idx, e) in h.edges().iter().enumerate() {
        let aux = ext.cluster_of(n + idx);
        for &v in e.nodes() {
            if ext.cluster_of(v) != aux {
                cut_sum += 2.0 * e.weight();
            }
        }
    }
    let total = h.total_volume();
    let mut vols = vec![0.0; c.num_clusters()];
    for v in 0..n {
        vols[c.cluster_of(v)] += h.degrees()[v] as f64;
    }
    let denom: f64 = vols.iter().map(|&v| v * (total - v)).sum();
    if denom <= 0.0 {
        return Err(ParaccError::ZeroVolume);
    }
    Ok(cut_sum / denom)
}

/// Evaluates the linear-penalty hypergraph objective two ways, using the node
/// weights stored on `h`: directly, and as correlation clustering cost on the
/// star expansion with auxiliary nodes in their natural placement.
/// The two values agree.
pub fn star_equivalence_check(h: &Hypergraph, c: &Clustering, lambda: f64) -> Result<(f64, f64)> {
    let direct = hyperlam_objective_weighted(h, c, lambda, CutPenalty::Linear, h.node_weights())?;
    let star = star_expand(h);
    let inst = build_cc_from_expansion(&star.graph, lambda)?;
    let ext = natural_extension(h, c);
    Ok((direct, cc_objective(&inst, &ext)))
}
