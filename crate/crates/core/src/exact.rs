//! Exact oracles for small instances and the matching regime of PBCC.

use std::collections::VecDeque;

use crate::error::{ParaccError, Result};
use crate::graph::{cc_objective, BipartiteGraph, CcInstance, Clustering, Hypergraph};
use crate::objectives::{hyper_ncut_mask, psi_mask, HyperCut};

pub const BRUTE_FORCE_LIMIT: usize = 12;
pub const BIPARTITION_LIMIT: usize = 20;

/// Minimum-cost clustering by enumerating restricted-growth strings in
/// lexicographic order. Branches whose partial cost already reaches the
/// incumbent are pruned, so ties keep the lexicographically smallest string.
pub fn brute_force_optimum(inst: &CcInstance) -> Result<(Clustering, f64)> {
    brute_force_with_limit(inst, BRUTE_FORCE_LIMIT)
}

pub fn brute_force_with_limit(inst: &CcInstance, limit: usize) -> Result<(Clustering, f64)> {
    let n = inst.n();
    if n > limit {
        return Err(ParaccError::SizeLimit { n, limit });
    }
    if n == 0 {
        return Ok((Clustering::new([]), 0.0));
    }
    let dense = inst.dense();
    // Row-major copies for the inner loop: cost of putting u and v together / apart.
    let mut together = vec![0.0; n * n];
    let mut apart = vec![0.0; n * n];
    for u in 0..n {
        for v in u + 1..n {
            let idx = dense.positive.index(u, v);
            let t = if dense.fixed[idx] {
                f64::INFINITY
            } else {
                dense.negative.values()[idx]
            };
            together[u * n + v] = t;
            together[v * n + u] = t;
            apart[u * n + v] = dense.positive.values()[idx];
            apart[v * n + u] = dense.positive.values()[idx];
        }
    }
    let mut search = Search {
        n,
        together,
        apart,
        labels: vec![0; n],
        best_labels: vec![0; n],
        best: f64::INFINITY,
    };
    search.descend(1, 1, 0.0);
    let c = Clustering::new(search.best_labels.iter().copied());
    let value = cc_objective(inst, &c);
    Ok((c, value))
}

struct Search {
    n: usize,
    together: Vec<f64>,
    apart: Vec<f64>,
    labels: Vec<usize>,
    best_labels: Vec<usize>,
    best: f64,
}

impl Search {
    /// `v` is the next node to place; `blocks` counts blocks used by `0..v`.
    fn descend(&mut self, v: usize, blocks: usize, cost: f64) {
        if v == self.n {
            if cost < self.best {
                self.best = cost;
                self.best_labels.copy_from_slice(&self.labels);
            }
            return;
        }
        for b in 0..=blocks {
            let mut add = 0.0;
            let row = v * self.n;
            for u in 0..v {
                add += if self.labels[u] == b {
                    self.together[row + u]
                } else {
                    self.apart[row + u]
                };
            }
            let next = cost + add;
            if next >= self.best {
                continue;
            }
            self.labels[v] = b;
            self.descend(v + 1, blocks.max(b + 1), next);
        }
    }
}

/// Quotient minimized by [`brute_force_bipartition`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Quotient {
    Psi,
    Hncut,
}

/// Minimum of the quotient over all nontrivial bipartitions `{S, S̄}` with the
/// last node kept in `S̄`. Bipartitions with a zero-volume side are skipped.
/// Ties go to the smallest bitmask of `S`.
pub fn brute_force_bipartition(h: &Hypergraph, quotient: Quotient, kind: HyperCut) -> Result<(Vec<usize>, f64)> {
    let n = h.n();
    if n > BIPARTITION_LIMIT {
        return Err(ParaccError::SizeLimit {
            n,
            limit: BIPARTITION_LIMIT,
        });
    }
    if n < 2 {
        return Err(ParaccError::Undefined("bipartition needs at least two nodes".into()));
    }
    let mut best: Option<(u32, f64)> = None;
    let mut inside = vec![false; n];
    for mask in 1u32..(1u32 << (n - 1)) {
        for (v, slot) in inside.iter_mut().enumerate() {
            *slot = mask >> v & 1 == 1;
        }
        let value = match quotient {
            Quotient::Psi => psi_mask(h, &inside, kind),
            Quotient::Hncut => hyper_ncut_mask(h, &inside, kind),
        };
        let Ok(value) = value else { continue };
        if best.is_none_or(|(_, b)| value < b) {
            best = Some((mask, value));
        }
    }
    let (mask, value) = best.ok_or(ParaccError::ZeroVolume)?;
    Ok(((0..n).filter(|&v| mask >> v & 1 == 1).collect(), value))
}

/// Disjoint pairs `(i, j)` with `i ∈ V1` and `j ∈ V2` (side-local ids).
#[derive(Debug, Clone, PartialEq, Eq, Default, serde::Serialize)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
}

impl Matching {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Every pair is an edge of `g` and no node repeats.
    pub fn is_valid(&self, g: &BipartiteGraph) -> bool {
        let mut left = vec![false; g.n1()];
        let mut right = vec![false; g.n2()];
        for &(i, j) in &self.pairs {
            if i >= g.n1() || j >= g.n2() || !g.has_edge(i, j) || left[i] || right[j] {
                return false;
            }
            left[i] = true;
            right[j] = true;
        }
        true
    }
}

const FREE: usize = usize::MAX;

/// Maximum-cardinality matching by Hopcroft-Karp. Deterministic: neighbours
/// are visited in increasing order.
pub fn hopcroft_karp(g: &BipartiteGraph) -> Matching {
    let adj = g.left_adjacency();
    let (n1, n2) = (g.n1(), g.n2());
    let mut mate_l = vec![FREE; n1];
    let mut mate_r = vec![FREE; n2];
    let mut dist = vec![0usize; n1];
    loop {
        // BFS from free left nodes builds layers; `found` marks a free right node reached.
        let mut queue = VecDeque::new();
        for i in 0..n1 {
            if mate_l[i] == FREE {
                dist[i] = 0;
                queue.push_back(i);
            } else {
                dist[i] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(i) = queue.pop_front() {
            for &j in &adj[i] {
                match mate_r[j] {
                    FREE => found = true,
                    k if dist[k] == usize::MAX => {
                        dist[k] = dist[i] + 1;
                        queue.push_back(k);
                    }
                    _ => {}
                }
            }
        }
        if !found {
            break;
        }
        let mut next = vec![0usize; n1];
        for i in 0..n1 {
            if mate_l[i] == FREE {
                augment(i, &adj, &mut mate_l, &mut mate_r, &mut dist, &mut next);
            }
        }
    }
    Matching {
        pairs: (0..n1)
            .filter(|&i| mate_l[i] != FREE)
            .map(|i| (i, mate_l[i]))
            .collect(),
    }
}

fn augment(
    i: usize,
    adj: &[Vec<usize>],
    mate_l: &mut [usize],
    mate_r: &mut [usize],
    dist: &mut [usize],
    next: &mut [usize],
) -> bool {
    while next[i] < adj[i].len() {
        let j = adj[i][next[i]];
        next[i] += 1;
        let k = mate_r[j];
        let ok = if k == FREE {
            true
        } else if dist[k] == dist[i].wrapping_add(1) {
            augment(k, adj, mate_l, mate_r, dist, next)
        } else {
            false
        };
        if ok {
            mate_l[i] = j;
            mate_r[j] = i;
            return true;
        }
    }
    dist[i] = usize::MAX;
    false
}

/// Matched pairs become two-node clusters; unmatched nodes stay singletons.
pub fn matching_clustering(g: &BipartiteGraph, m: &Matching) -> Clustering {
    let n1 = g.n1();
    let mut labels: Vec<usize> = (0..g.n()).collect();
    for &(i, j) in &m.pairs {
        labels[n1 + j] = i;
    }
    Clustering::new(labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_cc_from_pbcc, NegativeRule};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;

    fn complete_signed(n: usize, sign: bool) -> CcInstance {
        let mut pos = Vec::new();
        let mut neg = BTreeMap::new();
        for i in 0..n {
            for j in i + 1..n {
                if sign {
                    pos.push((i, j, 1.0));
                } else {
                    neg.insert((i, j), 1.0);
                }
            }
        }
        CcInstance::new(n, pos, NegativeRule::Explicit(neg), []).unwrap()
    }

    #[test]
    fn brute_force_extremes() {
        let (c, v) = brute_force_optimum(&complete_signed(6, true)).unwrap();
        assert_eq!((c.num_clusters(), v), (1, 0.0));
        let (c, v) = brute_force_optimum(&complete_signed(6, false)).unwrap();
        assert_eq!((c.num_clusters(), v), (6, 0.0));
        let g = BipartiteGraph::new(2, 2, [(0, 0), (0, 1), (1, 0), (1, 1)]).unwrap();
        let inst = build_cc_from_pbcc(&g, 0.0, 0.0, 0.5).unwrap();
        let (c, v) = brute_force_optimum(&inst).unwrap();
        assert_eq!((c.num_clusters(), v), (1, 0.0));
        assert!(brute_force_optimum(&complete_signed(13, true)).is_err());
    }

    #[test]
    fn brute_force_matches_plain_enumeration() {
        // Independent oracle: enumerate every labelling in base n and keep the minimum.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let n = rng.random_range(1..=6);
            let mut pos = Vec::new();
            let mut neg = BTreeMap::new();
            for i in 0..n {
                for j in i + 1..n {
                    pos.push((i, j, rng.random::<f64>()));
                    neg.insert((i, j), rng.random::<f64>());
                }
            }
            let inst = CcInstance::new(n, pos, NegativeRule::Explicit(neg), []).unwrap();
            let mut best = f64::INFINITY;
            let total = n.pow(n as u32);
            for code in 0..total {
                let mut x = code;
                let labels: Vec<usize> = (0..n)
                    .map(|_| {
                        let l = x % n;
                        x /= n;
                        l
                    })
                    .collect();
                best = best.min(cc_objective(&inst, &Clustering::new(labels)));
            }
            let (_, v) = brute_force_optimum(&inst).unwrap();
            assert!((v - best).abs() < 1e-12);
        }
    }

    #[test]
    fn matching_sizes() {
        let k33 = BipartiteGraph::new(3, 3, (0..3).flat_map(|i| (0..3).map(move |j| (i, j)))).unwrap();
        assert_eq!(hopcroft_karp(&k33).len(), 3);
        let star = BipartiteGraph::new(1, 4, (0..4).map(|j| (0, j))).unwrap();
        assert_eq!(hopcroft_karp(&star).len(), 1);
        // a1 - b1 - a2 - b2
        let p4 = BipartiteGraph::new(2, 2, [(0, 0), (1, 0), (1, 1)]).unwrap();
        let m = hopcroft_karp(&p4);
        assert_eq!(m.len(), 2);
        assert!(m.is_valid(&p4));
    }

    #[test]
    fn matching_clusters() {
        let g = BipartiteGraph::new(2, 2, [(0, 0), (1, 1)]).unwrap();
        let c = matching_clustering(&g, &Matching::default());
        assert_eq!(c.num_clusters(), 4);
        let c = matching_clustering(&g, &hopcroft_karp(&g));
        assert_eq!(c.assignment(), &[0, 1, 0, 1]);
    }

    #[test]
    fn bipartition_search() {
        let h = Hypergraph::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let (s, v) = brute_force_bipartition(&h, Quotient::Psi, HyperCut::Boundary).unwrap();
        assert_eq!(v, 0.0);
        assert_eq!(s, vec![0, 1]);
        let big = Hypergraph::new(4, vec![vec![0, 1, 2, 3]]).unwrap();
        let (s, v) = brute_force_bipartition(&big, Quotient::Psi, HyperCut::Boundary).unwrap();
        assert_eq!(s.len(), 2);
        assert!((v - 0.25).abs() < 1e-15);
    }
}
