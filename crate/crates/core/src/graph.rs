//! Core data model: hypergraphs, bipartite graphs, weighted graphs, signed
//! correlation-clustering instances and clusterings.
//!
//! Node ids are dense and 0-based everywhere inside the library. For bipartite
//! graphs the combined id space puts `V1` at `0..n1` and `V2` at `n1..n1+n2`.
//! All types are immutable after construction.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{check_nonnegative, check_unit_interval, ParaccError, Result};

/// Node weighting used by the pairwise repulsion term `lambda * w_i * w_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightMode {
    Unit,
    Degree,
}

impl std::str::FromStr for WeightMode {
    type Err = ParaccError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit" => Ok(WeightMode::Unit),
            "degree" => Ok(WeightMode::Degree),
            other => Err(ParaccError::param("weights", format!("unknown mode `{other}`"))),
        }
    }
}

/// Packed storage for a symmetric matrix over unordered pairs `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairMatrix {
    n: usize,
    data: Vec<f64>,
}

impl PairMatrix {
    pub fn new(n: usize, fill: f64) -> Self {
        Self {
            n,
            data: vec![fill; n * n.saturating_sub(1) / 2],
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i != j && i < self.n && j < self.n);
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        i * (2 * self.n - i - 1) / 2 + (j - i - 1)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[self.index(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let idx = self.index(i, j);
        self.data[idx] = v;
    }

    /// Values in lexicographic pair order `(0,1), (0,2), ..., (n-2,n-1)`.
    pub fn values(&self) -> &[f64] {
        &self.data
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::new(n, 0.0);
        let mut idx = 0;
        for i in 0..n {
            for j in i + 1..n {
                m.data[idx] = f(i, j);
                idx += 1;
            }
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hyperedge {
    nodes: Vec<usize>,
    weight: f64,
}

impl Hyperedge {
    /// Sorted, deduplicated member nodes.
    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// A hypergraph whose hyperedge collection is a multiset.
///
/// Degrees count hyperedge memberships without weights. Node weights default
/// to 1 and can be switched to degrees with [`Hypergraph::with_weight_mode`].
#[derive(Debug, Clone, PartialEq)]
pub struct Hypergraph {
    n: usize,
    edges: Vec<Hyperedge>,
    degrees: Vec<usize>,
    node_weights: Vec<f64>,
}

impl Hypergraph {
    pub fn new(n: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        Self::with_edge_weights(n, edges.into_iter().map(|e| (e, 1.0)).collect())
    }

    pub fn with_edge_weights(n: usize, edges: Vec<(Vec<usize>, f64)>) -> Result<Self> {
        let mut out = Vec::with_capacity(edges.len());
        let mut degrees = vec![0usize; n];
        for (idx, (mut nodes, weight)) in edges.into_iter().enumerate() {
            if !(weight > 0.0) || !weight.is_finite() {
                return Err(ParaccError::InvalidGraph(format!(
                    "hyperedge {idx} has non-positive weight {weight}"
                )));
            }
            nodes.sort_unstable();
            nodes.dedup();
            if nodes.is_empty() {
                return Err(ParaccError::InvalidGraph(format!("hyperedge {idx} is empty")));
            }
            if let Some(&v) = nodes.iter().find(|&&v| v >= n) {
                return Err(ParaccError::InvalidGraph(format!(
                    "hyperedge {idx} references node {v} but n={n}"
                )));
            }
            for &v in &nodes {
                degrees[v] += 1;
            }
            out.push(Hyperedge { nodes, weight });
        }
        Ok(Self {
            n,
            edges: out,
            degrees,
            node_weights: vec![1.0; n],
        })
    }

    pub fn with_weight_mode(mut self, mode: WeightMode) -> Self {
        self.node_weights = self.weights_for(mode);
        self
    }

    pub fn with_node_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.n {
            return Err(ParaccError::InvalidGraph(format!(
                "{} node weights for {} nodes",
                weights.len(),
                self.n
            )));
        }
        for &w in &weights {
            check_nonnegative("node_weight", w)?;
        }
        self.node_weights = weights;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Hyperedge] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn node_weights(&self) -> &[f64] {
        &self.node_weights
    }

    pub fn weights_for(&self, mode: WeightMode) -> Vec<f64> {
        match mode {
            WeightMode::Unit => vec![1.0; self.n],
            WeightMode::Degree => self.degrees.iter().map(|&d| d as f64).collect(),
        }
    }

    /// `vol_H(S)`: sum of degrees over `nodes`.
    pub fn volume(&self, nodes: impl IntoIterator<Item = usize>) -> f64 {
        nodes.into_iter().map(|v| self.degrees[v] as f64).sum()
    }

    pub fn total_volume(&self) -> f64 {
        self.degrees.iter().map(|&d| d as f64).sum()
    }

    pub fn singleton_count(&self) -> usize {
        self.edges.iter().filter(|e| e.len() == 1).count()
    }

    pub fn max_edge_size(&self) -> usize {
        self.edges.iter().map(Hyperedge::len).max().unwrap_or(0)
    }
}

/// Undirected bipartite graph `G = (V1, V2, E)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    n1: usize,
    n2: usize,
    edges: Vec<(usize, usize)>,
}

impl BipartiteGraph {
    /// Edges are `(i, j)` with `i` in `0..n1` and `j` in `0..n2`; repeated
    /// pairs collapse to one edge.
    pub fn new(n1: usize, n2: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut edges: Vec<(usize, usize)> = edges.into_iter().collect();
        for &(i, j) in &edges {
            if i >= n1 || j >= n2 {
                return Err(ParaccError::InvalidGraph(format!(
                    "edge ({i}, {j}) out of range for sides {n1} x {n2}"
                )));
            }
        }
        edges.sort_unstable();
        edges.dedup();
        Ok(Self { n1, n2, edges })
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn n(&self) -> usize {
        self.n1 + self.n2
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// `A_ij`.
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.binary_search(&(i, j)).is_ok()
    }

    /// Right-side neighbours of each left node, in increasing order.
    pub fn left_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n1];
        for &(i, j) in &self.edges {
            adj[i].push(j);
        }
        adj
    }

    /// Edges in the combined id space (`V2` shifted by `n1`).
    pub fn combined_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().map(move |&(i, j)| (i, self.n1 + j))
    }

    /// The underlying unit-weight graph over `n1 + n2` nodes, with degree
    /// node weights.
    pub fn to_weighted_graph(&self, mode: WeightMode) -> WeightedGraph {
        let g = WeightedGraph::new(self.n(), self.combined_edges().map(|(a, b)| (a, b, 1.0)))
            .expect("bipartite edges are valid graph edges");
        match mode {
            WeightMode::Unit => g,
            WeightMode::Degree => {
                let d = g.weighted_degrees();
                g.with_node_weights(d).expect("degrees are nonnegative")
            }
        }
    }
}

/// Undirected weighted graph with node weights. Edges are canonical `i < j`,
/// sorted, with parallel edges merged by summing weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
    node_weights: Vec<f64>,
}

impl WeightedGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (i, j, w) in edges {
            if i == j {
                return Err(ParaccError::InvalidGraph(format!("self-loop at node {i}")));
            }
            if i >= n || j >= n {
                return Err(ParaccError::InvalidGraph(format!(
                    "edge ({i}, {j}) out of range for n={n}"
                )));
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(ParaccError::InvalidGraph(format!(
                    "edge ({i}, {j}) has non-positive weight {w}"
                )));
            }
            *merged.entry((i.min(j), i.max(j))).or_insert(0.0) += w;
        }
        Ok(Self {
            n,
            edges: merged.into_iter().map(|((i, j), w)| (i, j, w)).collect(),
            node_weights: vec![1.0; n],
        })
    }

    pub fn with_node_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.n {
            return Err(ParaccError::InvalidGraph(format!(
                "{} node weights for {} nodes",
                weights.len(),
                self.n
            )));
        }
        for &w in &weights {
            check_nonnegative("node_weight", w)?;
        }
        self.node_weights = weights;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn node_weights(&self) -> &[f64] {
        &self.node_weights
    }

    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(i, j, w) in &self.edges {
            adj[i].push((j, w));
            adj[j].push((i, w));
        }
        adj
    }

    pub fn weighted_degrees(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for &(i, j, w) in &self.edges {
            d[i] += w;
            d[j] += w;
        }
        d
    }

    pub fn total_edge_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.2).sum()
    }

    /// Multiply every edge weight by `factor`; node weights are unchanged.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0) || !factor.is_finite() {
            return Err(ParaccError::param("scale", format!("{factor} must be > 0")));
        }
        Ok(Self {
            n: self.n,
            edges: self.edges.iter().map(|&(i, j, w)| (i, j, w * factor)).collect(),
            node_weights: self.node_weights.clone(),
        })
    }
}

/// How negative (repulsive) weights are defined for a [`CcInstance`].
#[derive(Debug, Clone, PartialEq)]
pub enum NegativeRule {
    /// Explicit per-pair weights keyed by `(i, j)` with `i < j`.
    Explicit(BTreeMap<(usize, usize), f64>),
    /// `w⁻_ij = lambda * w_i * w_j` for every pair.
    Parametric { lambda: f64, node_weights: Vec<f64> },
    /// PBCC weights over the combined bipartite id space: `mu1` inside `V1`,
    /// `mu2` inside `V2`, `beta` on cross pairs that are not edges.
    Bipartite {
        n1: usize,
        mu1: f64,
        mu2: f64,
        beta: f64,
        edges: BTreeSet<(usize, usize)>,
    },
}

/// Complete signed graph `G = (V, W⁺, W⁻)` plus pairs pinned to distance one.
#[derive(Debug, Clone, PartialEq)]
pub struct CcInstance {
    n: usize,
    positive: Vec<(usize, usize, f64)>,
    negative: NegativeRule,
    fixed_one: BTreeSet<(usize, usize)>,
}

/// Dense packed `(w⁺, w⁻, pinned)` view of an instance.
#[derive(Debug, Clone)]
pub struct DenseWeights {
    pub positive: PairMatrix,
    pub negative: PairMatrix,
    pub fixed: Vec<bool>,
}

impl CcInstance {
    pub fn new(
        n: usize,
        positive: impl IntoIterator<Item = (usize, usize, f64)>,
        negative: NegativeRule,
        fixed_one: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (i, j, w) in positive {
            check_pair(n, i, j)?;
            check_nonnegative("positive_weight", w)?;
            if w > 0.0 {
                *merged.entry((i.min(j), i.max(j))).or_insert(0.0) += w;
            }
        }
        match &negative {
            NegativeRule::Explicit(map) => {
                for (&(i, j), &w) in map {
                    check_pair(n, i, j)?;
                    if i > j {
                        return Err(ParaccError::InvalidGraph(format!(
                            "negative pair ({i}, {j}) must be ordered i < j"
                        )));
                    }
                    check_nonnegative("negative_weight", w)?;
                }
            }
            NegativeRule::Parametric {
                lambda,
                node_weights,
            } => {
                check_nonnegative("lambda", *lambda)?;
                if node_weights.len() != n {
                    return Err(ParaccError::InvalidGraph(format!(
                        "{} node weights for {n} nodes",
                        node_weights.len()
                    )));
                }
                for &w in node_weights {
                    check_nonnegative("node_weight", w)?;
                }
            }
            NegativeRule::Bipartite {
                n1,
                mu1,
                mu2,
                beta,
                edges,
            } => {
                check_unit_interval("mu1", *mu1)?;
                check_unit_interval("mu2", *mu2)?;
                check_unit_interval("beta", *beta)?;
                if *n1 > n {
                    return Err(ParaccError::InvalidGraph(format!("n1={n1} exceeds n={n}")));
                }
                for &(i, j) in edges {
                    if !(i < *n1 && j >= *n1 && j < n) {
                        return Err(ParaccError::InvalidGraph(format!(
                            "({i}, {j}) is not a cross pair"
                        )));
                    }
                }
            }
        }
        let mut fixed = BTreeSet::new();
        for (i, j) in fixed_one {
            check_pair(n, i, j)?;
            fixed.insert((i.min(j), i.max(j)));
        }
        Ok(Self {
            n,
            positive: merged.into_iter().map(|((i, j), w)| (i, j, w)).collect(),
            negative,
            fixed_one: fixed,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Positive edges sorted lexicographically, `i < j`, weights > 0.
    pub fn positive_edges(&self) -> &[(usize, usize, f64)] {
        &self.positive
    }

    pub fn negative_rule(&self) -> &NegativeRule {
        &self.negative
    }

    pub fn fixed_pairs(&self) -> &BTreeSet<(usize, usize)> {
        &self.fixed_one
    }

    pub fn is_fixed(&self, i: usize, j: usize) -> bool {
        self.fixed_one.contains(&(i.min(j), i.max(j)))
    }

    pub fn positive_weight(&self, i: usize, j: usize) -> f64 {
        let key = (i.min(j), i.max(j));
        match self.positive.binary_search_by(|&(a, b, _)| (a, b).cmp(&key)) {
            Ok(idx) => self.positive[idx].2,
            Err(_) => 0.0,
        }
    }

    pub fn negative_weight(&self, i: usize, j: usize) -> f64 {
        let (i, j) = (i.min(j), i.max(j));
        match &self.negative {
            NegativeRule::Explicit(map) => map.get(&(i, j)).copied().unwrap_or(0.0),
            NegativeRule::Parametric {
                lambda,
                node_weights,
            } => lambda * node_weights[i] * node_weights[j],
            NegativeRule::Bipartite {
                n1,
                mu1,
                mu2,
                beta,
                edges,
            } => {
                if j < *n1 {
                    *mu1
                } else if i >= *n1 {
                    *mu2
                } else if edges.contains(&(i, j)) {
                    0.0
                } else {
                    *beta
                }
            }
        }
    }

    pub fn dense(&self) -> DenseWeights {
        let n = self.n;
        let mut positive = PairMatrix::new(n, 0.0);
        for &(i, j, w) in &self.positive {
            positive.set(i, j, w);
        }
        let negative = match &self.negative {
            NegativeRule::Explicit(map) => {
                let mut m = PairMatrix::new(n, 0.0);
                for (&(i, j), &w) in map {
                    m.set(i, j, w);
                }
                m
            }
            _ => PairMatrix::from_fn(n, |i, j| self.negative_weight(i, j)),
        };
        let mut fixed = vec![false; positive.values().len()];
        for &(i, j) in &self.fixed_one {
            fixed[positive.index(i, j)] = true;
        }
        DenseWeights {
            positive,
            negative,
            fixed,
        }
    }

    /// `Σ w⁺` over all pairs (cost of the all-singletons clustering).
    pub fn total_positive(&self) -> f64 {
        cc_objective(self, &Clustering::singletons(self.n))
    }

    /// `Σ w⁻` over all pairs (cost of the one-cluster clustering, ignoring pins).
    pub fn total_negative(&self) -> f64 {
        negative_part(self, &Clustering::single(self.n))
    }

    pub fn max_weight(&self) -> f64 {
        let dense = self.dense();
        dense
            .positive
            .values()
            .iter()
            .chain(dense.negative.values())
            .fold(0.0, |m, &w| m.max(w))
    }
}

fn check_pair(n: usize, i: usize, j: usize) -> Result<()> {
    if i == j {
        return Err(ParaccError::InvalidGraph(format!("pair ({i}, {j}) is a self pair")));
    }
    if i >= n || j >= n {
        return Err(ParaccError::InvalidGraph(format!(
            "pair ({i}, {j}) out of range for n={n}"
        )));
    }
    Ok(())
}

/// A total assignment of nodes to clusters with ids canonicalized to
/// `0..k` in order of first appearance.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clustering {
    assignment: Vec<usize>,
    k: usize,
}

impl Clustering {
    pub fn new(labels: impl IntoIterator<Item = usize>) -> Self {
        let mut remap: HashMap<usize, usize> = HashMap::new();
        let assignment: Vec<usize> = labels
            .into_iter()
            .map(|l| {
                let next = remap.len();
                *remap.entry(l).or_insert(next)
            })
            .collect();
        Self {
            k: remap.len(),
            assignment,
        }
    }

    pub fn singletons(n: usize) -> Self {
        Self {
            assignment: (0..n).collect(),
            k: n,
        }
    }

    pub fn single(n: usize) -> Self {
        Self {
            assignment: vec![0; n],
            k: usize::from(n > 0),
        }
    }

    /// Build from explicit blocks; every node in `0..n` must appear exactly once.
    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut labels = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            for &v in block {
                if v >= n {
                    return Err(ParaccError::InvalidGraph(format!("node {v} out of range")));
                }
                if labels[v] != usize::MAX {
                    return Err(ParaccError::InvalidGraph(format!("node {v} in two blocks")));
                }
                labels[v] = b;
            }
        }
        if let Some(v) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(ParaccError::InvalidGraph(format!("node {v} is unassigned")));
        }
        Ok(Self::new(labels))
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn num_clusters(&self) -> usize {
        self.k
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    #[inline]
    pub fn cluster_of(&self, v: usize) -> usize {
        self.assignment[v]
    }

    /// `z_ij`: whether `i` and `j` are in different clusters.
    #[inline]
    pub fn separated(&self, i: usize, j: usize) -> bool {
        self.assignment[i] != self.assignment[j]
    }

    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (v, &c) in self.assignment.iter().enumerate() {
            out[c].push(v);
        }
        out
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut out = vec![0; self.k];
        for &c in &self.assignment {
            out[c] += 1;
        }
        out
    }

    /// Restriction to the first `n` nodes, recanonicalized.
    pub fn restrict(&self, n: usize) -> Self {
        Self::new(self.assignment[..n].iter().copied())
    }
}

/// PBCC as a complete signed graph over the combined id space.
///
/// Cross edges get `w⁺ = 1 - beta`, cross non-edges `w⁻ = beta`, pairs inside
/// `V1` get `w⁻ = mu1` and pairs inside `V2` get `w⁻ = mu2`.
pub fn build_cc_from_pbcc(g: &BipartiteGraph, mu1: f64, mu2: f64, beta: f64) -> Result<CcInstance> {
    check_unit_interval("mu1", mu1)?;
    check_unit_interval("mu2", mu2)?;
    check_unit_interval("beta", beta)?;
    let pos = 1.0 - beta;
    CcInstance::new(
        g.n(),
        g.combined_edges().map(|(i, j)| (i, j, pos)),
        NegativeRule::Bipartite {
            n1: g.n1(),
            mu1,
            mu2,
            beta,
            edges: g.combined_edges().collect(),
        },
        std::iter::empty(),
    )
}

/// Bicluster deletion as weighted CC: unit positive weight on edges, zero
/// weight elsewhere, and every cross non-edge pinned to distance one.
pub fn build_bicluster_deletion(g: &BipartiteGraph) -> CcInstance {
    let n1 = g.n1();
    let mut pinned = Vec::new();
    for i in 0..n1 {
        for j in 0..g.n2() {
            if !g.has_edge(i, j) {
                pinned.push((i, n1 + j));
            }
        }
    }
    CcInstance::new(
        g.n(),
        g.combined_edges().map(|(i, j)| (i, j, 1.0)),
        NegativeRule::Explicit(BTreeMap::new()),
        pinned,
    )
    .expect("bipartite graph yields a valid instance")
}

/// Weighted CC from an expanded graph: positive edges are `g`'s edges and
/// every pair gets `w⁻ = lambda * w_i * w_j` using `g`'s node weights.
pub fn build_cc_from_expansion(g: &WeightedGraph, lambda: f64) -> Result<CcInstance> {
    check_nonnegative("lambda", lambda)?;
    CcInstance::new(
        g.n(),
        g.edges().iter().copied(),
        NegativeRule::Parametric {
            lambda,
            node_weights: g.node_weights().to_vec(),
        },
        std::iter::empty(),
    )
}

/// Correlation clustering disagreement cost `Σ w⁺ z_ij + w⁻ (1 - z_ij)`.
///
/// Positive terms are accumulated in lexicographic pair order. Negative terms
/// follow the rule: explicit weights in lexicographic pair order, rule-based
/// weights per cluster in cluster-id order. A clustering that puts a pinned
/// pair together is infeasible and costs `+inf`.
pub fn cc_objective(inst: &CcInstance, c: &Clustering) -> f64 {
    assert_eq!(c.len(), inst.n(), "clustering must cover every node");
    if inst.fixed_one.iter().any(|&(i, j)| !c.separated(i, j)) {
        return f64::INFINITY;
    }
    let mut pos = 0.0;
    for &(i, j, w) in &inst.positive {
        if c.separated(i, j) {
            pos += w;
        }
    }
    pos + negative_part(inst, c)
}

fn negative_part(inst: &CcInstance, c: &Clustering) -> f64 {
    match &inst.negative {
        NegativeRule::Explicit(map) => map
            .iter()
            .filter(|(&(i, j), _)| !c.separated(i, j))
            .map(|(_, &w)| w)
            .sum(),
        NegativeRule::Parametric {
            lambda,
            node_weights,
        } => {
            let k = c.num_clusters();
            let mut sum = vec![0.0; k];
            let mut sq = vec![0.0; k];
            for (v, &w) in node_weights.iter().enumerate() {
                let s = c.cluster_of(v);
                sum[s] += w;
                sq[s] += w * w;
            }
            let mut total = 0.0;
            for s in 0..k {
                total += 0.5 * lambda * (sum[s] * sum[s] - sq[s]);
            }
            total
        }
        NegativeRule::Bipartite {
            n1,
            mu1,
            mu2,
            beta,
            edges,
        } => {
            let k = c.num_clusters();
            let mut left = vec![0u64; k];
            let mut right = vec![0u64; k];
            let mut inner_edges = vec![0u64; k];
            for v in 0..inst.n {
                if v < *n1 {
                    left[c.cluster_of(v)] += 1;
                } else {
                    right[c.cluster_of(v)] += 1;
                }
            }
            for &(i, j) in edges {
                if !c.separated(i, j) {
                    inner_edges[c.cluster_of(i)] += 1;
                }
            }
            let mut total = 0.0;
            for s in 0..k {
                let (a, b) = (left[s], right[s]);
                total += mu1 * (a * a.saturating_sub(1) / 2) as f64
                    + mu2 * (b * b.saturating_sub(1) / 2) as f64
                    + beta * (a * b - inner_edges[s]) as f64;
            }
            total
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> BipartiteGraph {
        // a1 - b1 - a2 as V1 = {a1, a2}, V2 = {b1}
        BipartiteGraph::new(2, 1, [(0, 0), (1, 0)]).unwrap()
    }

    #[test]
    fn pbcc_weight_rule() {
        let g = BipartiteGraph::new(2, 2, [(0, 0)]).unwrap();
        let inst = build_cc_from_pbcc(&g, 0.0, 0.0, 0.5).unwrap();
        assert_eq!(inst.positive_weight(0, 2), 0.5);
        assert_eq!(inst.negative_weight(0, 2), 0.0);
        assert_eq!(inst.negative_weight(0, 3), 0.5);
        assert_eq!(inst.negative_weight(1, 2), 0.5);
        assert_eq!(inst.negative_weight(0, 1), 0.0);
        assert_eq!(inst.negative_weight(2, 3), 0.0);
    }

    #[test]
    fn pbcc_rejects_out_of_range_parameters() {
        let g = path3();
        assert!(build_cc_from_pbcc(&g, -0.1, 0.0, 0.5).is_err());
        assert!(build_cc_from_pbcc(&g, 0.0, 1.5, 0.5).is_err());
        assert!(build_cc_from_pbcc(&g, 0.0, 0.0, 1.01).is_err());
    }

    #[test]
    fn pbcc_equal_parameters_is_lambdacc_on_bipartite() {
        let g = BipartiteGraph::new(2, 3, [(0, 0), (0, 2), (1, 1)]).unwrap();
        let lam = 0.3;
        let inst = build_cc_from_pbcc(&g, lam, lam, lam).unwrap();
        let n = g.n();
        for i in 0..n {
            for j in i + 1..n {
                let edge = i < 2 && j >= 2 && g.has_edge(i, j - 2);
                if edge {
                    assert_eq!(inst.positive_weight(i, j), 1.0 - lam);
                    assert_eq!(inst.negative_weight(i, j), 0.0);
                } else {
                    assert_eq!(inst.positive_weight(i, j), 0.0);
                    assert_eq!(inst.negative_weight(i, j), lam);
                }
            }
        }
    }

    #[test]
    fn beta_one_has_no_positive_weight() {
        let g = path3();
        let inst = build_cc_from_pbcc(&g, 0.0, 0.0, 1.0).unwrap();
        assert!(inst.positive_edges().is_empty());
        // {a1}, {a2}, {b1}: no negative pair merged.
        assert_eq!(cc_objective(&inst, &Clustering::singletons(3)), 0.0);
        // a1 and a2 may share a cluster since mu1 = 0.
        assert_eq!(cc_objective(&inst, &Clustering::new([0, 0, 1])), 0.0);
    }

    #[test]
    fn expansion_weights() {
        let g = WeightedGraph::new(2, [(0, 1, 1.0)])
            .unwrap()
            .with_node_weights(vec![2.0, 3.0])
            .unwrap();
        let inst = build_cc_from_expansion(&g, 0.1).unwrap();
        assert!((inst.negative_weight(0, 1) - 0.6).abs() < 1e-15);
        let zero = build_cc_from_expansion(&g, 0.0).unwrap();
        assert_eq!(zero.total_negative(), 0.0);
        assert_eq!(cc_objective(&zero, &Clustering::single(2)), 0.0);
    }

    #[test]
    fn objective_extremes() {
        let g = BipartiteGraph::new(3, 2, [(0, 0), (1, 0), (2, 1)]).unwrap();
        let inst = build_cc_from_pbcc(&g, 0.2, 0.1, 0.4).unwrap();
        let singles = cc_objective(&inst, &Clustering::singletons(5));
        assert_eq!(singles, inst.total_positive());
        assert!((singles - 3.0 * 0.6).abs() < 1e-12);
        let one = cc_objective(&inst, &Clustering::single(5));
        assert_eq!(one, inst.total_negative());
        // 3 cross non-edges * 0.4 + 3 V1 pairs * 0.2 + 1 V2 pair * 0.1
        assert!((one - (1.2 + 0.6 + 0.1)).abs() < 1e-12);
    }

    #[test]
    fn path_objective_matches_enumeration() {
        let g = path3();
        let inst = build_cc_from_pbcc(&g, 0.0, 0.0, 0.5).unwrap();
        // nodes: a1=0, a2=1, b1=2; {a1,b1},{a2}
        let c = Clustering::new([0, 1, 0]);
        assert_eq!(cc_objective(&inst, &c), 0.5);
        // All five partitions of three nodes. Keeping everything together
        // costs nothing: both cross pairs are edges and mu = 0.
        let parts = [
            vec![0, 0, 0],
            vec![0, 0, 1],
            vec![0, 1, 0],
            vec![0, 1, 1],
            vec![0, 1, 2],
        ];
        let costs: Vec<f64> = parts
            .iter()
            .map(|p| cc_objective(&inst, &Clustering::new(p.iter().copied())))
            .collect();
        assert_eq!(costs, vec![0.0, 1.0, 0.5, 0.5, 1.0]);
    }

    #[test]
    fn pinned_pairs_make_merges_infeasible() {
        let g = BipartiteGraph::new(1, 2, [(0, 0)]).unwrap();
        let inst = build_bicluster_deletion(&g);
        assert!(inst.is_fixed(0, 2));
        assert_eq!(cc_objective(&inst, &Clustering::single(3)), f64::INFINITY);
        assert_eq!(cc_objective(&inst, &Clustering::new([0, 0, 1])), 0.0);
    }

    #[test]
    fn clustering_canonicalizes_labels() {
        let c = Clustering::new([7, 3, 7, 9]);
        assert_eq!(c.assignment(), &[0, 1, 0, 2]);
        assert_eq!(c.num_clusters(), 3);
        assert_eq!(c.clusters(), vec![vec![0, 2], vec![1], vec![3]]);
        assert!(Clustering::from_blocks(3, &[vec![0, 1]]).is_err());
        assert!(Clustering::from_blocks(2, &[vec![0], vec![0, 1]]).is_err());
    }

    #[test]
    fn hypergraph_degrees_and_validation() {
        let h = Hypergraph::new(4, vec![vec![0, 1, 2], vec![2, 1], vec![3]]).unwrap();
        assert_eq!(h.degrees(), &[1, 2, 2, 1]);
        assert_eq!(h.edges()[1].nodes(), &[1, 2]);
        assert_eq!(h.total_volume(), 6.0);
        assert_eq!(h.singleton_count(), 1);
        assert!(Hypergraph::new(2, vec![vec![0, 2]]).is_err());
        assert!(Hypergraph::new(2, vec![vec![]]).is_err());
        assert!(Hypergraph::with_edge_weights(2, vec![(vec![0, 1], 0.0)]).is_err());
    }

    #[test]
    fn weighted_graph_merges_parallel_edges() {
        let g = WeightedGraph::new(3, [(1, 0, 1.0), (0, 1, 0.5), (1, 2, 2.0)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1, 1.5), (1, 2, 2.0)]);
        assert!(WeightedGraph::new(2, [(0, 0, 1.0)]).is_err());
    }

    #[test]
    fn pair_matrix_indexing() {
        let m = PairMatrix::from_fn(5, |i, j| (10 * i + j) as f64);
        for i in 0..5 {
            for j in 0..5 {
                if i != j {
                    assert_eq!(m.get(i, j), (10 * i.min(j) + i.max(j)) as f64);
                }
            }
        }
    }
}
