//! Clustering metrics, planted-partition generators and the sweep CSV schema.

use std::collections::HashMap;
use std::io::Write;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{check_unit_interval, ParaccError, Result};
use crate::graph::{BipartiteGraph, Clustering, Hypergraph};

fn choose2(k: u64) -> f64 {
    (k * k.saturating_sub(1) / 2) as f64
}

/// Adjusted Rand index from the pair-counting contingency table. When the
/// expected and maximum index coincide (e.g. both clusterings are a single
/// cluster, or both are all singletons) the clusterings are identical and the
/// value is 1.
pub fn ari(a: &Clustering, b: &Clustering) -> Result<f64> {
    if a.len() != b.len() {
        return Err(ParaccError::InvalidGraph(format!(
            "clusterings cover {} and {} nodes",
            a.len(),
            b.len()
        )));
    }
    let mut table: HashMap<(usize, usize), u64> = HashMap::new();
    let mut rows = vec![0u64; a.num_clusters()];
    let mut cols = vec![0u64; b.num_clusters()];
    for v in 0..a.len() {
        let (x, y) = (a.cluster_of(v), b.cluster_of(v));
        *table.entry((x, y)).or_insert(0) += 1;
        rows[x] += 1;
        cols[y] += 1;
    }
    let index: f64 = table.values().map(|&c| choose2(c)).sum();
    let sa: f64 = rows.iter().map(|&c| choose2(c)).sum();
    let sb: f64 = cols.iter().map(|&c| choose2(c)).sum();
    let total = choose2(a.len() as u64);
    if total == 0.0 {
        return Ok(1.0);
    }
    let expected = sa * sb / total;
    let max = 0.5 * (sa + sb);
    if max == expected {
        return Ok(1.0);
    }
    Ok((index - expected) / (max - expected))
}

/// Best F1 score `2|S ∩ T| / (|S| + |T|)` over clusters `S`.
pub fn best_f1_tracking(c: &Clustering, target: &[usize]) -> Result<f64> {
    let mut inside = vec![false; c.len()];
    for &v in target {
        if v >= c.len() {
            return Err(ParaccError::InvalidGraph(format!("target node {v} out of range")));
        }
        inside[v] = true;
    }
    let t = inside.iter().filter(|&&b| b).count();
    if t == 0 {
        return Err(ParaccError::param("target", "target set is empty"));
    }
    let mut overlap = vec![0usize; c.num_clusters()];
    for v in 0..c.len() {
        if inside[v] {
            overlap[c.cluster_of(v)] += 1;
        }
    }
    let sizes = c.sizes();
    Ok((0..c.num_clusters())
        .map(|s| 2.0 * overlap[s] as f64 / (sizes[s] + t) as f64)
        .fold(0.0, f64::max))
}

/// Planted bipartite blocks. Block `b` has `sizes[b].0` left and
/// `sizes[b].1` right nodes; left nodes are numbered block by block, as are
/// right nodes. Cross pairs get an edge with probability `p_in` inside a
/// block and `p_out` across blocks. The truth is over the combined id space.
pub fn synth_planted_bipartite(
    sizes: &[(usize, usize)],
    p_in: f64,
    p_out: f64,
    seed: u64,
) -> Result<(BipartiteGraph, Clustering)> {
    check_unit_interval("p_in", p_in)?;
    check_unit_interval("p_out", p_out)?;
    let left: Vec<usize> = sizes.iter().enumerate().flat_map(|(b, s)| std::iter::repeat_n(b, s.0)).collect();
    let right: Vec<usize> = sizes.iter().enumerate().flat_map(|(b, s)| std::iter::repeat_n(b, s.1)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for (i, &bi) in left.iter().enumerate() {
        for (j, &bj) in right.iter().enumerate() {
            let p = if bi == bj { p_in } else { p_out };
            if rng.random_bool(p) {
                edges.push((i, j));
            }
        }
    }
    let g = BipartiteGraph::new(left.len(), right.len(), edges)?;
    let truth = Clustering::new(left.iter().chain(&right).copied());
    Ok((g, truth))
}

#[derive(Debug, Clone, Serialize)]
pub struct PlantedHypergraphConfig {
    pub sizes: Vec<usize>,
    pub edges_per_block: usize,
    /// Hyperedge sizes are uniform on `min_edge..=max_edge`, capped by the
    /// block size for within-block edges.
    pub min_edge: usize,
    pub max_edge: usize,
    /// Fraction of hyperedges whose members are drawn from all nodes.
    pub noise_frac: f64,
    pub seed: u64,
}

/// Planted hypergraph: each block emits `edges_per_block` hyperedges, each
/// drawn inside the block or, with probability `noise_frac`, across all nodes.
pub fn synth_planted_hypergraph(cfg: &PlantedHypergraphConfig) -> Result<(Hypergraph, Clustering)> {
    check_unit_interval("noise_frac", cfg.noise_frac)?;
    if cfg.min_edge < 1 || cfg.min_edge > cfg.max_edge {
        return Err(ParaccError::param("edge_size", "need 1 <= min <= max"));
    }
    let n: usize = cfg.sizes.iter().sum();
    if n == 0 {
        return Err(ParaccError::param("sizes", "no nodes"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut edges = Vec::new();
    let mut start = 0;
    for &size in &cfg.sizes {
        for _ in 0..cfg.edges_per_block {
            let k = rng.random_range(cfg.min_edge..=cfg.max_edge);
            if rng.random_bool(cfg.noise_frac) {
                edges.push(sample(&mut rng, n, k.min(n)).into_vec());
            } else if size > 0 {
                let members = sample(&mut rng, size, k.min(size)).into_iter().map(|v| start + v).collect();
                edges.push(members);
            }
        }
        start += size;
    }
    let truth = Clustering::new(cfg.sizes.iter().enumerate().flat_map(|(b, &s)| std::iter::repeat_n(b, s)));
    Ok((Hypergraph::new(n, edges)?, truth))
}

/// Column order of experiment CSVs.
pub const CSV_COLUMNS: [&str; 12] = [
    "param_set", "mu1", "mu2", "beta", "lambda", "delta", "seed", "objective", "lp_bound", "ratio", "ari", "time_ms",
];

/// One experiment row. Absent values are written as empty fields.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SweepRecord {
    pub param_set: String,
    pub mu1: Option<f64>,
    pub mu2: Option<f64>,
    pub beta: Option<f64>,
    pub lambda: Option<f64>,
    pub delta: Option<f64>,
    pub seed: u64,
    pub objective: f64,
    pub lp_bound: Option<f64>,
    pub ratio: Option<f64>,
    pub ari: Option<f64>,
    pub time_ms: Option<f64>,
}

impl SweepRecord {
    /// Set `lp_bound` and derive `ratio = objective / lp_bound` when the bound
    /// is positive.
    pub fn with_bound(mut self, bound: Option<f64>) -> Self {
        self.lp_bound = bound;
        self.ratio = bound.filter(|&b| b > 0.0).map(|b| self.objective / b);
        self
    }

    fn fields(&self) -> [String; 12] {
        let opt = |v: Option<f64>| v.map(format_g9).unwrap_or_default();
        [
            self.param_set.clone(),
            opt(self.mu1),
            opt(self.mu2),
            opt(self.beta),
            opt(self.lambda),
            opt(self.delta),
            self.seed.to_string(),
            format_g9(self.objective),
            opt(self.lp_bound),
            opt(self.ratio),
            opt(self.ari),
            opt(self.time_ms),
        ]
    }
}

/// CSV writer for [`SweepRecord`]s; the header is written on creation.
pub struct RecordWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> RecordWriter<W> {
    pub fn new(w: W) -> Result<Self> {
        let mut inner = csv::Writer::from_writer(w);
        inner.write_record(CSV_COLUMNS)?;
        Ok(Self { inner })
    }

    pub fn write(&mut self, r: &SweepRecord) -> Result<()> {
        self.inner.write_record(r.fields())?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<W> {
        self.inner.flush()?;
        self.inner
            .into_inner()
            .map_err(|e| ParaccError::Io(std::io::Error::other(e.to_string())))
    }
}

/// `%.9g`-style formatting: 9 significant digits, trailing zeros removed,
/// exponent form outside `1e-4 <= |v| < 1e9`.
pub fn format_g9(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        let m = trim_zeros(mantissa.to_string());
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ari_values() {
        let a = Clustering::new([0, 0, 1, 1]);
        let b = Clustering::new([0, 1, 0, 1]);
        assert!((ari(&a, &b).unwrap() + 0.5).abs() < 1e-15);
        assert_eq!(ari(&a, &a).unwrap(), 1.0);
        assert_eq!(ari(&Clustering::single(5), &Clustering::single(5)).unwrap(), 1.0);
        assert_eq!(ari(&Clustering::singletons(5), &Clustering::single(5)).unwrap(), 0.0);
        let relabeled = Clustering::new([5, 5, 2, 2]);
        assert_eq!(ari(&relabeled, &b).unwrap(), ari(&a, &b).unwrap());
        assert!(ari(&a, &Clustering::single(3)).is_err());
    }

    #[test]
    fn f1_values() {
        let c = Clustering::new([0, 0, 1, 1, 2]);
        assert_eq!(best_f1_tracking(&c, &[2, 3]).unwrap(), 1.0);
        let t = 3.0;
        let s = best_f1_tracking(&Clustering::singletons(6), &[0, 1, 2]).unwrap();
        assert!((s - 2.0 / (1.0 + t)).abs() < 1e-15);
        let one = best_f1_tracking(&Clustering::single(6), &[0, 1, 2]).unwrap();
        assert!((one - 2.0 * t / (6.0 + t)).abs() < 1e-15);
        assert!(best_f1_tracking(&c, &[]).is_err());
    }

    #[test]
    fn planted_bipartite_counts() {
        let (g, truth) = synth_planted_bipartite(&[(3, 3), (2, 2)], 1.0, 0.0, 1).unwrap();
        assert_eq!(g.n(), 10);
        assert_eq!(g.num_edges(), 13);
        assert_eq!(truth.num_clusters(), 2);
        assert_eq!(truth.cluster_of(3), 1);
        assert_eq!(truth.cluster_of(5), 0);
        let (a, _) = synth_planted_bipartite(&[(4, 4), (4, 4)], 0.7, 0.2, 9).unwrap();
        let (b, _) = synth_planted_bipartite(&[(4, 4), (4, 4)], 0.7, 0.2, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn planted_hypergraph_noise_free() {
        let cfg = PlantedHypergraphConfig {
            sizes: vec![5, 4, 6],
            edges_per_block: 10,
            min_edge: 2,
            max_edge: 4,
            noise_frac: 0.0,
            seed: 2,
        };
        let (h, truth) = synth_planted_hypergraph(&cfg).unwrap();
        assert_eq!(h.num_edges(), 30);
        for e in h.edges() {
            let b = truth.cluster_of(e.nodes()[0]);
            assert!(e.nodes().iter().all(|&v| truth.cluster_of(v) == b));
        }
    }

    #[test]
    fn g9_formatting() {
        assert_eq!(format_g9(0.0), "0");
        assert_eq!(format_g9(0.5), "0.5");
        assert_eq!(format_g9(1.0 / 3.0), "0.333333333");
        assert_eq!(format_g9(14.0 / 3.0), "4.66666667");
        assert_eq!(format_g9(123456789.0), "123456789");
        assert_eq!(format_g9(1234567890.0), "1.23456789e+09");
        assert_eq!(format_g9(0.00001234), "1.234e-05");
        assert_eq!(format_g9(-2.5), "-2.5");
        assert_eq!(format_g9(0.05 * 3.0), "0.15");
    }

    #[test]
    fn record_csv() {
        let mut w = RecordWriter::new(Vec::new()).unwrap();
        let r = SweepRecord {
            param_set: "a".into(),
            beta: Some(0.5),
            seed: 3,
            objective: 3.0,
            ..SweepRecord::default()
        }
        .with_bound(Some(2.0));
        w.write(&r).unwrap();
        let text = String::from_utf8(w.finish().unwrap()).unwrap();
        assert_eq!(
            text,
            "param_set,mu1,mu2,beta,lambda,delta,seed,objective,lp_bound,ratio,ari,time_ms\na,,,0.5,,,3,3,2,1.5,,\n"
        );
    }
}
