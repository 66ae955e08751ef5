//! Pivot, threshold rounding of LP distances, delta sweeps, the runtime
//! checker for the bad-triangle approximation conditions, the per-case bound
//! verifier, and the PBCC rounding driver.

use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_unit_interval, ParaccError, Result};
use crate::exact::{hopcroft_karp, matching_clustering};
use crate::graph::{build_bicluster_deletion, build_cc_from_pbcc, cc_objective, BipartiteGraph, CcInstance, Clustering, PairMatrix};
use crate::lp::{max_triangle_violation, solve_metric_lp, FractionalSolution, LpOptions, LpProblem, LpSummary};
use crate::objectives::pbcc_objective;

/// Complete unweighted signed graph: every pair is `+` or `-`.
#[derive(Debug, Clone)]
pub struct SignedGraph {
    plus: PairMatrix,
}

impl SignedGraph {
    pub fn from_positive_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut plus = PairMatrix::new(n, 0.0);
        for (i, j) in pairs {
            plus.set(i, j, 1.0);
        }
        Self { plus }
    }

    /// `+` exactly where `x_ij < delta`.
    pub fn threshold(x: &PairMatrix, delta: f64) -> Self {
        Self {
            plus: PairMatrix::from_fn(x.n(), |i, j| if x.get(i, j) < delta { 1.0 } else { 0.0 }),
        }
    }

    pub fn n(&self) -> usize {
        self.plus.n()
    }

    #[inline]
    pub fn is_positive(&self, i: usize, j: usize) -> bool {
        self.plus.get(i, j) != 0.0
    }
}

/// Uniformly random node order derived from `seed`.
pub fn pivot_order(n: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    order
}

/// Pivot with nodes tried in `order`: the first unclustered node becomes a
/// pivot and takes every unclustered `+` neighbour. Taking the first remaining
/// node of a uniform permutation is the same as picking a uniform pivot among
/// the remaining nodes.
pub fn pivot_in_order(g: &SignedGraph, order: &[usize]) -> Clustering {
    let n = g.n();
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    for &k in order {
        if label[k] != usize::MAX {
            continue;
        }
        label[k] = next;
        for v in 0..n {
            if label[v] == usize::MAX && g.is_positive(k, v) {
                label[v] = next;
            }
        }
        next += 1;
    }
    Clustering::new(label)
}

pub fn pivot(g: &SignedGraph, seed: u64) -> Clustering {
    pivot_in_order(g, &pivot_order(g.n(), seed))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct RoundingParams {
    pub delta: f64,
    pub alpha_claimed: Option<f64>,
    pub seed: u64,
}

impl RoundingParams {
    pub fn new(delta: f64, seed: u64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(ParaccError::param("delta", format!("{delta} is outside (0, 1)")));
        }
        Ok(Self {
            delta,
            alpha_claimed: None,
            seed,
        })
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha_claimed = Some(alpha);
        self
    }
}

/// Threshold `x` strictly at `delta` and pivot.
pub fn gen_round(x: &PairMatrix, params: &RoundingParams) -> Clustering {
    pivot(&SignedGraph::threshold(x, params.delta), params.seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepCell {
    pub delta: f64,
    pub seed: u64,
    pub objective: f64,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub best: Clustering,
    pub best_cell: SweepCell,
    /// One row per `(delta, seed)` in grid order (delta-major).
    pub table: Vec<SweepCell>,
}

impl SweepOutcome {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["delta", "seed", "objective"])?;
        for cell in &self.table {
            out.write_record([
                crate::eval::format_g9(cell.delta),
                cell.seed.to_string(),
                crate::eval::format_g9(cell.objective),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Round at every `(delta, seed)` and keep the cheapest clustering. Ties go to
/// the smaller delta, then the smaller seed.
pub fn delta_sweep(inst: &CcInstance, x: &PairMatrix, grid: &[f64], seeds: &[u64]) -> Result<SweepOutcome> {
    if grid.is_empty() || seeds.is_empty() {
        return Err(ParaccError::param("grid", "delta grid and seed list must be nonempty"));
    }
    let cells: Vec<(f64, u64)> = grid.iter().flat_map(|&d| seeds.iter().map(move |&s| (d, s))).collect();
    let results: Vec<(SweepCell, Clustering)> = cells
        .par_iter()
        .map(|&(delta, seed)| {
            let params = RoundingParams::new(delta, seed)?;
            let c = gen_round(x, &params);
            let objective = cc_objective(inst, &c);
            Ok((SweepCell { delta, seed, objective }, c))
        })
        .collect::<Result<_>>()?;
    let mut best_idx = 0;
    for (idx, (cell, _)) in results.iter().enumerate() {
        let b = &results[best_idx].0;
        let better = cell.objective < b.objective
            || (cell.objective == b.objective
                && (cell.delta < b.delta || (cell.delta == b.delta && cell.seed < b.seed)));
        if better {
            best_idx = idx;
        }
    }
    let best_cell = results[best_idx].0;
    let best = results[best_idx].1.clone();
    Ok(SweepOutcome {
        best,
        best_cell,
        table: results.into_iter().map(|r| r.0).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairWitness {
    pub i: usize,
    pub j: usize,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TriangleWitness {
    /// `(i, j)` and `(j, k)` are `+` after thresholding, `(i, k)` is `-`.
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ApproximationReport {
    pub passed: bool,
    pub delta: f64,
    pub alpha: f64,
    pub tolerance: f64,
    pub pairs_checked: usize,
    pub bad_triangles: usize,
    pub pair_failures: usize,
    pub triangle_failures: usize,
    /// Largest `lhs / rhs` over the pair condition.
    pub worst_pair: Option<PairWitness>,
    /// Largest `lhs / rhs` over bad triangles.
    pub worst_triangle: Option<TriangleWitness>,
}

fn ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs <= 0.0 {
        0.0
    } else if rhs <= 0.0 {
        f64::INFINITY
    } else {
        lhs / rhs
    }
}

/// Check the two sufficient conditions for `alpha`-approximate threshold
/// rounding at `delta`, with `c_ij = w⁺ x + w⁻ (1 - x)`:
///
/// 1. `w⁻_ij <= alpha c_ij` on `+` pairs and `w⁺_ij <= alpha c_ij` on `-` pairs;
/// 2. `w⁺_ij + w⁺_jk + w⁻_ik <= alpha (c_ij + c_jk + c_ik)` on every bad triangle.
///
/// Pinned pairs carry unbounded negative weight: one on the `+` side or as
/// the negative side of a bad triangle is a failure. Comparisons allow
/// `1e-9 + 2 alpha w_max v`, where `v` is the triangle violation of `x`.
pub fn approximation_check(inst: &CcInstance, x: &PairMatrix, delta: f64, alpha: f64) -> ApproximationReport {
    let n = inst.n();
    let d = inst.dense();
    let wp = d.positive.values();
    let wn = d.negative.values();
    let xs = x.values();
    let violation = max_triangle_violation(x);
    let w_max = wp.iter().chain(wn).fold(0.0f64, |m, &w| m.max(w));
    let tol = 1e-9 + 2.0 * alpha * w_max * violation;
    let cost: Vec<f64> = (0..xs.len())
        .map(|p| {
            if d.fixed[p] {
                wp[p]
            } else {
                wp[p] * xs[p] + wn[p] * (1.0 - xs[p])
            }
        })
        .collect();
    let plus: Vec<bool> = xs.iter().map(|&v| v < delta).collect();

    let mut report = ApproximationReport {
        passed: true,
        delta,
        alpha,
        tolerance: tol,
        pairs_checked: 0,
        bad_triangles: 0,
        pair_failures: 0,
        triangle_failures: 0,
        worst_pair: None,
        worst_triangle: None,
    };
    let mut worst_pair = -1.0;
    for i in 0..n {
        for j in i + 1..n {
            let p = x.index(i, j);
            let lhs = if plus[p] {
                if d.fixed[p] {
                    f64::INFINITY
                } else {
                    wn[p]
                }
            } else {
                wp[p]
            };
            let rhs = alpha * cost[p];
            report.pairs_checked += 1;
            if lhs > rhs + tol {
                report.pair_failures += 1;
            }
            let r = ratio(lhs, rhs);
            if r > worst_pair {
                worst_pair = r;
                report.worst_pair = Some(PairWitness { i, j, lhs, rhs });
            }
        }
    }
    let mut worst_tri = -1.0;
    for j in 0..n {
        let nbrs: Vec<usize> = (0..n).filter(|&v| v != j && plus[x.index(j, v)]).collect();
        for (a, &i) in nbrs.iter().enumerate() {
            for &k in &nbrs[a + 1..] {
                let ik = x.index(i, k);
                if plus[ik] {
                    continue;
                }
                let (ij, jk) = (x.index(i, j), x.index(j, k));
                report.bad_triangles += 1;
                let neg = if d.fixed[ik] { f64::INFINITY } else { wn[ik] };
                let lhs = wp[ij] + wp[jk] + neg;
                let rhs = alpha * (cost[ij] + cost[jk] + cost[ik]);
                if lhs > rhs + tol {
                    report.triangle_failures += 1;
                }
                let r = ratio(lhs, rhs);
                if r > worst_tri {
                    worst_tri = r;
                    report.worst_triangle = Some(TriangleWitness { i, j, k, lhs, rhs });
                }
            }
        }
    }
    report.passed = report.pair_failures == 0 && report.triangle_failures == 0;
    report
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseBound {
    pub case: &'static str,
    /// `w⁺_ij + w⁺_jk + w⁻_ik` for this triangle type.
    pub lhs: f64,
    /// Lower bound `f(delta)` on `c_ij + c_jk + c_ik`.
    pub bound: f64,
    /// `alpha * bound - lhs`.
    pub margin: f64,
    pub applicable: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseBoundsReport {
    pub mu: f64,
    pub beta: f64,
    pub delta: f64,
    pub alpha: f64,
    pub cases: Vec<CaseBound>,
    /// `alpha * delta - 1` (a `+` edge rounded to `-`).
    pub positive_pair_margin: f64,
    /// `alpha * (1 - delta) - 1` (a `-` edge rounded to `+`).
    pub negative_pair_margin: f64,
    pub passed: bool,
}

impl CaseBoundsReport {
    pub fn case(&self, name: &str) -> Option<&CaseBound> {
        self.cases.iter().find(|c| c.case == name)
    }
}

pub const CASE_MARGIN_TOL: f64 = 1e-12;

/// Evaluate the nine bad-triangle types of PBCC with `mu1 = mu2 = mu`. A case
/// passes when `lhs <= alpha * f(delta)` within `1e-12`. The second bound for
/// case 1a only applies when `beta >= 1/2`; cases 2a and 2b share one row.
pub fn verify_case_bounds(mu: f64, beta: f64, delta: f64, alpha: f64) -> Result<CaseBoundsReport> {
    check_unit_interval("mu", mu)?;
    check_unit_interval("beta", beta)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(ParaccError::param("delta", format!("{delta} is outside (0, 1)")));
    }
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(ParaccError::param("alpha", format!("{alpha} must be > 0")));
    }
    let rows: [(&'static str, f64, f64, bool); 9] = [
        ("1a", 1.0, mu * (1.0 - delta) + beta * (1.0 - delta), true),
        ("1a_beta_half", 1.0, mu * (1.0 - delta) + beta + delta * (1.0 - 3.0 * beta), beta >= 0.5),
        ("1b", 1.0 - beta, mu * (1.0 - delta) + delta * (1.0 - beta), true),
        ("1c", 0.0, mu * (1.0 - delta) + delta * (1.0 - beta), true),
        ("1d", beta, mu * (1.0 - delta) + beta * (2.0 - 3.0 * delta), true),
        ("2ab", (1.0 - beta) + mu, beta * (1.0 - delta) + mu * (1.0 - 2.0 * delta), true),
        ("2c", 2.0 * (1.0 - beta) + mu, (1.0 - beta) * delta + mu * (1.0 - 2.0 * delta), true),
        ("2d", mu, 2.0 * beta * (1.0 - delta) + mu * (1.0 - 2.0 * delta), true),
        ("3", mu, mu * (3.0 - 4.0 * delta), true),
    ];
    let cases: Vec<CaseBound> = rows
        .iter()
        .map(|&(case, lhs, bound, applicable)| {
            let margin = alpha * bound - lhs;
            CaseBound {
                case,
                lhs,
                bound,
                margin,
                applicable,
                passed: !applicable || margin >= -CASE_MARGIN_TOL,
            }
        })
        .collect();
    let positive_pair_margin = alpha * delta - 1.0;
    let negative_pair_margin = alpha * (1.0 - delta) - 1.0;
    let passed = cases.iter().all(|c| c.passed)
        && positive_pair_margin >= -CASE_MARGIN_TOL
        && negative_pair_margin >= -CASE_MARGIN_TOL;
    Ok(CaseBoundsReport {
        mu,
        beta,
        delta,
        alpha,
        cases,
        positive_pair_margin,
        negative_pair_margin,
        passed,
    })
}

/// `delta = 2 beta / (6 beta - 1)` and `alpha = 6 - 1/beta` for `mu = 0`, `beta >= 1/2`.
pub fn mu_zero_parameters(beta: f64) -> (f64, f64) {
    (2.0 * beta / (6.0 * beta - 1.0), 6.0 - 1.0 / beta)
}

/// `delta = 2/5`, `alpha = 5` for `mu1 = mu2`, `beta >= 1/2`.
pub const EQUAL_MU_PARAMETERS: (f64, f64) = (0.4, 5.0);

/// Above this `beta` (strictly) with `mu = 0`, PBCC optima are exactly the
/// bicluster-deletion optima.
pub fn bicluster_threshold(g: &BipartiteGraph) -> f64 {
    let p = (g.n1() * g.n2()) as f64;
    p / (p + 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `min(mu1, mu2) >= 1 - beta`: maximum matching is optimal.
    Matching,
    /// `mu = 0`, `beta` above the bicluster threshold: LP with pinned
    /// non-edges, `delta = 1/2`, `alpha = 4`.
    BiclusterDeletion,
    /// `mu = 0`, `beta >= 1/2`.
    MuZero,
    /// `mu1 = mu2 > 0`, `beta >= 1/2`.
    EqualMu,
    /// No guarantee: best of a delta sweep.
    Sweep,
    /// User-supplied delta.
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RoundMode {
    Auto,
    /// Round at `delta`; with `alpha`, also run the approximation checker.
    Fixed { delta: f64, alpha: Option<f64> },
}

#[derive(Debug, Clone, Serialize)]
pub struct PbccRoundResult {
    #[serde(skip)]
    pub clustering: Clustering,
    pub regime: Regime,
    pub delta: Option<f64>,
    pub alpha: Option<f64>,
    /// PBCC objective of the returned clustering.
    pub objective: f64,
    pub lp: Option<LpSummary>,
    pub check: Option<ApproximationReport>,
}

/// Sweep grid used when no guarantee applies: 0.05, 0.10, ..., 0.95.
pub fn default_delta_grid() -> Vec<f64> {
    (1..=19).map(|k| k as f64 * 0.05).collect()
}

/// Solve the PBCC LP and round it. `Auto` picks the regime and delta; see
/// [`Regime`]. The matching regime skips the LP entirely.
pub fn pbcc_round(
    g: &BipartiteGraph,
    mu1: f64,
    mu2: f64,
    beta: f64,
    mode: RoundMode,
    seed: u64,
    lp_opts: &LpOptions,
) -> Result<PbccRoundResult> {
    let inst = build_cc_from_pbcc(g, mu1, mu2, beta)?;
    let mu_zero = mu1 == 0.0 && mu2 == 0.0;
    let (regime, delta, alpha) = match mode {
        RoundMode::Fixed { delta, alpha } => {
            RoundingParams::new(delta, seed)?;
            (Regime::Fixed, Some(delta), alpha)
        }
        RoundMode::Auto => {
            if mu1.min(mu2) >= 1.0 - beta {
                log::info!("min(mu1, mu2) >= 1 - beta: using maximum matching instead of LP rounding");
                let c = matching_clustering(g, &hopcroft_karp(g));
                return Ok(PbccRoundResult {
                    objective: pbcc_objective(g, &c, mu1, mu2, beta)?,
                    clustering: c,
                    regime: Regime::Matching,
                    delta: None,
                    alpha: Some(1.0),
                    lp: None,
                    check: None,
                });
            } else if mu_zero && beta > bicluster_threshold(g) {
                (Regime::BiclusterDeletion, Some(0.5), Some(4.0))
            } else if mu_zero && beta >= 0.5 {
                let (d, a) = mu_zero_parameters(beta);
                (Regime::MuZero, Some(d), Some(a))
            } else if mu1 == mu2 && beta >= 0.5 {
                (Regime::EqualMu, Some(EQUAL_MU_PARAMETERS.0), Some(EQUAL_MU_PARAMETERS.1))
            } else {
                log::info!("no approximation guarantee for these parameters: sweeping delta");
                (Regime::Sweep, None, None)
            }
        }
    };
    let lp_inst = if regime == Regime::BiclusterDeletion {
        build_bicluster_deletion(g)
    } else {
        inst.clone()
    };
    let problem = LpProblem::from_instance(&lp_inst)?;
    let sol: FractionalSolution = solve_metric_lp(&problem, lp_opts)?;
    if !sol.converged {
        log::warn!("LP solve stopped before reaching the feasibility tolerance");
    }
    let (clustering, delta, check) = match delta {
        Some(d) => {
            let c = gen_round(&sol.x, &RoundingParams::new(d, seed)?);
            let check = alpha.map(|a| approximation_check(&lp_inst, &sol.x, d, a));
            (c, d, check)
        }
        None => {
            let out = delta_sweep(&inst, &sol.x, &default_delta_grid(), &[seed])?;
            (out.best, out.best_cell.delta, None)
        }
    };
    let mut summary = sol.summary();
    if regime == Regime::BiclusterDeletion {
        // In this regime the PBCC optimum is (1 - beta) times the bicluster
        // deletion optimum, so the pinned LP scales to a PBCC bound.
        summary.lower_bound *= 1.0 - beta;
        summary.objective *= 1.0 - beta;
    }
    Ok(PbccRoundResult {
        objective: pbcc_objective(g, &clustering, mu1, mu2, beta)?,
        clustering,
        regime,
        delta: Some(delta),
        alpha,
        lp: Some(summary),
        check,
    })
}
