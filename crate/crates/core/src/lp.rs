//! Metric LP relaxation of correlation clustering.
//!
//! The LP `min Σ w⁺ x + w⁻ (1 - x)` over `x ∈ [0,1]` with all triangle
//! inequalities and pinned pairs is approached through its quadratically
//! regularized form `min cᵀx + (γ/2)|x|²`, which is a Euclidean projection of
//! `-c/γ` onto the metric polytope. The projection is computed with cyclic
//! Hildreth/Dykstra steps over every triangle constraint and the box. `γ` is
//! halved on each restart with a warm start.
//!
//! The returned lower bound is the Lagrangian dual value at the triangle
//! multipliers `γ·y`, which is a valid bound for any nonnegative multipliers.
//! The returned `x` is repaired to satisfy every triangle inequality exactly
//! by adding the residual violation to all free pairs and clamping at 1; the
//! cheapest repaired iterate over all restarts is kept.

use serde::Serialize;

use crate::error::{ParaccError, Result};
use crate::graph::{CcInstance, PairMatrix};

pub const DEFAULT_DENSE_LIMIT: usize = 300;

/// Dense LP data over unordered pairs.
#[derive(Debug, Clone)]
pub struct LpProblem {
    n: usize,
    positive: PairMatrix,
    negative: PairMatrix,
    fixed: Vec<bool>,
}

impl LpProblem {
    pub fn from_instance(inst: &CcInstance) -> Result<Self> {
        Self::with_limit(inst, DEFAULT_DENSE_LIMIT)
    }

    pub fn with_limit(inst: &CcInstance, limit: usize) -> Result<Self> {
        if inst.n() > limit {
            return Err(ParaccError::SizeLimit { n: inst.n(), limit });
        }
        let d = inst.dense();
        Ok(Self {
            n: inst.n(),
            positive: d.positive,
            negative: d.negative,
            fixed: d.fixed,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_fixed(&self, i: usize, j: usize) -> bool {
        self.fixed[self.positive.index(i, j)]
    }

    /// LP objective at `x`. Pinned pairs contribute `w⁺` (they sit at 1).
    pub fn objective(&self, x: &PairMatrix) -> f64 {
        let wp = self.positive.values();
        let wn = self.negative.values();
        let xs = x.values();
        let mut total = 0.0;
        for p in 0..xs.len() {
            total += if self.fixed[p] {
                wp[p]
            } else {
                wp[p] * xs[p] + wn[p] * (1.0 - xs[p])
            };
        }
        total
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LpOptions {
    /// Target maximum triangle violation before repair.
    pub tol_feas: f64,
    /// Budget of full projection passes summed over all restarts.
    pub max_passes: usize,
    /// Initial regularization weight; `None` means `1/n`.
    pub gamma0: Option<f64>,
    /// Restarts always performed (each halves `γ`).
    pub min_restarts: usize,
    /// Further restarts continue while the certified relative gap exceeds
    /// `gap_tol`, up to this many in total.
    pub max_restarts: usize,
    pub gap_tol: f64,
}

impl Default for LpOptions {
    fn default() -> Self {
        Self {
            tol_feas: 1e-6,
            max_passes: 2000,
            gamma0: None,
            min_restarts: 3,
            max_restarts: 12,
            gap_tol: 1e-3,
        }
    }
}

/// Fractional pairwise distances with solve diagnostics.
#[derive(Debug, Clone)]
pub struct FractionalSolution {
    pub x: PairMatrix,
    /// Max triangle violation of the returned (repaired) `x`.
    pub feasibility_violation: f64,
    /// Max triangle violation before repair.
    pub raw_violation: f64,
    pub objective_value: f64,
    /// Lagrangian lower bound on the LP optimum.
    pub lower_bound: f64,
    pub converged: bool,
    pub passes: usize,
    pub restarts: usize,
    /// Objective of the incumbent (cheapest repaired iterate so far) after
    /// each restart; nonincreasing.
    pub history: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LpSummary {
    pub objective: f64,
    pub lower_bound: f64,
    pub violation: f64,
    pub raw_violation: f64,
    pub converged: bool,
    pub passes: usize,
    pub restarts: usize,
}

impl FractionalSolution {
    /// Wrap a hand-built distance matrix, computing its diagnostics. The lower
    /// bound is set to 0 and the solution is marked converged only if it is
    /// metric to within `1e-12`.
    pub fn from_matrix(p: &LpProblem, x: PairMatrix) -> Self {
        let v = max_triangle_violation(&x);
        Self {
            objective_value: p.objective(&x),
            feasibility_violation: v,
            raw_violation: v,
            lower_bound: 0.0,
            converged: v <= 1e-12,
            passes: 0,
            restarts: 0,
            history: Vec::new(),
            x,
        }
    }

    pub fn summary(&self) -> LpSummary {
        LpSummary {
            objective: self.objective_value,
            lower_bound: self.lower_bound,
            violation: self.feasibility_violation,
            raw_violation: self.raw_violation,
            converged: self.converged,
            passes: self.passes,
            restarts: self.restarts,
        }
    }

    pub fn gap(&self) -> f64 {
        self.objective_value - self.lower_bound
    }
}

/// Largest `x_ij - x_ik - x_jk` over all ordered triangle constraints (0 if
/// metric).
pub fn max_triangle_violation(x: &PairMatrix) -> f64 {
    let n = x.n();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let xij = x.get(i, j);
            for k in j + 1..n {
                let (xik, xjk) = (x.get(i, k), x.get(j, k));
                worst = worst.max(xij - xik - xjk).max(xik - xij - xjk).max(xjk - xij - xik);
            }
        }
    }
    worst
}

struct Solver<'a> {
    p: &'a LpProblem,
    /// `c = w⁺ - w⁻` on free pairs.
    c: Vec<f64>,
    x: Vec<f64>,
    /// Triangle duals, three per triple in loop order.
    y: Vec<f64>,
    /// Box correction per pair (`x = z + q` after the box step).
    q: Vec<f64>,
    /// `idx[i][j]` pair index for the inner loop.
    idx: Vec<usize>,
}

impl<'a> Solver<'a> {
    fn new(p: &'a LpProblem, gamma: f64) -> Self {
        let n = p.n;
        let m = p.positive.values().len();
        let c: Vec<f64> = (0..m)
            .map(|q| {
                if p.fixed[q] {
                    0.0
                } else {
                    p.positive.values()[q] - p.negative.values()[q]
                }
            })
            .collect();
        let x = (0..m)
            .map(|q| if p.fixed[q] { 1.0 } else { -c[q] / gamma })
            .collect();
        let triples = if n >= 3 { n * (n - 1) * (n - 2) / 6 } else { 0 };
        let mut idx = vec![0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let q = p.positive.index(i, j);
                idx[i * n + j] = q;
                idx[j * n + i] = q;
            }
        }
        Self {
            p,
            c,
            x,
            y: vec![0.0; 3 * triples],
            q: vec![0.0; m],
            idx,
        }
    }

    /// One cyclic sweep over all triangle constraints followed by the box.
    /// Returns the largest coordinate change.
    fn pass(&mut self) -> f64 {
        let n = self.p.n;
        let fixed = &self.p.fixed;
        let x = &mut self.x;
        let y = &mut self.y;
        let before = x.clone();
        let mut t = 0;
        for i in 0..n {
            for j in i + 1..n {
                let a = self.idx[i * n + j];
                for k in j + 1..n {
                    let b = self.idx[i * n + k];
                    let c = self.idx[j * n + k];
                    // x_a <= x_b + x_c, x_b <= x_a + x_c, x_c <= x_a + x_b
                    for (head, s1, s2) in [(a, b, c), (b, a, c), (c, a, b)] {
                        let slack = x[head] - x[s1] - x[s2];
                        let yv = y[t];
                        if slack <= 0.0 && yv == 0.0 {
                            t += 1;
                            continue;
                        }
                        let nf = (!fixed[head]) as u8 + (!fixed[s1]) as u8 + (!fixed[s2]) as u8;
                        if nf == 0 {
                            t += 1;
                            continue;
                        }
                        let ny = (yv + slack / nf as f64).max(0.0);
                        let d = yv - ny;
                        if d != 0.0 {
                            if !fixed[head] {
                                x[head] += d;
                            }
                            if !fixed[s1] {
                                x[s1] -= d;
                            }
                            if !fixed[s2] {
                                x[s2] -= d;
                            }
                        }
                        y[t] = ny;
                        t += 1;
                    }
                }
            }
        }
        for p in 0..x.len() {
            if fixed[p] {
                continue;
            }
            let z = x[p] - self.q[p];
            let clamped = z.clamp(0.0, 1.0);
            self.q[p] = clamped - z;
            x[p] = clamped;
        }
        x.iter()
            .zip(&before)
            .fold(0.0, |m: f64, (a, b)| m.max((a - b).abs()))
    }

    /// Rescale the iterate for `γ -> γ/2`.
    fn halve_gamma(&mut self) {
        for (v, &f) in self.x.iter_mut().zip(&self.p.fixed) {
            if !f {
                *v *= 2.0;
            }
        }
        self.y.iter_mut().for_each(|v| *v *= 2.0);
        self.q.iter_mut().for_each(|v| *v *= 2.0);
    }

    fn matrix(&self) -> PairMatrix {
        let mut m = PairMatrix::new(self.p.n, 0.0);
        m.values_mut().copy_from_slice(&self.x);
        m
    }

    /// Lagrangian dual bound for multipliers `γ·y` on the triangle constraints.
    fn lower_bound(&self, gamma: f64) -> f64 {
        let n = self.p.n;
        let m = self.x.len();
        let mut aty = vec![0.0; m];
        let mut t = 0;
        for i in 0..n {
            for j in i + 1..n {
                let a = self.idx[i * n + j];
                for k in j + 1..n {
                    let b = self.idx[i * n + k];
                    let c = self.idx[j * n + k];
                    for (head, s1, s2) in [(a, b, c), (b, a, c), (c, a, b)] {
                        let l = gamma * self.y[t];
                        if l > 0.0 {
                            aty[head] += l;
                            aty[s1] -= l;
                            aty[s2] -= l;
                        }
                        t += 1;
                    }
                }
            }
        }
        let wp = self.p.positive.values();
        let wn = self.p.negative.values();
        let mut bound = 0.0;
        let mut scale = 0.0;
        for q in 0..m {
            if self.p.fixed[q] {
                bound += wp[q] + aty[q];
                scale += wp[q] + aty[q].abs();
            } else {
                bound += wn[q] + (self.c[q] + aty[q]).min(0.0);
                scale += wn[q] + self.c[q].abs() + aty[q].abs();
            }
        }
        // Guard against accumulated rounding in the sums above.
        (bound - 1e-12 * scale).max(0.0)
    }
}

/// Shift free pairs up by the residual violation so every triangle
/// inequality holds exactly; pinned pairs stay at 1.
fn repair(p: &LpProblem, x: &mut PairMatrix, violation: f64) {
    if violation <= 0.0 {
        return;
    }
    let shift = violation + 1e-12;
    for (v, &f) in x.values_mut().iter_mut().zip(&p.fixed) {
        if !f {
            *v = (*v + shift).min(1.0);
        }
    }
}

/// Approximately solve the metric LP. See the module docs for the method.
pub fn solve_metric_lp(p: &LpProblem, opts: &LpOptions) -> Result<FractionalSolution> {
    if !(opts.tol_feas > 0.0) {
        return Err(ParaccError::param("tol_feas", "must be > 0"));
    }
    let n = p.n;
    let gamma0 = opts.gamma0.unwrap_or(1.0 / n.max(1) as f64);
    if !(gamma0 > 0.0) {
        return Err(ParaccError::param("gamma0", "must be > 0"));
    }
    let mut solver = Solver::new(p, gamma0);
    let mut gamma = gamma0;
    let mut passes = 0;
    let mut history = Vec::new();
    let mut best_bound: f64 = 0.0;
    let mut restarts = 0;
    // Incumbent: the cheapest repaired iterate, preferring converged ones.
    let mut best: Option<(PairMatrix, f64, bool, f64)> = None;
    loop {
        let mut converged = false;
        while passes < opts.max_passes {
            let dx = solver.pass();
            passes += 1;
            if dx <= opts.tol_feas && max_triangle_violation(&solver.matrix()) <= opts.tol_feas {
                converged = true;
                break;
            }
        }
        let mut x = solver.matrix();
        let raw = max_triangle_violation(&x);
        converged &= raw <= opts.tol_feas;
        repair(p, &mut x, raw);
        let obj = p.objective(&x);
        best_bound = best_bound.max(solver.lower_bound(gamma));
        restarts += 1;
        log::debug!(
            "lp restart {restarts}: gamma={gamma:.3e} passes={passes} objective={obj:.9} bound={best_bound:.9} violation={raw:.2e}"
        );
        let replace = match &best {
            None => true,
            Some((_, _, c, o)) => (converged && !c) || (converged == *c && obj < *o),
        };
        if replace {
            best = Some((x, raw, converged, obj));
        }
        let incumbent = best.as_ref().map_or(obj, |b| b.3);
        history.push(incumbent);
        let gap = incumbent - best_bound;
        let small_gap = restarts >= opts.min_restarts && gap <= opts.gap_tol * incumbent.abs().max(1.0);
        if !converged || passes >= opts.max_passes || restarts >= opts.max_restarts || small_gap {
            break;
        }
        gamma *= 0.5;
        solver.halve_gamma();
    }
    let (x, raw, converged, _) = best.expect("at least one restart runs");
    let objective_value = p.objective(&x);
    Ok(FractionalSolution {
        feasibility_violation: max_triangle_violation(&x),
        raw_violation: raw,
        objective_value,
        // The LP optimum is at most the objective of any feasible point.
        lower_bound: best_bound.min(objective_value),
        converged,
        passes,
        restarts,
        history,
        x,
    })
}

/// Checks `lower_bound <= ilp_value + 1e-9`. Refuses unconverged solves.
pub fn lp_lower_bound_check(sol: &FractionalSolution, ilp_value: f64) -> Result<bool> {
    if !sol.converged {
        return Err(ParaccError::NotConverged);
    }
    Ok(sol.lower_bound <= ilp_value + 1e-9)
}
