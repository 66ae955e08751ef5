//! Command-line front end. Every subcommand prints a result to stdout (JSON
//! unless noted) and, with `--out-dir`, also writes its artifacts plus a
//! `manifest.json` echoing the parsed configuration.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use paracc::eval::{
    ari, best_f1_tracking, format_g9, synth_planted_bipartite, synth_planted_hypergraph, PlantedHypergraphConfig,
    RecordWriter, SweepRecord,
};
use paracc::exact::{brute_force_with_limit, hopcroft_karp, matching_clustering};
use paracc::expansions::{clique_expand, normalize_volume, star_expand, triangle_motif_hypergraph};
use paracc::heuristics::{hyperlam_louvain, ExpansionKind};
use paracc::io;
use paracc::lp::LpSummary;
use paracc::objectives::{hyper_ncut, ncut, HyperCut};
use paracc::rounding::{
    delta_sweep, mu_zero_parameters, pbcc_round, verify_case_bounds, RoundMode, EQUAL_MU_PARAMETERS,
};
use paracc::{
    build_bicluster_deletion, build_cc_from_expansion, build_cc_from_pbcc, hyperlam_objective, pbcc_objective,
    solve_metric_lp, BipartiteGraph, CcInstance, Clustering, CutPenalty, Hypergraph, LpOptions, LpProblem,
    ParaccError, Result, WeightMode, WeightedGraph,
};

#[derive(Debug, Parser, Serialize)]
#[command(name = "paracc", version, about = "Parametric correlation clustering for hypergraphs and bipartite graphs")]
pub struct Cli {
    /// Base random seed.
    #[arg(long, global = true, env = "PARACC_SEED", default_value_t = 0)]
    seed: u64,

    /// Worker threads for sweeps (default: logical cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Directory for artifacts and the run manifest.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,

    /// Log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    /// Record wall-clock times (outputs are then no longer byte-reproducible).
    #[arg(long, global = true, default_value_t = false)]
    timing: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Clique or star expansion of a hypergraph, or the triangle hypergraph of a graph.
    Expand(ExpandArgs),
    /// Evaluate one objective on a clustering or node set.
    Eval(EvalArgs),
    /// Solve the metric LP relaxation.
    LpSolve(LpSolveArgs),
    /// Solve the PBCC LP and round it.
    Round(RoundArgs),
    /// Check the bad-triangle case bounds for a parameter setting.
    VerifyBounds(VerifyBoundsArgs),
    /// Lambda-Louvain on a hypergraph.
    Louvain(LouvainArgs),
    /// Exact optimum by exhaustive search.
    Brute(BruteArgs),
    /// Maximum bipartite matching and its clustering.
    Matching(MatchingArgs),
    /// Parameter sweeps writing experiment CSV rows.
    Sweep(SweepArgs),
    /// Planted-partition instances with ground truth.
    Synth(SynthArgs),
}

/// A list of values: `start:end:step` (endpoints inclusive within 1e-12),
/// comma-separated values, or a single value.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Grid(pub Vec<f64>);

fn round12(v: f64) -> f64 {
    let r = (v * 1e12).round() / 1e12;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let num = |t: &str| -> std::result::Result<f64, String> {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("`{t}` is not a finite number"))
        };
        let parts: Vec<&str> = s.split(':').collect();
        let values = match parts.as_slice() {
            [a, b, step] => {
                let (a, b, step) = (num(a)?, num(b)?, num(step)?);
                if !(step > 0.0) {
                    return Err("grid step must be > 0".into());
                }
                if a > b {
                    return Err("grid start exceeds end".into());
                }
                let mut out = Vec::new();
                let mut k = 0u64;
                loop {
                    let v = a + k as f64 * step;
                    if v > b + 1e-12 {
                        break;
                    }
                    out.push(round12(v.min(b)));
                    k += 1;
                }
                out
            }
            [_] => s.split(',').map(num).collect::<std::result::Result<_, _>>()?,
            _ => return Err(format!("cannot parse grid `{s}`; use start:end:step or a,b,c")),
        };
        if values.is_empty() {
            return Err("grid is empty".into());
        }
        Ok(Grid(values))
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Weights {
    Unit,
    Degree,
}

impl From<Weights> for WeightMode {
    fn from(w: Weights) -> Self {
        match w {
            Weights::Unit => WeightMode::Unit,
            Weights::Degree => WeightMode::Degree,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Cut {
    /// All-or-nothing penalty (Louvain runs on the clique expansion).
    Aon,
    /// Linear penalty (Louvain runs on the star expansion).
    Linear,
}

impl Cut {
    fn penalty(self) -> CutPenalty {
        match self {
            Cut::Aon => CutPenalty::AllOrNothing,
            Cut::Linear => CutPenalty::Linear,
        }
    }

    fn expansion(self) -> ExpansionKind {
        match self {
            Cut::Aon => ExpansionKind::AonViaClique,
            Cut::Linear => ExpansionKind::LinearViaStar,
        }
    }
}

#[derive(Debug, Args, Serialize)]
struct PbccArgs {
    /// Same-side repulsion for both sides.
    #[arg(long, default_value_t = 0.0)]
    mu: f64,
    /// Left-side repulsion (overrides --mu).
    #[arg(long)]
    mu1: Option<f64>,
    /// Right-side repulsion (overrides --mu).
    #[arg(long)]
    mu2: Option<f64>,
    /// Cross-pair balance: edges cost 1-beta when cut, non-edges beta when merged.
    #[arg(long)]
    beta: Option<f64>,
}

impl PbccArgs {
    fn resolve(&self) -> Result<(f64, f64, f64)> {
        let beta = self.beta.ok_or_else(|| param("beta", "required for PBCC"))?;
        Ok((self.mu1.unwrap_or(self.mu), self.mu2.unwrap_or(self.mu), beta))
    }
}

#[derive(Debug, Args, Serialize)]
struct LambdaArgs {
    /// Resolution parameter.
    #[arg(long)]
    lambda: Option<f64>,
    /// Resolution relative to total volume: lambda = x / vol(V).
    #[arg(long, conflicts_with = "lambda")]
    lambda_scaled: Option<f64>,
}

impl LambdaArgs {
    fn resolve(&self, volume: f64) -> Result<f64> {
        match (self.lambda, self.lambda_scaled) {
            (Some(l), _) => Ok(l),
            (None, Some(x)) if volume > 0.0 => Ok(x / volume),
            (None, Some(_)) => Err(ParaccError::ZeroVolume),
            (None, None) => Err(param("lambda", "give --lambda or --lambda-scaled")),
        }
    }
}

#[derive(Debug, Args, Serialize)]
struct LpArgs {
    /// Feasibility tolerance on triangle violations.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Projection pass budget across all restarts.
    #[arg(long, default_value_t = 2000)]
    max_iters: usize,
    /// Fail with exit code 4 unless the LP solve converges.
    #[arg(long, default_value_t = false)]
    require_certificate: bool,
}

impl LpArgs {
    fn options(&self) -> LpOptions {
        LpOptions {
            tol_feas: self.tol,
            max_passes: self.max_iters,
            ..LpOptions::default()
        }
    }

    fn certify(&self, summary: &LpSummary) -> Result<()> {
        if self.require_certificate && !summary.converged {
            return Err(ParaccError::NotConverged);
        }
        Ok(())
    }
}

/// Which correlation clustering instance to build from INPUT.
#[derive(Debug, Args, Serialize)]
struct ProblemArgs {
    /// INPUT is a weighted graph; the instance is cut weight plus lambda * w_i * w_j.
    #[arg(long, default_value_t = false, requires = "lambda")]
    graph: bool,
    /// Resolution for --graph.
    #[arg(long)]
    lambda: Option<f64>,
    /// Node weights for --graph.
    #[arg(long, value_enum, default_value_t = Weights::Degree)]
    weights: Weights,
    /// Bicluster deletion on a bipartite INPUT: unit edge costs, non-edges may not be merged.
    #[arg(long, default_value_t = false, conflicts_with = "graph")]
    bicluster: bool,
    #[command(flatten)]
    pbcc: PbccArgs,
}

impl ProblemArgs {
    fn instance(&self, input: &Path) -> Result<CcInstance> {
        if self.graph {
            let g = read_graph_weighted(input, self.weights)?;
            build_cc_from_expansion(&g, self.lambda.expect("clap enforces --lambda"))
        } else if self.bicluster {
            Ok(build_bicluster_deletion(&read_bipartite(input)?))
        } else {
            let (mu1, mu2, beta) = self.pbcc.resolve()?;
            build_cc_from_pbcc(&read_bipartite(input)?, mu1, mu2, beta)
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum ExpandMode {
    Clique,
    Star,
    Triangles,
}

#[derive(Debug, Args, Serialize)]
struct ExpandArgs {
    input: PathBuf,
    #[arg(long, value_enum)]
    mode: ExpandMode,
    /// Hypergraph node weights carried into the expansion.
    #[arg(long, value_enum, default_value_t = Weights::Degree)]
    weights: Weights,
    /// Rescale expanded edge weights to this total volume.
    #[arg(long)]
    normalize_volume: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum ObjectiveKind {
    Hyperlam,
    Pbcc,
    Ncut,
    Hncut,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum HcutArg {
    Boundary,
    Linear,
}

#[derive(Debug, Args, Serialize)]
#[command(group(ArgGroup::new("part").args(["clustering", "set"]).required(true)))]
struct EvalArgs {
    input: PathBuf,
    #[arg(long, value_enum)]
    objective: ObjectiveKind,
    /// Clustering file (`node cluster` lines) for hyperlam and pbcc.
    #[arg(long)]
    clustering: Option<PathBuf>,
    /// Node set file (1-based ids) for ncut and hncut.
    #[arg(long)]
    set: Option<PathBuf>,
    #[command(flatten)]
    lambda: LambdaArgs,
    #[arg(long, value_enum, default_value_t = Cut::Aon)]
    cut: Cut,
    #[arg(long, value_enum, default_value_t = Weights::Degree)]
    weights: Weights,
    /// Hypergraph cut for hncut.
    #[arg(long, value_enum, default_value_t = HcutArg::Boundary)]
    hcut: HcutArg,
    #[command(flatten)]
    pbcc: PbccArgs,
    /// Print a JSON envelope with the parameters instead of a bare number.
    #[arg(long, default_value_t = false)]
    json: bool,
}

#[derive(Debug, Args, Serialize)]
struct LpSolveArgs {
    input: PathBuf,
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    lp: LpArgs,
}

#[derive(Debug, Args, Serialize)]
#[command(group(ArgGroup::new("how").args(["delta", "auto", "sweep_deltas"]).required(true)))]
struct RoundArgs {
    /// Bipartite graph.
    input: PathBuf,
    /// Fixed rounding threshold.
    #[arg(long)]
    delta: Option<f64>,
    /// Choose delta from the parameter regime.
    #[arg(long, default_value_t = false)]
    auto: bool,
    /// Round at every grid value and keep the cheapest clustering.
    #[arg(long)]
    sweep_deltas: Option<Grid>,
    /// Pivot seeds per delta in a sweep, starting at --seed.
    #[arg(long, default_value_t = 1)]
    seeds: u64,
    /// Claimed approximation factor to check with a fixed delta.
    #[arg(long, requires = "delta")]
    alpha: Option<f64>,
    #[command(flatten)]
    pbcc: PbccArgs,
    #[command(flatten)]
    lp: LpArgs,
}

#[derive(Debug, Args, Serialize)]
struct VerifyBoundsArgs {
    #[arg(long)]
    mu: f64,
    #[arg(long)]
    beta: f64,
    /// Rounding threshold (default: from the regime of mu).
    #[arg(long, requires = "alpha")]
    delta: Option<f64>,
    /// Approximation factor (default: from the regime of mu).
    #[arg(long, requires = "delta")]
    alpha: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
struct LouvainArgs {
    /// Hypergraph.
    input: PathBuf,
    #[command(flatten)]
    lambda: LambdaArgs,
    #[arg(long, value_enum, default_value_t = Cut::Aon)]
    cut: Cut,
    #[arg(long, value_enum, default_value_t = Weights::Degree)]
    weights: Weights,
    /// Ground-truth labels for ARI.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Target node set for best-F1 tracking.
    #[arg(long)]
    target: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct BruteArgs {
    input: PathBuf,
    #[command(flatten)]
    problem: ProblemArgs,
    /// Refuse instances with more nodes than this.
    #[arg(long, default_value_t = paracc::exact::BRUTE_FORCE_LIMIT)]
    max_n: usize,
}

#[derive(Debug, Args, Serialize)]
struct MatchingArgs {
    /// Bipartite graph.
    input: PathBuf,
    /// Also report the PBCC cost of the matching clustering at these parameters.
    #[command(flatten)]
    pbcc: PbccArgs,
}

#[derive(Debug, Args, Serialize)]
#[command(group(ArgGroup::new("kind").args(["pbcc", "louvain"]).required(true)))]
struct SweepArgs {
    input: PathBuf,
    /// LP rounding over a (mu, beta) grid on a bipartite INPUT; one row per cell.
    #[arg(long, default_value_t = false)]
    pbcc: bool,
    /// Lambda-Louvain over a lambda grid on a hypergraph INPUT; one row per (lambda, seed).
    #[arg(long, default_value_t = false)]
    louvain: bool,
    /// Beta values (PBCC).
    #[arg(long, default_value = "0:1:0.05")]
    beta_grid: Grid,
    /// Same-side repulsion values used on both sides (PBCC).
    #[arg(long, default_value = "0")]
    mu: Grid,
    /// Rounding thresholds tried per cell (PBCC).
    #[arg(long, default_value = "0.05:0.95:0.05")]
    deltas: Grid,
    /// Lambda values (Louvain).
    #[arg(long, conflicts_with = "lambda_scaled_grid")]
    lambda_grid: Option<Grid>,
    /// Lambda values relative to total volume (Louvain).
    #[arg(long)]
    lambda_scaled_grid: Option<Grid>,
    #[arg(long, value_enum, default_value_t = Cut::Aon)]
    cut: Cut,
    #[arg(long, value_enum, default_value_t = Weights::Degree)]
    weights: Weights,
    /// Seeds per cell, starting at --seed.
    #[arg(long, default_value_t = 1)]
    seeds: u64,
    /// Ground-truth labels for the ari column.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Value of the param_set column (default: input file stem).
    #[arg(long)]
    param_set: Option<String>,
    #[command(flatten)]
    lp: LpArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum SynthKind {
    Bipartite,
    Hypergraph,
}

#[derive(Debug, Args, Serialize)]
struct SynthArgs {
    #[arg(long, value_enum)]
    kind: SynthKind,
    /// Block sizes: `3x3,2x2` (left x right) for bipartite, `10,10` for hypergraph.
    #[arg(long)]
    sizes: String,
    #[arg(long, default_value_t = 0.9)]
    p_in: f64,
    #[arg(long, default_value_t = 0.05)]
    p_out: f64,
    #[arg(long, default_value_t = 20)]
    edges_per_block: usize,
    #[arg(long, default_value_t = 2)]
    min_edge: usize,
    #[arg(long, default_value_t = 4)]
    max_edge: usize,
    /// Fraction of hyperedges drawn across all nodes.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
}

fn param(name: &'static str, reason: &str) -> ParaccError {
    ParaccError::InvalidParameter {
        name,
        reason: reason.to_string(),
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| ParaccError::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn read_hypergraph(path: &Path) -> Result<Hypergraph> {
    io::read_hypergraph(open(path)?)
}

fn read_bipartite(path: &Path) -> Result<BipartiteGraph> {
    io::read_bipartite(open(path)?)
}

fn read_graph_weighted(path: &Path, weights: Weights) -> Result<WeightedGraph> {
    let g = io::read_weighted_graph(open(path)?)?;
    match weights {
        Weights::Unit => Ok(g),
        Weights::Degree => {
            let d = g.weighted_degrees();
            g.with_node_weights(d)
        }
    }
}

fn read_labels(path: &Path, n: usize) -> Result<Clustering> {
    io::read_labels(open(path)?, n)
}

/// Collects artifacts for `--out-dir` and the stdout text.
struct Output {
    dir: Option<PathBuf>,
    files: Vec<String>,
    stdout: String,
}

impl Output {
    fn new(dir: Option<PathBuf>) -> Result<Self> {
        if let Some(d) = &dir {
            std::fs::create_dir_all(d)?;
        }
        Ok(Self {
            dir,
            files: Vec::new(),
            stdout: String::new(),
        })
    }

    fn has_dir(&self) -> bool {
        self.dir.is_some()
    }

    /// Write `name` into the output directory if there is one.
    fn artifact(&mut self, name: &str, write: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
        let Some(dir) = &self.dir else { return Ok(()) };
        let mut buf = Vec::new();
        write(&mut buf)?;
        std::fs::write(dir.join(name), buf)?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn json(&mut self, value: &impl Serialize) -> Result<()> {
        self.stdout.push_str(&serde_json::to_string_pretty(value)?);
        self.stdout.push('\n');
        Ok(())
    }

    fn json_artifact(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        self.artifact(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            w.push(b'\n');
            Ok(())
        })
    }

    fn finish(mut self, cli: &Cli) -> Result<String> {
        if self.dir.is_some() {
            let manifest = json!({
                "tool": "paracc",
                "version": env!("CARGO_PKG_VERSION"),
                "config": cli,
                "outputs": self.files.clone(),
            });
            self.json_artifact("manifest.json", &manifest)?;
        }
        Ok(self.stdout)
    }
}

fn clustering_json(c: &Clustering) -> serde_json::Value {
    json!({ "num_clusters": c.num_clusters(), "assignment": c.assignment() })
}

fn write_clustering_artifact(out: &mut Output, c: &Clustering) -> Result<()> {
    out.artifact("clustering.txt", |w| io::write_clustering(c, w))
}

fn run_expand(a: &ExpandArgs, out: &mut Output) -> Result<()> {
    let text = {
        let mut buf = Vec::new();
        match a.mode {
            ExpandMode::Triangles => {
                if a.normalize_volume.is_some() {
                    return Err(param("normalize_volume", "only applies to clique and star expansions"));
                }
                let g = io::read_weighted_graph(open(&a.input)?)?;
                io::write_hypergraph(&triangle_motif_hypergraph(&g), &mut buf)?;
            }
            ExpandMode::Clique | ExpandMode::Star => {
                let h = read_hypergraph(&a.input)?.with_weight_mode(a.weights.into());
                let mut g = match a.mode {
                    ExpandMode::Clique => clique_expand(&h),
                    _ => star_expand(&h).graph,
                };
                if let Some(target) = a.normalize_volume {
                    g = normalize_volume(&g, target)?;
                }
                io::write_weighted_graph(&g, &mut buf)?;
            }
        }
        buf
    };
    let name = match a.mode {
        ExpandMode::Triangles => "expanded.hyper",
        _ => "expanded.graph",
    };
    if out.has_dir() {
        out.artifact(name, |w| {
            w.extend_from_slice(&text);
            Ok(())
        })
    } else {
        out.stdout.push_str(&String::from_utf8(text).expect("writers emit UTF-8"));
        Ok(())
    }
}

fn run_eval(a: &EvalArgs, out: &mut Output) -> Result<()> {
    let need = |p: &Option<PathBuf>, flag: &'static str| -> Result<PathBuf> {
        p.clone().ok_or_else(|| param(flag, "required by this objective"))
    };
    let (value, params) = match a.objective {
        ObjectiveKind::Hyperlam => {
            let h = read_hypergraph(&a.input)?;
            let mode: WeightMode = a.weights.into();
            let c = read_labels(&need(&a.clustering, "clustering")?, h.n())?;
            let lambda = a.lambda.resolve(h.clone().with_weight_mode(mode).total_volume())?;
            let v = hyperlam_objective(&h, &c, lambda, a.cut.penalty(), mode)?;
            (v, json!({ "lambda": lambda, "cut": a.cut, "weights": a.weights }))
        }
        ObjectiveKind::Pbcc => {
            let g = read_bipartite(&a.input)?;
            let c = read_labels(&need(&a.clustering, "clustering")?, g.n())?;
            let (mu1, mu2, beta) = a.pbcc.resolve()?;
            let v = pbcc_objective(&g, &c, mu1, mu2, beta)?;
            (v, json!({ "mu1": mu1, "mu2": mu2, "beta": beta }))
        }
        ObjectiveKind::Ncut => {
            let g = io::read_weighted_graph(open(&a.input)?)?;
            let s = io::read_node_set(open(&need(&a.set, "set")?)?, g.n())?;
            (ncut(&g, &s)?, json!({}))
        }
        ObjectiveKind::Hncut => {
            let h = read_hypergraph(&a.input)?;
            let s = io::read_node_set(open(&need(&a.set, "set")?)?, h.n())?;
            let kind = match a.hcut {
                HcutArg::Boundary => HyperCut::Boundary,
                HcutArg::Linear => HyperCut::Linear,
            };
            (hyper_ncut(&h, &s, kind)?, json!({ "hcut": a.hcut }))
        }
    };
    if a.json {
        out.json(&json!({ "objective": a.objective, "value": value, "parameters": params }))
    } else {
        out.stdout.push_str(&format_g9(value));
        out.stdout.push('\n');
        Ok(())
    }
}

fn run_lp_solve(a: &LpSolveArgs, out: &mut Output) -> Result<()> {
    let inst = a.problem.instance(&a.input)?;
    let sol = solve_metric_lp(&LpProblem::from_instance(&inst)?, &a.lp.options())?;
    let summary = sol.summary();
    a.lp.certify(&summary)?;
    out.artifact("x.txt", |w| io::write_triangular(&sol.x, w))?;
    out.json_artifact("lp.json", &summary)?;
    out.json(&summary)
}

#[derive(Serialize)]
struct RoundSweepReport {
    regime: &'static str,
    delta: f64,
    seed: u64,
    objective: f64,
    lp: LpSummary,
}

fn run_round(a: &RoundArgs, seed: u64, out: &mut Output) -> Result<()> {
    let g = read_bipartite(&a.input)?;
    let (mu1, mu2, beta) = a.pbcc.resolve()?;
    let (report, clustering) = if let Some(grid) = &a.sweep_deltas {
        let inst = build_cc_from_pbcc(&g, mu1, mu2, beta)?;
        let sol = solve_metric_lp(&LpProblem::from_instance(&inst)?, &a.lp.options())?;
        let summary = sol.summary();
        a.lp.certify(&summary)?;
        let seeds: Vec<u64> = (0..a.seeds.max(1)).map(|k| seed.wrapping_add(k)).collect();
        let outcome = delta_sweep(&inst, &sol.x, &grid.0, &seeds)?;
        out.artifact("sweep.csv", |w| outcome.write_csv(w))?;
        let r = RoundSweepReport {
            regime: "sweep",
            delta: outcome.best_cell.delta,
            seed: outcome.best_cell.seed,
            objective: pbcc_objective(&g, &outcome.best, mu1, mu2, beta)?,
            lp: summary,
        };
        (serde_json::to_value(&r)?, outcome.best)
    } else {
        let mode = match a.delta {
            Some(delta) => RoundMode::Fixed { delta, alpha: a.alpha },
            None => RoundMode::Auto,
        };
        let r = pbcc_round(&g, mu1, mu2, beta, mode, seed, &a.lp.options())?;
        if let Some(lp) = &r.lp {
            a.lp.certify(lp)?;
        }
        (serde_json::to_value(&r)?, r.clustering)
    };
    let mut report = report;
    report["clustering"] = clustering_json(&clustering);
    write_clustering_artifact(out, &clustering)?;
    out.json_artifact("round.json", &report)?;
    out.json(&report)
}

/// Returns whether every case bound held.
fn run_verify_bounds(a: &VerifyBoundsArgs, out: &mut Output) -> Result<bool> {
    let (delta, alpha) = match (a.delta, a.alpha) {
        (Some(d), Some(al)) => (d, al),
        _ if a.mu == 0.0 => mu_zero_parameters(a.beta),
        _ => EQUAL_MU_PARAMETERS,
    };
    let report = verify_case_bounds(a.mu, a.beta, delta, alpha)?;
    out.json_artifact("bounds.json", &report)?;
    out.json(&report)?;
    Ok(report.passed)
}

fn run_louvain(a: &LouvainArgs, seed: u64, out: &mut Output) -> Result<()> {
    let h = read_hypergraph(&a.input)?;
    let mode: WeightMode = a.weights.into();
    let lambda = a.lambda.resolve(h.clone().with_weight_mode(mode).total_volume())?;
    let c = hyperlam_louvain(&h, lambda, a.cut.expansion(), mode, seed)?;
    let mut report = json!({
        "lambda": lambda,
        "cut": a.cut,
        "weights": a.weights,
        "seed": seed,
        "objective": hyperlam_objective(&h, &c, lambda, a.cut.penalty(), mode)?,
    });
    if let Some(t) = &a.truth {
        report["ari"] = json!(ari(&c, &read_labels(t, h.n())?)?);
    }
    if let Some(t) = &a.target {
        let target = io::read_node_set(open(t)?, h.n())?;
        report["best_f1"] = json!(best_f1_tracking(&c, &target)?);
    }
    report["clustering"] = clustering_json(&c);
    write_clustering_artifact(out, &c)?;
    out.json_artifact("louvain.json", &report)?;
    out.json(&report)
}

fn run_brute(a: &BruteArgs, out: &mut Output) -> Result<()> {
    let inst = a.problem.instance(&a.input)?;
    let (c, value) = brute_force_with_limit(&inst, a.max_n)?;
    let report = json!({ "objective": value, "clustering": clustering_json(&c) });
    write_clustering_artifact(out, &c)?;
    out.json_artifact("brute.json", &report)?;
    out.json(&report)
}

fn run_matching(a: &MatchingArgs, out: &mut Output) -> Result<()> {
    let g = read_bipartite(&a.input)?;
    let m = hopcroft_karp(&g);
    let c = matching_clustering(&g, &m);
    let pairs: Vec<(usize, usize)> = m.pairs.iter().map(|&(i, j)| (i + 1, j + 1)).collect();
    let mut report = json!({ "size": m.len(), "pairs": pairs });
    if a.pbcc.beta.is_some() {
        let (mu1, mu2, beta) = a.pbcc.resolve()?;
        report["pbcc_objective"] = json!(pbcc_objective(&g, &c, mu1, mu2, beta)?);
    }
    report["clustering"] = clustering_json(&c);
    write_clustering_artifact(out, &c)?;
    out.json_artifact("matching.json", &report)?;
    out.json(&report)
}

fn elapsed_ms(start: Instant, timing: bool) -> Option<f64> {
    timing.then(|| (start.elapsed().as_secs_f64() * 1e3 * 1e3).round() / 1e3)
}

fn run_sweep(a: &SweepArgs, seed: u64, timing: bool, out: &mut Output) -> Result<()> {
    let param_set = a.param_set.clone().unwrap_or_else(|| {
        a.input
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    });
    let seeds: Vec<u64> = (0..a.seeds.max(1)).map(|k| seed.wrapping_add(k)).collect();
    let records: Vec<SweepRecord> = if a.pbcc {
        let g = read_bipartite(&a.input)?;
        let truth = a.truth.as_ref().map(|t| read_labels(t, g.n())).transpose()?;
        let cells: Vec<(f64, f64)> = a.mu.0.iter().flat_map(|&mu| a.beta_grid.0.iter().map(move |&b| (mu, b))).collect();
        let opts = a.lp.options();
        cells
            .par_iter()
            .map(|&(mu, beta)| {
                let start = Instant::now();
                let inst = build_cc_from_pbcc(&g, mu, mu, beta)?;
                let sol = solve_metric_lp(&LpProblem::from_instance(&inst)?, &opts)?;
                a.lp.certify(&sol.summary())?;
                let outcome = delta_sweep(&inst, &sol.x, &a.deltas.0, &seeds)?;
                let bound = if sol.converged {
                    Some(sol.lower_bound)
                } else {
                    log::warn!("mu={mu} beta={beta}: LP did not converge; lp_bound left empty");
                    None
                };
                Ok(SweepRecord {
                    param_set: param_set.clone(),
                    mu1: Some(mu),
                    mu2: Some(mu),
                    beta: Some(beta),
                    delta: Some(outcome.best_cell.delta),
                    seed: outcome.best_cell.seed,
                    objective: outcome.best_cell.objective,
                    ari: truth.as_ref().map(|t| ari(&outcome.best, t)).transpose()?,
                    time_ms: elapsed_ms(start, timing),
                    ..SweepRecord::default()
                }
                .with_bound(bound))
            })
            .collect::<Result<_>>()?
    } else {
        let h = read_hypergraph(&a.input)?;
        let mode: WeightMode = a.weights.into();
        let truth = a.truth.as_ref().map(|t| read_labels(t, h.n())).transpose()?;
        let lambdas: Vec<f64> = match (&a.lambda_grid, &a.lambda_scaled_grid) {
            (Some(g), _) => g.0.clone(),
            (None, Some(g)) => {
                let vol = h.clone().with_weight_mode(mode).total_volume();
                if vol <= 0.0 {
                    return Err(ParaccError::ZeroVolume);
                }
                g.0.iter().map(|x| x / vol).collect()
            }
            (None, None) => return Err(param("lambda_grid", "give --lambda-grid or --lambda-scaled-grid")),
        };
        let cells: Vec<(f64, u64)> = lambdas.iter().flat_map(|&l| seeds.iter().map(move |&s| (l, s))).collect();
        cells
            .par_iter()
            .map(|&(lambda, s)| {
                let start = Instant::now();
                let c = hyperlam_louvain(&h, lambda, a.cut.expansion(), mode, s)?;
                Ok(SweepRecord {
                    param_set: param_set.clone(),
                    lambda: Some(lambda),
                    seed: s,
                    objective: hyperlam_objective(&h, &c, lambda, a.cut.penalty(), mode)?,
                    ari: truth.as_ref().map(|t| ari(&c, t)).transpose()?,
                    time_ms: elapsed_ms(start, timing),
                    ..SweepRecord::default()
                })
            })
            .collect::<Result<_>>()?
    };
    let mut w = RecordWriter::new(Vec::new())?;
    for r in &records {
        w.write(r)?;
    }
    let csv = w.finish()?;
    if out.has_dir() {
        out.artifact("sweep.csv", |buf| {
            buf.extend_from_slice(&csv);
            Ok(())
        })
    } else {
        out.stdout.push_str(&String::from_utf8(csv).expect("CSV is UTF-8"));
        Ok(())
    }
}

fn parse_sizes<T>(s: &str, item: impl Fn(&str) -> Option<T>) -> Result<Vec<T>> {
    s.split(',')
        .map(|t| item(t.trim()).ok_or_else(|| param("sizes", &format!("cannot parse block `{t}`"))))
        .collect()
}

fn run_synth(a: &SynthArgs, seed: u64, out: &mut Output) -> Result<()> {
    if !out.has_dir() {
        return Err(param("out_dir", "synth writes a graph and a truth file; give --out-dir"));
    }
    let truth = match a.kind {
        SynthKind::Bipartite => {
            let sizes = parse_sizes(&a.sizes, |t| {
                let (l, r) = t.split_once('x')?;
                Some((l.parse().ok()?, r.parse().ok()?))
            })?;
            let (g, truth) = synth_planted_bipartite(&sizes, a.p_in, a.p_out, seed)?;
            out.artifact("graph.bip", |w| io::write_bipartite(&g, w))?;
            truth
        }
        SynthKind::Hypergraph => {
            let sizes = parse_sizes(&a.sizes, |t| t.parse().ok())?;
            let (h, truth) = synth_planted_hypergraph(&PlantedHypergraphConfig {
                sizes,
                edges_per_block: a.edges_per_block,
                min_edge: a.min_edge,
                max_edge: a.max_edge,
                noise_frac: a.noise,
                seed,
            })?;
            out.artifact("graph.hyper", |w| io::write_hypergraph(&h, w))?;
            truth
        }
    };
    out.artifact("truth.txt", |w| io::write_clustering(&truth, w))?;
    out.json(&json!({ "nodes": truth.len(), "blocks": truth.num_clusters(), "outputs": out.files.clone() }))
}

/// Exit status for an error: 2 for unreadable input or bad parameters, 3 for
/// instances the algorithms cannot handle, 4 for an uncertified LP solve.
pub fn exit_code(e: &ParaccError) -> i32 {
    match e {
        ParaccError::Parse { .. }
        | ParaccError::InvalidParameter { .. }
        | ParaccError::Io(_)
        | ParaccError::Csv(_)
        | ParaccError::Json(_) => 2,
        ParaccError::SizeLimit { .. }
        | ParaccError::InvalidGraph(_)
        | ParaccError::ZeroVolume
        | ParaccError::Undefined(_) => 3,
        ParaccError::NotConverged => 4,
    }
}

fn run(cli: &Cli) -> Result<i32> {
    if let Some(j) = cli.jobs {
        if j == 0 {
            return Err(param("jobs", "must be at least 1"));
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j).build_global() {
            log::warn!("could not size the worker pool: {e}");
        }
    }
    let mut out = Output::new(cli.out_dir.clone())?;
    let mut status = 0;
    match &cli.command {
        Command::Expand(a) => run_expand(a, &mut out)?,
        Command::Eval(a) => run_eval(a, &mut out)?,
        Command::LpSolve(a) => run_lp_solve(a, &mut out)?,
        Command::Round(a) => run_round(a, cli.seed, &mut out)?,
        Command::VerifyBounds(a) => {
            if !run_verify_bounds(a, &mut out)? {
                status = 1;
            }
        }
        Command::Louvain(a) => run_louvain(a, cli.seed, &mut out)?,
        Command::Brute(a) => run_brute(a, &mut out)?,
        Command::Matching(a) => run_matching(a, &mut out)?,
        Command::Sweep(a) => run_sweep(a, cli.seed, cli.timing, &mut out)?,
        Command::Synth(a) => run_synth(a, cli.seed, &mut out)?,
    }
    let text = out.finish(cli)?;
    let mut stdout = std::io::stdout().lock();
    stdout.write_all(text.as_bytes())?;
    stdout.flush()?;
    Ok(status)
}

pub fn main() -> i32 {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).parse_default_env().init();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error: kind={} msg={msg}", e.kind());
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_inclusive_endpoints() {
        let g: Grid = "0:1:0.05".parse().unwrap();
        assert_eq!(g.0.len(), 21);
        assert_eq!(g.0[1], 0.05);
        assert_eq!(g.0[3], 0.15);
        assert_eq!(*g.0.last().unwrap(), 1.0);
        let g: Grid = "0.05:0.95:0.05".parse().unwrap();
        assert_eq!(g.0.len(), 19);
        assert_eq!(*g.0.last().unwrap(), 0.95);
    }

    #[test]
    fn grid_lists_and_errors() {
        assert_eq!("0.5".parse::<Grid>().unwrap().0, vec![0.5]);
        assert_eq!("0.1,0.3".parse::<Grid>().unwrap().0, vec![0.1, 0.3]);
        assert!("1:0:0.1".parse::<Grid>().is_err());
        assert!("0:1:0".parse::<Grid>().is_err());
        assert!("0:1".parse::<Grid>().is_err());
        assert!("a".parse::<Grid>().is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
