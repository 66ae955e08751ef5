//! Parametric correlation clustering for hypergraphs and bipartite graphs.
//!
//! The crate covers the hypergraph objective with a resolution parameter
//! (cut penalty plus `lambda * w_i * w_j` repulsion), parametric bipartite
//! correlation clustering, metric LP relaxations and threshold-pivot rounding,
//! hypergraph expansions, a node-weighted Louvain heuristic and exact
//! small-instance oracles.

pub mod error;
pub mod eval;
pub mod exact;
pub mod expansions;
pub mod graph;
pub mod heuristics;
pub mod io;
pub mod lp;
pub mod objectives;
pub mod rounding;

pub use error::{ParaccError, Result};
pub use graph::{
    build_bicluster_deletion, build_cc_from_expansion, build_cc_from_pbcc, cc_objective,
    BipartiteGraph, CcInstance, Clustering, Hyperedge, Hypergraph, NegativeRule, PairMatrix,
    WeightMode, WeightedGraph,
};
pub use lp::{solve_metric_lp, FractionalSolution, LpOptions, LpProblem};
pub use objectives::{hyperlam_objective, pbcc_objective, CutPenalty};
