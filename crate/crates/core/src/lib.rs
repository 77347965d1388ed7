//! Viral conductance of undirected networks.
//!
//! The viral conductance `V = ∫₀^∞ y(s) ds` integrates the steady-state
//! infected fraction of the SIS process over every effective curing rate
//! `s = δ/β`. Smaller `V` means a network more robust to virus spread. The
//! crate provides:
//!
//! * [`graph`] and [`generate`]: simple undirected graphs, edge-list input
//!   and the topology families used in the experiments;
//! * [`spectral`]: spectral radius ρ(A) and the epidemic threshold 1/ρ;
//! * [`sis`]: the mean-field steady state y(s) and sampled curves on `[0, ρ]`;
//! * [`conductance`]: quadrature, closed forms and the ρ/E[d]/σ heuristics;
//! * [`compare`] and [`report`]: network comparison and table output.

pub mod closed_form;
pub mod compare;
pub mod conductance;
pub mod error;
pub mod generate;
pub mod graph;
pub mod report;
pub mod sis;
pub mod spectral;

pub use compare::{compare_networks, Comparison, Region, Relation};
pub use conductance::{
    analyze, heuristic_vh, heuristic_vnl, heuristic_vpl, model_curve_nl, vc_bipartite, vc_regular,
    viral_conductance_numeric, Analysis, ConductanceReport, HeuristicInputs,
};
pub use error::{Error, Result};
pub use generate::{generate, NetworkSpec};
pub use graph::{degree_stats, load_edge_list, DegreeStats, Graph};
pub use sis::{sample_curve, steady_state_fraction, InfectionCurve, SolverOptions, SteadyStateSolver};
pub use spectral::{spectral_radius, SpectralSummary};
