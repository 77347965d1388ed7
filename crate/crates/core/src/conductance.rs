//! Viral conductance `V = ∫₀^∞ y(s) ds`: trapezoidal quadrature of a sampled
//! infection curve, closed forms for regular and complete bipartite graphs,
//! and the two-line / power-curve heuristics built from ρ, E[d] and σ.

use crate::error::{Error, Result};
use crate::graph::{degree_stats, Graph};
use crate::sis::{InfectionCurve, SolverOptions, SteadyStateSolver};
use crate::spectral;

/// `σρ − 1` at or below this is treated as a regular graph, where both
/// heuristic formulas are 0/0.
pub const DEGENERACY_EPS: f64 = 1e-9;

/// Relative slack for the `σ E[d] >= 1` and `ρ >= E[d]` consistency checks.
const STATS_SLACK: f64 = 1e-8;

/// Composite trapezoid rule over `(x, y)` samples.
pub fn trapezoid(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::Validation(format!(
            "trapezoid needs matching sample vectors of length >= 2, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    Ok(xs
        .windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericConductance {
    pub value: f64,
    /// Set when at least one curve sample hit the iteration cap.
    pub warning: bool,
}

/// Trapezoidal area under the sampled curve. Samples beyond ρ are zero,
/// so the integral over `[0, ρ]` is the whole conductance.
pub fn viral_conductance_numeric(curve: &InfectionCurve) -> NumericConductance {
    let value = curve
        .samples()
        .windows(2)
        .map(|w| 0.5 * (w[1].s - w[0].s) * (w[0].y + w[1].y))
        .sum();
    NumericConductance {
        value,
        warning: !curve.all_converged(),
    }
}

/// Regular graph of degree `k`: `V = k/2`.
pub fn vc_regular(k: u32) -> f64 {
    f64::from(k) / 2.0
}

/// Complete bipartite graph `K_{M,N}`, integrating the closed-form curve by
/// partial fractions:
///
/// ```text
/// V = [ (M+N)√(MN) − MN
///       + (M−N)( N ln(N+√(MN)) − M ln(M+√(MN)) + M ln M − N ln N ) ] / (M+N)
/// ```
pub fn vc_bipartite(m: u32, n: u32) -> f64 {
    let (m, n) = (f64::from(m), f64::from(n));
    let r = (m * n).sqrt();
    let logs = n * (n + r).ln() - m * (m + r).ln() + m * m.ln() - n * n.ln();
    ((m + n) * r - m * n + (m - n) * logs) / (m + n)
}

/// Variant of [`vc_bipartite`] with the shifted logarithm arguments swapped.
/// It agrees on `M = N` only and does not match direct quadrature otherwise
/// (99.27 instead of 11.38 for `K_{10,90}`); kept for reference.
pub fn vc_bipartite_as_printed(m: u32, n: u32) -> f64 {
    let (m, n) = (f64::from(m), f64::from(n));
    let r = (m * n).sqrt();
    let logs = n * (m + r).ln() - m * (n + r).ln() + m * m.ln() - n * n.ln();
    ((m + n) * r - m * n + (m - n) * logs) / (m + n)
}

/// Graph statistics the heuristics are built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeuristicInputs {
    pub rho: f64,
    pub mean_degree: f64,
    /// (1/N) Σ 1/d_i
    pub sigma: f64,
}

impl HeuristicInputs {
    pub fn new(rho: f64, mean_degree: f64, sigma: f64) -> Result<Self> {
        let inputs = Self {
            rho,
            mean_degree,
            sigma,
        };
        inputs.validate()?;
        Ok(inputs)
    }

    pub fn from_graph(g: &Graph) -> Result<Self> {
        let stats = degree_stats(g)?;
        let spectrum = spectral::spectral_radius(g, spectral::DEFAULT_TOLERANCE)?;
        Self::new(spectrum.rho, stats.mean_degree, stats.inverse_degree_mean)
    }

    /// Rejects statistics no connected graph can have.
    pub fn validate(&self) -> Result<()> {
        let Self {
            rho,
            mean_degree,
            sigma,
        } = *self;
        if ![rho, mean_degree, sigma].iter().all(|v| v.is_finite() && *v > 0.0) {
            return Err(Error::Validation(format!(
                "heuristic inputs must be positive (rho {rho}, E[d] {mean_degree}, sigma {sigma})"
            )));
        }
        if mean_degree < 1.0 - STATS_SLACK {
            return Err(Error::Validation(format!("mean degree {mean_degree} < 1")));
        }
        if sigma * mean_degree < 1.0 - STATS_SLACK {
            return Err(Error::Validation(format!(
                "inconsistent statistics: sigma * E[d] = {} < 1",
                sigma * mean_degree
            )));
        }
        if rho < mean_degree * (1.0 - STATS_SLACK) {
            return Err(Error::Validation(format!(
                "inconsistent statistics: rho = {rho} < E[d] = {mean_degree}"
            )));
        }
        Ok(())
    }

    pub fn is_degenerate(&self) -> bool {
        self.sigma * self.rho - 1.0 <= DEGENERACY_EPS
    }
}

/// The tangent lines of y(s) at both ends of `[0, ρ]`: slope `−σ` through
/// `(0, 1)` and slope `−E[d]/ρ²` through `(ρ, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLineModel {
    inputs: HeuristicInputs,
}

impl TwoLineModel {
    pub fn new(inputs: HeuristicInputs) -> Result<Self> {
        inputs.validate()?;
        Ok(Self { inputs })
    }

    pub fn initial_line(&self, s: f64) -> f64 {
        1.0 - self.inputs.sigma * s
    }

    pub fn terminal_line(&self, s: f64) -> f64 {
        let HeuristicInputs { rho, mean_degree, .. } = self.inputs;
        mean_degree / rho - mean_degree / (rho * rho) * s
    }

    pub fn terminal_slope(&self) -> f64 {
        -self.inputs.mean_degree / (self.inputs.rho * self.inputs.rho)
    }

    /// `s* = ρ(ρ − E[d]) / (σρ² − E[d])`; `None` when the lines coincide.
    pub fn intersection(&self) -> Option<f64> {
        if self.inputs.is_degenerate() {
            return None;
        }
        let HeuristicInputs {
            rho,
            mean_degree,
            sigma,
        } = self.inputs;
        Some(rho * (rho - mean_degree) / (sigma * rho * rho - mean_degree))
    }
}

/// Two-line (piecewise linear) estimate `V_PL`.
pub fn heuristic_vpl(inputs: &HeuristicInputs) -> Result<f64> {
    inputs.validate()?;
    let HeuristicInputs {
        rho,
        mean_degree: e,
        sigma,
    } = *inputs;
    if inputs.is_degenerate() {
        return Ok(rho / 2.0);
    }
    Ok(rho * ((sigma * rho - 2.0) * e + rho) / (2.0 * (sigma * rho * rho - e)))
}

/// Power-curve estimate `V_NL`: the area under
/// `1 − σs + (σρ − 1)(s/ρ)^d`, which shares both end tangents with y(s).
pub fn heuristic_vnl(inputs: &HeuristicInputs) -> Result<f64> {
    inputs.validate()?;
    let HeuristicInputs {
        rho,
        mean_degree: e,
        sigma,
    } = *inputs;
    if inputs.is_degenerate() {
        return Ok(rho / 2.0);
    }
    Ok(rho * ((sigma * rho - 2.0) * e + sigma * rho * rho) / (2.0 * (2.0 * sigma * rho * rho - e - rho)))
}

/// Exponent `d = (σρ² − E[d]) / (ρ(σρ − 1))` of the power-curve model.
pub fn nl_exponent(inputs: &HeuristicInputs) -> Result<f64> {
    inputs.validate()?;
    if inputs.is_degenerate() {
        return Err(Error::Validation(
            "power-curve exponent is undefined for regular graphs".into(),
        ));
    }
    let HeuristicInputs {
        rho,
        mean_degree: e,
        sigma,
    } = *inputs;
    Ok((sigma * rho * rho - e) / (rho * (sigma * rho - 1.0)))
}

/// Evaluates the power-curve model at `s ∈ [0, ρ]`.
pub fn model_curve_nl(inputs: &HeuristicInputs, s: f64) -> Result<f64> {
    let d = nl_exponent(inputs)?;
    let HeuristicInputs { rho, sigma, .. } = *inputs;
    if !(0.0..=rho).contains(&s) {
        return Err(Error::OutOfRange {
            name: "s",
            value: s,
            lower: 0.0,
            upper: rho,
        });
    }
    Ok(1.0 - sigma * s + (sigma * rho - 1.0) * (s / rho).powf(d))
}

/// Heuristic and (optionally) numerical conductance of one network.
#[derive(Debug, Clone, PartialEq)]
pub struct ConductanceReport {
    pub name: String,
    pub nodes: usize,
    pub links: usize,
    pub rho: f64,
    pub threshold: f64,
    pub mean_degree: f64,
    pub sigma: f64,
    pub v_pl: f64,
    pub v_nl: f64,
    pub v_h: f64,
    pub v_numeric: Option<f64>,
    pub grid_points: Option<usize>,
    /// (v_h − v_numeric) / v_numeric
    pub relative_error_vh: Option<f64>,
    /// Number of curve samples that did not converge.
    pub non_converged: usize,
}

impl ConductanceReport {
    fn heuristic(name: &str, g: &Graph, rho: f64) -> Result<Self> {
        let stats = degree_stats(g)?;
        let inputs = HeuristicInputs::new(rho, stats.mean_degree, stats.inverse_degree_mean)?;
        let v_pl = heuristic_vpl(&inputs)?;
        let v_nl = heuristic_vnl(&inputs)?;
        Ok(Self {
            name: name.to_owned(),
            nodes: g.node_count(),
            links: g.edge_count(),
            rho,
            threshold: 1.0 / rho,
            mean_degree: stats.mean_degree,
            sigma: stats.inverse_degree_mean,
            v_pl,
            v_nl,
            v_h: (v_pl + v_nl) / 2.0,
            v_numeric: None,
            grid_points: None,
            relative_error_vh: None,
            non_converged: 0,
        })
    }

    pub fn has_warning(&self) -> bool {
        self.non_converged > 0
    }
}

/// Heuristic fields only; `v_numeric` stays empty.
pub fn heuristic_vh(g: &Graph) -> Result<ConductanceReport> {
    heuristic_vh_named("graph", g)
}

pub fn heuristic_vh_named(name: &str, g: &Graph) -> Result<ConductanceReport> {
    g.require_connected()?;
    let spectrum = spectral::spectral_radius(g, spectral::DEFAULT_TOLERANCE)?;
    ConductanceReport::heuristic(name, g, spectrum.rho)
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub report: ConductanceReport,
    pub curve: InfectionCurve,
}

/// Full pipeline: spectrum, sampled curve, quadrature and heuristics.
pub fn analyze(name: &str, g: &Graph, grid_points: usize, options: SolverOptions) -> Result<Analysis> {
    let solver = SteadyStateSolver::new(g, options)?;
    let curve = solver.sample_curve(grid_points)?;
    let numeric = viral_conductance_numeric(&curve);
    let mut report = ConductanceReport::heuristic(name, g, solver.rho())?;
    report.v_numeric = Some(numeric.value);
    report.grid_points = Some(curve.grid_points());
    report.relative_error_vh = Some((report.v_h - numeric.value) / numeric.value);
    report.non_converged = curve.non_converged();
    Ok(Analysis { report, curve })
}
