//! Mean-field SIS steady state as a function of the effective curing rate
//! `s = δ/β`.
//!
//! For a given `s` the metastable state is the largest fixed point of the
//! per-node map
//!
//! ```text
//! v_i  <-  τ (A v)_i / (1 + τ (A v)_i),      τ = 1/s
//! ```
//!
//! reached by synchronous sweeps from the all-infected state `v = 1`. The
//! map is monotone and `F(1) <= 1`, so the sweeps decrease componentwise
//! toward the epidemic branch instead of the trivial fixed point `v = 0`.
//! For regular and complete bipartite graphs this fixed point reproduces the
//! closed forms in [`crate::closed_form`].

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::spectral::{self, SpectralSummary};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Maximum componentwise change per sweep at which a state counts as converged.
    pub tolerance: f64,
    pub iteration_cap: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            iteration_cap: 1_000_000,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if self.tolerance <= 0.0 || !self.tolerance.is_finite() {
            return Err(Error::Validation(format!(
                "solver tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.iteration_cap == 0 {
            return Err(Error::Validation("iteration cap must be at least 1".into()));
        }
        Ok(())
    }

    /// Tolerance handed to the power iteration: never looser than the
    /// spectral default, never below what double precision can resolve.
    fn spectral_tolerance(&self) -> f64 {
        self.tolerance.clamp(1e-14, spectral::DEFAULT_TOLERANCE)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    /// y = (1/N) Σ v_i
    pub fraction: f64,
    pub converged: bool,
    pub iterations: usize,
    /// max_i |F_i(v) − v_i| at the returned state.
    pub residual: f64,
}

/// One synchronous sweep `out = F(v)` at spreading rate `tau`; returns the
/// largest componentwise change.
pub fn mean_field_map(g: &Graph, tau: f64, v: &[f64], out: &mut [f64]) -> f64 {
    let mut change: f64 = 0.0;
    for (i, o) in out.iter_mut().enumerate() {
        let pressure = tau * g.neighbors(i).iter().map(|&j| v[j]).sum::<f64>();
        *o = pressure / (1.0 + pressure);
        change = change.max((*o - v[i]).abs());
    }
    change
}

/// Steady-state solver bound to one graph and its spectral radius.
#[derive(Debug, Clone)]
pub struct SteadyStateSolver<'g> {
    graph: &'g Graph,
    spectrum: SpectralSummary,
    options: SolverOptions,
}

impl<'g> SteadyStateSolver<'g> {
    /// Checks connectivity and computes ρ(A).
    pub fn new(graph: &'g Graph, options: SolverOptions) -> Result<Self> {
        options.validate()?;
        let spectrum = spectral::spectral_radius(graph, options.spectral_tolerance())?;
        Ok(Self {
            graph,
            spectrum,
            options,
        })
    }

    /// Reuses an already computed spectrum for `graph`.
    pub fn with_spectrum(graph: &'g Graph, spectrum: SpectralSummary, options: SolverOptions) -> Result<Self> {
        options.validate()?;
        graph.require_connected()?;
        Ok(Self {
            graph,
            spectrum,
            options,
        })
    }

    pub fn spectrum(&self) -> &SpectralSummary {
        &self.spectrum
    }

    pub fn rho(&self) -> f64 {
        self.spectrum.rho
    }

    pub fn options(&self) -> &SolverOptions {
        &self.options
    }

    pub fn solve(&self, s: f64) -> Result<SteadyState> {
        self.solve_with_state(s).map(|(state, _)| state)
    }

    /// Like [`Self::solve`] but also returns the per-node infection
    /// probabilities at the returned state.
    pub fn solve_with_state(&self, s: f64) -> Result<(SteadyState, Vec<f64>)> {
        if s < 0.0 || !s.is_finite() {
            return Err(Error::Validation(format!(
                "curing rate must be a finite non-negative number, got {s}"
            )));
        }
        let n = self.graph.node_count();
        if s == 0.0 {
            return Ok((pinned(1.0), vec![1.0; n]));
        }
        if s >= self.spectrum.rho {
            return Ok((pinned(0.0), vec![0.0; n]));
        }

        let tau = 1.0 / s;
        let mut v = vec![1.0; n];
        let mut next = vec![0.0; n];
        let mut iterations = 0;
        let residual = loop {
            // `v` is returned as is when this sweep ends the loop, so the
            // reported residual always belongs to the returned state
            let change = mean_field_map(self.graph, tau, &v, &mut next);
            iterations += 1;
            if change <= self.options.tolerance || iterations == self.options.iteration_cap {
                break change;
            }
            std::mem::swap(&mut v, &mut next);
        };
        let converged = residual <= self.options.tolerance;
        let fraction = (v.iter().sum::<f64>() / n as f64).clamp(0.0, 1.0);
        Ok((
            SteadyState {
                fraction,
                converged,
                iterations,
                residual,
            },
            v,
        ))
    }

    /// Samples y(s) on `grid_points` equidistant values covering `[0, ρ]`.
    /// The endpoints are pinned to 1 and 0; interior points are solved
    /// independently (in parallel).
    pub fn sample_curve(&self, grid_points: usize) -> Result<InfectionCurve> {
        if grid_points < 3 {
            return Err(Error::Validation(format!(
                "need at least 3 grid points, got {grid_points}"
            )));
        }
        let rho = self.spectrum.rho;
        let last = grid_points - 1;
        let interior: Vec<CurveSample> = (1..last)
            .into_par_iter()
            .map(|i| {
                let s = grid_value(rho, i, last);
                self.solve(s).map(|st| CurveSample {
                    s,
                    y: st.fraction,
                    converged: st.converged,
                })
            })
            .collect::<Result<_>>()?;
        let mut samples = Vec::with_capacity(grid_points);
        samples.push(CurveSample {
            s: 0.0,
            y: 1.0,
            converged: true,
        });
        samples.extend(interior);
        samples.push(CurveSample {
            s: rho,
            y: 0.0,
            converged: true,
        });
        Ok(InfectionCurve { rho, samples })
    }
}

fn pinned(fraction: f64) -> SteadyState {
    SteadyState {
        fraction,
        converged: true,
        iterations: 0,
        residual: 0.0,
    }
}

fn grid_value(rho: f64, i: usize, last: usize) -> f64 {
    if i == last {
        rho
    } else {
        rho * i as f64 / last as f64
    }
}

/// Steady-state infected fraction of `g` at curing rate `s`. Computes ρ(A)
/// on every call; use [`SteadyStateSolver`] to evaluate many rates.
pub fn steady_state_fraction(g: &Graph, s: f64, options: SolverOptions) -> Result<SteadyState> {
    SteadyStateSolver::new(g, options)?.solve(s)
}

pub fn sample_curve(g: &Graph, grid_points: usize, options: SolverOptions) -> Result<InfectionCurve> {
    SteadyStateSolver::new(g, options)?.sample_curve(grid_points)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSample {
    pub s: f64,
    pub y: f64,
    pub converged: bool,
}

/// y(s) sampled on an equidistant grid from 0 to ρ inclusive.
#[derive(Debug, Clone, PartialEq)]
pub struct InfectionCurve {
    rho: f64,
    samples: Vec<CurveSample>,
}

impl InfectionCurve {
    /// Tabulates a known curve `f` on the standard grid, pinning the
    /// endpoints like the numerical sampler does.
    pub fn from_fn<F: Fn(f64) -> f64>(rho: f64, grid_points: usize, f: F) -> Result<Self> {
        if grid_points < 3 {
            return Err(Error::Validation(format!(
                "need at least 3 grid points, got {grid_points}"
            )));
        }
        if rho <= 0.0 || !rho.is_finite() {
            return Err(Error::Validation(format!("grid end must be positive, got {rho}")));
        }
        let last = grid_points - 1;
        let samples = (0..grid_points)
            .map(|i| {
                let s = grid_value(rho, i, last);
                let y = match i {
                    0 => 1.0,
                    i if i == last => 0.0,
                    _ => f(s),
                };
                CurveSample { s, y, converged: true }
            })
            .collect();
        Ok(Self { rho, samples })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn samples(&self) -> &[CurveSample] {
        &self.samples
    }

    pub fn grid_points(&self) -> usize {
        self.samples.len()
    }

    pub fn all_converged(&self) -> bool {
        self.samples.iter().all(|p| p.converged)
    }

    pub fn non_converged(&self) -> usize {
        self.samples.iter().filter(|p| !p.converged).count()
    }

    /// Checks the grid and shape invariants; `slack` absorbs solver noise
    /// in the monotonicity test.
    pub fn check_invariants(&self, slack: f64) -> Result<()> {
        let n = self.samples.len();
        let bad = |msg: String| Err(Error::Validation(msg));
        if n < 3 {
            return bad(format!("curve has {n} samples"));
        }
        let first = self.samples[0];
        let last = self.samples[n - 1];
        if first.s != 0.0 || first.y != 1.0 {
            return bad(format!("curve starts at ({}, {}), expected (0, 1)", first.s, first.y));
        }
        if last.s != self.rho || last.y != 0.0 {
            return bad(format!(
                "curve ends at ({}, {}), expected ({}, 0)",
                last.s, last.y, self.rho
            ));
        }
        let step = self.rho / (n - 1) as f64;
        for (i, w) in self.samples.windows(2).enumerate() {
            let ds = w[1].s - w[0].s;
            if ds.is_nan() || ds <= 0.0 || (ds - step).abs() > 1e-9 * step.max(1.0) {
                return bad(format!("grid step {ds} at index {i} differs from {step}"));
            }
            if w[1].y > w[0].y + slack {
                return bad(format!("y increases from {} to {} at s = {}", w[0].y, w[1].y, w[1].s));
            }
        }
        if let Some(p) = self.samples.iter().find(|p| !(0.0..=1.0).contains(&p.y)) {
            return bad(format!("y = {} at s = {} is outside [0, 1]", p.y, p.s));
        }
        Ok(())
    }

    /// Writes `s,y,converged` rows with shortest round-trip float formatting.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["s", "y", "converged"])?;
        for p in &self.samples {
            w.write_record([p.s.to_string(), p.y.to_string(), p.converged.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}
