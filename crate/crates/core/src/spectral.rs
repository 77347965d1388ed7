//! Spectral radius of the adjacency matrix and the epidemic threshold.

use crate::error::{Error, Result};
use crate::graph::Graph;

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_ITERATION_CAP: usize = 1_000_000;

/// Relative Rayleigh-quotient changes this small are floating-point noise.
const ROUNDOFF: f64 = 64.0 * f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralSummary {
    /// ρ(A)
    pub rho: f64,
    /// τ_c = 1/ρ
    pub threshold: f64,
    pub iterations_used: usize,
    /// ‖A x − ρ x‖₂ at the final unit vector.
    pub residual: f64,
}

pub fn spectral_radius(g: &Graph, tolerance: f64) -> Result<SpectralSummary> {
    spectral_radius_capped(g, tolerance, DEFAULT_ITERATION_CAP)
}

/// Power iteration on `A + I` from the normalized all-ones vector.
///
/// The shift makes the Perron value strictly dominant on bipartite graphs,
/// where `A` alone has the pair `±ρ`. Iteration stops once the relative
/// change of the Rayleigh quotient stays below `tolerance` for two
/// consecutive steps and the geometric tail `δ q / (1 − q)` extrapolated
/// from the observed contraction `q` is below half of it, or once the
/// residual `‖A x − θ x‖`, which bounds `|θ − ρ|` for symmetric `A`, drops
/// below `tolerance · θ` (floored at the rounding level of an `N`-term sum).
pub fn spectral_radius_capped(g: &Graph, tolerance: f64, iteration_cap: usize) -> Result<SpectralSummary> {
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(Error::Validation(format!(
            "tolerance must be positive, got {tolerance}"
        )));
    }
    g.require_connected()?;
    if g.edge_count() == 0 {
        return Err(Error::Validation("graph has no edges".into()));
    }
    let n = g.node_count();
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut y = vec![0.0; n];
    let mut theta_prev = f64::NAN;
    let mut delta_prev = f64::INFINITY;
    let residual_floor = tolerance.max(ROUNDOFF * (n as f64).sqrt());

    for iteration in 1..=iteration_cap {
        g.adjacency_mul(&x, &mut y);
        for (yi, xi) in y.iter_mut().zip(&x) {
            *yi += xi;
        }
        let theta: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let shifted_residual = x
            .iter()
            .zip(&y)
            .map(|(a, b)| (b - theta * a).powi(2))
            .sum::<f64>()
            .sqrt();
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / norm;
        }

        let delta = (theta - theta_prev).abs() / (theta - 1.0);
        let tail_ok = if delta <= ROUNDOFF {
            true
        } else {
            let q = delta / delta_prev;
            q < 1.0 && delta * q / (1.0 - q) < 0.5 * tolerance
        };
        let settled = |d: f64| d < tolerance || d <= ROUNDOFF;
        let small_residual = shifted_residual <= residual_floor * (theta - 1.0);
        if (settled(delta) && settled(delta_prev) && tail_ok) || small_residual {
            let rho = theta - 1.0;
            return Ok(SpectralSummary {
                rho,
                threshold: 1.0 / rho,
                iterations_used: iteration,
                residual: eigen_residual(g, &x, rho),
            });
        }
        theta_prev = theta;
        delta_prev = delta;
    }
    Err(Error::NonConvergence {
        iterations: iteration_cap,
        residual: eigen_residual(g, &x, theta_prev - 1.0),
    })
}

fn eigen_residual(g: &Graph, x: &[f64], rho: f64) -> f64 {
    let mut ax = vec![0.0; x.len()];
    g.adjacency_mul(x, &mut ax);
    ax.iter().zip(x).map(|(a, b)| (a - rho * b).powi(2)).sum::<f64>().sqrt()
}
