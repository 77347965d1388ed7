//! Side-by-side infection curves of two networks on a common grid.

use std::fmt::Write as _;
use std::io::Write;

use rayon::prelude::*;

use crate::conductance::viral_conductance_numeric;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::sis::{CurveSample, SolverOptions, SteadyStateSolver};

/// Curves closer than this are reported as equal.
pub const EQUAL_TOLERANCE: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Equal,
    FirstLower,
    SecondLower,
    /// First still epidemic, second extinct (y = 0).
    OnlyFirstEpidemic,
    /// Second still epidemic, first extinct.
    OnlySecondEpidemic,
}

impl Relation {
    fn classify(a: f64, b: f64) -> Self {
        if (a - b).abs() <= EQUAL_TOLERANCE {
            Self::Equal
        } else if a == 0.0 {
            Self::OnlySecondEpidemic
        } else if b == 0.0 {
            Self::OnlyFirstEpidemic
        } else if a < b {
            Self::FirstLower
        } else {
            Self::SecondLower
        }
    }

    /// True when the first network has the strictly lower infected fraction.
    pub fn first_lower(self) -> bool {
        matches!(self, Self::FirstLower | Self::OnlySecondEpidemic)
    }

    pub fn second_lower(self) -> bool {
        matches!(self, Self::SecondLower | Self::OnlyFirstEpidemic)
    }

    fn describe(self, first: &str, second: &str) -> String {
        match self {
            Self::Equal => "equal".to_owned(),
            Self::FirstLower => format!("{first} lower"),
            Self::SecondLower => format!("{second} lower"),
            Self::OnlyFirstEpidemic => format!("only {first} epidemic"),
            Self::OnlySecondEpidemic => format!("only {second} epidemic"),
        }
    }
}

/// Maximal run of grid points sharing one relation, `[start, end]` in s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub start: f64,
    pub end: f64,
    pub relation: Relation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkSide {
    pub rho: f64,
    pub threshold: f64,
    pub conductance: f64,
    pub conductance_warning: bool,
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub names: [String; 2],
    pub first: NetworkSide,
    pub second: NetworkSide,
    /// Common grid over `[0, max(ρ_first, ρ_second)]`.
    pub first_curve: Vec<CurveSample>,
    pub second_curve: Vec<CurveSample>,
    pub regions: Vec<Region>,
    /// Values of s where the sign of `y_first − y_second` flips.
    pub crossovers: Vec<f64>,
}

pub fn compare_networks(a: &Graph, b: &Graph, grid_points: usize, options: SolverOptions) -> Result<Comparison> {
    if grid_points < 3 {
        return Err(Error::Validation(format!(
            "need at least 3 grid points, got {grid_points}"
        )));
    }
    let solver_a = SteadyStateSolver::new(a, options)?;
    let solver_b = SteadyStateSolver::new(b, options)?;
    let s_max = solver_a.rho().max(solver_b.rho());
    let last = grid_points - 1;
    let grid: Vec<f64> = (0..grid_points)
        .map(|i| {
            if i == last {
                s_max
            } else {
                s_max * i as f64 / last as f64
            }
        })
        .collect();

    let on_grid = |solver: &SteadyStateSolver<'_>| -> Result<Vec<CurveSample>> {
        grid.par_iter()
            .map(|&s| {
                solver.solve(s).map(|st| CurveSample {
                    s,
                    y: st.fraction,
                    converged: st.converged,
                })
            })
            .collect()
    };
    let first_curve = on_grid(&solver_a)?;
    let second_curve = on_grid(&solver_b)?;

    let side = |solver: &SteadyStateSolver<'_>| -> Result<NetworkSide> {
        let own = solver.sample_curve(grid_points)?;
        let v = viral_conductance_numeric(&own);
        Ok(NetworkSide {
            rho: solver.rho(),
            threshold: 1.0 / solver.rho(),
            conductance: v.value,
            conductance_warning: v.warning,
        })
    };

    let relations: Vec<Relation> = first_curve
        .iter()
        .zip(&second_curve)
        .map(|(p, q)| Relation::classify(p.y, q.y))
        .collect();

    Ok(Comparison {
        names: ["first".to_owned(), "second".to_owned()],
        first: side(&solver_a)?,
        second: side(&solver_b)?,
        regions: regions(&grid, &relations),
        crossovers: crossovers(&first_curve, &second_curve),
        first_curve,
        second_curve,
    })
}

fn regions(grid: &[f64], relations: &[Relation]) -> Vec<Region> {
    let mut out: Vec<Region> = Vec::new();
    for (&s, &relation) in grid.iter().zip(relations) {
        match out.last_mut() {
            Some(r) if r.relation == relation => r.end = s,
            _ => out.push(Region {
                start: s,
                end: s,
                relation,
            }),
        }
    }
    out
}

fn crossovers(a: &[CurveSample], b: &[CurveSample]) -> Vec<f64> {
    let diff: Vec<(f64, f64)> = a
        .iter()
        .zip(b)
        .map(|(p, q)| {
            let d = p.y - q.y;
            (p.s, if d.abs() <= EQUAL_TOLERANCE { 0.0 } else { d })
        })
        .collect();
    let signed: Vec<usize> = (0..diff.len()).filter(|&i| diff[i].1 != 0.0).collect();
    let mut out = Vec::new();
    for w in signed.windows(2) {
        let (i, j) = (w[0], w[1]);
        let ((si, di), (sj, dj)) = (diff[i], diff[j]);
        if di.signum() == dj.signum() {
            continue;
        }
        if j == i + 1 {
            out.push(si + (sj - si) * di / (di - dj));
        } else {
            out.push(0.5 * (diff[i + 1].0 + diff[j - 1].0));
        }
    }
    out
}

impl Comparison {
    pub fn with_names(mut self, first: &str, second: &str) -> Self {
        self.names = [first.to_owned(), second.to_owned()];
        self
    }

    /// True when no grid point separates the two curves.
    pub fn identical(&self) -> bool {
        self.regions.iter().all(|r| r.relation == Relation::Equal)
    }

    /// Human-readable summary of thresholds, conductances and dominance.
    pub fn to_text(&self) -> String {
        let [a, b] = &self.names;
        let mut out = String::new();
        for (name, side) in [(a, &self.first), (b, &self.second)] {
            let _ = writeln!(
                out,
                "{name}: rho={} threshold={} V={}{}",
                side.rho,
                side.threshold,
                side.conductance,
                if side.conductance_warning {
                    " (warning: non-converged samples)"
                } else {
                    ""
                }
            );
        }
        if self.identical() {
            let _ = writeln!(out, "curves identical");
            return out;
        }
        let list = self
            .crossovers
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(", ");
        let _ = writeln!(
            out,
            "crossovers: {}",
            if list.is_empty() { "none".into() } else { list }
        );
        let _ = writeln!(out, "regions:");
        for r in &self.regions {
            let _ = writeln!(out, "  s in [{}, {}]: {}", r.start, r.end, r.relation.describe(a, b));
        }
        out
    }

    /// Dual-curve CSV: `s,y_a,converged_a,y_b,converged_b`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["s", "y_a", "converged_a", "y_b", "converged_b"])?;
        for (p, q) in self.first_curve.iter().zip(&self.second_curve) {
            w.write_record([
                p.s.to_string(),
                p.y.to_string(),
                p.converged.to_string(),
                q.y.to_string(),
                q.converged.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}
