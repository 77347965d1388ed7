//! Text and CSV renderings of conductance reports, and the two reference
//! tables (complete bipartite graphs; realistic networks).

use std::fmt::Write as _;
use std::io::Write;

use crate::conductance::{heuristic_vnl, heuristic_vpl, vc_bipartite, ConductanceReport, HeuristicInputs};
use crate::error::Result;

pub const REPORT_CSV_HEADER: [&str; 8] = ["name", "N", "L", "mean_degree", "threshold", "V", "V_H", "rel_error"];

/// `(M, N)` pairs of the complete bipartite reference table.
pub const TABLE1_PAIRS: [(u32, u32); 6] = [(10, 90), (30, 70), (50, 50), (10, 990), (100, 900), (250, 750)];

/// Rounds to `decimals` places and drops trailing zeros: `25.00 -> 25`,
/// `-0.00 -> 0`.
pub fn format_trimmed(value: f64, decimals: usize) -> String {
    let mut s = format!("{value:.decimals$}");
    if s.contains('.') {
        s = s.trim_end_matches('0').trim_end_matches('.').to_owned();
    }
    if s == "-0" {
        s = "0".to_owned();
    }
    s
}

fn percent(fraction: f64) -> String {
    format!("{}%", format_trimmed(100.0 * fraction, 2))
}

impl ConductanceReport {
    /// Flat `key: value` block.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let opt = |v: Option<f64>| v.map_or_else(|| "n/a".to_owned(), |x| x.to_string());
        let _ = writeln!(out, "name: {}", self.name);
        let _ = writeln!(out, "nodes: {}", self.nodes);
        let _ = writeln!(out, "links: {}", self.links);
        let _ = writeln!(out, "mean_degree: {}", self.mean_degree);
        let _ = writeln!(out, "sigma: {}", self.sigma);
        let _ = writeln!(out, "rho: {}", self.rho);
        let _ = writeln!(out, "threshold: {}", self.threshold);
        let _ = writeln!(
            out,
            "grid_points: {}",
            self.grid_points.map_or_else(|| "n/a".to_owned(), |g| g.to_string())
        );
        let _ = writeln!(out, "v_numeric: {}", opt(self.v_numeric));
        let _ = writeln!(out, "v_pl: {}", self.v_pl);
        let _ = writeln!(out, "v_nl: {}", self.v_nl);
        let _ = writeln!(out, "v_h: {}", self.v_h);
        let _ = writeln!(out, "relative_error_vh: {}", opt(self.relative_error_vh));
        let _ = writeln!(out, "non_converged_samples: {}", self.non_converged);
        out
    }

    pub fn csv_record(&self) -> [String; 8] {
        [
            self.name.clone(),
            self.nodes.to_string(),
            self.links.to_string(),
            self.mean_degree.to_string(),
            self.threshold.to_string(),
            self.v_numeric.map_or_else(String::new, |v| v.to_string()),
            self.v_h.to_string(),
            self.relative_error_vh.map_or_else(String::new, percent),
        ]
    }
}

pub fn write_reports_csv<W: Write>(reports: &[ConductanceReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(REPORT_CSV_HEADER)?;
    for r in reports {
        w.write_record(r.csv_record())?;
    }
    w.flush()?;
    Ok(())
}

/// One row of the complete bipartite reference table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Table1Row {
    pub m: u32,
    pub n: u32,
    pub v: f64,
    pub v_h: f64,
    /// (V_H − V) / V_H; the realistic-network rows divide by V instead.
    pub rel_error: f64,
}

impl Table1Row {
    pub fn compute(m: u32, n: u32) -> Result<Self> {
        let (mf, nf) = (f64::from(m), f64::from(n));
        let inputs = HeuristicInputs::new(
            (mf * nf).sqrt(),
            2.0 * mf * nf / (mf + nf),
            (mf / nf + nf / mf) / (mf + nf),
        )?;
        let v = vc_bipartite(m, n);
        let v_h = (heuristic_vpl(&inputs)? + heuristic_vnl(&inputs)?) / 2.0;
        Ok(Self {
            m,
            n,
            v,
            v_h,
            rel_error: (v_h - v) / v_h,
        })
    }

    /// `M,N,V,V_H,rel_error` rounded to two decimals.
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.m,
            self.n,
            format_trimmed(self.v, 2),
            format_trimmed(self.v_h, 2),
            percent(self.rel_error)
        )
    }
}

pub fn table1() -> Result<Vec<Table1Row>> {
    TABLE1_PAIRS.iter().map(|&(m, n)| Table1Row::compute(m, n)).collect()
}

pub fn write_table1<W: Write>(mut out: W) -> Result<()> {
    writeln!(out, "M,N,V,V_H,rel_error")?;
    for row in table1()? {
        writeln!(out, "{}", row.csv_line())?;
    }
    Ok(())
}

/// Summary of one network (or one random family across seeds) for the
/// realistic-network table.
#[derive(Debug, Clone, PartialEq)]
pub enum Table2Row {
    Computed {
        name: String,
        nodes: f64,
        links: f64,
        mean_degree: f64,
        threshold: f64,
        v: f64,
        v_h: f64,
        v_sd: f64,
        seeds: usize,
    },
    Skipped {
        name: String,
        reason: String,
    },
}

fn mean_sd(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    let var = if n > 1.0 {
        values.map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

impl Table2Row {
    /// Averages full reports (one per seed). Reports without a numerical
    /// conductance are ignored.
    pub fn from_reports(name: &str, reports: &[ConductanceReport]) -> Self {
        let done: Vec<&ConductanceReport> = reports.iter().filter(|r| r.v_numeric.is_some()).collect();
        if done.is_empty() {
            return Self::Skipped {
                name: name.to_owned(),
                reason: "no completed runs".to_owned(),
            };
        }
        let avg = |f: fn(&ConductanceReport) -> f64| mean_sd(done.iter().map(|r| f(r))).0;
        Self::Computed {
            name: name.to_owned(),
            nodes: avg(|r| r.nodes as f64),
            links: avg(|r| r.links as f64),
            mean_degree: avg(|r| r.mean_degree),
            threshold: avg(|r| r.threshold),
            v: avg(|r| r.v_numeric.unwrap_or(f64::NAN)),
            v_h: avg(|r| r.v_h),
            v_sd: mean_sd(done.iter().map(|r| r.v_numeric.unwrap_or(f64::NAN))).1,
            seeds: done.len(),
        }
    }

    pub fn skipped(name: &str, reason: &str) -> Self {
        Self::Skipped {
            name: name.to_owned(),
            reason: reason.to_owned(),
        }
    }

    /// `(V_H − V) / V` for computed rows.
    pub fn relative_error(&self) -> Option<f64> {
        match self {
            Self::Computed { v, v_h, .. } => Some((v_h - v) / v),
            Self::Skipped { .. } => None,
        }
    }

    pub fn csv_record(&self) -> Vec<String> {
        match self {
            Self::Computed {
                name,
                nodes,
                links,
                mean_degree,
                threshold,
                v,
                v_h,
                v_sd,
                seeds,
            } => vec![
                name.clone(),
                nodes.to_string(),
                links.to_string(),
                mean_degree.to_string(),
                threshold.to_string(),
                v.to_string(),
                v_h.to_string(),
                percent((v_h - v) / v),
                v_sd.to_string(),
                seeds.to_string(),
            ],
            Self::Skipped { name, reason } => {
                let mut rec = vec![name.clone()];
                rec.extend(std::iter::repeat_n(String::new(), 6));
                rec.push(format!("skipped: {reason}"));
                rec.extend([String::new(), "0".to_owned()]);
                rec
            }
        }
    }
}

pub fn write_table2<W: Write>(rows: &[Table2Row], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = REPORT_CSV_HEADER.to_vec();
    header.extend(["V_sd", "seeds"]);
    w.write_record(&header)?;
    for row in rows {
        w.write_record(row.csv_record())?;
    }
    w.flush()?;
    Ok(())
}
