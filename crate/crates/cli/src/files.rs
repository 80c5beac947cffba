//! On-disk formats. Everything is TOML with explicit field names; floats are
//! written in shortest round-trip form so a report can be re-read and checked
//! bit for bit.

use minklog_core::linalg::{norm, Point};
use minklog_core::{
    DirectionSet, DiscreteMeasure, EntropyBoundAudit, SolveReport, SolveStatus, SupportVector,
    TraceRow,
};
use serde::{Deserialize, Serialize};

/// Input measure: directions on the sphere with positive weights.
#[derive(Debug, Serialize, Deserialize)]
pub struct MeasureFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub n: usize,
    pub directions: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

/// Input body: support numbers over a direction set.
#[derive(Debug, Serialize, Deserialize)]
pub struct BodyFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub n: usize,
    pub directions: Vec<Vec<f64>>,
    pub h: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct EntropyBoundFile {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Solve output. Self-contained: embeds the input measure so verification
/// never re-reads the measure file. The trace rows are
/// (entropy, gamma, residual, step, min_h, r_max) per accepted iterate.
#[derive(Debug, Serialize, Deserialize)]
pub struct ReportFile {
    pub version: String,
    pub n: usize,
    pub b: f64,
    pub m: f64,
    pub kappa0: f64,
    pub el_tol: f64,
    pub seed: u64,
    pub status: String,
    pub directions: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub h_star: Vec<f64>,
    pub vertices: Vec<Vec<f64>>,
    pub surface: Vec<f64>,
    pub cone: Vec<f64>,
    pub gamma: f64,
    pub entropy: f64,
    pub el_residual: f64,
    pub trace: Vec<(f64, f64, f64, f64, f64, f64)>,
    pub entropy_bound: EntropyBoundFile,
}

/// Compute output: the measures of one body at one parameter set.
#[derive(Debug, Serialize, Deserialize)]
pub struct ComputeFile {
    pub version: String,
    pub n: usize,
    pub b: f64,
    pub m: f64,
    pub directions: Vec<Vec<f64>>,
    pub h: Vec<f64>,
    pub effective_h: Vec<f64>,
    pub r_min: f64,
    pub r_max: f64,
    pub gamma: f64,
    pub surface: Vec<f64>,
    pub cone: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub surface_p: Option<Vec<f64>>,
}

pub fn status_str(s: SolveStatus) -> &'static str {
    match s {
        SolveStatus::Converged => "converged",
        SolveStatus::MaxIters => "max_iters",
        SolveStatus::LineSearchStalled => "line_search_stalled",
    }
}

fn trim(n: usize, x: &Point) -> Vec<f64> {
    x[..n].to_vec()
}

pub fn points_out(n: usize, pts: &[Point]) -> Vec<Vec<f64>> {
    pts.iter().map(|x| trim(n, x)).collect()
}

/// Lift file vectors to internal points, normalizing and warning (stderr)
/// when a direction is off the sphere by more than 1e-6.
pub fn directions_in(n: usize, raw: &[Vec<f64>], label: &str) -> Result<DirectionSet, String> {
    if n != 2 && n != 3 {
        return Err(format!("{label}: n must be 2 or 3, got {n}"));
    }
    let mut dirs: Vec<Point> = Vec::with_capacity(raw.len());
    for (i, v) in raw.iter().enumerate() {
        if v.len() != n {
            return Err(format!(
                "{label}: direction {i} has {} components, expected {n}",
                v.len()
            ));
        }
        let mut p: Point = [0.0; 3];
        p[..n].copy_from_slice(v);
        let len = norm(&p);
        if !(len.is_finite() && len > 0.0) {
            return Err(format!("{label}: direction {i} has length {len}"));
        }
        if (len - 1.0).abs() > 1e-6 {
            eprintln!("warning: {label}: direction {i} has length {len}, normalizing");
        }
        for c in &mut p {
            *c /= len;
        }
        dirs.push(p);
    }
    DirectionSet::new(n, dirs).map_err(|e| format!("{label}: {e}"))
}

impl MeasureFile {
    pub fn to_measure(&self) -> Result<DiscreteMeasure, String> {
        let dirs = directions_in(self.n, &self.directions, "measure")?;
        if self.weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err("measure: weights must all be positive and finite".into());
        }
        DiscreteMeasure::new(dirs, self.weights.clone()).map_err(|e| format!("measure: {e}"))
    }

    pub fn from_measure(mu: &DiscreteMeasure, name: Option<String>) -> Self {
        MeasureFile {
            name,
            n: mu.dirs.n,
            directions: points_out(mu.dirs.n, &mu.dirs.iter().copied().collect::<Vec<_>>()),
            weights: mu.weights.clone(),
        }
    }
}

impl BodyFile {
    pub fn to_support(&self) -> Result<SupportVector, String> {
        let dirs = directions_in(self.n, &self.directions, "body")?;
        SupportVector::new(dirs, self.h.clone()).map_err(|e| format!("body: {e}"))
    }
}

impl ReportFile {
    #[allow(clippy::too_many_arguments)]
    pub fn build(
        mu: &DiscreteMeasure,
        report: &SolveReport,
        vertices: &[Point],
        b: f64,
        m: f64,
        kappa0: f64,
        el_tol: f64,
        seed: u64,
    ) -> Self {
        let n = mu.dirs.n;
        ReportFile {
            version: env!("CARGO_PKG_VERSION").to_string(),
            n,
            b,
            m,
            kappa0,
            el_tol,
            seed,
            status: status_str(report.status).to_string(),
            directions: points_out(n, &mu.dirs.iter().copied().collect::<Vec<_>>()),
            weights: mu.weights.clone(),
            h_star: report.h_star.h.clone(),
            vertices: points_out(n, vertices),
            surface: report.surface.values.clone(),
            cone: report.cone.values.clone(),
            gamma: report.gamma,
            entropy: report.entropy,
            el_residual: report.el_residual,
            trace: report
                .trace
                .iter()
                .map(|r: &TraceRow| (r.entropy, r.gamma, r.residual, r.step, r.min_h, r.r_max))
                .collect(),
            entropy_bound: EntropyBoundFile {
                lhs: report.entropy_bound.lhs,
                rhs: report.entropy_bound.rhs,
                holds: report.entropy_bound.holds,
            },
        }
    }

    pub fn measure(&self) -> Result<DiscreteMeasure, String> {
        let dirs = directions_in(self.n, &self.directions, "report")?;
        DiscreteMeasure::new(dirs, self.weights.clone()).map_err(|e| format!("report: {e}"))
    }

    pub fn solution(&self) -> Result<SupportVector, String> {
        let dirs = directions_in(self.n, &self.directions, "report")?;
        SupportVector::new(dirs, self.h_star.clone()).map_err(|e| format!("report: {e}"))
    }
}

impl From<EntropyBoundAudit> for EntropyBoundFile {
    fn from(a: EntropyBoundAudit) -> Self {
        EntropyBoundFile {
            lhs: a.lhs,
            rhs: a.rhs,
            holds: a.holds,
        }
    }
}

pub fn read_toml<T: for<'de> Deserialize<'de>>(path: &std::path::Path) -> Result<T, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    toml::from_str(&text).map_err(|e| format!("cannot parse {}: {e}", path.display()))
}

pub fn write_toml<T: Serialize>(path: &std::path::Path, value: &T) -> Result<(), String> {
    let text = toml::to_string(value).map_err(|e| format!("cannot serialize: {e}"))?;
    std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}
