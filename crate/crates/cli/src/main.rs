//! Command-line front end.
//!
//! Exit codes: 0 success (solve converged / checks passed), 1 input or
//! precondition error, 2 solve did not converge (report still written),
//! 3 verification or oracle mismatch.

mod files;
mod plot;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use minklog_core::geometry::wulff_shape;
use minklog_core::linalg::{norm, Point};
use minklog_core::{
    entropy_bound_check, euler_lagrange_residual, gg_cone_measure, gg_surface_measure, gg_volume,
    hemisphere_check, lp_surface_measure, mc_surface_oracle, mc_volume_oracle, radii, solve,
    DirectionSet, DiscreteMeasure, GGParams, McSpec, QuadratureSpec, SolveConfig, SolveStatus,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use files::{read_toml, write_toml, BodyFile, ComputeFile, MeasureFile, ReportFile};

#[derive(Parser)]
#[command(
    name = "minklog",
    version,
    about = "Generalized Gaussian measures of polytopes and the discrete log-Minkowski solver"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct ParamArgs {
    /// Density shape parameter b (b = 0 is the exponential family).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    b: f64,
    /// Density tail exponent m > 0.
    #[arg(long, default_value_t = 2.0)]
    m: f64,
}

#[derive(Args)]
struct SolveArgs {
    /// Measure file (TOML: n, directions, weights).
    measure: PathBuf,
    #[command(flatten)]
    params: ParamArgs,
    /// Target volume fraction, in (3/4, 1) unless --allow-small-kappa.
    #[arg(long)]
    kappa0: Option<f64>,
    /// Optimality residual target (default 1e-8 planar, 1e-5 spatial).
    #[arg(long)]
    el_tol: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    /// Recorded in the report; the solve itself draws no randomness.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report path (default: alongside the measure file).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Expert override: accept kappa0 anywhere in (0, 1) and disable the
    /// minimum-support abort.
    #[arg(long)]
    allow_small_kappa: bool,
}

#[derive(Args)]
struct ComputeArgs {
    /// Body file (TOML: n, directions, h).
    body: PathBuf,
    #[command(flatten)]
    params: ParamArgs,
    /// Also emit the p-surface measure for this exponent (p = 0 rejected).
    #[arg(long, allow_hyphen_values = true)]
    p: Option<f64>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    /// Body file (TOML: n, directions, h).
    body: PathBuf,
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fault-injection hook: scales the quadrature values before comparison.
    #[arg(long, hide = true, default_value_t = 0.0, allow_hyphen_values = true)]
    bias_quad: f64,
}

#[derive(Args)]
struct GenArgs {
    /// Ambient dimension (2 or 3).
    n: usize,
    /// Number of directions (at least n+1).
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Cmd {
    /// Find the polytope whose normalized cone measure matches a measure file.
    Solve(SolveArgs),
    /// Evaluate volume, surface and cone measures of a given body.
    Compute(ComputeArgs),
    /// Recompute a report's quantities from its stored solution and compare.
    Verify {
        /// Report file produced by solve.
        report: PathBuf,
    },
    /// Cross-check quadrature against Monte Carlo on a given body.
    Oracle(OracleArgs),
    /// Render a planar report (polygon, measure shares, trace) as SVG.
    Plot {
        /// Report file produced by solve (n = 2 only).
        report: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a random measure that passes the hemisphere check.
    GenMeasure(GenArgs),
}

fn main() -> ExitCode {
    if let Ok(v) = std::env::var("MINKLOG_THREADS") {
        match v.parse::<usize>() {
            Ok(k) if k >= 1 => {
                minklog_core::exec::set_thread_cap(k);
            }
            _ => {
                eprintln!("error: MINKLOG_THREADS must be a positive integer, got '{v}'");
                return ExitCode::from(1);
            }
        }
    }
    let cli = Cli::parse();
    let outcome = match cli.cmd {
        Cmd::Solve(a) => cmd_solve(&a),
        Cmd::Compute(a) => cmd_compute(&a),
        Cmd::Verify { report } => cmd_verify(&report),
        Cmd::Oracle(a) => cmd_oracle(&a),
        Cmd::Plot { report, out } => cmd_plot(&report, &out),
        Cmd::GenMeasure(a) => cmd_gen_measure(&a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn cmd_solve(a: &SolveArgs) -> Result<u8, String> {
    let mf: MeasureFile = read_toml(&a.measure)?;
    let mu = mf.to_measure()?;
    let n = mu.dirs.n;
    let params = GGParams::new(a.params.b, a.params.m, n).map_err(|e| e.to_string())?;

    let mut cfg = SolveConfig::default_for(n);
    if let Some(k) = a.kappa0 {
        cfg.kappa0 = k;
    }
    if let Some(t) = a.el_tol {
        cfg.el_tol = t;
    }
    if let Some(it) = a.max_iters {
        cfg.max_iters = it;
    }
    cfg.allow_small_kappa = a.allow_small_kappa;

    let report = solve(&mu, &params, &cfg).map_err(|e| e.to_string())?;
    let body = wulff_shape(&report.h_star).map_err(|e| e.to_string())?;
    let out = a
        .out
        .clone()
        .unwrap_or_else(|| a.measure.with_extension("report.toml"));
    let file = ReportFile::build(
        &mu,
        &report,
        &body.vertices,
        a.params.b,
        a.params.m,
        cfg.kappa0,
        cfg.el_tol,
        a.seed,
    );
    write_toml(&out, &file)?;
    println!(
        "{}: gamma = {}, el_residual = {}, iterations = {}, report = {}",
        files::status_str(report.status),
        report.gamma,
        report.el_residual,
        report.iterations,
        out.display()
    );
    Ok(if report.status == SolveStatus::Converged {
        0
    } else {
        2
    })
}

fn cmd_compute(a: &ComputeArgs) -> Result<u8, String> {
    let bf: BodyFile = read_toml(&a.body)?;
    let sv = bf.to_support()?;
    let n = sv.dirs.n;
    let params = GGParams::new(a.params.b, a.params.m, n).map_err(|e| e.to_string())?;
    let quad = QuadratureSpec::default_for(n);
    let p = wulff_shape(&sv).map_err(|e| e.to_string())?;
    let gamma = gg_volume(&p, &params, &quad).map_err(|e| e.to_string())?;
    let surface = gg_surface_measure(&p, &params, &quad).map_err(|e| e.to_string())?;
    let cone = gg_cone_measure(&p, &params, &quad).map_err(|e| e.to_string())?;
    let surface_p = match a.p {
        Some(pe) => Some(
            lp_surface_measure(&p, &params, pe, &quad)
                .map_err(|e| e.to_string())?
                .values,
        ),
        None => None,
    };
    let (r_min, r_max) = radii(&p);
    let out = ComputeFile {
        version: env!("CARGO_PKG_VERSION").to_string(),
        n,
        b: a.params.b,
        m: a.params.m,
        directions: bf.directions.clone(),
        h: sv.h.clone(),
        effective_h: p.effective_h.clone(),
        r_min,
        r_max,
        gamma,
        surface: surface.values,
        cone: cone.values,
        p: a.p,
        surface_p,
    };
    match &a.out {
        Some(path) => write_toml(path, &out)?,
        None => print!(
            "{}",
            toml::to_string(&out).map_err(|e| format!("cannot serialize: {e}"))?
        ),
    }
    Ok(0)
}

fn cmd_verify(path: &Path) -> Result<u8, String> {
    let rf: ReportFile = read_toml(path)?;
    let mu = rf.measure()?;
    let sv = rf.solution()?;
    let n = sv.dirs.n;
    let params = GGParams::new(rf.b, rf.m, n).map_err(|e| e.to_string())?;
    let quad = SolveConfig::default_for(n).quad;

    let p = wulff_shape(&sv).map_err(|e| e.to_string())?;
    let gamma = gg_volume(&p, &params, &quad).map_err(|e| e.to_string())?;
    let cone = gg_cone_measure(&p, &params, &quad).map_err(|e| e.to_string())?;
    let surface = gg_surface_measure(&p, &params, &quad).map_err(|e| e.to_string())?;
    let residual = euler_lagrange_residual(&sv, &mu, &params, &quad).map_err(|e| e.to_string())?;
    let bound = entropy_bound_check(&sv, &mu).map_err(|e| e.to_string())?;

    let tol = 1e-8;
    let close = |a: f64, b: f64| (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0);
    let mut bad: Vec<String> = Vec::new();
    if !close(gamma, rf.gamma) {
        bad.push(format!("gamma: stored {}, recomputed {}", rf.gamma, gamma));
    }
    for (i, (re, st)) in cone.values.iter().zip(&rf.cone).enumerate() {
        if !close(*re, *st) {
            bad.push(format!("cone[{i}]: stored {st}, recomputed {re}"));
        }
    }
    for (i, (re, st)) in surface.values.iter().zip(&rf.surface).enumerate() {
        if !close(*re, *st) {
            bad.push(format!("surface[{i}]: stored {st}, recomputed {re}"));
        }
    }
    if !close(residual, rf.el_residual) {
        bad.push(format!(
            "el_residual: stored {}, recomputed {}",
            rf.el_residual, residual
        ));
    }
    if residual > rf.el_tol {
        bad.push(format!(
            "el_residual {residual} exceeds the stored tolerance {}",
            rf.el_tol
        ));
    }
    if !bound.holds {
        bad.push(format!(
            "entropy bound violated: lhs {} < rhs {}",
            bound.lhs, bound.rhs
        ));
    }
    if !close(bound.lhs, rf.entropy_bound.lhs) || !close(bound.rhs, rf.entropy_bound.rhs) {
        bad.push(format!(
            "entropy bound drifted: stored ({}, {}), recomputed ({}, {})",
            rf.entropy_bound.lhs, rf.entropy_bound.rhs, bound.lhs, bound.rhs
        ));
    }

    if bad.is_empty() {
        println!(
            "verified: gamma, cone, surface, el_residual and the entropy bound all \
             reproduce to {tol:e} and residual {residual} <= el_tol {}",
            rf.el_tol
        );
        Ok(0)
    } else {
        for line in &bad {
            eprintln!("mismatch: {line}");
        }
        Ok(3)
    }
}

fn cmd_oracle(a: &OracleArgs) -> Result<u8, String> {
    let bf: BodyFile = read_toml(&a.body)?;
    let sv = bf.to_support()?;
    let n = sv.dirs.n;
    let params = GGParams::new(a.params.b, a.params.m, n).map_err(|e| e.to_string())?;
    let quad = QuadratureSpec::default_for(n);
    let p = wulff_shape(&sv).map_err(|e| e.to_string())?;
    let fudge = 1.0 + a.bias_quad;

    let mut worst: f64 = 0.0;
    let gamma = gg_volume(&p, &params, &quad).map_err(|e| e.to_string())? * fudge;
    let mc = McSpec::new(a.samples, a.seed, 8).map_err(|e| e.to_string())?;
    let (est, se) = mc_volume_oracle(&p, &params, &mc).map_err(|e| e.to_string())?;
    let z = (gamma - est) / se.max(f64::MIN_POSITIVE);
    worst = worst.max(z.abs());
    println!("gamma: quadrature {gamma}, mc {est} +- {se}, z = {z:.3}");

    let surface = gg_surface_measure(&p, &params, &quad).map_err(|e| e.to_string())?;
    for i in 0..sv.dirs.len() {
        if !p.active[i] {
            continue;
        }
        let want = surface.values[i] * fudge;
        let mc =
            McSpec::new(a.samples / 4, a.seed ^ (i as u64 + 1), 8).map_err(|e| e.to_string())?;
        let (est, se) = mc_surface_oracle(&p, &params, i, &mc).map_err(|e| e.to_string())?;
        let z = (want - est) / se.max(f64::MIN_POSITIVE);
        worst = worst.max(z.abs());
        println!("surface[{i}]: quadrature {want}, mc {est} +- {se}, z = {z:.3}");
    }
    if worst <= 4.0 {
        println!("oracle: all z-scores within 4");
        Ok(0)
    } else {
        eprintln!("oracle: worst |z| = {worst:.3} exceeds 4");
        Ok(3)
    }
}

fn cmd_plot(report: &Path, out: &Path) -> Result<u8, String> {
    let rf: ReportFile = read_toml(report)?;
    let svg = plot::render(&rf)?;
    std::fs::write(out, svg).map_err(|e| format!("cannot write {}: {e}", out.display()))?;
    println!("wrote {}", out.display());
    Ok(0)
}

fn cmd_gen_measure(a: &GenArgs) -> Result<u8, String> {
    if a.n != 2 && a.n != 3 {
        return Err(format!("n must be 2 or 3, got {}", a.n));
    }
    if a.count < a.n + 1 {
        return Err(format!(
            "count must be at least n + 1 = {}, got {}",
            a.n + 1,
            a.count
        ));
    }
    let mut rg = ChaCha8Rng::seed_from_u64(a.seed);
    let mu = loop {
        let mut dirs: Vec<Point> = Vec::with_capacity(a.count);
        for _ in 0..a.count {
            dirs.push(random_unit(&mut rg, a.n));
        }
        let Ok(set) = DirectionSet::new(a.n, dirs) else {
            continue;
        };
        let weights: Vec<f64> = (0..a.count)
            .map(|_| 0.5 + 1.5 * rg.random::<f64>())
            .collect();
        let Ok(mu) = DiscreteMeasure::new(set, weights) else {
            continue;
        };
        if hemisphere_check(&mu) {
            break mu;
        }
    };
    let file = MeasureFile::from_measure(
        &mu,
        Some(format!("random-{}d-{}-seed{}", a.n, a.count, a.seed)),
    );
    write_toml(&a.out, &file)?;
    println!("wrote {}", a.out.display());
    Ok(0)
}

fn random_unit(rg: &mut ChaCha8Rng, n: usize) -> Point {
    if n == 2 {
        let t = std::f64::consts::TAU * rg.random::<f64>();
        [t.cos(), t.sin(), 0.0]
    } else {
        let z: f64 = 2.0 * rg.random::<f64>() - 1.0;
        let t = std::f64::consts::TAU * rg.random::<f64>();
        let r = (1.0 - z * z).max(0.0).sqrt();
        let p = [r * t.cos(), r * t.sin(), z];
        let len = norm(&p);
        [p[0] / len, p[1] / len, p[2] / len]
    }
}
