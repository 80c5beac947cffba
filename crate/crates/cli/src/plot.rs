//! SVG rendering of a planar solve report: the solution polygon, the target
//! and achieved cone-measure shares drawn as rays along each direction, and
//! the residual trace.

use crate::files::ReportFile;
use std::fmt::Write;

const W: f64 = 920.0;
const H: f64 = 480.0;
const PANE: f64 = 420.0;

fn fmt(x: f64) -> String {
    format!("{:.3}", x)
}

fn polyline(pts: &[(f64, f64)], style: &str) -> String {
    let mut s = String::from("<polyline points=\"");
    for (x, y) in pts {
        let _ = write!(s, "{},{} ", fmt(*x), fmt(*y));
    }
    let _ = write!(s, "\" {style}/>");
    s
}

/// Render the polygon pane and the trace pane side by side. Fails on
/// three-dimensional reports: there is nothing honest to draw in the plane.
pub fn render(report: &ReportFile) -> Result<String, String> {
    if report.n != 2 {
        return Err(format!(
            "plot supports planar reports only (n = 2), got n = {}",
            report.n
        ));
    }
    if report.vertices.is_empty() || report.trace.is_empty() {
        return Err("report carries no vertices or no trace".into());
    }

    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
         viewBox=\"0 0 {W} {H}\" font-family=\"sans-serif\" font-size=\"12\">\n\
         <rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n"
    );

    // Left pane: polygon and the two ray families, in body coordinates.
    let rad = report
        .vertices
        .iter()
        .map(|v| (v[0] * v[0] + v[1] * v[1]).sqrt())
        .fold(0.0, f64::max);
    let scale = (PANE / 2.0 - 20.0) / rad;
    let (cx, cy) = (30.0 + PANE / 2.0, 30.0 + PANE / 2.0);
    let to = |x: f64, y: f64| (cx + scale * x, cy - scale * y);

    let mut ring: Vec<(f64, f64)> = report.vertices.iter().map(|v| (v[0], v[1])).collect();
    ring.sort_by(|a, b| {
        a.1.atan2(a.0)
            .partial_cmp(&b.1.atan2(b.0))
            .expect("finite vertices")
    });
    let mut outline: Vec<(f64, f64)> = ring.iter().map(|&(x, y)| to(x, y)).collect();
    if let Some(first) = outline.first().copied() {
        outline.push(first);
    }
    svg.push_str(&polyline(
        &outline,
        "fill=\"#eef4fb\" stroke=\"#1f4e8c\" stroke-width=\"1.5\"",
    ));
    svg.push('\n');

    let cm: f64 = report.weights.iter().sum();
    let gt: f64 = report.cone.iter().sum();
    let ray_r = rad * 0.95;
    let share_max = report
        .weights
        .iter()
        .map(|w| w / cm)
        .fold(0.0f64, f64::max)
        .max(report.cone.iter().map(|g| g / gt).fold(0.0, f64::max));
    for (i, u) in report.directions.iter().enumerate() {
        let want = report.weights[i] / cm / share_max * ray_r;
        let got = report.cone[i] / gt / share_max * ray_r;
        let a = to(0.0, 0.0);
        let bw = to(u[0] * want, u[1] * want);
        let bg = to(u[0] * got, u[1] * got);
        let _ = write!(
            svg,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#c85a19\" stroke-width=\"4\" opacity=\"0.45\"/>\n\
             <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#19733c\" stroke-width=\"1.5\"/>\n",
            fmt(a.0), fmt(a.1), fmt(bw.0), fmt(bw.1),
            fmt(a.0), fmt(a.1), fmt(bg.0), fmt(bg.1),
        );
    }
    let _ = writeln!(
        svg,
        "<text x=\"30\" y=\"20\">solution polygon; rays: target share (wide), achieved share (thin)</text>"
    );

    // Right pane: log10 residual per accepted iterate.
    let x0 = 60.0 + PANE;
    let plot_w = W - x0 - 30.0;
    let (y0, plot_h) = (60.0, H - 120.0);
    let logs: Vec<f64> = report
        .trace
        .iter()
        .map(|row| row.2.max(1e-300).log10())
        .collect();
    let (lo, hi) = logs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    let span = (hi - lo).max(1e-9);
    let n_it = logs.len().max(2) as f64;
    let pts: Vec<(f64, f64)> = logs
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            (
                x0 + plot_w * i as f64 / (n_it - 1.0),
                y0 + plot_h * (hi - v) / span,
            )
        })
        .collect();
    let _ = writeln!(
        svg,
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#999\"/>",
        fmt(x0),
        fmt(y0),
        fmt(plot_w),
        fmt(plot_h)
    );
    svg.push_str(&polyline(
        &pts,
        "fill=\"none\" stroke=\"#1f4e8c\" stroke-width=\"1.5\"",
    ));
    let _ = write!(
        svg,
        "\n<text x=\"{}\" y=\"20\">optimality residual, log10, per accepted iterate</text>\n\
         <text x=\"{}\" y=\"{}\">{}</text>\n\
         <text x=\"{}\" y=\"{}\">{}</text>\n\
         <text x=\"{}\" y=\"{}\">iterations: {}; status: {}</text>\n",
        fmt(x0),
        fmt(x0 - 28.0),
        fmt(y0 + 12.0),
        fmt(hi),
        fmt(x0 - 28.0),
        fmt(y0 + plot_h),
        fmt(lo),
        fmt(x0),
        fmt(y0 + plot_h + 30.0),
        report.trace.len() - 1,
        report.status,
    );
    svg.push_str("</svg>\n");
    Ok(svg)
}
