//! Fixed-pattern spectral quadrature for the planar solve path.
//!
//! Adaptive refinement certifies each value it returns, but the refinement
//! pattern itself shifts as the body moves, so values at two nearby
//! candidates can differ by certification-sized jumps. The planar solver
//! compares entropy differences far below that jump scale near convergence,
//! and a comparison poisoned by pattern jumps stalls the line search. This
//! engine uses a deterministic panel layout instead: exact splits where a
//! facet crosses the density's support sphere, radius-octave splits so no
//! panel sees the origin up close, and e-fold subdivision where the density
//! varies fast. Gauss-Legendre nodes on each panel then give near machine
//! accuracy that varies smoothly with both the candidate and the scale.

use std::sync::OnceLock;

use crate::density::GGParams;
use crate::error::{Error, Result};
use crate::geometry::PolytopeGeometry;
use crate::linalg::{dot, sum_compensated, Point};

const GL_ORDER: usize = 32;
/// Panels whose density varies by more than this many e-folds get split.
const EFOLDS_PER_PANEL: f64 = 6.0;
/// Beyond exp(-60) of the central density the cumulative is saturated for
/// b = 0; heavy algebraic tails (b < 0) never saturate and are integrated.
const SATURATION_EFOLDS: f64 = 60.0;

/// One active facet segment, parametrized x(t) = A + t(B−A), t ∈ [0,1],
/// with |x(t)|² = hg² + len²(t − tf)² (orthogonal split at the foot of the
/// perpendicular from the origin; stable near-origin evaluation).
struct Seg {
    idx: usize,
    h: f64,
    len: f64,
    tf: f64,
    hg: f64,
    hg2: f64,
    r_lo: f64,
    r_hi: f64,
}

impl Seg {
    fn r(&self, t: f64) -> f64 {
        let d = self.len * (t - self.tf);
        (self.hg2 + d * d).sqrt()
    }

    /// ∫ dt / |x(t)|² over [ta, tb], in closed form.
    fn inv_r2_integral(&self, ta: f64, tb: f64) -> f64 {
        let at = |t: f64| (self.len * (t - self.tf) / self.hg).atan();
        (at(tb) - at(ta)) / (self.len * self.hg)
    }
}

#[derive(Clone, Copy)]
enum PanelKind {
    /// Gauss-Legendre with this many uniform subpanels.
    Gl(usize),
    /// The cumulative is saturated here: closed-form angle contribution.
    Saturated,
}

pub(crate) struct PlanarBody<'a> {
    params: &'a GGParams,
    f_total: f64,
    sigma: f64,
    even_m: bool,
    /// Support radius for b > 0.
    rho: Option<f64>,
    /// Saturation radius for b = 0 (algebraic tails never saturate).
    u_far: Option<f64>,
    count: usize,
    segs: Vec<Seg>,
    /// Multiplies every subdivision count; exposed for convergence tests.
    pub(crate) refine: usize,
}

impl<'a> PlanarBody<'a> {
    pub(crate) fn new(p: &PolytopeGeometry, params: &'a GGParams) -> Result<Self> {
        if p.n() != 2 {
            return Err(Error::ArgDomain(
                "planar quadrature engine needs a 2-dimensional body".into(),
            ));
        }
        let mut segs = Vec::new();
        for (i, f) in p.facets.iter().enumerate() {
            if !p.active[i] || f.vertices.len() != 2 {
                continue;
            }
            let a = f.vertices[0];
            let b = f.vertices[1];
            let d = [b[0] - a[0], b[1] - a[1], 0.0];
            let len2 = dot(&d, &d);
            if !(len2 > 0.0) {
                continue;
            }
            let len = len2.sqrt();
            let tf = -dot(&a, &d) / len2;
            let xf: Point = [a[0] + tf * d[0], a[1] + tf * d[1], 0.0];
            let hg2 = dot(&xf, &xf);
            let r0 = dot(&a, &a).sqrt();
            let r1 = dot(&b, &b).sqrt();
            let hg = hg2.sqrt();
            let r_lo = if tf > 0.0 && tf < 1.0 { hg } else { r0.min(r1) };
            segs.push(Seg {
                idx: i,
                h: p.effective_h[i],
                len,
                tf,
                hg,
                hg2,
                r_lo,
                r_hi: r0.max(r1),
            });
        }
        let m = params.m;
        let rho = (params.b > 0.0).then(|| params.support_radius());
        let u_far = (params.b == 0.0).then(|| (SATURATION_EFOLDS * m).powf(1.0 / m));
        Ok(PlanarBody {
            params,
            f_total: params.radial_total(),
            sigma: m.powf(1.0 / m),
            even_m: (m / 2.0).fract() == 0.0,
            rho,
            u_far,
            count: p.facets.len(),
            segs,
            refine: 1,
        })
    }

    /// Panel layout for one segment of the body scaled by s. Breakpoints in
    /// t where s|x(t)| crosses the octave ladder, the (graded) support
    /// boundary, or the saturation radius.
    fn layout(&self, seg: &Seg, s: f64, panels: &mut Vec<(f64, f64, PanelKind)>) {
        panels.clear();
        let u_lo = (s * seg.r_lo).max(f64::MIN_POSITIVE);
        let u_hi = s * seg.r_hi;
        let saturation = self.rho.or(self.u_far).unwrap_or(f64::INFINITY);

        let mut cuts: Vec<f64> = Vec::with_capacity(16);
        let ladder_top = u_hi.min(saturation);
        let mut k = ((u_lo / self.sigma).log2().floor() as i64 + 1).max(if self.even_m {
            -5
        } else {
            -100
        });
        let k_end = ((ladder_top / self.sigma).log2().floor() as i64).min(120);
        while k <= k_end {
            let c = self.sigma * (k as f64).exp2();
            if c > u_lo && c < u_hi {
                cuts.push(c);
            }
            k += 1;
        }
        if let Some(rho) = self.rho {
            // Graded approach: the density is only finitely smooth at the
            // support boundary, so panels shrink geometrically toward it.
            for j in 1..=5 {
                cuts.push(rho * (1.0 - 0.25f64.powi(j)));
            }
            cuts.push(rho);
        } else if let Some(u_far) = self.u_far {
            cuts.push(u_far);
        }

        let mut ts: Vec<f64> = Vec::with_capacity(2 * cuts.len() + 2);
        ts.push(0.0);
        for &c in &cuts {
            if c <= u_lo || c >= u_hi {
                continue;
            }
            let rc = c / s;
            let w = rc * rc - seg.hg2;
            if w <= 0.0 {
                continue;
            }
            let dt = w.sqrt() / seg.len;
            for t in [seg.tf - dt, seg.tf + dt] {
                if t > 1e-12 && t < 1.0 - 1e-12 {
                    ts.push(t);
                }
            }
        }
        ts.push(1.0);
        ts.sort_by(f64::total_cmp);

        for pair in ts.windows(2) {
            let (ta, tb) = (pair[0], pair[1]);
            if tb - ta <= 1e-13 {
                continue;
            }
            let um = s * seg.r(0.5 * (ta + tb));
            if um >= saturation {
                panels.push((ta, tb, PanelKind::Saturated));
                continue;
            }
            let mut gmax = self
                .params
                .density_at_radius(s * seg.r(ta))
                .max(self.params.density_at_radius(s * seg.r(tb)));
            let mut gmin = self
                .params
                .density_at_radius(s * seg.r(ta))
                .min(self.params.density_at_radius(s * seg.r(tb)));
            if seg.tf > ta && seg.tf < tb {
                let gf = self.params.density_at_radius(s * seg.hg);
                gmax = gmax.max(gf);
                gmin = gmin.min(gf);
            }
            let subs = if gmin > 0.0 && gmax.is_finite() {
                ((gmax / gmin).ln() / EFOLDS_PER_PANEL).ceil().max(1.0) as usize
            } else {
                // A support-boundary endpoint; the graded ladder already
                // made this panel narrow.
                4
            };
            panels.push((ta, tb, PanelKind::Gl((subs * self.refine).min(64))));
        }
    }

    fn facet_sum(&self, seg: &Seg, s: f64, f: &dyn Fn(f64) -> f64) -> (f64, f64) {
        let (xs, ws) = gl_rule();
        let mut panels = Vec::new();
        self.layout(seg, s, &mut panels);
        let mut gl = 0.0;
        let mut sat = 0.0;
        for &(ta, tb, kind) in &panels {
            match kind {
                PanelKind::Saturated => sat += seg.inv_r2_integral(ta, tb),
                PanelKind::Gl(subs) => {
                    let step = (tb - ta) / subs as f64;
                    for j in 0..subs {
                        let a = ta + step * j as f64;
                        let mid = a + 0.5 * step;
                        let hw = 0.5 * step;
                        let mut acc = 0.0;
                        for (x, w) in xs.iter().zip(ws) {
                            acc += w * f(mid + hw * x);
                        }
                        gl += hw * acc;
                    }
                }
            }
        }
        (gl, sat)
    }

    /// γ(s·K): the density mass of the scaled body.
    pub(crate) fn gamma(&self, s: f64) -> f64 {
        debug_assert!(s > 0.0);
        let parts = self.segs.iter().map(|seg| {
            let f = |t: f64| {
                let r = seg.r(t);
                self.params
                    .radial_cumulative(s * r)
                    .expect("radius is nonnegative")
                    / (r * r)
            };
            let (gl, sat) = self.facet_sum(seg, s, &f);
            self.params.q * seg.h * seg.len * (gl + self.f_total * sat)
        });
        sum_compensated(parts).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
    }

    /// Cone measure of s·K per direction (zeros on inactive directions),
    /// with its total.
    pub(crate) fn gmeasure(&self, s: f64) -> (Vec<f64>, f64) {
        debug_assert!(s > 0.0);
        let mut out = vec![0.0; self.count];
        for seg in &self.segs {
            let f = |t: f64| self.params.density_at_radius(s * seg.r(t));
            let (gl, _) = self.facet_sum(seg, s, &f);
            out[seg.idx] = s * s * seg.h * seg.len * gl;
        }
        let total = sum_compensated(out.iter().copied());
        (out, total)
    }
}

fn gl_rule() -> &'static ([f64; GL_ORDER], [f64; GL_ORDER]) {
    static RULE: OnceLock<([f64; GL_ORDER], [f64; GL_ORDER])> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GL_ORDER;
        let mut xs = [0.0; GL_ORDER];
        let mut ws = [0.0; GL_ORDER];
        for i in 0..n {
            // Newton from the Chebyshev-like initial guess.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..60 {
                let (p, dp) = legendre(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre(n, x);
            xs[i] = x;
            ws[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (xs, ws)
    })
}

/// (P_n(x), P'_n(x)) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let pk = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = pk;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}
