//! Planar Wulff shapes by direct 1-D clipping of each constraint line.

use super::{dedupe_points, effective_from_vertices, Facet, PolytopeGeometry, SupportVector};
use crate::error::Result;
use crate::linalg::{add, dot, scale, Point};

// Dot products below this magnitude are treated as parallel.
const PARALLEL_TOL: f64 = 1e-14;

/// A unit v with u·v ≥ 0 for all directions, if the set is concentrated in a
/// closed half-plane. Exact cyclic angular-gap sweep: concentrated iff some
/// open gap between consecutive direction angles reaches π.
pub(super) fn concentration_witness_2d(dirs: &[Point]) -> Option<Point> {
    let mut angles: Vec<f64> = dirs.iter().map(|u| u[1].atan2(u[0])).collect();
    angles.sort_by(|a, b| a.total_cmp(b));
    let k = angles.len();
    let tau = 2.0 * std::f64::consts::PI;
    let mut gap_start = 0.0;
    let mut gap = f64::NEG_INFINITY;
    for i in 0..k {
        let next = if i + 1 == k {
            angles[0] + tau
        } else {
            angles[i + 1]
        };
        let g = next - angles[i];
        if g > gap {
            gap = g;
            gap_start = angles[i];
        }
    }
    if gap >= std::f64::consts::PI - 1e-12 {
        // All directions sit in the complementary arc; aim at its center.
        let mid = gap_start + std::f64::consts::PI + gap / 2.0;
        Some([mid.cos(), mid.sin(), 0.0])
    } else {
        None
    }
}

/// Intersection of half-planes {x·u_i ≤ h_i}, one clipped segment per
/// constraint. Caller has already verified the directions positively span,
/// so every constraint line meets bounding constraints on both sides.
pub(super) fn wulff_2d(sv: &SupportVector) -> Result<PolytopeGeometry> {
    let dirs = &sv.dirs;
    let k = dirs.len();
    let h_scale = sv.h.iter().copied().fold(0.0f64, f64::max);
    let active_tol = 1e-9 * (1.0 + h_scale);

    let mut facets = Vec::with_capacity(k);
    let mut active = vec![false; k];
    let mut raw_vertices: Vec<Point> = Vec::new();

    // `i` is the direction index, not just a position; keep the explicit loop.
    #[allow(clippy::needless_range_loop)]
    for i in 0..k {
        let u = dirs.dir(i);
        let w = [-u[1], u[0], 0.0]; // CCW tangent of the boundary line
        let p0 = scale(u, sv.h[i]);
        let mut t_lo = f64::NEG_INFINITY;
        let mut t_hi = f64::INFINITY;
        let mut feasible = true;
        for j in 0..k {
            if j == i {
                continue;
            }
            let alpha = dot(&w, dirs.dir(j));
            let c = sv.h[j] - sv.h[i] * dot(u, dirs.dir(j));
            if alpha > PARALLEL_TOL {
                t_hi = t_hi.min(c / alpha);
            } else if alpha < -PARALLEL_TOL {
                t_lo = t_lo.max(c / alpha);
            } else if c < 0.0 {
                feasible = false;
                break;
            }
        }
        if feasible && t_hi - t_lo > active_tol {
            let a = add(&p0, &scale(&w, t_lo));
            let b = add(&p0, &scale(&w, t_hi));
            raw_vertices.push(a);
            raw_vertices.push(b);
            active[i] = true;
            facets.push(Facet {
                dir_index: i,
                vertices: vec![a, b],
                tris: Vec::new(),
                area: t_hi - t_lo,
            });
        } else {
            facets.push(Facet {
                dir_index: i,
                vertices: Vec::new(),
                tris: Vec::new(),
                area: 0.0,
            });
        }
    }

    let mut vertices = dedupe_points(&raw_vertices, 1e-9);
    vertices.sort_by(|a, b| a[1].atan2(a[0]).total_cmp(&b[1].atan2(b[0])));
    let effective_h = effective_from_vertices(dirs, &vertices);

    Ok(PolytopeGeometry {
        source: sv.clone(),
        vertices,
        facets,
        active,
        effective_h,
    })
}

/// Shoelace area of a CCW-ordered planar vertex loop.
#[cfg(test)]
pub(crate) fn polygon_area_2d(loop_vertices: &[Point]) -> f64 {
    let k = loop_vertices.len();
    let mut s = 0.0;
    for i in 0..k {
        let a = &loop_vertices[i];
        let b = &loop_vertices[(i + 1) % k];
        s += a[0] * b[1] - b[0] * a[1];
    }
    0.5 * s
}
