//! Wulff shapes in ℝ³ via polar duality and an incremental convex hull.
//!
//! The body ∩_i {x·u_i ≤ h_i} = {x : p_i·x ≤ 1} with dual points
//! p_i = u_i/h_i. When the directions positively span, the origin is interior
//! to conv{p_i}, faces of that hull correspond to vertices of the body, and
//! the dual vertices incident to a hull vertex p_i bound facet i.
//!
//! Orientation tests use exact predicates, so hull combinatorics never
//! contradict themselves; points exactly on a face plane count as not
//! visible, which makes tangent constraints come out inactive.

use std::collections::HashMap;

use super::{dedupe_points, effective_from_vertices, Facet, PolytopeGeometry, SupportVector};
use crate::error::{Error, Result};
use crate::linalg::{add, cross, dist, dot, norm, normalize, orthonormal_to, scale, sub, Point};

fn c3(p: &Point) -> robust::Coord3D<f64> {
    robust::Coord3D {
        x: p[0],
        y: p[1],
        z: p[2],
    }
}

/// Exact sign: positive iff d lies on the inner side of the outward-oriented
/// triangle (a, b, c) (counterclockwise seen from outside).
fn o3d(pts: &[Point], a: usize, b: usize, c: usize, d: &Point) -> f64 {
    robust::orient3d(c3(&pts[a]), c3(&pts[b]), c3(&pts[c]), c3(d))
}

struct Face {
    v: [usize; 3],
    alive: bool,
}

/// Incremental convex hull; returns outward-oriented faces, or None when the
/// input is affinely degenerate (all points coplanar).
pub(crate) fn convex_hull3(points: &[Point]) -> Option<Vec<[usize; 3]>> {
    let n = points.len();
    if n < 4 {
        return None;
    }
    // Deterministic fat initial tetrahedron: lexicographic minimum, farthest
    // point, largest-area third, largest-volume fourth with exact sign.
    let i0 = (0..n)
        .min_by(|&a, &b| {
            points[a]
                .iter()
                .zip(points[b].iter())
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .unwrap();
    let i1 = (0..n)
        .max_by(|&a, &b| dist(&points[a], &points[i0]).total_cmp(&dist(&points[b], &points[i0])))?;
    if dist(&points[i1], &points[i0]) < 1e-12 {
        return None;
    }
    let e0 = sub(&points[i1], &points[i0]);
    let i2 = (0..n).max_by(|&a, &b| {
        let na = norm(&cross(&e0, &sub(&points[a], &points[i0])));
        let nb = norm(&cross(&e0, &sub(&points[b], &points[i0])));
        na.total_cmp(&nb)
    })?;
    if norm(&cross(&e0, &sub(&points[i2], &points[i0]))) < 1e-12 {
        return None;
    }
    let i3 = (0..n).max_by(|&a, &b| {
        o3d(points, i0, i1, i2, &points[a])
            .abs()
            .total_cmp(&o3d(points, i0, i1, i2, &points[b]).abs())
    })?;
    if o3d(points, i0, i1, i2, &points[i3]) == 0.0 {
        return None;
    }

    let mut faces: Vec<Face> = Vec::new();
    let mut edge_to_face: HashMap<(usize, usize), usize> = HashMap::new();
    let add_face = |faces: &mut Vec<Face>,
                    edges: &mut HashMap<(usize, usize), usize>,
                    mut t: [usize; 3],
                    inner: &Point,
                    points: &[Point]| {
        if o3d(points, t[0], t[1], t[2], inner) < 0.0 {
            t.swap(1, 2);
        }
        let idx = faces.len();
        faces.push(Face { v: t, alive: true });
        for k in 0..3 {
            edges.insert((t[k], t[(k + 1) % 3]), idx);
        }
    };

    // Interior reference point: centroid of the initial tetrahedron.
    let inner = scale(
        &add(
            &add(&points[i0], &points[i1]),
            &add(&points[i2], &points[i3]),
        ),
        0.25,
    );
    for t in [[i0, i1, i2], [i0, i1, i3], [i0, i2, i3], [i1, i2, i3]] {
        add_face(&mut faces, &mut edge_to_face, t, &inner, points);
    }

    for p in 0..n {
        if p == i0 || p == i1 || p == i2 || p == i3 {
            continue;
        }
        let visible: Vec<usize> = (0..faces.len())
            .filter(|&f| {
                faces[f].alive && {
                    let [a, b, c] = faces[f].v;
                    o3d(points, a, b, c, &points[p]) < 0.0
                }
            })
            .collect();
        if visible.is_empty() {
            continue; // inside or exactly on the current hull
        }
        let is_visible = |f: usize, faces: &[Face]| visible.contains(&f) && faces[f].alive;
        // Horizon: directed edges of visible faces whose opposite face is not.
        let mut horizon: Vec<(usize, usize)> = Vec::new();
        for &f in &visible {
            let [a, b, c] = faces[f].v;
            for (s, t) in [(a, b), (b, c), (c, a)] {
                let Some(&g) = edge_to_face.get(&(t, s)) else {
                    continue;
                };
                if !is_visible(g, &faces) {
                    horizon.push((s, t));
                }
            }
        }
        for &f in &visible {
            faces[f].alive = false;
            let [a, b, c] = faces[f].v;
            for (s, t) in [(a, b), (b, c), (c, a)] {
                edge_to_face.remove(&(s, t));
            }
        }
        for (s, t) in horizon {
            add_face(&mut faces, &mut edge_to_face, [s, t, p], &inner, points);
        }
    }

    Some(faces.iter().filter(|f| f.alive).map(|f| f.v).collect())
}

/// A unit v with u_i·v ≥ 0 (to 1e-12) for all i, if one exists. Exact: the
/// directions escape every closed hemisphere iff the origin is strictly
/// interior to their convex hull, tested face by face with exact orientation.
pub(super) fn concentration_witness_3d(dirs: &[Point]) -> Option<Point> {
    match convex_hull3(dirs) {
        None => {
            // All directions on one plane x·w = c; the side of that plane
            // containing them (or either, when c = 0) is a witness.
            let p0 = &dirs[0];
            let p1 = dirs.iter().find(|p| dist(p, p0) > 1e-9)?;
            let e0 = sub(p1, p0);
            let p2 = dirs
                .iter()
                .find(|p| norm(&cross(&e0, &sub(p, p0))) > 1e-9)?;
            let w = normalize(&cross(&e0, &sub(p2, p0)));
            Some(if dot(&w, p0) >= 0.0 {
                w
            } else {
                scale(&w, -1.0)
            })
        }
        Some(faces) => {
            let origin = [0.0, 0.0, 0.0];
            for [a, b, c] in faces {
                if o3d(dirs, a, b, c, &origin) <= 0.0 {
                    // Hull lies in {x·nu <= d} with d <= 0, so -nu sees all.
                    let nu = cross(&sub(&dirs[b], &dirs[a]), &sub(&dirs[c], &dirs[a]));
                    return Some(normalize(&scale(&nu, -1.0)));
                }
            }
            None
        }
    }
}

pub(super) fn wulff_3d(sv: &SupportVector) -> Result<PolytopeGeometry> {
    let dirs = &sv.dirs;
    let k = dirs.len();
    let duals: Vec<Point> = (0..k).map(|i| scale(dirs.dir(i), 1.0 / sv.h[i])).collect();
    let faces = convex_hull3(&duals).ok_or_else(|| {
        Error::Directions("dual point set is degenerate; directions barely span".into())
    })?;

    // Each good hull face (i, j, l) gives the body vertex v with p·v = 1 on
    // all three dual points: v = w/c, w the outward face normal, c = w·p_i.
    let mut face_vertex: Vec<Option<Point>> = Vec::with_capacity(faces.len());
    for &[i, j, l] in &faces {
        let e1 = sub(&duals[j], &duals[i]);
        let e2 = sub(&duals[l], &duals[i]);
        let w = cross(&e1, &e2);
        if norm(&w) <= 1e-10 * norm(&e1) * norm(&e2) {
            face_vertex.push(None); // sliver; neighbors carry the same vertex
            continue;
        }
        let c = dot(&w, &duals[i]);
        if c <= 0.0 {
            return Err(Error::Directions(
                "dual hull face does not separate the origin".into(),
            ));
        }
        face_vertex.push(Some(scale(&w, 1.0 / c)));
    }

    let all: Vec<Point> = face_vertex.iter().flatten().copied().collect();
    let vertices = dedupe_points(&all, 1e-9);
    let scale2 = vertices.iter().map(|v| dot(v, v)).fold(0.0f64, f64::max);
    let area_tol = 1e-12 * (1.0 + scale2);

    let mut facets = Vec::with_capacity(k);
    let mut active = vec![false; k];
    // `i` is the direction index, not just a position; keep the explicit loop.
    #[allow(clippy::needless_range_loop)]
    for i in 0..k {
        let mut pts: Vec<Point> = Vec::new();
        for (f, &[a, b, c]) in faces.iter().enumerate() {
            if (a == i || b == i || c == i) && face_vertex[f].is_some() {
                pts.push(face_vertex[f].unwrap());
            }
        }
        let mut pts = dedupe_points(&pts, 1e-9);
        if pts.len() < 3 {
            facets.push(empty_facet(i));
            continue;
        }
        // Order the boundary loop by angle around the facet normal.
        let u = dirs.dir(i);
        let centroid = scale(
            &pts.iter().fold([0.0; 3], |acc, p| add(&acc, p)),
            1.0 / pts.len() as f64,
        );
        let e1 = orthonormal_to(u);
        let e2 = cross(u, &e1);
        pts.sort_by(|a, b| {
            let ra = sub(a, &centroid);
            let rb = sub(b, &centroid);
            dot(&ra, &e2)
                .atan2(dot(&ra, &e1))
                .total_cmp(&dot(&rb, &e2).atan2(dot(&rb, &e1)))
        });
        let mut tris: Vec<[Point; 3]> = Vec::new();
        let mut area = 0.0;
        for t in 0..pts.len() {
            let a = pts[t];
            let b = pts[(t + 1) % pts.len()];
            let ta = 0.5 * norm(&cross(&sub(&a, &centroid), &sub(&b, &centroid)));
            if ta > 0.0 {
                tris.push([centroid, a, b]);
                area += ta;
            }
        }
        if area > area_tol {
            active[i] = true;
            facets.push(Facet {
                dir_index: i,
                vertices: pts,
                tris,
                area,
            });
        } else {
            facets.push(empty_facet(i));
        }
    }

    let effective_h = effective_from_vertices(dirs, &vertices);
    Ok(PolytopeGeometry {
        source: sv.clone(),
        vertices,
        facets,
        active,
        effective_h,
    })
}

fn empty_facet(i: usize) -> Facet {
    Facet {
        dir_index: i,
        vertices: Vec::new(),
        tris: Vec::new(),
        area: 0.0,
    }
}
