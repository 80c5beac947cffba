//! Support-number polytopes over a fixed direction set.
//!
//! Bodies are H-representations: K = ∩_i {x : x·u_i ≤ h_i} with all h_i > 0,
//! so the origin is always interior. Construction (the Wulff shape of h)
//! produces vertices, per-direction facets with an area decomposition for
//! quadrature, and the effective support numbers h_{[h]}(u_i).

mod hull3;
mod polygon;

use crate::error::{Error, Result};
use crate::linalg::{dist, dot, norm, scale, Point};

const ANGLE_SEP_TOL: f64 = 1e-9;
const UNIT_TOL: f64 = 1e-12;

/// Fixed set of N ≥ n+1 pairwise-distinct unit directions in ℝⁿ, n ∈ {2, 3}.
#[derive(Clone, Debug)]
pub struct DirectionSet {
    pub n: usize,
    dirs: Vec<Point>,
}

impl DirectionSet {
    pub fn new(n: usize, directions: Vec<Point>) -> Result<Self> {
        if n != 2 && n != 3 {
            return Err(Error::Directions(format!("n must be 2 or 3, got {n}")));
        }
        if directions.len() < n + 1 {
            return Err(Error::Directions(format!(
                "need at least {} directions for n={n}, got {}",
                n + 1,
                directions.len()
            )));
        }
        for (i, u) in directions.iter().enumerate() {
            if (norm(u) - 1.0).abs() > UNIT_TOL {
                return Err(Error::Directions(format!(
                    "direction {i} is not unit length: |u| = {}",
                    norm(u)
                )));
            }
            if n == 2 && u[2] != 0.0 {
                return Err(Error::Directions(format!(
                    "direction {i} has a nonzero third coordinate in n=2"
                )));
            }
        }
        for i in 0..directions.len() {
            for j in (i + 1)..directions.len() {
                // Chord length bounds the angle for nearly parallel vectors.
                if dist(&directions[i], &directions[j]) <= ANGLE_SEP_TOL {
                    return Err(Error::Directions(format!(
                        "directions {i} and {j} are angularly closer than {ANGLE_SEP_TOL}"
                    )));
                }
            }
        }
        Ok(DirectionSet {
            n,
            dirs: directions,
        })
    }

    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }

    pub fn dir(&self, i: usize) -> &Point {
        &self.dirs[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Point> {
        self.dirs.iter()
    }

    /// Exact data equality; combine/compare operations require it.
    pub fn same_as(&self, other: &DirectionSet) -> bool {
        self.n == other.n && self.dirs == other.dirs
    }

    /// True iff the directions positively span ℝⁿ, i.e. no closed hemisphere
    /// contains them all. Equivalent to the origin lying in the interior of
    /// their convex hull, and to every Wulff shape over them being bounded.
    pub fn positively_spans(&self) -> bool {
        self.concentration_witness().is_none()
    }

    /// A unit v with u_i·v ≥ 0 (up to 1e-12) for all i, if one exists.
    pub fn concentration_witness(&self) -> Option<Point> {
        if self.n == 2 {
            polygon::concentration_witness_2d(&self.dirs)
        } else {
            hull3::concentration_witness_3d(&self.dirs)
        }
    }

    /// Regular k-gon normals in the plane (k ≥ 3), starting at e₁.
    pub fn regular_polygon(k: usize) -> Result<Self> {
        let dirs = (0..k)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / k as f64;
                [t.cos(), t.sin(), 0.0]
            })
            .collect();
        DirectionSet::new(2, dirs)
    }
}

/// Finite Borel measure on the sphere supported on a DirectionSet.
#[derive(Clone, Debug)]
pub struct DiscreteMeasure {
    pub dirs: DirectionSet,
    pub weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(dirs: DirectionSet, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != dirs.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} weights for {} directions",
                weights.len(),
                dirs.len()
            )));
        }
        for (i, &c) in weights.iter().enumerate() {
            if !(c > 0.0) || !c.is_finite() {
                return Err(Error::ArgDomain(format!(
                    "measure weight {i} must be finite and positive, got {c}"
                )));
            }
        }
        Ok(DiscreteMeasure { dirs, weights })
    }

    pub fn total_mass(&self) -> f64 {
        crate::linalg::sum_compensated(self.weights.iter().copied())
    }
}

/// True iff the measure is not concentrated in any closed hemisphere.
pub fn hemisphere_check(mu: &DiscreteMeasure) -> bool {
    mu.dirs.positively_spans()
}

/// Support numbers over a direction set; all positive.
#[derive(Clone, Debug)]
pub struct SupportVector {
    pub dirs: DirectionSet,
    pub h: Vec<f64>,
}

impl SupportVector {
    pub fn new(dirs: DirectionSet, h: Vec<f64>) -> Result<Self> {
        if h.len() != dirs.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} support numbers for {} directions",
                h.len(),
                dirs.len()
            )));
        }
        for (i, &v) in h.iter().enumerate() {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::ArgDomain(format!(
                    "support number {i} must be finite and positive, got {v}"
                )));
            }
        }
        Ok(SupportVector { dirs, h })
    }

    pub fn constant(dirs: DirectionSet, value: f64) -> Result<Self> {
        let k = dirs.len();
        SupportVector::new(dirs, vec![value; k])
    }

    pub fn scaled(&self, s: f64) -> SupportVector {
        SupportVector {
            dirs: self.dirs.clone(),
            h: self.h.iter().map(|v| v * s).collect(),
        }
    }
}

/// One facet of a Wulff shape: the face with outer normal `dirs[dir_index]`.
#[derive(Clone, Debug)]
pub struct Facet {
    pub dir_index: usize,
    /// n=2: the two segment endpoints in tangent order. n=3: the boundary
    /// loop ordered by angle around the facet normal. Empty iff inactive.
    pub vertices: Vec<Point>,
    /// n=3 only: centroid fan used for quadrature; empty for n=2.
    pub tris: Vec<[Point; 3]>,
    /// (n−1)-dimensional measure: segment length (n=2) or polygon area (n=3).
    pub area: f64,
}

/// A constructed Wulff shape with its facet decomposition.
#[derive(Clone, Debug)]
pub struct PolytopeGeometry {
    pub source: SupportVector,
    pub vertices: Vec<Point>,
    /// One entry per direction, aligned with the direction set.
    pub facets: Vec<Facet>,
    pub active: Vec<bool>,
    /// h_{[h]}(u_i) = max over vertices of x·u_i; ≤ h componentwise.
    pub effective_h: Vec<f64>,
}

impl PolytopeGeometry {
    pub fn n(&self) -> usize {
        self.source.dirs.n
    }

    /// Support function of the body at an arbitrary direction.
    pub fn support_at(&self, v: &Point) -> f64 {
        self.vertices
            .iter()
            .map(|x| dot(x, v))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// The support numbers the body actually attains on the direction set.
    pub fn effective_support(&self) -> SupportVector {
        SupportVector {
            dirs: self.source.dirs.clone(),
            h: self.effective_h.clone(),
        }
    }

    /// The same body scaled by s > 0. Scaling commutes with the halfspace
    /// intersection, so the facet structure and active set carry over.
    pub fn scaled(&self, s: f64) -> PolytopeGeometry {
        let sp = |x: &Point| scale(x, s);
        let nf = self.n() as f64;
        PolytopeGeometry {
            source: self.source.scaled(s),
            vertices: self.vertices.iter().map(&sp).collect(),
            facets: self
                .facets
                .iter()
                .map(|f| Facet {
                    dir_index: f.dir_index,
                    vertices: f.vertices.iter().map(&sp).collect(),
                    tris: f
                        .tris
                        .iter()
                        .map(|t| [sp(&t[0]), sp(&t[1]), sp(&t[2])])
                        .collect(),
                    area: f.area * s.powf(nf - 1.0),
                })
                .collect(),
            active: self.active.clone(),
            effective_h: self.effective_h.iter().map(|h| h * s).collect(),
        }
    }
}

/// Build the halfspace intersection ∩_i {x·u_i ≤ h_i}.
///
/// Errors with a hemisphere witness when the directions fail to positively
/// span (the intersection would be unbounded in the witness direction).
pub fn wulff_shape(sv: &SupportVector) -> Result<PolytopeGeometry> {
    if let Some(w) = sv.dirs.concentration_witness() {
        return Err(Error::Unbounded {
            witness: vec![w[0], w[1], w[2]],
        });
    }
    if sv.dirs.n == 2 {
        polygon::wulff_2d(sv)
    } else {
        hull3::wulff_3d(sv)
    }
}

/// Distance from the origin to ∂[h] along the unit direction u:
/// ρ(u) = min over i with u·u_i > 0 of h_i/(u·u_i).
pub fn radial_function(sv: &SupportVector, u: &Point) -> f64 {
    let mut best = f64::INFINITY;
    for (i, ui) in sv.dirs.iter().enumerate() {
        let d = dot(u, ui);
        if d > 0.0 {
            best = best.min(sv.h[i] / d);
        }
    }
    best
}

/// Outer normal of the facet the ray through u hits: u_i attaining the
/// radial minimum. Errors when the minimum is attained twice within 1e-12
/// relative (the ray hits an edge or vertex).
pub fn ray_normal(sv: &SupportVector, u: &Point) -> Result<Point> {
    let mut best = f64::INFINITY;
    let mut best_i = usize::MAX;
    let mut tie_with = None;
    for (i, ui) in sv.dirs.iter().enumerate() {
        let d = dot(u, ui);
        if d <= 0.0 {
            continue;
        }
        let rho = sv.h[i] / d;
        if rho < best * (1.0 - 1e-12) {
            best = rho;
            best_i = i;
            tie_with = None;
        } else if rho <= best * (1.0 + 1e-12) {
            // Within tolerance of the current minimum.
            if rho < best {
                tie_with = Some(best_i);
                best = rho;
                best_i = i;
            } else {
                tie_with = Some(i);
            }
        }
    }
    if best_i == usize::MAX {
        return Err(Error::Directions(
            "ray misses every halfspace boundary; directions do not span".into(),
        ));
    }
    if let Some(j) = tie_with {
        return Err(Error::RayTie(best_i.min(j), best_i.max(j)));
    }
    Ok(*sv.dirs.dir(best_i))
}

/// (r_K, R_K): min |x| over ∂K and max |x| over K.
///
/// R_K is attained at a vertex. r_K equals min_i effective_h_i: for the
/// minimizing i the foot h_i·u_i satisfies every constraint (h_i u_i·u_j ≤
/// h_i ≤ h_j), so it lies on ∂K, and every boundary point sits on some facet
/// plane at distance ≥ its effective h.
pub fn radii(p: &PolytopeGeometry) -> (f64, f64) {
    let big = p
        .vertices
        .iter()
        .map(norm)
        .fold(f64::NEG_INFINITY, f64::max);
    let small = p.effective_h.iter().copied().fold(f64::INFINITY, f64::min);
    (small, big)
}

/// Deterministic near-uniform sample of the unit sphere/circle, used to
/// approximate suprema over directions.
pub(crate) fn sphere_sample(n: usize, count: usize) -> Vec<Point> {
    let mut out = Vec::with_capacity(count);
    if n == 2 {
        for i in 0..count {
            let t = 2.0 * std::f64::consts::PI * i as f64 / count as f64;
            out.push([t.cos(), t.sin(), 0.0]);
        }
    } else {
        // Golden-ratio lattice.
        let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
        for i in 0..count {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let t = 2.0 * std::f64::consts::PI * (i as f64 / phi).fract();
            out.push([r * t.cos(), r * t.sin(), z]);
        }
    }
    out
}

/// sup over the sphere of |h_A − h_B|, approximated on a dense direction
/// sample plus the set directions and both bodies' vertex directions (where
/// support-function differences of polytopes peak).
pub fn hausdorff_distance(a: &SupportVector, b: &SupportVector) -> Result<f64> {
    assert!(
        a.dirs.same_as(&b.dirs),
        "hausdorff_distance requires the same direction set"
    );
    let pa = wulff_shape(a)?;
    let pb = wulff_shape(b)?;
    let n = a.dirs.n;
    let mut cands = sphere_sample(n, if n == 2 { 4096 } else { 8192 });
    cands.extend(a.dirs.iter().copied());
    for v in pa.vertices.iter().chain(pb.vertices.iter()) {
        let r = norm(v);
        if r > 0.0 {
            cands.push(scale(v, 1.0 / r));
        }
    }
    let mut best = 0.0f64;
    for u in &cands {
        best = best.max((pa.support_at(u) - pb.support_at(u)).abs());
    }
    Ok(best)
}

/// Componentwise L_p combination of support numbers:
/// (a·h_A^p + b·h_B^p)^{1/p} for p ≠ 0, the log combination h_A^a·h_B^b for
/// p = 0. Coefficients must be nonnegative.
pub fn combine_lp(a: &SupportVector, b: &SupportVector, ca: f64, cb: f64, p: f64) -> SupportVector {
    assert!(
        a.dirs.same_as(&b.dirs),
        "combine_lp requires the same direction set"
    );
    assert!(
        ca >= 0.0 && cb >= 0.0,
        "combination coefficients must be nonnegative"
    );
    let h =
        a.h.iter()
            .zip(b.h.iter())
            .map(|(&ha, &hb)| {
                if p == 0.0 {
                    ha.powf(ca) * hb.powf(cb)
                } else {
                    (ca * ha.powf(p) + cb * hb.powf(p)).powf(1.0 / p)
                }
            })
            .collect();
    SupportVector {
        dirs: a.dirs.clone(),
        h,
    }
}

/// Shared vertex dedup: greedy clustering with a scale-relative tolerance.
pub(crate) fn dedupe_points(points: &[Point], tol: f64) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::new();
    for p in points {
        let t = tol * (1.0 + norm(p));
        if !out.iter().any(|q| dist(p, q) <= t) {
            out.push(*p);
        }
    }
    out
}

pub(crate) fn effective_from_vertices(dirs: &DirectionSet, vertices: &[Point]) -> Vec<f64> {
    dirs.iter()
        .map(|u| {
            vertices
                .iter()
                .map(|x| dot(x, u))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}
