//! Small fixed-size vector helpers. Points live in `[f64; 3]` regardless of
//! the ambient dimension; n = 2 data keeps z = 0 so the same quadrature and
//! measure code paths serve both dimensions.

pub type Point = [f64; 3];

#[inline]
pub fn dot(a: &Point, b: &Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn sub(a: &Point, b: &Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn add(a: &Point, b: &Point) -> Point {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn scale(a: &Point, s: f64) -> Point {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub fn cross(a: &Point, b: &Point) -> Point {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn norm2(a: &Point) -> f64 {
    dot(a, a)
}

#[inline]
pub fn norm(a: &Point) -> f64 {
    norm2(a).sqrt()
}

#[inline]
pub fn dist(a: &Point, b: &Point) -> f64 {
    norm(&sub(a, b))
}

/// Unit vector along `a`; `a` must be nonzero.
pub fn normalize(a: &Point) -> Point {
    let n = norm(a);
    debug_assert!(n > 0.0);
    scale(a, 1.0 / n)
}

/// Any unit vector orthogonal to the unit vector `u`.
pub fn orthonormal_to(u: &Point) -> Point {
    // Pick the coordinate axis least aligned with u to avoid cancellation.
    let trial = if u[0].abs() <= u[1].abs() && u[0].abs() <= u[2].abs() {
        [1.0, 0.0, 0.0]
    } else if u[1].abs() <= u[2].abs() {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let proj = dot(&trial, u);
    normalize(&sub(&trial, &scale(u, proj)))
}

/// Rotation of the xy-plane by `angle` (z fixed).
pub fn rotate_z(p: &Point, angle: f64) -> Point {
    let (s, c) = angle.sin_cos();
    [c * p[0] - s * p[1], s * p[0] + c * p[1], p[2]]
}

/// Rodrigues rotation of `p` about the unit `axis` by `angle`.
pub fn rotate_axis(p: &Point, axis: &Point, angle: f64) -> Point {
    let (s, c) = angle.sin_cos();
    let k_cross_p = cross(axis, p);
    let k_dot_p = dot(axis, p);
    [
        p[0] * c + k_cross_p[0] * s + axis[0] * k_dot_p * (1.0 - c),
        p[1] * c + k_cross_p[1] * s + axis[1] * k_dot_p * (1.0 - c),
        p[2] * c + k_cross_p[2] * s + axis[2] * k_dot_p * (1.0 - c),
    ]
}

/// Neumaier compensated sum; deterministic left-to-right order.
pub fn sum_compensated<I: IntoIterator<Item = f64>>(items: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in items {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
