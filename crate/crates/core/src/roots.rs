//! Bracketed scalar root finding (Brent's method).

use crate::error::{Error, Result};

/// Find a root of `f` in `[a, b]` given `f(a)` and `f(b)` with opposite signs.
///
/// Classic Brent: inverse quadratic interpolation with secant and bisection
/// safeguards. Terminates when `|f| <= ftol` or the bracket shrinks below
/// `xtol * (1 + |x|)`.
#[allow(clippy::too_many_arguments)]
pub fn brent<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    a0: f64,
    b0: f64,
    fa0: f64,
    fb0: f64,
    xtol: f64,
    ftol: f64,
    max_iter: usize,
) -> Result<f64> {
    if fa0 == 0.0 {
        return Ok(a0);
    }
    if fb0 == 0.0 {
        return Ok(b0);
    }
    if fa0.signum() == fb0.signum() {
        return Err(Error::RootFinding(format!(
            "no sign change on bracket [{a0}, {b0}]: f = ({fa0:e}, {fb0:e})"
        )));
    }
    let (mut a, mut b, mut fa, mut fb) = (a0, b0, fa0, fb0);
    // Keep |f(b)| <= |f(a)|: b is the best iterate.
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;

    for _ in 0..max_iter {
        if fb.abs() <= ftol {
            return Ok(b);
        }
        if fc.abs() < fb.abs() {
            // c is better: rotate so b stays best.
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = xtol * (1.0 + b.abs());
        let m = 0.5 * (c - b);
        if m.abs() <= tol {
            return Ok(b);
        }
        if e.abs() < tol || fa.abs() <= fb.abs() {
            // Bisection step.
            d = m;
            e = m;
        } else {
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                // Secant.
                (2.0 * m * s, 1.0 - s)
            } else {
                // Inverse quadratic interpolation.
                let q = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0)),
                    (q - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            // Accept the interpolated step only if it stays inside the bracket
            // and shrinks faster than the previous pair of steps.
            let min1 = 3.0 * m * q - (tol * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b)?;
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
    }
    Err(Error::RootFinding(format!(
        "no convergence in {max_iter} iterations; last bracket [{b}, {c}]"
    )))
}

/// Expand a bracket for a strictly increasing function with a sign change,
/// starting from `x0 > 0` and scaling by `grow` in the needed direction.
/// Returns `(lo, hi, f(lo), f(hi))` with `f(lo) < 0 < f(hi)` (weakly).
pub fn bracket_increasing<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    x0: f64,
    grow: f64,
    max_steps: usize,
) -> Result<(f64, f64, f64, f64)> {
    debug_assert!(x0 > 0.0 && grow > 1.0);
    let f0 = f(x0)?;
    if f0 == 0.0 {
        return Ok((x0, x0, 0.0, 0.0));
    }
    if f0 < 0.0 {
        let (mut lo, mut flo) = (x0, f0);
        let mut hi = x0;
        for _ in 0..max_steps {
            hi *= grow;
            let fhi = f(hi)?;
            if fhi >= 0.0 {
                return Ok((lo, hi, flo, fhi));
            }
            lo = hi;
            flo = fhi;
        }
    } else {
        let (mut hi, mut fhi) = (x0, f0);
        let mut lo = x0;
        for _ in 0..max_steps {
            lo /= grow;
            let flo = f(lo)?;
            if flo <= 0.0 {
                return Ok((lo, hi, flo, fhi));
            }
            hi = lo;
            fhi = flo;
        }
    }
    Err(Error::RootFinding(format!(
        "could not bracket a sign change from x0 = {x0} in {max_steps} steps"
    )))
}
