//! Adaptive quadrature over segments and planar triangles.
//!
//! Both engines use the same scheme: a fixed Gauss-Legendre rule per cell, an
//! error estimate from comparing the cell value against the sum over its
//! children, and a worst-cell-first refinement queue with a global budget.
//! Gauss nodes are interior, so integrands may be merely continuous (or vanish
//! identically) on part of a cell without special handling; cells on which the
//! integrand vanishes estimate zero error and are never refined.
//!
//! Determinism: the refinement order is a function of the computed error
//! estimates and an insertion counter, and the final sum runs over leaves in
//! positional order with compensated summation.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::linalg::{add, cross, norm, scale, sub, sum_compensated, Point};

/// Tolerances and budget for one facet/cell integral.
#[derive(Clone, Copy, Debug)]
pub struct QuadratureSpec {
    pub target_abs_tol: f64,
    pub target_rel_tol: f64,
    /// Maximum number of cell splits per integral.
    pub max_subdivisions: usize,
    /// Gauss-Legendre points per axis of a cell rule.
    pub facet_rule_order: usize,
}

impl QuadratureSpec {
    /// Defaults per ambient dimension: rel 1e-9 (n=2) / 1e-7 (n=3), order 16.
    pub fn default_for(n: usize) -> Self {
        if n == 2 {
            QuadratureSpec {
                target_abs_tol: 1e-14,
                target_rel_tol: 1e-9,
                max_subdivisions: 4000,
                facet_rule_order: 16,
            }
        } else {
            QuadratureSpec {
                target_abs_tol: 1e-12,
                target_rel_tol: 1e-7,
                max_subdivisions: 4000,
                facet_rule_order: 16,
            }
        }
    }

    pub fn with_rel_tol(mut self, rel: f64) -> Self {
        self.target_rel_tol = rel;
        self
    }

    pub fn with_abs_tol(mut self, abs: f64) -> Self {
        self.target_abs_tol = abs;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.target_abs_tol > 0.0) || !(self.target_rel_tol > 0.0) {
            return Err(Error::ArgDomain(
                "quadrature tolerances must be positive".into(),
            ));
        }
        if self.facet_rule_order < 2 {
            return Err(Error::ArgDomain(
                "facet_rule_order must be at least 2".into(),
            ));
        }
        Ok(())
    }
}

type RuleTable = Arc<Vec<(f64, f64)>>;

/// Gauss-Legendre nodes/weights on [-1, 1], cached per order.
pub fn gauss_legendre(order: usize) -> RuleTable {
    static CACHE: OnceLock<Mutex<Vec<(usize, RuleTable)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(Vec::new()));
    let mut guard = cache.lock().unwrap();
    if let Some((_, t)) = guard.iter().find(|(o, _)| *o == order) {
        return t.clone();
    }
    let table = Arc::new(compute_gauss_legendre(order));
    guard.push((order, table.clone()));
    table
}

/// Newton iteration on Legendre polynomials; ~1 ulp node accuracy.
fn compute_gauss_legendre(order: usize) -> Vec<(f64, f64)> {
    let n = order;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // Tricomi initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Evaluate P_n and P_n' by upward recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((-x, w)); // ascending node order
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

// Refinement queue cell: orders by error estimate, ties by insertion counter.
struct Cell<C> {
    err: f64,
    seq: u64,
    value: f64,
    payload: C,
}

impl<C> PartialEq for Cell<C> {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err && self.seq == other.seq
    }
}
impl<C> Eq for Cell<C> {}
impl<C> PartialOrd for Cell<C> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<C> Ord for Cell<C> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Generic adaptive driver over any cell geometry.
///
/// `rule` integrates one cell; `split` produces child cells. A cell's stored
/// value is the sum of its children's rule values (one refinement level ahead)
/// and its error estimate is the defect against its own rule value.
fn adapt<C: Clone, R, S>(
    seeds: Vec<C>,
    rule: R,
    split: S,
    spec: &QuadratureSpec,
    // Positional key for the deterministic final summation order.
    pos_key: impl Fn(&C) -> f64,
) -> Result<f64>
where
    R: Fn(&C) -> f64,
    S: Fn(&C) -> Vec<C>,
{
    spec.validate()?;
    let mut heap: BinaryHeap<Cell<(C, Vec<C>)>> = BinaryHeap::new();
    let mut seq = 0u64;
    let push = |heap: &mut BinaryHeap<_>, c: C, seq: &mut u64| {
        let q_self = rule(&c);
        let children = split(&c);
        let q_children: f64 = children.iter().map(&rule).sum();
        heap.push(Cell {
            err: (q_children - q_self).abs(),
            seq: *seq,
            value: q_children,
            payload: (c, children),
        });
        *seq += 1;
    };
    for c in seeds {
        push(&mut heap, c, &mut seq);
    }
    let mut splits = 0usize;
    loop {
        let total: f64 = sum_compensated(heap.iter().map(|c| c.value));
        let err: f64 = heap.iter().map(|c| c.err).sum();
        let target = spec.target_abs_tol.max(spec.target_rel_tol * total.abs());
        if err <= target {
            // Leaves in positional order for schedule-independent rounding.
            let mut leaves: Vec<(f64, f64)> = heap
                .iter()
                .map(|c| (pos_key(&c.payload.0), c.value))
                .collect();
            leaves.sort_by(|a, b| a.0.total_cmp(&b.0));
            return Ok(sum_compensated(leaves.into_iter().map(|(_, v)| v)));
        }
        if splits >= spec.max_subdivisions {
            return Err(Error::ToleranceNotMet {
                achieved: err,
                target,
            });
        }
        let worst = heap.pop().expect("nonempty refinement queue");
        for child in worst.payload.1 {
            push(&mut heap, child, &mut seq);
        }
        splits += 1;
    }
}

/// Adaptive integral of `f` over the interval `[a, b]`.
pub fn adapt_1d<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let table = gauss_legendre(spec.facet_rule_order);
    let rule = |c: &(f64, f64)| -> f64 {
        let half = 0.5 * (c.1 - c.0);
        let mid = 0.5 * (c.0 + c.1);
        let mut s = 0.0;
        for &(x, w) in table.iter() {
            s += w * f(mid + half * x);
        }
        s * half
    };
    let split = |c: &(f64, f64)| -> Vec<(f64, f64)> {
        let mid = 0.5 * (c.0 + c.1);
        vec![(c.0, mid), (mid, c.1)]
    };
    adapt(vec![(a, b)], rule, split, spec, |c| c.0)
}

/// Adaptive integral of `f` (a pointwise density) over a planar triangle
/// embedded in R^3, with respect to 2-dimensional area measure.
pub fn adapt_triangle<F: Fn(&Point) -> f64>(
    f: F,
    tri: &[Point; 3],
    spec: &QuadratureSpec,
) -> Result<f64> {
    let area2 = norm(&cross(&sub(&tri[1], &tri[0]), &sub(&tri[2], &tri[0])));
    if area2 == 0.0 {
        return Ok(0.0);
    }
    let table = gauss_legendre(spec.facet_rule_order);
    // Duffy map of the unit square onto a triangle (A, B, C):
    // P = A + xi (B - A) + eta (1 - xi)(C - A), |J| = (1 - xi) * 2 * area.
    let rule = |t: &[Point; 3]| -> f64 {
        let ab = sub(&t[1], &t[0]);
        let ac = sub(&t[2], &t[0]);
        let jac = norm(&cross(&ab, &ac)); // 2 * area
        if jac == 0.0 {
            return 0.0;
        }
        let mut s = 0.0;
        for &(xi_n, wi) in table.iter() {
            let xi = 0.5 * (xi_n + 1.0);
            let row_scale = wi * (1.0 - xi);
            let base = add(&t[0], &scale(&ab, xi));
            let edge = scale(&ac, 1.0 - xi);
            let mut row = 0.0;
            for &(eta_n, wj) in table.iter() {
                let eta = 0.5 * (eta_n + 1.0);
                let p = add(&base, &scale(&edge, eta));
                row += wj * f(&p);
            }
            s += row_scale * row;
        }
        // Factor 1/4 from the two [-1,1] -> [0,1] changes of variable.
        s * jac * 0.25
    };
    let split = |t: &[Point; 3]| -> Vec<[Point; 3]> {
        let m01 = scale(&add(&t[0], &t[1]), 0.5);
        let m12 = scale(&add(&t[1], &t[2]), 0.5);
        let m20 = scale(&add(&t[2], &t[0]), 0.5);
        vec![
            [t[0], m01, m20],
            [m01, t[1], m12],
            [m20, m12, t[2]],
            [m01, m12, m20],
        ]
    };
    adapt(
        vec![*tri],
        rule,
        split,
        spec,
        // Positional key: lexicographic-ish hash of the centroid x coordinate.
        |t| t[0][0] + t[1][0] + t[2][0] + 1e-3 * (t[0][1] + t[1][1] + t[2][1]),
    )
}
