//! Generators shared by the heavier integration suites.
#![allow(dead_code)]

use minklog_core::geometry::{DirectionSet, DiscreteMeasure, SupportVector};
use minklog_core::linalg::{dist, norm, normalize, Point};
use minklog_core::GGParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every grid parameter pair (b, m) with b < m/(n+m), m in {1, 2, 4}.
pub fn param_grid(n: usize) -> Vec<GGParams> {
    let mut out = Vec::new();
    for &b in &[-1.0, -0.25, 0.0, 0.1, 0.15] {
        for &m in &[1.0, 2.0, 4.0] {
            if b < m / (n as f64 + m) {
                out.push(GGParams::new(b, m, n).unwrap());
            }
        }
    }
    out
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Point {
    loop {
        let mut x = [0.0; 3];
        for a in x.iter_mut().take(n) {
            *a = rng.random::<f64>() * 2.0 - 1.0;
        }
        let r = norm(&x);
        if r > 1e-3 && r <= 1.0 {
            return normalize(&x);
        }
    }
}

/// Random spanning set: the ±axes guarantee spanning, the rest is noise.
pub fn spanning_dirs(rng: &mut ChaCha8Rng, n: usize, extra: usize) -> DirectionSet {
    'outer: loop {
        let mut dirs: Vec<Point> = Vec::new();
        for a in 0..n {
            let mut p = [0.0; 3];
            p[a] = 1.0;
            dirs.push(p);
            p[a] = -1.0;
            dirs.push(p);
        }
        for _ in 0..extra {
            dirs.push(random_unit(rng, n));
        }
        for i in 0..dirs.len() {
            for j in 0..i {
                if dist(&dirs[i], &dirs[j]) <= 2e-9 {
                    continue 'outer;
                }
            }
        }
        return DirectionSet::new(n, dirs).unwrap();
    }
}

/// Well-spread directions without the axis scaffolding: a jittered regular
/// polygon (n = 2) or golden-angle lattice (n = 3), resampled until it spans.
pub fn lattice_dirs(rng: &mut ChaCha8Rng, n: usize, count: usize) -> DirectionSet {
    loop {
        let mut dirs: Vec<Point> = Vec::with_capacity(count);
        if n == 2 {
            for k in 0..count {
                let t =
                    std::f64::consts::TAU * (k as f64 + 0.35 * rng.random::<f64>()) / count as f64;
                dirs.push([t.cos(), t.sin(), 0.0]);
            }
        } else {
            let golden = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
            for k in 0..count {
                let z = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
                let r = (1.0 - z * z).sqrt();
                let t = golden * k as f64 + 0.25 * rng.random::<f64>();
                dirs.push([r * t.cos(), r * t.sin(), z]);
            }
        }
        let set = match DirectionSet::new(n, dirs) {
            Ok(s) => s,
            Err(_) => continue,
        };
        if set.positively_spans() {
            return set;
        }
    }
}

pub fn random_body(rng: &mut ChaCha8Rng, n: usize, extra: usize) -> SupportVector {
    let dirs = spanning_dirs(rng, n, extra);
    let h = (0..dirs.len())
        .map(|_| 0.7 + 0.7 * rng.random::<f64>())
        .collect();
    SupportVector::new(dirs, h).unwrap()
}

pub fn random_measure(rng: &mut ChaCha8Rng, n: usize, count: usize) -> DiscreteMeasure {
    loop {
        let dirs = lattice_dirs(rng, n, count);
        let w = (0..count)
            .map(|_| 0.5 + 1.5 * rng.random::<f64>())
            .collect();
        let mu = DiscreteMeasure::new(dirs, w).unwrap();
        if minklog_core::geometry::hemisphere_check(&mu) {
            return mu;
        }
    }
}
