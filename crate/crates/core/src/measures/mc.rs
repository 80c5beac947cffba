//! Monte Carlo oracles, independent of the quadrature code paths.
//!
//! All randomness flows from one 64-bit seed through per-stratum counter
//! streams, and partial results combine in stratum index order, so estimates
//! are bit-identical for a fixed (seed, stratification) regardless of the
//! parallel schedule.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::density::GGParams;
use crate::error::{Error, Result};
use crate::exec::map_indexed;
use crate::geometry::PolytopeGeometry;
use crate::linalg::{add, dot, norm, scale, sub, sum_compensated, Point};

#[derive(Clone, Copy, Debug)]
pub struct McSpec {
    pub samples: usize,
    pub seed: u64,
    /// Volume: grid cells per axis. Surface: independent sample blocks.
    pub stratification: usize,
}

impl McSpec {
    pub fn new(samples: usize, seed: u64, stratification: usize) -> Result<Self> {
        let spec = McSpec {
            samples,
            seed,
            stratification,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples < 1000 {
            return Err(Error::ArgDomain(format!(
                "Monte Carlo needs at least 1000 samples, got {}",
                self.samples
            )));
        }
        if self.stratification == 0 {
            return Err(Error::ArgDomain("stratification must be positive".into()));
        }
        Ok(())
    }
}

// Sample counts per stratum: as even as possible, remainder to the front.
fn allocate(samples: usize, strata: usize) -> Result<Vec<usize>> {
    let base = samples / strata;
    if base < 2 {
        return Err(Error::ArgDomain(format!(
            "{samples} samples spread over {strata} strata leaves fewer than 2 each"
        )));
    }
    let rem = samples % strata;
    Ok((0..strata).map(|s| base + usize::from(s < rem)).collect())
}

struct Welford {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn new() -> Self {
        Welford {
            n: 0,
            mean: 0.0,
            m2: 0.0,
        }
    }

    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    fn merge(self, other: Welford) -> Welford {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        Welford {
            n,
            mean: self.mean + d * other.n as f64 / n as f64,
            m2: self.m2 + other.m2 + d * d * (self.n as f64 * other.n as f64) / n as f64,
        }
    }
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// γ estimate by stratified uniform sampling of the bounding box (clipped to
/// the support ball's box for b > 0). Returns (estimate, standard error).
pub fn mc_volume_oracle(
    p: &PolytopeGeometry,
    params: &GGParams,
    mc: &McSpec,
) -> Result<(f64, f64)> {
    mc.validate()?;
    let n = p.n();
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for v in &p.vertices {
        for a in 0..n {
            lo[a] = lo[a].min(v[a]);
            hi[a] = hi[a].max(v[a]);
        }
    }
    if params.b > 0.0 {
        let rho = params.support_radius();
        for a in 0..n {
            lo[a] = lo[a].max(-rho);
            hi[a] = hi[a].min(rho);
        }
    }
    if (0..n).any(|a| lo[a] >= hi[a]) {
        return Ok((0.0, 0.0)); // no overlap with the density's support
    }

    let k = mc.stratification;
    let strata = k.pow(n as u32);
    let counts = allocate(mc.samples, strata)?;
    let cell_vol: f64 = (0..n).map(|a| (hi[a] - lo[a]) / k as f64).product();

    let sv = &p.source;
    let idxs: Vec<usize> = (0..strata).collect();
    let parts = map_indexed(&idxs, |_, &s| {
        // Decode the stratum's grid cell.
        let mut cell = [0usize; 3];
        let mut rest = s;
        for c in cell.iter_mut().take(n) {
            *c = rest % k;
            rest /= k;
        }
        let mut rng = stream_rng(mc.seed, s as u64);
        let mut w = Welford::new();
        for _ in 0..counts[s] {
            let mut x = [0.0f64; 3];
            for a in 0..n {
                let width = (hi[a] - lo[a]) / k as f64;
                x[a] = lo[a] + (cell[a] as f64 + rng.random::<f64>()) * width;
            }
            let inside = sv
                .dirs
                .iter()
                .zip(sv.h.iter())
                .all(|(u, &h)| dot(&x, u) <= h);
            w.push(if inside { params.density(&x) } else { 0.0 });
        }
        Ok((w.mean, w.variance(), counts[s]))
    })?;

    let estimate = sum_compensated(parts.iter().map(|(m, _, _)| cell_vol * m));
    let var = sum_compensated(
        parts
            .iter()
            .map(|(_, v, c)| cell_vol * cell_vol * v / *c as f64),
    );
    Ok((estimate, var.sqrt()))
}

/// Facet density integral by uniform sampling of the facet, area-weighted
/// over its triangle fan for n = 3. Returns (estimate, standard error).
pub fn mc_surface_oracle(
    p: &PolytopeGeometry,
    params: &GGParams,
    facet: usize,
    mc: &McSpec,
) -> Result<(f64, f64)> {
    mc.validate()?;
    if facet >= p.facets.len() || !p.active[facet] {
        return Err(Error::InactiveFacet(facet));
    }
    let f = &p.facets[facet];
    let counts = allocate(mc.samples, mc.stratification)?;

    enum Sampler<'a> {
        Segment {
            a: Point,
            d: Point,
        },
        Fan {
            tris: &'a [[Point; 3]],
            cum: Vec<f64>,
        },
    }
    let sampler = if p.n() == 2 {
        Sampler::Segment {
            a: f.vertices[0],
            d: sub(&f.vertices[1], &f.vertices[0]),
        }
    } else {
        let mut cum = Vec::with_capacity(f.tris.len());
        let mut acc = 0.0;
        for t in &f.tris {
            acc += 0.5
                * norm(&crate::linalg::cross(
                    &sub(&t[1], &t[0]),
                    &sub(&t[2], &t[0]),
                ));
            cum.push(acc);
        }
        Sampler::Fan { tris: &f.tris, cum }
    };
    let measure = f.area;

    let idxs: Vec<usize> = (0..mc.stratification).collect();
    let parts = map_indexed(&idxs, |_, &blk| {
        let mut rng = stream_rng(mc.seed, blk as u64);
        let mut w = Welford::new();
        for _ in 0..counts[blk] {
            let x = match &sampler {
                Sampler::Segment { a, d } => add(a, &scale(d, rng.random::<f64>())),
                Sampler::Fan { tris, cum } => {
                    let total = *cum.last().unwrap();
                    let target = rng.random::<f64>() * total;
                    let t = cum.partition_point(|&c| c < target).min(tris.len() - 1);
                    let tri = &tris[t];
                    // sqrt trick: uniform over the triangle.
                    let r1 = rng.random::<f64>().sqrt();
                    let r2 = rng.random::<f64>();
                    add(
                        &scale(&tri[0], 1.0 - r1),
                        &add(&scale(&tri[1], r1 * (1.0 - r2)), &scale(&tri[2], r1 * r2)),
                    )
                }
            };
            w.push(params.density(&x));
        }
        Ok(w)
    })?;

    let pooled = parts
        .into_iter()
        .fold(Welford::new(), |acc, w| acc.merge(w));
    let estimate = measure * pooled.mean;
    let stderr = measure * (pooled.variance() / pooled.n as f64).sqrt();
    Ok((estimate, stderr))
}
