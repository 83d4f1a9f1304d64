//! Boundary-weighted low-discrepancy sampling of `U^n` and seeded per-trial
//! random streams.
//!
//! The point set is a Halton sequence in `2n` dimensions (a radius and an
//! angle per coordinate) with a seeded Cranley–Patterson shift. Radii are
//! warped by `r = 1 − (1 − u)³`, which concentrates samples near the
//! distinguished boundary. Point `i` depends on `i` and the seed only, so
//! the first `N` points of a larger budget are exactly the `N`-point set.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::PolydiscPoint;

/// Radii produced by the sampler and the local searches never exceed this.
pub const SAMPLE_RADIUS_CAP: f64 = 1.0 - 1e-9;

/// Radical inverse of `index` in `base`.
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut factor = inv;
    let mut out = 0.0;
    while index > 0 {
        out += (index % base) as f64 * factor;
        index /= base;
        factor *= inv;
    }
    out
}

/// The first `count` primes.
pub fn primes(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut candidate = 2u64;
    while out.len() < count {
        if out.iter().take_while(|&&p| p * p <= candidate).all(|&p| !candidate.is_multiple_of(p)) {
            out.push(candidate);
        }
        candidate += 1;
    }
    out
}

/// Seeded, nested, boundary-weighted point set on `U^n`.
#[derive(Debug, Clone)]
pub struct BoundarySampler {
    dim: usize,
    bases: Vec<u64>,
    shift: Vec<f64>,
}

impl BoundarySampler {
    pub fn new(dim: usize, seed: u64) -> Self {
        assert!(dim >= 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shift = (0..2 * dim).map(|_| rng.random::<f64>()).collect();
        Self {
            dim,
            bases: primes(2 * dim),
            shift,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The `index`-th point of the sequence.
    pub fn point(&self, index: usize) -> PolydiscPoint {
        let i = index as u64 + 1;
        let coords = (0..self.dim)
            .map(|j| {
                let u = (radical_inverse(i, self.bases[2 * j]) + self.shift[2 * j]).fract();
                let v = (radical_inverse(i, self.bases[2 * j + 1]) + self.shift[2 * j + 1]).fract();
                let r = warp_radius(u);
                Complex64::from_polar(r, TAU * v)
            })
            .collect();
        PolydiscPoint::new(coords).expect("sampler radii stay below the cap")
    }
}

/// `r = 1 − (1 − u)³`, capped at [`SAMPLE_RADIUS_CAP`].
pub fn warp_radius(u: f64) -> f64 {
    let s = 1.0 - u;
    (1.0 - s * s * s).clamp(0.0, SAMPLE_RADIUS_CAP)
}

/// Independent random stream for trial `index` under `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform (area measure) point of the polydisc of radius `max_radius`.
pub fn random_point<R: Rng>(rng: &mut R, dim: usize, max_radius: f64) -> PolydiscPoint {
    let coords = (0..dim)
        .map(|_| {
            let r = max_radius * rng.random::<f64>().sqrt();
            Complex64::from_polar(r.min(SAMPLE_RADIUS_CAP), TAU * rng.random::<f64>())
        })
        .collect();
    PolydiscPoint::new(coords).expect("radius below the cap")
}

/// Random point with boundary-warped radii.
pub fn random_boundary_point<R: Rng>(rng: &mut R, dim: usize) -> PolydiscPoint {
    let coords = (0..dim)
        .map(|_| Complex64::from_polar(warp_radius(rng.random()), TAU * rng.random::<f64>()))
        .collect();
    PolydiscPoint::new(coords).expect("radius below the cap")
}

/// Pulls every coordinate back inside the radius cap.
pub fn clip_to_cap(coords: &mut [Complex64]) {
    for c in coords {
        let r = c.norm();
        if r > SAMPLE_RADIUS_CAP {
            *c *= SAMPLE_RADIUS_CAP / r;
        }
    }
}
