//! Seeded random streams.
//!
//! All sampling uses ChaCha8, a counter-based generator. A run is keyed by a
//! 64-bit seed; independent tasks draw from numbered substreams of that seed
//! so results never depend on scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::tensor::{CMatrix, C64};

pub type StreamRng = ChaCha8Rng;

/// Generator for substream `stream` of `seed`.
pub fn stream(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Substream for `(purpose, index)`; purposes keep unrelated draws apart.
pub fn substream(seed: u64, purpose: u32, index: u64) -> StreamRng {
    stream(seed, ((purpose as u64) << 40) ^ index)
}

pub fn complex_gaussian(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-distributed unit vector.
pub fn haar_vector(rng: &mut impl Rng, dim: usize) -> Vec<C64> {
    let mut v: Vec<C64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= norm);
    v
}

/// Haar-distributed unitary from the phase-corrected QR of a Ginibre matrix.
pub fn haar_unitary(rng: &mut impl Rng, dim: usize) -> CMatrix {
    let g = ginibre(rng, dim, dim).to_na();
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    CMatrix::from_na(&q)
}

/// First `cols` columns of a Haar unitary: a random isometry `cols → rows`.
pub fn haar_isometry(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    let u = haar_unitary(rng, rows);
    CMatrix::from_fn(rows, cols, |r, c| u[(r, c)])
}

/// Uniform point on the probability simplex.
pub fn simplex(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= s);
    w
}
