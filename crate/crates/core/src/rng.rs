//! Seeded random streams and the random objects used throughout the crate.
//!
//! Every stochastic routine takes a `u64` seed. Independent sub-streams are
//! derived with [`stream`]: the base seed keys a ChaCha8 generator and a
//! 64-bit stream id (a SplitMix64 fold of the integer path, e.g.
//! `(d, m, trial)`) selects the ChaCha stream. Streams for distinct paths do
//! not overlap, so trials can run in any order on any number of threads.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{ComplexVec, HermMat, C64};

pub type StreamRng = ChaCha8Rng;

/// SplitMix64 finaliser.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream id for an integer path such as `[d, m, trial]`.
pub fn stream_id(path: &[u64]) -> u64 {
    path.iter().fold(0x6C69_6674_6B69_7401, |acc, &p| mix64(acc ^ mix64(p)))
}

/// Generator for `seed` on the stream selected by `path`.
pub fn stream(seed: u64, path: &[u64]) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id(path));
    rng
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// Haar-random unit vector (normalised complex Gaussian).
pub fn haar_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexVec {
    loop {
        let v = DVector::from_fn(d, |_, _| complex_normal(rng));
        let n = v.norm();
        if n > 1e-300 {
            return ComplexVec::from_dvector(v / C64::new(n, 0.0));
        }
    }
}

/// Hermitian matrix with i.i.d. Gaussian entries (GUE-like, unnormalised).
pub fn gaussian_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> HermMat {
    let g = DMatrix::from_fn(d, d, |_, _| complex_normal(rng));
    HermMat::from_matrix(g)
}

/// Real Gaussian vector.
pub fn gaussian_reals<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}
