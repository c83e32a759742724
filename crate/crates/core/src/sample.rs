//! Seeded random test inputs: symmetric blocks, parameter vectors and the
//! symplectic matrices they generate.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::mat::Mat;
use crate::param::{packed_len, sp_from_params, ParamVector, SP_BLOCKS};

/// The generator used for every seeded draw in this crate.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal_vec<R: Rng + ?Sized>(rng: &mut R, n: usize, scale: f64) -> Vec<f64> {
    (0..n)
        .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
        .collect()
}

/// `d x d` matrix with independent `N(0, scale²)` entries.
pub fn normal_mat<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, scale: f64) -> Mat {
    Mat::from_vec(rows, cols, normal_vec(rng, rows * cols, scale)).expect("finite normal draws")
}

/// Symmetric matrix whose packed lower triangle is `N(0, scale²)`.
pub fn normal_symmetric<R: Rng + ?Sized>(rng: &mut R, d: usize, scale: f64) -> Mat {
    crate::param::pa_unpack(&normal_vec(rng, packed_len(d), scale), d)
        .expect("packed length matches")
}

/// `count` full-size blocks of `N(0, scale²)` parameters.
pub fn normal_params<R: Rng + ?Sized>(
    rng: &mut R,
    d: usize,
    count: usize,
    scale: f64,
) -> ParamVector {
    ParamVector {
        d,
        blocks: (0..count)
            .map(|_| normal_vec(rng, packed_len(d), scale))
            .collect(),
    }
}

/// Product of nine alternating unit factors with `N(0, scale²)` blocks.
pub fn random_symplectic<R: Rng + ?Sized>(rng: &mut R, d: usize, scale: f64) -> Result<Mat> {
    Ok(sp_from_params(&normal_params(rng, d, SP_BLOCKS, scale))?.product())
}
