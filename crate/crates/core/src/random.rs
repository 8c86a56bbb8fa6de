//! Seeded random tensors.

use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::{DenseTensor, Result, C64};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Complex standard Gaussian with unit variance per component.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<C64> {
    (0..n).map(|_| complex_gaussian(rng)).collect()
}

pub fn gaussian_tensor<R: Rng + ?Sized>(
    rng: &mut R,
    shape: Vec<usize>,
    labels: &[&str],
) -> Result<DenseTensor> {
    let n = shape.iter().product();
    DenseTensor::new(shape, labels, gaussian_vector(rng, n))
}
