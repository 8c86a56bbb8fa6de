//! Effective Hamiltonians acting on a single tensor as sums of products of
//! per-leg matrices. Shared by DMRG and the tree sweep.

use alloc::borrow::Cow;
use alloc::vec;
use alloc::vec::Vec;

use crate::lanczos::LinearMap;
use crate::tensor::apply_axis;
use crate::{Mat, C64, ZERO};

struct Product<'a> {
    coeff: C64,
    factors: Vec<(usize, Cow<'a, Mat>)>,
}

/// `H = Σ_t c_t ⊗_k F_{t,k}` on a tensor with leg dimensions `dims`.
/// Absent factors are identities.
pub struct EffectiveOperator<'a> {
    dims: Vec<usize>,
    single: Vec<Option<Mat>>,
    products: Vec<Product<'a>>,
}

impl<'a> EffectiveOperator<'a> {
    pub fn new(dims: Vec<usize>) -> Self {
        let single = vec![None; dims.len()];
        Self {
            dims,
            single,
            products: Vec::new(),
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Adds `coeff · ⊗ factors`. Single-leg terms are merged per leg.
    pub fn add(&mut self, coeff: C64, mut factors: Vec<(usize, &'a Mat)>) {
        factors.sort_by_key(|f| f.0);
        match factors.len() {
            0 => {
                let n = self.dims[0];
                self.add_single(0, &Mat::identity(n, n), coeff);
            }
            1 => self.add_single(factors[0].0, factors[0].1, coeff),
            _ => self.products.push(Product {
                coeff,
                factors: factors.into_iter().map(|(l, m)| (l, Cow::Borrowed(m))).collect(),
            }),
        }
    }

    fn add_single(&mut self, leg: usize, m: &Mat, coeff: C64) {
        debug_assert_eq!(m.nrows(), self.dims[leg]);
        match &mut self.single[leg] {
            Some(acc) => *acc += m * coeff,
            slot => *slot = Some(m * coeff),
        }
    }

    pub fn n_terms(&self) -> usize {
        self.products.len() + self.single.iter().flatten().count()
    }

    /// `<x|H|x>` for a vector of matching length.
    pub fn expectation(&self, x: &[C64]) -> f64 {
        let mut y = vec![ZERO; x.len()];
        self.apply(x, &mut y);
        crate::lanczos::dot(x, &y).re
    }
}

impl LinearMap for EffectiveOperator<'_> {
    fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        y.iter_mut().for_each(|z| *z = ZERO);
        for (leg, m) in self.single.iter().enumerate() {
            if let Some(m) = m {
                let z = apply_axis(&self.dims, leg, m, x);
                for (a, b) in y.iter_mut().zip(z) {
                    *a += b;
                }
            }
        }
        for p in &self.products {
            let mut z = apply_axis(&self.dims, p.factors[0].0, &p.factors[0].1, x);
            for (leg, m) in &p.factors[1..] {
                z = apply_axis(&self.dims, *leg, m, &z);
            }
            for (a, b) in y.iter_mut().zip(z) {
                *a += p.coeff * b;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_kronecker_product() {
        let mut rng = crate::random::seeded(2);
        let a = Mat::from_fn(2, 2, |_, _| crate::random::complex_gaussian(&mut rng));
        let b = Mat::from_fn(3, 3, |_, _| crate::random::complex_gaussian(&mut rng));
        let d = Mat::from_fn(3, 3, |_, _| crate::random::complex_gaussian(&mut rng));
        let mut op = EffectiveOperator::new(vec![2, 3]);
        op.add(C64::new(0.5, 1.0), vec![(0, &a), (1, &b)]);
        op.add(C64::new(2.0, 0.0), vec![(1, &d)]);
        let i2 = Mat::identity(2, 2);
        let full = a.kronecker(&b) * C64::new(0.5, 1.0) + i2.kronecker(&d) * C64::new(2.0, 0.0);
        let x = crate::random::gaussian_vector(&mut rng, 6);
        let mut y = vec![ZERO; 6];
        op.apply(&x, &mut y);
        for i in 0..6 {
            let e: C64 = (0..6).map(|j| full[(i, j)] * x[j]).sum();
            assert!((e - y[i]).norm() < 1e-12);
        }
    }
}
