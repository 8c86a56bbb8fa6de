//! Transfer matrices of uniform MPS and correlation lengths.

use alloc::vec::Vec;

use super::{site_matrices, L, P, R};
use crate::{DenseTensor, Error, Mat, Result, C64, ZERO};

/// Tolerance on `|λ_1| = 1` for [`correlation_lengths`].
pub const NORMALIZATION_TOL: f64 = 1e-6;
/// Two leading moduli closer than this count as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct TransferMatrix {
    /// `E = Σ_s conj(A^s) ⊗ A^s`, rows `(a', a)`, columns `(b', b)`.
    pub matrix: Mat,
    /// Eigenvalues sorted by nonincreasing modulus.
    pub spectrum: Vec<C64>,
}

impl TransferMatrix {
    /// Whether the leading eigenvalue is unique in modulus.
    pub fn is_clustering(&self) -> bool {
        match self.spectrum.as_slice() {
            [a, b, ..] => a.norm() - b.norm() > DEGENERACY_TOL,
            _ => true,
        }
    }
}

/// `Σ_{s',s} O_{s's} conj(A^{s'}) ⊗ A^s`; `None` means `O = I`.
pub(crate) fn dressed_transfer(t: &DenseTensor, op: Option<&Mat>) -> Mat {
    let ms = site_matrices(t);
    let (dl, dr) = (t.shape()[0], t.shape()[2]);
    let mut e = Mat::zeros(dl * dl, dr * dr);
    for (sp, ap) in ms.iter().enumerate() {
        let bra = ap.map(|z| z.conj());
        for (s, a) in ms.iter().enumerate() {
            let c = match op {
                None if s == sp => C64::new(1.0, 0.0),
                None => ZERO,
                Some(o) => o[(sp, s)],
            };
            if c != ZERO {
                e += bra.kronecker(a) * c;
            }
        }
    }
    e
}

pub(crate) fn spectrum(m: &Mat) -> Vec<C64> {
    let (_, t) = m.clone().schur().unpack();
    let mut ev: Vec<C64> = (0..t.nrows()).map(|i| t[(i, i)]).collect();
    ev.sort_by(|a, b| b.norm().partial_cmp(&a.norm()).unwrap_or(core::cmp::Ordering::Equal));
    ev
}

pub fn transfer_matrix(site: &DenseTensor) -> Result<TransferMatrix> {
    let t = site.permute_to(&[L, P, R])?;
    if t.shape()[0] != t.shape()[2] {
        return Err(Error::DimensionMismatch {
            left: L.into(),
            right: R.into(),
            left_dim: t.shape()[0],
            right_dim: t.shape()[2],
        });
    }
    let matrix = dressed_transfer(&t, None);
    let spectrum = spectrum(&matrix);
    Ok(TransferMatrix { matrix, spectrum })
}

/// `ξ_μ = −1/ln|λ_μ|` for `μ ≥ 2`. Zero eigenvalues give `ξ = 0`, eigenvalues
/// degenerate in modulus with `λ_1` give infinity.
pub fn correlation_lengths(tm: &TransferMatrix) -> Result<Vec<f64>> {
    let l1 = tm.spectrum.first().map(|z| z.norm()).unwrap_or(0.0);
    if (l1 - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized(l1));
    }
    Ok(tm.spectrum[1..]
        .iter()
        .map(|z| {
            let a = z.norm();
            if a < 1e-14 {
                0.0
            } else if a >= 1.0 - DEGENERACY_TOL {
                f64::INFINITY
            } else {
                -1.0 / libm::log(a)
            }
        })
        .collect())
}

/// Spin-1 valence-bond site tensor with physical order `m = +1, 0, −1`,
/// normalized so that `Σ_s A^s A^s† = I`.
pub fn aklt_tensor() -> DenseTensor {
    let a = libm::sqrt(2.0 / 3.0);
    let b = libm::sqrt(1.0 / 3.0);
    let c = |x: f64| C64::new(x, 0.0);
    // A^s[l][r] for s = +, 0, −.
    let mats = [
        [[ZERO, c(a)], [ZERO, ZERO]],
        [[c(-b), ZERO], [ZERO, c(b)]],
        [[ZERO, ZERO], [c(-a), ZERO]],
    ];
    DenseTensor::from_fn(alloc::vec![2, 3, 2], &[L, P, R], |i| mats[i[1]][i[0]][i[2]])
        .expect("static shape")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aklt_spectrum() {
        let tm = transfer_matrix(&aklt_tensor()).unwrap();
        assert!((tm.spectrum[0] - C64::new(1.0, 0.0)).norm() < 1e-12);
        for z in &tm.spectrum[1..] {
            assert!((z - C64::new(-1.0 / 3.0, 0.0)).norm() < 1e-10);
        }
        let xi = correlation_lengths(&tm).unwrap();
        assert!((xi[0] - 1.0 / libm::log(3.0)).abs() < 1e-10);
    }

    #[test]
    fn product_tensor_is_trivial() {
        let t = DenseTensor::new(alloc::vec![1, 2, 1], &[L, P, R], alloc::vec![C64::new(1.0, 0.0), ZERO]).unwrap();
        let tm = transfer_matrix(&t).unwrap();
        assert_eq!(tm.matrix.shape(), (1, 1));
        assert!((tm.matrix[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(correlation_lengths(&tm).unwrap().is_empty());
    }

    #[test]
    fn unnormalized_rejected() {
        let mut t = aklt_tensor();
        t.scale(C64::new(2.0, 0.0));
        let tm = transfer_matrix(&t).unwrap();
        assert!(matches!(correlation_lengths(&tm), Err(Error::NotNormalized(_))));
    }
}
