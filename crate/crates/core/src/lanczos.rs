//! Lowest eigenpair of a Hermitian linear map by thick-restart Lanczos with
//! full reorthogonalization.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Mat, Result, C64, ZERO};

/// A Hermitian linear map on `C^dim`.
pub trait LinearMap {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[C64], y: &mut [C64]);
}

/// Adapter turning a closure into a [`LinearMap`].
pub struct FnMap<F> {
    pub dim: usize,
    pub f: F,
}

impl<F: Fn(&[C64], &mut [C64])> LinearMap for FnMap<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn apply(&self, x: &[C64], y: &mut [C64]) {
        (self.f)(x, y)
    }
}

impl LinearMap for Mat {
    fn dim(&self) -> usize {
        self.nrows()
    }
    fn apply(&self, x: &[C64], y: &mut [C64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = (0..self.ncols()).map(|j| self[(i, j)] * x[j]).sum();
        }
    }
}

#[derive(Clone, Debug)]
pub struct Eigenpair {
    pub value: f64,
    pub vector: Vec<C64>,
    /// `‖Hv − λv‖` of the returned pair.
    pub residual: f64,
    /// Largest Ritz value magnitude seen, used as the scale of `tol`.
    pub norm_estimate: f64,
    /// Gap to the second Ritz value of the final subspace, if available.
    pub gap: Option<f64>,
    pub matvecs: usize,
}

pub(crate) fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn norm(a: &[C64]) -> f64 {
    libm::sqrt(a.iter().map(|z| z.norm_sqr()).sum())
}

fn axpy(y: &mut [C64], a: C64, x: &[C64]) {
    for (u, v) in y.iter_mut().zip(x) {
        *u += a * v;
    }
}

const KRYLOV: usize = 48;
const KEEP: usize = 8;

/// Lowest eigenpair with `‖Hv − λv‖ ≤ tol · ‖H‖_est`. `max_iter` bounds the
/// number of map applications.
pub fn lanczos_lowest<M: LinearMap + ?Sized>(
    map: &M,
    start: &[C64],
    tol: f64,
    max_iter: usize,
) -> Result<Eigenpair> {
    let n = map.dim();
    if start.len() != n {
        return Err(Error::InvalidArgument("start vector has wrong length".into()));
    }
    let s0 = norm(start);
    if !(s0 > 0.0) {
        return Err(Error::InvalidArgument("start vector is zero".into()));
    }
    let kmax = KRYLOV.min(n);
    let keep = KEEP.min(kmax.saturating_sub(1)).max(1);
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(kmax);
    let mut images: Vec<Vec<C64>> = Vec::with_capacity(kmax);
    let mut t = Mat::zeros(0, 0);
    let mut next: Vec<C64> = start.iter().map(|z| z / s0).collect();
    let mut matvecs = 0usize;
    let mut norm_est = 0.0f64;
    let mut best: Option<(f64, Vec<C64>, f64)> = None;

    loop {
        // Append the normalized expansion vector and its image.
        let mut w = vec![ZERO; n];
        map.apply(&next, &mut w);
        matvecs += 1;
        let k = basis.len();
        let mut t2 = Mat::zeros(k + 1, k + 1);
        t2.view_mut((0, 0), (k, k)).copy_from(&t);
        for (i, v) in basis.iter().enumerate() {
            let h = dot(v, &w);
            t2[(i, k)] = h;
            t2[(k, i)] = h.conj();
        }
        t2[(k, k)] = C64::new(dot(&next, &w).re, 0.0);
        t = t2;
        basis.push(next);
        images.push(w);

        let eig = t.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| {
            eig.eigenvalues[a]
                .partial_cmp(&eig.eigenvalues[b])
                .unwrap_or(core::cmp::Ordering::Equal)
        });
        for &i in &order {
            norm_est = norm_est.max(eig.eigenvalues[i].abs());
        }
        let theta = eig.eigenvalues[order[0]];
        let y = eig.eigenvectors.column(order[0]).into_owned();
        let mut x = vec![ZERO; n];
        let mut hx = vec![ZERO; n];
        for (j, (v, w)) in basis.iter().zip(&images).enumerate() {
            axpy(&mut x, y[j], v);
            axpy(&mut hx, y[j], w);
        }
        let xn = norm(&x);
        x.iter_mut().for_each(|z| *z /= xn);
        hx.iter_mut().for_each(|z| *z /= xn);
        let mut r = hx.clone();
        axpy(&mut r, C64::new(-theta, 0.0), &x);
        let res = norm(&r);
        if best.as_ref().map_or(true, |b| res < b.2) {
            best = Some((theta, x.clone(), res));
        }
        let gap = (order.len() > 1).then(|| eig.eigenvalues[order[1]] - theta);
        let done = |res: f64| res <= tol * norm_est || res == 0.0;
        if done(res) {
            return Ok(Eigenpair {
                value: theta,
                vector: x,
                residual: res,
                norm_estimate: norm_est,
                gap,
                matvecs,
            });
        }

        // Expansion direction: residual orthogonalized against the basis.
        let mut z = r;
        for _ in 0..2 {
            for v in &basis {
                let c = dot(v, &z);
                axpy(&mut z, -c, v);
            }
        }
        let zn = norm(&z);
        let exhausted = basis.len() == n || zn <= 1e-13 * res.max(f64::MIN_POSITIVE);
        if exhausted || matvecs >= max_iter {
            let (value, vector, residual) = best.take().expect("at least one Ritz pair");
            if exhausted && residual <= 1e3 * f64::EPSILON * norm_est.max(1.0) {
                return Ok(Eigenpair {
                    value,
                    vector,
                    residual,
                    norm_estimate: norm_est,
                    gap,
                    matvecs,
                });
            }
            return Err(Error::NotConverged { matvecs, residual });
        }
        z.iter_mut().for_each(|c| *c /= zn);

        if basis.len() == kmax {
            // Thick restart on the lowest `keep` Ritz vectors.
            let mut nb = Vec::with_capacity(keep);
            let mut ni = Vec::with_capacity(keep);
            for &c in order.iter().take(keep) {
                let yc = eig.eigenvectors.column(c);
                let mut v = vec![ZERO; n];
                let mut w = vec![ZERO; n];
                for (j, (b, im)) in basis.iter().zip(&images).enumerate() {
                    axpy(&mut v, yc[j], b);
                    axpy(&mut w, yc[j], im);
                }
                nb.push(v);
                ni.push(w);
            }
            basis = nb;
            images = ni;
            let kk = basis.len();
            t = Mat::zeros(kk, kk);
            for i in 0..kk {
                for j in 0..kk {
                    t[(i, j)] = dot(&basis[i], &images[j]);
                }
            }
            let th = t.clone();
            t = (th.clone() + th.adjoint()).map(|z| z * 0.5);
            // Re-orthogonalize the expansion vector against the new basis.
            for _ in 0..2 {
                for v in &basis {
                    let c = dot(v, &z);
                    axpy(&mut z, -c, v);
                }
            }
            let zn = norm(&z);
            z.iter_mut().for_each(|c| *c /= zn);
        }
        next = z;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn diagonal_map() {
        let m = Mat::from_diagonal(&nalgebra::DVector::from_vec(vec![c(3.0), c(1.0), c(2.0)]));
        let e = lanczos_lowest(&m, &[c(1.0), c(1.0), c(1.0)], 1e-12, 100).unwrap();
        assert!((e.value - 1.0).abs() < 1e-12);
        assert!((e.vector[1].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pauli_x() {
        let m = Mat::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]);
        let e = lanczos_lowest(&m, &[c(1.0), c(0.3)], 1e-12, 100).unwrap();
        assert!((e.value + 1.0).abs() < 1e-12);
        let ph = e.vector[0] / e.vector[0].norm();
        let h = core::f64::consts::FRAC_1_SQRT_2;
        assert!((e.vector[0] / ph - c(h)).norm() < 1e-12);
        assert!((e.vector[1] / ph + c(h)).norm() < 1e-12);
    }

    #[test]
    fn zero_start_rejected() {
        let m = Mat::identity(2, 2);
        assert!(lanczos_lowest(&m, &[ZERO, ZERO], 1e-12, 10).is_err());
    }

    #[test]
    fn iteration_budget_reports_residual() {
        let mut rng = crate::random::seeded(11);
        let n = 400;
        let a = Mat::from_fn(n, n, |_, _| crate::random::complex_gaussian(&mut rng));
        let h = &a + a.adjoint();
        let start = crate::random::gaussian_vector(&mut rng, n);
        match lanczos_lowest(&h, &start, 1e-14, 5) {
            Err(Error::NotConverged { matvecs, residual }) => {
                assert_eq!(matvecs, 5);
                assert!(residual > 0.0);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }
}
