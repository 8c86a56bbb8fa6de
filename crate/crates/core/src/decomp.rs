//! Truncated SVD bipartitions and QR isometrization.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::{DenseTensor, Error, Mat, Result, C64, ZERO};

/// Bond truncation policy. `rel_tol` bounds the discarded weight, i.e. the
/// fraction of the squared singular values that may be dropped.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncationSpec {
    pub max_bond: usize,
    pub rel_tol: f64,
}

impl TruncationSpec {
    pub fn new(max_bond: usize, rel_tol: f64) -> Result<Self> {
        if max_bond < 1 {
            return Err(Error::InvalidArgument("max_bond must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&rel_tol) {
            return Err(Error::InvalidArgument(format!("rel_tol {rel_tol} outside [0, 1)")));
        }
        Ok(Self { max_bond, rel_tol })
    }

    /// No truncation beyond numerically zero singular values.
    pub fn exact() -> Self {
        Self {
            max_bond: usize::MAX,
            rel_tol: 0.0,
        }
    }

    pub fn bond(max_bond: usize) -> Self {
        Self {
            max_bond: max_bond.max(1),
            rel_tol: 0.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct DecompositionResult {
    /// Left isometry with labels `left_labels ++ [bond]`.
    pub left: DenseTensor,
    /// Kept singular values, nonincreasing.
    pub singular_values: Vec<f64>,
    /// Right isometry with labels `[bond] ++ remaining labels`.
    pub right: DenseTensor,
    pub discarded_weight: f64,
}

/// Number of singular values to keep. Values below the numerical rank
/// threshold are always dropped; ties at the cut are resolved by stored order.
pub(crate) fn kept_rank(s: &[f64], spec: &TruncationSpec, rows: usize, cols: usize) -> usize {
    let smax = s.first().copied().unwrap_or(0.0);
    let eps = smax * f64::EPSILON * (rows.max(cols) as f64) * 4.0;
    let numerical = s.iter().take_while(|&&x| x > eps).count().max(1);
    let total: f64 = s.iter().map(|x| x * x).sum();
    let mut k = numerical;
    if total > 0.0 && spec.rel_tol > 0.0 {
        let mut tail = s[numerical..].iter().map(|x| x * x).sum::<f64>();
        while k > 1 && (tail + s[k - 1] * s[k - 1]) / total <= spec.rel_tol {
            tail += s[k - 1] * s[k - 1];
            k -= 1;
        }
    }
    k.min(spec.max_bond).max(1)
}

/// Sorted thin SVD `m = u diag(s) vt` with `s` nonincreasing.
pub(crate) fn sorted_svd(m: Mat) -> (Mat, Vec<f64>, Mat) {
    let svd = m.svd(true, true);
    let u = svd.u.expect("u requested");
    let vt = svd.v_t.expect("v_t requested");
    let s = svd.singular_values;
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[b].partial_cmp(&s[a]).unwrap_or(core::cmp::Ordering::Equal));
    let us = Mat::from_fn(u.nrows(), order.len(), |i, j| u[(i, order[j])]);
    let vts = Mat::from_fn(order.len(), vt.ncols(), |i, j| vt[(order[i], j)]);
    (us, order.iter().map(|&k| s[k]).collect(), vts)
}

/// Splits `t` into `left · diag(s) · right` across the bipartition
/// `left_labels | rest`, truncating per `spec`. The new index is `bond`.
pub fn svd_split(
    t: &DenseTensor,
    left_labels: &[&str],
    bond: &str,
    spec: &TruncationSpec,
) -> Result<DecompositionResult> {
    if left_labels.is_empty() || left_labels.len() >= t.rank() {
        return Err(Error::InvalidBipartition(format!(
            "{} of {} labels on the left",
            left_labels.len(),
            t.rank()
        )));
    }
    let right_labels: Vec<String> = t
        .labels()
        .iter()
        .filter(|l| !left_labels.contains(&l.as_str()))
        .cloned()
        .collect();
    if right_labels.len() + left_labels.len() != t.rank() {
        return Err(Error::InvalidBipartition("left labels not unique".into()));
    }
    if t.has_label(bond) && !left_labels.contains(&bond) && !right_labels.iter().any(|l| l == bond) {
        return Err(Error::DuplicateLabel(bond.to_string()));
    }
    let right_refs: Vec<&str> = right_labels.iter().map(|s| s.as_str()).collect();
    let ldims = left_labels.iter().map(|l| t.dim(l)).collect::<Result<Vec<_>>>()?;
    let rdims = right_refs.iter().map(|l| t.dim(l)).collect::<Result<Vec<_>>>()?;
    let m = t.to_matrix(left_labels)?;
    let (rows, cols) = m.shape();
    let (u, s, vt) = sorted_svd(m);
    let k = kept_rank(&s, spec, rows, cols);
    let total: f64 = s.iter().map(|x| x * x).sum();
    let dropped: f64 = s[k..].iter().map(|x| x * x).sum();
    let discarded_weight = if total > 0.0 { dropped / total } else { 0.0 };

    let uk = u.columns(0, k).into_owned();
    let vk = vt.rows(0, k).into_owned();
    let left = DenseTensor::from_matrix(&uk, &ldims, left_labels, &[k], &[bond])?;
    let right = DenseTensor::from_matrix(&vk, &[k], &[bond], &rdims, &right_refs)?;
    Ok(DecompositionResult {
        left,
        singular_values: s[..k].to_vec(),
        right,
        discarded_weight,
    })
}

/// Label used for the old bond on the `R` factor of [`isometrize`].
pub fn primed(label: &str) -> String {
    let mut s = label.to_string();
    s.push('\'');
    s
}

/// QR split `t = Q · R` isolating `tail`. `Q` keeps the labels of `t` and is
/// an isometry onto its (possibly shrunk) `tail` index; `R` carries labels
/// `[tail, tail']` where `tail'` is the old index. Diagonal of `R` is made
/// real nonnegative, so an isometric input comes back unchanged with `R = I`.
pub fn isometrize(t: &DenseTensor, tail: &str) -> Result<(DenseTensor, DenseTensor)> {
    let ax = t.axis(tail)?;
    if t.norm_sqr() == 0.0 {
        return Err(Error::RankDeficient("zero tensor cannot be isometrized".into()));
    }
    let others: Vec<&str> = t
        .labels()
        .iter()
        .filter(|l| l.as_str() != tail)
        .map(|l| l.as_str())
        .collect();
    let odims: Vec<usize> = others.iter().map(|l| t.dim(l)).collect::<Result<_>>()?;
    let n = t.shape()[ax];
    let m = t.to_matrix(&others)?;
    let qr = m.qr();
    let mut q = qr.q();
    let mut r = qr.r();
    let k = q.ncols();
    for j in 0..k {
        let d = r[(j, j)];
        let a = d.norm();
        if a > 0.0 {
            let ph = d / a;
            for i in 0..q.nrows() {
                q[(i, j)] *= ph;
            }
            for c in 0..r.ncols() {
                r[(j, c)] *= ph.conj();
            }
        }
    }
    let qt = DenseTensor::from_matrix(&q, &odims, &others, &[k], &[tail])?;
    let labels: Vec<&str> = t.labels().iter().map(|s| s.as_str()).collect();
    let qt = qt.permute_to(&labels)?;
    let old = primed(tail);
    let rt = DenseTensor::from_matrix(&r, &[k], &[tail], &[n], &[old.as_str()])?;
    Ok((qt, rt))
}

/// Frobenius distance between `Q†Q` (contracted over everything but `tail`)
/// and the identity.
pub fn isometry_defect(q: &DenseTensor, tail: &str) -> Result<f64> {
    let g = DenseTensor::sandwich(q, q, tail)?;
    let id = Mat::identity(g.nrows(), g.ncols());
    Ok((g - id).norm())
}

pub(crate) fn diag(values: &[f64]) -> Mat {
    let n = values.len();
    Mat::from_fn(n, n, |i, j| if i == j { C64::new(values[i], 0.0) } else { ZERO })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contract;
    use alloc::vec;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn bell() -> DenseTensor {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        DenseTensor::new(vec![2, 2], &["a", "b"], vec![c(h), ZERO, ZERO, c(h)]).unwrap()
    }

    #[test]
    fn product_state_has_one_singular_value() {
        let t = DenseTensor::new(vec![2, 2], &["a", "b"], vec![c(1.0), ZERO, ZERO, ZERO]).unwrap();
        let d = svd_split(&t, &["a"], "k", &TruncationSpec::exact()).unwrap();
        assert_eq!(d.singular_values.len(), 1);
        assert!((d.singular_values[0] - 1.0).abs() < 1e-15);
        assert_eq!(d.discarded_weight, 0.0);
    }

    #[test]
    fn bell_state_spectrum_and_truncation() {
        let d = svd_split(&bell(), &["a"], "k", &TruncationSpec::exact()).unwrap();
        let h = core::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(d.singular_values.len(), 2);
        for s in &d.singular_values {
            assert!((s - h).abs() < 1e-14);
        }
        let d1 = svd_split(&bell(), &["a"], "k", &TruncationSpec::bond(1)).unwrap();
        assert!((d1.discarded_weight - 0.5).abs() < 1e-14);
    }

    #[test]
    fn rel_tol_acts_on_weight() {
        let t = DenseTensor::new(
            vec![3, 3],
            &["a", "b"],
            vec![c(1.0), ZERO, ZERO, ZERO, c(0.1), ZERO, ZERO, ZERO, c(0.01)],
        )
        .unwrap();
        let total = 1.0 + 0.01 + 0.0001;
        let spec = TruncationSpec::new(10, 0.0002 / total).unwrap();
        let d = svd_split(&t, &["a"], "k", &spec).unwrap();
        assert_eq!(d.singular_values.len(), 2);
        let spec = TruncationSpec::new(10, 0.00009 / total).unwrap();
        assert_eq!(svd_split(&t, &["a"], "k", &spec).unwrap().singular_values.len(), 3);
    }

    #[test]
    fn bipartition_errors() {
        let b = bell();
        assert!(matches!(
            svd_split(&b, &[], "k", &TruncationSpec::exact()),
            Err(Error::InvalidBipartition(_))
        ));
        assert!(matches!(
            svd_split(&b, &["a", "b"], "k", &TruncationSpec::exact()),
            Err(Error::InvalidBipartition(_))
        ));
        assert!(TruncationSpec::new(0, 0.0).is_err());
        assert!(TruncationSpec::new(3, 1.0).is_err());
    }

    #[test]
    fn isometrize_random_matrix() {
        let mut rng = crate::random::seeded(3);
        let t = crate::random::gaussian_tensor(&mut rng, vec![4, 2], &["x", "y"]).unwrap();
        let (q, r) = isometrize(&t, "y").unwrap();
        assert!(isometry_defect(&q, "y").unwrap() < 1e-12);
        let back = contract(&q, &r, &[("y", "y")]).unwrap().relabel("y'", "y").unwrap();
        for (u, v) in back.data().iter().zip(t.data()) {
            assert!((u - v).norm() < 1e-12);
        }
    }

    #[test]
    fn isometric_input_is_fixed_point() {
        let mut rng = crate::random::seeded(5);
        let t = crate::random::gaussian_tensor(&mut rng, vec![3, 2, 4], &["a", "b", "c"]).unwrap();
        let (q, _) = isometrize(&t, "b").unwrap();
        let (q2, r2) = isometrize(&q, "b").unwrap();
        let d: f64 = q2.data().iter().zip(q.data()).map(|(a, b)| (a - b).norm_sqr()).sum();
        assert!(d < 1e-24);
        let rm = r2.to_matrix(&["b"]).unwrap();
        assert!((rm.adjoint() * &rm - Mat::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn zero_tensor_rejected() {
        let t = DenseTensor::zeros(vec![2, 2], &["a", "b"]).unwrap();
        assert!(matches!(isometrize(&t, "b"), Err(Error::RankDeficient(_))));
        assert!(matches!(isometrize(&t, "z"), Err(Error::LabelNotFound(_))));
    }
}
