//! Dense complex tensors with named indices.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Mat, Result, C64, ZERO};

/// Row-major complex array whose axes carry unique string labels.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseTensor {
    shape: Vec<usize>,
    labels: Vec<String>,
    data: Vec<C64>,
}

fn check_labels(labels: &[String], dims: usize) -> Result<()> {
    if labels.len() != dims {
        return Err(Error::LabelCount {
            labels: labels.len(),
            dims,
        });
    }
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return Err(Error::DuplicateLabel(l.clone()));
        }
    }
    Ok(())
}

pub(crate) fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1; shape.len()];
    for k in (0..shape.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * shape[k + 1];
    }
    s
}

fn owned_labels(labels: &[&str]) -> Vec<String> {
    labels.iter().map(|s| s.to_string()).collect()
}

impl DenseTensor {
    pub fn new(shape: Vec<usize>, labels: &[&str], data: Vec<C64>) -> Result<Self> {
        Self::from_parts(shape, owned_labels(labels), data)
    }

    pub fn from_parts(shape: Vec<usize>, labels: Vec<String>, data: Vec<C64>) -> Result<Self> {
        if shape.contains(&0) {
            return Err(Error::ZeroDimension);
        }
        check_labels(&labels, shape.len())?;
        let expected: usize = shape.iter().product();
        if expected != data.len() {
            return Err(Error::DataLength {
                shape,
                expected,
                actual: data.len(),
            });
        }
        Ok(Self {
            shape,
            labels,
            data,
        })
    }

    pub fn zeros(shape: Vec<usize>, labels: &[&str]) -> Result<Self> {
        let n = shape.iter().product();
        Self::new(shape, labels, vec![ZERO; n])
    }

    /// Rank-0 tensor holding a single value.
    pub fn scalar(value: C64) -> Self {
        Self {
            shape: Vec::new(),
            labels: Vec::new(),
            data: vec![value],
        }
    }

    pub fn from_fn(
        shape: Vec<usize>,
        labels: &[&str],
        mut f: impl FnMut(&[usize]) -> C64,
    ) -> Result<Self> {
        let n: usize = shape.iter().product();
        let mut idx = vec![0usize; shape.len()];
        let mut data = Vec::with_capacity(n);
        for _ in 0..n {
            data.push(f(&idx));
            for k in (0..shape.len()).rev() {
                idx[k] += 1;
                if idx[k] < shape[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
        Self::new(shape, labels, data)
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn axis(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::LabelNotFound(label.to_string()))
    }

    pub fn has_label(&self, label: &str) -> bool {
        self.labels.iter().any(|l| l == label)
    }

    pub fn dim(&self, label: &str) -> Result<usize> {
        Ok(self.shape[self.axis(label)?])
    }

    pub fn get(&self, idx: &[usize]) -> C64 {
        let st = strides(&self.shape);
        self.data[idx.iter().zip(&st).map(|(i, s)| i * s).sum::<usize>()]
    }

    pub fn relabel(mut self, from: &str, to: &str) -> Result<Self> {
        let ax = self.axis(from)?;
        if from != to && self.has_label(to) {
            return Err(Error::DuplicateLabel(to.to_string()));
        }
        self.labels[ax] = to.to_string();
        Ok(self)
    }

    pub fn with_labels(mut self, labels: &[&str]) -> Result<Self> {
        let labels = owned_labels(labels);
        check_labels(&labels, self.shape.len())?;
        self.labels = labels;
        Ok(self)
    }

    /// Axis permutation: output axis `k` is input axis `order[k]`.
    pub fn permute(&self, order: &[usize]) -> Result<Self> {
        let r = self.rank();
        let mut seen = vec![false; r];
        if order.len() != r {
            return Err(Error::InvalidArgument("permutation length".into()));
        }
        for &o in order {
            if o >= r || seen[o] {
                return Err(Error::InvalidArgument("not a permutation".into()));
            }
            seen[o] = true;
        }
        if order.iter().enumerate().all(|(k, &o)| k == o) {
            return Ok(self.clone());
        }
        let in_st = strides(&self.shape);
        let shape: Vec<usize> = order.iter().map(|&o| self.shape[o]).collect();
        let labels: Vec<String> = order.iter().map(|&o| self.labels[o].clone()).collect();
        let st: Vec<usize> = order.iter().map(|&o| in_st[o]).collect();
        let n = self.data.len();
        let mut data = Vec::with_capacity(n);
        let mut idx = vec![0usize; r];
        let mut off = 0usize;
        for _ in 0..n {
            data.push(self.data[off]);
            for k in (0..r).rev() {
                idx[k] += 1;
                off += st[k];
                if idx[k] < shape[k] {
                    break;
                }
                off -= st[k] * shape[k];
                idx[k] = 0;
            }
        }
        Ok(Self {
            shape,
            labels,
            data,
        })
    }

    /// Reorders axes to follow `labels`.
    pub fn permute_to(&self, labels: &[&str]) -> Result<Self> {
        if labels.len() != self.rank() {
            return Err(Error::LabelCount {
                labels: labels.len(),
                dims: self.rank(),
            });
        }
        let order = labels
            .iter()
            .map(|l| self.axis(l))
            .collect::<Result<Vec<_>>>()?;
        self.permute(&order)
    }

    pub fn conj(&self) -> Self {
        let mut t = self.clone();
        t.data.iter_mut().for_each(|z| *z = z.conj());
        t
    }

    pub fn scale(&mut self, c: C64) {
        self.data.iter_mut().for_each(|z| *z *= c);
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.norm_sqr())
    }

    /// Inner product `<self|other>` over identically ordered data.
    pub fn inner(&self, other: &Self) -> C64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Matrix view with the given row labels (in order) and all remaining
    /// labels (in stored order) as columns.
    pub fn to_matrix(&self, row_labels: &[&str]) -> Result<Mat> {
        let (perm, rows) = self.grouped(row_labels)?;
        let cols = self.data.len() / rows;
        Ok(Mat::from_row_slice(rows, cols, &perm.data))
    }

    fn grouped(&self, row_labels: &[&str]) -> Result<(Self, usize)> {
        let mut order = Vec::with_capacity(self.rank());
        for l in row_labels {
            let ax = self.axis(l)?;
            if order.contains(&ax) {
                return Err(Error::DuplicateLabel(l.to_string()));
            }
            order.push(ax);
        }
        for ax in 0..self.rank() {
            if !order.contains(&ax) {
                order.push(ax);
            }
        }
        let rows = row_labels.iter().map(|l| self.dim(l)).product::<Result<usize>>()?;
        Ok((self.permute(&order)?, rows))
    }

    /// Inverse of [`DenseTensor::to_matrix`].
    pub fn from_matrix(
        m: &Mat,
        row_shape: &[usize],
        row_labels: &[&str],
        col_shape: &[usize],
        col_labels: &[&str],
    ) -> Result<Self> {
        let rows: usize = row_shape.iter().product();
        let cols: usize = col_shape.iter().product();
        if m.nrows() != rows || m.ncols() != cols {
            return Err(Error::InvalidArgument("matrix shape does not match tensor shape".into()));
        }
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(m[(i, j)]);
            }
        }
        let mut shape = row_shape.to_vec();
        shape.extend_from_slice(col_shape);
        let mut labels = owned_labels(row_labels);
        labels.extend(owned_labels(col_labels));
        Self::from_parts(shape, labels, data)
    }

    /// Applies `m` to the axis `label`: `y[.., i, ..] = sum_j m[i, j] x[.., j, ..]`.
    /// The axis dimension becomes `m.nrows()`.
    pub fn apply_on(&self, label: &str, m: &Mat) -> Result<Self> {
        let ax = self.axis(label)?;
        if m.ncols() != self.shape[ax] {
            return Err(Error::DimensionMismatch {
                left: "operator".into(),
                right: label.to_string(),
                left_dim: m.ncols(),
                right_dim: self.shape[ax],
            });
        }
        let data = apply_axis(&self.shape, ax, m, &self.data);
        let mut shape = self.shape.clone();
        shape[ax] = m.nrows();
        Ok(Self {
            shape,
            labels: self.labels.clone(),
            data,
        })
    }

    /// `sum conj(bra) * ket` over every label except `open`, giving the
    /// matrix `[bra_open, ket_open]`.
    pub fn sandwich(bra: &Self, ket: &Self, open: &str) -> Result<Mat> {
        let others: Vec<&str> = ket
            .labels
            .iter()
            .filter(|l| l.as_str() != open)
            .map(|l| l.as_str())
            .collect();
        let mut rows = others.clone();
        rows.push(open);
        let kb = bra.permute_to(&rows)?;
        let kk = ket.permute_to(&rows)?;
        if kb.shape[..others.len()] != kk.shape[..others.len()] {
            return Err(Error::InvalidArgument("sandwich shapes differ".into()));
        }
        let db = kb.dim(open)?;
        let dk = kk.dim(open)?;
        let inner = kk.data.len() / dk;
        let mut out = Mat::zeros(db, dk);
        for p in 0..inner {
            let rb = &kb.data[p * db..(p + 1) * db];
            let rk = &kk.data[p * dk..(p + 1) * dk];
            for (i, b) in rb.iter().enumerate() {
                let bc = b.conj();
                if bc == ZERO {
                    continue;
                }
                for (j, k) in rk.iter().enumerate() {
                    out[(i, j)] += bc * k;
                }
            }
        }
        Ok(out)
    }
}

/// `y = (I ⊗ m ⊗ I) x` for a row-major array with `shape`, acting on axis `ax`.
pub(crate) fn apply_axis(shape: &[usize], ax: usize, m: &Mat, x: &[C64]) -> Vec<C64> {
    let pre: usize = shape[..ax].iter().product();
    let d = shape[ax];
    let post: usize = shape[ax + 1..].iter().product();
    let r = m.nrows();
    let mut y = vec![ZERO; pre * r * post];
    for p in 0..pre {
        let xb = &x[p * d * post..(p + 1) * d * post];
        let yb = &mut y[p * r * post..(p + 1) * r * post];
        for j in 0..d {
            let xr = &xb[j * post..(j + 1) * post];
            for i in 0..r {
                let c = m[(i, j)];
                if c == ZERO {
                    continue;
                }
                let yr = &mut yb[i * post..(i + 1) * post];
                for q in 0..post {
                    yr[q] += c * xr[q];
                }
            }
        }
    }
    y
}

/// Row-major `(m×k)·(k×n)`.
pub(crate) fn matmul(a: &[C64], b: &[C64], m: usize, k: usize, n: usize) -> Vec<C64> {
    let mut c = vec![ZERO; m * n];
    for i in 0..m {
        let crow = &mut c[i * n..(i + 1) * n];
        for p in 0..k {
            let aip = a[i * k + p];
            if aip == ZERO {
                continue;
            }
            let brow = &b[p * n..(p + 1) * n];
            for j in 0..n {
                crow[j] += aip * brow[j];
            }
        }
    }
    c
}

/// Sums over the paired indices of `a` and `b`. The result carries the
/// uncontracted labels of `a` followed by those of `b`.
pub fn contract(a: &DenseTensor, b: &DenseTensor, pairs: &[(&str, &str)]) -> Result<DenseTensor> {
    let mut ca = Vec::with_capacity(pairs.len());
    let mut cb = Vec::with_capacity(pairs.len());
    for &(la, lb) in pairs {
        let ia = a.axis(la)?;
        let ib = b.axis(lb)?;
        if ca.contains(&ia) {
            return Err(Error::DuplicateLabel(la.to_string()));
        }
        if cb.contains(&ib) {
            return Err(Error::DuplicateLabel(lb.to_string()));
        }
        if a.shape[ia] != b.shape[ib] {
            return Err(Error::DimensionMismatch {
                left: la.to_string(),
                right: lb.to_string(),
                left_dim: a.shape[ia],
                right_dim: b.shape[ib],
            });
        }
        ca.push(ia);
        cb.push(ib);
    }
    let fa: Vec<usize> = (0..a.rank()).filter(|i| !ca.contains(i)).collect();
    let fb: Vec<usize> = (0..b.rank()).filter(|i| !cb.contains(i)).collect();
    let mut labels: Vec<String> = fa.iter().map(|&i| a.labels[i].clone()).collect();
    labels.extend(fb.iter().map(|&i| b.labels[i].clone()));
    check_labels(&labels, labels.len())?;
    let mut shape: Vec<usize> = fa.iter().map(|&i| a.shape[i]).collect();
    shape.extend(fb.iter().map(|&i| b.shape[i]));

    let mut oa = fa.clone();
    oa.extend(&ca);
    let mut ob = cb.clone();
    ob.extend(&fb);
    let pa = a.permute(&oa)?;
    let pb = b.permute(&ob)?;
    let m: usize = fa.iter().map(|&i| a.shape[i]).product();
    let k: usize = ca.iter().map(|&i| a.shape[i]).product();
    let n: usize = fb.iter().map(|&i| b.shape[i]).product();
    let data = matmul(&pa.data, &pb.data, m, k, n);
    DenseTensor::from_parts(shape, labels, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn matrix_product_case() {
        let a = DenseTensor::new(vec![2, 3], &["i", "k"], (1..=6).map(|x| c(x as f64)).collect())
            .unwrap();
        let b = DenseTensor::new(vec![3, 2], &["k", "j"], (1..=6).map(|x| c(x as f64)).collect())
            .unwrap();
        let ab = contract(&a, &b, &[("k", "k")]).unwrap();
        assert_eq!(ab.labels(), &["i", "j"]);
        let expect = [22.0, 28.0, 49.0, 64.0];
        for (z, e) in ab.data().iter().zip(expect) {
            assert_eq!(*z, c(e));
        }
    }

    #[test]
    fn outer_product_concatenates_shapes() {
        let a = DenseTensor::new(vec![2], &["a"], vec![c(1.0), c(2.0)]).unwrap();
        let b = DenseTensor::new(vec![3], &["b"], vec![c(1.0), c(0.0), c(-1.0)]).unwrap();
        let ab = contract(&a, &b, &[]).unwrap();
        assert_eq!(ab.shape(), &[2, 3]);
        assert_eq!(ab.get(&[1, 2]), c(-2.0));
    }

    #[test]
    fn contraction_errors() {
        let a = DenseTensor::zeros(vec![2, 3], &["i", "k"]).unwrap();
        let b = DenseTensor::zeros(vec![2, 2], &["k", "i"]).unwrap();
        assert!(matches!(
            contract(&a, &b, &[("k", "k")]),
            Err(Error::DimensionMismatch { .. })
        ));
        let b = DenseTensor::zeros(vec![3, 2], &["k", "i"]).unwrap();
        assert!(matches!(
            contract(&a, &b, &[("k", "k")]),
            Err(Error::DuplicateLabel(_))
        ));
    }

    #[test]
    fn invariants_enforced_on_construction() {
        assert!(DenseTensor::new(vec![2, 2], &["a", "a"], vec![ZERO; 4]).is_err());
        assert!(DenseTensor::new(vec![2, 2], &["a", "b"], vec![ZERO; 3]).is_err());
        assert!(DenseTensor::new(vec![2], &["a", "b"], vec![ZERO; 2]).is_err());
    }

    #[test]
    fn permute_and_matrix_roundtrip() {
        let t = DenseTensor::from_fn(vec![2, 3, 4], &["a", "b", "c"], |i| {
            c((i[0] * 100 + i[1] * 10 + i[2]) as f64)
        })
        .unwrap();
        let p = t.permute_to(&["c", "a", "b"]).unwrap();
        assert_eq!(p.get(&[3, 1, 2]), c(123.0));
        let m = t.to_matrix(&["b"]).unwrap();
        assert_eq!(m.shape(), (3, 8));
        let back = DenseTensor::from_matrix(&m, &[3], &["b"], &[2, 4], &["a", "c"]).unwrap();
        assert_eq!(back.permute_to(&["a", "b", "c"]).unwrap(), t);
    }

    #[test]
    fn apply_on_matches_contraction() {
        let t = DenseTensor::from_fn(vec![2, 3, 2], &["a", "b", "c"], |i| {
            C64::new(i[0] as f64 - i[2] as f64, i[1] as f64)
        })
        .unwrap();
        let m = Mat::from_fn(4, 3, |i, j| C64::new((i + 2 * j) as f64, 1.0));
        let y = t.apply_on("b", &m).unwrap();
        let mt = DenseTensor::from_matrix(&m, &[4], &["b2"], &[3], &["b"]).unwrap();
        let z = contract(&t, &mt, &[("b", "b")])
            .unwrap()
            .relabel("b2", "b")
            .unwrap()
            .permute_to(&["a", "b", "c"])
            .unwrap();
        for (u, v) in y.data().iter().zip(z.data()) {
            assert!((u - v).norm() < 1e-12);
        }
    }
}
