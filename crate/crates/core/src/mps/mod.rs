//! Matrix product states.

mod dmrg;
mod transfer;

pub use dmrg::{dmrg_ground_state, DmrgResult, SweepConfig};
pub use transfer::{aklt_tensor, correlation_lengths, transfer_matrix, TransferMatrix};

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::decomp::{isometrize, isometry_defect, svd_split, TruncationSpec};
use crate::models::StateAccessor;
use crate::oracle::AmplitudeSource;
use crate::{DenseTensor, Error, Mat, Result, C64, ONE, ZERO};

/// Labels of an MPS site tensor.
pub const L: &str = "l";
pub const P: &str = "p";
pub const R: &str = "r";

#[derive(Clone, Debug, PartialEq)]
pub enum Boundary {
    /// Edge bonds of dimension one.
    Open,
    /// `ψ(s) = Tr(B A^{s_1} … A^{s_N})`, with `B` of shape `D_N × D_0`.
    Matrix(Mat),
}

#[derive(Clone, Debug, PartialEq)]
pub struct MpsState {
    tensors: Vec<DenseTensor>,
    boundary: Boundary,
    center: Option<usize>,
    local_dims: Vec<usize>,
}

/// Site tensor as the list of matrices `A^s` (`D_l × D_r`).
fn site_matrices(t: &DenseTensor) -> Vec<Mat> {
    let (dl, d, dr) = (t.shape()[0], t.shape()[1], t.shape()[2]);
    (0..d)
        .map(|s| Mat::from_fn(dl, dr, |a, b| t.data()[(a * d + s) * dr + b]))
        .collect()
}

impl MpsState {
    pub fn new(tensors: Vec<DenseTensor>, boundary: Boundary) -> Result<Self> {
        if tensors.is_empty() {
            return Err(Error::InvalidArgument("MPS needs at least one site".into()));
        }
        let mut local_dims = Vec::with_capacity(tensors.len());
        let mut fixed = Vec::with_capacity(tensors.len());
        for t in tensors {
            let t = t.permute_to(&[L, P, R])?;
            local_dims.push(t.shape()[1]);
            fixed.push(t);
        }
        for (i, w) in fixed.windows(2).enumerate() {
            if w[0].shape()[2] != w[1].shape()[0] {
                return Err(Error::DimensionMismatch {
                    left: format!("r{i}"),
                    right: format!("l{}", i + 1),
                    left_dim: w[0].shape()[2],
                    right_dim: w[1].shape()[0],
                });
            }
        }
        let d0 = fixed[0].shape()[0];
        let dn = fixed[fixed.len() - 1].shape()[2];
        match &boundary {
            Boundary::Open if d0 != 1 || dn != 1 => {
                return Err(Error::InvalidArgument("open boundary needs unit edge bonds".into()))
            }
            Boundary::Matrix(b) if b.nrows() != dn || b.ncols() != d0 => {
                return Err(Error::InvalidArgument("boundary matrix has wrong shape".into()))
            }
            _ => {}
        }
        Ok(Self {
            tensors: fixed,
            boundary,
            center: None,
            local_dims,
        })
    }

    pub fn product_state(local_dims: &[usize], states: &[usize]) -> Result<Self> {
        if local_dims.len() != states.len() {
            return Err(Error::InvalidArgument("one state per site required".into()));
        }
        let tensors = local_dims
            .iter()
            .zip(states)
            .map(|(&d, &s)| {
                if s >= d {
                    return Err(Error::InvalidArgument(format!("state {s} exceeds dimension {d}")));
                }
                DenseTensor::from_fn(vec![1, d, 1], &[L, P, R], |i| if i[1] == s { ONE } else { ZERO })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut m = Self::new(tensors, Boundary::Open)?;
        m.center = Some(0);
        Ok(m)
    }

    /// Random open MPS with bonds `min(bond, d^k, d^{N−k})`, normalized and
    /// centred on site 0.
    pub fn random<G: Rng + ?Sized>(local_dims: &[usize], bond: usize, rng: &mut G) -> Result<Self> {
        let n = local_dims.len();
        let mut bonds = vec![1usize; n + 1];
        for k in 1..n {
            let left: usize = local_dims[..k].iter().fold(1usize, |a, &d| a.saturating_mul(d));
            let right: usize = local_dims[k..].iter().fold(1usize, |a, &d| a.saturating_mul(d));
            bonds[k] = bond.min(left).min(right).max(1);
        }
        let tensors = (0..n)
            .map(|i| {
                crate::random::gaussian_tensor(rng, vec![bonds[i], local_dims[i], bonds[i + 1]], &[L, P, R])
            })
            .collect::<Result<Vec<_>>>()?;
        let m = Self::new(tensors, Boundary::Open)?;
        let mut m = canonicalize(&m, 0)?;
        m.normalize();
        Ok(m)
    }

    /// `n` copies of `site` closed with the identity boundary matrix.
    pub fn uniform_periodic(site: &DenseTensor, n: usize) -> Result<Self> {
        let t = site.permute_to(&[L, P, R])?;
        if t.shape()[0] != t.shape()[2] {
            return Err(Error::InvalidArgument("uniform MPS needs square bonds".into()));
        }
        let d = t.shape()[0];
        Self::new(vec![t; n], Boundary::Matrix(Mat::identity(d, d)))
    }

    pub fn n_sites(&self) -> usize {
        self.tensors.len()
    }

    pub fn tensors(&self) -> &[DenseTensor] {
        &self.tensors
    }

    pub fn tensor(&self, i: usize) -> &DenseTensor {
        &self.tensors[i]
    }

    pub fn boundary(&self) -> &Boundary {
        &self.boundary
    }

    pub fn center(&self) -> Option<usize> {
        self.center
    }

    pub fn local_dims(&self) -> &[usize] {
        &self.local_dims
    }

    /// Dimensions of the `N − 1` interior bonds.
    pub fn bond_dims(&self) -> Vec<usize> {
        self.tensors[..self.n_sites() - 1].iter().map(|t| t.shape()[2]).collect()
    }

    pub(crate) fn set_tensor(&mut self, i: usize, t: DenseTensor) {
        self.tensors[i] = t;
    }

    pub(crate) fn set_center(&mut self, c: Option<usize>) {
        self.center = c;
    }

    pub fn is_uniform(&self) -> bool {
        self.tensors.windows(2).all(|w| w[0] == w[1])
    }

    /// `ψ(s_1, …, s_N)`.
    pub fn amplitude(&self, config: &[usize]) -> C64 {
        let mut v: Mat = match &self.boundary {
            Boundary::Open => Mat::identity(1, 1),
            Boundary::Matrix(b) => b.clone(),
        };
        for (t, &s) in self.tensors.iter().zip(config) {
            let (dl, d, dr) = (t.shape()[0], t.shape()[1], t.shape()[2]);
            let a = Mat::from_fn(dl, dr, |x, y| t.data()[(x * d + s) * dr + y]);
            v = v * a;
        }
        v.trace()
    }

    /// Dense state vector, site 0 most significant.
    pub fn to_vector(&self) -> Vec<C64> {
        let total: usize = self.local_dims.iter().product();
        let mut cfg = vec![0usize; self.n_sites()];
        let mut out = Vec::with_capacity(total);
        for _ in 0..total {
            out.push(self.amplitude(&cfg));
            for k in (0..cfg.len()).rev() {
                cfg[k] += 1;
                if cfg[k] < self.local_dims[k] {
                    break;
                }
                cfg[k] = 0;
            }
        }
        out
    }

    /// `⟨self|other⟩` for open-boundary states of equal shape.
    pub fn overlap(&self, other: &Self) -> Result<C64> {
        if self.local_dims != other.local_dims {
            return Err(Error::InvalidArgument("overlap needs equal local dimensions".into()));
        }
        if self.boundary != Boundary::Open || other.boundary != Boundary::Open {
            return Err(Error::InvalidArgument("overlap implemented for open boundaries".into()));
        }
        let mut env = Mat::identity(1, 1);
        for (a, b) in self.tensors.iter().zip(&other.tensors) {
            let ma = site_matrices(a);
            let mb = site_matrices(b);
            let mut next = Mat::zeros(a.shape()[2], b.shape()[2]);
            for (x, y) in ma.iter().zip(&mb) {
                next += x.adjoint() * &env * y;
            }
            env = next;
        }
        Ok(env[(0, 0)])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.expect_product(&[]).map(|z| z.re).unwrap_or(0.0)
    }

    pub fn normalize(&mut self) {
        let n = libm::sqrt(self.norm_sqr());
        if n > 0.0 {
            let i = self.center.unwrap_or(0);
            self.tensors[i].scale(C64::new(1.0 / n, 0.0));
        }
    }

    /// Inserts `G G^{-1}` on the bond between sites `bond` and `bond + 1`.
    pub fn apply_gauge(&mut self, bond: usize, g: &Mat) -> Result<()> {
        let inv = g
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidArgument("gauge matrix is singular".into()))?;
        let a = self.tensors[bond].apply_on(R, &g.transpose())?;
        let b = self.tensors[bond + 1].apply_on(L, &inv)?;
        self.tensors[bond] = a;
        self.tensors[bond + 1] = b;
        self.center = None;
        Ok(())
    }

    /// Largest deviation from the left (right) isometry condition for sites
    /// left (right) of the centre.
    pub fn isometry_defect(&self) -> Result<f64> {
        let c = self
            .center
            .ok_or_else(|| Error::InvalidArgument("state has no orthogonality centre".into()))?;
        let mut worst = 0.0f64;
        for (i, t) in self.tensors.iter().enumerate() {
            if i < c {
                worst = worst.max(isometry_defect(t, R)?);
            } else if i > c {
                worst = worst.max(isometry_defect(t, L)?);
            }
        }
        Ok(worst)
    }

    /// Transfer-matrix contraction of `⟨ψ| Π O_k |ψ⟩` (unnormalized).
    pub fn expect_product_raw(&self, factors: &[(usize, &Mat)]) -> Result<C64> {
        for &(s, m) in factors {
            if s >= self.n_sites() {
                return Err(Error::InvalidArgument(format!("site {s} out of range")));
            }
            if m.nrows() != self.local_dims[s] || m.ncols() != self.local_dims[s] {
                return Err(Error::DimensionMismatch {
                    left: "operator".into(),
                    right: format!("site {s}"),
                    left_dim: m.nrows(),
                    right_dim: self.local_dims[s],
                });
            }
        }
        let op_at = |i: usize| factors.iter().find(|f| f.0 == i).map(|f| f.1);
        match &self.boundary {
            Boundary::Open => {
                let mut env = Mat::identity(1, 1);
                for (i, t) in self.tensors.iter().enumerate() {
                    env = transfer_env(t, &env, op_at(i));
                }
                Ok(env[(0, 0)])
            }
            Boundary::Matrix(b) => {
                let d0 = self.tensors[0].shape()[0];
                let mut m = Mat::identity(d0 * d0, d0 * d0);
                for (i, t) in self.tensors.iter().enumerate() {
                    m = m * transfer::dressed_transfer(t, op_at(i));
                }
                let bb = b.map(|z| z.conj()).kronecker(b);
                Ok((bb * m).trace())
            }
        }
    }
}

/// `X' = Σ_{s,s'} (A^{s'})† X A^{s} O_{s's}` with `X` indexed `[bra, ket]`.
pub(crate) fn transfer_env(t: &DenseTensor, x: &Mat, op: Option<&Mat>) -> Mat {
    let ms = site_matrices(t);
    let dr = t.shape()[2];
    let mut out = Mat::zeros(dr, dr);
    match op {
        None => {
            for a in &ms {
                out += a.adjoint() * x * a;
            }
        }
        Some(o) => {
            for (sp, ap) in ms.iter().enumerate() {
                let left = ap.adjoint() * x;
                for (s, a) in ms.iter().enumerate() {
                    let c = o[(sp, s)];
                    if c != ZERO {
                        out += &left * a * c;
                    }
                }
            }
        }
    }
    out
}

/// Mirror of [`transfer_env`] for right environments.
pub(crate) fn transfer_env_right(t: &DenseTensor, x: &Mat, op: Option<&Mat>) -> Mat {
    let ms = site_matrices(t);
    let dl = t.shape()[0];
    let mut out = Mat::zeros(dl, dl);
    for (sp, ap) in ms.iter().enumerate() {
        for (s, a) in ms.iter().enumerate() {
            let c = match op {
                None => {
                    if s == sp {
                        ONE
                    } else {
                        ZERO
                    }
                }
                Some(o) => o[(sp, s)],
            };
            if c != ZERO {
                // out[l', l] = Σ conj(A'[l', r']) X[r', r] A[l, r] gives
                // (conj(A') X A^T) indexed [l', l].
                out += (ap.map(|z| z.conj()) * x * a.transpose()) * c;
            }
        }
    }
    out
}

impl StateAccessor for MpsState {
    fn expect_product(&self, factors: &[(usize, &Mat)]) -> Result<C64> {
        let norm = self.expect_product_raw(&[])?;
        Ok(self.expect_product_raw(factors)? / norm)
    }
}

impl AmplitudeSource for MpsState {
    fn amplitude(&self, config: &[usize]) -> C64 {
        MpsState::amplitude(self, config)
    }
}

/// `⟨ψ|O_i O_j|ψ⟩` (unnormalized). Uniform periodic states use the
/// `Tr(E^i Õ E^{j−i−1} Õ E^{N−j−1})` form.
pub fn two_point(state: &MpsState, op_i: &Mat, i: usize, op_j: &Mat, j: usize) -> Result<C64> {
    if i >= j {
        return Err(Error::InvalidArgument(format!("two_point needs i < j, got {i}, {j}")));
    }
    if j >= state.n_sites() {
        return Err(Error::InvalidArgument(format!("site {j} out of range")));
    }
    if let Boundary::Matrix(b) = &state.boundary {
        let d = b.nrows();
        if state.is_uniform() && *b == Mat::identity(d, d) {
            for (s, m) in [(i, op_i), (j, op_j)] {
                if m.nrows() != state.local_dims[s] || m.ncols() != state.local_dims[s] {
                    return Err(Error::DimensionMismatch {
                        left: "operator".into(),
                        right: format!("site {s}"),
                        left_dim: m.nrows(),
                        right_dim: state.local_dims[s],
                    });
                }
            }
            let a = &state.tensors[0];
            let e = transfer::dressed_transfer(a, None);
            let oi = transfer::dressed_transfer(a, Some(op_i));
            let oj = transfer::dressed_transfer(a, Some(op_j));
            let n = state.n_sites();
            let pw = |k: usize| e.pow(k as u32);
            return Ok((pw(i) * oi * pw(j - i - 1) * oj * pw(n - j - 1)).trace());
        }
    }
    state.expect_product_raw(&[(i, op_i), (j, op_j)])
}

/// Splits a full amplitude tensor into an open MPS by successive SVDs.
#[derive(Clone, Debug)]
pub struct AmplitudeSplit {
    pub state: MpsState,
    /// Kept singular values per bond.
    pub spectra: Vec<Vec<f64>>,
    pub discarded: Vec<f64>,
}

pub fn mps_from_amplitudes(amps: &DenseTensor, spec: &TruncationSpec) -> Result<AmplitudeSplit> {
    let n = amps.rank();
    if n < 2 {
        return Err(Error::InvalidArgument("need at least two sites".into()));
    }
    let labels: Vec<alloc::string::String> = amps.labels().to_vec();
    let mut rest = amps.clone();
    // Unit left bond on the first site.
    let mut shape = vec![1];
    shape.extend_from_slice(amps.shape());
    let mut lab: Vec<&str> = vec!["__l"];
    lab.extend(labels.iter().map(|s| s.as_str()));
    rest = DenseTensor::new(shape, &lab, rest.into_data())?;
    let mut tensors = Vec::with_capacity(n);
    let mut spectra = Vec::with_capacity(n - 1);
    let mut discarded = Vec::with_capacity(n - 1);
    for k in 0..n - 1 {
        let site = labels[k].as_str();
        let d = svd_split(&rest, &["__l", site], "__b", spec)?;
        let left = d.left.relabel("__l", L)?.relabel(site, P)?.relabel("__b", R)?;
        tensors.push(left.permute_to(&[L, P, R])?);
        let mut r = d.right;
        let chunk = r.len() / d.singular_values.len();
        for (z, s) in r.data_mut().chunks_mut(chunk).zip(&d.singular_values) {
            z.iter_mut().for_each(|x| *x *= *s);
        }
        rest = r.relabel("__b", "__l")?;
        spectra.push(d.singular_values);
        discarded.push(d.discarded_weight);
    }
    let last = labels[n - 1].as_str();
    let dl = rest.dim("__l")?;
    let dp = rest.dim(last)?;
    let t = rest.permute_to(&["__l", last])?;
    let t = DenseTensor::new(vec![dl, dp, 1], &[L, P, R], t.into_data())?;
    tensors.push(t);
    let mut state = MpsState::new(tensors, Boundary::Open)?;
    state.center = Some(n - 1);
    Ok(AmplitudeSplit {
        state,
        spectra,
        discarded,
    })
}

/// Brings an open MPS into mixed canonical form around `center` by QR sweeps.
pub fn canonicalize(state: &MpsState, center: usize) -> Result<MpsState> {
    let n = state.n_sites();
    if center >= n {
        return Err(Error::InvalidArgument(format!("centre {center} outside chain of {n}")));
    }
    if state.boundary != Boundary::Open {
        return Err(Error::InvalidArgument("canonical forms need open boundaries".into()));
    }
    let mut out = state.clone();
    for i in 0..center {
        let (q, r) = isometrize(&out.tensors[i], R)?;
        out.tensors[i] = q;
        out.tensors[i + 1] = out.tensors[i + 1].apply_on(L, &r.to_matrix(&[R])?)?;
    }
    for i in (center + 1..n).rev() {
        let (q, r) = isometrize(&out.tensors[i], L)?;
        out.tensors[i] = q;
        out.tensors[i - 1] = out.tensors[i - 1].apply_on(R, &r.to_matrix(&[L])?)?;
    }
    out.center = Some(center);
    Ok(out)
}
