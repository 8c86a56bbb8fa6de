//! Exact diagonalization in the physical sector of small lattices.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::hamiltonian::SectorConstraints;
use crate::lanczos::{lanczos_lowest, LinearMap};
use crate::models::StateAccessor;
use crate::{Error, HamiltonianTerms, Mat, Result, C64, ZERO};

pub const DEFAULT_CAP: usize = 200_000;

/// Sorted list of allowed global configurations encoded in mixed radix
/// (site 0 least significant).
#[derive(Clone, Debug, PartialEq)]
pub struct SectorBasis {
    dims: Vec<usize>,
    radix: Vec<u128>,
    codes: Vec<u128>,
}

impl SectorBasis {
    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn local_dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn encode(&self, config: &[usize]) -> u128 {
        config.iter().zip(&self.radix).map(|(&s, &r)| s as u128 * r).sum()
    }

    pub fn config(&self, index: usize) -> Vec<usize> {
        let mut c = self.codes[index];
        self.dims
            .iter()
            .map(|&d| {
                let s = (c % d as u128) as usize;
                c /= d as u128;
                s
            })
            .collect()
    }

    pub fn index_of(&self, config: &[usize]) -> Option<usize> {
        self.codes.binary_search(&self.encode(config)).ok()
    }

    fn index_of_code(&self, code: u128) -> Option<usize> {
        self.codes.binary_search(&code).ok()
    }
}

struct Enumerator<'a> {
    dims: &'a [usize],
    cons: &'a SectorConstraints,
    /// Bond constraints keyed by their later site.
    closing: Vec<Vec<usize>>,
    min_rest: Vec<i32>,
    max_rest: Vec<i32>,
    cap: usize,
    found: usize,
    config: Vec<usize>,
    out: Vec<Vec<usize>>,
    stopped_at: Option<f64>,
}

impl Enumerator<'_> {
    fn charge(&self, site: usize, s: usize) -> i32 {
        self.cons.charges.as_ref().map_or(0, |c| c[site][s])
    }

    fn visit(&mut self, site: usize, partial: i32, fraction: f64, width: f64) {
        if self.stopped_at.is_some() {
            return;
        }
        if site == self.dims.len() {
            if self.cons.charges.is_none() || partial == self.cons.total_charge {
                self.found += 1;
                if self.found > self.cap {
                    self.stopped_at = Some(fraction + width);
                    return;
                }
                self.out.push(self.config.clone());
            }
            return;
        }
        let d = self.dims[site];
        for s in 0..d {
            self.config[site] = s;
            let ok = self.closing[site].iter().all(|&k| {
                let b = &self.cons.bonds[k];
                b.qa[self.config[b.a]] + b.qb[self.config[b.b]] == b.target
            });
            if !ok {
                continue;
            }
            let p = partial + self.charge(site, s);
            if self.cons.charges.is_some() {
                let t = self.cons.total_charge;
                if p + self.min_rest[site + 1] > t || p + self.max_rest[site + 1] < t {
                    continue;
                }
            }
            let w = width / d as f64;
            self.visit(site + 1, p, fraction + s as f64 * w, w);
            if self.stopped_at.is_some() {
                return;
            }
        }
    }
}

/// Enumerates every configuration passing the bond rules and total charge.
/// Refuses with an extrapolated size estimate beyond `cap` states.
pub fn enumerate_sector(h: &HamiltonianTerms, cap: usize) -> Result<SectorBasis> {
    let dims = h.local_dims();
    let n = dims.len();
    let cons = &h.constraints;
    let mut closing = vec![Vec::new(); n];
    for (k, b) in cons.bonds.iter().enumerate() {
        if b.a >= n || b.b >= n || b.qa.len() != dims[b.a] || b.qb.len() != dims[b.b] {
            return Err(Error::InvalidArgument(format!("malformed bond constraint {k}")));
        }
        closing[b.a.max(b.b)].push(k);
    }
    let mut min_rest = vec![0; n + 1];
    let mut max_rest = vec![0; n + 1];
    if let Some(c) = &cons.charges {
        for s in (0..n).rev() {
            min_rest[s] = min_rest[s + 1] + c[s].iter().copied().min().unwrap_or(0);
            max_rest[s] = max_rest[s + 1] + c[s].iter().copied().max().unwrap_or(0);
        }
    }
    let mut e = Enumerator {
        dims: &dims,
        cons,
        closing,
        min_rest,
        max_rest,
        cap,
        found: 0,
        config: vec![0; n],
        out: Vec::new(),
        stopped_at: None,
    };
    e.visit(0, 0, 0.0, 1.0);
    let (found, stopped_at, out) = (e.found, e.stopped_at, core::mem::take(&mut e.out));
    drop(e);
    if let Some(frac) = stopped_at {
        let estimate = (found as f64 / frac.max(1e-300)) as u128;
        return Err(Error::SectorTooLarge {
            estimate: estimate.max(cap as u128 + 1),
            cap,
        });
    }
    let mut radix = Vec::with_capacity(n);
    let mut r = 1u128;
    for &d in &dims {
        radix.push(r);
        r = r
            .checked_mul(d as u128)
            .ok_or_else(|| Error::InvalidArgument("configuration space exceeds 128-bit codes".into()))?;
    }
    let mut basis = SectorBasis {
        dims,
        radix,
        codes: Vec::new(),
    };
    let mut codes: Vec<u128> = out.iter().map(|c| basis.encode(c)).collect();
    codes.sort_unstable();
    basis.codes = codes;
    Ok(basis)
}

/// Compressed sparse row matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    pub dim: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<C64>,
}

impl SparseMatrix {
    /// Builds from coordinate triplets, summing duplicates.
    pub fn from_triplets(dim: usize, mut t: Vec<(usize, usize, C64)>) -> Self {
        t.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(t.len());
        let mut vals: Vec<C64> = Vec::with_capacity(t.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in t {
            if last == Some((r, c)) {
                *vals.last_mut().expect("entry") += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            dim,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        let row = &self.cols[self.row_ptr[r]..self.row_ptr[r + 1]];
        match row.binary_search(&c) {
            Ok(k) => self.vals[self.row_ptr[r] + k],
            Err(_) => ZERO,
        }
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.cols[k], self.vals[k]))
        })
    }

    /// Largest `|A_rc − conj(A_cr)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.triplets()
            .map(|(r, c, v)| (v - self.get(c, r).conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> Mat {
        let mut m = Mat::zeros(self.dim, self.dim);
        for (r, c, v) in self.triplets() {
            m[(r, c)] += v;
        }
        m
    }
}

impl LinearMap for SparseMatrix {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        for (r, yr) in y.iter_mut().enumerate() {
            let mut acc = ZERO;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *yr = acc;
        }
    }
}

type SparseColumns = Vec<Vec<(usize, C64)>>;

fn sparse_columns(m: &Mat) -> SparseColumns {
    (0..m.ncols())
        .map(|j| {
            (0..m.nrows())
                .filter(|&i| m[(i, j)] != ZERO)
                .map(|i| (i, m[(i, j)]))
                .collect()
        })
        .collect()
}

/// Applies the product of `factors` to the configuration with code `code`,
/// returning the resulting `(code, amplitude)` pairs.
fn apply_product(
    sector: &SectorBasis,
    code: u128,
    factors: &[(usize, &SparseColumns)],
) -> Vec<(u128, C64)> {
    let mut cur = vec![(code, C64::new(1.0, 0.0))];
    for &(site, cols) in factors.iter().rev() {
        let d = sector.dims[site] as u128;
        let r = sector.radix[site];
        let mut next = Vec::with_capacity(cur.len());
        for (c, a) in cur {
            let s = ((c / r) % d) as usize;
            for &(t, v) in &cols[s] {
                next.push((c - s as u128 * r + t as u128 * r, a * v));
            }
        }
        cur = next;
    }
    cur
}

fn column_cache(h: &HamiltonianTerms) -> BTreeMap<(usize, usize), SparseColumns> {
    let mut cache = BTreeMap::new();
    for t in &h.terms {
        for &(s, id) in &t.factors {
            cache
                .entry((s, id.0))
                .or_insert_with(|| sparse_columns(h.op(s, id)));
        }
    }
    cache
}

/// Sector basis and Hamiltonian matrix; fails if a term leaves the sector or
/// the matrix is not Hermitian to `1e-13` relative to its largest entry.
pub fn assemble_sector(h: &HamiltonianTerms, cap: usize) -> Result<(SectorBasis, SparseMatrix)> {
    let sector = enumerate_sector(h, cap)?;
    let cache = column_cache(h);
    let mut trip = Vec::new();
    for j in 0..sector.len() {
        let code = sector.codes[j];
        for t in &h.terms {
            let factors: Vec<(usize, &SparseColumns)> =
                t.factors.iter().map(|&(s, id)| (s, &cache[&(s, id.0)])).collect();
            for (c, a) in apply_product(&sector, code, &factors) {
                if a == ZERO {
                    continue;
                }
                let i = sector.index_of_code(c).ok_or_else(|| {
                    Error::NotClosed(format!("a term maps sector state {j} outside the sector"))
                })?;
                trip.push((i, j, t.coeff * a));
            }
        }
    }
    let m = SparseMatrix::from_triplets(sector.len(), trip);
    let defect = m.hermiticity_defect();
    if defect > 1e-13 * m.max_abs().max(1.0) {
        return Err(Error::NotHermitian(format!("sector matrix defect {defect:e}")));
    }
    Ok((sector, m))
}

#[derive(Clone, Debug)]
pub struct ExactGround {
    pub energy: f64,
    pub vector: Vec<C64>,
    pub residual: f64,
    pub gap: Option<f64>,
}

/// Lowest eigenpair of a sector matrix from a seeded random start. The
/// residual is bounded by `1e-11 · max(1, ‖H‖)`.
pub fn exact_ground(m: &SparseMatrix) -> Result<ExactGround> {
    if m.dim == 0 {
        return Err(Error::InvalidArgument("empty sector".into()));
    }
    let mut rng = crate::random::seeded(0x5eed);
    let start = crate::random::gaussian_vector(&mut rng, m.dim);
    let e = lanczos_lowest(m, &start, 1e-11, 200_000)?;
    Ok(ExactGround {
        energy: e.value,
        vector: e.vector,
        residual: e.residual,
        gap: e.gap,
    })
}

/// Tensor-network states that can report single amplitudes.
pub trait AmplitudeSource {
    fn amplitude(&self, config: &[usize]) -> C64;
}

/// Amplitudes of `state` on every sector configuration.
pub fn tn_to_vector<S: AmplitudeSource + ?Sized>(state: &S, sector: &SectorBasis) -> Vec<C64> {
    (0..sector.len()).map(|i| state.amplitude(&sector.config(i))).collect()
}

/// `|⟨a|b⟩|² / (‖a‖² ‖b‖²)`.
pub fn fidelity(a: &[C64], b: &[C64]) -> f64 {
    let ov = crate::lanczos::dot(a, b).norm_sqr();
    let na: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    let nb: f64 = b.iter().map(|z| z.norm_sqr()).sum();
    ov / (na * nb)
}

/// A sector vector viewed as a state for observables.
pub struct SectorState<'a> {
    pub sector: &'a SectorBasis,
    pub vector: &'a [C64],
}

impl StateAccessor for SectorState<'_> {
    fn expect_product(&self, factors: &[(usize, &Mat)]) -> Result<C64> {
        let cols: Vec<(usize, SparseColumns)> =
            factors.iter().map(|&(s, m)| (s, sparse_columns(m))).collect();
        let refs: Vec<(usize, &SparseColumns)> = cols.iter().map(|(s, c)| (*s, c)).collect();
        let mut acc = ZERO;
        let mut norm = 0.0;
        for (j, &x) in self.vector.iter().enumerate() {
            norm += x.norm_sqr();
            if x == ZERO {
                continue;
            }
            for (c, a) in apply_product(self.sector, self.sector.codes[j], &refs) {
                if let Some(i) = self.sector.index_of_code(c) {
                    acc += self.vector[i].conj() * a * x;
                }
            }
        }
        Ok(acc / norm)
    }
}
