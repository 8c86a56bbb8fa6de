//! Sum-of-products Hamiltonians over sites with finite local spaces.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::models::LatticeSpec;
use crate::{Error, Mat, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OpId(pub usize);

#[derive(Clone, Debug, PartialEq)]
pub struct LocalOp {
    pub name: String,
    pub matrix: Mat,
}

/// Local Hilbert space of one site with its table of named operators.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalSpace {
    pub dim: usize,
    pub ops: Vec<LocalOp>,
}

impl LocalSpace {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            ops: Vec::new(),
        }
    }

    /// Registers `matrix` under `name`, reusing an existing entry of that name.
    pub fn add(&mut self, name: &str, matrix: Mat) -> Result<OpId> {
        if matrix.nrows() != self.dim || matrix.ncols() != self.dim {
            return Err(Error::DimensionMismatch {
                left: name.to_string(),
                right: "site".into(),
                left_dim: matrix.nrows(),
                right_dim: self.dim,
            });
        }
        if let Some(i) = self.ops.iter().position(|o| o.name == name) {
            if (&self.ops[i].matrix - &matrix).norm() > 1e-12 {
                return Err(Error::InvalidArgument(format!(
                    "operator `{name}` registered twice with different matrices"
                )));
            }
            return Ok(OpId(i));
        }
        self.ops.push(LocalOp {
            name: name.to_string(),
            matrix,
        });
        Ok(OpId(self.ops.len() - 1))
    }

    pub fn find(&self, name: &str) -> Option<OpId> {
        self.ops.iter().position(|o| o.name == name).map(OpId)
    }

    pub fn matrix(&self, id: OpId) -> &Mat {
        &self.ops[id.0].matrix
    }
}

/// `coeff · Π_k O_k` with strictly increasing sites.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub coeff: C64,
    pub factors: Vec<(usize, OpId)>,
}

impl Term {
    pub fn sites(&self) -> impl Iterator<Item = usize> + '_ {
        self.factors.iter().map(|f| f.0)
    }
    pub fn first_site(&self) -> usize {
        self.factors[0].0
    }
    pub fn last_site(&self) -> usize {
        self.factors[self.factors.len() - 1].0
    }
    pub fn op_at(&self, site: usize) -> Option<OpId> {
        self.factors.iter().find(|f| f.0 == site).map(|f| f.1)
    }
}

/// Two-site selection rule `qa[s_a] + qb[s_b] = target`.
#[derive(Clone, Debug, PartialEq)]
pub struct BondConstraint {
    pub a: usize,
    pub b: usize,
    pub qa: Vec<i32>,
    pub qb: Vec<i32>,
    pub target: i32,
}

/// Metadata selecting the physical sector for exact diagonalization.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct SectorConstraints {
    /// Per-site charge of every local state.
    pub charges: Option<Vec<Vec<i32>>>,
    pub total_charge: i32,
    pub bonds: Vec<BondConstraint>,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct ModelParams {
    pub m: f64,
    pub g: f64,
    pub lattice: Option<LatticeSpec>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianTerms {
    pub spaces: Vec<LocalSpace>,
    pub terms: Vec<Term>,
    pub constraints: SectorConstraints,
    pub params: ModelParams,
}

impl HamiltonianTerms {
    pub fn new(local_dims: &[usize]) -> Self {
        Self {
            spaces: local_dims.iter().map(|&d| LocalSpace::new(d)).collect(),
            terms: Vec::new(),
            constraints: SectorConstraints::default(),
            params: ModelParams::default(),
        }
    }

    pub fn n_sites(&self) -> usize {
        self.spaces.len()
    }

    pub fn local_dims(&self) -> Vec<usize> {
        self.spaces.iter().map(|s| s.dim).collect()
    }

    pub fn add_op(&mut self, site: usize, name: &str, matrix: Mat) -> Result<OpId> {
        self.spaces
            .get_mut(site)
            .ok_or_else(|| Error::InvalidArgument(format!("site {site} out of range")))?
            .add(name, matrix)
    }

    pub fn op(&self, site: usize, id: OpId) -> &Mat {
        self.spaces[site].matrix(id)
    }

    pub fn add_term(&mut self, coeff: C64, factors: Vec<(usize, OpId)>) -> Result<()> {
        if factors.is_empty() {
            return Err(Error::InvalidArgument("term without operators".into()));
        }
        for w in factors.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::InvalidArgument("term sites must increase".into()));
            }
        }
        for &(s, id) in &factors {
            if s >= self.n_sites() || id.0 >= self.spaces[s].ops.len() {
                return Err(Error::InvalidArgument(format!("unknown operator at site {s}")));
            }
        }
        if coeff != C64::new(0.0, 0.0) {
            self.terms.push(Term { coeff, factors });
        }
        Ok(())
    }

    /// Registers the named matrices and adds their product as one term.
    pub fn add_product(&mut self, coeff: C64, factors: &[(usize, &str, Mat)]) -> Result<()> {
        let mut ids = Vec::with_capacity(factors.len());
        for (s, name, m) in factors {
            ids.push((*s, self.add_op(*s, name, m.clone())?));
        }
        self.add_term(coeff, ids)
    }

    /// Dense matrix of one term on its own support (sites in increasing order).
    pub fn term_matrix(&self, t: &Term) -> Mat {
        let mut m = Mat::identity(1, 1);
        for &(s, id) in &t.factors {
            m = m.kronecker(self.op(s, id));
        }
        m * t.coeff
    }

    /// Checks that the terms on every support sum to a Hermitian operator.
    pub fn check_hermitian(&self, tol: f64) -> Result<()> {
        let mut groups: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for (i, t) in self.terms.iter().enumerate() {
            groups.entry(t.sites().collect()).or_default().push(i);
        }
        for (sites, idx) in groups {
            let dim: usize = sites.iter().map(|&s| self.spaces[s].dim).product();
            if dim > 1 << 13 {
                return Err(Error::InvalidArgument(format!(
                    "support {sites:?} too large for the Hermiticity audit"
                )));
            }
            let mut sum = Mat::zeros(dim, dim);
            for i in idx {
                sum += self.term_matrix(&self.terms[i]);
            }
            let defect = (&sum - sum.adjoint()).norm();
            if defect > tol * sum.norm().max(1.0) {
                return Err(Error::NotHermitian(format!(
                    "terms on sites {sites:?} differ from their adjoint by {defect:e}"
                )));
            }
        }
        Ok(())
    }

    /// Full dense matrix on the product space, for small systems.
    pub fn to_dense(&self, cap: usize) -> Result<Mat> {
        let dims = self.local_dims();
        let total: usize = dims.iter().product();
        if total > cap {
            return Err(Error::SectorTooLarge {
                estimate: total as u128,
                cap,
            });
        }
        let mut h = Mat::zeros(total, total);
        for t in &self.terms {
            let mut m = Mat::identity(1, 1);
            for (s, &d) in dims.iter().enumerate() {
                match t.op_at(s) {
                    Some(id) => m = m.kronecker(self.op(s, id)),
                    None => m = m.kronecker(&Mat::identity(d, d)),
                }
            }
            h += m * t.coeff;
        }
        Ok(h)
    }

    /// Upper bound on the operator norm from the term norms.
    pub fn norm_bound(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                t.coeff.norm()
                    * t.factors
                        .iter()
                        .map(|&(s, id)| self.op(s, id).norm())
                        .product::<f64>()
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn hermiticity_audit_flags_missing_conjugate() {
        let mut h = HamiltonianTerms::new(&[2, 2]);
        let sp = Mat::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]);
        h.add_product(c(1.0), &[(0, "s+", sp.clone()), (1, "s-", sp.transpose())])
            .unwrap();
        assert!(matches!(h.check_hermitian(1e-12), Err(Error::NotHermitian(_))));
        h.add_product(c(1.0), &[(0, "s-", sp.transpose()), (1, "s+", sp)])
            .unwrap();
        h.check_hermitian(1e-12).unwrap();
    }

    #[test]
    fn term_validation() {
        let mut h = HamiltonianTerms::new(&[2, 2]);
        let id = h.add_op(0, "x", Mat::identity(2, 2)).unwrap();
        let id1 = h.add_op(1, "x", Mat::identity(2, 2)).unwrap();
        assert!(h.add_term(c(1.0), vec![(1, id1), (0, id)]).is_err());
        assert!(h.add_op(0, "x", Mat::zeros(2, 2)).is_err());
        assert!(h.add_op(0, "y", Mat::zeros(3, 3)).is_err());
    }
}
