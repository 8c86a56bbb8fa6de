//! Gauge-invariant dressed sites: one matter mode plus one rishon per
//! attached half-link, filtered by the local Gauss law.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::fermion::{word_name, FermionOp};
use super::lattice::{Direction, LatticeSpec};
use super::link::LinkSpace;
use crate::{Error, Mat, Result, C64, ZERO};

/// Occupations of the modes of one dressed site.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DressedState {
    pub matter: u8,
    /// Rishon numbers `0..=2 n_max`, one per direction of the site.
    pub rishons: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DressedSiteBasis {
    pub site: usize,
    pub coords: [usize; 3],
    pub stagger: i32,
    pub n_max: u32,
    /// Rishon modes in fermionic order after the matter mode.
    pub directions: Vec<Direction>,
    pub states: Vec<DressedState>,
    /// Staggered matter charge `ρ` of each state.
    pub charges: Vec<i32>,
    /// Named operators restricted to the basis.
    pub table: Vec<(String, Mat)>,
    xi: Mat,
}

/// Staggered charge `ρ = n − (1 − (−1)^{x+y+z})/2`.
pub fn staggered_charge(n: u8, stagger: i32) -> i32 {
    n as i32 - (1 - stagger) / 2
}

pub fn build_dressed_basis(
    lattice: &LatticeSpec,
    site: usize,
    link: &LinkSpace,
) -> Result<DressedSiteBasis> {
    if site >= lattice.n_sites() {
        return Err(Error::InvalidArgument(format!("site {site} outside lattice")));
    }
    let directions = lattice.directions(site);
    let stagger = lattice.stagger(site);
    let nr = 2 * link.n_max as u8 + 1;
    let mut states = Vec::new();
    let mut charges = Vec::new();
    let k = directions.len();
    let raw = 2 * (nr as usize).pow(k as u32);
    for code in 0..raw {
        let matter = (code % 2) as u8;
        let mut rest = code / 2;
        let mut rishons = vec![0u8; k];
        for r in rishons.iter_mut().rev() {
            *r = (rest % nr as usize) as u8;
            rest /= nr as usize;
        }
        let rho = staggered_charge(matter, stagger);
        let div: i32 = rishons.iter().map(|&n| n as i32 - link.n_max as i32).sum();
        if div == rho {
            states.push(DressedState { matter, rishons });
            charges.push(rho);
        }
    }
    states.sort();
    charges = states.iter().map(|s| staggered_charge(s.matter, stagger)).collect();
    let mut basis = DressedSiteBasis {
        site,
        coords: lattice.coords(site),
        stagger,
        n_max: link.n_max,
        directions,
        states,
        charges,
        table: Vec::new(),
        xi: link.rishon_ladder(),
    };
    basis.fill_table()?;
    Ok(basis)
}

impl DressedSiteBasis {
    pub fn dim(&self) -> usize {
        self.states.len()
    }

    /// Dimension of the unconstrained matter ⊗ rishon space.
    pub fn raw_dim(&self) -> usize {
        2 * self.xi.nrows().pow(self.directions.len() as u32)
    }

    pub fn index_of(&self, s: &DressedState) -> Option<usize> {
        self.states.binary_search(s).ok()
    }

    pub fn slot(&self, dir: Direction) -> Option<usize> {
        self.directions.iter().position(|&d| d == dir)
    }

    fn diag(&self, f: impl Fn(&DressedState) -> f64) -> Mat {
        let n = self.dim();
        Mat::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(f(&self.states[i]), 0.0)
            } else {
                ZERO
            }
        })
    }

    fn state_parity(&self, s: &DressedState) -> i32 {
        let odd = s.matter as u32 + s.rishons.iter().map(|&n| n as u32).sum::<u32>();
        if odd % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Total fermion parity of the site.
    pub fn parity(&self) -> Mat {
        self.diag(|s| self.state_parity(s) as f64)
    }

    pub fn matter_number(&self) -> Mat {
        self.diag(|s| s.matter as f64)
    }

    pub fn charge(&self) -> Mat {
        self.diag(|s| staggered_charge(s.matter, self.stagger) as f64)
    }

    pub fn rishon_number(&self, dir: Direction) -> Result<Mat> {
        let k = self.slot_or_err(dir)?;
        Ok(self.diag(|s| s.rishons[k] as f64))
    }

    /// `n − n_max` of the rishon at `dir`; equals `L` of the outgoing link for
    /// forward directions and `−L` of the incoming link for backward ones.
    pub fn rishon_offset(&self, dir: Direction) -> Result<Mat> {
        let k = self.slot_or_err(dir)?;
        let nm = self.n_max as f64;
        Ok(self.diag(|s| s.rishons[k] as f64 - nm))
    }

    fn slot_or_err(&self, dir: Direction) -> Result<usize> {
        self.slot(dir).ok_or_else(|| {
            Error::InvalidArgument(format!("site {} has no {} rishon", self.site, dir.name()))
        })
    }

    /// Applies one odd single-mode operator with the in-site Jordan–Wigner
    /// sign of the modes preceding it.
    fn act(&self, op: FermionOp, s: &DressedState) -> Option<(DressedState, C64)> {
        let mut t = s.clone();
        let mut before = 0u32;
        let amp = match op {
            FermionOp::Psi | FermionOp::PsiDag => {
                let (from, to) = if op == FermionOp::Psi { (1, 0) } else { (0, 1) };
                if s.matter != from {
                    return None;
                }
                t.matter = to;
                C64::new(1.0, 0.0)
            }
            FermionOp::Xi(d) | FermionOp::XiDag(d) => {
                let k = self.slot(d)?;
                before += s.matter as u32;
                before += s.rishons[..k].iter().map(|&n| n as u32).sum::<u32>();
                let n = s.rishons[k] as usize;
                let (m, amp) = if matches!(op, FermionOp::Xi(_)) {
                    if n == 0 {
                        return None;
                    }
                    (n - 1, self.xi[(n - 1, n)])
                } else {
                    if n + 1 >= self.xi.nrows() {
                        return None;
                    }
                    (n + 1, self.xi[(n, n + 1)].conj())
                };
                if amp == ZERO {
                    return None;
                }
                t.rishons[k] = m as u8;
                amp
            }
        };
        let sign = if before % 2 == 0 { 1.0 } else { -1.0 };
        Some((t, amp * sign))
    }

    /// Matrix of a product of single-mode operators (rightmost acts first).
    /// Fails if the product leaves the gauge-invariant subspace or names a
    /// missing rishon.
    pub fn word_matrix(&self, ops: &[FermionOp]) -> Result<Mat> {
        for op in ops {
            if let FermionOp::Xi(d) | FermionOp::XiDag(d) = op {
                self.slot_or_err(*d)?;
            }
        }
        let n = self.dim();
        let mut m = Mat::zeros(n, n);
        for (j, s) in self.states.iter().enumerate() {
            let mut cur = Some((s.clone(), C64::new(1.0, 0.0)));
            for &op in ops.iter().rev() {
                cur = cur.and_then(|(st, a)| self.act(op, &st).map(|(t, b)| (t, a * b)));
            }
            if let Some((t, a)) = cur {
                let i = self.index_of(&t).ok_or_else(|| {
                    Error::NotClosed(format!("{} on site {}", word_name(ops), self.site))
                })?;
                m[(i, j)] += a;
            }
        }
        Ok(m)
    }

    pub fn lookup(&self, name: &str) -> Option<&Mat> {
        self.table.iter().find(|(n, _)| n == name).map(|(_, m)| m)
    }

    fn push(&mut self, name: String, m: Mat) {
        if self.lookup(&name).is_none() {
            self.table.push((name, m));
        }
    }

    fn fill_table(&mut self) -> Result<()> {
        self.push("n_psi".into(), self.matter_number());
        self.push("charge".into(), self.charge());
        self.push("parity".into(), self.parity());
        let dirs = self.directions.clone();
        for &d in &dirs {
            let off = self.rishon_offset(d)?;
            self.push(format!("n[{}]", d.name()), self.rishon_number(d)?);
            self.push(format!("dn[{}]", d.name()), off.clone());
            self.push(format!("dn2[{}]", d.name()), &off * &off);
            let hop = if d.forward {
                [FermionOp::PsiDag, FermionOp::XiDag(d)]
            } else {
                [FermionOp::Xi(d), FermionOp::Psi]
            };
            let adj = [hop[1].dagger(), hop[0].dagger()];
            self.push(word_name(&hop), self.word_matrix(&hop)?);
            self.push(word_name(&adj), self.word_matrix(&adj)?);
        }
        for &d in &dirs {
            for &e in &dirs {
                if d.axis != e.axis {
                    let w = [FermionOp::XiDag(d), FermionOp::Xi(e)];
                    let m = self.word_matrix(&w)?;
                    self.push(word_name(&w), m);
                }
            }
        }
        Ok(())
    }
}

/// Parity-even building block attributed to one site, for the audit.
#[derive(Clone, Debug)]
pub struct AuditBlock {
    pub site: usize,
    pub name: String,
    pub matrix: Mat,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DefermionizationReport {
    pub blocks: usize,
    pub pairs: usize,
    pub max_parity_commutator: f64,
    pub max_cross_commutator: f64,
}

/// Checks that every block commutes with its site parity and that blocks on
/// distinct sites commute on the two-site product space.
pub fn verify_defermionization(
    parities: &[Mat],
    blocks: &[AuditBlock],
    tol: f64,
) -> Result<DefermionizationReport> {
    let mut report = DefermionizationReport {
        blocks: blocks.len(),
        pairs: 0,
        max_parity_commutator: 0.0,
        max_cross_commutator: 0.0,
    };
    for b in blocks {
        let p = parities
            .get(b.site)
            .ok_or_else(|| Error::InvalidArgument(format!("no parity for site {}", b.site)))?;
        let c = (&b.matrix * p - p * &b.matrix).norm();
        report.max_parity_commutator = report.max_parity_commutator.max(c);
        if c > tol {
            return Err(Error::Defermionization(format!(
                "{} on site {} breaks site parity (commutator {c:e})",
                b.name, b.site
            )));
        }
    }
    for (i, a) in blocks.iter().enumerate() {
        for b in &blocks[i + 1..] {
            if a.site == b.site {
                continue;
            }
            let ia = Mat::identity(a.matrix.nrows(), a.matrix.nrows());
            let ib = Mat::identity(b.matrix.nrows(), b.matrix.nrows());
            let x = a.matrix.kronecker(&ib);
            let y = ia.kronecker(&b.matrix);
            let c = (&x * &y - &y * &x).norm();
            report.pairs += 1;
            report.max_cross_commutator = report.max_cross_commutator.max(c);
            if c > tol {
                return Err(Error::Defermionization(format!(
                    "{}@{} and {}@{} do not commute ({c:e})",
                    a.name, a.site, b.name, b.site
                )));
            }
        }
    }
    Ok(report)
}

/// Audits every tabled block of every dressed site of `bases`.
pub fn audit_bases(bases: &[DressedSiteBasis], tol: f64) -> Result<DefermionizationReport> {
    let parities: Vec<Mat> = bases.iter().map(|b| b.parity()).collect();
    let mut blocks = Vec::new();
    for b in bases {
        for (name, m) in &b.table {
            blocks.push(AuditBlock {
                site: b.site,
                name: name.clone(),
                matrix: m.clone(),
            });
        }
    }
    verify_defermionization(&parities, &blocks, tol)
}
