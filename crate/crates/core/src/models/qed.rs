//! Compact QED on dressed rishon sites.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::dressed::{build_dressed_basis, DressedSiteBasis};
use super::fermion::{adjoint_word, defermionize, word_name, FermionOp, Word};
use super::lattice::{Axis, Direction, LatticeSpec, Plaquette};
use super::link::LinkSpace;
use super::{LatticeModel, ModelKind};
use crate::hamiltonian::{BondConstraint, ModelParams, SectorConstraints};
use crate::{Error, HamiltonianTerms, Mat, Result, C64};

/// A static charge held in place by `strength · (ρ − charge)²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PinnedCharge {
    pub site: usize,
    pub charge: i32,
    /// Defaults to `10³ · max(|m|, g²/2, 4/g²)` when absent.
    pub strength: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct ChargeConfig {
    pub pinned: Vec<PinnedCharge>,
}

impl ChargeConfig {
    pub fn neutral() -> Self {
        Self::default()
    }

    /// Neutral set of pins; total pinned charge must vanish.
    pub fn new(pinned: Vec<PinnedCharge>) -> Result<Self> {
        let total: i32 = pinned.iter().map(|p| p.charge).sum();
        if total != 0 {
            return Err(Error::InvalidArgument(format!("pinned charges sum to {total}")));
        }
        Ok(Self { pinned })
    }

    /// A `+1` and a `−1` charge. The positive one must sit on an even site and
    /// the negative one on an odd site.
    pub fn pair(plus: usize, minus: usize, strength: Option<f64>) -> Result<Self> {
        Self::new(vec![
            PinnedCharge {
                site: plus,
                charge: 1,
                strength,
            },
            PinnedCharge {
                site: minus,
                charge: -1,
                strength,
            },
        ])
    }

    /// Pins without the neutrality requirement. The dynamical matter then
    /// screens the excess; used to measure the energy of isolated charges.
    pub fn unbalanced(pinned: Vec<PinnedCharge>) -> Self {
        Self { pinned }
    }

    pub fn validate(&self, lattice: &LatticeSpec) -> Result<()> {
        for (i, p) in self.pinned.iter().enumerate() {
            if p.site >= lattice.n_sites() {
                return Err(Error::InvalidArgument(format!("pinned site {} outside lattice", p.site)));
            }
            if self.pinned[..i].iter().any(|q| q.site == p.site) {
                return Err(Error::InvalidArgument(format!("site {} pinned twice", p.site)));
            }
            let allowed = if lattice.stagger(p.site) == 1 { 0..=1 } else { -1..=0 };
            if !allowed.contains(&p.charge) {
                return Err(Error::InvalidArgument(format!(
                    "charge {} cannot sit on site {} (stagger {})",
                    p.charge,
                    p.site,
                    lattice.stagger(p.site)
                )));
            }
            if let Some(s) = p.strength {
                if !(s > 0.0 && s.is_finite()) {
                    return Err(Error::InvalidArgument("pin strength must be positive".into()));
                }
            }
        }
        Ok(())
    }
}

/// How the two-rishon Link Law of every bond is imposed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LinkLaw {
    /// Only recorded as sector metadata; valid for the exact oracle, which
    /// restricts to the Link-Law sector.
    Exact,
    /// Additionally adds `strength · (n_left + n_right − 2 n_max)²` per bond,
    /// so variational solvers working in the full product space stay in the
    /// physical sector.
    Penalty { strength: Option<f64> },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QedOptions {
    pub hopping: f64,
    /// Electric coefficient, default `g²/2`.
    pub electric: Option<f64>,
    /// Magnetic coefficient, default `4/g²`.
    pub magnetic: Option<f64>,
    pub link_law: LinkLaw,
}

impl Default for QedOptions {
    fn default() -> Self {
        Self {
            hopping: 1.0,
            electric: None,
            magnetic: None,
            link_law: LinkLaw::Penalty { strength: None },
        }
    }
}

/// Default pin strength `10³ · max(|m|, g²/2, 4/g²)`.
pub fn default_pin_strength(m: f64, g: f64) -> f64 {
    let g2 = g * g;
    let mut scale = m.abs().max(g2 / 2.0);
    if g2 > 0.0 {
        scale = scale.max(4.0 / g2);
    }
    1e3 * if scale > 0.0 { scale } else { 1.0 }
}

/// Resolved coefficients of a compact-QED build.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QedCoefficients {
    pub hopping: f64,
    pub electric: f64,
    pub magnetic: Option<f64>,
    pub pin_strength: f64,
    pub link_penalty: Option<f64>,
}

pub fn resolve_coefficients(lattice: &LatticeSpec, m: f64, g: f64, opts: &QedOptions) -> Result<QedCoefficients> {
    if !m.is_finite() || !g.is_finite() || g < 0.0 {
        return Err(Error::InvalidArgument("m and g must be finite with g ≥ 0".into()));
    }
    let g2 = g * g;
    let electric = opts.electric.unwrap_or(g2 / 2.0);
    let magnetic = if lattice.spatial_dims() >= 2 {
        match opts.magnetic {
            Some(c) => Some(c),
            None if g == 0.0 => {
                return Err(Error::InvalidArgument(
                    "magnetic coefficient 4/g² is undefined at g = 0; set it explicitly or to 0".into(),
                ))
            }
            None => Some(4.0 / g2),
        }
    } else {
        None
    };
    let magnetic = magnetic.filter(|&c| c != 0.0);
    let scale = [1.0, m.abs(), electric.abs(), magnetic.unwrap_or(0.0).abs(), opts.hopping.abs()]
        .into_iter()
        .fold(0.0, f64::max);
    let link_penalty = match opts.link_law {
        LinkLaw::Exact => None,
        LinkLaw::Penalty { strength } => {
            Some(strength.unwrap_or(10.0 * (2 * lattice.spatial_dims()) as f64 * scale))
        }
    };
    Ok(QedCoefficients {
        hopping: opts.hopping,
        electric,
        magnetic,
        pin_strength: default_pin_strength(m, g),
        link_penalty,
    })
}

/// Hopping word `ψ†_x U_{x,μ} ψ_{x+μ}` with `U = ξ†_{x,+μ} ξ_{x+μ,−μ}`.
pub fn hopping_word(x: usize, axis: Axis, y: usize) -> Word {
    vec![
        (x, FermionOp::PsiDag),
        (x, FermionOp::XiDag(Direction::plus(axis))),
        (y, FermionOp::Xi(Direction::minus(axis))),
        (y, FermionOp::Psi),
    ]
}

/// Corners `(x, x+μ, x+μ+ν, x+ν)` of a plaquette.
pub fn plaquette_corners(lattice: &LatticeSpec, p: &Plaquette) -> [usize; 4] {
    let a = p.site;
    let b = lattice.neighbor(a, Direction::plus(p.mu)).expect("plaquette corner");
    let c = lattice.neighbor(b, Direction::plus(p.nu)).expect("plaquette corner");
    let d = lattice.neighbor(a, Direction::plus(p.nu)).expect("plaquette corner");
    [a, b, c, d]
}

/// `U_{x,μ} U_{x+μ,ν} U†_{x+ν,μ} U†_{x,ν}` as a rishon word.
pub fn plaquette_word(lattice: &LatticeSpec, p: &Plaquette) -> Word {
    let [a, b, c, d] = plaquette_corners(lattice, p);
    let (pm, mm) = (Direction::plus(p.mu), Direction::minus(p.mu));
    let (pn, mn) = (Direction::plus(p.nu), Direction::minus(p.nu));
    vec![
        (a, FermionOp::XiDag(pm)),
        (b, FermionOp::Xi(mm)),
        (b, FermionOp::XiDag(pn)),
        (c, FermionOp::Xi(mn)),
        (c, FermionOp::XiDag(mm)),
        (d, FermionOp::Xi(pm)),
        (d, FermionOp::XiDag(mn)),
        (a, FermionOp::Xi(pn)),
    ]
}

/// Per-site matrices and overall sign of a rishon word.
pub fn word_blocks(bases: &[DressedSiteBasis], word: &[(usize, FermionOp)]) -> Result<(i32, Vec<(usize, alloc::string::String, Mat)>)> {
    let (sign, groups) = defermionize(word)?;
    let mut out = Vec::with_capacity(groups.len());
    for (site, ops) in groups {
        let m = bases[site].word_matrix(&ops)?;
        out.push((site, word_name(&ops), m));
    }
    Ok((sign, out))
}

fn add_word(h: &mut HamiltonianTerms, bases: &[DressedSiteBasis], coeff: C64, word: &[(usize, FermionOp)]) -> Result<()> {
    let (sign, blocks) = word_blocks(bases, word)?;
    let mut factors = Vec::with_capacity(blocks.len());
    for (site, name, m) in blocks {
        factors.push((site, h.add_op(site, &name, m)?));
    }
    h.add_term(coeff * sign as f64, factors)
}

fn add_with_adjoint(h: &mut HamiltonianTerms, bases: &[DressedSiteBasis], coeff: C64, word: &[(usize, FermionOp)]) -> Result<()> {
    add_word(h, bases, coeff, word)?;
    add_word(h, bases, coeff.conj(), &adjoint_word(word))
}

fn table_op(h: &mut HamiltonianTerms, basis: &DressedSiteBasis, name: &str) -> Result<crate::OpId> {
    let m = basis
        .lookup(name)
        .ok_or_else(|| Error::InvalidArgument(format!("missing table entry {name}")))?
        .clone();
    h.add_op(basis.site, name, m)
}

/// Compact-QED Hamiltonian
/// `−t Σ (ψ† U ψ + H.c.) + m Σ (−1)^x n + (g²/2) Σ L² − (4/g²) Σ (□ + H.c.)`
/// on dressed sites, with pinned charges and the Link Law as configured.
pub fn build_compact_qed(
    lattice: &LatticeSpec,
    m: f64,
    g: f64,
    link: &LinkSpace,
    charges: &ChargeConfig,
    opts: &QedOptions,
) -> Result<LatticeModel> {
    charges.validate(lattice)?;
    let coeffs = resolve_coefficients(lattice, m, g, opts)?;
    let n = lattice.n_sites();
    let bases = (0..n)
        .map(|s| build_dressed_basis(lattice, s, link))
        .collect::<Result<Vec<_>>>()?;
    let dims: Vec<usize> = bases.iter().map(|b| b.dim()).collect();
    let mut h = HamiltonianTerms::new(&dims);
    let re = |x: f64| C64::new(x, 0.0);

    for bond in lattice.bonds() {
        let w = hopping_word(bond.site, bond.axis, bond.neighbor);
        add_with_adjoint(&mut h, &bases, re(-coeffs.hopping), &w)?;
    }
    for s in 0..n {
        let id = table_op(&mut h, &bases[s], "n_psi")?;
        h.add_term(re(m * lattice.stagger(s) as f64), vec![(s, id)])?;
    }
    for bond in lattice.bonds() {
        let name = format!("dn2[{}]", Direction::plus(bond.axis).name());
        let id = table_op(&mut h, &bases[bond.site], &name)?;
        h.add_term(re(coeffs.electric), vec![(bond.site, id)])?;
    }
    if let Some(mag) = coeffs.magnetic {
        for p in lattice.plaquettes() {
            add_with_adjoint(&mut h, &bases, re(-mag), &plaquette_word(lattice, &p))?;
        }
    }
    for pin in &charges.pinned {
        let b = &bases[pin.site];
        let strength = pin.strength.unwrap_or(coeffs.pin_strength);
        let d = b.dim();
        let mat = Mat::from_fn(d, d, |i, j| {
            if i == j {
                let x = (b.charges[i] - pin.charge) as f64;
                re(x * x)
            } else {
                re(0.0)
            }
        });
        let id = h.add_op(pin.site, &format!("pin[{}]", pin.charge), mat)?;
        h.add_term(re(strength), vec![(pin.site, id)])?;
    }
    if let Some(pen) = coeffs.link_penalty {
        for bond in lattice.bonds() {
            let (dp, dm) = (Direction::plus(bond.axis), Direction::minus(bond.axis));
            let (x, y) = (bond.site, bond.neighbor);
            let a2 = table_op(&mut h, &bases[x], &format!("dn2[{}]", dp.name()))?;
            let b2 = table_op(&mut h, &bases[y], &format!("dn2[{}]", dm.name()))?;
            let a1 = table_op(&mut h, &bases[x], &format!("dn[{}]", dp.name()))?;
            let b1 = table_op(&mut h, &bases[y], &format!("dn[{}]", dm.name()))?;
            h.add_term(re(pen), vec![(x, a2)])?;
            h.add_term(re(pen), vec![(y, b2)])?;
            h.add_term(re(2.0 * pen), vec![(x, a1), (y, b1)])?;
        }
    }

    let target = 2 * link.n_max as i32;
    let mut bonds = Vec::new();
    for bond in lattice.bonds() {
        let (dp, dm) = (Direction::plus(bond.axis), Direction::minus(bond.axis));
        let (bx, by) = (&bases[bond.site], &bases[bond.neighbor]);
        let kx = bx.slot(dp).expect("forward rishon");
        let ky = by.slot(dm).expect("backward rishon");
        bonds.push(BondConstraint {
            a: bond.site,
            b: bond.neighbor,
            qa: bx.states.iter().map(|s| s.rishons[kx] as i32).collect(),
            qb: by.states.iter().map(|s| s.rishons[ky] as i32).collect(),
            target,
        });
    }
    h.constraints = SectorConstraints {
        charges: Some(bases.iter().map(|b| b.charges.clone()).collect()),
        total_charge: 0,
        bonds,
    };
    h.params = ModelParams {
        m,
        g,
        lattice: Some(*lattice),
    };
    Ok(LatticeModel {
        lattice: *lattice,
        kind: ModelKind::CompactQed {
            link: link.clone(),
            bases,
            charges: charges.clone(),
            coefficients: coeffs,
        },
        terms: h,
        pin_strength: Some(coeffs.pin_strength),
        link_penalty: coeffs.link_penalty,
    })
}
