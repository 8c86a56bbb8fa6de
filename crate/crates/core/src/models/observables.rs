//! Charges, electric fields and plaquettes of a ground state.

use alloc::format;
use alloc::vec::Vec;

use super::lattice::{Axis, Direction};
use super::qed::{plaquette_word, word_blocks};
use super::{LatticeModel, ModelKind};
use crate::{Error, Mat, Result, C64};

/// Anything that can evaluate `⟨ψ| Π_k O_k |ψ⟩ / ⟨ψ|ψ⟩` for site-local factors
/// given in increasing site order.
pub trait StateAccessor {
    fn expect_product(&self, factors: &[(usize, &Mat)]) -> Result<C64>;
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinkObservable {
    pub site: usize,
    pub axis: Axis,
    pub l: f64,
    pub l2: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlaquetteObservable {
    pub site: usize,
    pub mu: Axis,
    pub nu: Axis,
    /// `⟨□ + H.c.⟩`.
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Observables {
    pub occupations: Vec<f64>,
    pub charges: Vec<f64>,
    pub links: Vec<LinkObservable>,
    pub plaquettes: Vec<PlaquetteObservable>,
}

pub fn observables_suite(model: &LatticeModel, state: &dyn StateAccessor) -> Result<Observables> {
    let n = model.lattice.n_sites();
    let mut out = Observables {
        occupations: Vec::with_capacity(n),
        charges: Vec::with_capacity(n),
        links: Vec::new(),
        plaquettes: Vec::new(),
    };
    match &model.kind {
        ModelKind::Susskind => {
            let num = Mat::from_fn(2, 2, |i, j| C64::new((i == 1 && j == 1) as u8 as f64, 0.0));
            for s in 0..n {
                let occ = state.expect_product(&[(s, &num)])?.re;
                out.occupations.push(occ);
                out.charges.push(occ - ((1 - model.lattice.stagger(s)) / 2) as f64);
            }
        }
        ModelKind::CompactQed { bases, .. } => {
            let get = |s: usize, name: &str| {
                bases[s]
                    .lookup(name)
                    .ok_or_else(|| Error::InvalidArgument(format!("missing table entry {name}")))
            };
            for s in 0..n {
                out.occupations.push(state.expect_product(&[(s, get(s, "n_psi")?)])?.re);
                out.charges.push(state.expect_product(&[(s, get(s, "charge")?)])?.re);
            }
            for b in model.lattice.bonds() {
                let d = Direction::plus(b.axis).name();
                let l = state.expect_product(&[(b.site, get(b.site, &format!("dn[{d}]"))?)])?.re;
                let l2 = state.expect_product(&[(b.site, get(b.site, &format!("dn2[{d}]"))?)])?.re;
                out.links.push(LinkObservable {
                    site: b.site,
                    axis: b.axis,
                    l,
                    l2,
                });
            }
            for p in model.lattice.plaquettes() {
                let (sign, blocks) = word_blocks(bases, &plaquette_word(&model.lattice, &p))?;
                let factors: Vec<(usize, &Mat)> = blocks.iter().map(|(s, _, m)| (*s, m)).collect();
                let v = state.expect_product(&factors)? * sign as f64;
                out.plaquettes.push(PlaquetteObservable {
                    site: p.site,
                    mu: p.mu,
                    nu: p.nu,
                    value: 2.0 * v.re,
                });
            }
        }
    }
    Ok(out)
}
