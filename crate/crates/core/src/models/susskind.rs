//! Free staggered fermions with Jordan–Wigner encoded hopping.

use alloc::vec::Vec;

use super::lattice::{Axis, Direction, LatticeSpec};
use super::{LatticeModel, ModelKind};
use crate::hamiltonian::{ModelParams, SectorConstraints};
use crate::{HamiltonianTerms, Mat, Result, C64, ONE, ZERO};

pub(crate) fn fermion_mode_ops() -> (Mat, Mat, Mat, Mat) {
    let c = Mat::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
    let n = Mat::from_row_slice(2, 2, &[ZERO, ZERO, ZERO, ONE]);
    let p = Mat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]);
    (c.clone(), c.adjoint(), n, p)
}

/// Staggered-fermion Hamiltonian
/// `m Σ (−1)^{x+y+z} n + ½ Σ (η_μ ψ†_j ψ_{j+μ} + H.c.)` with
/// `η_x = −i`, `η_y = −(−1)^{jx+jy}`, `η_z = −i (−1)^{jx+jy}`.
pub fn build_susskind(lattice: &LatticeSpec, m: f64) -> Result<LatticeModel> {
    let n = lattice.n_sites();
    let mut h = HamiltonianTerms::new(&alloc::vec![2; n]);
    let (c, cd, num, par) = fermion_mode_ops();
    for s in 0..n {
        h.add_product(C64::new(m * lattice.stagger(s) as f64, 0.0), &[(s, "n", num.clone())])?;
    }
    for bond in lattice.bonds() {
        let [jx, jy, _] = lattice.coords(bond.site);
        let eta = if (jx + jy) % 2 == 0 { 1.0 } else { -1.0 };
        let coeff = match bond.axis {
            Axis::X => C64::new(0.0, -0.5),
            Axis::Y => C64::new(-0.5 * eta, 0.0),
            Axis::Z => C64::new(0.0, -0.5 * eta),
        };
        debug_assert_eq!(lattice.neighbor(bond.site, Direction::plus(bond.axis)), Some(bond.neighbor));
        let (j, k) = (bond.site, bond.neighbor);
        let string = |first: (&'static str, &Mat), last: (&'static str, &Mat)| {
            let mut f: Vec<(usize, &'static str, Mat)> = Vec::new();
            f.push((j, first.0, first.1.clone()));
            for l in j + 1..k {
                f.push((l, "P", par.clone()));
            }
            f.push((k, last.0, last.1.clone()));
            f
        };
        // ψ†_j ψ_k = a†_j P… a_k and its adjoint a_j P… a†_k for j < k.
        h.add_product(coeff, &string(("cdag", &cd), ("c", &c)))?;
        h.add_product(coeff.conj(), &string(("c", &c), ("cdag", &cd)))?;
    }
    let charges: Vec<Vec<i32>> = (0..n)
        .map(|s| {
            let off = (1 - lattice.stagger(s)) / 2;
            alloc::vec![-off, 1 - off]
        })
        .collect();
    h.constraints = SectorConstraints {
        charges: Some(charges),
        total_charge: 0,
        bonds: Vec::new(),
    };
    h.params = ModelParams {
        m,
        g: 0.0,
        lattice: Some(*lattice),
    };
    Ok(LatticeModel {
        lattice: *lattice,
        kind: ModelKind::Susskind,
        terms: h,
        pin_strength: None,
        link_penalty: None,
    })
}
