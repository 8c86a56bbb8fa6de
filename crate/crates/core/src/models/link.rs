//! Truncated link algebra and its rishon splitting.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Mat, Result, C64, ONE, ZERO};

/// Electric-field eigenbasis of one link, ordered `ℓ = +n_max, …, −n_max`.
/// For `n_max = 1` this is the order `|−1,1⟩, |0,0⟩, |1,−1⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinkSpace {
    pub n_max: u32,
    pub levels: Vec<i32>,
    pub l_matrix: Mat,
    /// Raises `L` by one: `[L, U] = U`.
    pub u_matrix: Mat,
    pub rishon_dim: usize,
    /// Effective three-level rishon ladder (`n_max = 1` only).
    pub rishon_xi: Option<Mat>,
}

pub fn truncated_link_ops(n_max: u32) -> Result<LinkSpace> {
    if n_max < 1 {
        return Err(Error::UnsupportedCutoff(n_max));
    }
    let d = 2 * n_max as usize + 1;
    let levels: Vec<i32> = (0..d).map(|i| n_max as i32 - i as i32).collect();
    let l_matrix = Mat::from_fn(d, d, |i, j| {
        if i == j {
            C64::new(levels[i] as f64, 0.0)
        } else {
            ZERO
        }
    });
    let u_matrix = Mat::from_fn(d, d, |i, j| if j == i + 1 { ONE } else { ZERO });
    let rishon_xi = if n_max == 1 {
        Some(rishon_ops(1)?.xi)
    } else {
        None
    };
    Ok(LinkSpace {
        n_max,
        levels,
        l_matrix,
        u_matrix,
        rishon_dim: d,
        rishon_xi,
    })
}

impl LinkSpace {
    /// Largest entry of `[L, U] − U`.
    pub fn commutator_defect(&self) -> f64 {
        let c = &self.l_matrix * &self.u_matrix - &self.u_matrix * &self.l_matrix - &self.u_matrix;
        c.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Rishon ladder used in dressed sites: the exact two-fermion construction
    /// for `n_max = 1`, a plain graded ladder otherwise (experimental).
    pub fn rishon_ladder(&self) -> Mat {
        match &self.rishon_xi {
            Some(xi) => xi.clone(),
            None => generalized_rishon_xi(self.n_max),
        }
    }
}

/// Rishon built from two Dirac modes `a` (bit 0) and `b` (bit 1), Fock index
/// `n_a + 2 n_b`, mode order `a` before `b`.
#[derive(Clone, Debug, PartialEq)]
pub struct RishonOps {
    pub fock_a: Mat,
    pub fock_b: Mat,
    /// `ξ = a†a b + (1 − b†b) a` on the four-dimensional Fock space.
    pub fock_xi: Mat,
    pub fock_number: Mat,
    pub fock_parity: Mat,
    /// Fock indices of the chain states `n = 0, 1, 2`; `|01⟩` decouples.
    pub chain: [usize; 3],
    /// `ξ` restricted to the chain.
    pub xi: Mat,
    pub number: Mat,
    pub parity: Mat,
}

fn fock_annihilator(mode: usize) -> Mat {
    let mut m = Mat::zeros(4, 4);
    for s in 0..4usize {
        if s >> mode & 1 == 1 {
            let below = (s & ((1 << mode) - 1)).count_ones();
            let sign = if below % 2 == 0 { 1.0 } else { -1.0 };
            m[(s & !(1 << mode), s)] = C64::new(sign, 0.0);
        }
    }
    m
}

pub fn rishon_ops(n_max: u32) -> Result<RishonOps> {
    if n_max != 1 {
        return Err(Error::UnsupportedCutoff(n_max));
    }
    let a = fock_annihilator(0);
    let b = fock_annihilator(1);
    let id = Mat::identity(4, 4);
    let na = a.adjoint() * &a;
    let nb = b.adjoint() * &b;
    let fock_xi = &na * &b + (&id - &nb) * &a;
    let fock_number = &na + &nb;
    let fock_parity = Mat::from_fn(4, 4, |i, j| {
        if i == j {
            C64::new(if (i as u32).count_ones() % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
        } else {
            ZERO
        }
    });
    let chain = [0usize, 1, 3];
    let restrict = |m: &Mat| Mat::from_fn(3, 3, |i, j| m[(chain[i], chain[j])]);
    Ok(RishonOps {
        xi: restrict(&fock_xi),
        number: restrict(&fock_number),
        parity: restrict(&fock_parity),
        fock_a: a,
        fock_b: b,
        fock_xi,
        fock_number,
        fock_parity,
        chain,
    })
}

/// Graded ladder `ξ|n⟩ = |n−1⟩` on `n = 0..2 n_max` (experimental cutoffs).
pub fn generalized_rishon_xi(n_max: u32) -> Mat {
    let d = 2 * n_max as usize + 1;
    Mat::from_fn(d, d, |i, j| if j == i + 1 { ONE } else { ZERO })
}

/// Electric field on a bond from the rishon numbers of its two ends:
/// `2L = n_left − n_right` under the Link Law `n_left + n_right = 2 n_max`.
pub fn electric_from_rishons(n_left: u32, n_right: u32, n_max: u32) -> Result<i32> {
    if n_left + n_right != 2 * n_max {
        return Err(Error::LinkLaw {
            left: n_left,
            right: n_right,
            expected: 2 * n_max,
        });
    }
    Ok((n_left as i32 - n_right as i32) / 2)
}

/// The bond operator `ξ†_left ξ_right` (or its adjoint if `adjoint`) projected
/// onto Link-Law states `|ℓ⟩ ↦ |n_max+ℓ⟩_left |n_max−ℓ⟩_right`, in the
/// `LinkSpace` basis order. Representative phases are fixed so that
/// `ξ†_left ξ_right` reproduces `U` with unit entries.
pub fn bond_projection(link: &LinkSpace, adjoint: bool) -> Mat {
    let xi = link.rishon_ladder();
    let d = xi.nrows();
    let parity = Mat::from_fn(d, d, |i, j| {
        if i == j {
            C64::new(if i % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
        } else {
            ZERO
        }
    });
    // Right-mode operators pick up the parity of the left mode.
    let op = if adjoint {
        (&xi * &parity).kronecker(&xi.adjoint())
    } else {
        (xi.adjoint() * &parity).kronecker(&xi)
    };
    let nm = link.n_max as usize;
    let vecs: Vec<usize> = link
        .levels
        .iter()
        .map(|&l| {
            let nl = (nm as i32 + l) as usize;
            let nr = (nm as i32 - l) as usize;
            nl * d + nr
        })
        .collect();
    let k = vecs.len();
    let raw = Mat::from_fn(k, k, |i, j| op[(vecs[i], vecs[j])]);
    // Phases: walk down the ladder so that each U entry is +1.
    let mut phase = vec![ONE; k];
    let up = (xi.adjoint() * &parity).kronecker(&xi);
    for j in 1..k {
        let e = up[(vecs[j - 1], vecs[j])];
        phase[j] = if e.norm() > 0.0 { phase[j - 1] * e / e.norm() } else { phase[j - 1] };
    }
    Mat::from_fn(k, k, |i, j| phase[i].conj() * raw[(i, j)] * phase[j])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rishon_fock_action() {
        let r = rishon_ops(1).unwrap();
        // |10⟩ → |00⟩, |11⟩ → −|10⟩, |01⟩ and |00⟩ annihilated.
        assert_eq!(r.fock_xi[(0, 1)], ONE);
        assert_eq!(r.fock_xi[(1, 3)], -ONE);
        assert_eq!(r.fock_xi.column(2).norm(), 0.0);
        assert_eq!(r.fock_xi.column(0).norm(), 0.0);
        assert!(rishon_ops(2).is_err());
    }
}
