//! Products of single-mode fermionic operators and their regrouping into
//! parity-even per-site blocks.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::lattice::Direction;
use crate::{Error, Result};

/// Odd single-mode operator on a dressed site.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FermionOp {
    Psi,
    PsiDag,
    Xi(Direction),
    XiDag(Direction),
}

impl FermionOp {
    pub fn dagger(self) -> Self {
        match self {
            FermionOp::Psi => FermionOp::PsiDag,
            FermionOp::PsiDag => FermionOp::Psi,
            FermionOp::Xi(d) => FermionOp::XiDag(d),
            FermionOp::XiDag(d) => FermionOp::Xi(d),
        }
    }

    pub fn name(self) -> String {
        match self {
            FermionOp::Psi => "psi".into(),
            FermionOp::PsiDag => "psi+".into(),
            FermionOp::Xi(d) => format!("xi[{}]", d.name()),
            FermionOp::XiDag(d) => format!("xi+[{}]", d.name()),
        }
    }
}

/// Operator word read left to right; the rightmost factor acts first.
pub type Word = Vec<(usize, FermionOp)>;

pub fn word_name(ops: &[FermionOp]) -> String {
    let parts: Vec<String> = ops.iter().map(|o| o.name()).collect();
    parts.join("*")
}

pub fn adjoint_word(word: &[(usize, FermionOp)]) -> Word {
    word.iter().rev().map(|&(s, o)| (s, o.dagger())).collect()
}

/// Regroups a product of odd operators into site-ordered blocks. Returns
/// the reordering sign and, per site, the factors in their original relative
/// order. Every block must contain an even number of factors.
pub fn defermionize(word: &[(usize, FermionOp)]) -> Result<(i32, Vec<(usize, Vec<FermionOp>)>)> {
    let mut inversions = 0usize;
    for i in 0..word.len() {
        for j in i + 1..word.len() {
            if word[i].0 > word[j].0 {
                inversions += 1;
            }
        }
    }
    let mut sites: Vec<usize> = word.iter().map(|w| w.0).collect();
    sites.sort_unstable();
    sites.dedup();
    let mut blocks = Vec::with_capacity(sites.len());
    for s in sites {
        let ops: Vec<FermionOp> = word.iter().filter(|w| w.0 == s).map(|w| w.1).collect();
        if ops.len() % 2 == 1 {
            return Err(Error::Defermionization(format!(
                "odd block {} on site {s}",
                word_name(&ops)
            )));
        }
        blocks.push((s, ops));
    }
    Ok((if inversions % 2 == 0 { 1 } else { -1 }, blocks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::lattice::Axis;
    use alloc::vec;

    #[test]
    fn regrouping_sign() {
        let px = Direction::plus(Axis::X);
        let mx = Direction::minus(Axis::X);
        // ψ†_0 ξ†_0 ξ_1 ψ_1 is already site ordered.
        let w = vec![
            (0, FermionOp::PsiDag),
            (0, FermionOp::XiDag(px)),
            (1, FermionOp::Xi(mx)),
            (1, FermionOp::Psi),
        ];
        let (sign, blocks) = defermionize(&w).unwrap();
        assert_eq!(sign, 1);
        assert_eq!(blocks.len(), 2);
        // Adjoint: ψ†_1 ξ†_1 ξ_0 ψ_0 moves an even pair past an even pair.
        let (sign, blocks) = defermionize(&adjoint_word(&w)).unwrap();
        assert_eq!(sign, 1);
        assert_eq!(blocks[0].1, vec![FermionOp::XiDag(px).dagger(), FermionOp::Psi]);
        // A single swap of odd operators flips the sign.
        let (sign, _) = defermionize(&[(1, FermionOp::Psi), (0, FermionOp::PsiDag), (0, FermionOp::Psi), (1, FermionOp::Psi)]).unwrap();
        assert_eq!(sign, 1);
        let (sign, _) = defermionize(&[(1, FermionOp::Psi), (0, FermionOp::PsiDag), (1, FermionOp::Psi), (0, FermionOp::Psi)]).unwrap();
        assert_eq!(sign, -1);
        assert!(defermionize(&[(0, FermionOp::Psi), (1, FermionOp::Psi)]).is_err());
    }
}
