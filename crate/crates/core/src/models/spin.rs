//! Spin chains used as reference models for the tensor-network solvers.

use alloc::vec;

use crate::{HamiltonianTerms, Mat, Result, C64, ONE, ZERO};

pub fn pauli() -> (Mat, Mat, Mat) {
    let i = C64::new(0.0, 1.0);
    (
        Mat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        Mat::from_row_slice(2, 2, &[ZERO, -i, i, ZERO]),
        Mat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
    )
}

/// Open transverse-field Ising chain `−j Σ σ^z σ^z − h Σ σ^x`.
pub fn transverse_ising(n: usize, j: f64, h: f64) -> Result<HamiltonianTerms> {
    let (x, _, z) = pauli();
    let mut ham = HamiltonianTerms::new(&vec![2; n]);
    for s in 0..n {
        ham.add_product(C64::new(-h, 0.0), &[(s, "x", x.clone())])?;
    }
    for s in 0..n.saturating_sub(1) {
        ham.add_product(C64::new(-j, 0.0), &[(s, "z", z.clone()), (s + 1, "z", z.clone())])?;
    }
    Ok(ham)
}

/// Open chain `−Σ σ^x σ^x`.
pub fn xx_chain(n: usize) -> Result<HamiltonianTerms> {
    let (x, _, _) = pauli();
    let mut ham = HamiltonianTerms::new(&vec![2; n]);
    for s in 0..n.saturating_sub(1) {
        ham.add_product(-ONE, &[(s, "x", x.clone()), (s + 1, "x", x.clone())])?;
    }
    Ok(ham)
}

/// Open Heisenberg chain `Σ S·S` for spin-1/2 with an optional uniform field.
pub fn heisenberg(n: usize, field: f64) -> Result<HamiltonianTerms> {
    let (x, y, z) = pauli();
    let mut ham = HamiltonianTerms::new(&vec![2; n]);
    let q = C64::new(0.25, 0.0);
    for s in 0..n.saturating_sub(1) {
        for (name, m) in [("x", &x), ("y", &y), ("z", &z)] {
            ham.add_product(q, &[(s, name, m.clone()), (s + 1, name, m.clone())])?;
        }
    }
    if field != 0.0 {
        for s in 0..n {
            ham.add_product(C64::new(-0.5 * field, 0.0), &[(s, "z", z.clone())])?;
        }
    }
    Ok(ham)
}

/// Single-site field `Σ c·σ^z` (product ground state).
pub fn z_field(n: usize, c: f64) -> Result<HamiltonianTerms> {
    let (_, _, z) = pauli();
    let mut ham = HamiltonianTerms::new(&vec![2; n]);
    for s in 0..n {
        ham.add_product(C64::new(c, 0.0), &[(s, "z", z.clone())])?;
    }
    Ok(ham)
}
