//! Binary tree tensor networks and their variational ground-state sweep.

mod environment;
mod layout;
mod state;

pub use environment::{EnvBlock, Environment};
pub use layout::{build_layout, morton_key, BinaryTreeLayout, Link, TreeNode, LEGS, PARENT};
pub use state::{Measurement, TtnState};

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::decomp::TruncationSpec;
use crate::lanczos::lanczos_lowest;
use crate::mps::SweepConfig;
use crate::{DenseTensor, Error, HamiltonianTerms, Result};

/// Ritz gaps below this flag a degenerate ground state.
pub const DEGENERACY_GAP: f64 = 1e-10;

/// Independent random starts per ground-state search; the lowest energy wins.
/// Fixed-bond single-tensor sweeps can stall in local minima at small bond
/// dimension, and a few restarts make the result monotone in the bond cap.
pub const RESTARTS: u64 = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct LocalUpdate {
    pub energy: f64,
    pub gap: Option<f64>,
    /// Set when the eigensolver failed and the tensor was kept.
    pub warning: Option<String>,
}

/// Replaces the centre tensor at `node` by the lowest eigenvector of its
/// effective Hamiltonian. A failed solve keeps the old tensor.
pub fn optimize_tensor(
    state: &mut TtnState,
    env: &mut Environment<'_>,
    node: usize,
    cfg: &SweepConfig,
) -> Result<LocalUpdate> {
    if state.center() != node {
        return Err(Error::InvalidArgument(format!(
            "node {node} is not the orthogonality centre {}",
            state.center()
        )));
    }
    let t = state.tensor(node).clone();
    let op = env.effective_operator(state, node)?;
    let old_norm = t.norm_sqr();
    let old_e = op.expectation(t.data()) / old_norm;
    match lanczos_lowest(&op, t.data(), cfg.lanczos_tol, cfg.lanczos_max_iter) {
        Ok(e) if e.value <= old_e + 1e-13 * old_e.abs().max(1.0) => {
            drop(op);
            let nt = DenseTensor::new(t.shape().to_vec(), &LEGS, e.vector)?;
            state.set_tensor(node, nt);
            env.invalidate(node);
            Ok(LocalUpdate {
                energy: e.value,
                gap: e.gap,
                warning: None,
            })
        }
        Ok(e) => Ok(LocalUpdate {
            energy: old_e,
            gap: e.gap,
            warning: Some(format!("node {node}: eigensolver result above current energy, kept tensor")),
        }),
        Err(Error::NotConverged { residual, .. }) => Ok(LocalUpdate {
            energy: old_e,
            gap: None,
            warning: Some(format!("node {node}: Lanczos stalled at residual {residual:e}, kept tensor")),
        }),
        Err(e) => Err(e),
    }
}

#[derive(Clone, Debug)]
pub struct TtnResult {
    pub energy: f64,
    pub state: TtnState,
    /// Energy after every full tour.
    pub trace: Vec<f64>,
    pub converged: bool,
    /// Final Ritz gap fell below [`DEGENERACY_GAP`].
    pub degenerate: bool,
    pub warnings: Vec<String>,
}

/// Variational ground state on `layout` with bonds capped at `spec.max_bond`.
/// Runs [`RESTARTS`] sweeps from starts derived from `cfg.seed` and returns
/// the lowest.
pub fn sweep_ground_state(
    h: &HamiltonianTerms,
    layout: &BinaryTreeLayout,
    spec: &TruncationSpec,
    cfg: &SweepConfig,
) -> Result<TtnResult> {
    let mut best: Option<TtnResult> = None;
    for k in 0..RESTARTS {
        let seed = cfg.seed.wrapping_add(k.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let r = sweep_from_seed(h, layout, spec, cfg, seed)?;
        if best.as_ref().is_none_or(|b| r.energy < b.energy) {
            best = Some(r);
        }
    }
    Ok(best.expect("RESTARTS is positive"))
}

fn sweep_from_seed(
    h: &HamiltonianTerms,
    layout: &BinaryTreeLayout,
    spec: &TruncationSpec,
    cfg: &SweepConfig,
    seed: u64,
) -> Result<TtnResult> {
    if h.n_sites() != layout.n_physical {
        return Err(Error::InvalidArgument(format!(
            "Hamiltonian has {} sites, layout {}",
            h.n_sites(),
            layout.n_physical
        )));
    }
    if cfg.max_sweeps == 0 {
        return Err(Error::InvalidArgument("max_sweeps must be positive".into()));
    }
    h.check_hermitian(1e-10)?;
    let start = layout.n_internal() - 1;
    let mut rng = crate::random::seeded(seed);
    let mut state = TtnState::random(layout.clone(), &h.local_dims(), spec.max_bond, start, &mut rng)?;
    let mut env = Environment::new(h, &state);
    let tour = layout.euler_tour(start);

    let mut trace = Vec::new();
    let mut warnings = Vec::new();
    let mut energy = f64::INFINITY;
    let mut gap = None;
    let mut converged = false;
    for sweep in 0..cfg.max_sweeps {
        for &node in &tour {
            for x in state.move_center(node)? {
                env.invalidate(x);
            }
            let up = optimize_tensor(&mut state, &mut env, node, cfg)?;
            if let Some(w) = up.warning {
                warnings.push(format!("sweep {sweep}: {w}"));
            }
            energy = up.energy;
            gap = up.gap;
        }
        let prev = trace.last().copied().unwrap_or(f64::INFINITY);
        trace.push(energy);
        if sweep + 1 >= cfg.min_sweeps && (prev - energy).abs() <= cfg.rel_tol * energy.abs().max(1.0) {
            converged = true;
            break;
        }
    }
    Ok(TtnResult {
        energy,
        state,
        trace,
        converged,
        degenerate: gap.is_some_and(|g| g < DEGENERACY_GAP),
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::spin;

    #[test]
    fn z_field_product_ground_state() {
        let h = spin::z_field(8, 1.0).unwrap();
        let layout = build_layout(8, &[]).unwrap();
        let r = sweep_ground_state(&h, &layout, &TruncationSpec::bond(4), &SweepConfig::default()).unwrap();
        assert!((r.energy + 8.0).abs() < 1e-10);
    }

    #[test]
    fn ising_matches_dense() {
        let h = spin::transverse_ising(8, 1.0, 0.7).unwrap();
        let dense = h.to_dense(1 << 10).unwrap();
        let e0 = dense.symmetric_eigen().eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        let layout = build_layout(8, &[]).unwrap();
        let r = sweep_ground_state(&h, &layout, &TruncationSpec::bond(16), &SweepConfig::default()).unwrap();
        assert!((r.energy - e0).abs() < 1e-9 * e0.abs(), "{} vs {}", r.energy, e0);
        assert!(r.state.isometry_defect().unwrap() < 1e-10);
    }
}
