//! Two-site DMRG with explicit sum-of-products environments.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{transfer_env, transfer_env_right, Boundary, MpsState, L, P, R};
use crate::decomp::{diag, svd_split, TruncationSpec};
use crate::effective::EffectiveOperator;
use crate::lanczos::lanczos_lowest;
use crate::{contract, DenseTensor, Error, HamiltonianTerms, Mat, Result, C64};

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub max_sweeps: usize,
    pub min_sweeps: usize,
    /// Stop once `|ΔE| / max(1, |E|)` between full sweeps falls below this.
    pub rel_tol: f64,
    pub lanczos_tol: f64,
    pub lanczos_max_iter: usize,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            max_sweeps: 30,
            min_sweeps: 2,
            rel_tol: 1e-12,
            lanczos_tol: 1e-12,
            lanczos_max_iter: 2000,
            seed: 7,
        }
    }
}

#[derive(Clone, Debug)]
pub struct DmrgResult {
    pub energy: f64,
    pub state: MpsState,
    /// Energy after every half sweep.
    pub trace: Vec<f64>,
    pub converged: bool,
    pub max_discarded_weight: f64,
    pub warnings: Vec<String>,
}

/// Contraction of one side of the chain: completed terms in `block` and the
/// open strings of terms crossing the boundary in `partial`.
#[derive(Clone, Debug, Default)]
struct Env {
    block: Option<Mat>,
    partial: BTreeMap<usize, Mat>,
}

fn grow_left(h: &HamiltonianTerms, env: &Env, a: &DenseTensor, k: usize) -> Env {
    let dl = a.shape()[0];
    let mut out = Env {
        block: env.block.as_ref().map(|b| transfer_env(a, b, None)),
        partial: BTreeMap::new(),
    };
    for (idx, t) in h.terms.iter().enumerate() {
        if t.first_site() > k || t.last_site() < k {
            continue;
        }
        let ident;
        let x = if t.first_site() == k {
            ident = Mat::identity(dl, dl);
            &ident
        } else {
            &env.partial[&idx]
        };
        let y = transfer_env(a, x, t.op_at(k).map(|id| h.op(k, id)));
        if t.last_site() == k {
            let y = y * t.coeff;
            match &mut out.block {
                Some(b) => *b += y,
                slot => *slot = Some(y),
            }
        } else {
            out.partial.insert(idx, y);
        }
    }
    out
}

fn grow_right(h: &HamiltonianTerms, env: &Env, a: &DenseTensor, k: usize) -> Env {
    let dr = a.shape()[2];
    let mut out = Env {
        block: env.block.as_ref().map(|b| transfer_env_right(a, b, None)),
        partial: BTreeMap::new(),
    };
    for (idx, t) in h.terms.iter().enumerate() {
        if t.first_site() > k || t.last_site() < k {
            continue;
        }
        let ident;
        let x = if t.last_site() == k {
            ident = Mat::identity(dr, dr);
            &ident
        } else {
            &env.partial[&idx]
        };
        let y = transfer_env_right(a, x, t.op_at(k).map(|id| h.op(k, id)));
        if t.first_site() == k {
            let y = y * t.coeff;
            match &mut out.block {
                Some(b) => *b += y,
                slot => *slot = Some(y),
            }
        } else {
            out.partial.insert(idx, y);
        }
    }
    out
}

/// Effective Hamiltonian on the two-site tensor `[l, p_i, p_{i+1}, r]`.
fn two_site_operator<'a>(
    h: &'a HamiltonianTerms,
    left: &'a Env,
    right: &'a Env,
    i: usize,
    dims: Vec<usize>,
) -> EffectiveOperator<'a> {
    let one = C64::new(1.0, 0.0);
    let mut op = EffectiveOperator::new(dims);
    if let Some(b) = &left.block {
        op.add(one, vec![(0, b)]);
    }
    if let Some(b) = &right.block {
        op.add(one, vec![(3, b)]);
    }
    for (idx, t) in h.terms.iter().enumerate() {
        if t.last_site() < i || t.first_site() > i + 1 {
            continue;
        }
        let mut f: Vec<(usize, &Mat)> = Vec::with_capacity(4);
        if t.first_site() < i {
            f.push((0, &left.partial[&idx]));
        }
        for (leg, s) in [(1, i), (2, i + 1)] {
            if let Some(id) = t.op_at(s) {
                f.push((leg, h.op(s, id)));
            }
        }
        if t.last_site() > i + 1 {
            f.push((3, &right.partial[&idx]));
        }
        op.add(t.coeff, f);
    }
    op
}

fn theta_of(state: &MpsState, i: usize) -> Result<DenseTensor> {
    let a = state.tensor(i).clone().relabel(P, "p0")?.relabel(R, "__b")?;
    let b = state.tensor(i + 1).clone().relabel(P, "p1")?.relabel(L, "__b")?;
    contract(&a, &b, &[("__b", "__b")])
}

/// Lowest-energy open MPS for `h` with bonds capped by `spec`.
pub fn dmrg_ground_state(
    h: &HamiltonianTerms,
    spec: &TruncationSpec,
    cfg: &SweepConfig,
) -> Result<DmrgResult> {
    let n = h.n_sites();
    if n < 2 {
        return Err(Error::InvalidArgument("DMRG needs at least two sites".into()));
    }
    if cfg.max_sweeps == 0 {
        return Err(Error::InvalidArgument("max_sweeps must be positive".into()));
    }
    h.check_hermitian(1e-10)?;
    let dims = h.local_dims();
    let mut rng = crate::random::seeded(cfg.seed);
    let mut state = MpsState::random(&dims, spec.max_bond.min(16), &mut rng)?;

    let mut lefts: Vec<Env> = vec![Env::default(); n + 1];
    let mut rights: Vec<Env> = vec![Env::default(); n + 1];
    for k in (2..n).rev() {
        rights[k] = grow_right(h, &rights[k + 1], state.tensor(k), k);
    }

    let mut trace = Vec::new();
    let mut warnings = Vec::new();
    let mut max_discarded = 0.0f64;
    let mut energy = f64::INFINITY;
    let mut converged = false;
    let mut last_sweep = f64::INFINITY;

    for sweep in 0..cfg.max_sweeps {
        for forward in [true, false] {
            let order: Vec<usize> = if forward {
                (0..n - 1).collect()
            } else {
                (0..n - 1).rev().collect()
            };
            for i in order {
                let theta = theta_of(&state, i)?;
                let tdims = theta.shape().to_vec();
                let op = two_site_operator(h, &lefts[i], &rights[i + 2], i, tdims.clone());
                let old_norm = theta.norm_sqr();
                let old_e = op.expectation(theta.data()) / old_norm;
                let new_theta = match lanczos_lowest(&op, theta.data(), cfg.lanczos_tol, cfg.lanczos_max_iter) {
                    Ok(e) => DenseTensor::new(tdims.clone(), &[L, "p0", "p1", R], e.vector)?,
                    Err(Error::NotConverged { residual, .. }) => {
                        warnings.push(format!("sweep {sweep} bond {i}: Lanczos stalled at residual {residual:e}"));
                        theta.clone()
                    }
                    Err(e) => return Err(e),
                };
                let mut d = svd_split(&new_theta, &[L, "p0"], "__b", spec)?;
                let s_norm = libm::sqrt(d.singular_values.iter().map(|x| x * x).sum::<f64>());
                d.singular_values.iter_mut().for_each(|x| *x /= s_norm);
                let trial = contract(&d.left.apply_on("__b", &diag(&d.singular_values))?, &d.right, &[("__b", "__b")])?;
                let new_e = op.expectation(trial.data());
                let slack = 1e-13 * old_e.abs().max(1.0);
                let d = if new_e <= old_e + slack {
                    max_discarded = max_discarded.max(d.discarded_weight);
                    energy = new_e;
                    d
                } else {
                    // Keep the previous two-site tensor, which fits the bond exactly.
                    let mut th = theta;
                    th.scale(C64::new(1.0 / libm::sqrt(old_norm), 0.0));
                    energy = old_e;
                    svd_split(&th, &[L, "p0"], "__b", &TruncationSpec::exact())?
                };
                let sv = diag(&d.singular_values);
                let (left, right) = if forward {
                    (d.left, d.right.apply_on("__b", &sv)?)
                } else {
                    (d.left.apply_on("__b", &sv)?, d.right)
                };
                let a = left.relabel("p0", P)?.relabel("__b", R)?.permute_to(&[L, P, R])?;
                let b = right.relabel("p1", P)?.relabel("__b", L)?.permute_to(&[L, P, R])?;
                state.set_tensor(i, a);
                state.set_tensor(i + 1, b);
                if forward {
                    state.set_center(Some(i + 1));
                    lefts[i + 1] = grow_left(h, &lefts[i], state.tensor(i), i);
                } else {
                    state.set_center(Some(i));
                    rights[i + 1] = grow_right(h, &rights[i + 2], state.tensor(i + 1), i + 1);
                }
            }
            trace.push(energy);
        }
        let delta = (last_sweep - energy).abs();
        last_sweep = energy;
        if sweep + 1 >= cfg.min_sweeps && delta <= cfg.rel_tol * energy.abs().max(1.0) {
            converged = true;
            break;
        }
    }
    debug_assert!(matches!(state.boundary(), Boundary::Open));
    Ok(DmrgResult {
        energy,
        state,
        trace,
        converged,
        max_discarded_weight: max_discarded,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::spin;

    #[test]
    fn two_site_xx() {
        let (x, _, _) = spin::pauli();
        let mut h = HamiltonianTerms::new(&[2, 2]);
        h.add_product(C64::new(-1.0, 0.0), &[(0, "x", x.clone()), (1, "x", x)]).unwrap();
        let r = dmrg_ground_state(&h, &TruncationSpec::bond(4), &SweepConfig::default()).unwrap();
        assert!((r.energy + 1.0).abs() < 1e-10);
    }

    #[test]
    fn ising_matches_dense() {
        let h = spin::transverse_ising(8, 1.0, 1.0).unwrap();
        let dense = h.to_dense(1 << 10).unwrap();
        let e0 = dense.symmetric_eigen().eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        let r = dmrg_ground_state(&h, &TruncationSpec::bond(32), &SweepConfig::default()).unwrap();
        assert!((r.energy - e0).abs() < 1e-9 * e0.abs(), "{} vs {}", r.energy, e0);
        for w in r.trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
    }
}
