//! Ground-state runs and static-charge potential scans.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use gaugetn_core::models::{
    build_compact_qed, build_susskind, observables_suite, truncated_link_ops, ChargeConfig, LatticeModel,
    LatticeSpec, LinkLaw, Observables, PinnedCharge, QedOptions,
};
use gaugetn_core::mps::dmrg_ground_state;
use gaugetn_core::oracle::{assemble_sector, exact_ground, SectorState};
use gaugetn_core::ttn::{build_layout, sweep_ground_state};
use gaugetn_core::TruncationSpec;

use crate::config::{Ansatz, ExperimentConfig, ModelName};
use crate::fit::{detect_plateau, fit_coulomb, fit_linear};
use crate::record::{Fits, GroundRecord, PointStatus, ResultRecord, RunStatus, ScanPoint, ScanRecord};

/// Outcome of one ground-state solve.
#[derive(Clone, Debug)]
pub struct Solution {
    pub energy: f64,
    pub trace: Vec<f64>,
    pub converged: bool,
    pub degenerate: bool,
    pub warnings: Vec<String>,
    pub sector_dim: Option<usize>,
    pub observables: Option<Observables>,
}

pub fn lattice_of(cfg: &ExperimentConfig) -> gaugetn_core::Result<LatticeSpec> {
    LatticeSpec::new(cfg.dims3())
}

pub fn build_model(cfg: &ExperimentConfig, charges: &ChargeConfig) -> gaugetn_core::Result<LatticeModel> {
    let lat = lattice_of(cfg)?;
    match cfg.model {
        ModelName::Susskind => build_susskind(&lat, cfg.m),
        ModelName::CompactQed => {
            let link = truncated_link_ops(cfg.n_max)?;
            let opts = QedOptions {
                link_law: LinkLaw::Penalty {
                    strength: cfg.link_penalty,
                },
                ..QedOptions::default()
            };
            build_compact_qed(&lat, cfg.m, cfg.g, &link, charges, &opts)
        }
    }
}

/// Ground state of `model` with the configured ansatz.
pub fn solve(cfg: &ExperimentConfig, model: &LatticeModel, observables: bool) -> gaugetn_core::Result<Solution> {
    let h = &model.terms;
    match cfg.ansatz {
        Ansatz::Exact => {
            let (sector, m) = assemble_sector(h, cfg.oracle_cap)?;
            let g = exact_ground(&m)?;
            let obs = if observables {
                let st = SectorState {
                    sector: &sector,
                    vector: &g.vector,
                };
                Some(observables_suite(model, &st)?)
            } else {
                None
            };
            Ok(Solution {
                energy: g.energy,
                trace: vec![g.energy],
                converged: true,
                degenerate: g.gap.is_some_and(|x| x < gaugetn_core::ttn::DEGENERACY_GAP),
                warnings: Vec::new(),
                sector_dim: Some(sector.len()),
                observables: obs,
            })
        }
        Ansatz::Mps => {
            let r = dmrg_ground_state(h, &TruncationSpec::bond(cfg.chi), &cfg.sweep_config())?;
            let obs = if observables {
                Some(observables_suite(model, &r.state)?)
            } else {
                None
            };
            Ok(Solution {
                energy: r.energy,
                trace: r.trace,
                converged: r.converged,
                degenerate: false,
                warnings: r.warnings,
                sector_dim: None,
                observables: obs,
            })
        }
        Ansatz::Ttn => {
            let shape: &[usize] = if model.lattice.spatial_dims() > 1 { &cfg.lattice } else { &[] };
            let layout = build_layout(h.n_sites(), shape)?;
            let r = sweep_ground_state(h, &layout, &TruncationSpec::bond(cfg.chi), &cfg.sweep_config())?;
            let obs = if observables {
                Some(observables_suite(model, &r.state)?)
            } else {
                None
            };
            Ok(Solution {
                energy: r.energy,
                trace: r.trace,
                converged: r.converged,
                degenerate: r.degenerate,
                warnings: r.warnings,
                sector_dim: None,
                observables: obs,
            })
        }
    }
}

fn ground_record(s: Solution) -> GroundRecord {
    GroundRecord {
        energy: s.energy,
        trace: s.trace,
        converged: s.converged,
        degenerate: s.degenerate,
        warnings: s.warnings,
        sector_dim: s.sector_dim,
        observables: s.observables.as_ref().map(Into::into).unwrap_or_default(),
    }
}

/// Vacuum ground state and its observables.
pub fn run_ground_state(cfg: &ExperimentConfig) -> ResultRecord {
    let mut rec = ResultRecord::new(cfg.clone());
    let result = build_model(cfg, &ChargeConfig::neutral()).and_then(|m| solve(cfg, &m, true));
    match result {
        Ok(s) => rec.ground = Some(ground_record(s)),
        Err(e) => {
            rec.status = RunStatus::SolverFailed;
            rec.errors.push(format!("ground state: {e}"));
        }
    }
    rec
}

/// Sites `(plus, minus)` of a pair `r` apart along x, centred on the row
/// `y = z = 0`. The positive charge takes the even site; `None` when the two
/// sites share a sublattice or do not fit.
pub fn place_pair(lat: &LatticeSpec, r: usize) -> Option<(usize, usize)> {
    let lx = lat.dims()[0];
    if r == 0 || r >= lx || r % 2 == 0 {
        return None;
    }
    let a = (lx - 1 - r) / 2;
    let (sa, sb) = (lat.site([a, 0, 0]), lat.site([a + r, 0, 0]));
    if lat.stagger(sa) == 1 {
        Some((sa, sb))
    } else {
        Some((sb, sa))
    }
}

#[derive(Clone, Copy, Debug)]
enum Job {
    Pair { r: usize, plus: usize, minus: usize },
    Single { site: usize, charge: i32 },
}

/// Runs `jobs` on `workers` threads; output order matches input order.
fn run_jobs<T: Send>(workers: usize, n: usize, f: impl Fn(usize) -> T + Sync) -> Vec<T> {
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<T>>> = Mutex::new((0..n).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..workers.min(n.max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let out = f(i);
                slots.lock().expect("no worker panicked")[i] = Some(out);
            });
        }
    });
    slots
        .into_inner()
        .expect("no worker panicked")
        .into_iter()
        .map(|x| x.expect("every job ran"))
        .collect()
}

/// Vacuum reference plus one pinned-pair ground state per separation.
pub fn run_potential_scan(cfg: &ExperimentConfig) -> ResultRecord {
    let mut rec = run_ground_state(cfg);
    let Some(scan) = cfg.scan.clone() else {
        return rec;
    };
    let Some(e0) = rec.ground.as_ref().map(|g| g.energy) else {
        return rec;
    };
    let lat = match lattice_of(cfg) {
        Ok(l) => l,
        Err(e) => {
            rec.status = RunStatus::SolverFailed;
            rec.errors.push(e.to_string());
            return rec;
        }
    };

    let mut seps = scan.separations.clone();
    seps.sort_unstable();
    let mut jobs = Vec::new();
    let mut points: Vec<ScanPoint> = Vec::new();
    for &r in &seps {
        match place_pair(&lat, r) {
            Some((plus, minus)) => jobs.push(Job::Pair { r, plus, minus }),
            None => points.push(ScanPoint {
                r,
                plus: None,
                minus: None,
                energy: None,
                potential: None,
                converged: None,
                status: PointStatus::InvalidPlacement,
                error: Some(format!("no opposite-sublattice pair {r} apart fits along x")),
            }),
        }
    }
    let single = if scan.independent_pair { place_pair(&lat, 1) } else { None };
    if let Some((plus, minus)) = single {
        jobs.push(Job::Single { site: plus, charge: 1 });
        jobs.push(Job::Single { site: minus, charge: -1 });
    }

    let strength = scan.pin_strength;
    let results = run_jobs(cfg.workers, jobs.len(), |i| {
        let charges = match jobs[i] {
            Job::Pair { plus, minus, .. } => ChargeConfig::pair(plus, minus, strength),
            Job::Single { site, charge } => Ok(ChargeConfig::unbalanced(vec![PinnedCharge {
                site,
                charge,
                strength,
            }])),
        };
        charges
            .and_then(|c| build_model(cfg, &c))
            .and_then(|m| solve(cfg, &m, false))
    });

    let mut singles = Vec::new();
    for (job, res) in jobs.iter().zip(results) {
        match (*job, res) {
            (Job::Pair { r, plus, minus }, res) => points.push(match res {
                Ok(s) => ScanPoint {
                    r,
                    plus: Some(plus),
                    minus: Some(minus),
                    energy: Some(s.energy),
                    potential: Some(s.energy - e0),
                    converged: Some(s.converged),
                    status: PointStatus::Ok,
                    error: None,
                },
                Err(e) => ScanPoint {
                    r,
                    plus: Some(plus),
                    minus: Some(minus),
                    energy: None,
                    potential: None,
                    converged: None,
                    status: PointStatus::SolverFailed,
                    error: Some(e.to_string()),
                },
            }),
            (Job::Single { site, charge }, res) => match res {
                Ok(s) => singles.push(s.energy - e0),
                Err(e) => rec.errors.push(format!("isolated charge {charge} at site {site}: {e}")),
            },
        }
    }
    points.sort_by_key(|p| p.r);

    let (r, v): (Vec<f64>, Vec<f64>) = points
        .iter()
        .filter_map(|p| p.potential.map(|v| (p.r as f64, v)))
        .unzip();
    let g2 = cfg.g * cfg.g;
    let independent_pair = (singles.len() == 2).then(|| singles[0] + singles[1]);
    if points.iter().any(|p| p.status == PointStatus::SolverFailed) || !rec.errors.is_empty() {
        rec.status = RunStatus::Partial;
    }
    rec.scan = Some(ScanRecord {
        reference_energy: e0,
        fits: Fits {
            linear: fit_linear(&r, &v),
            coulomb: fit_coulomb(&r, &v),
        },
        plateau: detect_plateau(&r, &v, scan.plateau_fraction, g2),
        independent_pair,
        points,
    });
    rec
}

/// Process exit code for a finished record.
pub fn exit_code(rec: &ResultRecord) -> i32 {
    match rec.status {
        RunStatus::Ok => 0,
        RunStatus::Partial | RunStatus::SolverFailed => 3,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_take_opposite_sublattices() {
        let lat = LatticeSpec::chain(10).unwrap();
        for r in [1, 3, 5, 7, 9] {
            let (p, m) = place_pair(&lat, r).unwrap();
            assert_eq!(lat.stagger(p), 1);
            assert_eq!(lat.stagger(m), -1);
            assert_eq!(p.abs_diff(m), r);
        }
        assert!(place_pair(&lat, 2).is_none());
        assert!(place_pair(&lat, 10).is_none());
    }

    #[test]
    fn jobs_keep_input_order() {
        let out = run_jobs(4, 20, |i| i * i);
        assert_eq!(out, (0..20).map(|i| i * i).collect::<Vec<_>>());
        assert!(run_jobs(3, 0, |i| i).is_empty());
    }
}
