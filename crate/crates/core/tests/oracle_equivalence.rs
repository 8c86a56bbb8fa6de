use gaugetn_core::decomp::TruncationSpec;
use gaugetn_core::models::{build_compact_qed, build_susskind, truncated_link_ops, ChargeConfig, LatticeModel, LatticeSpec, QedOptions};
use gaugetn_core::mps::{dmrg_ground_state, SweepConfig};
use gaugetn_core::oracle::{assemble_sector, exact_ground, fidelity, tn_to_vector, DEFAULT_CAP};
use gaugetn_core::ttn::{build_layout, sweep_ground_state};

fn check(name: &str, model: &LatticeModel, chi: usize) {
    let h = &model.terms;
    let (sector, mat) = assemble_sector(h, DEFAULT_CAP).unwrap();
    let exact = exact_ground(&mat).unwrap();
    let cfg = SweepConfig::default();
    let t0 = std::time::Instant::now();
    let d = dmrg_ground_state(h, &TruncationSpec::bond(chi), &cfg).unwrap();
    let td = t0.elapsed();
    let dims = model.lattice.dims();
    let shape: Vec<usize> = dims.iter().copied().filter(|&d| d > 1).collect();
    let layout = build_layout(h.n_sites(), &shape).unwrap();
    let t1 = std::time::Instant::now();
    let t = sweep_ground_state(h, &layout, &TruncationSpec::bond(chi), &cfg).unwrap();
    let tt = t1.elapsed();
    let fd = fidelity(&tn_to_vector(&d.state, &sector), &exact.vector);
    let ft = fidelity(&tn_to_vector(&t.state, &sector), &exact.vector);
    let rel = |e: f64| (e - exact.energy).abs() / exact.energy.abs().max(1.0);
    println!(
        "{name}: sector {} exact {:.12} dmrg {:.12} ({:.1e}, F {:.9}, {:?}) ttn {:.12} ({:.1e}, F {:.9}, {:?})",
        sector.len(), exact.energy, d.energy, rel(d.energy), fd, td, t.energy, rel(t.energy), ft, tt
    );
    assert!(rel(d.energy) < 1e-8 && rel(t.energy) < 1e-8);
    assert!(fd > 1.0 - 1e-6 && ft > 1.0 - 1e-6);
}

#[test]
fn susskind_chains() {
    for n in [4, 6, 8] {
        let m = build_susskind(&LatticeSpec::chain(n).unwrap(), 0.5).unwrap();
        check(&format!("susskind N={n}"), &m, 32);
    }
}

#[test]
fn qed_chains() {
    let link = truncated_link_ops(1).unwrap();
    for n in [4, 6] {
        let lat = LatticeSpec::chain(n).unwrap();
        let m = build_compact_qed(&lat, 0.5, 1.0, &link, &ChargeConfig::neutral(), &QedOptions::default()).unwrap();
        check(&format!("qed N={n}"), &m, 32);
    }
}

#[test]
fn qed_plaquette() {
    let link = truncated_link_ops(1).unwrap();
    let lat = LatticeSpec::new([2, 2, 1]).unwrap();
    let m = build_compact_qed(&lat, 0.5, 1.0, &link, &ChargeConfig::neutral(), &QedOptions::default()).unwrap();
    check("qed 2x2", &m, 64);
}
