use gaugetn_core::models::{build_compact_qed, build_susskind, truncated_link_ops, ChargeConfig, LatticeSpec, QedOptions};
use gaugetn_core::mps::{canonicalize, mps_from_amplitudes, two_point};
use gaugetn_core::oracle::{assemble_sector, exact_ground};
use gaugetn_core::random::{gaussian_tensor, seeded};
use gaugetn_core::ttn::{build_layout, TtnState};
use gaugetn_core::{contract, svd_split, DenseTensor, Mat, TruncationSpec, C64};
use proptest::prelude::*;

fn all_configs(dims: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &d in dims {
        out = out
            .into_iter()
            .flat_map(|c| {
                (0..d).map(move |s| {
                    let mut c = c.clone();
                    c.push(s);
                    c
                })
            })
            .collect();
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn contract_matches_index_sum(d0 in 1usize..4, d1 in 1usize..4, k in 1usize..5, d2 in 1usize..4, seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let a = gaussian_tensor(&mut rng, vec![d0, k, d1], &["a", "k", "b"]).unwrap();
        let b = gaussian_tensor(&mut rng, vec![d2, k], &["c", "k"]).unwrap();
        let c = contract(&a, &b, &[("k", "k")]).unwrap();
        prop_assert_eq!(c.shape(), &[d0, d1, d2][..]);
        for i in 0..d0 {
            for j in 0..d1 {
                for l in 0..d2 {
                    let naive: C64 = (0..k).map(|p| a.get(&[i, p, j]) * b.get(&[l, p])).sum();
                    prop_assert!((c.get(&[i, j, l]) - naive).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn svd_split_discards_reported_weight(d in 2usize..5, bond in 1usize..6, seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let t = gaussian_tensor(&mut rng, vec![d, d, 3], &["x", "y", "z"]).unwrap();
        let s = svd_split(&t, &["x", "y"], "b", &TruncationSpec::bond(bond)).unwrap();
        prop_assert!(s.singular_values.len() <= bond);
        let mut right = s.right.clone();
        let chunk = right.len() / s.singular_values.len();
        for (z, sv) in right.data_mut().chunks_mut(chunk).zip(&s.singular_values) {
            z.iter_mut().for_each(|x| *x *= *sv);
        }
        let rec = contract(&s.left, &right, &[("b", "b")]).unwrap().permute_to(&["x", "y", "z"]).unwrap();
        let err: f64 = t.data().iter().zip(rec.data()).map(|(a, b)| (a - b).norm_sqr()).sum();
        prop_assert!((err / t.norm_sqr() - s.discarded_weight).abs() < 1e-10);
        if bond >= 3 {
            prop_assert!(s.discarded_weight < 1e-24);
        }
    }

    #[test]
    fn mps_round_trip_and_canonical_forms(n in 2usize..6, seed in any::<u64>(), centre in 0usize..6) {
        let mut rng = seeded(seed);
        let labels: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
        let refs: Vec<&str> = labels.iter().map(|s| s.as_str()).collect();
        let amps = gaussian_tensor(&mut rng, vec![2; n], &refs).unwrap();
        let split = mps_from_amplitudes(&amps, &TruncationSpec::exact()).unwrap();
        let centre = centre % n;
        let canon = canonicalize(&split.state, centre).unwrap();
        prop_assert!(canon.isometry_defect().unwrap() < 1e-10);
        for cfg in all_configs(&vec![2; n]) {
            let want = amps.get(&cfg);
            prop_assert!((split.state.amplitude(&cfg) - want).norm() < 1e-10);
            prop_assert!((canon.amplitude(&cfg) - want).norm() < 1e-10);
        }
    }

    #[test]
    fn ttn_centre_moves_keep_the_state(log_n in 1u32..4, bond in 1usize..5, seed in any::<u64>(), to in 0usize..16) {
        let n = 1usize << log_n;
        let layout = build_layout(n, &[]).unwrap();
        let start = layout.n_internal() - 1;
        let mut rng = seeded(seed);
        let mut state = TtnState::random(layout.clone(), &vec![2; n], bond, start, &mut rng).unwrap();
        prop_assert!(state.isometry_defect().unwrap() < 1e-10);
        let configs = all_configs(&vec![2; n]);
        let before: Vec<C64> = configs.iter().map(|c| state.amplitude(c)).collect();
        let norm: f64 = before.iter().map(|z| z.norm_sqr()).sum();
        prop_assert!((norm - 1.0).abs() < 1e-10);
        state.move_center(to % layout.n_internal()).unwrap();
        prop_assert!(state.isometry_defect().unwrap() < 1e-10);
        for (c, b) in configs.iter().zip(&before) {
            prop_assert!((state.amplitude(c) - b).norm() < 1e-10);
        }
    }

    #[test]
    fn physical_sector_is_coupling_independent(m in -2.0f64..2.0, g in 0.2f64..3.0) {
        let lat = LatticeSpec::chain(4).unwrap();
        let link = truncated_link_ops(1).unwrap();
        let model = build_compact_qed(&lat, m, g, &link, &ChargeConfig::neutral(), &QedOptions::default()).unwrap();
        let (sector, h) = assemble_sector(&model.terms, 10_000).unwrap();
        prop_assert_eq!(sector.len(), 6);
        prop_assert!(h.hermiticity_defect() < 1e-12);
    }
}

/// Half-filled single-particle spectrum of the staggered chain.
fn free_fermion_energy(lat: &LatticeSpec, m: f64) -> f64 {
    let n = lat.n_sites();
    let mut h = Mat::zeros(n, n);
    for j in 0..n {
        h[(j, j)] = C64::new(m * lat.stagger(j) as f64, 0.0);
        if j + 1 < n {
            h[(j, j + 1)] = C64::new(0.0, -0.5);
            h[(j + 1, j)] = C64::new(0.0, 0.5);
        }
    }
    let mut e: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e[..n / 2].iter().sum()
}

#[test]
fn susskind_chain_matches_free_fermions() {
    for (n, m) in [(4, 0.0), (6, 0.3), (8, -0.7)] {
        let lat = LatticeSpec::chain(n).unwrap();
        let model = build_susskind(&lat, m).unwrap();
        let (_, h) = assemble_sector(&model.terms, 100_000).unwrap();
        let e = exact_ground(&h).unwrap().energy;
        let want = free_fermion_energy(&lat, m);
        assert!((e - want).abs() < 1e-10, "N={n} m={m}: {e} vs {want}");
    }
}

#[test]
fn ghz_mps_spectrum_and_correlations() {
    let n = 6;
    let labels: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let refs: Vec<&str> = labels.iter().map(|s| s.as_str()).collect();
    let mut amps = DenseTensor::zeros(vec![2; n], &refs).unwrap();
    let h = C64::new(0.5f64.sqrt(), 0.0);
    amps.data_mut()[0] = h;
    *amps.data_mut().last_mut().unwrap() = h;
    let split = mps_from_amplitudes(&amps, &TruncationSpec::exact()).unwrap();
    for s in &split.spectra {
        assert_eq!(s.len(), 2);
        assert!(s.iter().all(|x| (x - 0.5f64.sqrt()).abs() < 1e-12));
    }
    let z = Mat::from_diagonal(&nalgebra::DVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(-1.0, 0.0)]));
    for i in 0..n {
        for j in i + 1..n {
            let c = two_point(&split.state, &z, i, &z, j).unwrap();
            assert!((c - C64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }
}
