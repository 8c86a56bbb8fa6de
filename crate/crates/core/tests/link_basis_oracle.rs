//! Compact QED built directly in the fermion ⊗ electric-field basis with a
//! global Jordan–Wigner string, restricted to the Gauss-law sector. Its
//! spectrum must coincide with the rishon formulation in its physical sector.

use gaugetn_core::models::{build_compact_qed, truncated_link_ops, Axis, ChargeConfig, Direction, LatticeSpec, QedOptions};
use gaugetn_core::oracle::{assemble_sector, DEFAULT_CAP};
use gaugetn_core::{Mat, C64};

use std::collections::HashMap;

#[derive(Clone, PartialEq, Eq, Hash)]
struct Config {
    occ: Vec<u8>,
    /// Electric field per link, in `−1..=1`.
    field: Vec<i32>,
}

fn jw_sign(occ: &[u8], j: usize) -> f64 {
    if occ[..j].iter().map(|&n| n as u32).sum::<u32>() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn link_spectrum(lat: &LatticeSpec, m: f64, g: f64) -> Vec<f64> {
    let n = lat.n_sites();
    let links: Vec<(usize, Axis, usize)> = lat.bonds().iter().map(|b| (b.site, b.axis, b.neighbor)).collect();
    let slot = |x: usize, ax: Axis| links.iter().position(|&(s, a, _)| s == x && a == ax).expect("link");
    let mut basis = Vec::new();
    let total = (1usize << n) * 3usize.pow(links.len() as u32);
    for code in 0..total {
        let occ: Vec<u8> = (0..n).map(|j| ((code >> j) & 1) as u8).collect();
        let mut r = code >> n;
        let field: Vec<i32> = (0..links.len())
            .map(|_| {
                let v = (r % 3) as i32 - 1;
                r /= 3;
                v
            })
            .collect();
        let gauss = (0..n).all(|x| {
            let rho = occ[x] as i32 - (1 - lat.stagger(x)) / 2;
            let div: i32 = links
                .iter()
                .zip(&field)
                .map(|(&(s, _, t), &e)| if s == x { e } else if t == x { -e } else { 0 })
                .sum();
            div == rho
        });
        if gauss {
            basis.push(Config { occ, field });
        }
    }
    let index: HashMap<Config, usize> = basis.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
    let dim = basis.len();
    let mut h = Mat::zeros(dim, dim);
    let add = |h: &mut Mat, to: &Config, from: usize, amp: f64| {
        let i = *index.get(to).expect("Gauss law preserved");
        h[(i, from)] += C64::new(amp, 0.0);
        h[(from, i)] += C64::new(amp, 0.0);
    };
    for (j, cfg) in basis.iter().enumerate() {
        for (k, &(x, _, y)) in links.iter().enumerate() {
            // ψ†_x U ψ_y
            if cfg.occ[y] == 1 && cfg.occ[x] == 0 && cfg.field[k] < 1 {
                let mut t = cfg.clone();
                let s1 = jw_sign(&t.occ, y);
                t.occ[y] = 0;
                let s2 = jw_sign(&t.occ, x);
                t.occ[x] = 1;
                t.field[k] += 1;
                add(&mut h, &t, j, -s1 * s2);
            }
        }
        if lat.spatial_dims() >= 2 {
            for p in lat.plaquettes() {
                let a = p.site;
                let b = lat.neighbor(a, Direction::plus(p.mu)).unwrap();
                let d = lat.neighbor(a, Direction::plus(p.nu)).unwrap();
                // U_{a,μ} U_{b,ν} U†_{d,μ} U†_{a,ν}
                let (k1, k2, k3, k4) = (slot(a, p.mu), slot(b, p.nu), slot(d, p.mu), slot(a, p.nu));
                let mut t = cfg.clone();
                let mut ok = true;
                for (k, step) in [(k4, -1), (k3, -1), (k2, 1), (k1, 1)] {
                    t.field[k] += step;
                    ok &= t.field[k].abs() <= 1;
                }
                if ok {
                    add(&mut h, &t, j, -4.0 / (g * g));
                }
            }
        }
        let mut diag = 0.0;
        for x in 0..n {
            diag += m * lat.stagger(x) as f64 * cfg.occ[x] as f64;
        }
        for &e in &cfg.field {
            diag += g * g / 2.0 * (e * e) as f64;
        }
        h[(j, j)] += C64::new(diag, 0.0);
    }
    let mut ev: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

fn rishon_spectrum(lat: &LatticeSpec, m: f64, g: f64) -> Vec<f64> {
    let link = truncated_link_ops(1).unwrap();
    let model = build_compact_qed(lat, m, g, &link, &ChargeConfig::neutral(), &QedOptions::default()).unwrap();
    let (_, mat) = assemble_sector(&model.terms, DEFAULT_CAP).unwrap();
    let mut ev: Vec<f64> = mat.to_dense().symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

fn compare(lat: LatticeSpec, m: f64, g: f64) {
    let a = link_spectrum(&lat, m, g);
    let b = rishon_spectrum(&lat, m, g);
    assert_eq!(a.len(), b.len(), "sector sizes differ");
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-10, "{a:?}\n{b:?}");
    }
}

#[test]
fn chain_spectra_agree() {
    compare(LatticeSpec::chain(4).unwrap(), 0.7, 1.3);
    compare(LatticeSpec::chain(5).unwrap(), -0.4, 0.9);
}

#[test]
fn plaquette_spectra_agree() {
    compare(LatticeSpec::new([2, 2, 1]).unwrap(), 0.3, 1.1);
}
