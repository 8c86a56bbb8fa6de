//! Operator tables and sector dumps for cross-validation with other codes.

use gaugetn_core::models::{LatticeModel, ModelKind};
use gaugetn_core::oracle::{assemble_sector, exact_ground};
use gaugetn_core::Mat;
use serde::{Deserialize, Serialize};

pub const TABLES_SCHEMA: &str = "gaugetn.tables/1";
pub const SECTOR_SCHEMA: &str = "gaugetn.sector/1";

/// Dense matrix as separate real and imaginary row-major arrays.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixDump {
    pub name: String,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixDump {
    pub fn new(name: &str, m: &Mat) -> Self {
        let rows = |f: fn(&gaugetn_core::C64) -> f64| {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect())
                .collect()
        };
        Self {
            name: name.into(),
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisState {
    pub matter: u8,
    /// Rishon occupations in the order of `directions`.
    pub rishons: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SiteTable {
    pub site: usize,
    pub coords: [usize; 3],
    pub dim: usize,
    /// Fermionic mode order after the matter mode.
    pub directions: Vec<String>,
    pub states: Vec<BasisState>,
    pub charges: Vec<i32>,
    pub operators: Vec<MatrixDump>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TablesDump {
    pub schema: String,
    pub sites: Vec<SiteTable>,
}

pub fn dump_tables(model: &LatticeModel) -> TablesDump {
    let lat = &model.lattice;
    let sites = (0..lat.n_sites())
        .map(|s| match &model.kind {
            ModelKind::CompactQed { bases, .. } => {
                let b = &bases[s];
                SiteTable {
                    site: s,
                    coords: b.coords,
                    dim: b.dim(),
                    directions: b.directions.iter().map(|d| d.name()).collect(),
                    states: b
                        .states
                        .iter()
                        .map(|st| BasisState {
                            matter: st.matter,
                            rishons: st.rishons.clone(),
                        })
                        .collect(),
                    charges: b.charges.clone(),
                    operators: b.table.iter().map(|(n, m)| MatrixDump::new(n, m)).collect(),
                }
            }
            ModelKind::Susskind => {
                let space = &model.terms.spaces[s];
                let shift = (1 - lat.stagger(s)) / 2;
                SiteTable {
                    site: s,
                    coords: lat.coords(s),
                    dim: space.dim,
                    directions: Vec::new(),
                    states: (0..2u8)
                        .map(|n| BasisState {
                            matter: n,
                            rishons: Vec::new(),
                        })
                        .collect(),
                    charges: (0..2).map(|n| n - shift).collect(),
                    operators: space.ops.iter().map(|o| MatrixDump::new(&o.name, &o.matrix)).collect(),
                }
            }
        })
        .collect();
    TablesDump {
        schema: TABLES_SCHEMA.into(),
        sites,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorDump {
    pub schema: String,
    pub local_dims: Vec<usize>,
    pub dim: usize,
    /// Local state index per site for every basis vector.
    pub configs: Vec<Vec<usize>>,
    /// Nonzero Hamiltonian entries `[row, col, re, im]`.
    pub entries: Vec<(usize, usize, f64, f64)>,
    pub ground_energy: f64,
}

pub fn dump_sector(model: &LatticeModel, cap: usize) -> gaugetn_core::Result<SectorDump> {
    let (sector, h) = assemble_sector(&model.terms, cap)?;
    let ground = exact_ground(&h)?;
    Ok(SectorDump {
        schema: SECTOR_SCHEMA.into(),
        local_dims: sector.local_dims().to_vec(),
        dim: sector.len(),
        configs: (0..sector.len()).map(|i| sector.config(i)).collect(),
        entries: h.triplets().map(|(r, c, z)| (r, c, z.re, z.im)).collect(),
        ground_energy: ground.energy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use gaugetn_core::models::{build_compact_qed, truncated_link_ops, ChargeConfig, LatticeSpec, QedOptions};

    #[test]
    fn qed_chain_tables() {
        let lat = LatticeSpec::chain(4).unwrap();
        let link = truncated_link_ops(1).unwrap();
        let model =
            build_compact_qed(&lat, 0.5, 1.0, &link, &ChargeConfig::neutral(), &QedOptions::default()).unwrap();
        let t = dump_tables(&model);
        assert_eq!(t.sites.len(), 4);
        for s in &t.sites {
            assert_eq!(s.states.len(), s.dim);
            for op in &s.operators {
                assert_eq!(op.re.len(), s.dim);
            }
        }
        let d = dump_sector(&model, 1000).unwrap();
        assert_eq!(d.dim, 6);
        assert!((d.ground_energy + 2.252120699610).abs() < 1e-9);
    }
}
