//! Result records and their JSON / CSV files.

use std::io::Write;
use std::path::{Path, PathBuf};

use gaugetn_core::models::Observables;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Format};
use crate::fit::{CoulombFit, LinearFit, Plateau};

pub const SCHEMA_VERSION: &str = "gaugetn.result/1";

/// CSV header, in column order.
pub const CSV_COLUMNS: [&str; 7] = [
    "r",
    "energy",
    "potential",
    "linear_fit",
    "linear_residual",
    "coulomb_fit",
    "coulomb_residual",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Ok,
    /// Some scan points failed; the rest of the record is valid.
    Partial,
    SolverFailed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointStatus {
    Ok,
    InvalidPlacement,
    SolverFailed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkRecord {
    pub site: usize,
    pub axis: String,
    pub l: f64,
    pub l2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaquetteRecord {
    pub site: usize,
    pub mu: String,
    pub nu: String,
    pub value: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ObservablesRecord {
    pub occupations: Vec<f64>,
    pub charges: Vec<f64>,
    pub links: Vec<LinkRecord>,
    pub plaquettes: Vec<PlaquetteRecord>,
}

impl From<&Observables> for ObservablesRecord {
    fn from(o: &Observables) -> Self {
        Self {
            occupations: o.occupations.clone(),
            charges: o.charges.clone(),
            links: o
                .links
                .iter()
                .map(|l| LinkRecord {
                    site: l.site,
                    axis: l.axis.name().into(),
                    l: l.l,
                    l2: l.l2,
                })
                .collect(),
            plaquettes: o
                .plaquettes
                .iter()
                .map(|p| PlaquetteRecord {
                    site: p.site,
                    mu: p.mu.name().into(),
                    nu: p.nu.name().into(),
                    value: p.value,
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundRecord {
    pub energy: f64,
    /// Energy after every sweep (MPS: half sweep); a single entry for `exact`.
    pub trace: Vec<f64>,
    pub converged: bool,
    pub degenerate: bool,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sector_dim: Option<usize>,
    pub observables: ObservablesRecord,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub r: usize,
    pub plus: Option<usize>,
    pub minus: Option<usize>,
    pub energy: Option<f64>,
    /// `E(r) − E0`.
    pub potential: Option<f64>,
    pub converged: Option<bool>,
    pub status: PointStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fits {
    pub linear: Option<LinearFit>,
    pub coulomb: Option<CoulombFit>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    /// Vacuum energy `E0`; the potential of the charge-free state is zero.
    pub reference_energy: f64,
    pub points: Vec<ScanPoint>,
    pub fits: Fits,
    pub plateau: Option<Plateau>,
    /// `(E₊ − E0) + (E₋ − E0)` for isolated opposite charges.
    pub independent_pair: Option<f64>,
}

impl ScanRecord {
    pub fn ok_points(&self) -> impl Iterator<Item = &ScanPoint> {
        self.points.iter().filter(|p| p.status == PointStatus::Ok)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub schema: String,
    pub config: ExperimentConfig,
    pub status: RunStatus,
    pub ground: Option<GroundRecord>,
    pub scan: Option<ScanRecord>,
    pub errors: Vec<String>,
}

impl ResultRecord {
    pub fn new(config: ExperimentConfig) -> Self {
        Self {
            schema: SCHEMA_VERSION.into(),
            config,
            status: RunStatus::Ok,
            ground: None,
            scan: None,
            errors: Vec::new(),
        }
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// One row per successful scan point; empty without a scan.
    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(CSV_COLUMNS)?;
        if let Some(scan) = &self.scan {
            for p in scan.ok_points() {
                let (e, v) = (p.energy.unwrap_or(f64::NAN), p.potential.unwrap_or(f64::NAN));
                let r = p.r as f64;
                let lin = scan.fits.linear.as_ref().map(|f| f.intercept + f.slope * r);
                let cou = scan.fits.coulomb.as_ref().map(|f| f.intercept + f.coefficient / r);
                let cell = |x: Option<f64>| x.map(|x| x.to_string()).unwrap_or_default();
                out.write_record([
                    p.r.to_string(),
                    e.to_string(),
                    v.to_string(),
                    cell(lin),
                    cell(lin.map(|f| v - f)),
                    cell(cou),
                    cell(cou.map(|f| v - f)),
                ])?;
            }
        }
        out.flush()?;
        Ok(())
    }
}

/// Writes the configured formats into `dir`; returns the written paths.
pub fn emit_results(record: &ResultRecord, dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    use anyhow::Context;
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let stem = &record.config.output.stem;
    let mut written = Vec::new();
    for f in &record.config.output.formats {
        let path = match f {
            Format::Json => dir.join(format!("{stem}.json")),
            Format::Csv => dir.join(format!("{stem}.csv")),
        };
        let file = std::fs::File::create(&path).with_context(|| format!("writing {}", path.display()))?;
        let mut w = std::io::BufWriter::new(file);
        match f {
            Format::Json => w.write_all(record.to_json()?.as_bytes())?,
            Format::Csv => record.write_csv(&mut w)?,
        }
        w.flush()?;
        written.push(path);
    }
    Ok(written)
}
