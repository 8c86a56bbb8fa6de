//! Experiment configuration: file formats, defaults and validation.

use std::path::{Path, PathBuf};

use gaugetn_core::mps::SweepConfig;
use gaugetn_core::oracle::DEFAULT_CAP;
use serde::{Deserialize, Serialize};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "GAUGETN_OUTPUT_DIR";

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot parse {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelName {
    Susskind,
    CompactQed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ansatz {
    Mps,
    Ttn,
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSettings {
    /// 1..=10000.
    pub max_sweeps: usize,
    pub min_sweeps: usize,
    /// Relative energy change that ends the sweep, in [0, 1).
    pub rel_tol: f64,
    /// Lanczos residual target, in (0, 1).
    pub lanczos_tol: f64,
    pub lanczos_max_iter: usize,
}

impl Default for SweepSettings {
    fn default() -> Self {
        let d = SweepConfig::default();
        Self {
            max_sweeps: d.max_sweeps,
            min_sweeps: d.min_sweeps,
            rel_tol: d.rel_tol,
            lanczos_tol: d.lanczos_tol,
            lanczos_max_iter: d.lanczos_max_iter,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanSettings {
    /// Charge separations along x, in lattice units.
    pub separations: Vec<usize>,
    /// Pin strength; the model default when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pin_strength: Option<f64>,
    /// A per-unit increment of `V` below `plateau_fraction · g²/2` counts as flat.
    pub plateau_fraction: f64,
    /// Also compute the energy of two isolated opposite charges.
    pub independent_pair: bool,
}

impl Default for ScanSettings {
    fn default() -> Self {
        Self {
            separations: Vec::new(),
            pin_strength: None,
            plateau_fraction: 0.05,
            independent_pair: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSettings {
    /// Falls back to `$GAUGETN_OUTPUT_DIR`, then the working directory.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    pub stem: String,
    pub formats: Vec<Format>,
}

impl Default for OutputSettings {
    fn default() -> Self {
        Self {
            dir: None,
            stem: "result".into(),
            formats: vec![Format::Json],
        }
    }
}

fn default_g() -> f64 {
    1.0
}
fn default_n_max() -> u32 {
    1
}
fn default_chi() -> usize {
    32
}
fn default_workers() -> usize {
    1
}
fn default_cap() -> usize {
    DEFAULT_CAP
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelName,
    /// Lattice extents, one to three entries.
    pub lattice: Vec<usize>,
    #[serde(default)]
    pub m: f64,
    #[serde(default = "default_g")]
    pub g: f64,
    /// Link truncation; only 1 is supported.
    #[serde(default = "default_n_max")]
    pub n_max: u32,
    pub ansatz: Ansatz,
    /// Bond dimension, 1..=4096.
    #[serde(default = "default_chi")]
    pub chi: usize,
    #[serde(default)]
    pub sweeps: SweepSettings,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanSettings>,
    #[serde(default)]
    pub output: OutputSettings,
    /// Parallel scan jobs, 1..=256.
    #[serde(default = "default_workers")]
    pub workers: usize,
    /// Link-Law penalty; the model default when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub link_penalty: Option<f64>,
    /// Largest sector the exact ansatz will build.
    #[serde(default = "default_cap")]
    pub oracle_cap: usize,
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

impl ExperimentConfig {
    /// Reads TOML, or JSON when the extension is `.json`, and validates.
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let parsed = if is_json {
            Self::from_json(&text)
        } else {
            Self::from_toml(&text)
        };
        parsed.map_err(|e| match e {
            ConfigError::Parse { message, .. } => ConfigError::Parse {
                path: path.to_path_buf(),
                message,
            },
            other => other,
        })
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: PathBuf::from("<toml>"),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
            path: PathBuf::from("<json>"),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn n_sites(&self) -> usize {
        self.lattice.iter().product()
    }

    /// Extents padded to three entries.
    pub fn dims3(&self) -> [usize; 3] {
        let mut d = [1; 3];
        d[..self.lattice.len()].copy_from_slice(&self.lattice);
        d
    }

    pub fn sweep_config(&self) -> SweepConfig {
        SweepConfig {
            max_sweeps: self.sweeps.max_sweeps,
            min_sweeps: self.sweeps.min_sweeps,
            rel_tol: self.sweeps.rel_tol,
            lanczos_tol: self.sweeps.lanczos_tol,
            lanczos_max_iter: self.sweeps.lanczos_max_iter,
            seed: self.seed,
        }
    }

    /// Output directory: config, then environment, then `.`.
    pub fn output_dir(&self) -> PathBuf {
        self.output
            .dir
            .clone()
            .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.lattice.is_empty() || self.lattice.len() > 3 {
            return Err(invalid(format!("lattice needs 1 to 3 extents, got {}", self.lattice.len())));
        }
        if self.lattice.iter().any(|&l| l == 0) {
            return Err(invalid("lattice extents must be positive"));
        }
        let n = self.n_sites();
        if !(2..=4096).contains(&n) {
            return Err(invalid(format!("lattice has {n} sites, need 2..=4096")));
        }
        if !self.m.is_finite() || self.m.abs() > 1e6 {
            return Err(invalid(format!("m = {} outside [-1e6, 1e6]", self.m)));
        }
        if !self.g.is_finite() || self.g <= 0.0 || self.g > 1e3 {
            return Err(invalid(format!("g = {} outside (0, 1e3]", self.g)));
        }
        if self.n_max != 1 {
            return Err(invalid(format!("n_max = {} unsupported, only 1 is implemented", self.n_max)));
        }
        if !(1..=4096).contains(&self.chi) {
            return Err(invalid(format!("chi = {} outside 1..=4096", self.chi)));
        }
        let s = &self.sweeps;
        if !(1..=10_000).contains(&s.max_sweeps) {
            return Err(invalid("sweeps.max_sweeps outside 1..=10000"));
        }
        if s.min_sweeps > s.max_sweeps {
            return Err(invalid("sweeps.min_sweeps exceeds max_sweeps"));
        }
        if !(0.0..1.0).contains(&s.rel_tol) {
            return Err(invalid("sweeps.rel_tol outside [0, 1)"));
        }
        if !(s.lanczos_tol > 0.0 && s.lanczos_tol < 1.0) {
            return Err(invalid("sweeps.lanczos_tol outside (0, 1)"));
        }
        if s.lanczos_max_iter == 0 {
            return Err(invalid("sweeps.lanczos_max_iter must be positive"));
        }
        if !(1..=256).contains(&self.workers) {
            return Err(invalid(format!("workers = {} outside 1..=256", self.workers)));
        }
        if self.oracle_cap == 0 {
            return Err(invalid("oracle_cap must be positive"));
        }
        if let Some(p) = self.link_penalty {
            if !(p.is_finite() && p > 0.0) {
                return Err(invalid("link_penalty must be positive"));
            }
        }
        if self.output.stem.is_empty() || self.output.stem.contains(['/', '\\']) {
            return Err(invalid("output.stem must be a plain file name"));
        }
        if self.output.formats.is_empty() {
            return Err(invalid("output.formats is empty"));
        }
        if let Some(scan) = &self.scan {
            if self.model != ModelName::CompactQed {
                return Err(invalid("charge scans need model = compact_qed"));
            }
            if let Some(&r) = scan.separations.iter().find(|&&r| r == 0 || r >= self.lattice[0]) {
                return Err(invalid(format!("separation {r} outside 1..{}", self.lattice[0])));
            }
            let mut sorted = scan.separations.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != scan.separations.len() {
                return Err(invalid("repeated separation"));
            }
            if let Some(p) = scan.pin_strength {
                if !(p.is_finite() && p > 0.0) {
                    return Err(invalid("scan.pin_strength must be positive"));
                }
            }
            if !(scan.plateau_fraction > 0.0 && scan.plateau_fraction < 1.0) {
                return Err(invalid("scan.plateau_fraction outside (0, 1)"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        model = "compact_qed"
        lattice = [6]
        m = 0.5
        ansatz = "exact"
        seed = 3
    "#;

    #[test]
    fn minimal_toml_takes_defaults() {
        let c = ExperimentConfig::from_toml(MINIMAL).unwrap();
        assert_eq!(c.g, 1.0);
        assert_eq!(c.chi, 32);
        assert_eq!(c.sweeps, SweepSettings::default());
        assert_eq!(c.output.formats, vec![Format::Json]);
        assert_eq!(c.dims3(), [6, 1, 1]);
    }

    #[test]
    fn seed_is_mandatory() {
        let text = MINIMAL.replace("seed = 3", "");
        assert!(matches!(ExperimentConfig::from_toml(&text), Err(ConfigError::Parse { .. })));
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = format!("{MINIMAL}\nchii = 4\n");
        assert!(ExperimentConfig::from_toml(&text).is_err());
    }

    #[test]
    fn ranges_enforced() {
        for bad in ["g = 0.0", "n_max = 2", "chi = 0", "workers = 0"] {
            let text = format!("{MINIMAL}\n{bad}\n");
            assert!(
                matches!(ExperimentConfig::from_toml(&text), Err(ConfigError::Invalid(_))),
                "{bad}"
            );
        }
        let text = format!("{MINIMAL}\n[scan]\nseparations = [6]\n");
        assert!(matches!(ExperimentConfig::from_toml(&text), Err(ConfigError::Invalid(_))));
    }

    #[test]
    fn json_echo_round_trips() {
        let mut c = ExperimentConfig::from_toml(MINIMAL).unwrap();
        c.scan = Some(ScanSettings {
            separations: vec![1, 3],
            ..Default::default()
        });
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), c);
    }
}
