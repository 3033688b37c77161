//! Run configuration: one TOML file plus dotted-path overrides.
//!
//! ```toml
//! schema_version = 1
//! output_dir = "out"
//!
//! [network]
//! kind = "paper"          # "paper" | "circuit" | "matrix"
//! phi = 1.5707963267948966
//! # path = "circuit.toml" # for "circuit" and "matrix"
//!
//! [sources]
//! detunings_mhz = [72.4, 33.0, 52.4]
//! t0_ns = [0.0, 0.0, 0.0]
//! [sources.envelope]
//! shape = "double_exponential"
//! rise_ns = 5.0
//! fall_ns = 100.0
//!
//! [noise]
//! efficiency = 1.0        # one value or one per source
//! contamination = 0.0
//! jitter_ns = 0.5
//!
//! [sampler]
//! n_events = 100000
//! seed = 1
//! statistics = "quantum"  # or "distinguishable"
//! post_select = true
//!
//! [grid]
//! x_min = -100.0
//! x_max = 100.0
//! y_min = -100.0
//! y_max = 100.0
//! step = 1.0
//!
//! [analysis]
//! r0_ns = 3.0
//! # min_fidelity = 0.98
//!
//! [protocol]
//! p_e = 0.04
//! m = 7
//! n = 3
//! batches = 1000000
//! seed = 7
//! ```
//!
//! The config hash is the SHA-256 of the fully resolved configuration
//! (defaults filled in, `output_dir` excluded) in canonical TOML form.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::matrix::ComplexMatrix;
use crate::network::{paper_network, NetworkFamily};
use crate::protocol::ProtocolConfig;
use crate::sampler::{NoiseModel, SamplerOptions, Statistics, DEFAULT_JITTER_NS};
use crate::wavepacket::{
    load_tabulated, Envelope, SourceSet, Wavepacket, DEFAULT_FALL_NS, DEFAULT_RISE_NS, PAPER_DETUNINGS_MHZ,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub network: NetworkConfig,
    #[serde(default)]
    pub sources: SourcesConfig,
    #[serde(default)]
    pub noise: NoiseConfig,
    #[serde(default)]
    pub sampler: SamplerConfig,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub protocol: ProtocolRunConfig,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            output_dir: default_output_dir(),
            network: NetworkConfig::default(),
            sources: SourcesConfig::default(),
            noise: NoiseConfig::default(),
            sampler: SamplerConfig::default(),
            grid: GridSpec::default(),
            analysis: AnalysisConfig::default(),
            protocol: ProtocolRunConfig::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NetworkKind {
    #[default]
    Paper,
    Circuit,
    Matrix,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkConfig {
    #[serde(default)]
    pub kind: NetworkKind,
    #[serde(default)]
    pub phi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum EnvelopeConfig {
    DoubleExponential { rise_ns: f64, fall_ns: f64 },
    OneSidedExponential { decay_ns: f64 },
    Gaussian { sigma_ns: f64 },
    Tabulated { path: PathBuf },
}

impl Default for EnvelopeConfig {
    fn default() -> Self {
        Self::DoubleExponential { rise_ns: DEFAULT_RISE_NS, fall_ns: DEFAULT_FALL_NS }
    }
}

impl EnvelopeConfig {
    pub fn build(&self) -> Result<Envelope> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(v)
            } else {
                Err(Error::Config(format!("{name} must be positive, got {v}")))
            }
        };
        Ok(match self {
            Self::DoubleExponential { rise_ns, fall_ns } => {
                Envelope::double_exponential_ns(positive("rise_ns", *rise_ns)?, positive("fall_ns", *fall_ns)?)
            }
            Self::OneSidedExponential { decay_ns } => {
                Envelope::OneSidedExponential { gamma: 1.0 / positive("decay_ns", *decay_ns)? }
            }
            Self::Gaussian { sigma_ns } => Envelope::Gaussian { sigma: positive("sigma_ns", *sigma_ns)? },
            Self::Tabulated { path } => load_tabulated(path)?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SourcesConfig {
    pub detunings_mhz: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t0_ns: Option<Vec<f64>>,
    #[serde(default)]
    pub envelope: EnvelopeConfig,
    /// Per-source envelope overrides; missing entries use `envelope`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub envelopes: Vec<EnvelopeConfig>,
}

impl Default for SourcesConfig {
    fn default() -> Self {
        Self {
            detunings_mhz: PAPER_DETUNINGS_MHZ.to_vec(),
            t0_ns: None,
            envelope: EnvelopeConfig::default(),
            envelopes: Vec::new(),
        }
    }
}

/// A single value for every source, or one value per source.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerSource {
    All(f64),
    Each(Vec<f64>),
}

impl PerSource {
    fn expand(&self, n: usize, name: &str) -> Result<Vec<f64>> {
        match self {
            PerSource::All(v) => Ok(vec![*v; n]),
            PerSource::Each(v) if v.len() == n => Ok(v.clone()),
            PerSource::Each(v) => Err(Error::Config(format!("{name} lists {} values for {n} sources", v.len()))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    pub efficiency: PerSource,
    pub contamination: PerSource,
    pub jitter_ns: f64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self { efficiency: PerSource::All(1.0), contamination: PerSource::All(0.0), jitter_ns: DEFAULT_JITTER_NS }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatisticsConfig {
    #[default]
    Quantum,
    Distinguishable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerConfig {
    pub n_events: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub statistics: StatisticsConfig,
    #[serde(default = "yes")]
    pub post_select: bool,
}

fn yes() -> bool {
    true
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self { n_events: 100_000, seed: Some(1), statistics: StatisticsConfig::Quantum, post_select: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    pub r0_ns: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_fidelity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_rotation_120: Option<f64>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self { r0_ns: crate::analysis::DEFAULT_R0_NS, min_fidelity: None, min_rotation_120: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProtocolRunConfig {
    #[serde(flatten)]
    pub protocol: ProtocolConfig,
    pub batches: u64,
    pub seed: u64,
}

impl Default for ProtocolRunConfig {
    fn default() -> Self {
        Self { protocol: ProtocolConfig::default(), batches: 1_000_000, seed: 7 }
    }
}

impl RunConfig {
    /// Parses `text` and applies `key.path=value` overrides in order.
    pub fn from_toml_with_overrides(text: &str, overrides: &[String]) -> Result<Self> {
        let mut table: toml::Table = text.parse().map_err(|e| Error::Config(format!("{e}")))?;
        if !table.contains_key("schema_version") {
            return Err(Error::Config("missing schema_version".into()));
        }
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let cfg: RunConfig = table.try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Defaults with overrides only.
    pub fn with_overrides(overrides: &[String]) -> Result<Self> {
        Self::from_toml_with_overrides(&Self::default().to_toml(), overrides)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml_with_overrides(&text, overrides)?;
        cfg.resolve_paths(path.parent().unwrap_or(Path::new(".")));
        Ok(cfg)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(p) = self.network.path.as_mut() {
            fix(p);
        }
        if let EnvelopeConfig::Tabulated { path } = &mut self.sources.envelope {
            fix(path);
        }
        for e in &mut self.sources.envelopes {
            if let EnvelopeConfig::Tabulated { path } = e {
                fix(path);
            }
        }
        fix(&mut self.output_dir);
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if !self.network.phi.is_finite() {
            return Err(Error::Config("network.phi must be finite".into()));
        }
        if self.network.kind != NetworkKind::Paper && self.network.path.is_none() {
            return Err(Error::Config("network.path is required for circuit and matrix networks".into()));
        }
        if self.sources.detunings_mhz.is_empty() {
            return Err(Error::Config("at least one source is required".into()));
        }
        self.grid.validate()?;
        self.protocol.protocol.validate()?;
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 (hex) of the resolved configuration without `output_dir`.
    pub fn config_hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output_dir = PathBuf::new();
        let digest = Sha256::digest(canonical.to_toml().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn network_unitary(&self) -> Result<ComplexMatrix> {
        match self.network.kind {
            NetworkKind::Paper => paper_network(self.network.phi),
            NetworkKind::Circuit => {
                let path = self.network.path.as_ref().expect("validated");
                let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                Ok(NetworkFamily::from_toml_str(&text)?.unitary(self.network.phi))
            }
            NetworkKind::Matrix => ComplexMatrix::read_text(self.network.path.as_ref().expect("validated")),
        }
    }

    pub fn source_set(&self) -> Result<SourceSet> {
        let s = &self.sources;
        let n = s.detunings_mhz.len();
        let t0 = s.t0_ns.clone().unwrap_or_else(|| vec![0.0; n]);
        if t0.len() != n || s.envelopes.len() > n {
            return Err(Error::Config("sources: t0_ns and envelopes must not exceed the detuning count".into()));
        }
        let common = s.envelope.build()?;
        let wps = (0..n)
            .map(|j| {
                let env = match s.envelopes.get(j) {
                    Some(e) => e.build()?,
                    None => common.clone(),
                };
                Wavepacket::new(env, t0[j], s.detunings_mhz[j])
            })
            .collect::<Result<_>>()?;
        let noise = self.noise_model(n)?;
        SourceSet::new(wps, noise.efficiency, noise.contamination)
    }

    pub fn noise_model(&self, n_sources: usize) -> Result<NoiseModel> {
        let m = NoiseModel {
            efficiency: self.noise.efficiency.expand(n_sources, "noise.efficiency")?,
            contamination: self.noise.contamination.expand(n_sources, "noise.contamination")?,
            jitter_ns: self.noise.jitter_ns,
        };
        m.validate(n_sources)?;
        Ok(m)
    }

    pub fn statistics(&self) -> Statistics {
        match self.sampler.statistics {
            StatisticsConfig::Quantum => Statistics::Quantum,
            StatisticsConfig::Distinguishable => Statistics::Distinguishable,
        }
    }

    pub fn sampler_options(&self) -> SamplerOptions {
        SamplerOptions { post_select: self.sampler.post_select, ..Default::default() }
    }
}

/// Sets `a.b.c = value`, creating tables as needed. The value is parsed as
/// a TOML value and falls back to a plain string.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override {assignment:?} is not key=value")))?;
    let parts: Vec<&str> = key.trim().split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::Config(format!("bad override key {key:?}")));
    }
    let value = parse_value(raw.trim());
    let mut cur = table;
    for p in &parts[..parts.len() - 1] {
        let entry = cur.entry(p.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("override {key:?}: {p} is not a table")))?;
    }
    cur.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

fn parse_value(raw: &str) -> toml::Value {
    let doc = format!("v = {raw}");
    match doc.parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("key present"),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let cfg = RunConfig::default();
        let back = RunConfig::from_toml_with_overrides(&cfg.to_toml(), &[]).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.config_hash(), cfg.config_hash());
        assert_eq!(cfg.config_hash().len(), 64);
    }

    #[test]
    fn overrides_apply_and_change_the_hash() {
        let base = RunConfig::default();
        let cfg = RunConfig::with_overrides(&[
            "network.phi=1.25".into(),
            "sampler.seed=99".into(),
            "noise.efficiency=[0.5, 0.4, 0.3]".into(),
            "sources.envelope.fall_ns=40".into(),
        ])
        .unwrap();
        assert_eq!(cfg.network.phi, 1.25);
        assert_eq!(cfg.sampler.seed, Some(99));
        assert_eq!(cfg.noise_model(3).unwrap().efficiency, vec![0.5, 0.4, 0.3]);
        assert_eq!(cfg.sources.envelope, EnvelopeConfig::DoubleExponential { rise_ns: 5.0, fall_ns: 40.0 });
        assert_ne!(cfg.config_hash(), base.config_hash());
        let moved = RunConfig { output_dir: "elsewhere".into(), ..base.clone() };
        assert_eq!(moved.config_hash(), base.config_hash());
    }

    #[test]
    fn minimal_file_gets_defaults() {
        let cfg = RunConfig::from_toml_with_overrides("schema_version = 1\n", &[]).unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.source_set().unwrap().detunings(), PAPER_DETUNINGS_MHZ.to_vec());
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(RunConfig::from_toml_with_overrides("", &[]).is_err());
        assert!(RunConfig::from_toml_with_overrides("schema_version = 2\n", &[]).is_err());
        assert!(RunConfig::from_toml_with_overrides("schema_version = 1\nbogus = 3\n", &[]).is_err());
        assert!(RunConfig::with_overrides(&["network.kind=\"matrix\"".into()]).is_err());
        assert!(RunConfig::with_overrides(&["network.phi".into()]).is_err());
        assert!(RunConfig::with_overrides(&["protocol.bogus=1".into()]).is_err());
        assert_eq!(RunConfig::with_overrides(&["protocol.m=3".into()]).unwrap().protocol.protocol.m, 3);
        let cfg = RunConfig::with_overrides(&["noise.contamination=[0.1]".into()]).unwrap();
        assert!(cfg.noise_model(3).is_err());
    }

    #[test]
    fn partial_sections_keep_defaults() {
        let text = "schema_version = 1\n[noise]\njitter_ns = 0.0\n[grid]\nstep = 0.5\n[protocol]\np_e = 0.02\n";
        let cfg = RunConfig::from_toml_with_overrides(text, &[]).unwrap();
        assert_eq!(cfg.noise.jitter_ns, 0.0);
        assert_eq!(cfg.noise.efficiency, PerSource::All(1.0));
        assert_eq!(cfg.grid.step, 0.5);
        assert_eq!(cfg.grid.x_max, 100.0);
        assert_eq!(cfg.protocol.protocol.m, 7);
        assert_eq!(cfg.protocol.protocol.p_e, 0.02);
    }

    #[test]
    fn unquoted_strings_fall_back() {
        let cfg = RunConfig::with_overrides(&["sampler.statistics=distinguishable".into()]).unwrap();
        assert_eq!(cfg.statistics(), Statistics::Distinguishable);
    }
}
