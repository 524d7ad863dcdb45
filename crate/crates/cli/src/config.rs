//! Experiment configuration, read from TOML.
//!
//! ```toml
//! [experiment]
//! folds = 10          # default 10
//! seed = 7            # default 0
//! c = 0.1             # 0/1 threshold, default 0.1
//! output_dir = "results"
//! export_paths = false
//!
//! [[datasets]]
//! name = "Synth"
//! synth = { n = 1000, noise = 0.03, seed = 1 }
//!
//! [[datasets]]
//! name = "ENB"
//! path = "data/enb.arff"   # .arff, or .csv with the targets as the last columns
//! n_targets = 2
//!
//! [[methods]]
//! key = "PF.R/B"
//! particles = 100
//! eta = 0.1
//! ```
//!
//! Relative paths are resolved against the directory holding the config file.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use regchain::learners::{
    Bandwidth, BinSampling, ClassifierParams, KrrGrid, KrrSelection, LearnerParams,
};
use regchain::{EssKind, Estimator, Method, MethodConfig, PfConfig};

/// A problem with the configuration itself, as opposed to a failure while running.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn default_folds() -> usize {
    10
}

fn default_c() -> f64 {
    0.1
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("results")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    #[serde(default = "default_folds")]
    pub folds: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_c")]
    pub c: f64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub export_paths: bool,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self {
            folds: default_folds(),
            seed: 0,
            c: default_c(),
            output_dir: default_output_dir(),
            export_paths: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSpec {
    pub n: usize,
    pub noise: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetEntry {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synth: Option<SynthSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_targets: Option<usize>,
    /// CSV files only; default true.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub header: Option<bool>,
}

/// One method column and its hyperparameters. Anything left out takes the
/// library default.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodEntry {
    pub key: String,
    pub particles: Option<usize>,
    pub eta: Option<f64>,
    /// `sum` or `max`.
    pub ess: Option<String>,
    pub mh_steps: Option<usize>,
    pub mh_sigma: Option<f64>,
    /// `map` or `mmse`.
    pub estimator: Option<String>,
    pub bins: Option<usize>,
    /// `jitter` or `center`.
    pub bin_sampling: Option<String>,
    pub trees: Option<usize>,
    pub prior_precision: Option<f64>,
    pub bandwidth: Option<f64>,
    pub krr_ridges: Option<Vec<f64>>,
    pub krr_widths: Option<Vec<f64>>,
    pub krr_inner_folds: Option<usize>,
    /// Skip the grid search and use these.
    pub krr_ridge: Option<f64>,
    pub krr_width: Option<f64>,
    pub order: Option<Vec<usize>>,
    pub sampler_uses_inputs: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub experiment: ExperimentSection,
    pub datasets: Vec<DatasetEntry>,
    pub methods: Vec<MethodEntry>,
}

/// Fully resolved method settings, as echoed into the manifest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedMethod {
    pub key: String,
    pub particles: usize,
    pub eta: f64,
    pub ess: String,
    pub mh_steps: usize,
    pub mh_sigma: Option<f64>,
    pub estimator: String,
    pub bins: usize,
    pub bin_sampling: String,
    pub trees: usize,
    pub prior_precision: f64,
    pub bandwidth: Option<f64>,
    pub krr_ridges: Vec<f64>,
    pub krr_widths: Vec<f64>,
    pub krr_inner_folds: usize,
    pub krr_ridge: Option<f64>,
    pub krr_width: Option<f64>,
    pub order: Option<Vec<usize>>,
    pub sampler_uses_inputs: bool,
    #[serde(skip)]
    pub method: Method,
    #[serde(skip)]
    pub config: MethodConfig<f64>,
}

fn bad(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

impl MethodEntry {
    pub fn resolve(&self) -> Result<ResolvedMethod, ConfigError> {
        let method: Method = self
            .key
            .parse()
            .map_err(|e| bad(format!("method `{}`: {e}", self.key)))?;
        let pf_default = PfConfig::<f64>::default();
        let ess: EssKind = match self.ess.as_deref() {
            None => EssKind::InverseSum,
            Some(s) => s.parse().map_err(|e| bad(format!("{}: {e}", self.key)))?,
        };
        let estimator: Estimator = match self.estimator.as_deref() {
            None => Estimator::Map,
            Some(s) => s.parse().map_err(|e| bad(format!("{}: {e}", self.key)))?,
        };
        let bin_sampling = match self.bin_sampling.as_deref() {
            None | Some("jitter") => BinSampling::Jitter,
            Some("center") | Some("centre") => BinSampling::Center,
            Some(other) => {
                return Err(bad(format!("{}: unknown bin_sampling `{other}`", self.key)))
            }
        };
        let pf = PfConfig {
            particles: self.particles.unwrap_or(pf_default.particles),
            eta: self.eta.unwrap_or(pf_default.eta),
            ess,
            mh_steps: self.mh_steps.unwrap_or(0),
            mh_sigma: self.mh_sigma,
        };
        if method.is_sampling() {
            pf.validate()
                .map_err(|e| bad(format!("{}: {e}", self.key)))?;
        }
        let grid_default = KrrGrid::<f64>::default();
        let grid = KrrGrid {
            ridges: self.krr_ridges.clone().unwrap_or(grid_default.ridges),
            widths: self.krr_widths.clone().unwrap_or(grid_default.widths),
            inner_folds: self.krr_inner_folds.unwrap_or(grid_default.inner_folds),
        };
        let krr = match (self.krr_ridge, self.krr_width) {
            (Some(ridge), Some(width)) => KrrSelection::Fixed { ridge, width },
            (None, None) => KrrSelection::Grid(grid.clone()),
            _ => {
                return Err(bad(format!(
                    "{}: set both krr_ridge and krr_width, or neither",
                    self.key
                )))
            }
        };
        let mut classifier = ClassifierParams::default();
        if let Some(t) = self.trees {
            if t == 0 {
                return Err(bad(format!("{}: trees must be positive", self.key)));
            }
            classifier.forest.n_trees = t;
        }
        let defaults = LearnerParams::<f64>::default();
        let learner = LearnerParams {
            prior_precision: self.prior_precision.unwrap_or(defaults.prior_precision),
            n_bins: self.bins.unwrap_or(defaults.n_bins),
            bin_sampling,
            classifier: classifier.clone(),
            bandwidth: self
                .bandwidth
                .map_or(Bandwidth::Silverman, Bandwidth::Fixed),
            krr,
        };
        if learner.n_bins == 0 {
            return Err(bad(format!("{}: bins must be positive", self.key)));
        }
        if !(learner.prior_precision > 0.0) {
            return Err(bad(format!(
                "{}: prior_precision must be positive",
                self.key
            )));
        }
        let config = MethodConfig {
            learner,
            pf,
            estimator,
            order: self.order.clone(),
            sampler_uses_inputs: self.sampler_uses_inputs.unwrap_or(false),
        };
        Ok(ResolvedMethod {
            key: method.to_string(),
            particles: pf.particles,
            eta: pf.eta,
            ess: match ess {
                EssKind::InverseSum => "sum".into(),
                EssKind::InverseMax => "max".into(),
            },
            mh_steps: pf.mh_steps,
            mh_sigma: pf.mh_sigma,
            estimator: estimator.to_string(),
            bins: config.learner.n_bins,
            bin_sampling: match bin_sampling {
                BinSampling::Jitter => "jitter".into(),
                BinSampling::Center => "center".into(),
            },
            trees: classifier.forest.n_trees,
            prior_precision: config.learner.prior_precision,
            bandwidth: self.bandwidth,
            krr_ridges: grid.ridges,
            krr_widths: grid.widths,
            krr_inner_folds: grid.inner_folds,
            krr_ridge: self.krr_ridge,
            krr_width: self.krr_width,
            order: self.order.clone(),
            sampler_uses_inputs: config.sampler_uses_inputs,
            method,
            config,
        })
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| bad(e.to_string()))
    }

    /// Read, parse and check a config file; relative dataset and output paths are
    /// made relative to the file's directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
        let mut config = Self::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for d in &mut config.datasets {
            if let Some(p) = &d.path {
                if p.is_relative() {
                    d.path = Some(base.join(p));
                }
            }
        }
        if config.experiment.output_dir.is_relative() {
            config.experiment.output_dir = base.join(&config.experiment.output_dir);
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<Vec<ResolvedMethod>, ConfigError> {
        let e = &self.experiment;
        if e.folds < 2 {
            return Err(bad(format!("folds = {} (need at least 2)", e.folds)));
        }
        if !(e.c > 0.0) {
            return Err(bad(format!("c = {} (must be positive)", e.c)));
        }
        if self.datasets.is_empty() || self.methods.is_empty() {
            return Err(bad("need at least one dataset and one method"));
        }
        let mut names = std::collections::BTreeSet::new();
        for d in &self.datasets {
            if d.name.is_empty() || d.name.contains([',', '/', '\\', '\n']) {
                return Err(bad(format!(
                    "dataset name `{}` must be non-empty without , / or \\",
                    d.name
                )));
            }
            if !names.insert(d.name.as_str()) {
                return Err(bad(format!("dataset `{}` listed twice", d.name)));
            }
            match (&d.path, &d.synth) {
                (Some(p), None) => {
                    if d.n_targets.unwrap_or(0) == 0 {
                        return Err(bad(format!("dataset `{}` needs n_targets >= 1", d.name)));
                    }
                    if !p.is_file() {
                        return Err(bad(format!(
                            "dataset `{}`: {} not found",
                            d.name,
                            p.display()
                        )));
                    }
                }
                (None, Some(s)) => {
                    if s.n < e.folds {
                        return Err(bad(format!("dataset `{}`: n < folds", d.name)));
                    }
                    if !(s.noise >= 0.0) {
                        return Err(bad(format!("dataset `{}`: negative noise", d.name)));
                    }
                }
                _ => {
                    return Err(bad(format!(
                        "dataset `{}` needs exactly one of path or synth",
                        d.name
                    )))
                }
            }
        }
        let methods = self
            .methods
            .iter()
            .map(MethodEntry::resolve)
            .collect::<Result<Vec<_>, _>>()?;
        let mut keys = std::collections::BTreeSet::new();
        for m in &methods {
            if !keys.insert(m.key.as_str()) {
                return Err(bad(format!("method `{}` listed twice", m.key)));
            }
        }
        Ok(methods)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        [[datasets]]
        name = "Synth"
        synth = { n = 100, noise = 0.03 }

        [[methods]]
        key = "IR.B"

        [[methods]]
        key = "PF.R/B"
        particles = 50
        mh_steps = 2
    "#;

    #[test]
    fn defaults_fill_in() {
        let c = ExperimentConfig::parse(MINIMAL).unwrap();
        assert_eq!(c.experiment.folds, 10);
        assert_eq!(c.experiment.c, 0.1);
        let m = c.validate().unwrap();
        assert_eq!(m[0].particles, 100);
        assert_eq!(m[0].eta, 0.1);
        assert_eq!(m[1].particles, 50);
        assert_eq!(m[1].config.pf.mh_steps, 2);
        assert_eq!(m[1].krr_ridges, vec![1.0, 0.1, 0.01, 0.001]);
    }

    #[test]
    fn rejects_bad_configs() {
        let cases = [
            MINIMAL.replace("IR.B", "IR.Q"),
            MINIMAL.replace("PF.R/B", "PF.R/K"),
            MINIMAL.replace("particles = 50", "particles = 50\nbogus = 1"),
            format!("[experiment]\nfolds = 1\n{MINIMAL}"),
            MINIMAL.replace(
                "synth = { n = 100, noise = 0.03 }",
                "path = \"/nonexistent.csv\"\nn_targets = 2",
            ),
            MINIMAL.replace("particles = 50", "eta = 2.0"),
        ];
        for text in cases {
            let r = ExperimentConfig::parse(&text).and_then(|c| c.validate().map(|_| ()));
            assert!(r.is_err(), "accepted:\n{text}");
        }
    }
}
