use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use partmax::synthetic::SyntheticKind;
use partmax::Algorithm;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum App {
    Influence,
    Summarization,
    Synthetic,
}

impl App {
    pub fn name(self) -> &'static str {
        match self {
            App::Influence => "influence",
            App::Summarization => "summarization",
            App::Synthetic => "synthetic",
        }
    }

    /// Whether the app has a closed-form bound on `(γ, α)`.
    pub fn has_bounds(self) -> bool {
        !matches!(self, App::Synthetic)
    }
}

/// `γ′` or `α′`: a number, or `auto` for the app's bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamChoice {
    Auto,
    Value(f64),
}

impl FromStr for ParamChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(ParamChoice::Auto);
        }
        s.parse::<f64>()
            .map(ParamChoice::Value)
            .map_err(|_| format!("expected a number or `auto`, got `{s}`"))
    }
}

impl fmt::Display for ParamChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamChoice::Auto => f.write_str("auto"),
            ParamChoice::Value(v) => write!(f, "{v}"),
        }
    }
}

impl Serialize for ParamChoice {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            ParamChoice::Auto => serializer.serialize_str("auto"),
            ParamChoice::Value(v) => serializer.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for ParamChoice {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Number(v) => Ok(ParamChoice::Value(v)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Vary {
    B,
    K,
}

impl Vary {
    pub fn column(self) -> &'static str {
        match self {
            Vary::B => "B",
            Vary::K => "num_groups",
        }
    }
}

/// Everything one experiment needs. Loaded from JSON, then overridden by flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub app: App,
    pub algorithms: Vec<Algorithm>,
    /// Total budget, split equally over the groups.
    pub b: usize,
    pub k: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub gamma_prime: ParamChoice,
    pub alpha_prime: ParamChoice,
    pub repetitions: usize,
    pub seed: u64,
    /// Live-edge samples for the influence objective.
    pub realizations: usize,
    /// Edge list (`.txt`) or JSON instance for the influence app.
    pub input: Option<PathBuf>,
    /// Frame-feature CSV for the summarization app.
    pub features: Option<PathBuf>,
    pub output: Option<PathBuf>,
    /// Ground-set size of generated instances (graph nodes, frames, elements).
    pub n: usize,
    pub kind: SyntheticKind,
    pub avg_degree: f64,
    /// Read edge lists as directed instead of doubling every edge.
    pub directed: bool,
    /// Kernel bandwidth; the median pairwise distance when absent.
    pub bandwidth: Option<f64>,
    /// Score summaries by `ln det` instead of `det`.
    pub log_objective: bool,
    /// Add a wall-time column to run output.
    pub timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            app: App::Synthetic,
            algorithms: vec![
                Algorithm::Greedy,
                Algorithm::Thr,
                Algorithm::Prob,
                Algorithm::FastProb,
            ],
            b: 10,
            k: 2,
            epsilon: 0.5,
            delta: 0.001,
            gamma_prime: ParamChoice::Auto,
            alpha_prime: ParamChoice::Auto,
            repetitions: 10,
            seed: 0,
            realizations: 100,
            input: None,
            features: None,
            output: None,
            n: 100,
            kind: SyntheticKind::Modular,
            avg_degree: 10.0,
            directed: false,
            bandwidth: None,
            log_objective: false,
            timing: false,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Whether any selected algorithm consumes `γ′` and `α′`.
    pub fn needs_params(&self) -> bool {
        self.algorithms
            .iter()
            .any(|a| matches!(a, Algorithm::Prob | Algorithm::FastProb))
    }

    pub fn validate(&self) -> CliResult<()> {
        self.validate_ranges()?;
        for (name, choice) in [
            ("gamma-prime", self.gamma_prime),
            ("alpha-prime", self.alpha_prime),
        ] {
            if choice == ParamChoice::Auto && self.needs_params() {
                if !self.app.has_bounds() {
                    return Err(CliError::Config(format!(
                        "{name}=auto needs an app with parameter bounds; pass a value"
                    )));
                }
                if self.app == App::Summarization && self.log_objective {
                    return Err(CliError::Config(format!(
                        "{name}=auto does not apply to the log objective; pass a value"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Range checks only; `auto` is accepted anywhere.
    pub fn validate_ranges(&self) -> CliResult<()> {
        let fail = |msg: String| Err(CliError::Config(msg));
        if self.algorithms.is_empty() {
            return fail("no algorithm selected".into());
        }
        if self.k == 0 || self.b < self.k {
            return fail(format!("need 1 ≤ k ≤ b, got b={} k={}", self.b, self.k));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return fail(format!("epsilon must lie in (0,1), got {}", self.epsilon));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return fail(format!("delta must lie in (0,1), got {}", self.delta));
        }
        if self.repetitions == 0 || self.realizations == 0 {
            return fail("repetitions and realizations must be positive".into());
        }
        for (name, choice) in [
            ("gamma-prime", self.gamma_prime),
            ("alpha-prime", self.alpha_prime),
        ] {
            match choice {
                ParamChoice::Value(v) if !(0.0..=1.0).contains(&v) => {
                    return fail(format!("{name} must lie in [0,1], got {v}"));
                }
                _ => {}
            }
        }
        if let Some(h) = self.bandwidth {
            if !(h > 0.0 && h.is_finite()) {
                return fail(format!("bandwidth must be positive, got {h}"));
            }
        }
        Ok(())
    }
}

/// Flags that override the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// JSON experiment config; flags take precedence over it
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub app: Option<App>,
    /// Comma-separated: greedy, thr, prob, fastprob, resgreedy, brute
    #[arg(long, value_delimiter = ',')]
    pub alg: Option<Vec<Algorithm>>,
    /// Total budget
    #[arg(long)]
    pub b: Option<usize>,
    /// Number of groups
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Lower bound on the DR-ratio, or `auto`
    #[arg(long)]
    pub gamma_prime: Option<ParamChoice>,
    /// Upper bound on the curvature, or `auto`
    #[arg(long)]
    pub alpha_prime: Option<ParamChoice>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub realizations: Option<usize>,
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub features: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Size of generated instances
    #[arg(long)]
    pub n: Option<usize>,
    /// Synthetic objective: modular, coverage, squared
    #[arg(long)]
    pub kind: Option<SyntheticKind>,
    #[arg(long)]
    pub avg_degree: Option<f64>,
    #[arg(long)]
    pub directed: bool,
    #[arg(long)]
    pub bandwidth: Option<f64>,
    #[arg(long)]
    pub log_objective: bool,
    #[arg(long)]
    pub timing: bool,
}

impl Overrides {
    pub fn resolve(&self) -> CliResult<ExperimentConfig> {
        let c = self.merged()?;
        c.validate()?;
        Ok(c)
    }

    /// For commands that run no algorithm: only range checks apply.
    pub fn resolve_for_bounds(&self) -> CliResult<ExperimentConfig> {
        let c = self.merged()?;
        c.validate_ranges()?;
        Ok(c)
    }

    fn merged(&self) -> CliResult<ExperimentConfig> {
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        macro_rules! take {
            ($($flag:ident => $field:ident),* $(,)?) => {
                $(if let Some(v) = &self.$flag {
                    c.$field = v.clone();
                })*
            };
        }
        take!(app => app, alg => algorithms, b => b, k => k, eps => epsilon, delta => delta,
            gamma_prime => gamma_prime, alpha_prime => alpha_prime, reps => repetitions,
            seed => seed, realizations => realizations, n => n, kind => kind, avg_degree => avg_degree);
        if self.input.is_some() {
            c.input = self.input.clone();
        }
        if self.features.is_some() {
            c.features = self.features.clone();
        }
        if self.output.is_some() {
            c.output = self.output.clone();
        }
        if self.bandwidth.is_some() {
            c.bandwidth = self.bandwidth;
        }
        c.directed |= self.directed;
        c.log_objective |= self.log_objective;
        c.timing |= self.timing;
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_with_auto() {
        let c = ExperimentConfig {
            gamma_prime: ParamChoice::Value(0.25),
            ..Default::default()
        };
        let text = serde_json::to_string(&c).unwrap();
        assert!(text.contains("\"alpha_prime\":\"auto\""));
        assert_eq!(serde_json::from_str::<ExperimentConfig>(&text).unwrap(), c);
    }

    #[test]
    fn partial_json_fills_defaults() {
        let c: ExperimentConfig =
            serde_json::from_str(r#"{"app":"influence","algorithms":["fastprob"],"b":100}"#)
                .unwrap();
        assert_eq!(c.app, App::Influence);
        assert_eq!(
            (c.delta, c.epsilon, c.repetitions, c.realizations),
            (0.001, 0.5, 10, 100)
        );
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"bogus":1}"#).is_err());
    }

    #[test]
    fn flags_win_over_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        fs::write(&path, r#"{"b": 20, "k": 4, "seed": 3}"#).unwrap();
        let o = Overrides {
            config: Some(path),
            b: Some(8),
            gamma_prime: Some(ParamChoice::Value(0.5)),
            alpha_prime: Some(ParamChoice::Value(0.5)),
            ..Default::default()
        };
        let c = o.resolve().unwrap();
        assert_eq!((c.b, c.k, c.seed), (8, 4, 3));
    }

    #[test]
    fn auto_needs_bounds() {
        let c = ExperimentConfig::default();
        assert!(matches!(c.validate(), Err(CliError::Config(_))));
        let c = ExperimentConfig {
            algorithms: vec![Algorithm::Greedy],
            ..Default::default()
        };
        assert!(c.validate().is_ok());
        let c = ExperimentConfig {
            app: App::Influence,
            ..Default::default()
        };
        assert!(c.validate().is_ok());
    }

    #[test]
    fn ranges_are_checked() {
        let base = ExperimentConfig {
            algorithms: vec![Algorithm::Greedy],
            ..Default::default()
        };
        for bad in [
            ExperimentConfig {
                epsilon: 1.0,
                ..base.clone()
            },
            ExperimentConfig {
                delta: 0.0,
                ..base.clone()
            },
            ExperimentConfig {
                b: 1,
                k: 2,
                ..base.clone()
            },
            ExperimentConfig {
                gamma_prime: ParamChoice::Value(1.5),
                ..base.clone()
            },
        ] {
            assert!(bad.validate().is_err());
        }
    }

    #[test]
    fn param_choice_parsing() {
        assert_eq!("auto".parse::<ParamChoice>().unwrap(), ParamChoice::Auto);
        assert_eq!(
            "0.5".parse::<ParamChoice>().unwrap(),
            ParamChoice::Value(0.5)
        );
        assert!("x".parse::<ParamChoice>().is_err());
    }
}
