//! Campaign configuration: defaults, `key=value` config files, and flag
//! overrides, resolved into one frozen [`CampaignSpec`] that round-trips
//! losslessly through `config.resolved`.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use finch_core::{DistanceMode, FuzzMode, Normalization, DEFAULT_K};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config line {line_no}: expected key=value, got '{line}'")]
    Malformed { line_no: usize, line: String },
    #[error("config line {line_no}: unknown key '{key}'")]
    UnknownKey { line_no: usize, key: String },
    #[error("invalid value '{value}' for {key}: {hint}")]
    InvalidValue {
        key: String,
        value: String,
        hint: String,
    },
    #[error("missing required setting '{0}' (flag or config file)")]
    Missing(&'static str),
    #[error("exactly one of execs/seconds must be given, not both")]
    BudgetConflict,
}

fn parse_as<T: FromStr>(key: &str, value: &str, hint: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::InvalidValue {
        key: key.to_string(),
        value: value.to_string(),
        hint: hint.to_string(),
    })
}

fn parse_mode(key: &str, value: &str) -> Result<FuzzMode, ConfigError> {
    match value {
        "finch" => Ok(FuzzMode::Finch),
        "baseline" => Ok(FuzzMode::Baseline),
        _ => Err(ConfigError::InvalidValue {
            key: key.into(),
            value: value.into(),
            hint: "expected finch|baseline".into(),
        }),
    }
}

fn parse_distance(key: &str, value: &str) -> Result<DistanceMode, ConfigError> {
    match value {
        "abs" => Ok(DistanceMode::Abs),
        "xor" => Ok(DistanceMode::Xor),
        _ => Err(ConfigError::InvalidValue {
            key: key.into(),
            value: value.into(),
            hint: "expected abs|xor".into(),
        }),
    }
}

fn parse_norm(key: &str, value: &str) -> Result<Normalization, ConfigError> {
    match value {
        "linear" => Ok(Normalization::Linear),
        "log" => Ok(Normalization::Log),
        _ => Err(ConfigError::InvalidValue {
            key: key.into(),
            value: value.into(),
            hint: "expected linear|log".into(),
        }),
    }
}

/// Settings gathered so far; `None` means "not stated here". Config files
/// and command-line flags each produce one layer, merged over the defaults.
#[derive(Debug, Default, Clone)]
pub struct ConfigLayer {
    pub target: Option<String>,
    pub seeds: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub execs: Option<u64>,
    pub seconds: Option<f64>,
    pub seed: Option<u64>,
    pub mode: Option<FuzzMode>,
    pub k: Option<u64>,
    pub distance: Option<DistanceMode>,
    pub norm: Option<Normalization>,
    pub hidden: Option<usize>,
    pub epochs: Option<usize>,
    pub havoc_ratio: Option<f64>,
    pub mutant_budget: Option<usize>,
    pub map_size: Option<usize>,
    pub per_objective_gradients: Option<bool>,
}

impl ConfigLayer {
    /// Parses a `key=value` file. Blank lines and `#` comments are allowed;
    /// later lines override earlier ones within the same file.
    pub fn from_file(path: &Path) -> Result<ConfigLayer, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut layer = ConfigLayer::default();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Malformed {
                    line_no,
                    line: line.to_string(),
                });
            };
            let (key, value) = (key.trim(), value.trim());
            match key {
                "target" => layer.target = Some(value.to_string()),
                "seeds" => layer.seeds = Some(PathBuf::from(value)),
                "out" => layer.out = Some(PathBuf::from(value)),
                "execs" => layer.execs = Some(parse_as(key, value, "expected a count")?),
                "seconds" => layer.seconds = Some(parse_as(key, value, "expected seconds")?),
                "seed" => layer.seed = Some(parse_as(key, value, "expected an unsigned integer")?),
                "mode" => layer.mode = Some(parse_mode(key, value)?),
                "k" => layer.k = Some(parse_as(key, value, "expected an unsigned integer")?),
                "distance" => layer.distance = Some(parse_distance(key, value)?),
                "norm" => layer.norm = Some(parse_norm(key, value)?),
                "hidden" => layer.hidden = Some(parse_as(key, value, "expected a width")?),
                "epochs" => layer.epochs = Some(parse_as(key, value, "expected a count")?),
                "havoc_ratio" => {
                    layer.havoc_ratio = Some(parse_as(key, value, "expected a ratio")?)
                }
                "mutant_budget" => {
                    layer.mutant_budget = Some(parse_as(key, value, "expected a count")?)
                }
                "map_size" => layer.map_size = Some(parse_as(key, value, "expected a size")?),
                "per_objective_gradients" => {
                    layer.per_objective_gradients =
                        Some(parse_as(key, value, "expected true|false")?)
                }
                _ => {
                    return Err(ConfigError::UnknownKey {
                        line_no,
                        key: key.to_string(),
                    })
                }
            }
        }
        Ok(layer)
    }

    /// Merges `over` on top of `self`: stated values win, absent ones fall
    /// through.
    pub fn overridden_by(self, over: &ConfigLayer) -> ConfigLayer {
        macro_rules! pick {
            ($field:ident) => {
                over.$field.clone().or(self.$field)
            };
        }
        ConfigLayer {
            target: pick!(target),
            seeds: pick!(seeds),
            out: pick!(out),
            execs: pick!(execs),
            seconds: pick!(seconds),
            seed: pick!(seed),
            mode: pick!(mode),
            k: pick!(k),
            distance: pick!(distance),
            norm: pick!(norm),
            hidden: pick!(hidden),
            epochs: pick!(epochs),
            havoc_ratio: pick!(havoc_ratio),
            mutant_budget: pick!(mutant_budget),
            map_size: pick!(map_size),
            per_objective_gradients: pick!(per_objective_gradients),
        }
    }
}

/// The budget exactly as the user stated it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpecBudget {
    Execs(u64),
    Seconds(f64),
}

/// A fully resolved campaign: every knob pinned, ready to run and to
/// serialize into `config.resolved`.
#[derive(Debug, Clone, PartialEq)]
pub struct CampaignSpec {
    pub target: String,
    pub seeds: PathBuf,
    pub out: PathBuf,
    pub budget: SpecBudget,
    pub seed: u64,
    pub mode: FuzzMode,
    pub k: u64,
    pub distance: DistanceMode,
    pub norm: Normalization,
    pub hidden: usize,
    pub epochs: usize,
    pub havoc_ratio: f64,
    pub mutant_budget: usize,
    pub map_size: usize,
    pub per_objective_gradients: bool,
}

impl CampaignSpec {
    /// Pins defaults under the merged layers and checks the required trio
    /// (target, seeds, out) plus exactly one budget.
    pub fn resolve(merged: ConfigLayer) -> Result<CampaignSpec, ConfigError> {
        let budget = match (merged.execs, merged.seconds) {
            (Some(e), None) => SpecBudget::Execs(e),
            (None, Some(s)) => SpecBudget::Seconds(s),
            (None, None) => return Err(ConfigError::Missing("execs or seconds")),
            (Some(_), Some(_)) => return Err(ConfigError::BudgetConflict),
        };
        Ok(CampaignSpec {
            target: merged.target.ok_or(ConfigError::Missing("target"))?,
            seeds: merged.seeds.ok_or(ConfigError::Missing("seeds"))?,
            out: merged.out.ok_or(ConfigError::Missing("out"))?,
            budget,
            seed: merged.seed.unwrap_or(0),
            mode: merged.mode.unwrap_or(FuzzMode::Finch),
            k: merged.k.unwrap_or(DEFAULT_K),
            distance: merged.distance.unwrap_or(DistanceMode::Abs),
            norm: merged.norm.unwrap_or(Normalization::Linear),
            hidden: merged.hidden.unwrap_or(512),
            epochs: merged.epochs.unwrap_or(200),
            havoc_ratio: merged.havoc_ratio.unwrap_or(0.25),
            mutant_budget: merged.mutant_budget.unwrap_or(1 << 16),
            map_size: merged.map_size.unwrap_or(65536),
            per_objective_gradients: merged.per_objective_gradients.unwrap_or(false),
        })
    }
}

impl fmt::Display for CampaignSpec {
    /// `config.resolved` body: one `key=value` per line, parseable back by
    /// [`ConfigLayer::from_file`] into the same spec.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "target={}", self.target)?;
        writeln!(f, "seeds={}", self.seeds.display())?;
        writeln!(f, "out={}", self.out.display())?;
        match self.budget {
            SpecBudget::Execs(e) => writeln!(f, "execs={e}")?,
            SpecBudget::Seconds(s) => writeln!(f, "seconds={s}")?,
        }
        writeln!(f, "seed={}", self.seed)?;
        let mode = match self.mode {
            FuzzMode::Finch => "finch",
            FuzzMode::Baseline => "baseline",
        };
        writeln!(f, "mode={mode}")?;
        writeln!(f, "k={}", self.k)?;
        let distance = match self.distance {
            DistanceMode::Abs => "abs",
            DistanceMode::Xor => "xor",
        };
        writeln!(f, "distance={distance}")?;
        let norm = match self.norm {
            Normalization::Linear => "linear",
            Normalization::Log => "log",
        };
        writeln!(f, "norm={norm}")?;
        writeln!(f, "hidden={}", self.hidden)?;
        writeln!(f, "epochs={}", self.epochs)?;
        writeln!(f, "havoc_ratio={}", self.havoc_ratio)?;
        writeln!(f, "mutant_budget={}", self.mutant_budget)?;
        writeln!(f, "map_size={}", self.map_size)?;
        writeln!(
            f,
            "per_objective_gradients={}",
            self.per_objective_gradients
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn minimal_layer() -> ConfigLayer {
        ConfigLayer {
            target: Some("fig1".into()),
            seeds: Some("in".into()),
            out: Some("outdir".into()),
            execs: Some(100),
            ..ConfigLayer::default()
        }
    }

    #[test]
    fn defaults_fill_everything_optional() {
        let spec = CampaignSpec::resolve(minimal_layer()).unwrap();
        assert_eq!(spec.seed, 0);
        assert_eq!(spec.mode, FuzzMode::Finch);
        assert_eq!(spec.k, DEFAULT_K);
        assert_eq!(spec.hidden, 512);
        assert_eq!(spec.epochs, 200);
        assert_eq!(spec.havoc_ratio, 0.25);
        assert_eq!(spec.mutant_budget, 65536);
        assert_eq!(spec.map_size, 65536);
        assert!(!spec.per_objective_gradients);
    }

    #[test]
    fn missing_required_fields_are_named() {
        let err = CampaignSpec::resolve(ConfigLayer::default()).unwrap_err();
        assert!(matches!(err, ConfigError::Missing("execs or seconds")));
        let mut layer = minimal_layer();
        layer.target = None;
        assert!(matches!(
            CampaignSpec::resolve(layer).unwrap_err(),
            ConfigError::Missing("target")
        ));
    }

    #[test]
    fn both_budgets_conflict() {
        let mut layer = minimal_layer();
        layer.seconds = Some(5.0);
        assert!(matches!(
            CampaignSpec::resolve(layer).unwrap_err(),
            ConfigError::BudgetConflict
        ));
    }

    #[test]
    fn flags_override_the_file() {
        let file = minimal_layer();
        let flags = ConfigLayer {
            execs: Some(999),
            mode: Some(FuzzMode::Baseline),
            ..ConfigLayer::default()
        };
        let spec = CampaignSpec::resolve(file.overridden_by(&flags)).unwrap();
        assert_eq!(spec.budget, SpecBudget::Execs(999));
        assert_eq!(spec.mode, FuzzMode::Baseline);
        assert_eq!(spec.target, "fig1", "unstated flags fall through");
    }

    #[test]
    fn resolved_output_round_trips() {
        let mut layer = minimal_layer();
        layer.mode = Some(FuzzMode::Baseline);
        layer.norm = Some(Normalization::Log);
        layer.distance = Some(DistanceMode::Xor);
        layer.havoc_ratio = Some(0.5);
        layer.per_objective_gradients = Some(true);
        let spec = CampaignSpec::resolve(layer).unwrap();

        let mut file = tempfile::NamedTempFile::new().unwrap();
        write!(file, "{spec}").unwrap();
        let reread = ConfigLayer::from_file(file.path()).unwrap();
        let spec2 = CampaignSpec::resolve(reread).unwrap();
        assert_eq!(spec, spec2);
    }

    #[test]
    fn files_tolerate_comments_and_reject_junk() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "# a comment\n\ntarget = fig1\nexecs=5").unwrap();
        let layer = ConfigLayer::from_file(file.path()).unwrap();
        assert_eq!(layer.target.as_deref(), Some("fig1"));
        assert_eq!(layer.execs, Some(5));

        let mut bad = tempfile::NamedTempFile::new().unwrap();
        writeln!(bad, "target fig1").unwrap();
        assert!(matches!(
            ConfigLayer::from_file(bad.path()).unwrap_err(),
            ConfigError::Malformed { line_no: 1, .. }
        ));

        let mut unknown = tempfile::NamedTempFile::new().unwrap();
        writeln!(unknown, "tarmac=fig1").unwrap();
        assert!(matches!(
            ConfigLayer::from_file(unknown.path()).unwrap_err(),
            ConfigError::UnknownKey { .. }
        ));

        let mut badval = tempfile::NamedTempFile::new().unwrap();
        writeln!(badval, "mode=chaotic").unwrap();
        assert!(matches!(
            ConfigLayer::from_file(badval.path()).unwrap_err(),
            ConfigError::InvalidValue { .. }
        ));
    }
}
