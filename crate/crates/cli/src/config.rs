//! `key=value` config files and their merge with command-line flags.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use clap::ValueEnum;

use crate::error::CliError;
use crate::{CommonArgs, EstimatorChoice, Format};

const KEYS: &[&str] = &[
    "estimator",
    "format",
    "nfc",
    "overlap",
    "workers",
    "deterministic",
    "min_tokens",
    "step",
    "threshold",
    "window",
];

#[derive(Debug, Default)]
pub struct FileConfig {
    values: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let content = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        Self::parse(&content).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    /// Blank lines and `#` comments are ignored; `-` and `_` are
    /// interchangeable in keys.
    pub fn parse(content: &str) -> Result<Self, String> {
        let mut values = BTreeMap::new();
        for (lineno, line) in content.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key=value", lineno + 1))?;
            let key = key.trim().replace('-', "_");
            if !KEYS.contains(&key.as_str()) {
                return Err(format!("line {}: unknown key {key:?}", lineno + 1));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(Self { values })
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.values
            .get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| CliError::Usage(format!("config: invalid value {v:?} for {key}")))
            })
            .transpose()
    }

    fn get_enum<T: ValueEnum>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.values
            .get(key)
            .map(|v| {
                T::from_str(v, true)
                    .map_err(|_| CliError::Usage(format!("config: invalid value {v:?} for {key}")))
            })
            .transpose()
    }
}

/// Fully resolved options of a corpus command.
#[derive(Debug, Clone)]
pub struct Settings {
    pub estimator: EstimatorChoice,
    pub format: Format,
    pub nfc: bool,
    pub overlap: bool,
    pub workers: Option<usize>,
    pub deterministic: bool,
    pub min_tokens: usize,
    pub step: usize,
    pub threshold: f64,
    pub window: usize,
}

/// Command-specific flags, `None` when not given.
#[derive(Debug, Default)]
pub struct Overrides {
    pub min_tokens: Option<usize>,
    pub step: Option<usize>,
    pub threshold: Option<f64>,
    pub window: Option<usize>,
}

impl Settings {
    pub fn resolve(common: &CommonArgs, flags: Overrides) -> Result<Self, CliError> {
        use word_entropy::convergence::{DEFAULT_STEP, DEFAULT_THRESHOLD, DEFAULT_WINDOW};
        let file = FileConfig::load(common.config.as_deref())?;
        let settings = Settings {
            estimator: common
                .estimator
                .or(file.get_enum("estimator")?)
                .unwrap_or(EstimatorChoice::All),
            format: common
                .format
                .or(file.get_enum("format")?)
                .unwrap_or(Format::Tsv),
            nfc: common.nfc || file.get("nfc")?.unwrap_or(false),
            overlap: common.overlap || file.get("overlap")?.unwrap_or(false),
            workers: common.workers.or(file.get("workers")?),
            deterministic: common.deterministic || file.get("deterministic")?.unwrap_or(false),
            min_tokens: flags
                .min_tokens
                .or(file.get("min_tokens")?)
                .unwrap_or(100_000),
            step: flags.step.or(file.get("step")?).unwrap_or(DEFAULT_STEP),
            threshold: flags
                .threshold
                .or(file.get("threshold")?)
                .unwrap_or(DEFAULT_THRESHOLD),
            window: flags
                .window
                .or(file.get("window")?)
                .unwrap_or(DEFAULT_WINDOW),
        };
        if settings.workers == Some(0) {
            return Err(CliError::Usage("--workers must be at least 1".into()));
        }
        if settings.step == 0 {
            return Err(CliError::Usage("--step must be at least 1".into()));
        }
        if settings.window < 2 {
            return Err(CliError::Usage("--window must be at least 2".into()));
        }
        if settings.threshold.is_nan() || settings.threshold < 0.0 {
            return Err(CliError::Usage("--threshold must be non-negative".into()));
        }
        Ok(settings)
    }

    pub fn wants(&self, estimator: EstimatorChoice) -> bool {
        self.estimator == EstimatorChoice::All || self.estimator == estimator
    }

    pub fn convention(&self) -> word_entropy::MatchConvention {
        if self.overlap {
            word_entropy::MatchConvention::Overlapping
        } else {
            word_entropy::MatchConvention::WithinPrefix
        }
    }

    /// Runs `f` on a pool with the configured number of workers.
    pub fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> Result<R, CliError> {
        #[cfg(feature = "parallel")]
        {
            let mut builder = rayon::ThreadPoolBuilder::new();
            if let Some(n) = self.workers {
                builder = builder.num_threads(n);
            }
            let pool = builder
                .build()
                .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
            Ok(pool.install(f))
        }
        #[cfg(not(feature = "parallel"))]
        Ok(f())
    }
}
