//! Plain-text experiment configuration: `key = value` lines with `#`
//! comments, merged with `--key value` command-line overrides (flags win).

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context, Result};

/// Every key any command understands, sorted; anything else is a typo.
const KNOWN_KEYS: &[&str] = &[
    "alpha",
    "beta",
    "coder",
    "coders",
    "cv",
    "dataset",
    "folds",
    "grid_alphas",
    "grid_betas",
    "include_precompute",
    "lambda",
    "max_iter",
    "n_per_class",
    "out_dir",
    "pca_dim",
    "preset",
    "query_index",
    "rho",
    "seed",
    "tol",
    "trials",
];

/// Merged key-value settings; within each source the last assignment wins.
#[derive(Debug, Clone, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

fn insert(values: &mut BTreeMap<String, String>, key: &str, value: &str) -> Result<()> {
    if KNOWN_KEYS.binary_search(&key).is_err() {
        bail!(
            "unknown setting {key:?}; known settings: {}",
            KNOWN_KEYS.join(", ")
        );
    }
    values.insert(key.to_string(), value.to_string());
    Ok(())
}

impl Settings {
    /// Reads the optional config file, then applies `--key value` override
    /// pairs on top.
    pub fn from_sources(config: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let mut values = BTreeMap::new();
        if let Some(path) = config {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            for (number, raw) in text.lines().enumerate() {
                let line = raw.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let Some((key, value)) = line.split_once('=') else {
                    bail!(
                        "config line {}: expected `key = value`, got {raw:?}",
                        number + 1
                    );
                };
                insert(&mut values, key.trim(), value.trim())
                    .with_context(|| format!("config line {}", number + 1))?;
            }
        }
        let mut args = overrides.iter();
        while let Some(flag) = args.next() {
            let Some(key) = flag.strip_prefix("--") else {
                bail!("expected a --key flag, got {flag:?}");
            };
            let Some(value) = args.next() else {
                bail!("flag --{key} is missing its value");
            };
            insert(&mut values, &key.replace('-', "_"), value)?;
        }
        Ok(Self { values })
    }

    /// Builds settings directly from pairs, for programmatic callers.
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (key, value) in pairs {
            insert(&mut values, key, value)?;
        }
        Ok(Self { values })
    }

    /// The raw value of a key, if set.
    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// The value of a required key.
    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .with_context(|| format!("setting {key:?} is required"))
    }

    /// Parses a key if present; a set-but-malformed value is an error.
    pub fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: Display,
    {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => match raw.parse() {
                Ok(value) => Ok(Some(value)),
                Err(err) => bail!("setting {key} = {raw:?}: {err}"),
            },
        }
    }

    /// Parses a key, falling back to a default.
    pub fn parsed_or<T: FromStr>(&self, key: &str, default: T) -> Result<T>
    where
        T::Err: Display,
    {
        Ok(self.parsed(key)?.unwrap_or(default))
    }

    /// Boolean keys accept true/false/1/0.
    pub fn flag(&self, key: &str, default: bool) -> Result<bool> {
        match self.get(key) {
            None => Ok(default),
            Some("true") | Some("1") => Ok(true),
            Some("false") | Some("0") => Ok(false),
            Some(other) => bail!("setting {key} must be true/false/1/0, got {other:?}"),
        }
    }

    /// A comma-separated list key, entries trimmed.
    pub fn comma_list(&self, key: &str) -> Option<Vec<String>> {
        self.get(key).map(|raw| {
            raw.split(',')
                .map(|entry| entry.trim().to_string())
                .filter(|entry| !entry.is_empty())
                .collect()
        })
    }

    /// A comma-separated list parsed to numbers.
    pub fn number_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        let Some(entries) = self.comma_list(key) else {
            return Ok(None);
        };
        let mut numbers = Vec::with_capacity(entries.len());
        for entry in &entries {
            numbers.push(
                entry
                    .parse()
                    .map_err(|err| anyhow::anyhow!("setting {key}: {entry:?}: {err}"))?,
            );
        }
        Ok(Some(numbers))
    }

    /// All set keys and values in sorted order, for echoing into reports.
    pub fn echo(&self) -> Vec<(String, String)> {
        self.values
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect()
    }
}
