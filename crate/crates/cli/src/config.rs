//! Flat key/value TOML file supplying defaults for command-line flags.
//!
//! Keys are flag names with `-` or `_` as separator. A flag given on the
//! command line always wins. Relative paths in the file are resolved
//! against the directory holding it.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;
use serde_json::Value;

const KNOWN_KEYS: &[&str] = &[
    "threads",
    "out_dir",
    "journals",
    "publications",
    "merges",
    "year",
    "doc_types",
    "corpus",
    "threshold",
    "max_iterations",
    "mode",
    "citing_set",
    "min_pubs",
    "a",
    "b",
    "diff_factor",
    "top_n",
    "spec",
    "use_selection",
    "export",
];

#[derive(Debug, Default)]
pub struct Config {
    values: toml::Table,
    base: PathBuf,
}

impl Config {
    pub fn parse(text: &str, base: &Path) -> Result<Config> {
        let table: toml::Table = text.parse().context("config file is not valid TOML")?;
        let mut values = toml::Table::new();
        for (key, value) in table {
            let norm = key.replace('-', "_");
            if !KNOWN_KEYS.contains(&norm.as_str()) {
                bail!("unknown config key `{key}`");
            }
            if matches!(value, toml::Value::Table(_)) {
                bail!("config key `{key}`: nested tables are not supported");
            }
            if values.insert(norm, value).is_some() {
                bail!("config key `{key}` is given twice");
            }
        }
        Ok(Config {
            values,
            base: base.to_owned(),
        })
    }
}

/// A value that can come from a flag or from the config file.
pub trait ConfigValue: Sized + Serialize {
    const EXPECTED: &'static str;
    fn from_toml(value: &toml::Value, base: &Path) -> Option<Self>;
}

impl ConfigValue for String {
    const EXPECTED: &'static str = "a string";
    fn from_toml(value: &toml::Value, _: &Path) -> Option<Self> {
        value.as_str().map(str::to_owned)
    }
}

impl ConfigValue for PathBuf {
    const EXPECTED: &'static str = "a path string";
    fn from_toml(value: &toml::Value, base: &Path) -> Option<Self> {
        value.as_str().map(|s| base.join(s))
    }
}

impl ConfigValue for bool {
    const EXPECTED: &'static str = "a boolean";
    fn from_toml(value: &toml::Value, _: &Path) -> Option<Self> {
        value.as_bool()
    }
}

impl ConfigValue for f64 {
    const EXPECTED: &'static str = "a number";
    fn from_toml(value: &toml::Value, _: &Path) -> Option<Self> {
        match value {
            toml::Value::Float(f) => Some(*f),
            toml::Value::Integer(i) => Some(*i as f64),
            _ => None,
        }
    }
}

macro_rules! integer_value {
    ($($t:ty),*) => {$(
        impl ConfigValue for $t {
            const EXPECTED: &'static str = concat!("an integer fitting ", stringify!($t));
            fn from_toml(value: &toml::Value, _: &Path) -> Option<Self> {
                value.as_integer().and_then(|i| <$t>::try_from(i).ok())
            }
        }
    )*};
}
integer_value!(i32, u64, usize);

/// Either an array of strings or one comma-separated string.
impl ConfigValue for Vec<String> {
    const EXPECTED: &'static str = "a list of strings";
    fn from_toml(value: &toml::Value, _: &Path) -> Option<Self> {
        match value {
            toml::Value::String(s) => Some(s.split(',').map(|p| p.trim().to_owned()).collect()),
            toml::Value::Array(items) => items.iter().map(|v| v.as_str().map(str::to_owned)).collect(),
            _ => None,
        }
    }
}

/// Merges flags with the config file and records every resolved setting
/// for the run manifest.
pub struct Settings<'a> {
    config: &'a Config,
    resolved: BTreeMap<String, Value>,
}

impl<'a> Settings<'a> {
    pub fn new(config: &'a Config) -> Self {
        Settings {
            config,
            resolved: BTreeMap::new(),
        }
    }

    pub fn optional<T: ConfigValue>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>> {
        let value = match flag {
            Some(v) => Some(v),
            None => match self.config.values.get(key) {
                None => None,
                Some(raw) => Some(
                    T::from_toml(raw, &self.config.base)
                        .ok_or_else(|| anyhow!("config key `{key}` must be {}", T::EXPECTED))?,
                ),
            },
        };
        if let Some(v) = &value {
            self.resolved.insert(key.to_owned(), serde_json::to_value(v)?);
        }
        Ok(value)
    }

    pub fn or<T: ConfigValue>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T> {
        match self.optional(key, flag)? {
            Some(v) => Ok(v),
            None => {
                self.resolved.insert(key.to_owned(), serde_json::to_value(&default)?);
                Ok(default)
            }
        }
    }

    pub fn required<T: ConfigValue>(&mut self, key: &str, flag: Option<T>) -> Result<T> {
        self.optional(key, flag)?.ok_or_else(|| {
            anyhow!(
                "missing --{} (or `{key}` in the config file)",
                key.replace('_', "-")
            )
        })
    }

    /// Boolean switches: absent on the command line means "not given".
    pub fn switch(&mut self, key: &str, flag: bool) -> Result<bool> {
        self.or(key, flag.then_some(true), false)
    }

    pub fn into_resolved(self) -> BTreeMap<String, Value> {
        self.resolved
    }
}
