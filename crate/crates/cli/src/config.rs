use std::sync::Mutex;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use apfourier::format::parse_config;

/// Why a run stopped: usage problems exit with 2, domain errors with 1.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Domain(apfourier::Error),
}

impl From<apfourier::Error> for Failure {
    fn from(e: apfourier::Error) -> Self {
        Failure::Domain(e)
    }
}

pub type Outcome<T> = std::result::Result<T, Failure>;

/// Resolves each setting as flag, then config value, then default, and
/// remembers which config keys were consulted.
#[derive(Debug, Default)]
pub struct Resolver {
    config: BTreeMap<String, String>,
    known: Mutex<BTreeSet<String>>,
}

impl Resolver {
    pub fn load(path: Option<&Path>) -> Outcome<Self> {
        let config = match path {
            None => BTreeMap::new(),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", p.display())))?;
                parse_config(&text).map_err(|e| Failure::Usage(format!("config {}: {e}", p.display())))?
            }
        };
        Ok(Self {
            config,
            known: Mutex::default(),
        })
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.known.lock().expect("lock").insert(key.to_string());
        self.config.get(key).map(String::as_str)
    }

    pub fn optional<T>(&self, cli: Option<T>, key: &str) -> Outcome<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        let from_config = self.raw(key);
        if cli.is_some() {
            return Ok(cli);
        }
        match from_config {
            None => Ok(None),
            Some(text) => text
                .parse()
                .map(Some)
                .map_err(|e| Failure::Usage(format!("config key '{key}': invalid value '{text}': {e}"))),
        }
    }

    pub fn value<T>(&self, cli: Option<T>, key: &str, default: T) -> Outcome<T>
    where
        T: FromStr,
        T::Err: Display,
    {
        Ok(self.optional(cli, key)?.unwrap_or(default))
    }

    pub fn required<T>(&self, cli: Option<T>, key: &str) -> Outcome<T>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.optional(cli, key)?
            .ok_or_else(|| Failure::Usage(format!("missing required --{key}")))
    }

    pub fn flag(&self, cli: bool, key: &str) -> Outcome<bool> {
        Ok(cli || self.optional::<bool>(None, key)?.unwrap_or(false))
    }

    /// Fails on config keys that no resolved setting asked for.
    pub fn finish(&self) -> Outcome<()> {
        let known = self.known.lock().expect("lock");
        let unknown: Vec<&str> = self
            .config
            .keys()
            .filter(|k| !known.contains(*k))
            .map(String::as_str)
            .collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(Failure::Usage(format!("unknown config key(s): {}", unknown.join(", "))))
        }
    }
}

/// Comma-separated list.
pub fn parse_list<T>(text: &str, key: &str) -> Outcome<Vec<T>>
where
    T: FromStr,
    T::Err: Display,
{
    text.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|e| Failure::Usage(format!("--{key}: invalid entry '{s}': {e}")))
        })
        .collect()
}
