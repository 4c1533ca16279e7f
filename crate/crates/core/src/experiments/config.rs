use std::collections::BTreeMap;
use std::str::FromStr;

use crate::error::{invalid, parse_err, Result};

/// Flat `section.key = value` settings. Blank lines and `#` comments are
/// skipped; a `[section]` line prefixes the keys that follow it.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExperimentConfig {
    entries: BTreeMap<String, String>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = name.trim().to_string();
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| parse_err(i + 1, "expected key = value"))?;
            let k = k.trim();
            if k.is_empty() || k.contains(char::is_whitespace) {
                return Err(parse_err(i + 1, format!("bad key `{k}`")));
            }
            let key = if section.is_empty() || k.contains('.') { k.to_string() } else { format!("{section}.{k}") };
            if entries.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(parse_err(i + 1, format!("duplicate key `{key}`")));
            }
        }
        Ok(ExperimentConfig { entries })
    }

    pub fn named(name: &str) -> Self {
        let mut c = Self::default();
        c.set("experiment.name", name);
        c
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn name(&self) -> Option<&str> {
        self.entries.get("experiment.name").map(String::as_str)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.entries.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| invalid(format!("`{key}` has unreadable value `{v}`"))),
        }
    }

    pub fn seed(&self) -> Result<u64> {
        self.get("run.seed", 1)
    }

    /// Canonical `key = value` text, sorted by key.
    pub fn to_text(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}
