//! Flat `key = value` configuration with dotted keys and `#` comments.
//!
//! ```text
//! # radius sweep
//! mesh.width = 4
//! timing.t_epr = 10
//! sweep.cr = fixed:1, fixed:3
//! ```

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{CliError, Result};

/// Where a value came from, for error messages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    File { file: String, line: usize },
    Override,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::File { file, line } => write!(f, "{file}:{line}"),
            Origin::Override => f.write_str("<command line>"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub value: String,
    pub origin: Origin,
}

#[derive(Debug, Default)]
pub struct KeyValues {
    entries: BTreeMap<String, Entry>,
    read: RefCell<BTreeSet<String>>,
}

impl KeyValues {
    pub fn parse(text: &str, file: &str) -> Result<Self> {
        let mut kv = KeyValues::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let origin = Origin::File {
                file: file.to_string(),
                line,
            };
            let Some((key, value)) = content.split_once('=') else {
                return Err(CliError::config(&origin, "expected `key = value`"));
            };
            let key = key.trim();
            if key.is_empty()
                || !key
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.')
            {
                return Err(CliError::config(&origin, format!("invalid key `{key}`")));
            }
            if let Some(prev) = kv.entries.get(key) {
                return Err(CliError::config(
                    &origin,
                    format!("duplicate key `{key}` (first set at {})", prev.origin),
                ));
            }
            kv.entries.insert(
                key.to_string(),
                Entry {
                    value: value.trim().to_string(),
                    origin,
                },
            );
        }
        Ok(kv)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Sets or replaces a value from the command line.
    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.entries.insert(
            key.to_string(),
            Entry {
                value: value.into(),
                origin: Origin::Override,
            },
        );
    }

    /// Parses `key=value` as given to `--set`.
    pub fn set_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair.split_once('=').ok_or_else(|| {
            CliError::config(&Origin::Override, format!("`{pair}` is not key=value"))
        })?;
        self.set(k.trim(), v.trim());
        Ok(())
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn entry(&self, key: &str) -> Option<&Entry> {
        let e = self.entries.get(key);
        if e.is_some() {
            self.read.borrow_mut().insert(key.to_string());
        }
        e
    }

    pub fn str(&self, key: &str) -> Option<&str> {
        self.entry(key).map(|e| e.value.as_str())
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: fmt::Display,
    {
        let Some(e) = self.entry(key) else {
            return Ok(None);
        };
        e.value
            .parse()
            .map(Some)
            .map_err(|err| CliError::config(&e.origin, format!("{key}: {err}")))
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T>
    where
        T::Err: fmt::Display,
    {
        Ok(self.get(key)?.unwrap_or(default))
    }

    /// Comma-separated list; `None` when the key is absent.
    pub fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>>
    where
        T::Err: fmt::Display,
    {
        let Some(e) = self.entry(key) else {
            return Ok(None);
        };
        let items: Vec<&str> = e.value.split(',').map(str::trim).collect();
        if items.iter().any(|s| s.is_empty()) {
            return Err(CliError::config(
                &e.origin,
                format!("{key}: empty list item"),
            ));
        }
        items
            .into_iter()
            .map(|s| {
                s.parse()
                    .map_err(|err| CliError::config(&e.origin, format!("{key}: `{s}`: {err}")))
            })
            .collect::<Result<Vec<T>>>()
            .map(Some)
    }

    pub fn origin(&self, key: &str) -> Origin {
        self.entries
            .get(key)
            .map(|e| e.origin.clone())
            .unwrap_or(Origin::Override)
    }

    /// Fails on the first key nothing asked for, which catches typos.
    pub fn reject_unread(&self) -> Result<()> {
        let read = self.read.borrow();
        match self.entries.iter().find(|(k, _)| !read.contains(*k)) {
            Some((k, e)) => Err(CliError::config(&e.origin, format!("unknown key `{k}`"))),
            None => Ok(()),
        }
    }
}
