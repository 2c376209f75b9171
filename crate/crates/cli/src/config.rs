//! Resolved run configuration: defaults, then a key=value file, then flags.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use sha2::{Digest, Sha256};

/// Keys that never change an output and so stay out of the hash.
const UNHASHED: &[&str] = &["jobs"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub command: String,
    values: BTreeMap<String, String>,
}

/// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_kv(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {}: expected key = value, got {raw:?}", i + 1))?;
        let key = k.trim().replace('-', "_");
        if key.is_empty() {
            bail!("line {}: empty key", i + 1);
        }
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

impl RunConfig {
    /// `defaults` fixes the accepted keys; the file may only set those, and
    /// every `Some` flag wins over both.
    pub fn resolve(
        command: &str,
        defaults: &[(&str, &str)],
        file: Option<&Path>,
        flags: Vec<(&str, Option<String>)>,
    ) -> Result<Self> {
        let mut values: BTreeMap<String, String> =
            defaults.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
            for (k, v) in parse_kv(&text).with_context(|| format!("in config {}", path.display()))? {
                if !values.contains_key(&k) {
                    bail!("config {}: unknown key {k:?} for `{command}`", path.display());
                }
                values.insert(k, v);
            }
        }
        for (k, v) in flags {
            debug_assert!(values.contains_key(k), "flag {k} has no default");
            if let Some(v) = v {
                values.insert(k.to_string(), v);
            }
        }
        Ok(Self { command: command.to_string(), values })
    }

    pub fn raw(&self, key: &str) -> &str {
        self.values.get(key).map(String::as_str).unwrap_or("")
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: Display,
    {
        let v = self.raw(key);
        v.parse().map_err(|e| anyhow!("parameter {key} = {v:?}: {e}"))
    }

    /// Empty string means unset.
    pub fn path(&self, key: &str) -> Option<PathBuf> {
        let v = self.raw(key);
        (!v.is_empty()).then(|| PathBuf::from(v))
    }

    pub fn values(&self) -> &BTreeMap<String, String> {
        &self.values
    }

    /// SHA-256 of the command and every hashed key=value line, hex encoded.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.command.as_bytes());
        h.update(b"\n");
        for (k, v) in &self.values {
            if UNHASHED.contains(&k.as_str()) {
                continue;
            }
            h.update(format!("{k}={v}\n").as_bytes());
        }
        format!("{:x}", h.finalize())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DEFAULTS: &[(&str, &str)] = &[("time", "1"), ("levels", "4"), ("out", ""), ("jobs", "0")];

    #[test]
    fn flags_override_file_override_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let f = dir.path().join("run.cfg");
        std::fs::write(&f, "# a run\ntime = 2.5\nlevels=7 # trailing\n\n").unwrap();
        let c = RunConfig::resolve("simulate", DEFAULTS, Some(&f), vec![("levels", Some("9".into())), ("time", None)])
            .unwrap();
        assert_eq!(c.get::<f64>("time").unwrap(), 2.5);
        assert_eq!(c.get::<usize>("levels").unwrap(), 9);
        assert_eq!(c.path("out"), None);
    }

    #[test]
    fn unknown_keys_and_bad_lines_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let f = dir.path().join("run.cfg");
        std::fs::write(&f, "speed = 3\n").unwrap();
        assert!(RunConfig::resolve("simulate", DEFAULTS, Some(&f), vec![]).is_err());
        assert!(parse_kv("no equals sign").is_err());
        assert_eq!(parse_kv("u-nodes = 5").unwrap()["u_nodes"], "5");
    }

    #[test]
    fn hash_tracks_every_parameter_but_jobs() {
        let base = RunConfig::resolve("simulate", DEFAULTS, None, vec![]).unwrap();
        for (k, v) in [("time", "1.5"), ("levels", "5"), ("out", "x.jsonl")] {
            let c = RunConfig::resolve("simulate", DEFAULTS, None, vec![(k, Some(v.into()))]).unwrap();
            assert_ne!(c.hash(), base.hash(), "{k}");
        }
        let j = RunConfig::resolve("simulate", DEFAULTS, None, vec![("jobs", Some("8".into()))]).unwrap();
        assert_eq!(j.hash(), base.hash());
        let other = RunConfig::resolve("kernel", DEFAULTS, None, vec![]).unwrap();
        assert_ne!(other.hash(), base.hash());
        assert_eq!(base.hash().len(), 64);
    }
}
