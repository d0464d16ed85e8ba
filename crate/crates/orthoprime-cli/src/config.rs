//! Flat `key = value` run configuration. Command-line flags take precedence.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Result};

pub const KEYS: &[&str] = &[
    "seed",
    "lexicon",
    "free_lexicon",
    "out",
    "schemes",
    "params",
    "per_word",
    "word_shift",
    "fixtures",
    "activations",
    "ratings",
    "pixels",
    "bootstrap",
    "sequential",
];

#[derive(Debug, Default)]
pub struct RunConfig {
    table: toml::Table,
    dir: PathBuf,
}

impl RunConfig {
    pub fn parse(text: &str, dir: &Path) -> Result<Self> {
        let table: toml::Table = text.parse().map_err(|e| anyhow!("config: {e}"))?;
        for (k, v) in &table {
            if !KEYS.contains(&k.as_str()) {
                bail!("config: unknown key {k:?} (known: {})", KEYS.join(", "));
            }
            if v.is_table() {
                bail!("config: {k} must be a plain value; sections are not supported");
            }
        }
        Ok(Self { table, dir: dir.to_path_buf() })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| anyhow!("config {}: {e}", path.display()))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    fn typed<T>(&self, key: &str, what: &str, f: impl Fn(&toml::Value) -> Option<T>) -> Result<Option<T>> {
        match self.table.get(key) {
            None => Ok(None),
            Some(v) => f(v).map(Some).ok_or_else(|| anyhow!("config: {key} must be {what}")),
        }
    }

    pub fn u64(&self, key: &str) -> Result<Option<u64>> {
        self.typed(key, "a non-negative integer", |v| v.as_integer().and_then(|i| u64::try_from(i).ok()))
    }

    pub fn bool(&self, key: &str) -> Result<bool> {
        Ok(self.typed(key, "true or false", toml::Value::as_bool)?.unwrap_or(false))
    }

    pub fn string(&self, key: &str) -> Result<Option<String>> {
        self.typed(key, "a string", |v| v.as_str().map(str::to_string))
    }

    /// Paths are relative to the config file's directory.
    pub fn path(&self, key: &str) -> Result<Option<PathBuf>> {
        Ok(self.string(key)?.map(|p| self.dir.join(p)))
    }

    pub fn paths(&self, key: &str) -> Result<Vec<PathBuf>> {
        match self.table.get(key) {
            None => Ok(Vec::new()),
            Some(toml::Value::String(s)) => Ok(vec![self.dir.join(s)]),
            Some(toml::Value::Array(a)) => a
                .iter()
                .map(|v| v.as_str().map(|s| self.dir.join(s)).ok_or_else(|| anyhow!("config: {key} entries must be strings")))
                .collect(),
            Some(_) => bail!("config: {key} must be a path or a list of paths"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn typed_lookup() {
        let c = RunConfig::parse("seed = 4\nlexicon = \"w.txt\"\nactivations = [\"a.oact\", \"b.oact\"]\nfixtures = true\n", Path::new("/cfg")).unwrap();
        assert_eq!(c.u64("seed").unwrap(), Some(4));
        assert_eq!(c.path("lexicon").unwrap(), Some(PathBuf::from("/cfg/w.txt")));
        assert_eq!(c.paths("activations").unwrap().len(), 2);
        assert!(c.bool("fixtures").unwrap());
        assert!(c.u64("lexicon").is_err());
    }

    #[test]
    fn rejects_unknown_keys_and_sections() {
        assert!(RunConfig::parse("sede = 1", Path::new(".")).is_err());
        assert!(RunConfig::parse("[render]\nsize = 3", Path::new(".")).is_err());
        assert!(RunConfig::parse("seed = -1", Path::new(".")).unwrap().u64("seed").is_err());
    }
}
