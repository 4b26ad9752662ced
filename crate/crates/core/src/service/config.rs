//! `key = value` service configuration with environment overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Duration;

use crate::mapping::MappingConfig;
use crate::pipeline::Sources;
use crate::resources;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: expected `key = value`")]
    Malformed { line: usize },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("bad value for `{key}`: `{value}`")]
    BadValue { key: String, value: String },
}

/// Keys holding a path to a data file, with the built-in default for each.
const PATH_KEYS: [(&str, &str); 6] = [
    ("lexicon", resources::LEXICON),
    ("question_phrases", resources::QUESTION_PHRASES),
    ("grammar.noun_phrase", resources::NOUN_PHRASE_RULES),
    ("grammar.relation", resources::RELATION_RULES),
    ("ontology", resources::ONTOLOGY),
    ("templates", resources::TEMPLATES),
];

const OTHER_KEYS: [&str; 6] = [
    "mapping.threshold",
    "mapping.margin",
    "mapping.max_options",
    "session.ttl_secs",
    "session.capacity",
    "server.static_dir",
];

fn known(key: &str) -> bool {
    PATH_KEYS.iter().any(|(k, _)| *k == key) || OTHER_KEYS.contains(&key)
}

/// Environment variable overriding `key`: `mapping.threshold` is read from
/// `MAPPING_THRESHOLD`.
pub fn env_name(key: &str) -> String {
    key.to_uppercase().replace('.', "_")
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    values: BTreeMap<String, String>,
    /// directory relative paths are resolved against
    base: PathBuf,
}

impl Config {
    pub fn parse(text: &str, base: impl Into<PathBuf>) -> Result<Self, ConfigError> {
        let mut values = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(ConfigError::Malformed { line: i + 1 })?;
            let k = k.trim();
            if !known(k) {
                return Err(ConfigError::UnknownKey(k.to_string()));
            }
            values.insert(k.to_string(), v.trim().to_string());
        }
        Ok(Config { values, base: base.into() })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Config::parse(&text, base)
    }

    /// Loads `path` and applies overrides from the process environment.
    pub fn load_with_env(path: &Path) -> Result<Self, ConfigError> {
        let mut c = Config::load(path)?;
        c.apply_env(|k| std::env::var(k).ok());
        Ok(c)
    }

    /// Overrides every known key for which `lookup(env_name(key))` is set.
    pub fn apply_env(&mut self, lookup: impl Fn(&str) -> Option<String>) {
        let keys = PATH_KEYS.iter().map(|(k, _)| *k).chain(OTHER_KEYS);
        for k in keys {
            if let Some(v) = lookup(&env_name(k)) {
                self.values.insert(k.to_string(), v);
            }
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.get(key).map(|v| self.base.join(v))
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, ConfigError> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| ConfigError::BadValue { key: key.into(), value: v.into() }),
        }
    }

    /// Data file contents, reading configured paths and falling back to the
    /// built-in copies.
    pub fn sources(&self) -> Result<Sources, ConfigError> {
        let mut read = PATH_KEYS.iter().map(|(k, builtin)| match self.path(k) {
            Some(p) => std::fs::read_to_string(&p).map_err(|source| ConfigError::Io { path: p, source }),
            None => Ok(builtin.to_string()),
        });
        let mut next = || read.next().expect("six path keys");
        Ok(Sources {
            lexicon: next()?,
            question_phrases: next()?,
            noun_phrase_rules: next()?,
            relation_rules: next()?,
            ontology: next()?,
            templates: next()?,
        })
    }

    pub fn mapping(&self) -> Result<MappingConfig, ConfigError> {
        let d = MappingConfig::default();
        let m = MappingConfig {
            threshold: self.parsed("mapping.threshold", d.threshold)?,
            margin: self.parsed("mapping.margin", d.margin)?,
            max_options: self.parsed("mapping.max_options", d.max_options)?,
        };
        if !(0.0..=1.0).contains(&m.threshold) {
            return Err(ConfigError::BadValue { key: "mapping.threshold".into(), value: m.threshold.to_string() });
        }
        if m.max_options < 2 {
            return Err(ConfigError::BadValue { key: "mapping.max_options".into(), value: m.max_options.to_string() });
        }
        Ok(m)
    }

    pub fn session_ttl(&self) -> Result<Duration, ConfigError> {
        self.parsed("session.ttl_secs", 600).map(Duration::from_secs)
    }

    pub fn session_capacity(&self) -> Result<usize, ConfigError> {
        self.parsed("session.capacity", 1024)
    }

    pub fn static_dir(&self) -> Option<PathBuf> {
        self.path("server.static_dir")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_config_parses_to_defaults() {
        let c = Config::parse(resources::DEFAULT_CONFIG, ".").unwrap();
        assert_eq!(c.mapping().unwrap(), MappingConfig::default());
        assert_eq!(c.session_ttl().unwrap(), Duration::from_secs(600));
        assert_eq!(c.session_capacity().unwrap(), 1024);
        assert_eq!(c.static_dir(), None);
        assert_eq!(c.sources().unwrap().ontology, resources::ONTOLOGY);
    }

    #[test]
    fn env_overrides_file() {
        let mut c = Config::parse("mapping.threshold = 0.8\n", ".").unwrap();
        c.apply_env(|k| (k == "MAPPING_THRESHOLD").then(|| "0.9".to_string()));
        assert_eq!(c.mapping().unwrap().threshold, 0.9);
        assert_eq!(env_name("grammar.noun_phrase"), "GRAMMAR_NOUN_PHRASE");
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(matches!(Config::parse("nonsense\n", "."), Err(ConfigError::Malformed { line: 1 })));
        assert!(matches!(Config::parse("colour = red\n", "."), Err(ConfigError::UnknownKey(_))));
        let c = Config::parse("mapping.margin = wide\n", ".").unwrap();
        assert!(matches!(c.mapping(), Err(ConfigError::BadValue { .. })));
    }

    #[test]
    fn relative_paths_use_config_dir() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("lex.tsv"), "sinh viên\tNc\n").unwrap();
        std::fs::write(dir.path().join("vnqa.conf"), "lexicon = lex.tsv\n").unwrap();
        let c = Config::load(&dir.path().join("vnqa.conf")).unwrap();
        assert_eq!(c.sources().unwrap().lexicon, "sinh viên\tNc\n");
        let missing = Config::parse("ontology = nope.json\n", dir.path()).unwrap();
        assert!(matches!(missing.sources(), Err(ConfigError::Io { .. })));
    }
}
