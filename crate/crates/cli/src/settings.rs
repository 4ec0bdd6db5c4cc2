//! Flat key = value configuration files. Every command-line flag has a
//! config twin under the same name with dashes turned into underscores;
//! flags always win over file values.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use lingua_screen_core::io::read_to_string;
use lingua_screen_core::{Error, Result};

const KNOWN_KEYS: &[&str] = &[
    "annotations",
    "binning",
    "bins",
    "category",
    "classifier",
    "cluster_k",
    "clusters",
    "corpus",
    "docs_per_class",
    "drop_fraction",
    "f_average",
    "folds",
    "forest_max_depth",
    "forest_min_leaf",
    "forest_mtry",
    "forest_trees",
    "lda_alpha",
    "lda_beta",
    "lda_burnin",
    "lda_iters",
    "max_sentences",
    "max_tokens",
    "method",
    "min_sentences",
    "min_tokens",
    "out",
    "paper_mode",
    "parses",
    "pos_column",
    "pos_lexicon",
    "preset",
    "report",
    "seed",
    "sentiment_lexicon",
    "strength",
    "svm_c",
    "svm_max_epochs",
    "svm_tol",
    "target_k",
    "text",
    "threads",
    "topics",
    "topics_k",
    "vector_dim",
    "vectors",
];

#[derive(Debug, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    pub fn load(path: Option<&Path>) -> Result<Settings> {
        let Some(path) = path else {
            return Ok(Settings::default());
        };
        if !path.exists() {
            return Err(Error::Config(format!(
                "config file {} does not exist",
                path.display()
            )));
        }
        let content = read_to_string(path)?;
        let mut values = BTreeMap::new();
        for (idx, line) in content.lines().enumerate() {
            let line_no = idx + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("config line {line_no}: expected key = value"))
            })?;
            let key = key.trim();
            if !KNOWN_KEYS.contains(&key) {
                return Err(Error::Config(format!(
                    "config line {line_no}: unknown key {key:?}"
                )));
            }
            values.insert(key.to_string(), value.trim().to_string());
        }
        Ok(Settings { values })
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Flag value when given, else the config value, else `None`.
    pub fn string(&self, key: &str, flag: Option<&str>) -> Option<String> {
        flag.map(str::to_string)
            .or_else(|| self.raw(key).map(str::to_string))
    }

    pub fn path(&self, key: &str, flag: Option<&Path>) -> Option<PathBuf> {
        flag.map(Path::to_path_buf)
            .or_else(|| self.raw(key).map(PathBuf::from))
    }

    /// Parses the config value for `key` unless the flag already supplied one.
    pub fn parsed<T: FromStr + Copy>(&self, key: &str, flag: Option<T>) -> Result<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.raw(key) {
            None => Ok(None),
            Some(raw) => raw.parse().map(Some).map_err(|_| {
                Error::Config(format!("config key {key}: invalid value {raw:?}"))
            }),
        }
    }

    /// A boolean switch: the flag turns it on; otherwise the config value
    /// `true`/`false` decides, defaulting to off.
    pub fn switch(&self, key: &str, flag: bool) -> Result<bool> {
        if flag {
            return Ok(true);
        }
        match self.raw(key) {
            None => Ok(false),
            Some("true") | Some("1") => Ok(true),
            Some("false") | Some("0") => Ok(false),
            Some(other) => Err(Error::Config(format!(
                "config key {key}: expected true or false, got {other:?}"
            ))),
        }
    }
}

/// Seed precedence: `--seed`, then the config file, then the
/// `LINGUA_SCREEN_SEED` environment variable, then 0.
pub fn resolve_seed(settings: &Settings, flag: Option<u64>) -> Result<u64> {
    if let Some(seed) = settings.parsed("seed", flag)? {
        return Ok(seed);
    }
    match std::env::var("LINGUA_SCREEN_SEED") {
        Ok(raw) => raw.trim().parse().map_err(|_| {
            Error::Config(format!("LINGUA_SCREEN_SEED: invalid seed {raw:?}"))
        }),
        Err(_) => Ok(0),
    }
}
