//! Flat `key=value` configuration files.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::{CliError, CliResult};

pub const KNOWN_KEYS: [&str; 10] = [
    "algorithm",
    "direction",
    "hops",
    "max_layer_edges",
    "metric",
    "power_set_cap",
    "set_sizes",
    "threads",
    "threshold_pre",
    "threshold_rec",
];

#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
    source: String,
}

impl ConfigFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| ctxpool::Error::Io {
            path: path.to_owned(),
            source: e,
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Blank lines and lines starting with `#` are skipped.
    pub fn parse(text: &str, source: &str) -> CliResult<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("{source}:{}: expected key=value", i + 1))
            })?;
            let key = key.trim().replace('-', "_");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                let hint = KNOWN_KEYS
                    .iter()
                    .map(|k| (strsim::jaro_winkler(&key, k), *k))
                    .max_by(|a, b| a.0.total_cmp(&b.0))
                    .filter(|(s, _)| *s > 0.7)
                    .map(|(_, k)| format!("; did you mean `{k}`?"))
                    .unwrap_or_default();
                return Err(CliError::Usage(format!(
                    "{source}:{}: unknown key `{key}`{hint}",
                    i + 1
                )));
            }
            if values
                .insert(key.clone(), value.trim().to_owned())
                .is_some()
            {
                return Err(CliError::Usage(format!(
                    "{source}:{}: duplicate key `{key}`",
                    i + 1
                )));
            }
        }
        Ok(ConfigFile {
            values,
            source: source.to_owned(),
        })
    }

    pub fn get<T: FromStr>(&self, key: &str) -> CliResult<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|e| {
                CliError::Usage(format!("{}: bad value for `{key}`: {e}", self.source))
            }),
        }
    }
}

/// The flag value if given, else the config file value.
pub fn pick<T: FromStr>(flag: Option<T>, cfg: &ConfigFile, key: &str) -> CliResult<Option<T>>
where
    T::Err: std::fmt::Display,
{
    match flag {
        Some(v) => Ok(Some(v)),
        None => cfg.get(key),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_rejects() {
        let c = ConfigFile::parse("# c\nhops = 3\nthreshold-pre=0.5\n", "t").unwrap();
        assert_eq!(c.get::<usize>("hops").unwrap(), Some(3));
        assert_eq!(c.get::<f64>("threshold_pre").unwrap(), Some(0.5));
        assert_eq!(c.get::<f64>("threshold_rec").unwrap(), None);
        assert_eq!(pick(Some(1usize), &c, "hops").unwrap(), Some(1));

        let e = ConfigFile::parse("hopz=2\n", "t").unwrap_err().to_string();
        assert!(e.contains("did you mean `hops`"), "{e}");
        assert!(ConfigFile::parse("hops\n", "t").is_err());
        assert!(ConfigFile::parse("hops=1\nhops=2\n", "t").is_err());
        let c = ConfigFile::parse("hops=x\n", "t").unwrap();
        assert!(c.get::<usize>("hops").is_err());
    }
}
