//! Benchmark split layout and loading.
//!
//! Each benchmark version lives in two directories of `train.txt`, `valid.txt`
//! and `test.txt`: a base directory (`WN18RR_v1`, `fb237_v1`, `nell_v1`, ...)
//! and an inductive companion with the `_ind` suffix.
//!
//! | setting      | training graph              | testing graph               |
//! |--------------|-----------------------------|-----------------------------|
//! | transductive | base `train.txt`            | base `test.txt`             |
//! | inductive    | all three base files        | all three `_ind` files      |

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::kg::{load_triple_files, GraphStats, KnowledgeGraph};

/// Environment variable naming the directory that holds the split folders.
pub const DATA_ENV: &str = "CONTEXT_POOL_DATA";

pub const SPLIT_FILES: [&str; 3] = ["train.txt", "valid.txt", "test.txt"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Benchmark {
    Wn18rr,
    Fb15k237,
    Nell995,
}

impl Benchmark {
    pub const ALL: [Benchmark; 3] = [Benchmark::Wn18rr, Benchmark::Fb15k237, Benchmark::Nell995];

    pub fn name(self) -> &'static str {
        match self {
            Benchmark::Wn18rr => "WN18RR",
            Benchmark::Fb15k237 => "FB15k-237",
            Benchmark::Nell995 => "NELL-995",
        }
    }

    fn dir_prefix(self) -> &'static str {
        match self {
            Benchmark::Wn18rr => "WN18RR",
            Benchmark::Fb15k237 => "fb237",
            Benchmark::Nell995 => "nell",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Setting {
    Transductive,
    Inductive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SplitId {
    pub benchmark: Benchmark,
    pub setting: Setting,
    pub version: u8,
}

impl SplitId {
    pub fn new(benchmark: Benchmark, setting: Setting, version: u8) -> Self {
        assert!((1..=4).contains(&version), "versions run from 1 to 4");
        SplitId {
            benchmark,
            setting,
            version,
        }
    }

    /// All 24 benchmark splits.
    pub fn all() -> Vec<SplitId> {
        let mut out = Vec::with_capacity(24);
        for b in Benchmark::ALL {
            for s in [Setting::Transductive, Setting::Inductive] {
                for v in 1..=4 {
                    out.push(SplitId::new(b, s, v));
                }
            }
        }
        out
    }

    pub fn base_dir(&self, root: &Path) -> PathBuf {
        root.join(format!("{}_v{}", self.benchmark.dir_prefix(), self.version))
    }

    pub fn inductive_dir(&self, root: &Path) -> PathBuf {
        root.join(format!(
            "{}_v{}_ind",
            self.benchmark.dir_prefix(),
            self.version
        ))
    }

    pub fn train_files(&self, root: &Path) -> Vec<PathBuf> {
        let base = self.base_dir(root);
        match self.setting {
            Setting::Transductive => vec![base.join("train.txt")],
            Setting::Inductive => SPLIT_FILES.iter().map(|f| base.join(f)).collect(),
        }
    }

    pub fn test_files(&self, root: &Path) -> Vec<PathBuf> {
        match self.setting {
            Setting::Transductive => vec![self.base_dir(root).join("test.txt")],
            Setting::Inductive => {
                let ind = self.inductive_dir(root);
                SPLIT_FILES.iter().map(|f| ind.join(f)).collect()
            }
        }
    }
}

impl fmt::Display for SplitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.setting {
            Setting::Transductive => "Trans",
            Setting::Inductive => "Ind",
        };
        write!(f, "{} {}-V{}", self.benchmark.name(), s, self.version)
    }
}

impl FromStr for SplitId {
    type Err = Error;

    /// Parses names like `fb237-ind-v1`, `WN18RR-trans-v2`, `nell_ind_v4`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::Config(format!(
                "unrecognized split `{s}`; expected e.g. fb237-ind-v1"
            ))
        };
        let lower = s.to_ascii_lowercase().replace('_', "-");
        let parts: Vec<&str> = lower.split('-').filter(|p| !p.is_empty()).collect();
        let (bench, rest) = match parts.as_slice() {
            ["fb15k", "237", rest @ ..] => (Benchmark::Fb15k237, rest),
            ["nell", "995", rest @ ..] => (Benchmark::Nell995, rest),
            [b, rest @ ..] => (
                match *b {
                    "wn18rr" => Benchmark::Wn18rr,
                    "fb237" | "fb15k237" => Benchmark::Fb15k237,
                    "nell" | "nell995" => Benchmark::Nell995,
                    _ => return Err(bad()),
                },
                rest,
            ),
            [] => return Err(bad()),
        };
        let (setting, v) = match rest {
            [setting, v] => (*setting, *v),
            _ => return Err(bad()),
        };
        let setting = match setting {
            "trans" | "transductive" => Setting::Transductive,
            "ind" | "inductive" => Setting::Inductive,
            _ => return Err(bad()),
        };
        let version: u8 = v
            .strip_prefix('v')
            .and_then(|v| v.parse().ok())
            .ok_or_else(bad)?;
        if !(1..=4).contains(&version) {
            return Err(bad());
        }
        Ok(SplitId::new(bench, setting, version))
    }
}

/// Raw statistics of the training and testing graphs, each loaded on its own.
pub fn split_stats(root: &Path, id: SplitId) -> Result<(GraphStats, GraphStats)> {
    let stats = |files: Vec<PathBuf>| -> Result<GraphStats> {
        let (triples, vocab) = load_triple_files(&files, None)?;
        Ok(KnowledgeGraph::build(vocab, triples)?.stats())
    };
    Ok((stats(id.train_files(root))?, stats(id.test_files(root))?))
}

/// Training graph, and a testing graph sharing its relation vocabulary.
#[derive(Clone, Debug)]
pub struct LoadedSplit {
    pub id: SplitId,
    pub train: KnowledgeGraph,
    pub test: KnowledgeGraph,
}

/// Loads a split. The testing graph's relations must all occur in training;
/// its entity vocabulary extends the training one.
pub fn load_split(root: &Path, id: SplitId) -> Result<LoadedSplit> {
    let (triples, vocab) = load_triple_files(&id.train_files(root), None)?;
    let train = KnowledgeGraph::build(vocab, triples)?;
    let (triples, vocab) = load_triple_files(&id.test_files(root), Some(train.vocab()))?;
    let test = KnowledgeGraph::build(vocab, triples)?;
    Ok(LoadedSplit { id, train, test })
}

/// Data root from `CONTEXT_POOL_DATA`, falling back to `default`.
pub fn data_root(default: impl Into<PathBuf>) -> PathBuf {
    std::env::var_os(DATA_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| default.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    #[test]
    fn parse_split_names() {
        let id: SplitId = "fb237-ind-v1".parse().unwrap();
        assert_eq!(id, SplitId::new(Benchmark::Fb15k237, Setting::Inductive, 1));
        let id: SplitId = "WN18RR_trans_v2".parse().unwrap();
        assert_eq!(
            id,
            SplitId::new(Benchmark::Wn18rr, Setting::Transductive, 2)
        );
        let id: SplitId = "FB15k-237-Ind-V4".parse().unwrap();
        assert_eq!(id.version, 4);
        assert!("fb237-ind-v5".parse::<SplitId>().is_err());
        assert!("foo".parse::<SplitId>().is_err());
        assert_eq!(SplitId::all().len(), 24);
    }

    #[test]
    fn file_layout() {
        let root = Path::new("/d");
        let id = SplitId::new(Benchmark::Nell995, Setting::Inductive, 3);
        assert_eq!(id.train_files(root)[2], Path::new("/d/nell_v3/test.txt"));
        assert_eq!(
            id.test_files(root)[0],
            Path::new("/d/nell_v3_ind/train.txt")
        );
        let id = SplitId::new(Benchmark::Wn18rr, Setting::Transductive, 1);
        assert_eq!(
            id.train_files(root),
            vec![PathBuf::from("/d/WN18RR_v1/train.txt")]
        );
        assert_eq!(id.to_string(), "WN18RR Trans-V1");
    }

    #[test]
    fn loads_a_miniature_split() {
        let dir = tempfile::tempdir().unwrap();
        let base = dir.path().join("fb237_v1");
        let ind = dir.path().join("fb237_v1_ind");
        fs::create_dir_all(&base).unwrap();
        fs::create_dir_all(&ind).unwrap();
        fs::write(base.join("train.txt"), "a\tr\tb\nb\ts\tc\n").unwrap();
        fs::write(base.join("valid.txt"), "a\ts\tc\n").unwrap();
        fs::write(base.join("test.txt"), "c\tr\ta\n").unwrap();
        fs::write(ind.join("train.txt"), "x\tr\ty\n").unwrap();
        fs::write(ind.join("valid.txt"), "").unwrap();
        fs::write(ind.join("test.txt"), "y\ts\tz\n").unwrap();

        let id = SplitId::new(Benchmark::Fb15k237, Setting::Inductive, 1);
        let (train, test) = split_stats(dir.path(), id).unwrap();
        assert_eq!(
            (train.num_relations, train.num_entities, train.num_triples),
            (2, 3, 4)
        );
        assert_eq!(
            (test.num_relations, test.num_entities, test.num_triples),
            (2, 3, 2)
        );

        let split = load_split(dir.path(), id).unwrap();
        assert_eq!(split.test.vocab().num_relations(), 2);
        assert!(split.test.vocab().entity_id("x").is_some());

        let trans = SplitId::new(Benchmark::Fb15k237, Setting::Transductive, 1);
        let (train, test) = split_stats(dir.path(), trans).unwrap();
        assert_eq!(train.num_triples, 2);
        assert_eq!(test.num_triples, 1);

        let missing = SplitId::new(Benchmark::Wn18rr, Setting::Inductive, 1);
        assert!(matches!(
            split_stats(dir.path(), missing),
            Err(Error::Io { .. })
        ));
    }
}
