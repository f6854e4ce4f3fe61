//! Versioned text format for trained families.
//!
//! ```text
//! #cnf-version 1
//! #algorithm optimized|exhaustive
//! #metric precision|recall|both
//! #threshold_pre 0.01
//! #threshold_rec 0.01
//! #set_sizes 4:6            (exhaustive, when restricted)
//! #power_set_cap 20
//! #relations 237
//! # free-form comment lines
//! rel<TAB>pre<TAB>rec<TAB>neighbor              (optimized)
//! rel<TAB>pre<TAB>rec<TAB>n1,n2,...             (exhaustive)
//! #end <record count>
//! ```
//!
//! Scores are exact `numerator/denominator` pairs. Records are sorted by query
//! relation name, then by canonical set order. Inverse relations carry the
//! `^-1` suffix. The trailer makes truncation detectable.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{
    Algorithm, Cnf, ExhaustiveCnf, MetricMode, OptimizedCnf, ScoredRelation, ScoredSet, SizeRange,
    TrainConfig,
};
use crate::error::{Error, Result};
use crate::kg::{RelationId, Vocab};
use crate::relevance::{MetricKind, RelevanceScore};
use crate::sets::RelationSet;

pub const CNF_VERSION: u32 = 1;

fn io_err(e: std::io::Error) -> Error {
    Error::io("<cnf stream>", e)
}

/// Writes `cnf` with relation names from `vocab`; `comments` become `# ` lines.
pub fn write_cnf<W: Write>(cnf: &Cnf, vocab: &Vocab, comments: &[String], mut w: W) -> Result<()> {
    let cfg = cnf.config();
    let names = vocab.relation_display_names();
    if cnf.num_relation_ids() != names.len() {
        return Err(Error::Config(format!(
            "family covers {} relation ids but the vocabulary has {}",
            cnf.num_relation_ids(),
            names.len()
        )));
    }
    let mut out = String::new();
    out.push_str(&format!("#cnf-version {CNF_VERSION}\n"));
    out.push_str(&format!("#algorithm {}\n", cfg.algorithm));
    out.push_str(&format!("#metric {}\n", cfg.metric));
    out.push_str(&format!("#threshold_pre {}\n", cfg.threshold_pre));
    out.push_str(&format!("#threshold_rec {}\n", cfg.threshold_rec));
    if let Some(range) = cfg.set_sizes {
        out.push_str(&format!("#set_sizes {range}\n"));
    }
    out.push_str(&format!("#power_set_cap {}\n", cfg.power_set_cap));
    out.push_str(&format!("#relations {}\n", vocab.num_relations()));
    for c in comments {
        for line in c.lines() {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
    }

    let mut order: Vec<usize> = (0..names.len()).collect();
    order.sort_by(|&a, &b| names[a].cmp(&names[b]));
    let mut records = 0usize;
    for i in order {
        let r = RelationId(i as u32);
        match cnf {
            Cnf::Optimized(c) => {
                for s in c.entry(r) {
                    out.push_str(&format!(
                        "{}\t{}\t{}\t{}\n",
                        names[i],
                        s.precision,
                        s.recall,
                        names[s.relation.index()]
                    ));
                    records += 1;
                }
            }
            Cnf::Exhaustive(c) => {
                for s in c.family(r) {
                    let mut members: Vec<&str> = s
                        .relations
                        .iter()
                        .map(|x| names[x.index()].as_str())
                        .collect();
                    if let Some(bad) = members.iter().find(|n| n.contains(',')) {
                        return Err(Error::Config(format!(
                            "relation name `{bad}` contains a comma and cannot be written in a set record"
                        )));
                    }
                    members.sort_unstable();
                    out.push_str(&format!(
                        "{}\t{}\t{}\t{}\n",
                        names[i],
                        s.precision,
                        s.recall,
                        members.join(",")
                    ));
                    records += 1;
                }
            }
        }
    }
    out.push_str(&format!("#end {records}\n"));
    w.write_all(out.as_bytes()).map_err(io_err)?;
    w.flush().map_err(io_err)
}

pub fn write_cnf_file(
    cnf: &Cnf,
    vocab: &Vocab,
    comments: &[String],
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_cnf(cnf, vocab, comments, BufWriter::new(file)).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

pub fn read_cnf_file(path: impl AsRef<Path>, vocab: &Vocab) -> Result<Cnf> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_cnf(BufReader::new(file), &path.display().to_string(), vocab)
}

#[derive(Default)]
struct Header {
    algorithm: Option<Algorithm>,
    metric: Option<MetricMode>,
    threshold_pre: Option<f64>,
    threshold_rec: Option<f64>,
    set_sizes: Option<SizeRange>,
    power_set_cap: Option<usize>,
    relations: Option<usize>,
}

enum Families {
    Optimized(Vec<Vec<ScoredRelation>>),
    Exhaustive(Vec<Vec<ScoredSet>>),
}

/// Parses a family written by [`write_cnf`], resolving names through `vocab`.
pub fn read_cnf<R: BufRead>(reader: R, source_name: &str, vocab: &Vocab) -> Result<Cnf> {
    let err = |line: usize, message: String| Error::Decode {
        source_name: source_name.to_owned(),
        line,
        message,
    };

    let mut header = Header::default();
    let mut families: Option<Families> = None;
    let mut records = 0usize;
    let mut trailer: Option<usize> = None;
    let mut last_line = 0;

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        last_line = lineno;
        let line = line.map_err(|e| err(lineno, e.to_string()))?;
        let line = line.strip_suffix('\r').unwrap_or(&line);

        if lineno == 1 {
            match line.strip_prefix("#cnf-version ") {
                Some(v) if v.trim() == CNF_VERSION.to_string() => continue,
                Some(v) => {
                    return Err(err(1, format!("unsupported format version `{}`", v.trim())))
                }
                None => return Err(err(1, "missing `#cnf-version` header".into())),
            }
        }
        if trailer.is_some() {
            if line.trim().is_empty() {
                continue;
            }
            return Err(err(lineno, "content after `#end` trailer".into()));
        }
        if line.is_empty() {
            continue;
        }
        if line == "#" || line.starts_with("# ") {
            continue;
        }
        if let Some(rest) = line.strip_prefix("#end ") {
            let n: usize = rest
                .trim()
                .parse()
                .map_err(|_| err(lineno, format!("bad record count `{rest}`")))?;
            if n != records {
                return Err(err(
                    lineno,
                    format!("trailer announces {n} records, read {records}"),
                ));
            }
            trailer = Some(n);
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if families.is_some() {
                return Err(err(lineno, "header line after records".into()));
            }
            let (key, value) = rest
                .split_once(' ')
                .ok_or_else(|| err(lineno, format!("malformed header `{line}`")))?;
            let value = value.trim();
            let bad = |what: &str| err(lineno, format!("invalid {what} `{value}`"));
            match key {
                "algorithm" => {
                    header.algorithm = Some(value.parse().map_err(|_| bad("algorithm"))?)
                }
                "metric" => header.metric = Some(value.parse().map_err(|_| bad("metric"))?),
                "threshold_pre" => {
                    header.threshold_pre = Some(value.parse().map_err(|_| bad("threshold"))?)
                }
                "threshold_rec" => {
                    header.threshold_rec = Some(value.parse().map_err(|_| bad("threshold"))?)
                }
                "set_sizes" => {
                    header.set_sizes = Some(value.parse().map_err(|_| bad("set size range"))?)
                }
                "power_set_cap" => {
                    header.power_set_cap = Some(value.parse().map_err(|_| bad("cap"))?)
                }
                "relations" => {
                    header.relations = Some(value.parse().map_err(|_| bad("relation count"))?)
                }
                other => return Err(err(lineno, format!("unknown header `{other}`"))),
            }
            continue;
        }

        // Record line.
        if families.is_none() {
            families = Some(start_families(&header, vocab).map_err(|m| err(lineno, m))?);
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(err(
                lineno,
                format!("expected 4 tab-separated fields, found {}", fields.len()),
            ));
        }
        let resolve = |name: &str| {
            vocab
                .relation_id(name)
                .ok_or_else(|| err(lineno, format!("unknown relation `{name}`")))
        };
        let r = resolve(fields[0])?;
        let precision =
            parse_score(fields[1], MetricKind::Precision).map_err(|m| err(lineno, m))?;
        let recall = parse_score(fields[2], MetricKind::Recall).map_err(|m| err(lineno, m))?;
        match families.as_mut().unwrap() {
            Families::Optimized(entries) => {
                let relation = resolve(fields[3])?;
                if relation == r {
                    return Err(err(lineno, "entry contains its own query relation".into()));
                }
                if entries[r.index()].iter().any(|s| s.relation == relation) {
                    return Err(err(lineno, "duplicate entry".into()));
                }
                entries[r.index()].push(ScoredRelation {
                    relation,
                    precision,
                    recall,
                });
            }
            Families::Exhaustive(fams) => {
                let relations: RelationSet = if fields[3].is_empty() {
                    RelationSet::new()
                } else {
                    fields[3]
                        .split(',')
                        .map(resolve)
                        .collect::<Result<Vec<_>>>()?
                        .into_iter()
                        .collect()
                };
                if relations.contains(r) {
                    return Err(err(lineno, "set contains its own query relation".into()));
                }
                if fams[r.index()].iter().any(|s| s.relations == relations) {
                    return Err(err(lineno, "duplicate set".into()));
                }
                fams[r.index()].push(ScoredSet {
                    relations,
                    precision,
                    recall,
                });
            }
        }
        records += 1;
    }

    if trailer.is_none() {
        return Err(err(
            last_line + 1,
            "truncated input: missing `#end` trailer".into(),
        ));
    }
    let families = match families {
        Some(f) => f,
        None => start_families(&header, vocab).map_err(|m| err(last_line, m))?,
    };
    let config = config_from(&header).map_err(|m| err(last_line, m))?;
    Ok(match families {
        Families::Optimized(e) => Cnf::Optimized(OptimizedCnf::from_parts(config, e)),
        Families::Exhaustive(f) => Cnf::Exhaustive(ExhaustiveCnf::from_parts(config, f)),
    })
}

fn start_families(header: &Header, vocab: &Vocab) -> std::result::Result<Families, String> {
    let config = config_from(header)?;
    let n = header.relations.ok_or("missing `#relations` header")?;
    if n != vocab.num_relations() {
        return Err(format!(
            "file was trained over {n} relations, vocabulary has {}",
            vocab.num_relations()
        ));
    }
    Ok(match config.algorithm {
        Algorithm::Optimized => Families::Optimized(vec![Vec::new(); 2 * n]),
        Algorithm::Exhaustive => Families::Exhaustive(vec![Vec::new(); 2 * n]),
    })
}

fn config_from(h: &Header) -> std::result::Result<TrainConfig, String> {
    let cfg = TrainConfig {
        algorithm: h.algorithm.ok_or("missing `#algorithm` header")?,
        metric: h.metric.ok_or("missing `#metric` header")?,
        threshold_pre: h.threshold_pre.ok_or("missing `#threshold_pre` header")?,
        threshold_rec: h.threshold_rec.ok_or("missing `#threshold_rec` header")?,
        set_sizes: h.set_sizes,
        power_set_cap: h.power_set_cap.unwrap_or(super::DEFAULT_POWER_SET_CAP),
    };
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn parse_score(s: &str, kind: MetricKind) -> std::result::Result<RelevanceScore, String> {
    let (n, d) = s
        .split_once('/')
        .ok_or_else(|| format!("score `{s}` is not of the form numerator/denominator"))?;
    let n: u64 = n.parse().map_err(|_| format!("bad numerator in `{s}`"))?;
    let d: u64 = d.parse().map_err(|_| format!("bad denominator in `{s}`"))?;
    if n > d {
        return Err(format!("score `{s}` exceeds 1"));
    }
    Ok(RelevanceScore::new(kind, n, d))
}
