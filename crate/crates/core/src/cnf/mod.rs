//! Context neighbor families.
//!
//! Training turns a graph into a per-relation structure of admissible context
//! neighbors; generation intersects it with a concrete entity's neighborhood.
//!
//! * [`ExhaustiveCnf`] keeps, for each query relation `r`, every relation set
//!   drawn from an observed neighborhood containing `r` (minus `r` itself)
//!   whose precision/recall pass the configured thresholds. Generation picks
//!   the family member most Jaccard-similar to the head's neighborhood.
//! * [`OptimizedCnf`] keeps only qualifying single relations and generates by
//!   plain intersection.

mod format;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kg::{EntityId, KnowledgeGraph, RelationId};
use crate::relevance::{jaccard_similarity, rel_both, Ratio, RelevanceScore};
use crate::sets::RelationSet;

pub use format::{read_cnf, read_cnf_file, write_cnf, write_cnf_file, CNF_VERSION};

/// Default cap on `|NR_e − {r}|` for unrestricted power-set enumeration.
pub const DEFAULT_POWER_SET_CAP: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MetricMode {
    Precision,
    Recall,
    /// Both thresholds must pass.
    Both,
}

impl MetricMode {
    pub fn as_str(self) -> &'static str {
        match self {
            MetricMode::Precision => "precision",
            MetricMode::Recall => "recall",
            MetricMode::Both => "both",
        }
    }
}

impl fmt::Display for MetricMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MetricMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "precision" | "precision-only" => Ok(MetricMode::Precision),
            "recall" | "recall-only" => Ok(MetricMode::Recall),
            "both" => Ok(MetricMode::Both),
            other => Err(Error::Config(format!(
                "unknown metric mode `{other}` (expected precision, recall or both)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Exhaustive,
    Optimized,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Exhaustive => "exhaustive",
            Algorithm::Optimized => "optimized",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exhaustive" => Ok(Algorithm::Exhaustive),
            "optimized" => Ok(Algorithm::Optimized),
            other => Err(Error::Config(format!(
                "unknown algorithm `{other}` (expected exhaustive or optimized)"
            ))),
        }
    }
}

/// Half-open range `[lo, hi)` of candidate set sizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SizeRange {
    pub lo: usize,
    pub hi: usize,
}

impl SizeRange {
    pub fn new(lo: usize, hi: usize) -> Self {
        SizeRange { lo, hi }
    }

    pub fn contains(&self, k: usize) -> bool {
        self.lo <= k && k < self.hi
    }
}

impl fmt::Display for SizeRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.lo, self.hi)
    }
}

impl FromStr for SizeRange {
    type Err = Error;

    /// Parses `lo:hi`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("set size range `{s}` is not of the form lo:hi"));
        let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
        let lo = lo.trim().parse().map_err(|_| bad())?;
        let hi = hi.trim().parse().map_err(|_| bad())?;
        Ok(SizeRange { lo, hi })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub metric: MetricMode,
    pub threshold_pre: f64,
    pub threshold_rec: f64,
    /// Exhaustive only. `None` enumerates every subset size, the empty set included.
    pub set_sizes: Option<SizeRange>,
    pub algorithm: Algorithm,
    pub power_set_cap: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            metric: MetricMode::Both,
            threshold_pre: 1e-2,
            threshold_rec: 1e-2,
            set_sizes: None,
            algorithm: Algorithm::Optimized,
            power_set_cap: DEFAULT_POWER_SET_CAP,
        }
    }
}

impl TrainConfig {
    pub fn optimized(metric: MetricMode, threshold_pre: f64, threshold_rec: f64) -> Self {
        TrainConfig {
            metric,
            threshold_pre,
            threshold_rec,
            algorithm: Algorithm::Optimized,
            ..Default::default()
        }
    }

    pub fn exhaustive(
        metric: MetricMode,
        threshold_pre: f64,
        threshold_rec: f64,
        set_sizes: Option<SizeRange>,
    ) -> Self {
        TrainConfig {
            metric,
            threshold_pre,
            threshold_rec,
            set_sizes,
            algorithm: Algorithm::Exhaustive,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, t) in [
            ("threshold_pre", self.threshold_pre),
            ("threshold_rec", self.threshold_rec),
        ] {
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::Config(format!(
                    "{name} must lie strictly between 0 and 1, got {t}"
                )));
            }
        }
        if let Some(range) = self.set_sizes {
            if self.algorithm != Algorithm::Exhaustive {
                return Err(Error::Config(
                    "set size range only applies to the exhaustive algorithm".into(),
                ));
            }
            if range.lo >= range.hi {
                return Err(Error::Config(format!("empty set size range {range}")));
            }
        }
        Ok(())
    }

    /// Whether a candidate with these scores passes every active threshold.
    pub fn admits(&self, precision: &RelevanceScore, recall: &RelevanceScore) -> bool {
        match self.metric {
            MetricMode::Precision => precision.exceeds(self.threshold_pre),
            MetricMode::Recall => recall.exceeds(self.threshold_rec),
            MetricMode::Both => {
                precision.exceeds(self.threshold_pre) && recall.exceeds(self.threshold_rec)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScoredSet {
    pub relations: RelationSet,
    pub precision: RelevanceScore,
    pub recall: RelevanceScore,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScoredRelation {
    pub relation: RelationId,
    pub precision: RelevanceScore,
    pub recall: RelevanceScore,
}

/// Distinct non-empty entity neighborhoods, and for each relation the
/// neighborhoods containing it.
struct NeighborhoodProfile {
    neighborhoods: Vec<RelationSet>,
    by_relation: Vec<Vec<usize>>,
}

impl NeighborhoodProfile {
    fn new(g: &KnowledgeGraph) -> Self {
        let distinct: HashSet<&[RelationId]> = g
            .entities()
            .map(|e| g.nr_slice(e))
            .filter(|nr| !nr.is_empty())
            .collect();
        let mut keys: Vec<&[RelationId]> = distinct.into_iter().collect();
        keys.sort_unstable();
        let neighborhoods: Vec<RelationSet> = keys
            .into_iter()
            .map(|k| RelationSet::from_sorted_unchecked(k.to_vec()))
            .collect();
        let mut by_relation = vec![Vec::new(); g.num_relation_ids()];
        for (i, n) in neighborhoods.iter().enumerate() {
            for r in n.iter() {
                by_relation[r.index()].push(i);
            }
        }
        NeighborhoodProfile {
            neighborhoods,
            by_relation,
        }
    }

    fn containing(&self, r: RelationId) -> impl Iterator<Item = &RelationSet> {
        self.by_relation[r.index()]
            .iter()
            .map(move |&i| &self.neighborhoods[i])
    }
}

/// Calls `f` with every subset of `items` whose size lies in `sizes`.
fn for_each_subset(items: &[RelationId], sizes: SizeRange, mut f: impl FnMut(&[RelationId])) {
    let max = sizes.hi.saturating_sub(1).min(items.len());
    let mut buf = Vec::with_capacity(max);
    for k in sizes.lo..=max {
        if k > items.len() {
            break;
        }
        combinations(items, k, 0, &mut buf, &mut f);
    }
}

fn combinations(
    items: &[RelationId],
    k: usize,
    start: usize,
    buf: &mut Vec<RelationId>,
    f: &mut impl FnMut(&[RelationId]),
) {
    if buf.len() == k {
        f(buf);
        return;
    }
    let need = k - buf.len();
    for i in start..=items.len() - need {
        buf.push(items[i]);
        combinations(items, k, i + 1, buf, f);
        buf.pop();
    }
}

/// Families of relation sets per query relation.
#[derive(Clone, Debug, PartialEq)]
pub struct ExhaustiveCnf {
    config: TrainConfig,
    families: Vec<Vec<ScoredSet>>,
}

impl ExhaustiveCnf {
    pub(crate) fn from_parts(config: TrainConfig, mut families: Vec<Vec<ScoredSet>>) -> Self {
        for f in &mut families {
            f.sort_by(|a, b| a.relations.canonical_cmp(&b.relations));
        }
        ExhaustiveCnf { config, families }
    }

    pub fn config(&self) -> &TrainConfig {
        &self.config
    }

    /// Number of relation ids covered (`2R` of the training graph).
    pub fn num_relation_ids(&self) -> usize {
        self.families.len()
    }

    /// `CNF(r)` in canonical order; empty for relations unseen in training.
    pub fn family(&self, r: RelationId) -> &[ScoredSet] {
        self.families
            .get(r.index())
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Winning family member and its overlap with `NR_h`.
    ///
    /// Members are visited in canonical order (larger first, then by id) and
    /// only a strict Jaccard improvement replaces the incumbent, so ties go to
    /// the larger, lexicographically smaller set.
    pub fn best_match(
        &self,
        g: &KnowledgeGraph,
        h: EntityId,
        r: RelationId,
    ) -> Result<Option<(&ScoredSet, RelationSet)>> {
        let nr_h = g.neighbor_relations_of_entity(h)?;
        let mut best: Option<&ScoredSet> = None;
        let mut max_sim = Ratio::ZERO;
        for member in self.family(r) {
            let sim = jaccard_similarity(&member.relations, &nr_h);
            if sim > max_sim {
                max_sim = sim;
                best = Some(member);
            }
        }
        Ok(best.map(|m| (m, m.relations.intersection(&nr_h))))
    }

    pub fn generate(&self, g: &KnowledgeGraph, h: EntityId, r: RelationId) -> Result<RelationSet> {
        Ok(self
            .best_match(g, h, r)?
            .map(|(_, sel)| sel)
            .unwrap_or_default())
    }
}

/// Qualifying single relations per query relation.
#[derive(Clone, Debug, PartialEq)]
pub struct OptimizedCnf {
    config: TrainConfig,
    entries: Vec<Vec<ScoredRelation>>,
}

impl OptimizedCnf {
    pub(crate) fn from_parts(config: TrainConfig, mut entries: Vec<Vec<ScoredRelation>>) -> Self {
        for e in &mut entries {
            e.sort_by_key(|s| s.relation);
        }
        OptimizedCnf { config, entries }
    }

    pub fn config(&self) -> &TrainConfig {
        &self.config
    }

    pub fn num_relation_ids(&self) -> usize {
        self.entries.len()
    }

    /// `CNF′[r]` sorted by relation id; empty for relations unseen in training.
    pub fn entry(&self, r: RelationId) -> &[ScoredRelation] {
        self.entries
            .get(r.index())
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn entry_set(&self, r: RelationId) -> RelationSet {
        RelationSet::from_sorted_unchecked(self.entry(r).iter().map(|s| s.relation).collect())
    }

    /// `NR_h ∩ CNF′[r]`.
    pub fn generate(&self, g: &KnowledgeGraph, h: EntityId, r: RelationId) -> Result<RelationSet> {
        let nr_h = g.neighbor_relations_of_entity(h)?;
        Ok(nr_h.intersection(&self.entry_set(r)))
    }
}

/// A trained family of either kind.
#[derive(Clone, Debug, PartialEq)]
pub enum Cnf {
    Exhaustive(ExhaustiveCnf),
    Optimized(OptimizedCnf),
}

impl Cnf {
    pub fn train(g: &KnowledgeGraph, cfg: &TrainConfig) -> Result<Cnf> {
        match cfg.algorithm {
            Algorithm::Exhaustive => cnf_train_exhaustive(g, cfg).map(Cnf::Exhaustive),
            Algorithm::Optimized => cnf_train_optimized(g, cfg).map(Cnf::Optimized),
        }
    }

    pub fn config(&self) -> &TrainConfig {
        match self {
            Cnf::Exhaustive(c) => c.config(),
            Cnf::Optimized(c) => c.config(),
        }
    }

    pub fn num_relation_ids(&self) -> usize {
        match self {
            Cnf::Exhaustive(c) => c.num_relation_ids(),
            Cnf::Optimized(c) => c.num_relation_ids(),
        }
    }

    /// `NR_max` for the query `(h, r, ?)`, with `NR_h` taken from `g`.
    pub fn generate(&self, g: &KnowledgeGraph, h: EntityId, r: RelationId) -> Result<RelationSet> {
        match self {
            Cnf::Exhaustive(c) => c.generate(g, h, r),
            Cnf::Optimized(c) => c.generate(g, h, r),
        }
    }

    /// Number of stored members (sets or single relations) for `r`.
    pub fn family_size(&self, r: RelationId) -> usize {
        match self {
            Cnf::Exhaustive(c) => c.family(r).len(),
            Cnf::Optimized(c) => c.entry(r).len(),
        }
    }
}

fn check_algorithm(cfg: &TrainConfig, want: Algorithm) -> Result<()> {
    cfg.validate()?;
    if cfg.algorithm != want {
        return Err(Error::Config(format!(
            "configuration selects the {} algorithm, {} training requested",
            cfg.algorithm, want
        )));
    }
    Ok(())
}

/// Exhaustive training: scores every subset of every observed neighborhood.
pub fn cnf_train_exhaustive(g: &KnowledgeGraph, cfg: &TrainConfig) -> Result<ExhaustiveCnf> {
    check_algorithm(cfg, Algorithm::Exhaustive)?;
    let profile = NeighborhoodProfile::new(g);
    let sizes = cfg.set_sizes.unwrap_or(SizeRange::new(0, usize::MAX));

    if cfg.set_sizes.is_none() {
        for r in g.relation_ids() {
            if let Some(n) = profile
                .containing(r)
                .find(|n| n.len() - 1 > cfg.power_set_cap)
            {
                return Err(Error::Capacity(format!(
                    "relation `{}` co-occurs with {} relations in one neighborhood, above the \
                     power-set cap of {}; restrict candidate set sizes",
                    g.relation_name(r),
                    n.len() - 1,
                    cfg.power_set_cap
                )));
            }
        }
    }

    let families = g
        .relation_ids()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|r| exhaustive_family(g, &profile, r, sizes, cfg))
        .collect();
    Ok(ExhaustiveCnf::from_parts(cfg.clone(), families))
}

fn exhaustive_family(
    g: &KnowledgeGraph,
    profile: &NeighborhoodProfile,
    r: RelationId,
    sizes: SizeRange,
    cfg: &TrainConfig,
) -> Vec<ScoredSet> {
    // Each distinct candidate is scored once even if several neighborhoods yield it.
    let mut scored: HashSet<RelationSet> = HashSet::new();
    let mut family = Vec::new();
    for n in profile.containing(r) {
        let rest = n.without(r);
        for_each_subset(rest.as_slice(), sizes, |subset| {
            if scored.contains(subset) {
                return;
            }
            let set = RelationSet::from_sorted_unchecked(subset.to_vec());
            let (precision, recall) = rel_both(g, &set, r);
            if cfg.admits(&precision, &recall) {
                family.push(ScoredSet {
                    relations: set.clone(),
                    precision,
                    recall,
                });
            }
            scored.insert(set);
        });
    }
    family
}

/// Optimized training: scores each co-occurring single relation once.
pub fn cnf_train_optimized(g: &KnowledgeGraph, cfg: &TrainConfig) -> Result<OptimizedCnf> {
    check_algorithm(cfg, Algorithm::Optimized)?;
    let profile = NeighborhoodProfile::new(g);
    let entries = g
        .relation_ids()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|r| {
            // Row r of the pair table: visited[r'] marks (r', r) as already scored.
            let mut visited = vec![false; g.num_relation_ids()];
            visited[r.index()] = true;
            let mut entry = Vec::new();
            for n in profile.containing(r) {
                for r2 in n.iter() {
                    if std::mem::replace(&mut visited[r2.index()], true) {
                        continue;
                    }
                    let (precision, recall) = rel_both(g, &RelationSet::singleton(r2), r);
                    if cfg.admits(&precision, &recall) {
                        entry.push(ScoredRelation {
                            relation: r2,
                            precision,
                            recall,
                        });
                    }
                }
            }
            entry
        })
        .collect();
    Ok(OptimizedCnf::from_parts(cfg.clone(), entries))
}

/// Exhaustive generation (`NR′ ∩ NR_h` for the most similar member).
pub fn cnf_generate_exhaustive(
    g: &KnowledgeGraph,
    cnf: &ExhaustiveCnf,
    h: EntityId,
    r: RelationId,
) -> Result<RelationSet> {
    cnf.generate(g, h, r)
}

/// Optimized generation (`NR_h ∩ CNF′[r]`).
pub fn cnf_generate_optimized(
    g: &KnowledgeGraph,
    cnf: &OptimizedCnf,
    h: EntityId,
    r: RelationId,
) -> Result<RelationSet> {
    cnf.generate(g, h, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kg::{graph_from_str, plain_graph_from_str};

    const TOY: &str = "A\ta\tX1\nA\tb\tX2\nA\tq\tX3\nB\ta\tX4\nB\tb\tX5\nC\ta\tX6\n";

    fn rel(g: &KnowledgeGraph, n: &str) -> RelationId {
        g.vocab().relation_id(n).unwrap()
    }

    fn set(g: &KnowledgeGraph, names: &[&str]) -> RelationSet {
        names.iter().map(|n| rel(g, n)).collect()
    }

    fn members(c: &ExhaustiveCnf, r: RelationId) -> Vec<RelationSet> {
        c.family(r).iter().map(|s| s.relations.clone()).collect()
    }

    fn precision_cfg(t: f64, sizes: Option<SizeRange>) -> TrainConfig {
        TrainConfig::exhaustive(MetricMode::Precision, t, 0.5, sizes)
    }

    #[test]
    fn toy_exhaustive_precision_04() {
        // Precision scores: {a}: 1/3, {b}: 1/2, {a,b}: 1/2.
        let g = plain_graph_from_str(TOY).unwrap();
        let c = cnf_train_exhaustive(&g, &precision_cfg(0.4, Some(SizeRange::new(1, 3)))).unwrap();
        let q = rel(&g, "q");
        assert_eq!(members(&c, q), vec![set(&g, &["a", "b"]), set(&g, &["b"])]);
        for m in c.family(q) {
            assert_eq!((m.precision.numerator, m.precision.denominator), (1, 2));
        }
    }

    #[test]
    fn toy_exhaustive_precision_06_is_empty() {
        let g = plain_graph_from_str(TOY).unwrap();
        let c = cnf_train_exhaustive(&g, &precision_cfg(0.6, None)).unwrap();
        assert!(c.family(rel(&g, "q")).is_empty());
    }

    #[test]
    fn empty_set_is_a_candidate_without_size_range() {
        // P(a) = 3/9 for the empty set under precision.
        let g = plain_graph_from_str(TOY).unwrap();
        let c = cnf_train_exhaustive(&g, &precision_cfg(0.3, None)).unwrap();
        assert!(members(&c, rel(&g, "a")).contains(&RelationSet::new()));
    }

    #[test]
    fn empty_graph_trains_empty() {
        let g = KnowledgeGraph::build(crate::kg::Vocab::new(), vec![]).unwrap();
        let c = cnf_train_exhaustive(&g, &precision_cfg(0.1, None)).unwrap();
        assert_eq!(c.num_relation_ids(), 0);
        let o = cnf_train_optimized(&g, &TrainConfig::default()).unwrap();
        assert_eq!(o.num_relation_ids(), 0);
        assert!(o.entry(RelationId(3)).is_empty());
    }

    #[test]
    fn toy_exhaustive_generate() {
        let g = plain_graph_from_str(TOY).unwrap();
        let c = cnf_train_exhaustive(&g, &precision_cfg(0.4, Some(SizeRange::new(1, 3)))).unwrap();
        let a = g.vocab().entity_id("A").unwrap();
        // Jaccard with NR_A={a,b,q}: {b} → 1/3, {a,b} → 2/3.
        assert_eq!(
            c.generate(&g, a, rel(&g, "q")).unwrap(),
            set(&g, &["a", "b"])
        );
        // X1 has an empty neighborhood: every similarity is 0.
        let x1 = g.vocab().entity_id("X1").unwrap();
        assert!(c.generate(&g, x1, rel(&g, "q")).unwrap().is_empty());
        // CNF(a) = {{b,q},{b},{q}}, all with precision 1; {b,q} is most similar to NR_A.
        assert_eq!(
            c.generate(&g, a, rel(&g, "a")).unwrap(),
            set(&g, &["b", "q"])
        );
        assert!(c.generate(&g, EntityId(999), rel(&g, "q")).is_err());
    }

    #[test]
    fn toy_optimized() {
        let g = plain_graph_from_str(TOY).unwrap();
        let o = cnf_train_optimized(&g, &TrainConfig::optimized(MetricMode::Precision, 0.4, 0.5))
            .unwrap();
        let q = rel(&g, "q");
        let entry = o.entry(q);
        assert_eq!(entry.len(), 1);
        assert_eq!(entry[0].relation, rel(&g, "b"));
        assert_eq!(
            (entry[0].precision.numerator, entry[0].precision.denominator),
            (1, 2)
        );
        let a = g.vocab().entity_id("A").unwrap();
        assert_eq!(o.generate(&g, a, q).unwrap(), set(&g, &["b"]));
        let x1 = g.vocab().entity_id("X1").unwrap();
        assert!(o.generate(&g, x1, q).unwrap().is_empty());
    }

    #[test]
    fn toy_optimized_near_one_threshold() {
        // Singleton precisions for q are 1/3 (a) and 1/2 (b); nothing scores 1.
        let g = plain_graph_from_str(TOY).unwrap();
        let cfg = TrainConfig::optimized(MetricMode::Precision, 1.0 - 1e-9, 0.5);
        let o = cnf_train_optimized(&g, &cfg).unwrap();
        assert!(o.entry(rel(&g, "q")).is_empty());
        // For query a, both b (2/2) and q (1/1) score exactly 1.
        assert_eq!(o.entry_set(rel(&g, "a")), set(&g, &["b", "q"]));
    }

    #[test]
    fn optimized_query_relation_excluded() {
        let g = graph_from_str(TOY).unwrap();
        let o = cnf_train_optimized(&g, &TrainConfig::optimized(MetricMode::Recall, 1e-3, 1e-3))
            .unwrap();
        for r in g.relation_ids() {
            assert!(!o.entry_set(r).contains(r));
        }
    }

    #[test]
    fn capacity_guard_names_relation() {
        let mut text = String::new();
        for i in 0..22 {
            text.push_str(&format!("hub\tr{i}\tt{i}\n"));
        }
        let g = plain_graph_from_str(&text).unwrap();
        let err = cnf_train_exhaustive(&g, &precision_cfg(0.5, None)).unwrap_err();
        match err {
            Error::Capacity(msg) => assert!(msg.contains("`r0`"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
        // A size range lifts the guard.
        assert!(cnf_train_exhaustive(&g, &precision_cfg(0.5, Some(SizeRange::new(1, 2)))).is_ok());
    }

    #[test]
    fn config_validation() {
        let mut cfg = TrainConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.set_sizes = Some(SizeRange::new(1, 3));
        assert!(cfg.validate().is_err());
        let mut cfg = TrainConfig {
            threshold_pre: 1.0,
            ..TrainConfig::default()
        };
        assert!(cfg.validate().is_err());
        cfg.threshold_pre = 0.0;
        assert!(cfg.validate().is_err());
        let cfg = TrainConfig::exhaustive(MetricMode::Both, 0.1, 0.1, Some(SizeRange::new(3, 3)));
        assert!(cfg.validate().is_err());
        let g = plain_graph_from_str(TOY).unwrap();
        assert!(cnf_train_optimized(&g, &precision_cfg(0.5, None)).is_err());
    }

    #[test]
    fn parse_helpers() {
        assert_eq!("4:6".parse::<SizeRange>().unwrap(), SizeRange::new(4, 6));
        assert!("4-6".parse::<SizeRange>().is_err());
        assert_eq!("both".parse::<MetricMode>().unwrap(), MetricMode::Both);
        assert_eq!(
            "optimized".parse::<Algorithm>().unwrap(),
            Algorithm::Optimized
        );
        assert!("fast".parse::<Algorithm>().is_err());
    }

    #[test]
    fn subsets_respect_size_range() {
        let items: Vec<RelationId> = (0..5).map(RelationId).collect();
        let mut n = 0;
        for_each_subset(&items, SizeRange::new(2, 4), |s| {
            assert!(s.len() == 2 || s.len() == 3);
            n += 1;
        });
        assert_eq!(n, 10 + 10);
        let mut all = 0;
        for_each_subset(&items, SizeRange::new(0, usize::MAX), |_| all += 1);
        assert_eq!(all, 32);
    }

    fn fixed_family(g: &KnowledgeGraph, sets: Vec<RelationSet>) -> ExhaustiveCnf {
        let score = RelevanceScore::new(crate::relevance::MetricKind::Precision, 1, 1);
        let family = sets
            .into_iter()
            .map(|s| ScoredSet {
                relations: s,
                precision: score,
                recall: score,
            })
            .collect();
        let mut families = vec![Vec::new(); g.num_relation_ids()];
        families[0] = family;
        ExhaustiveCnf::from_parts(precision_cfg(0.5, None), families)
    }

    #[test]
    fn exhaustive_tie_break_is_lexicographic_within_size() {
        // {x} and {y} both score 1/2 against NR_h = {x,y}.
        let g = plain_graph_from_str("h\tx\tt\nh\ty\tt\n").unwrap();
        let (x, y) = (rel(&g, "x"), rel(&g, "y"));
        let c = fixed_family(
            &g,
            vec![RelationSet::singleton(y), RelationSet::singleton(x)],
        );
        let h = g.vocab().entity_id("h").unwrap();
        assert_eq!(
            c.generate(&g, h, RelationId(0)).unwrap(),
            RelationSet::singleton(x)
        );
    }

    #[test]
    fn exhaustive_tie_break_prefers_larger_set() {
        // Against NR_h = {x,y}: {x} → 1/2 and {x,y,u,v} → 2/4.
        let g = plain_graph_from_str("h\tx\tt\nh\ty\tt\nk\tu\tt\nk\tv\tt\n").unwrap();
        let big = set(&g, &["x", "y", "u", "v"]);
        let c = fixed_family(&g, vec![set(&g, &["x"]), big]);
        let h = g.vocab().entity_id("h").unwrap();
        assert_eq!(
            c.generate(&g, h, RelationId(0)).unwrap(),
            set(&g, &["x", "y"])
        );
    }
}
