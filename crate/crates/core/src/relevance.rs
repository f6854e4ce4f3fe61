//! Neighborhood precision and recall by exact entity counting.
//!
//! For a candidate set `nr` and query relation `r`, both metrics share the
//! numerator `|{e : nr ∪ {r} ⊆ NR_e}|`. Precision divides by
//! `|{e : nr ⊆ NR_e}|`, recall by `|{e : r ∈ NR_e}|`. Counts run over every
//! entity in the vocabulary; an entity with an empty neighborhood only ever
//! contributes to the precision denominator of the empty set.

use std::cmp::Ordering;
use std::fmt;

use crate::kg::{EntityId, KnowledgeGraph, RelationId};
use crate::sets::{multi_intersection_count, RelationSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MetricKind {
    Precision,
    Recall,
}

/// Exact non-negative ratio. A zero denominator is treated as the value 0.
///
/// Equality and ordering compare values, so `2/4 == 1/2`.
#[derive(Clone, Copy, Debug)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub const ZERO: Ratio = Ratio { num: 0, den: 1 };

    pub fn new(num: u64, den: u64) -> Self {
        if den == 0 {
            Ratio::ZERO
        } else {
            Ratio { num, den }
        }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl PartialEq for Ratio {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Ratio {}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// A count ratio for one metric; undefined when the denominator is zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RelevanceScore {
    pub kind: MetricKind,
    pub numerator: u64,
    pub denominator: u64,
}

impl RelevanceScore {
    pub fn new(kind: MetricKind, numerator: u64, denominator: u64) -> Self {
        RelevanceScore {
            kind,
            numerator,
            denominator,
        }
    }

    pub fn is_defined(&self) -> bool {
        self.denominator > 0
    }

    pub fn value(&self) -> Option<f64> {
        self.is_defined()
            .then(|| self.numerator as f64 / self.denominator as f64)
    }

    /// Strict `value > threshold`. Undefined scores never exceed anything.
    pub fn exceeds(&self, threshold: f64) -> bool {
        self.value().is_some_and(|v| v > threshold)
    }
}

impl fmt::Display for RelevanceScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

fn entity_lists(g: &KnowledgeGraph, rels: impl Iterator<Item = RelationId>) -> Vec<&[EntityId]> {
    rels.map(|r| g.relation_entities(r)).collect()
}

/// `|{e : nr ⊆ NR_e}|`.
pub fn support(g: &KnowledgeGraph, nr: &RelationSet) -> u64 {
    if nr.is_empty() {
        return g.num_entities() as u64;
    }
    multi_intersection_count(&mut entity_lists(g, nr.iter())) as u64
}

/// `|{e : nr ∪ {r} ⊆ NR_e}|`.
pub fn joint_support(g: &KnowledgeGraph, nr: &RelationSet, r: RelationId) -> u64 {
    let mut lists = entity_lists(g, nr.iter().filter(|&x| x != r));
    lists.push(g.relation_entities(r));
    multi_intersection_count(&mut lists) as u64
}

pub fn rel_precision(g: &KnowledgeGraph, nr: &RelationSet, r: RelationId) -> RelevanceScore {
    RelevanceScore::new(
        MetricKind::Precision,
        joint_support(g, nr, r),
        support(g, nr),
    )
}

pub fn rel_recall(g: &KnowledgeGraph, nr: &RelationSet, r: RelationId) -> RelevanceScore {
    RelevanceScore::new(
        MetricKind::Recall,
        joint_support(g, nr, r),
        g.relation_entities(r).len() as u64,
    )
}

/// Precision and recall together, counting the shared numerator once.
pub fn rel_both(
    g: &KnowledgeGraph,
    nr: &RelationSet,
    r: RelationId,
) -> (RelevanceScore, RelevanceScore) {
    let joint = joint_support(g, nr, r);
    (
        RelevanceScore::new(MetricKind::Precision, joint, support(g, nr)),
        RelevanceScore::new(
            MetricKind::Recall,
            joint,
            g.relation_entities(r).len() as u64,
        ),
    )
}

pub fn relevance(
    g: &KnowledgeGraph,
    nr: &RelationSet,
    r: RelationId,
    kind: MetricKind,
) -> RelevanceScore {
    match kind {
        MetricKind::Precision => rel_precision(g, nr, r),
        MetricKind::Recall => rel_recall(g, nr, r),
    }
}

/// `|s1 ∩ s2| / |s1 ∪ s2|`, zero when both sets are empty.
pub fn jaccard_similarity(s1: &RelationSet, s2: &RelationSet) -> Ratio {
    let inter = s1.intersection_len(s2) as u64;
    let union = (s1.len() + s2.len()) as u64 - inter;
    Ratio::new(inter, union)
}
