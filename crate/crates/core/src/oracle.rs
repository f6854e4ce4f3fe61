//! Reference implementations and synthetic generators for validation.
//!
//! Nothing here touches the graph indexes: neighborhoods are rebuilt by
//! scanning the triple list, and families are enumerated directly from the
//! definition. The synthetic generator draws every relation membership as an
//! independent coin flip, which is the setting in which the product identities
//! checked by [`verify_pairwise_independence`] hold.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cnf::{ScoredSet, TrainConfig};
use crate::error::{Error, Result};
use crate::kg::{EntityId, KnowledgeGraph, RelationId, Triple, Vocab};
use crate::relevance::{rel_both, MetricKind, RelevanceScore};
use crate::sets::RelationSet;

/// Neighborhood of every entity, rebuilt from a linear scan of the triples.
pub fn naive_neighborhoods(g: &KnowledgeGraph) -> Vec<BTreeSet<RelationId>> {
    let mut nr = vec![BTreeSet::new(); g.num_entities()];
    for t in g.triples() {
        nr[t.head.index()].insert(t.relation);
    }
    nr
}

fn naive_scores(
    nrs: &[BTreeSet<RelationId>],
    nr: &RelationSet,
    r: RelationId,
) -> (RelevanceScore, RelevanceScore) {
    let (mut joint, mut support, mut with_r) = (0u64, 0u64, 0u64);
    for ne in nrs {
        let covers = nr.iter().all(|x| ne.contains(&x));
        let has_r = ne.contains(&r);
        if covers {
            support += 1;
        }
        if has_r {
            with_r += 1;
        }
        if covers && has_r {
            joint += 1;
        }
    }
    (
        RelevanceScore::new(MetricKind::Precision, joint, support),
        RelevanceScore::new(MetricKind::Recall, joint, with_r),
    )
}

/// Precision or recall by explicit per-entity subset checks.
pub fn naive_relevance(
    g: &KnowledgeGraph,
    nr: &RelationSet,
    r: RelationId,
    kind: MetricKind,
) -> RelevanceScore {
    let (pre, rec) = naive_scores(&naive_neighborhoods(g), nr, r);
    match kind {
        MetricKind::Precision => pre,
        MetricKind::Recall => rec,
    }
}

/// Largest `|NR_r|` that [`brute_force_cnf`] will enumerate.
pub const BRUTE_FORCE_CAP: usize = 20;

/// Family for `r` by enumerating every subset of `NR_r` realized in some
/// neighborhood that contains `r`.
///
/// Thresholds are applied as given, without range validation, so a negative
/// threshold admits every realized subset with defined scores.
pub fn brute_force_cnf(
    g: &KnowledgeGraph,
    r: RelationId,
    cfg: &TrainConfig,
) -> Result<Vec<ScoredSet>> {
    let nrs = naive_neighborhoods(g);
    let holders: Vec<&BTreeSet<RelationId>> = nrs.iter().filter(|ne| ne.contains(&r)).collect();
    let nr_r: BTreeSet<RelationId> = holders.iter().flat_map(|ne| ne.iter().copied()).collect();
    if nr_r.len() > BRUTE_FORCE_CAP {
        return Err(Error::Capacity(format!(
            "relation {r} has {} neighboring relations, above the brute-force cap of {BRUTE_FORCE_CAP}",
            nr_r.len()
        )));
    }
    let pool: Vec<RelationId> = nr_r.into_iter().filter(|&x| x != r).collect();
    let bits = |ne: &BTreeSet<RelationId>| -> u32 {
        (0..pool.len())
            .filter(|&i| ne.contains(&pool[i]))
            .fold(0, |m, i| m | (1 << i))
    };
    let holder_bits: Vec<u32> = holders.iter().map(|ne| bits(ne)).collect();
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << pool.len()) {
        let size = mask.count_ones() as usize;
        if cfg.set_sizes.is_some_and(|range| !range.contains(size)) {
            continue;
        }
        if !holder_bits.iter().any(|&h| mask & !h == 0) {
            continue;
        }
        let relations: RelationSet = (0..pool.len())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| pool[i])
            .collect();
        let (precision, recall) = naive_scores(&nrs, &relations, r);
        if cfg.admits(&precision, &recall) {
            out.push(ScoredSet {
                relations,
                precision,
                recall,
            });
        }
    }
    out.sort_by(|a, b| a.relations.canonical_cmp(&b.relations));
    Ok(out)
}

/// Shape of a uniformly random small graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RandomGraphSpec {
    pub num_entities: usize,
    pub num_relations: usize,
    pub num_triples: usize,
    pub seed: u64,
}

/// Inverse-augmented graph over `e0..`, `r0..` with uniformly drawn triples.
/// Every entity and relation is in the vocabulary even if it never occurs.
pub fn random_graph(spec: &RandomGraphSpec) -> KnowledgeGraph {
    assert!(spec.num_entities > 0 && spec.num_relations > 0);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut vocab = Vocab::new();
    for i in 0..spec.num_entities {
        vocab.intern_entity(&format!("e{i}"));
    }
    for j in 0..spec.num_relations {
        vocab.intern_relation(&format!("r{j}"));
    }
    let triples = (0..spec.num_triples)
        .map(|_| {
            Triple::new(
                EntityId(rng.gen_range(0..spec.num_entities) as u32),
                RelationId(rng.gen_range(0..spec.num_relations) as u32),
                EntityId(rng.gen_range(0..spec.num_entities) as u32),
            )
        })
        .collect();
    KnowledgeGraph::build(vocab, triples).expect("ids drawn inside the vocabulary")
}

/// Independent relation occurrences over a fixed entity population.
#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticSpec {
    pub num_entities: usize,
    /// Occurrence probability of relation `r{i}` in each neighborhood.
    pub relation_probs: Vec<f64>,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn uniform(num_entities: usize, num_relations: usize, p: f64, seed: u64) -> Self {
        SyntheticSpec {
            num_entities,
            relation_probs: vec![p; num_relations],
            seed,
        }
    }
}

/// A generated graph plus the size of its designated population.
///
/// Population entities are `n0..n{N-1}` with ids `0..N`; every edge leads to
/// its own sink entity, and sinks have empty neighborhoods.
#[derive(Clone, Debug)]
pub struct SyntheticGraph {
    pub graph: KnowledgeGraph,
    pub population: usize,
}

impl SyntheticGraph {
    /// `|{e : r ∈ NR_e}| / N` over the population.
    pub fn occurrence(&self, r: RelationId) -> f64 {
        self.graph.relation_entities(r).len() as f64 / self.population as f64
    }
}

fn synthetic_from_rows(rows: &[Vec<bool>], num_relations: usize) -> SyntheticGraph {
    let mut vocab = Vocab::new();
    for i in 0..rows.len() {
        vocab.intern_entity(&format!("n{i}"));
    }
    for j in 0..num_relations {
        vocab.intern_relation(&format!("r{j}"));
    }
    let mut triples = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        for (j, &present) in row.iter().enumerate() {
            if present {
                let sink = vocab.intern_entity(&format!("s{i}_{j}"));
                triples.push(Triple::new(EntityId(i as u32), RelationId(j as u32), sink));
            }
        }
    }
    SyntheticGraph {
        graph: KnowledgeGraph::build_without_inverses(vocab, triples).expect("ids interned above"),
        population: rows.len(),
    }
}

pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<SyntheticGraph> {
    if spec.num_entities == 0 {
        return Err(Error::Config(
            "synthetic graph needs at least one entity".into(),
        ));
    }
    if let Some(p) = spec
        .relation_probs
        .iter()
        .find(|p| !(0.0..=1.0).contains(*p))
    {
        return Err(Error::Config(format!(
            "occurrence probability {p} outside [0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let rows: Vec<Vec<bool>> = (0..spec.num_entities)
        .map(|_| {
            spec.relation_probs
                .iter()
                .map(|&p| rng.gen_bool(p))
                .collect()
        })
        .collect();
    Ok(synthetic_from_rows(&rows, spec.relation_probs.len()))
}

/// Population where `r1` occurs exactly when `r2` does; `r0` and `r3` are independent.
pub fn correlated_fixture(num_entities: usize, p: f64, seed: u64) -> SyntheticGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<bool>> = (0..num_entities)
        .map(|_| {
            let linked = rng.gen_bool(p);
            vec![rng.gen_bool(p), linked, linked, rng.gen_bool(p)]
        })
        .collect();
    synthetic_from_rows(&rows, 4)
}

/// One checked `(NR', r)` pair.
#[derive(Clone, Debug, PartialEq)]
pub struct TheoremSample {
    pub set: Vec<RelationId>,
    pub target: RelationId,
    /// `Rel^rec(NR', r)`.
    pub lhs_rec: f64,
    /// Product of singleton recalls.
    pub rhs_rec: f64,
    /// `Rel^pre(NR', r) · P(r)^(|NR'|-1)`.
    pub lhs_pre_scaled: f64,
    /// Product of singleton precisions.
    pub rhs_pre: f64,
}

impl TheoremSample {
    pub fn rec_deviation(&self) -> f64 {
        (self.lhs_rec - self.rhs_rec).abs()
    }

    pub fn pre_deviation(&self) -> f64 {
        (self.lhs_pre_scaled - self.rhs_pre).abs()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TheoremReport {
    pub set_size: usize,
    pub samples: Vec<TheoremSample>,
    /// Samples dropped because some score was undefined.
    pub skipped: usize,
}

impl TheoremReport {
    pub fn max_rec_deviation(&self) -> f64 {
        self.samples
            .iter()
            .map(TheoremSample::rec_deviation)
            .fold(0.0, f64::max)
    }

    pub fn max_pre_deviation(&self) -> f64 {
        self.samples
            .iter()
            .map(TheoremSample::pre_deviation)
            .fold(0.0, f64::max)
    }

    pub fn mean_rec_deviation(&self) -> f64 {
        mean(self.samples.iter().map(TheoremSample::rec_deviation))
    }

    pub fn mean_pre_deviation(&self) -> f64 {
        mean(self.samples.iter().map(TheoremSample::pre_deviation))
    }

    pub fn within(&self, tolerance: f64) -> bool {
        !self.samples.is_empty()
            && self.max_rec_deviation() <= tolerance
            && self.max_pre_deviation() <= tolerance
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "set size:            {}", self.set_size);
        let _ = writeln!(s, "samples checked:     {}", self.samples.len());
        let _ = writeln!(s, "samples skipped:     {}", self.skipped);
        let _ = writeln!(
            s,
            "recall deviation:    max {:.6}  mean {:.6}",
            self.max_rec_deviation(),
            self.mean_rec_deviation()
        );
        let _ = writeln!(
            s,
            "precision deviation: max {:.6}  mean {:.6}",
            self.max_pre_deviation(),
            self.mean_pre_deviation()
        );
        s
    }

    pub fn to_tsv(&self, g: &KnowledgeGraph) -> String {
        let mut s = String::from(
            "set\ttarget\tlhs_rec\trhs_rec\tdev_rec\tlhs_pre_scaled\trhs_pre\tdev_pre\n",
        );
        for x in &self.samples {
            let names: Vec<String> = x.set.iter().map(|&r| g.relation_name(r)).collect();
            let _ = writeln!(
                s,
                "{}\t{}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.6}",
                names.join(","),
                g.relation_name(x.target),
                x.lhs_rec,
                x.rhs_rec,
                x.rec_deviation(),
                x.lhs_pre_scaled,
                x.rhs_pre,
                x.pre_deviation()
            );
        }
        s
    }
}

fn mean(it: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = it.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Evaluates both product identities for `set` against `target`.
/// Returns `None` if any score involved is undefined.
pub fn theorem_sample(
    sg: &SyntheticGraph,
    set: &[RelationId],
    target: RelationId,
) -> Option<TheoremSample> {
    let g = &sg.graph;
    let nr: RelationSet = set.iter().copied().collect();
    let (pre, rec) = rel_both(g, &nr, target);
    let (mut rhs_pre, mut rhs_rec) = (1.0, 1.0);
    for &ri in set {
        let (p, r) = rel_both(g, &RelationSet::singleton(ri), target);
        rhs_pre *= p.value()?;
        rhs_rec *= r.value()?;
    }
    let p_r = sg.occurrence(target);
    Some(TheoremSample {
        set: nr.into_vec(),
        target,
        lhs_rec: rec.value()?,
        rhs_rec,
        lhs_pre_scaled: pre.value()? * p_r.powi(set.len() as i32 - 1),
        rhs_pre,
    })
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

const ENUMERATION_LIMIT: f64 = 200_000.0;

/// Distinct `(set, target)` pairs with `|set| = k`, target outside the set.
/// All pairs when there are at most `num_samples` of them, otherwise a seeded
/// sample without replacement.
fn sample_pairs(
    num_relations: usize,
    k: usize,
    num_samples: usize,
    seed: u64,
) -> Vec<(Vec<RelationId>, RelationId)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total = num_relations as f64 * binomial(num_relations - 1, k);
    if total <= ENUMERATION_LIMIT {
        let mut all = Vec::new();
        for target in 0..num_relations {
            let others: Vec<usize> = (0..num_relations).filter(|&x| x != target).collect();
            for c in combinations(others.len(), k) {
                let set = c.iter().map(|&i| RelationId(others[i] as u32)).collect();
                all.push((set, RelationId(target as u32)));
            }
        }
        if all.len() > num_samples {
            all.shuffle(&mut rng);
            all.truncate(num_samples);
        }
        return all;
    }
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(num_samples);
    while out.len() < num_samples {
        let target = rng.gen_range(0..num_relations);
        let mut set: Vec<usize> = rand::seq::index::sample(&mut rng, num_relations - 1, k)
            .into_iter()
            .map(|i| if i >= target { i + 1 } else { i })
            .collect();
        set.sort_unstable();
        if seen.insert((set.clone(), target)) {
            out.push((
                set.into_iter().map(|i| RelationId(i as u32)).collect(),
                RelationId(target as u32),
            ));
        }
    }
    out
}

/// Checks `Rel^rec(NR', r) = ∏ Rel^rec({r_i}, r)` and
/// `Rel^pre(NR', r) · P(r)^(k-1) = ∏ Rel^pre({r_i}, r)` for sets of size `k`.
pub fn verify_product_identities(
    sg: &SyntheticGraph,
    set_size: usize,
    num_samples: usize,
    seed: u64,
) -> Result<TheoremReport> {
    let nrel = sg.graph.num_relations();
    if set_size == 0 || set_size >= nrel {
        return Err(Error::Config(format!(
            "set size {set_size} needs between 1 and {} relations",
            nrel.saturating_sub(1)
        )));
    }
    let pairs = sample_pairs(nrel, set_size, num_samples, seed);
    let results: Vec<Option<TheoremSample>> = pairs
        .par_iter()
        .map(|(set, target)| theorem_sample(sg, set, *target))
        .collect();
    let skipped = results.iter().filter(|s| s.is_none()).count();
    Ok(TheoremReport {
        set_size,
        samples: results.into_iter().flatten().collect(),
        skipped,
    })
}

/// Pairwise identities: `Rel^rec({r1,r2},r) = Rel^rec({r1},r)·Rel^rec({r2},r)`
/// and `Rel^pre({r1,r2},r)·P(r) = Rel^pre({r1},r)·Rel^pre({r2},r)`.
pub fn verify_pairwise_independence(
    sg: &SyntheticGraph,
    num_samples: usize,
    seed: u64,
) -> Result<TheoremReport> {
    if sg.graph.num_relations() < 3 {
        return Err(Error::Config(
            "at least three relations are required".into(),
        ));
    }
    verify_product_identities(sg, 2, num_samples, seed)
}
