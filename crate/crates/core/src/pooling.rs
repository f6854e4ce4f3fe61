//! Query-specific context graphs built by CNF-guided expansion.
//!
//! Expansion follows the node-drop decomposition: [`score_generator`] scores a
//! candidate relation against the relation an entity was reached by,
//! [`node_selector`] keeps the admitted relations, and
//! [`context_pooling_step`] coarsens the graph to the edges carrying them.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::cnf::{Cnf, MetricMode};
use crate::error::{Error, Result};
use crate::kg::{EntityId, KnowledgeGraph, RelationId, Triple};
use crate::relevance::{rel_both, RelevanceScore};
use crate::sets::RelationSet;

/// Entities at the current depth, each with the relation of the edge that admitted it.
pub type Frontier = BTreeSet<(EntityId, RelationId)>;

/// Depth-0 frontier `{(h, inverse(r))}`.
pub fn initial_frontier(g: &KnowledgeGraph, h: EntityId, r: RelationId) -> Frontier {
    BTreeSet::from([(h, g.inverse(r))])
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PoolOptions {
    /// Abort with a capacity error when a single layer would exceed this many edges.
    pub max_layer_edges: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContextGraph {
    pub query: (EntityId, RelationId),
    pub hops: usize,
    /// `layers[l - 1]` holds the edges emitted at hop `l`.
    pub layers: Vec<BTreeSet<Triple>>,
    pub union: BTreeSet<Triple>,
}

impl ContextGraph {
    pub fn num_edges(&self) -> usize {
        self.union.len()
    }

    /// Entities touched by the union, including the query head.
    pub fn entities(&self) -> BTreeSet<EntityId> {
        let mut out = BTreeSet::from([self.query.0]);
        for t in &self.union {
            out.insert(t.head);
            out.insert(t.tail);
        }
        out
    }

    /// Frontier that fed hop `l` (1-based), reconstructed from the previous layer.
    pub fn frontier_before(&self, g: &KnowledgeGraph, l: usize) -> Frontier {
        assert!(
            l >= 1 && l <= self.hops,
            "hop {l} outside 1..={}",
            self.hops
        );
        if l == 1 {
            initial_frontier(g, self.query.0, self.query.1)
        } else {
            next_frontier(&self.layers[l - 2])
        }
    }
}

/// Both metrics of a singleton candidate; the CNF's mode decides which count.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CandidateScore {
    pub precision: RelevanceScore,
    pub recall: RelevanceScore,
}

impl CandidateScore {
    pub fn admits(&self, cnf: &Cnf) -> bool {
        cnf.config().admits(&self.precision, &self.recall)
    }

    /// Score under the given metric mode; for `Both`, the smaller defined value.
    pub fn value(&self, mode: MetricMode) -> Option<f64> {
        match mode {
            MetricMode::Precision => self.precision.value(),
            MetricMode::Recall => self.recall.value(),
            MetricMode::Both => Some(self.precision.value()?.min(self.recall.value()?)),
        }
    }
}

/// `Rel({candidate}, inverse(frontier_relation))` on the CNF's training graph `g`.
pub fn score_generator(
    g: &KnowledgeGraph,
    frontier_relation: RelationId,
    candidate: RelationId,
) -> Result<CandidateScore> {
    for r in [frontier_relation, candidate] {
        if !g.has_relation(r) {
            return Err(Error::UnknownRelation(r.to_string()));
        }
    }
    let (precision, recall) = rel_both(
        g,
        &RelationSet::singleton(candidate),
        g.inverse(frontier_relation),
    );
    Ok(CandidateScore { precision, recall })
}

/// Relations to follow out of `e`, given the relation it was reached by.
pub fn node_selector(
    cnf: &Cnf,
    g: &KnowledgeGraph,
    e: EntityId,
    frontier_relation: RelationId,
) -> Result<RelationSet> {
    if !g.has_relation(frontier_relation) {
        return Err(Error::UnknownRelation(frontier_relation.to_string()));
    }
    cnf.generate(g, e, g.inverse(frontier_relation))
}

fn next_frontier(edges: &BTreeSet<Triple>) -> Frontier {
    edges.iter().map(|t| (t.tail, t.relation)).collect()
}

/// One expansion hop: the emitted edges and the frontier they lead to.
pub fn context_pooling_step(
    g: &KnowledgeGraph,
    frontier: &Frontier,
    cnf: &Cnf,
    opts: &PoolOptions,
) -> Result<(BTreeSet<Triple>, Frontier)> {
    let per_pair: Vec<Vec<Triple>> = frontier
        .par_iter()
        .map(|&(e, via)| {
            let selected = node_selector(cnf, g, e, via)?;
            let mut out = Vec::new();
            for r in selected.iter() {
                out.extend_from_slice(g.edges_with(e, r)?);
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let edges: BTreeSet<Triple> = per_pair.into_iter().flatten().collect();
    if let Some(cap) = opts.max_layer_edges {
        if edges.len() > cap {
            return Err(Error::Capacity(format!(
                "layer would contain {} edges, above the cap of {cap}",
                edges.len()
            )));
        }
    }
    let next = next_frontier(&edges);
    Ok((edges, next))
}

/// Runs `hops` expansion steps from `(h, r, ?)` over `g`.
///
/// `g` supplies neighborhoods and edges; it may differ from the graph the CNF
/// was trained on as long as both share the relation vocabulary. Tail queries
/// `(?, r, t)` are posed as `(t, inverse(r), ?)`.
pub fn build_context_graph(
    g: &KnowledgeGraph,
    cnf: &Cnf,
    h: EntityId,
    r: RelationId,
    hops: usize,
    opts: &PoolOptions,
) -> Result<ContextGraph> {
    if hops == 0 {
        return Err(Error::Config("hop count must be at least 1".into()));
    }
    if !g.has_entity(h) {
        return Err(Error::UnknownEntity(h.to_string()));
    }
    if !g.has_relation(r) {
        return Err(Error::UnknownRelation(r.to_string()));
    }
    if cnf.num_relation_ids() != g.num_relation_ids() {
        return Err(Error::Config(format!(
            "family covers {} relation ids, graph has {}",
            cnf.num_relation_ids(),
            g.num_relation_ids()
        )));
    }
    let mut layers = Vec::with_capacity(hops);
    let mut frontier = initial_frontier(g, h, r);
    for _ in 0..hops {
        if frontier.is_empty() {
            layers.push(BTreeSet::new());
            continue;
        }
        let (edges, next) = context_pooling_step(g, &frontier, cnf, opts)?;
        layers.push(edges);
        frontier = next;
    }
    let union = layers.iter().flatten().copied().collect();
    Ok(ContextGraph {
        query: (h, r),
        hops,
        layers,
        union,
    })
}

/// Writes `hop<TAB>head<TAB>relation<TAB>tail` rows sorted by hop, then names.
pub fn write_context_graph<W: Write>(
    cg: &ContextGraph,
    g: &KnowledgeGraph,
    comments: &[String],
    mut w: W,
) -> Result<()> {
    let mut out = String::new();
    for c in comments {
        for line in c.lines() {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
    }
    out.push_str("hop\thead\trelation\ttail\n");
    for (i, layer) in cg.layers.iter().enumerate() {
        let mut rows: Vec<(String, String, String)> = layer
            .iter()
            .map(|t| {
                (
                    g.entity_name(t.head),
                    g.relation_name(t.relation),
                    g.entity_name(t.tail),
                )
            })
            .collect();
        rows.sort();
        for (h, r, t) in rows {
            out.push_str(&format!("{}\t{h}\t{r}\t{t}\n", i + 1));
        }
    }
    w.write_all(out.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| Error::io("<context graph stream>", e))
}

pub fn export_context_graph(
    cg: &ContextGraph,
    g: &KnowledgeGraph,
    comments: &[String],
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_context_graph(cg, g, comments, std::io::BufWriter::new(file)).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}
