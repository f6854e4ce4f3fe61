//! Triple store with inverse augmentation and neighbor-relation indexes.
//!
//! Entities and relations get dense ids in first-appearance order. Forward
//! relations occupy `0..R`, their inverses `R..2R`, so `inverse(r)` is plain
//! arithmetic. Every index keeps its id lists sorted.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};
use crate::sets::RelationSet;

/// Marker appended to a relation name to denote its inverse.
pub const INVERSE_SUFFIX: &str = "^-1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EntityId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelationId(pub u32);

impl EntityId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl RelationId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

impl fmt::Display for RelationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{}", self.0)
    }
}

/// Maps a relation id to its inverse given `num_forward` forward relations.
///
/// Forward ids `0..n` map to `n..2n` and back; the map is an involution.
pub fn inverse_relation(r: RelationId, num_forward: u32) -> RelationId {
    if num_forward == 0 {
        return r;
    }
    RelationId((r.0 + num_forward) % (2 * num_forward))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub head: EntityId,
    pub relation: RelationId,
    pub tail: EntityId,
}

impl Triple {
    pub fn new(head: EntityId, relation: RelationId, tail: EntityId) -> Self {
        Triple {
            head,
            relation,
            tail,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct Interner {
    names: Vec<String>,
    ids: HashMap<String, u32>,
}

impl Interner {
    fn intern(&mut self, name: &str) -> u32 {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        let id = self.names.len() as u32;
        self.names.push(name.to_owned());
        self.ids.insert(name.to_owned(), id);
        id
    }

    fn get(&self, name: &str) -> Option<u32> {
        self.ids.get(name).copied()
    }

    fn len(&self) -> usize {
        self.names.len()
    }
}

/// Bidirectional name/id maps for entities and forward relations.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Vocab {
    entities: Interner,
    relations: Interner,
}

impl Vocab {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_entities(&self) -> usize {
        self.entities.len()
    }

    /// Number of forward relations.
    pub fn num_relations(&self) -> usize {
        self.relations.len()
    }

    pub fn intern_entity(&mut self, name: &str) -> EntityId {
        EntityId(self.entities.intern(name))
    }

    /// Panics if `name` carries the reserved inverse suffix.
    pub fn intern_relation(&mut self, name: &str) -> RelationId {
        assert!(
            !name.ends_with(INVERSE_SUFFIX),
            "relation names may not end in {INVERSE_SUFFIX}"
        );
        RelationId(self.relations.intern(name))
    }

    pub fn entity_id(&self, name: &str) -> Option<EntityId> {
        self.entities.get(name).map(EntityId)
    }

    pub fn entity_name(&self, e: EntityId) -> Option<&str> {
        self.entities.names.get(e.index()).map(String::as_str)
    }

    pub fn entity_names(&self) -> &[String] {
        &self.entities.names
    }

    /// Resolves a relation name; a trailing [`INVERSE_SUFFIX`] selects the inverse.
    pub fn relation_id(&self, name: &str) -> Option<RelationId> {
        let n = self.relations.len() as u32;
        match name.strip_suffix(INVERSE_SUFFIX) {
            Some(base) => self
                .relations
                .get(base)
                .map(|r| inverse_relation(RelationId(r), n)),
            None => self.relations.get(name).map(RelationId),
        }
    }

    /// Display name of a forward or inverse relation id.
    pub fn relation_name(&self, r: RelationId) -> Option<String> {
        let n = self.relations.len();
        if r.index() < n {
            Some(self.relations.names[r.index()].clone())
        } else if r.index() < 2 * n {
            Some(format!(
                "{}{}",
                self.relations.names[r.index() - n],
                INVERSE_SUFFIX
            ))
        } else {
            None
        }
    }

    /// Display names of all `2R` relation ids, indexed by id.
    pub fn relation_display_names(&self) -> Vec<String> {
        (0..2 * self.relations.len() as u32)
            .map(|i| self.relation_name(RelationId(i)).unwrap())
            .collect()
    }
}

/// Incremental reader of tab-separated triple files.
///
/// Created with [`TripleLoader::with_vocab`] the relation vocabulary is frozen:
/// a relation name it does not know violates the inductive contract and is
/// rejected, while new entity names extend the entity vocabulary.
#[derive(Debug, Default)]
pub struct TripleLoader {
    vocab: Vocab,
    fixed_relations: bool,
    seen: HashSet<Triple>,
    triples: Vec<Triple>,
}

impl TripleLoader {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_vocab(vocab: &Vocab) -> Self {
        TripleLoader {
            vocab: vocab.clone(),
            fixed_relations: true,
            ..Self::default()
        }
    }

    pub fn read_file(&mut self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        self.read(BufReader::new(file), &path.display().to_string())
    }

    pub fn read<R: BufRead>(&mut self, reader: R, source_name: &str) -> Result<()> {
        for (idx, line) in reader.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| Error::Parse {
                source_name: source_name.to_owned(),
                line: lineno,
                message: e.to_string(),
            })?;
            self.read_line(&line, source_name, lineno)?;
        }
        Ok(())
    }

    pub fn read_str(&mut self, text: &str, source_name: &str) -> Result<()> {
        self.read(text.as_bytes(), source_name)
    }

    fn read_line(&mut self, line: &str, source_name: &str, lineno: usize) -> Result<()> {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() {
            return Ok(());
        }
        let parse_err = |message: String| Error::Parse {
            source_name: source_name.to_owned(),
            line: lineno,
            message,
        };
        // Tab is the field separator; lines without any tab fall back to
        // whitespace splitting.
        let fields: Vec<&str> = if line.contains('\t') {
            line.split('\t').collect()
        } else {
            line.split_whitespace().collect()
        };
        if fields.len() != 3 {
            return Err(parse_err(format!(
                "expected 3 fields (head, relation, tail), found {}",
                fields.len()
            )));
        }
        if fields.iter().any(|f| f.is_empty()) {
            return Err(parse_err("empty field".to_owned()));
        }
        let (h, r, t) = (fields[0], fields[1], fields[2]);
        if r.ends_with(INVERSE_SUFFIX) {
            return Err(parse_err(format!(
                "relation `{r}` uses the reserved suffix {INVERSE_SUFFIX}"
            )));
        }
        let relation = if self.fixed_relations {
            match self.vocab.relations.get(r) {
                Some(id) => RelationId(id),
                None => {
                    return Err(Error::InductiveContract {
                        source_name: source_name.to_owned(),
                        line: lineno,
                        name: r.to_owned(),
                    })
                }
            }
        } else {
            self.vocab.intern_relation(r)
        };
        let head = self.vocab.intern_entity(h);
        let tail = self.vocab.intern_entity(t);
        let triple = Triple::new(head, relation, tail);
        if self.seen.insert(triple) {
            self.triples.push(triple);
        }
        Ok(())
    }

    pub fn vocab(&self) -> &Vocab {
        &self.vocab
    }

    pub fn finish(self) -> (Vec<Triple>, Vocab) {
        (self.triples, self.vocab)
    }
}

/// Loads one triple file, deduplicating triples.
///
/// With `vocab` supplied the relation vocabulary is reused as-is (testing graph
/// over training relations) and the entity vocabulary is extended.
pub fn load_triples(path: impl AsRef<Path>, vocab: Option<&Vocab>) -> Result<(Vec<Triple>, Vocab)> {
    load_triple_files(&[path], vocab)
}

/// Loads several files into one deduplicated triple list.
pub fn load_triple_files<P: AsRef<Path>>(
    paths: &[P],
    vocab: Option<&Vocab>,
) -> Result<(Vec<Triple>, Vocab)> {
    let mut loader = match vocab {
        Some(v) => TripleLoader::with_vocab(v),
        None => TripleLoader::new(),
    };
    for p in paths {
        loader.read_file(p)?;
    }
    Ok(loader.finish())
}

/// Forward-only counts of a graph.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GraphStats {
    pub num_relations: usize,
    pub num_entities: usize,
    pub num_triples: usize,
}

/// Immutable triple store.
///
/// Stored triples are sorted by `(head, relation, tail)`; per-entity and
/// per-(entity, relation) adjacency are slices of that array.
#[derive(Clone, Debug)]
pub struct KnowledgeGraph {
    vocab: Vocab,
    augmented: bool,
    forward: Vec<Triple>,
    triples: Vec<Triple>,
    edge_offsets: Vec<usize>,
    nr_offsets: Vec<usize>,
    nr_data: Vec<RelationId>,
    relation_entities: Vec<Vec<EntityId>>,
}

impl KnowledgeGraph {
    /// Builds the inverse-augmented graph: every `(h, r, t)` is stored together
    /// with `(t, inverse(r), h)`.
    pub fn build(vocab: Vocab, triples: Vec<Triple>) -> Result<Self> {
        Self::build_inner(vocab, triples, true)
    }

    /// Builds a graph holding the forward triples only.
    ///
    /// Used for metric fixtures and synthetic graphs where incoming edges must
    /// not contribute to neighborhoods.
    pub fn build_without_inverses(vocab: Vocab, triples: Vec<Triple>) -> Result<Self> {
        Self::build_inner(vocab, triples, false)
    }

    fn build_inner(vocab: Vocab, forward: Vec<Triple>, augment: bool) -> Result<Self> {
        let ne = vocab.num_entities();
        let nr = vocab.num_relations();
        for (index, t) in forward.iter().enumerate() {
            for (what, id, size) in [
                ("entity", t.head.0, ne),
                ("relation", t.relation.0, nr),
                ("entity", t.tail.0, ne),
            ] {
                if id as usize >= size {
                    return Err(Error::OutOfVocabulary {
                        index,
                        what,
                        id,
                        size,
                    });
                }
            }
        }

        let mut seen = HashSet::with_capacity(forward.len());
        let forward: Vec<Triple> = forward.into_iter().filter(|t| seen.insert(*t)).collect();

        let mut triples = Vec::with_capacity(forward.len() * if augment { 2 } else { 1 });
        triples.extend_from_slice(&forward);
        if augment {
            let n = nr as u32;
            triples.extend(
                forward
                    .iter()
                    .map(|t| Triple::new(t.tail, inverse_relation(t.relation, n), t.head)),
            );
        }
        triples.sort_unstable();

        let mut edge_offsets = vec![0usize; ne + 1];
        for t in &triples {
            edge_offsets[t.head.index() + 1] += 1;
        }
        for i in 0..ne {
            edge_offsets[i + 1] += edge_offsets[i];
        }

        let mut nr_offsets = Vec::with_capacity(ne + 1);
        let mut nr_data = Vec::new();
        let mut relation_entities = vec![Vec::new(); 2 * nr];
        nr_offsets.push(0);
        for e in 0..ne {
            let mut last = None;
            for t in &triples[edge_offsets[e]..edge_offsets[e + 1]] {
                if last != Some(t.relation) {
                    nr_data.push(t.relation);
                    relation_entities[t.relation.index()].push(EntityId(e as u32));
                    last = Some(t.relation);
                }
            }
            nr_offsets.push(nr_data.len());
        }

        Ok(KnowledgeGraph {
            vocab,
            augmented: augment,
            forward,
            triples,
            edge_offsets,
            nr_offsets,
            nr_data,
            relation_entities,
        })
    }

    pub fn vocab(&self) -> &Vocab {
        &self.vocab
    }

    pub fn is_augmented(&self) -> bool {
        self.augmented
    }

    pub fn num_entities(&self) -> usize {
        self.vocab.num_entities()
    }

    /// Number of forward relations `R`.
    pub fn num_relations(&self) -> usize {
        self.vocab.num_relations()
    }

    /// Size of the relation id space, `2R`.
    pub fn num_relation_ids(&self) -> usize {
        2 * self.vocab.num_relations()
    }

    pub fn entities(&self) -> impl Iterator<Item = EntityId> {
        (0..self.num_entities() as u32).map(EntityId)
    }

    pub fn relation_ids(&self) -> impl Iterator<Item = RelationId> {
        (0..self.num_relation_ids() as u32).map(RelationId)
    }

    /// Deduplicated input triples, in load order.
    pub fn forward_triples(&self) -> &[Triple] {
        &self.forward
    }

    /// Every stored triple (augmented when built with [`KnowledgeGraph::build`]), sorted.
    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn contains_triple(&self, t: &Triple) -> bool {
        self.out_edges(t.head)
            .map(|edges| edges.binary_search(t).is_ok())
            .unwrap_or(false)
    }

    pub fn has_entity(&self, e: EntityId) -> bool {
        e.index() < self.num_entities()
    }

    pub fn has_relation(&self, r: RelationId) -> bool {
        r.index() < self.num_relation_ids()
    }

    pub fn inverse(&self, r: RelationId) -> RelationId {
        inverse_relation(r, self.num_relations() as u32)
    }

    fn check_entity(&self, e: EntityId) -> Result<()> {
        if self.has_entity(e) {
            Ok(())
        } else {
            Err(Error::UnknownEntity(e.to_string()))
        }
    }

    fn check_relation(&self, r: RelationId) -> Result<()> {
        if self.has_relation(r) {
            Ok(())
        } else {
            Err(Error::UnknownRelation(r.to_string()))
        }
    }

    /// Outgoing stored edges of `e`, sorted by `(relation, tail)`.
    pub fn out_edges(&self, e: EntityId) -> Result<&[Triple]> {
        self.check_entity(e)?;
        Ok(&self.triples[self.edge_offsets[e.index()]..self.edge_offsets[e.index() + 1]])
    }

    /// Edges `(e, r, *)`.
    pub fn edges_with(&self, e: EntityId, r: RelationId) -> Result<&[Triple]> {
        let edges = self.out_edges(e)?;
        let lo = edges.partition_point(|t| t.relation < r);
        let hi = edges.partition_point(|t| t.relation <= r);
        Ok(&edges[lo..hi])
    }

    /// Sorted tails of edges `(e, r, *)`.
    pub fn adjacency(&self, e: EntityId, r: RelationId) -> Result<Vec<EntityId>> {
        Ok(self.edges_with(e, r)?.iter().map(|t| t.tail).collect())
    }

    /// `NR_e` as a sorted slice; panics on an out-of-range id.
    pub fn nr_slice(&self, e: EntityId) -> &[RelationId] {
        &self.nr_data[self.nr_offsets[e.index()]..self.nr_offsets[e.index() + 1]]
    }

    /// Relations on the outgoing edges of `e`.
    pub fn neighbor_relations_of_entity(&self, e: EntityId) -> Result<RelationSet> {
        self.check_entity(e)?;
        Ok(RelationSet::from_sorted_unchecked(
            self.nr_slice(e).to_vec(),
        ))
    }

    /// Sorted entities whose neighborhood contains `r`.
    pub fn relation_entities(&self, r: RelationId) -> &[EntityId] {
        self.relation_entities
            .get(r.index())
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Relations sharing some entity neighborhood with `r`, `r` itself included.
    pub fn neighbor_relations_of_relation(&self, r: RelationId) -> Result<RelationSet> {
        self.check_relation(r)?;
        Ok(self
            .relation_entities(r)
            .iter()
            .flat_map(|&e| self.nr_slice(e).iter().copied())
            .collect())
    }

    pub fn stats(&self) -> GraphStats {
        let mut ents = HashSet::new();
        let mut rels = HashSet::new();
        for t in &self.forward {
            ents.insert(t.head);
            ents.insert(t.tail);
            rels.insert(t.relation);
        }
        GraphStats {
            num_relations: rels.len(),
            num_entities: ents.len(),
            num_triples: self.forward.len(),
        }
    }

    pub fn entity_name(&self, e: EntityId) -> String {
        self.vocab
            .entity_name(e)
            .map(str::to_owned)
            .unwrap_or_else(|| e.to_string())
    }

    pub fn relation_name(&self, r: RelationId) -> String {
        self.vocab.relation_name(r).unwrap_or_else(|| r.to_string())
    }
}

/// Parses triples from text and builds an inverse-augmented graph.
pub fn graph_from_str(text: &str) -> Result<KnowledgeGraph> {
    let mut loader = TripleLoader::new();
    loader.read_str(text, "<string>")?;
    let (triples, vocab) = loader.finish();
    KnowledgeGraph::build(vocab, triples)
}

/// Like [`graph_from_str`] but without inverse edges.
pub fn plain_graph_from_str(text: &str) -> Result<KnowledgeGraph> {
    let mut loader = TripleLoader::new();
    loader.read_str(text, "<string>")?;
    let (triples, vocab) = loader.finish();
    KnowledgeGraph::build_without_inverses(vocab, triples)
}
