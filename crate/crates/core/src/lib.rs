//! Context pooling over knowledge graphs.
//!
//! Triples are loaded into an inverse-augmented [`kg::KnowledgeGraph`]. Each
//! relation is scored against candidate neighborhood sets by exact precision
//! and recall counts ([`relevance`]); the sets passing a threshold form the
//! family trained in [`cnf`]. [`pooling`] uses that family to select, hop by
//! hop, the edges that form a query-specific context graph.

pub mod bench;
pub mod cnf;
pub mod dataset;
pub mod error;
pub mod kg;
pub mod oracle;
pub mod pooling;
pub mod relevance;
pub mod sets;

pub use error::{Error, Result};
pub use kg::{EntityId, KnowledgeGraph, RelationId, Triple, Vocab};
pub use sets::RelationSet;
