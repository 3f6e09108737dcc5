//! kgeval: knowledge-graph based scoring of RAG system outputs.
//!
//! Two text sources are decomposed into atomic (head, relation, tail)
//! facts, turned into an entity-relation graph whose groups are bridged
//! by embedding-similarity edges, and compared with two scorers: a
//! cost-bounded multi-hop reachability score and a community co-membership
//! score over a Louvain partition. A batch harness maps dataset records
//! onto four metric pairings and adds correlation and sensitivity
//! analysis on top.

pub mod config;
pub mod error;
pub mod export;
pub mod graph;
pub mod harness;
pub mod oracle;
pub mod providers;
pub mod scoring;

pub use config::{EvalConfig, GraphParams, ProviderKind};
pub use error::{Error, Result};
