//! Finite lattices: structural analysis, one-atom extension constructions,
//! witness generators and a quasi-identity evaluator.

pub mod analysis;
pub mod enumerate;
pub mod extend;
pub mod generators;
pub mod geometry;
pub mod lattice;
pub mod qid;

pub use analysis::{Property, PropertyReport};
pub use lattice::{EmbeddingMap, FiniteLattice, LatticeError, Preserved};
