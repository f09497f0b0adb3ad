//! Path systems in graphs: construction on Paley graphs, consistency,
//! metrizability decided by exact rational feasibility with checkable
//! certificates, and irreducibility by exhaustive reduction search.

pub mod audit;
pub mod error;
pub mod graph;
pub mod metrizability;
pub mod numtheory;
pub mod pathsys;
pub mod reducibility;

pub use error::{Error, Result};

/// Vertex label. Paley graphs use field elements, fixtures use small integers.
pub type Vertex = u32;
