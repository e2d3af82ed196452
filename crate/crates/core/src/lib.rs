//! Pursuit games on graphs: constructibility, exact cops-and-robbers solving,
//! lazy graph families and staged strategies.

pub mod arena;
pub mod bitset;
pub mod constructibility;
pub mod enumerate;
pub mod error;
pub mod families;
pub mod graph;
pub mod oracle;
pub mod runner;
pub mod solver;
pub mod strategies;
pub mod suite;

pub use error::{Error, Result};
pub use graph::{Distance, FiniteGraph, VertexId};
pub use oracle::NeighborOracle;
