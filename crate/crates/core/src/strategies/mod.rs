//! Cop and robber strategies.

pub mod basic;
pub mod chain;
pub mod gee;
pub mod hgraph;
pub mod trail;

pub use basic::{
    closed_neighbors, FiniteShadow, HasGraph, KEscapeRobber, RandomWalker, ShadowRobber, ShortestPathCop, SolverCop,
    SolverRobber,
};
pub use chain::ChainScriptCop;
pub use gee::{ClimbCop, GeeRobber};
pub use hgraph::{HRobber, HiveClimbCop};
pub use trail::{ConsistentCop, TrailCop};
