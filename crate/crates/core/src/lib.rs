//! Degree-specified weak and strong covers of skew-supermodular set
//! functions by weighted hypergraphs, and their use for hypergraph
//! connectivity augmentation.

pub mod error;
pub mod hypergraph;
pub mod lp;
pub mod oracles;
pub mod qpolytope;
pub mod sets;
pub mod trace;
pub mod cover_basic;
pub mod cover_uniform;
pub mod augmentation;
pub mod verify;
pub mod brute;
pub mod gen;
pub mod cli;
pub mod acceptance;

pub use error::{Certificate, Error, Result};
pub use hypergraph::{MixedHypergraph, WeightedHypergraph};
pub use sets::{Bound, DegreeVector, GroundSet, SetFunction, Subset};
