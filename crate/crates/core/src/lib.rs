//! Aggregate real-valued logic over graphs: terms, evaluation, random graph
//! sampling, connective class checks, type machinery and leading-order
//! asymptotic predictions for Erdős–Rényi graphs.

pub mod analysis;
pub mod asym;
pub mod asymptotics;
pub mod connective;
pub mod error;
pub mod eval;
pub mod graph;
pub mod harness;
pub mod random;
pub mod stats;
pub mod term;
pub mod types;

pub use asym::Asym;
pub use connective::{Connective, Registry};
pub use error::{Error, Result};
pub use graph::{ExtensionPair, Graph, RootedGraph};
