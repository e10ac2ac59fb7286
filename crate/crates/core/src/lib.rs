//! Spanning-forest matrices of weighted digraphs: forest coefficients,
//! parametric and limiting proximity matrices, accessibility measures,
//! rankings and the corresponding Markov chains.

pub mod accessibility;
pub mod cli;
pub mod digraph;
pub mod edgelist;
pub mod error;
pub mod forest;
pub mod linalg;
pub mod markov;
pub mod oracle;
pub mod output;
pub mod ranking;

pub use digraph::{LaplacianMatrix, SourceKnotInfo, WeightedArc, WeightedDigraph};
pub use error::{Error, Result};
pub use forest::{ForestExpansion, LimitingMatrix, ParametricProximity};

/// Dense real matrix used throughout.
pub type Matrix = nalgebra::DMatrix<f64>;
