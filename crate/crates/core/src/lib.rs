//! Trigraphs of the Berge class with small switchable components: recognition,
//! 2-join decomposition, clique/stable-set separators, generalized k-joins and
//! biclique extraction, each with brute-force verifiers.

#![allow(clippy::needless_range_loop)]

pub mod basic;
pub mod berge;
pub mod cliques;
pub mod corpus;
pub mod cs_builder;
pub mod decomposition;
pub mod error;
pub mod format;
pub mod kjoin;
pub mod seh;
pub mod limits;
pub mod separation;
pub mod trigraph;
pub mod vset;

pub use error::{Error, Result};
pub use limits::Limits;
pub use trigraph::{Theta, Trigraph};
pub use vset::VertexSet;
