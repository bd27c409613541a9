//! Random directed graphs and exact random-walk quantities.
//!
//! - [`digraph`]: the `D(n, p)` model, edge-list I/O and structural checks.
//! - [`chain`]: the walk's transition operator, stationary distribution,
//!   mixing time, avoidance probabilities, hitting times and contraction.
//! - [`walker`]: seeded cover-time simulation and the return polynomial.
//! - [`degree`]: expected degree counts, the stationary predictor and the
//!   cover-time formula.
//! - [`trees`]: breadth-first trees and the path-weight estimator `Z`.

pub mod chain;
pub mod degree;
pub mod digraph;
pub mod error;
pub mod rng;
pub mod trees;
pub mod walker;

pub use chain::{chain_from, Chain, Dist};
pub use digraph::Digraph;
pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/chains.md")]
    mod chains {}
    #[doc = include_str!("../../../book/src/mixing.md")]
    mod mixing {}
    #[doc = include_str!("../../../book/src/walks.md")]
    mod walks {}
    #[doc = include_str!("../../../book/src/trees.md")]
    mod trees {}
    #[doc = include_str!("../../../book/src/degrees.md")]
    mod degrees {}
}
