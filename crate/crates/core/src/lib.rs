//! Separation axioms for clustering results, a partition taxonomy, the
//! inequalities the axioms imply, alternating clustering algorithms and
//! validity indices.
//!
//! The guide in `book/` walks through each module; its snippets run as
//! doc-tests of this crate.

pub mod algorithms;
pub mod axiom_lab;
pub mod categorization;
pub mod criteria;
pub mod data;
pub mod error;
pub mod numeric;
pub mod partition;
pub mod validity;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    struct Readme;
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/partitions.md")]
    struct Partitions;
    #[doc = include_str!("../../../book/src/axioms.md")]
    struct Axioms;
    #[doc = include_str!("../../../book/src/inequalities.md")]
    struct Inequalities;
    #[doc = include_str!("../../../book/src/criteria.md")]
    struct Criteria;
    #[doc = include_str!("../../../book/src/algorithms.md")]
    struct Algorithms;
    #[doc = include_str!("../../../book/src/validity.md")]
    struct Validity;
    #[doc = include_str!("../../../book/src/cli.md")]
    struct Cli;
}
