//! Batch front end for `axioclust`: ingest a data set, run an algorithm,
//! check the axioms, verify the inequalities, compute validity indices and
//! write one JSON report per invocation.

pub mod args;
pub mod ingest;
pub mod pipeline;
