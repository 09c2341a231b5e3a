//! The user guide, compiled from the book sources in `book/src` so
//! that every example stays runnable: each module below carries one
//! chapter as its documentation, and `cargo test` executes the
//! chapters' code blocks as doc-tests. `mdbook build book` renders the
//! same files as HTML.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/states-and-correlations.md")]
pub mod states_and_correlations {}

#[doc = include_str!("../../../book/src/unsharp-measurements.md")]
pub mod unsharp_measurements {}

#[doc = include_str!("../../../book/src/planning-violations.md")]
pub mod planning_violations {}

#[doc = include_str!("../../../book/src/bound-sequences.md")]
pub mod bound_sequences {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli_reference {}
