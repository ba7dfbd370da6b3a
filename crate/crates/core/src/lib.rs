//! Term coding workbench.
//!
//! A term coding instance is a finite system of term equations over a fixed
//! signature. For an alphabet of size `n` every interpretation of the symbols
//! selects a *code*: the set of variable assignments satisfying all
//! equations. This crate computes exact codes, reduces instances to flat
//! (normal form) systems and their dependency graphs, plays the associated
//! guessing games, bounds the code exponent from above with an exact rational
//! polymatroid LP, and searches for large codes from below.
//!
//! The crate is `no_std` (it needs `alloc`). The `parallel` feature pulls in
//! `std` and rayon and splits the heavy enumerations across threads; results
//! never depend on the number of workers.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

mod bits;
mod compile;
mod maskdfs;
mod par;

pub mod casestudies;
pub mod depgraph;
pub mod entropy;
pub mod error;
pub mod guessing;
pub mod interp;
pub mod normalize;
pub mod parse;
pub mod search;
pub mod term;

#[cfg(test)]
mod proptests;

pub use error::{Error, ParseError, ParseErrorKind};
pub use interp::{
    count_solutions, count_solutions_backtrack, evaluate_term, CodeReport, Interpretation,
};
pub use parse::parse_instance;
pub use term::{Elem, Equation, Signature, Symbol, SymbolId, Term, TermInstance};

/// Result alias used throughout the crate.
pub type Result<T, E = Error> = core::result::Result<T, E>;
