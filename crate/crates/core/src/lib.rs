//! Mutation testing engine for Solidity smart contracts.
//!
//! The pipeline: discover and parse target contracts, run the enabled
//! mutation operators over each file to collect candidate mutations, splice
//! them into standalone mutants, then compile and test every mutant to
//! classify it and compute the mutation score.

pub mod ast;
pub mod engine;
pub mod report;
pub mod runner;
pub mod operators;
pub mod parser;

pub use ast::{Mutation, SourceSpan};
pub use parser::{ParseError, SourceFile};
