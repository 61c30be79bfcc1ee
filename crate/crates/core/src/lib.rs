//! Exact synthesis of XOR-AND graphs with the minimum number of AND gates.
//!
//! The engine decides "is there an abstract XAG with `r` AND steps for `f`?"
//! with an incremental SAT solver, sweeping `r` upward from the degree bound.
//! Optimum networks can then be post-processed to reduce XOR gates, first by
//! a cardinality-constrained search for small linear forms and then by an
//! exact shortest-linear-program search.

pub mod affine5;
pub mod boolfunc;
pub mod encoder;
pub mod error;
pub mod network;
pub mod satcore;
pub mod slp;
pub mod strategies;

pub use boolfunc::{IndexSet, TruthTable};
pub use encoder::{ConstraintFamily, EncodingOptions, McInstance};
pub use error::{Error, Result};
pub use network::{AbstractXag, AndStep, Gate, GateKind, Xag};
pub use satcore::{Lit, SolveOutcome, SolverSession};
pub use strategies::{
    find_mc_cegar, find_mc_direct, minimize, Optimality, Strategy, SynthesisConfig,
    SynthesisResult, XorMode,
};
