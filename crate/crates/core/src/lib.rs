//! Exact tools for partially fixed-size network coding.
//!
//! - [`network`]: the network model, validation, canonical form, JSON and DOT.
//! - [`entropy`]: exact information conditions on uniform-over-support laws.
//! - [`solver`]: complete search for coding schemes at a fixed default size.
//! - [`gadgets`]: checkers and gates as composable network fragments.
//! - [`tiling`]: torus-coloring programs, their brute-force oracle and the
//!   compilation of a program into a network.
//! - [`index_coding`]: partially fixed-size index coding via confusion graphs.

pub mod entropy;
pub mod gadgets;
pub mod index_coding;
pub mod network;
pub mod solver;
pub mod tiling;

pub use entropy::{check, InfoCondition, UniformSupport, Variable};
pub use network::{canonicalize, validate, Network, SizeSpec, ValidationReport};
pub use solver::{solve_at_k, solve_up_to, verify_scheme, CodingScheme, SolveOptions, SolveOutcome};
