//! Cost-graded hypothesis spaces and best-effort rule induction over ASP.
//!
//! The crate learns rules for a target predicate (typically
//! `valid_move(cell,time)`) from agent traces. Candidate rules are generated
//! by an ASP encoding under hard limits and a fine-grained cost model; a
//! hypothesis is an optimal subset of candidates that reproduces an
//! example's labels, found by an ASP optimization program.

pub mod atom;
pub mod bias;
pub mod canonical;
pub mod cli;
pub mod config;
pub mod cost;
pub mod driver;
pub mod evaluation;
pub mod induction;
pub mod instance;
pub mod rule;
pub mod solver;
pub mod space;
