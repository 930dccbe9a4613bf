//! Best-effort synthesis of LTLf goals in fully observable nondeterministic
//! planning domains.
//!
//! The pipeline compiles the goal to a DFA ([`dfa`]), completes the domain
//! with agent/environment error sinks ([`domain`]), builds their product
//! ([`arena`]), solves an adversarial and a cooperative reachability game on
//! it ([`game`]) and combines the two positional strategies
//! ([`best_effort`]). [`runtime`] executes the result against environment
//! policies and [`bench`] holds the scalable benchmark family.

pub mod arena;
pub mod bench;
pub mod best_effort;
pub mod budget;
pub mod dfa;
pub mod domain;
pub mod game;
pub mod ltlf;
pub mod random;
pub mod runtime;

pub use budget::{Budget, ResourceError};
pub use ltlf::{parse, Assignment, FiniteTrace, FluentSet, Formula};
