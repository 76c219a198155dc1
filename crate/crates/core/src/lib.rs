//! Weighted intersection of multiple context-free grammars with finite-state
//! automata, and an Optimality-Theory evaluation pipeline built on it.
//!
//! The crate is `no_std` with `alloc`. Text formats, the command line, and
//! file IO live in the companion `wmcfg` crate.
//!
//! Pipeline for one intersection:
//!
//! 1. [`indexed::decompose`] splits each MCFG rule into per-component CFG rules.
//! 2. [`chart::intersect`] runs weighted Earley over the automaton.
//! 3. [`recovery`] rebuilds a state-decorated MCFG from the chart and keeps
//!    only minimum-weight derivations.
//!
//! [`otp::eval`] chains these steps over a ranking of constraints.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod automaton;
pub mod chart;
pub mod enumerate;
pub mod grammar;
pub mod indexed;
pub mod otp;
pub mod recovery;
pub mod symbol;

pub use automaton::{validate_constraint, ConstraintAutomaton, StateId, Transition, WeightedAutomaton};
pub use chart::{intersect, intersect_with, AgendaOrder, Chart};
pub use grammar::{trim, validate_normal_form, Category, ComponentRef, Mcfg, McfgRule, RuleId, Term, Weight};
pub use indexed::{decompose, IndexedCfg};
pub use symbol::{Mark, Symbol, Word};
