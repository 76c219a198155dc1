//! The Optimality-Theory layer: gestural-score tier tables, the reduplication
//! grammar generator, and Eval over ranked constraints.

pub mod eval;
pub mod redup;
pub mod tier;
