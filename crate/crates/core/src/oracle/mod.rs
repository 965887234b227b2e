//! Brute-force ground truth used by tests, audits and the CLI.

pub mod checks;
pub mod minimax;

pub use checks::{
    hamcon_condition_check, hamilton_connected_oracle, perfect_matching_oracle, triangle_factor,
    triangle_invariant_check, verify_tree_copy, HamconReport,
};
pub use minimax::{minimax_solve, SolveResult, Verdict};
