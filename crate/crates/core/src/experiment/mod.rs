//! Config-driven batch runs, transcript audits and interactive play.

pub mod audit;
pub mod config;
pub mod play;
pub mod runner;

pub use config::{ExperimentConfig, GameKind, OUT_DIR_ENV};
pub use audit::{audit_path, audit_text, AuditReport, Check};
pub use play::{play_session, HumanBreaker};
pub use runner::{play_one, run_experiment, RunOutput, SummaryRow};
