//! Maker-Breaker positional game engine.
//!
//! The crate hosts the `(p:q)` turn loop and transcripts ([`game`],
//! [`transcript`]), potential-based Breaker play ([`potential`]), the box
//! game with resets ([`boxgame`]) and parallel composition of sub-games
//! ([`parallel`]), the matching / Hamiltonicity sub-strategies
//! ([`subgames`]), the biased spanning-tree embedding strategy ([`tree`]),
//! brute-force oracles and Breaker adversaries ([`oracle`], [`adversary`]),
//! and the batch experiment runner and auditor ([`experiment`]).

pub mod adversary;
pub mod board;
pub mod boxgame;
pub mod error;
pub mod experiment;
pub mod game;
pub mod graph;
pub mod hypergraph;
pub mod oracle;
pub mod parallel;
pub mod potential;
pub mod subgames;
pub mod rng;
pub mod transcript;
pub mod tree;

pub use board::{Board, BoardSpec, ElementId};
pub use error::{Error, Result};
pub use game::{run_game, winner_check, Bias, Decision, GameSetup, GameState, GameStatus, Owner, Side, Strategy, WinRule};
pub use hypergraph::Hypergraph;
pub use transcript::{Outcome, Transcript};
