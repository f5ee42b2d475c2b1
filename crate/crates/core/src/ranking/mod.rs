//! Ranking-oracle latent optimization.
//!
//! A session alternates between showing `m` candidate latents to an oracle
//! and folding its ranking back into the state. Stage 1 turns full rankings
//! into gradient estimates over a comparison graph; Stage 2 refines locally
//! from best-only choices.

mod config;
mod dag;
mod estimator;
mod feedback;
mod scripted;
mod state;
pub mod transcript;

pub use config::OptimizerConfig;
pub use dag::{build_comparison_dag, ComparisonDag};
pub use estimator::{estimate_gradient, rank_weights, weighted_reference};
pub use feedback::{FeedbackKind, RankFeedback};
pub use scripted::{run_scripted, run_scripted_from, LoggedRound, RankingOracle, RoundLog, RunOutcome, StopRule};
pub use state::{CandidateSet, OptimizerState, SessionStart, Stage};
pub use transcript::{replay, RoundRecord};
