use serde::{Deserialize, Serialize};

use super::config::OptimizerConfig;
use super::feedback::RankFeedback;
use super::state::{CandidateSet, OptimizerState, SessionStart, Stage};
use super::transcript::RoundRecord;
use crate::error::Result;
use crate::latent::LatentPoint;

/// Anything that can order candidate sets: a person, or a scripted objective.
pub trait RankingOracle {
    /// Returns the `k` best candidates from best to worst: a full ranking for
    /// `k >= 2`, a best-only choice for `k = 1`.
    fn query(&mut self, candidates: &CandidateSet, k: usize) -> Result<RankFeedback>;

    /// Objective value, when the oracle has one. Only used for logging.
    fn objective(&self, _z: &LatentPoint) -> Option<f64> {
        None
    }
}

impl<O: RankingOracle + ?Sized> RankingOracle for &mut O {
    fn query(&mut self, candidates: &CandidateSet, k: usize) -> Result<RankFeedback> {
        (**self).query(candidates, k)
    }

    fn objective(&self, z: &LatentPoint) -> Option<f64> {
        (**self).objective(z)
    }
}

/// How many rounds a scripted run answers in each stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StopRule {
    pub stage1_rounds: usize,
    pub stage2_rounds: usize,
}

impl StopRule {
    pub fn new(stage1_rounds: usize, stage2_rounds: usize) -> Self {
        Self {
            stage1_rounds,
            stage2_rounds,
        }
    }

    /// Runs each stage up to the configured cap.
    pub fn from_caps(config: &OptimizerConfig) -> Self {
        Self::new(config.max_stage1_rounds, config.max_stage2_rounds)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoggedRound {
    pub record: RoundRecord,
    /// Lowest objective among the round's candidates.
    pub best_f: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RoundLog {
    pub rounds: Vec<LoggedRound>,
}

impl RoundLog {
    pub fn records(&self) -> Vec<RoundRecord> {
        self.rounds.iter().map(|r| r.record.clone()).collect()
    }

    pub fn best_f_per_round(&self) -> Vec<f64> {
        self.rounds.iter().filter_map(|r| r.best_f).collect()
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub result: LatentPoint,
    pub log: RoundLog,
    pub final_state: OptimizerState,
}

impl RunOutcome {
    pub fn into_parts(self) -> (LatentPoint, RoundLog) {
        (self.result, self.log)
    }
}

/// Drives a session from a cold start to completion with a scripted oracle.
///
/// Stage 1 answers `stop.stage1_rounds` full rankings (depth `config.k`),
/// then a best-only query moves to Stage 2, which answers
/// `stop.stage2_rounds` best-only queries before the incumbent is frozen.
/// Configured stage caps still apply and may end a stage earlier.
pub fn run_scripted<O: RankingOracle>(config: OptimizerConfig, oracle: O, stop: StopRule) -> Result<RunOutcome> {
    run_scripted_from(config, &SessionStart::Cold, oracle, stop)
}

pub fn run_scripted_from<O: RankingOracle>(
    config: OptimizerConfig,
    start: &SessionStart,
    mut oracle: O,
    stop: StopRule,
) -> Result<RunOutcome> {
    let depth = config.depth();
    let mut state = OptimizerState::start(config, start)?;
    let mut log = RoundLog::default();
    while !state.is_finished() {
        let k = match state.stage {
            Stage::Stage1 if state.tau < stop.stage1_rounds => depth,
            Stage::Stage1 => 1,
            Stage::Stage2 if state.stage2_rounds < stop.stage2_rounds => 1,
            _ => {
                state = state.finish()?;
                break;
            }
        };
        let feedback = oracle.query(&state.candidates, k)?;
        let best_f = state
            .candidates
            .points
            .iter()
            .filter_map(|p| oracle.objective(p))
            .reduce(f64::min);
        let next = state.apply(&feedback)?;
        log.rounds.push(LoggedRound {
            record: RoundRecord::new(&state, &feedback, &next),
            best_f,
        });
        state = next;
    }
    let result = state
        .z_star_star
        .clone()
        .expect("finished sessions always hold an incumbent");
    Ok(RunOutcome {
        result,
        log,
        final_state: state,
    })
}
