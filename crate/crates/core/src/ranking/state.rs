use serde::{Deserialize, Serialize};

use super::config::OptimizerConfig;
use super::dag::build_comparison_dag;
use super::estimator::{estimate_gradient, weighted_reference_partial};
use super::feedback::{FeedbackKind, RankFeedback};
use crate::error::{check_dim, Error, Result};
use crate::latent::LatentPoint;
use crate::rng::{normal_vec, stream_rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Stage1,
    Stage2,
    Finished,
}

/// The points shown to the oracle in one round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateSet {
    pub points: Vec<LatentPoint>,
    pub round_index: usize,
    pub stage: Stage,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Where a session starts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SessionStart {
    /// Reference point at the origin, initial candidates drawn with std `mu1`.
    Cold,
    /// Stage-2 refinement around an existing optimum.
    Refine { from: LatentPoint },
    /// Full two-stage run with the reference point placed at an existing optimum.
    Restart { from: LatentPoint },
}

/// Complete optimizer state. Every transition returns a new value; the
/// receiver is never modified.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerState {
    pub config: OptimizerConfig,
    pub stage: Stage,
    /// Reference point.
    pub z_star: LatentPoint,
    /// Running mean of the Stage-1 gradient estimates.
    pub g_bar: Vec<f64>,
    /// Completed Stage-1 gradient updates.
    pub tau: usize,
    /// Completed Stage-2 selections.
    pub stage2_rounds: usize,
    /// Current best point, set once Stage 2 is entered.
    pub z_star_star: Option<LatentPoint>,
    pub candidates: CandidateSet,
    /// Index of the RNG stream that produced the current candidates.
    pub batch: u64,
}

impl OptimizerState {
    /// Fresh session: `z* = 0`, `g_bar = 0`, `tau = 0` and `m` candidates
    /// drawn from N(0, mu1^2 I).
    pub fn init_session(config: OptimizerConfig) -> Result<Self> {
        Self::start(config, &SessionStart::Cold)
    }

    pub fn start(config: OptimizerConfig, start: &SessionStart) -> Result<Self> {
        config.validate()?;
        let d = config.d;
        match start {
            SessionStart::Cold => Ok(Self::stage1_around(config, LatentPoint::zeros(d))),
            SessionStart::Restart { from } => {
                check_dim(d, from.dim())?;
                Ok(Self::stage1_around(config, from.clone()))
            }
            SessionStart::Refine { from } => {
                check_dim(d, from.dim())?;
                let mut state = Self {
                    stage: Stage::Stage2,
                    z_star: from.clone(),
                    g_bar: vec![0.0; d],
                    tau: 0,
                    stage2_rounds: 0,
                    z_star_star: Some(from.clone()),
                    candidates: CandidateSet {
                        points: Vec::new(),
                        round_index: 0,
                        stage: Stage::Stage2,
                    },
                    batch: 0,
                    config,
                };
                state.candidates.points = state.stage2_candidates(from, 0);
                Ok(state)
            }
        }
    }

    fn stage1_around(config: OptimizerConfig, center: LatentPoint) -> Self {
        let mut rng = stream_rng(config.seed, 0);
        let points = (0..config.m)
            .map(|_| {
                let noise = normal_vec(&mut rng, config.d, config.mu1);
                LatentPoint::from_vec_unchecked(
                    center.as_slice().iter().zip(noise).map(|(c, n)| c + n).collect(),
                )
            })
            .collect();
        Self {
            stage: Stage::Stage1,
            g_bar: vec![0.0; config.d],
            tau: 0,
            stage2_rounds: 0,
            z_star_star: None,
            candidates: CandidateSet {
                points,
                round_index: 0,
                stage: Stage::Stage1,
            },
            batch: 0,
            z_star: center,
            config,
        }
    }

    /// Number of feedback rounds applied so far.
    pub fn round(&self) -> usize {
        self.candidates.round_index
    }

    pub fn is_finished(&self) -> bool {
        self.stage == Stage::Finished
    }

    /// The final optimum once the session is finished.
    pub fn result(&self) -> Option<&LatentPoint> {
        match self.stage {
            Stage::Finished => self.z_star_star.as_ref(),
            _ => None,
        }
    }

    /// Feedback kinds accepted in the current stage.
    pub fn allowed_feedback(&self) -> &'static [FeedbackKind] {
        match self.stage {
            Stage::Stage1 => &[FeedbackKind::FullRanking, FeedbackKind::BestOnly],
            Stage::Stage2 => &[FeedbackKind::BestOnly, FeedbackKind::AcceptAndExit],
            Stage::Finished => &[],
        }
    }

    /// Routes feedback to the transition legal for the current stage.
    pub fn apply(&self, feedback: &RankFeedback) -> Result<Self> {
        match (self.stage, feedback.kind) {
            (Stage::Stage1, FeedbackKind::FullRanking) => self.stage1_step(feedback),
            (Stage::Stage1, FeedbackKind::BestOnly) => self.transition_to_stage2(feedback),
            (Stage::Stage2, FeedbackKind::BestOnly | FeedbackKind::AcceptAndExit) => {
                self.stage2_step(feedback)
            }
            (stage, kind) => Err(Error::Protocol(format!("{kind:?} feedback is not accepted in {stage:?}"))),
        }
    }

    /// One gradient round: move the reference point to the rank-weighted
    /// candidate average, fold the new estimate into the running mean and fan
    /// out the next candidates along `-g_bar` with geometrically shrinking steps.
    ///
    /// Once `max_stage1_rounds` updates have been made, a further ranking
    /// moves to Stage 2 with its best candidate instead.
    pub fn stage1_step(&self, feedback: &RankFeedback) -> Result<Self> {
        self.expect_stage(Stage::Stage1)?;
        if feedback.kind != FeedbackKind::FullRanking {
            return Err(Error::Protocol(format!("stage-1 step needs a full ranking, got {:?}", feedback.kind)));
        }
        let points = &self.candidates.points;
        let dag = build_comparison_dag(points.len(), feedback)?;
        if self.tau + 1 > self.config.max_stage1_rounds {
            return self.enter_stage2(feedback.best());
        }

        let cfg = &self.config;
        let z_star = weighted_reference_partial(points, feedback)?;
        let mu = if self.tau == 0 { cfg.mu1 } else { cfg.mu2 };
        let estimate = estimate_gradient(points, &dag, mu)?;
        let tau = self.tau as f64;
        let g_bar: Vec<f64> = self
            .g_bar
            .iter()
            .zip(&estimate)
            .map(|(g, e)| (tau * g + e) / (tau + 1.0))
            .collect();

        let batch = self.batch + 1;
        let mut rng = stream_rng(cfg.seed, batch);
        let next = (0..cfg.m)
            .map(|i| {
                let step = cfg.eta * cfg.gamma.powi(i as i32);
                let noise = normal_vec(&mut rng, cfg.d, cfg.mu2);
                LatentPoint::from_vec_unchecked(
                    z_star
                        .as_slice()
                        .iter()
                        .zip(&g_bar)
                        .zip(noise)
                        .map(|((z, g), n)| z - step * g + n)
                        .collect(),
                )
            })
            .collect();

        Ok(Self {
            config: self.config.clone(),
            stage: Stage::Stage1,
            z_star,
            g_bar,
            tau: self.tau + 1,
            stage2_rounds: 0,
            z_star_star: None,
            candidates: CandidateSet {
                points: next,
                round_index: self.round() + 1,
                stage: Stage::Stage1,
            },
            batch,
        })
    }

    /// Ends Stage 1 with the indicated candidate as the incumbent.
    pub fn transition_to_stage2(&self, feedback: &RankFeedback) -> Result<Self> {
        self.expect_stage(Stage::Stage1)?;
        if feedback.kind != FeedbackKind::BestOnly {
            return Err(Error::Protocol(format!(
                "leaving stage 1 needs a best-only choice, got {:?}",
                feedback.kind
            )));
        }
        feedback.validate(self.candidates.len())?;
        self.enter_stage2(feedback.best())
    }

    fn enter_stage2(&self, best: usize) -> Result<Self> {
        let incumbent = self.candidates.points[best].clone();
        let batch = self.batch + 1;
        let points = self.stage2_candidates(&incumbent, batch);
        Ok(Self {
            config: self.config.clone(),
            stage: Stage::Stage2,
            z_star: self.z_star.clone(),
            g_bar: self.g_bar.clone(),
            tau: self.tau,
            stage2_rounds: 0,
            z_star_star: Some(incumbent),
            candidates: CandidateSet {
                points,
                round_index: self.round() + 1,
                stage: Stage::Stage2,
            },
            batch,
        })
    }

    /// Local refinement: adopt the chosen candidate and resample around it
    /// with std `mu3`, or stop on accept-and-exit. Reaching
    /// `max_stage2_rounds` selections finishes the session.
    pub fn stage2_step(&self, feedback: &RankFeedback) -> Result<Self> {
        self.expect_stage(Stage::Stage2)?;
        if !matches!(feedback.kind, FeedbackKind::BestOnly | FeedbackKind::AcceptAndExit) {
            return Err(Error::Protocol(format!(
                "stage 2 accepts best-only or accept-and-exit, got {:?}",
                feedback.kind
            )));
        }
        feedback.validate(self.candidates.len())?;
        let chosen = self.candidates.points[feedback.best()].clone();
        let stage2_rounds = self.stage2_rounds + 1;
        let done = feedback.kind == FeedbackKind::AcceptAndExit
            || stage2_rounds >= self.config.max_stage2_rounds;
        let mut next = Self {
            config: self.config.clone(),
            stage: Stage::Stage2,
            z_star: self.z_star.clone(),
            g_bar: self.g_bar.clone(),
            tau: self.tau,
            stage2_rounds,
            z_star_star: Some(chosen.clone()),
            candidates: self.candidates.clone(),
            batch: self.batch,
        };
        next.candidates.round_index += 1;
        if done {
            next.stage = Stage::Finished;
            next.candidates.stage = Stage::Finished;
        } else {
            next.batch += 1;
            next.candidates.points = next.stage2_candidates(&chosen, next.batch);
        }
        Ok(next)
    }

    /// Freezes the incumbent without further feedback.
    pub fn finish(&self) -> Result<Self> {
        self.expect_stage(Stage::Stage2)?;
        let mut next = self.clone();
        next.stage = Stage::Finished;
        next.candidates.stage = Stage::Finished;
        Ok(next)
    }

    fn stage2_candidates(&self, incumbent: &LatentPoint, batch: u64) -> Vec<LatentPoint> {
        let cfg = &self.config;
        let mut rng = stream_rng(cfg.seed, batch);
        (0..cfg.m)
            .map(|i| {
                // Always draw, so toggling elitism leaves the other candidates unchanged.
                let noise = normal_vec(&mut rng, cfg.d, cfg.mu3);
                if cfg.elitism && i == 0 {
                    incumbent.clone()
                } else {
                    LatentPoint::from_vec_unchecked(
                        incumbent.as_slice().iter().zip(noise).map(|(z, n)| z + n).collect(),
                    )
                }
            })
            .collect()
    }

    fn expect_stage(&self, stage: Stage) -> Result<()> {
        if self.stage == stage {
            Ok(())
        } else {
            Err(Error::Protocol(format!("operation needs {stage:?}, session is in {:?}", self.stage)))
        }
    }
}
