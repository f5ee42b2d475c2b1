//! Line-delimited JSON round transcripts and offline replay.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::config::OptimizerConfig;
use super::feedback::RankFeedback;
use super::state::{OptimizerState, SessionStart, Stage};
use crate::error::{Error, Result};
use crate::latent::LatentPoint;

/// One answered round: the candidates shown, the feedback given, and the
/// reference point, gradient memory and update count after applying it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    pub stage: Stage,
    pub candidates: Vec<LatentPoint>,
    pub feedback: RankFeedback,
    pub z_star: LatentPoint,
    pub g_bar: Vec<f64>,
    pub tau: usize,
}

impl RoundRecord {
    /// Record for `before --feedback--> after`.
    pub fn new(before: &OptimizerState, feedback: &RankFeedback, after: &OptimizerState) -> Self {
        Self {
            round: before.round(),
            stage: before.stage,
            candidates: before.candidates.points.clone(),
            feedback: feedback.clone(),
            z_star: after.z_star.clone(),
            g_bar: after.g_bar.clone(),
            tau: after.tau,
        }
    }
}

pub fn write_record<W: Write>(out: &mut W, record: &RoundRecord) -> Result<()> {
    serde_json::to_writer(&mut *out, record)?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn write_transcript<W: Write>(mut out: W, records: &[RoundRecord]) -> Result<()> {
    for r in records {
        write_record(&mut out, r)?;
    }
    out.flush()?;
    Ok(())
}

/// Reads records, skipping blank lines. A torn final line (no trailing
/// newline and invalid JSON) is dropped, so a transcript cut off mid-append
/// still yields every completed round.
pub fn read_transcript<R: BufRead>(input: R) -> Result<Vec<RoundRecord>> {
    let lines: Vec<String> = input.lines().collect::<std::io::Result<_>>()?;
    let mut records = Vec::with_capacity(lines.len());
    let last = lines.len().saturating_sub(1);
    for (i, line) in lines.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str(line) {
            Ok(r) => records.push(r),
            Err(_) if i == last => break,
            Err(e) => return Err(Error::Serde(format!("transcript line {}: {e}", i + 1))),
        }
    }
    Ok(records)
}

/// Re-applies recorded feedback from the initial state, checking at every
/// round that the regenerated candidates and updated state match the record
/// bit for bit.
pub fn replay(config: OptimizerConfig, start: &SessionStart, records: &[RoundRecord]) -> Result<OptimizerState> {
    let mut state = OptimizerState::start(config, start)?;
    for (i, rec) in records.iter().enumerate() {
        let diverged = |reason: &str| Error::Replay {
            round: i,
            reason: reason.to_string(),
        };
        if rec.round != state.round() {
            return Err(diverged("round counter mismatch"));
        }
        if rec.stage != state.stage {
            return Err(diverged("stage mismatch"));
        }
        if !bitwise_eq_points(&rec.candidates, &state.candidates.points) {
            return Err(diverged("candidate set differs"));
        }
        state = state.apply(&rec.feedback)?;
        if !bitwise_eq(rec.z_star.as_slice(), state.z_star.as_slice())
            || !bitwise_eq(&rec.g_bar, &state.g_bar)
            || rec.tau != state.tau
        {
            return Err(diverged("post-feedback state differs"));
        }
    }
    Ok(state)
}

fn bitwise_eq(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
}

fn bitwise_eq_points(a: &[LatentPoint], b: &[LatentPoint]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| bitwise_eq(x.as_slice(), y.as_slice()))
}
