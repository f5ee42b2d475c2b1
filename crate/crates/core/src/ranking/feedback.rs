use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeedbackKind {
    /// Ordered top-k ranking, `k >= 2`.
    FullRanking,
    /// Only the best candidate.
    BestOnly,
    /// Pick a candidate and stop optimizing.
    AcceptAndExit,
}

/// Output of a ranking oracle: candidate indices from best to worst.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankFeedback {
    pub kind: FeedbackKind,
    pub ranking: Vec<usize>,
}

impl RankFeedback {
    pub fn full(ranking: Vec<usize>) -> Self {
        Self {
            kind: FeedbackKind::FullRanking,
            ranking,
        }
    }

    pub fn best_only(index: usize) -> Self {
        Self {
            kind: FeedbackKind::BestOnly,
            ranking: vec![index],
        }
    }

    pub fn accept(index: usize) -> Self {
        Self {
            kind: FeedbackKind::AcceptAndExit,
            ranking: vec![index],
        }
    }

    pub fn best(&self) -> usize {
        self.ranking[0]
    }

    pub fn len(&self) -> usize {
        self.ranking.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranking.is_empty()
    }

    /// Checks length rules for the kind and that indices are distinct and `< m`.
    pub fn validate(&self, m: usize) -> Result<()> {
        match self.kind {
            FeedbackKind::FullRanking => {
                if self.ranking.len() < 2 || self.ranking.len() > m {
                    return Err(Error::Feedback(format!(
                        "a full ranking needs between 2 and {m} entries, got {}",
                        self.ranking.len()
                    )));
                }
            }
            FeedbackKind::BestOnly | FeedbackKind::AcceptAndExit => {
                if self.ranking.len() != 1 {
                    return Err(Error::Feedback(format!(
                        "{:?} takes exactly one index, got {}",
                        self.kind,
                        self.ranking.len()
                    )));
                }
            }
        }
        let mut seen = vec![false; m];
        for &i in &self.ranking {
            if i >= m {
                return Err(Error::Feedback(format!("candidate index {i} out of range for m={m}")));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::Feedback(format!("candidate index {i} listed twice")));
            }
        }
        Ok(())
    }
}
