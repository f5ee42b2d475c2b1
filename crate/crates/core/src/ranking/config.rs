use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hyperparameters of the two-stage ranking optimizer.
///
/// Defaults: `m = k = 4`, `eta = 1`, `gamma = 0.5`, `mu = (0.8, 0.4, 0.1)`,
/// stage caps 10 and 5, elitism on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    /// Latent dimension.
    pub d: usize,
    /// Candidates per round.
    pub m: usize,
    /// Ranking depth requested in Stage 1. `None` means `m`.
    pub k: Option<usize>,
    /// Step size.
    pub eta: f64,
    /// Shrinking rate of the step across the candidate fan.
    pub gamma: f64,
    /// Std of the initial candidate draw.
    pub mu1: f64,
    /// Std of Stage-1 exploration noise.
    pub mu2: f64,
    /// Std of Stage-2 exploration noise.
    pub mu3: f64,
    pub max_stage1_rounds: usize,
    pub max_stage2_rounds: usize,
    /// Keep the incumbent as candidate 0 in Stage 2.
    pub elitism: bool,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            d: 256,
            m: 4,
            k: None,
            eta: 1.0,
            gamma: 0.5,
            mu1: 0.8,
            mu2: 0.4,
            mu3: 0.1,
            max_stage1_rounds: 10,
            max_stage2_rounds: 5,
            elitism: true,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn with_dim(d: usize) -> Self {
        Self {
            d,
            ..Self::default()
        }
    }

    /// Effective ranking depth.
    pub fn depth(&self) -> usize {
        self.k.unwrap_or(self.m)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.d == 0 {
            return fail("latent dimension d must be positive".into());
        }
        if self.m < 2 {
            return fail(format!("query count m must be at least 2, got {}", self.m));
        }
        let k = self.depth();
        if k < 2 || k > self.m {
            return fail(format!("ranking depth k must satisfy 2 <= k <= m, got k={k}, m={}", self.m));
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return fail(format!("stepsize eta must be positive, got {}", self.eta));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return fail(format!("shrinking rate gamma must lie in (0, 1), got {}", self.gamma));
        }
        for (name, mu) in [("mu1", self.mu1), ("mu2", self.mu2), ("mu3", self.mu3)] {
            if !(mu > 0.0 && mu.is_finite()) {
                return fail(format!("{name} must be positive, got {mu}"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        OptimizerConfig::default().validate().unwrap();
        assert_eq!(OptimizerConfig::default().depth(), 4);
    }

    #[test]
    fn rejects_bad_values() {
        let bad = [
            OptimizerConfig { gamma: 1.0, ..Default::default() },
            OptimizerConfig { gamma: 0.0, ..Default::default() },
            OptimizerConfig { d: 0, ..Default::default() },
            OptimizerConfig { eta: 0.0, ..Default::default() },
            OptimizerConfig { mu2: -0.1, ..Default::default() },
            OptimizerConfig { k: Some(1), ..Default::default() },
            OptimizerConfig { k: Some(5), ..Default::default() },
            OptimizerConfig { m: 1, ..Default::default() },
        ];
        for cfg in bad {
            assert!(matches!(cfg.validate(), Err(Error::Config(_))), "{cfg:?}");
        }
    }

    #[test]
    fn partial_json_fills_defaults() {
        let cfg: OptimizerConfig = serde_json::from_str(r#"{"d": 2, "seed": 7}"#).unwrap();
        assert_eq!(cfg.m, 4);
        assert_eq!(cfg.d, 2);
        assert_eq!(cfg.seed, 7);
    }
}
