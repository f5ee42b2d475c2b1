//! Scripted ranking oracles over synthetic objectives.
//!
//! Lower objective values are better. Ranking noise, when enabled, perturbs
//! the scores (not the order) with Gaussian draws from the oracle's own RNG
//! stream, so it never touches the optimizer's randomness.

use serde::{Deserialize, Serialize};

use crate::decoder::{ToyDecoder, Trajectory};
use crate::error::{check_dim, Error, Result};
use crate::latent::{dot, squared_distance, LatentPoint};
use crate::ranking::{CandidateSet, RankFeedback, RankingOracle};
use crate::rng::{normal_vec, stream_rng, ORACLE_STREAM_BASE};

/// A pure scalar function of a latent point.
pub trait Objective {
    fn dim(&self) -> usize;
    fn evaluate(&self, z: &[f64]) -> Result<f64>;
}

/// Built-in synthetic objectives.
#[derive(Debug, Clone)]
pub enum ScalarObjective {
    /// `||z - center||^2`
    Sphere { center: Vec<f64> },
    /// `sum_i 100 (z_{i+1} - z_i^2)^2 + (1 - z_i)^2`
    Rosenbrock { dim: usize },
    /// `||z - A c||^2` with `A` a seeded Gaussian projection.
    EmbeddingQuadratic { target: Vec<f64> },
    /// Mean squared distance between `decode(z, c)` and a target path.
    TrajectoryDistance {
        decoder: ToyDecoder,
        embedding: Vec<f64>,
        target: Trajectory,
    },
    /// `weights . z`
    Linear { weights: Vec<f64> },
}

impl ScalarObjective {
    pub fn sphere(dim: usize) -> Self {
        Self::Sphere { center: vec![0.0; dim] }
    }

    pub fn embedding_quadratic(embedding: &[f64], latent_dim: usize, projection_seed: u64, scale: f64) -> Self {
        Self::EmbeddingQuadratic {
            target: embedding_target(embedding, latent_dim, projection_seed, scale),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Sphere { .. } => "sphere",
            Self::Rosenbrock { .. } => "rosenbrock",
            Self::EmbeddingQuadratic { .. } => "embedding_quadratic",
            Self::TrajectoryDistance { .. } => "trajectory_distance",
            Self::Linear { .. } => "linear",
        }
    }

    /// The known minimizer, where one exists.
    pub fn minimizer(&self) -> Option<Vec<f64>> {
        match self {
            Self::Sphere { center } => Some(center.clone()),
            Self::Rosenbrock { dim } => Some(vec![1.0; *dim]),
            Self::EmbeddingQuadratic { target } => Some(target.clone()),
            Self::TrajectoryDistance { .. } | Self::Linear { .. } => None,
        }
    }
}

impl Objective for ScalarObjective {
    fn dim(&self) -> usize {
        match self {
            Self::Sphere { center } => center.len(),
            Self::Rosenbrock { dim } => *dim,
            Self::EmbeddingQuadratic { target } => target.len(),
            Self::TrajectoryDistance { decoder, .. } => decoder.latent_dim(),
            Self::Linear { weights } => weights.len(),
        }
    }

    fn evaluate(&self, z: &[f64]) -> Result<f64> {
        check_dim(self.dim(), z.len())?;
        Ok(match self {
            Self::Sphere { center } => squared_distance(z, center),
            Self::Rosenbrock { .. } => z
                .windows(2)
                .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
                .sum(),
            Self::EmbeddingQuadratic { target } => squared_distance(z, target),
            Self::TrajectoryDistance {
                decoder,
                embedding,
                target,
            } => decoder.decode(z, embedding)?.mean_squared_distance(target)?,
            Self::Linear { weights } => dot(weights, z),
        })
    }
}

/// `phi(f(z))` for a caller-supplied transform.
pub struct Transformed<O, F> {
    pub inner: O,
    pub transform: F,
}

impl<O: Objective, F: Fn(f64) -> f64> Objective for Transformed<O, F> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn evaluate(&self, z: &[f64]) -> Result<f64> {
        Ok((self.transform)(self.inner.evaluate(z)?))
    }
}

/// Row-major `latent_dim x embedding.len()` Gaussian matrix with entries of
/// std `scale`, seeded by `projection_seed`.
pub fn projection_matrix(latent_dim: usize, embedding_dim: usize, projection_seed: u64, scale: f64) -> Vec<f64> {
    normal_vec(&mut stream_rng(projection_seed, 0), latent_dim * embedding_dim, scale)
}

/// `A c` for the embedding-quadratic family.
pub fn embedding_target(embedding: &[f64], latent_dim: usize, projection_seed: u64, scale: f64) -> Vec<f64> {
    let e = embedding.len();
    let a = projection_matrix(latent_dim, e, projection_seed, scale);
    (0..latent_dim).map(|r| dot(&a[r * e..(r + 1) * e], embedding)).collect()
}

/// An (m, k)-ranking oracle backed by an objective.
#[derive(Debug, Clone)]
pub struct ScriptedOracle<O = ScalarObjective> {
    pub objective: O,
    pub k: usize,
    pub noise_std: f64,
    pub seed: u64,
    queries: u64,
}

impl<O: Objective> ScriptedOracle<O> {
    /// Noiseless oracle returning the top `k`.
    pub fn new(objective: O, k: usize) -> Self {
        Self::with_noise(objective, k, 0.0, 0)
    }

    pub fn with_noise(objective: O, k: usize, noise_std: f64, seed: u64) -> Self {
        Self {
            objective,
            k,
            noise_std,
            seed,
            queries: 0,
        }
    }

    pub fn evaluate(&self, z: &LatentPoint) -> Result<f64> {
        self.objective.evaluate(z.as_slice())
    }

    /// Ranks with the oracle's own depth.
    pub fn rank(&mut self, candidates: &CandidateSet) -> Result<RankFeedback> {
        let k = self.k;
        self.rank_top(candidates, k)
    }

    /// Top-`k` by (possibly noisy) score, ties to the lower index.
    pub fn rank_top(&mut self, candidates: &CandidateSet, k: usize) -> Result<RankFeedback> {
        let m = candidates.len();
        if k == 0 || k > m {
            return Err(Error::Config(format!("ranking depth {k} outside 1..={m}")));
        }
        let mut scores = candidates
            .points
            .iter()
            .map(|p| self.objective.evaluate(p.as_slice()))
            .collect::<Result<Vec<f64>>>()?;
        if self.noise_std > 0.0 {
            let mut rng = stream_rng(self.seed, ORACLE_STREAM_BASE + self.queries);
            for (s, n) in scores.iter_mut().zip(normal_vec(&mut rng, m, self.noise_std)) {
                *s += n;
            }
        }
        self.queries += 1;
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)));
        order.truncate(k);
        Ok(if k == 1 {
            RankFeedback::best_only(order[0])
        } else {
            RankFeedback::full(order)
        })
    }
}

impl<O: Objective> RankingOracle for ScriptedOracle<O> {
    fn query(&mut self, candidates: &CandidateSet, k: usize) -> Result<RankFeedback> {
        self.rank_top(candidates, k)
    }

    fn objective(&self, z: &LatentPoint) -> Option<f64> {
        self.objective.evaluate(z.as_slice()).ok()
    }
}

/// Wire form of an objective: `{kind, params, noise_std, seed}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveSpec {
    #[serde(flatten)]
    pub objective: ObjectiveParams,
    #[serde(default)]
    pub noise_std: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum ObjectiveParams {
    Sphere {
        #[serde(default)]
        center: Option<Vec<f64>>,
        #[serde(default)]
        d: Option<usize>,
    },
    Rosenbrock {
        d: usize,
    },
    EmbeddingQuadratic {
        latent_dim: usize,
        embedding: Vec<f64>,
        #[serde(default)]
        projection_seed: u64,
        #[serde(default = "one")]
        scale: f64,
    },
    TrajectoryDistance {
        latent_dim: usize,
        embedding: Vec<f64>,
        #[serde(default)]
        decoder_seed: u64,
        target: Trajectory,
    },
    Linear {
        weights: Vec<f64>,
    },
}

fn one() -> f64 {
    1.0
}

impl ObjectiveSpec {
    pub fn noiseless(objective: ObjectiveParams) -> Self {
        Self {
            objective,
            noise_std: 0.0,
            seed: 0,
        }
    }

    /// Builds the objective. `fallback_dim` sizes a sphere given without
    /// center or `d`.
    pub fn build(&self, fallback_dim: usize) -> Result<ScalarObjective> {
        if !(self.noise_std >= 0.0 && self.noise_std.is_finite()) {
            return Err(Error::Config(format!("noise_std must be nonnegative, got {}", self.noise_std)));
        }
        Ok(match &self.objective {
            ObjectiveParams::Sphere { center, d } => match (center, d) {
                (Some(c), Some(d)) if c.len() != *d => {
                    return Err(Error::Dimension { expected: *d, actual: c.len() })
                }
                (Some(c), _) => ScalarObjective::Sphere { center: c.clone() },
                (None, Some(d)) => ScalarObjective::sphere(*d),
                (None, None) => ScalarObjective::sphere(fallback_dim),
            },
            ObjectiveParams::Rosenbrock { d } => ScalarObjective::Rosenbrock { dim: *d },
            ObjectiveParams::EmbeddingQuadratic {
                latent_dim,
                embedding,
                projection_seed,
                scale,
            } => ScalarObjective::embedding_quadratic(embedding, *latent_dim, *projection_seed, *scale),
            ObjectiveParams::TrajectoryDistance {
                latent_dim,
                embedding,
                decoder_seed,
                target,
            } => {
                let decoder = ToyDecoder::new(*latent_dim, embedding.len(), *decoder_seed);
                check_dim(decoder.samples(), target.len())?;
                ScalarObjective::TrajectoryDistance {
                    decoder,
                    embedding: embedding.clone(),
                    target: target.clone(),
                }
            }
            ObjectiveParams::Linear { weights } => ScalarObjective::Linear { weights: weights.clone() },
        })
    }

    pub fn oracle(&self, k: usize, fallback_dim: usize) -> Result<ScriptedOracle> {
        Ok(ScriptedOracle::with_noise(self.build(fallback_dim)?, k, self.noise_std, self.seed))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ranking::{FeedbackKind, Stage};

    fn set(rows: &[[f64; 2]]) -> CandidateSet {
        CandidateSet {
            points: rows.iter().map(|r| LatentPoint::new(r.to_vec()).unwrap()).collect(),
            round_index: 0,
            stage: Stage::Stage1,
        }
    }

    #[test]
    fn known_values() {
        let sphere = ScalarObjective::sphere(2);
        assert_eq!(sphere.evaluate(&[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(sphere.evaluate(&[3.0, 4.0]).unwrap(), 25.0);
        let rosen = ScalarObjective::Rosenbrock { dim: 5 };
        assert_eq!(rosen.evaluate(&[1.0; 5]).unwrap(), 0.0);
        assert_eq!(rosen.evaluate(&[0.0, 0.0, 0.0, 0.0, 0.0]).unwrap(), 4.0);
        assert!(matches!(sphere.evaluate(&[1.0]), Err(Error::Dimension { .. })));
    }

    #[test]
    fn embedding_quadratic_minimum() {
        let c = [0.5, -0.25, 1.0];
        let obj = ScalarObjective::embedding_quadratic(&c, 4, 17, 1.0);
        let target = obj.minimizer().unwrap();
        assert_eq!(target, embedding_target(&c, 4, 17, 1.0));
        assert_eq!(obj.evaluate(&target).unwrap(), 0.0);
        assert!(obj.evaluate(&[0.0; 4]).unwrap() > 0.0);
    }

    #[test]
    fn ranks_sphere() {
        let cands = set(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [3.0, 0.0]]);
        let mut full = ScriptedOracle::new(ScalarObjective::sphere(2), 4);
        assert_eq!(full.rank(&cands).unwrap(), RankFeedback::full(vec![0, 1, 2, 3]));
        let mut best = ScriptedOracle::new(ScalarObjective::sphere(2), 1);
        let fb = best.rank(&cands).unwrap();
        assert_eq!(fb.kind, FeedbackKind::BestOnly);
        assert_eq!(fb.ranking, vec![0]);
    }

    #[test]
    fn ties_go_to_lower_index() {
        let cands = set(&[[1.0, 0.0], [0.0, 1.0], [0.0, 0.0], [-1.0, 0.0]]);
        let mut o = ScriptedOracle::new(ScalarObjective::sphere(2), 4);
        assert_eq!(o.rank(&cands).unwrap().ranking, vec![2, 0, 1, 3]);
    }

    #[test]
    fn tiny_noise_keeps_order() {
        let cands = set(&[[3.0, 0.0], [0.0, 0.0], [2.0, 0.0], [1.0, 0.0]]);
        let clean = ScriptedOracle::new(ScalarObjective::sphere(2), 4).rank(&cands).unwrap();
        for seed in 0..1000 {
            let mut noisy = ScriptedOracle::with_noise(ScalarObjective::sphere(2), 4, 1e-9, seed);
            assert_eq!(noisy.rank(&cands).unwrap(), clean);
        }
    }

    #[test]
    fn monotone_transform_same_ranking() {
        let cands = set(&[[0.3, 0.1], [-1.0, 2.0], [0.0, 0.2], [0.5, -0.5]]);
        let mut plain = ScriptedOracle::new(ScalarObjective::sphere(2), 4);
        let mut warped = ScriptedOracle::new(
            Transformed {
                inner: ScalarObjective::sphere(2),
                transform: |x: f64| (3.0 * x).exp() - 7.0,
            },
            4,
        );
        assert_eq!(plain.rank(&cands).unwrap(), warped.rank(&cands).unwrap());
    }

    #[test]
    fn spec_wire_form() {
        let json = r#"{"kind": "sphere", "params": {"d": 3}, "noise_std": 0.5, "seed": 9}"#;
        let spec: ObjectiveSpec = serde_json::from_str(json).unwrap();
        assert_eq!(spec.noise_std, 0.5);
        assert_eq!(spec.build(0).unwrap().dim(), 3);
        let json = r#"{"kind": "rosenbrock", "params": {"d": 4}}"#;
        let spec: ObjectiveSpec = serde_json::from_str(json).unwrap();
        assert_eq!(spec.build(0).unwrap().name(), "rosenbrock");
        let back: ObjectiveSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
    }
}
