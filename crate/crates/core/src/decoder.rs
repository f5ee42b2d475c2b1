//! Deterministic stand-in for a motion decoder.
//!
//! `[z; c]` is projected through a fixed seeded matrix onto sine/cosine
//! coefficients of a few harmonics per axis, synthesized over `T` samples and
//! squashed into the unit box with `tanh`. The map up to the squashing is
//! linear, and `tanh` is 1-Lipschitz, so nearby latents give nearby paths.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Result};
use crate::rng::{normal_vec, stream_rng};

pub const DEFAULT_HARMONICS: usize = 6;
/// Six seconds at 20 samples per second.
pub const DEFAULT_SAMPLES: usize = 120;

const AXES: usize = 2;

/// A time-indexed 2D path with coordinates in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub points: Vec<[f64; 2]>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Mean over samples of the squared point-to-point distance.
    pub fn mean_squared_distance(&self, other: &Trajectory) -> Result<f64> {
        check_dim(self.len(), other.len())?;
        let total: f64 = self
            .points
            .iter()
            .zip(&other.points)
            .map(|(a, b)| (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2))
            .sum();
        Ok(total / self.len().max(1) as f64)
    }

    pub fn flatten(&self) -> Vec<f64> {
        self.points.iter().flat_map(|p| p.iter().copied()).collect()
    }
}

/// Per-axis Fourier coefficients, `sin[axis][h]` and `cos[axis][h]` for
/// harmonic `h + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCoefficients {
    pub sin: [Vec<f64>; AXES],
    pub cos: [Vec<f64>; AXES],
}

impl FourierCoefficients {
    /// `a` in `b_s sin(x) + b_c cos(x) = a sin(x + phi)`.
    pub fn amplitudes(&self) -> [Vec<f64>; AXES] {
        std::array::from_fn(|ax| {
            self.sin[ax].iter().zip(&self.cos[ax]).map(|(s, c)| s.hypot(*c)).collect()
        })
    }

    /// `phi` in `b_s sin(x) + b_c cos(x) = a sin(x + phi)`.
    pub fn phases(&self) -> [Vec<f64>; AXES] {
        std::array::from_fn(|ax| {
            self.sin[ax].iter().zip(&self.cos[ax]).map(|(s, c)| c.atan2(*s)).collect()
        })
    }

    pub fn flatten(&self) -> Vec<f64> {
        (0..AXES)
            .flat_map(|ax| self.sin[ax].iter().chain(&self.cos[ax]).copied().collect::<Vec<_>>())
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct ToyDecoder {
    latent_dim: usize,
    embedding_dim: usize,
    harmonics: usize,
    samples: usize,
    seed: u64,
    /// Row-major, `2 * AXES * harmonics` rows by `latent_dim + embedding_dim`
    /// columns. Row order: axis, then sin/cos, then harmonic.
    projection: Vec<f64>,
}

impl ToyDecoder {
    pub fn new(latent_dim: usize, embedding_dim: usize, seed: u64) -> Self {
        Self::with_shape(latent_dim, embedding_dim, DEFAULT_HARMONICS, DEFAULT_SAMPLES, seed)
    }

    pub fn with_shape(latent_dim: usize, embedding_dim: usize, harmonics: usize, samples: usize, seed: u64) -> Self {
        let cols = latent_dim + embedding_dim;
        let rows = 2 * AXES * harmonics;
        let mut rng = stream_rng(seed, 0);
        let scale = 1.0 / (cols.max(1) as f64).sqrt();
        let mut projection = normal_vec(&mut rng, rows * cols, scale);
        // Higher harmonics get proportionally smaller weights.
        for row in 0..rows {
            let h = (row % harmonics) + 1;
            for v in &mut projection[row * cols..(row + 1) * cols] {
                *v /= h as f64;
            }
        }
        Self {
            latent_dim,
            embedding_dim,
            harmonics,
            samples,
            seed,
            projection,
        }
    }

    pub fn latent_dim(&self) -> usize {
        self.latent_dim
    }

    pub fn embedding_dim(&self) -> usize {
        self.embedding_dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn coefficients(&self, z: &[f64], c: &[f64]) -> Result<FourierCoefficients> {
        check_dim(self.latent_dim, z.len())?;
        check_dim(self.embedding_dim, c.len())?;
        let cols = self.latent_dim + self.embedding_dim;
        let h = self.harmonics;
        let row_value = |row: usize| -> f64 {
            let w = &self.projection[row * cols..(row + 1) * cols];
            let (wz, wc) = w.split_at(self.latent_dim);
            wz.iter().zip(z).map(|(a, b)| a * b).sum::<f64>() + wc.iter().zip(c).map(|(a, b)| a * b).sum::<f64>()
        };
        let block = |ax: usize, part: usize| -> Vec<f64> {
            (0..h).map(|i| row_value((ax * 2 + part) * h + i)).collect()
        };
        Ok(FourierCoefficients {
            sin: [block(0, 0), block(1, 0)],
            cos: [block(0, 1), block(1, 1)],
        })
    }

    /// Synthesized path before squashing into the unit box.
    pub fn raw_trajectory(&self, z: &[f64], c: &[f64]) -> Result<Vec<[f64; 2]>> {
        let coef = self.coefficients(z, c)?;
        let t_total = self.samples as f64;
        Ok((0..self.samples)
            .map(|t| {
                std::array::from_fn(|ax| {
                    (0..self.harmonics)
                        .map(|i| {
                            let angle = 2.0 * PI * (i + 1) as f64 * t as f64 / t_total;
                            coef.sin[ax][i] * angle.sin() + coef.cos[ax][i] * angle.cos()
                        })
                        .sum()
                })
            })
            .collect())
    }

    pub fn decode(&self, z: &[f64], c: &[f64]) -> Result<Trajectory> {
        let raw = self.raw_trajectory(z, c)?;
        Ok(Trajectory {
            points: raw.into_iter().map(|[x, y]| [x.tanh(), y.tanh()]).collect(),
        })
    }
}

/// One-shot decode with the default shape.
pub fn decode(z: &[f64], c: &[f64], seed: u64) -> Result<Trajectory> {
    ToyDecoder::new(z.len(), c.len(), seed).decode(z, c)
}
