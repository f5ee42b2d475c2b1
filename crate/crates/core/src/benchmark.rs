//! Grid runs of scripted sessions and prior-dispersion sweeps, with CSV output.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decoder::ToyDecoder;
use crate::error::{Error, Result};
use crate::oracle::{ObjectiveParams, ObjectiveSpec};
use crate::priors::RepresentativeEntry;
use crate::ranking::{run_scripted, OptimizerConfig, StopRule};
use crate::rng::{normal_vec, stream_rng};
use crate::stats;

pub const PRESET_OBJECTIVES: [&str; 4] = ["sphere", "rosenbrock", "embedding_quadratic", "trajectory_distance"];

/// Embedding width used by the embedding-conditioned presets.
const PRESET_EMBEDDING_DIM: usize = 16;

/// Objective spec for a named preset in dimension `d`. Conditioned presets
/// draw their embedding (and target latent) from `seed`.
pub fn preset_objective(name: &str, d: usize, seed: u64) -> Result<ObjectiveSpec> {
    let embedding = || normal_vec(&mut stream_rng(seed, 7), PRESET_EMBEDDING_DIM, 1.0);
    let params = match name {
        "sphere" => ObjectiveParams::Sphere { center: None, d: Some(d) },
        "rosenbrock" => ObjectiveParams::Rosenbrock { d },
        "embedding_quadratic" => ObjectiveParams::EmbeddingQuadratic {
            latent_dim: d,
            embedding: embedding(),
            projection_seed: seed,
            scale: 1.0 / (PRESET_EMBEDDING_DIM as f64).sqrt(),
        },
        "trajectory_distance" => {
            let c = embedding();
            let hidden = normal_vec(&mut stream_rng(seed, 8), d, 1.0);
            let target = ToyDecoder::new(d, c.len(), seed).decode(&hidden, &c)?;
            ObjectiveParams::TrajectoryDistance {
                latent_dim: d,
                embedding: c,
                decoder_seed: seed,
                target,
            }
        }
        other => return Err(Error::Config(format!("unknown objective preset {other:?}"))),
    };
    Ok(ObjectiveSpec::noiseless(params))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRow {
    pub objective: String,
    pub d: usize,
    pub m: usize,
    pub k: usize,
    pub eta: f64,
    pub gamma: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub mu3: f64,
    pub elitism: bool,
    pub seed: u64,
    pub rounds: usize,
    pub best_f_per_round: Vec<f64>,
    pub final_f: f64,
}

impl BenchmarkRow {
    /// `final_f` relative to the best objective of the initial candidates.
    pub fn improvement_ratio(&self) -> f64 {
        self.final_f / self.best_f_per_round[0]
    }
}

/// CSV row; per-round values are `;`-joined in one column.
#[derive(Serialize, Deserialize)]
struct CsvRow {
    objective: String,
    d: usize,
    m: usize,
    k: usize,
    eta: f64,
    gamma: f64,
    mu1: f64,
    mu2: f64,
    mu3: f64,
    elitism: bool,
    seed: u64,
    rounds: usize,
    best_f_per_round: String,
    final_f: f64,
}

/// A named objective (preset or explicit spec) in a grid.
#[derive(Debug, Clone)]
pub enum GridObjective {
    Preset(String),
    Spec { name: String, spec: ObjectiveSpec },
}

impl GridObjective {
    fn name(&self) -> &str {
        match self {
            Self::Preset(n) => n,
            Self::Spec { name, .. } => name,
        }
    }

    fn spec(&self, d: usize, seed: u64) -> Result<ObjectiveSpec> {
        match self {
            Self::Preset(n) => preset_objective(n, d, seed),
            Self::Spec { spec, .. } => Ok(spec.clone()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchmarkGrid {
    pub objectives: Vec<GridObjective>,
    pub configs: Vec<OptimizerConfig>,
    pub seeds: Vec<u64>,
    pub stop: StopRule,
}

impl BenchmarkGrid {
    pub fn size(&self) -> usize {
        self.objectives.len() * self.configs.len() * self.seeds.len()
    }

    /// Runs every (objective, config, seed) cell in parallel. Rows come back
    /// in grid order regardless of scheduling.
    pub fn run(&self) -> Result<Vec<BenchmarkRow>> {
        if self.size() == 0 {
            return Err(Error::Config("benchmark grid is empty".into()));
        }
        let mut cells = Vec::with_capacity(self.size());
        for obj in &self.objectives {
            for cfg in &self.configs {
                for &seed in &self.seeds {
                    cells.push((obj, cfg, seed));
                }
            }
        }
        cells
            .into_par_iter()
            .map(|(obj, cfg, seed)| run_cell(obj, cfg, seed, self.stop))
            .collect()
    }
}

fn run_cell(obj: &GridObjective, base: &OptimizerConfig, seed: u64, stop: StopRule) -> Result<BenchmarkRow> {
    let config = OptimizerConfig {
        seed,
        max_stage1_rounds: base.max_stage1_rounds.max(stop.stage1_rounds),
        max_stage2_rounds: base.max_stage2_rounds.max(stop.stage2_rounds),
        ..base.clone()
    };
    let mut spec = obj.spec(config.d, seed)?;
    if spec.seed == 0 {
        spec.seed = seed;
    }
    let oracle = spec.oracle(config.depth(), config.d)?;
    let objective = spec.build(config.d)?;
    let outcome = run_scripted(config.clone(), oracle, stop)?;
    let best_f_per_round = outcome.log.best_f_per_round();
    let final_f = crate::oracle::Objective::evaluate(&objective, outcome.result.as_slice())?;
    Ok(BenchmarkRow {
        objective: obj.name().to_string(),
        d: config.d,
        m: config.m,
        k: config.depth(),
        eta: config.eta,
        gamma: config.gamma,
        mu1: config.mu1,
        mu2: config.mu2,
        mu3: config.mu3,
        elitism: config.elitism,
        seed,
        rounds: best_f_per_round.len(),
        best_f_per_round,
        final_f,
    })
}

pub fn write_report<W: Write>(out: W, rows: &[BenchmarkRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(CsvRow {
            objective: r.objective.clone(),
            d: r.d,
            m: r.m,
            k: r.k,
            eta: r.eta,
            gamma: r.gamma,
            mu1: r.mu1,
            mu2: r.mu2,
            mu3: r.mu3,
            elitism: r.elitism,
            seed: r.seed,
            rounds: r.rounds,
            best_f_per_round: r
                .best_f_per_round
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(";"),
            final_f: r.final_f,
        })
        .map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_report<R: std::io::Read>(input: R) -> Result<Vec<BenchmarkRow>> {
    let mut rd = csv::Reader::from_reader(input);
    rd.deserialize::<CsvRow>()
        .map(|row| {
            let r = row.map_err(|e| Error::Serde(e.to_string()))?;
            let best_f_per_round = if r.best_f_per_round.is_empty() {
                Vec::new()
            } else {
                r.best_f_per_round
                    .split(';')
                    .map(|v| v.parse::<f64>().map_err(|e| Error::Serde(e.to_string())))
                    .collect::<Result<_>>()?
            };
            Ok(BenchmarkRow {
                objective: r.objective,
                d: r.d,
                m: r.m,
                k: r.k,
                eta: r.eta,
                gamma: r.gamma,
                mu1: r.mu1,
                mu2: r.mu2,
                mu3: r.mu3,
                elitism: r.elitism,
                seed: r.seed,
                rounds: r.rounds,
                best_f_per_round,
                final_f: r.final_f,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaSweepRow {
    pub entry_id: String,
    pub sigma: f64,
    pub draws: usize,
    /// Mean over coordinates of the per-coordinate sample std.
    pub dispersion: f64,
    /// Largest per-coordinate deviation of the sample mean from `z_star_star`.
    pub max_mean_offset: f64,
}

/// Samples `draws` latents from `entry` at each sigma (same RNG stream per
/// sigma) and reports their spread.
pub fn sigma_sweep(entry: &RepresentativeEntry, sigmas: &[f64], draws: usize, seed: u64) -> Result<Vec<SigmaSweepRow>> {
    if draws < 2 {
        return Err(Error::Config("sigma sweep needs at least 2 draws".into()));
    }
    sigmas
        .par_iter()
        .map(|&sigma| {
            if !(sigma > 0.0 && sigma.is_finite()) {
                return Err(Error::Config(format!("sigma must be positive, got {sigma}")));
            }
            let e = RepresentativeEntry {
                sigma,
                ..entry.clone()
            };
            let mut rng = stream_rng(seed, 0);
            let d = e.z_star_star.dim();
            let mut cols = vec![Vec::with_capacity(draws); d];
            for _ in 0..draws {
                for (col, v) in cols.iter_mut().zip(e.sample_latent(&mut rng).as_slice()) {
                    col.push(*v);
                }
            }
            let dispersion = stats::mean(&cols.iter().map(|c| stats::std_dev(c)).collect::<Vec<_>>());
            let max_mean_offset = cols
                .iter()
                .zip(e.z_star_star.as_slice())
                .map(|(c, z)| (stats::mean(c) - z).abs())
                .fold(0.0, f64::max);
            Ok(SigmaSweepRow {
                entry_id: e.id.clone(),
                sigma,
                draws,
                dispersion,
                max_mean_offset,
            })
        })
        .collect()
}

pub fn write_sweep<W: Write>(out: W, rows: &[SigmaSweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}
