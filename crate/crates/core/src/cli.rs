//! Command-line front end. The binary only calls [`run`].

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::benchmark::{self, BenchmarkGrid, GridObjective};
use crate::decoder::ToyDecoder;
use crate::latent::LatentPoint;
use crate::oracle::{Objective, ObjectiveSpec};
use crate::priors::{
    kmeans_representatives, read_embedding_records, toy_embed_with_dim, Embedding, PriorStore, DEFAULT_REPRESENTATIVES,
    DEFAULT_SIGMA,
};
use crate::ranking::transcript::write_transcript;
use crate::ranking::{run_scripted, OptimizerConfig, StopRule};
use crate::rng::stream_rng;
use crate::service::{self, Service, ServiceConfig};

#[derive(Debug, Parser)]
#[command(name = "prefsearch", version, about = "Ranking-feedback latent search toolkit")]
pub struct Cli {
    /// Seed for every random stream of the command.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Directory for sessions and stores (serve) or default output location.
    #[arg(long, global = true)]
    pub data_dir: Option<PathBuf>,
    /// Output file or directory, depending on the command.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one scripted optimization and write its transcript.
    Optimize(OptimizeArgs),
    /// Run a grid of scripted optimizations, or a prior sigma sweep, to CSV.
    Benchmark(BenchmarkArgs),
    /// Build, update and query prior stores.
    Priors {
        #[command(subcommand)]
        command: PriorsCommand,
    },
    /// Start the HTTP session service.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ConfigArgs {
    #[arg(long, default_value_t = 256)]
    pub d: usize,
    #[arg(long, default_value_t = 4)]
    pub m: usize,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    #[arg(long, default_value_t = 0.5)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.8)]
    pub mu1: f64,
    #[arg(long, default_value_t = 0.4)]
    pub mu2: f64,
    #[arg(long, default_value_t = 0.1)]
    pub mu3: f64,
    /// Stage-1 and Stage-2 round counts, `S1,S2`.
    #[arg(long, default_value = "10,5", value_parser = parse_rounds)]
    pub rounds: StopRule,
    /// Leave the incumbent out of Stage-2 candidate sets.
    #[arg(long)]
    pub no_elitism: bool,
}

impl ConfigArgs {
    fn config(&self, d: usize, seed: u64) -> OptimizerConfig {
        OptimizerConfig {
            d,
            m: self.m,
            k: self.k,
            eta: self.eta,
            gamma: self.gamma,
            mu1: self.mu1,
            mu2: self.mu2,
            mu3: self.mu3,
            max_stage1_rounds: self.rounds.stage1_rounds,
            max_stage2_rounds: self.rounds.stage2_rounds,
            elitism: !self.no_elitism,
            seed,
        }
    }
}

fn parse_rounds(s: &str) -> std::result::Result<StopRule, String> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [a, b] => Ok(StopRule::new(
            a.trim().parse().map_err(|e| format!("stage-1 rounds: {e}"))?,
            b.trim().parse().map_err(|e| format!("stage-2 rounds: {e}"))?,
        )),
        _ => Err(format!("expected S1,S2, got {s:?}")),
    }
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    /// Preset name (sphere, rosenbrock, embedding_quadratic,
    /// trajectory_distance) or a path to an objective JSON file.
    #[arg(long)]
    pub objective: String,
    /// Gaussian score noise for preset objectives.
    #[arg(long, default_value_t = 0.0)]
    pub noise_std: f64,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    /// Comma-separated presets or objective JSON paths.
    #[arg(long, value_delimiter = ',', default_value = "sphere,rosenbrock,embedding_quadratic")]
    pub objectives: Vec<String>,
    /// Comma-separated latent dimensions.
    #[arg(long = "dims", value_delimiter = ',', default_value = "16")]
    pub dims: Vec<usize>,
    /// Number of seeds per cell, starting at --seed.
    #[arg(long, default_value_t = 5)]
    pub seeds: u64,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Sample a store entry at several sigmas instead of running a grid.
    #[arg(long)]
    pub sigma_sweep: bool,
    #[arg(long, requires = "sigma_sweep")]
    pub store: Option<PathBuf>,
    #[arg(long, requires = "sigma_sweep")]
    pub entry: Option<String>,
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4,0.5")]
    pub sigmas: Vec<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub draws: usize,
}

#[derive(Debug, Subcommand)]
pub enum PriorsCommand {
    /// Cluster ingested embeddings and keep one representative per cluster.
    Build {
        /// JSON lines of {id, text, embedding}.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_REPRESENTATIVES)]
        k: usize,
        #[arg(long, default_value_t = 100)]
        iters: usize,
        #[arg(long, default_value_t = 256)]
        latent_dim: usize,
    },
    /// Bind an optimized latent to an entry.
    Attach {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        id: String,
        /// JSON file: a latent array or an optimize result with `z_star_star`.
        #[arg(long)]
        latent: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SIGMA)]
        sigma: f64,
    },
    /// Print the entry most similar to a query.
    Select {
        #[arg(long)]
        store: PathBuf,
        #[command(flatten)]
        query: QueryArgs,
    },
    /// Sample latents (and decoded trajectories) from the most similar entry.
    Sample {
        #[arg(long)]
        store: PathBuf,
        #[command(flatten)]
        query: QueryArgs,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        decoder_seed: u64,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct QueryArgs {
    /// Query text, embedded with the trigram-hash embedder.
    #[arg(long)]
    pub text: Option<String>,
    /// Query embedding as a JSON array.
    #[arg(long)]
    pub embedding: Option<String>,
}

impl QueryArgs {
    fn embedding(&self, dim: usize) -> Result<Embedding> {
        match (&self.text, &self.embedding) {
            (_, Some(json)) => Ok(serde_json::from_str(json).context("parsing --embedding")?),
            (Some(text), None) => Ok(toy_embed_with_dim(text, dim)?),
            (None, None) => bail!("pass --text or --embedding"),
        }
    }
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub bind: String,
    #[arg(long, default_value_t = 0)]
    pub decoder_seed: u64,
}

pub fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Optimize(args) => optimize(&cli, args),
        Command::Benchmark(args) => bench(&cli, args),
        Command::Priors { command } => priors(&cli, command),
        Command::Serve(args) => serve(&cli, args),
    }
}

fn objective_spec(name: &str, d: usize, seed: u64, noise_std: f64) -> Result<(String, ObjectiveSpec)> {
    let path = Path::new(name);
    if path.extension().is_some_and(|e| e == "json") || path.exists() {
        let spec: ObjectiveSpec = serde_json::from_reader(BufReader::new(
            File::open(path).with_context(|| format!("opening objective file {}", path.display()))?,
        ))
        .with_context(|| format!("parsing objective file {}", path.display()))?;
        let label = spec.build(d)?.name().to_string();
        Ok((label, spec))
    } else {
        let mut spec = benchmark::preset_objective(name, d, seed)?;
        spec.noise_std = noise_std;
        spec.seed = seed;
        Ok((name.to_string(), spec))
    }
}

fn output_dir(cli: &Cli) -> PathBuf {
    cli.output.clone().or_else(|| cli.data_dir.clone()).unwrap_or_else(|| PathBuf::from("."))
}

fn optimize(cli: &Cli, args: &OptimizeArgs) -> Result<()> {
    let config = args.config.config(args.config.d, cli.seed);
    config.validate()?;
    let (label, spec) = objective_spec(&args.objective, config.d, cli.seed, args.noise_std)?;
    let objective = spec.build(config.d)?;
    if objective.dim() != config.d {
        bail!("objective has dimension {}, --d is {}", objective.dim(), config.d);
    }
    let oracle = spec.oracle(config.depth(), config.d)?;
    let outcome = run_scripted(config.clone(), oracle, args.config.rounds)?;

    let dir = output_dir(cli);
    std::fs::create_dir_all(&dir)?;
    let transcript = dir.join("transcript.jsonl");
    write_transcript(BufWriter::new(File::create(&transcript)?), &outcome.log.records())?;
    let best = outcome.log.best_f_per_round();
    let final_f = objective.evaluate(outcome.result.as_slice())?;
    let result = json!({
        "objective": label,
        "config": config,
        "z_star_star": outcome.result,
        "initial_best_f": best.first(),
        "final_f": final_f,
        "rounds": best.len(),
    });
    let result_path = dir.join("result.json");
    std::fs::write(&result_path, serde_json::to_string_pretty(&result)? + "\n")?;
    println!(
        "objective {label}: initial best f = {:.6}, final f = {final_f:.6} after {} rounds",
        best.first().copied().unwrap_or(f64::NAN),
        best.len()
    );
    println!("wrote {} and {}", transcript.display(), result_path.display());
    Ok(())
}

fn bench(cli: &Cli, args: &BenchmarkArgs) -> Result<()> {
    let out_path = cli.output.clone().unwrap_or_else(|| {
        PathBuf::from(if args.sigma_sweep { "sigma_sweep.csv" } else { "benchmark.csv" })
    });
    if args.sigma_sweep {
        let (Some(store), Some(entry)) = (&args.store, &args.entry) else {
            bail!("--sigma-sweep needs --store and --entry");
        };
        let store = PriorStore::load(store)?;
        let entry = store.get(entry).with_context(|| format!("no entry {entry:?} in store"))?;
        let rows = benchmark::sigma_sweep(entry, &args.sigmas, args.draws, cli.seed)?;
        benchmark::write_sweep(BufWriter::new(File::create(&out_path)?), &rows)?;
        for r in &rows {
            println!("sigma {:.3}: dispersion {:.5}", r.sigma, r.dispersion);
        }
    } else {
        if args.dims.is_empty() || args.objectives.is_empty() || args.seeds == 0 {
            bail!("benchmark grid needs at least one objective, dimension and seed");
        }
        let mut objectives = Vec::new();
        for name in &args.objectives {
            if benchmark::PRESET_OBJECTIVES.contains(&name.as_str()) {
                objectives.push(GridObjective::Preset(name.clone()));
            } else {
                let (label, spec) = objective_spec(name, args.dims[0], cli.seed, 0.0)?;
                objectives.push(GridObjective::Spec { name: label, spec });
            }
        }
        let grid = BenchmarkGrid {
            objectives,
            configs: args.dims.iter().map(|&d| args.config.config(d, cli.seed)).collect(),
            seeds: (cli.seed..cli.seed + args.seeds).collect(),
            stop: args.config.rounds,
        };
        for c in &grid.configs {
            c.validate()?;
        }
        let rows = grid.run()?;
        benchmark::write_report(BufWriter::new(File::create(&out_path)?), &rows)?;
        println!("{} runs", rows.len());
    }
    println!("wrote {}", out_path.display());
    Ok(())
}

fn read_latent(path: &Path) -> Result<LatentPoint> {
    let value: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    let raw = match value.get("z_star_star") {
        Some(z) => z.clone(),
        None => value,
    };
    serde_json::from_value(raw).context("latent must be an array of numbers")
}

fn priors(cli: &Cli, command: &PriorsCommand) -> Result<()> {
    match command {
        PriorsCommand::Build {
            input,
            k,
            iters,
            latent_dim,
        } => {
            let records = read_embedding_records(BufReader::new(File::open(input)?))?;
            let embeddings: Vec<Embedding> = records.iter().map(|r| r.embedding.clone()).collect();
            let texts: Vec<String> = records.iter().map(|r| r.text.clone()).collect();
            let out = kmeans_representatives(&embeddings, &texts, *k, *iters, cli.seed)?;
            let chosen = out.representatives.iter().map(|r| {
                let rec = &records[r.source];
                (rec.id.as_str(), rec.text.as_str(), &rec.embedding)
            });
            let store = PriorStore::from_records(*latent_dim, chosen)?;
            let path = cli.output.clone().unwrap_or_else(|| PathBuf::from("store.json"));
            store.save(&path)?;
            for e in &store.entries {
                println!("{}\t{}", e.id, e.text);
            }
            println!("wrote {} entries to {}", store.len(), path.display());
        }
        PriorsCommand::Attach {
            store,
            id,
            latent,
            sigma,
        } => {
            let current = PriorStore::load(store)?;
            let updated = current.attach_optimum(id, read_latent(latent)?, *sigma)?;
            updated.save(cli.output.as_deref().unwrap_or(store))?;
            println!("attached optimum to {id}");
        }
        PriorsCommand::Select { store, query } => {
            let store = PriorStore::load(store)?;
            let q = query.embedding(store.embedding_dim)?;
            let (i, entry) = store.select_prior(q.as_slice())?;
            let sim = store.similarities(q.as_slice())?[i];
            println!("{}\t{}\t{sim:.6}", entry.id, entry.text);
        }
        PriorsCommand::Sample {
            store,
            query,
            count,
            decoder_seed,
        } => {
            let store = PriorStore::load(store)?;
            let q = query.embedding(store.embedding_dim)?;
            let (_, entry) = store.select_prior(q.as_slice())?;
            let decoder = ToyDecoder::new(store.latent_dim, store.embedding_dim, *decoder_seed);
            let mut rng = stream_rng(cli.seed, 0);
            let mut out: Box<dyn Write> = match &cli.output {
                Some(p) => Box::new(BufWriter::new(File::create(p)?)),
                None => Box::new(std::io::stdout().lock()),
            };
            for _ in 0..*count {
                let latent = entry.sample_latent(&mut rng);
                let trajectory = decoder.decode(latent.as_slice(), q.as_slice())?;
                let line = json!({ "entry_id": entry.id, "latent": latent, "trajectory": trajectory });
                writeln!(out, "{line}")?;
            }
            out.flush()?;
        }
    }
    Ok(())
}

fn serve(cli: &Cli, args: &ServeArgs) -> Result<()> {
    let data_dir = cli.data_dir.clone().unwrap_or_else(|| PathBuf::from("data"));
    let mut config = ServiceConfig::new(data_dir);
    config.decoder_seed = args.decoder_seed;
    config.defaults.seed = cli.seed;
    let service = Arc::new(Service::new(config)?);
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(&args.bind)
            .await
            .with_context(|| format!("binding {}", args.bind))?;
        println!("listening on {}", listener.local_addr()?);
        service::serve(service, listener, shutdown_signal()).await?;
        Ok(())
    })
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {},
        _ = term => {},
    }
    tracing::info!("shutting down");
}
