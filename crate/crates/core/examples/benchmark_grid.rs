//! Parameter grid over objectives, dimensions and seeds, plus a sigma sweep.
//!
//! Writes `benchmark.csv` and `sigma_sweep.csv` to the directory given as the
//! first argument (default: current directory).

use std::fs::File;

use prefsearch::benchmark::{sigma_sweep, write_report, write_sweep, BenchmarkGrid, GridObjective};
use prefsearch::priors::{Embedding, RepresentativeEntry};
use prefsearch::ranking::{OptimizerConfig, StopRule};
use prefsearch::stats::median;
use prefsearch::LatentPoint;

fn main() -> anyhow::Result<()> {
    let out = std::path::PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| ".".into()));
    std::fs::create_dir_all(&out)?;

    let dims = [2, 8, 32];
    let grid = BenchmarkGrid {
        objectives: ["sphere", "rosenbrock", "embedding_quadratic"]
            .iter()
            .map(|n| GridObjective::Preset(n.to_string()))
            .collect(),
        configs: dims.iter().map(|&d| OptimizerConfig::with_dim(d)).collect(),
        seeds: (0..10).collect(),
        stop: StopRule::new(20, 10),
    };
    println!("running {} scripted searches", grid.size());
    let rows = grid.run()?;
    write_report(File::create(out.join("benchmark.csv"))?, &rows)?;

    println!("{:<20} {:>4} {:>14}", "objective", "d", "median ratio");
    for name in ["sphere", "rosenbrock", "embedding_quadratic"] {
        for d in dims {
            let ratios: Vec<f64> = rows
                .iter()
                .filter(|r| r.objective == name && r.d == d)
                .map(|r| r.improvement_ratio())
                .collect();
            println!("{name:<20} {d:>4} {:>14.4}", median(&ratios));
        }
    }

    let entry = RepresentativeEntry {
        id: "demo".into(),
        text: "demo".into(),
        embedding: Embedding::new(vec![1.0, 0.0])?,
        z_star_star: LatentPoint::zeros(16),
        sigma: 0.2,
    };
    let sweep = sigma_sweep(&entry, &[0.1, 0.2, 0.3, 0.4, 0.5], 5000, 0)?;
    write_sweep(File::create(out.join("sigma_sweep.csv"))?, &sweep)?;
    println!("\nsigma  dispersion");
    for r in &sweep {
        println!("{:>5.1}  {:.4}", r.sigma, r.dispersion);
    }
    Ok(())
}
