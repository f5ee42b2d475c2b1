//! Scripted two-stage search on a sphere objective.
//!
//! ```text
//! cargo run --example optimize_sphere -- 16 3
//! ```
//! Arguments: latent dimension (default 2) and seed (default 0).

use prefsearch::oracle::{Objective, ScalarObjective, ScriptedOracle};
use prefsearch::ranking::{run_scripted, OptimizerConfig, StopRule};

fn main() -> prefsearch::Result<()> {
    let mut args = std::env::args().skip(1);
    let d: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(2);
    let seed: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(0);

    let config = OptimizerConfig {
        seed,
        ..OptimizerConfig::with_dim(d)
    };
    let objective = ScalarObjective::sphere(d);
    let oracle = ScriptedOracle::new(objective.clone(), config.depth());
    let run = run_scripted(config.clone(), oracle, StopRule::from_caps(&config))?;

    println!("round  stage   best f among candidates");
    for (i, logged) in run.log.rounds.iter().enumerate() {
        println!("{i:>5}  {:<7?} {:.6}", logged.record.stage, logged.best_f.unwrap_or(f64::NAN));
    }
    let best = run.log.best_f_per_round();
    println!(
        "\nf(z**) = {:.6}  (round-0 best {:.6}, d = {d})",
        objective.evaluate(run.result.as_slice())?,
        best[0]
    );
    Ok(())
}
