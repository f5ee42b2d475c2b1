//! Record a session transcript, replay it offline, and detect tampering.

use std::io::BufReader;

use prefsearch::oracle::{ScalarObjective, ScriptedOracle};
use prefsearch::ranking::transcript::{read_transcript, write_transcript};
use prefsearch::ranking::{replay, run_scripted, OptimizerConfig, SessionStart, StopRule};

fn main() -> anyhow::Result<()> {
    let dir = tempfile::tempdir()?;
    let path = dir.path().join("session.jsonl");
    let config = OptimizerConfig {
        seed: 9,
        ..OptimizerConfig::with_dim(32)
    };
    let run = run_scripted(
        config.clone(),
        ScriptedOracle::new(ScalarObjective::Rosenbrock { dim: 32 }, 4),
        StopRule::from_caps(&config),
    )?;
    write_transcript(std::fs::File::create(&path)?, &run.log.records())?;

    let records = read_transcript(BufReader::new(std::fs::File::open(&path)?))?;
    let state = replay(config.clone(), &SessionStart::Cold, &records)?;
    let same = state.result() == Some(&run.result);
    println!("{} rounds replayed, final latent reproduced: {same}", records.len());

    let mut tampered = records.clone();
    tampered[3].feedback.ranking.reverse();
    match replay(config, &SessionStart::Cold, &tampered) {
        Ok(_) => println!("tampered transcript replayed (unexpected)"),
        Err(e) => println!("tampered transcript rejected: {e}"),
    }
    Ok(())
}
