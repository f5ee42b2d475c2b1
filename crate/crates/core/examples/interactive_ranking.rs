//! Rank decoded trajectories yourself in the terminal.
//!
//! Each round shows the candidates as small ASCII plots. In Stage 1 answer
//! with a ranking from best to worst (`2 0 3 1`) or a single id; in Stage 2
//! answer with the id of the best one, or `a <id>` to accept it and stop.
//!
//! ```text
//! cargo run --example interactive_ranking -- "a person walks in a circle"
//! ```

use std::io::{BufRead, Write};

use prefsearch::decoder::{ToyDecoder, Trajectory};
use prefsearch::priors::toy_embed_with_dim;
use prefsearch::ranking::{OptimizerConfig, OptimizerState, RankFeedback, Stage};
use prefsearch::service::{STAGE1_PROMPT, STAGE2_PROMPT};

const W: usize = 24;
const H: usize = 10;

fn plot(t: &Trajectory) -> Vec<String> {
    let mut grid = vec![vec![' '; W]; H];
    for (i, p) in t.points.iter().enumerate() {
        let x = (((p[0] + 1.0) / 2.0) * (W - 1) as f64).round() as usize;
        let y = (((1.0 - p[1]) / 2.0) * (H - 1) as f64).round() as usize;
        grid[y.min(H - 1)][x.min(W - 1)] = if i == 0 { 'o' } else { '.' };
    }
    grid.into_iter().map(|r| r.into_iter().collect()).collect()
}

fn show(candidates: &[Trajectory]) {
    let plots: Vec<Vec<String>> = candidates.iter().map(plot).collect();
    let header: Vec<String> = (0..plots.len()).map(|i| format!("{:^W$}", format!("[{i}]"))).collect();
    println!("{}", header.join(" | "));
    for row in 0..H {
        let line: Vec<&str> = plots.iter().map(|p| p[row].as_str()).collect();
        println!("{}", line.join(" | "));
    }
}

fn parse(line: &str, stage: Stage) -> Option<RankFeedback> {
    let mut words = line.split_whitespace().peekable();
    let accept = words.peek() == Some(&"a");
    if accept {
        words.next();
    }
    let ids: Vec<usize> = words.map(|w| w.parse().ok()).collect::<Option<_>>()?;
    match (stage, accept, ids.as_slice()) {
        (Stage::Stage2, true, [i]) => Some(RankFeedback::accept(*i)),
        (_, false, [i]) => Some(RankFeedback::best_only(*i)),
        (Stage::Stage1, false, ids) if ids.len() > 1 => Some(RankFeedback::full(ids.to_vec())),
        _ => None,
    }
}

fn main() -> prefsearch::Result<()> {
    let text = std::env::args().nth(1).unwrap_or_else(|| "a person walks in a circle".into());
    let config = OptimizerConfig {
        elitism: false,
        ..OptimizerConfig::with_dim(16)
    };
    let c = toy_embed_with_dim(&text, 32)?;
    let decoder = ToyDecoder::new(config.d, c.dim(), 0);
    let mut state = OptimizerState::init_session(config)?;
    let stdin = std::io::stdin();
    let mut lines = stdin.lock().lines();

    while !state.is_finished() {
        let candidates = state
            .candidates
            .points
            .iter()
            .map(|z| decoder.decode(z.as_slice(), c.as_slice()))
            .collect::<prefsearch::Result<Vec<_>>>()?;
        println!("\nround {} ({:?}), condition: {text}", state.round(), state.stage);
        show(&candidates);
        let prompt = if state.stage == Stage::Stage1 { STAGE1_PROMPT } else { STAGE2_PROMPT };
        print!("{prompt}: ");
        std::io::stdout().flush()?;
        let Some(line) = lines.next().transpose()? else {
            state = state.finish()?;
            break;
        };
        match parse(&line, state.stage).map(|fb| state.apply(&fb)) {
            Some(Ok(next)) => state = next,
            Some(Err(e)) => println!("rejected: {e}"),
            None => println!("could not read that answer"),
        }
    }
    if let Some(z) = state.result() {
        println!("\nfinal latent: {:?}", z.as_slice());
    }
    Ok(())
}
