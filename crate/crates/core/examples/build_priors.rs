//! Build a prior store from a pool of motion descriptions.
//!
//! Texts are embedded with the trigram-hash embedder, reduced to five
//! representatives with K-means, and each representative gets an optimized
//! latent from a scripted search against an embedding-dependent target.
//! The store is written to `store.json` in the given directory (default: a
//! temporary one).

use prefsearch::oracle::{Objective, ScalarObjective, ScriptedOracle};
use prefsearch::priors::{kmeans_representatives, toy_embed_with_dim, PriorStore, DEFAULT_REPRESENTATIVES};
use prefsearch::ranking::{run_scripted, OptimizerConfig, StopRule};

const TEXTS: &[&str] = &[
    "a person walks forward slowly",
    "a person walks forward quickly",
    "someone walks ahead at a steady pace",
    "a person runs in a circle",
    "someone jogs around in a circle",
    "a man runs in circles",
    "a person jumps up and down",
    "someone hops in place twice",
    "a person jumps forward",
    "a person waves with the right hand",
    "someone waves both arms",
    "a man waves hello",
    "a person kicks with the left leg",
    "someone kicks forward with the right foot",
    "a person does a high kick",
];

const LATENT: usize = 8;
const EMBED: usize = 64;

fn main() -> anyhow::Result<()> {
    let out_dir = match std::env::args().nth(1) {
        Some(d) => std::path::PathBuf::from(d),
        None => std::env::temp_dir().join("prefsearch-priors"),
    };
    std::fs::create_dir_all(&out_dir)?;

    let embeddings = TEXTS
        .iter()
        .map(|t| toy_embed_with_dim(t, EMBED))
        .collect::<prefsearch::Result<Vec<_>>>()?;
    let texts: Vec<String> = TEXTS.iter().map(|t| t.to_string()).collect();
    let km = kmeans_representatives(&embeddings, &texts, DEFAULT_REPRESENTATIVES, 100, 0)?;

    let ids: Vec<String> = km.representatives.iter().map(|r| format!("rep{}", r.source)).collect();
    let mut store = PriorStore::from_records(
        LATENT,
        ids.iter()
            .zip(&km.representatives)
            .map(|(id, r)| (id.as_str(), r.text.as_str(), &r.embedding)),
    )?;

    for (i, rep) in km.representatives.iter().enumerate() {
        let objective = ScalarObjective::embedding_quadratic(rep.embedding.as_slice(), LATENT, 42, 1.0);
        let config = OptimizerConfig {
            seed: i as u64,
            max_stage1_rounds: 30,
            max_stage2_rounds: 10,
            ..OptimizerConfig::with_dim(LATENT)
        };
        let run = run_scripted(config, ScriptedOracle::new(objective.clone(), 4), StopRule::new(30, 10))?;
        let id = &ids[i];
        println!(
            "{id:<6} cluster of {:>2}  f(z**) = {:.4}  {}",
            rep.cluster_size,
            objective.evaluate(run.result.as_slice())?,
            rep.text
        );
        store = store.attach_optimum(id, run.result, 0.2)?;
    }

    let path = out_dir.join("store.json");
    store.save(&path)?;
    println!("\nwrote {} entries to {}", store.len(), path.display());
    Ok(())
}
