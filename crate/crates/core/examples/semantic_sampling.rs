//! Generate trajectories for a new description from a prior store.
//!
//! Run `build_priors` first (same output directory), then:
//!
//! ```text
//! cargo run --example semantic_sampling -- "someone strolls forward" /tmp/prefsearch-priors
//! ```

use prefsearch::decoder::ToyDecoder;
use prefsearch::priors::{toy_embed_with_dim, PriorStore};
use prefsearch::rng::stream_rng;

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let text = args.next().unwrap_or_else(|| "someone strolls forward".into());
    let dir = args
        .next()
        .map(std::path::PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("prefsearch-priors"));
    let store = PriorStore::load(dir.join("store.json"))?;

    let query = toy_embed_with_dim(&text, store.embedding_dim)?;
    let sims = store.similarities(query.as_slice())?;
    let (index, entry) = store.select_prior(query.as_slice())?;
    for (e, s) in store.entries.iter().zip(&sims) {
        println!("{:>7.4}  {}", s, e.text);
    }
    println!("\nselected entry {index}: {:?} (sigma {})", entry.text, entry.sigma);

    let decoder = ToyDecoder::new(store.latent_dim, store.embedding_dim, 0);
    let mut rng = stream_rng(0, 0);
    for i in 0..3 {
        let z = entry.sample_latent(&mut rng);
        let t = decoder.decode(z.as_slice(), query.as_slice())?;
        let (first, last) = (t.points[0], t.points[t.len() - 1]);
        println!(
            "sample {i}: starts at ({:.3}, {:.3}), ends at ({:.3}, {:.3}), offset from z** {:.3}",
            first[0],
            first[1],
            last[0],
            last[1],
            prefsearch::latent::squared_distance(z.as_slice(), entry.z_star_star.as_slice()).sqrt()
        );
    }
    Ok(())
}
