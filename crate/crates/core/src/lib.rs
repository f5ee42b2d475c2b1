//! Preference-driven latent search.
//!
//! * [`ranking`]: two-stage optimization of a latent vector from (m, k)
//!   ranking feedback, with replayable transcripts.
//! * [`oracle`]: scripted rankers over synthetic objectives.
//! * [`priors`]: stores of representative conditions with their optimized
//!   latents, cosine-similarity lookup and Gaussian prior sampling.
//! * [`decoder`]: a toy latent-to-trajectory decoder so rankings have
//!   something to look at.
//! * [`service`]: HTTP/JSON sessions around all of the above.
//! * [`benchmark`]: grid runs and CSV reports.

pub mod benchmark;
pub mod cli;
pub mod decoder;
pub mod error;
pub mod latent;
pub mod oracle;
pub mod priors;
pub mod ranking;
pub mod rng;
pub mod service;
pub mod stats;

pub use error::{Error, Result};
pub use latent::LatentPoint;
