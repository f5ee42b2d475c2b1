//! Personalize a stored prior through the session service.
//!
//! A store entry holds an optimum for a generic condition. A user with a
//! slightly different taste (a shifted target) starts from that optimum
//! and refines it locally; the refined latent replaces the stored one.

use prefsearch::latent::squared_distance;
use prefsearch::priors::{Embedding, RepresentativeEntry};
use prefsearch::service::{
    CreateSessionRequest, CreateStoreRequest, FeedbackRequest, FeedbackResponse, Purpose, Service, ServiceConfig,
    StoreRef,
};
use prefsearch::LatentPoint;

fn main() -> anyhow::Result<()> {
    let dir = tempfile::tempdir()?;
    let svc = Service::new(ServiceConfig::new(dir.path()))?;

    let generic = LatentPoint::new(vec![0.5; 8])?;
    svc.create_store(CreateStoreRequest {
        id: "motions".into(),
        latent_dim: 8,
        embedding_dim: 4,
        entries: vec![RepresentativeEntry {
            id: "walk".into(),
            text: "a person walks".into(),
            embedding: Embedding::new(vec![1.0, 0.2, 0.0, 0.1])?,
            z_star_star: generic.clone(),
            sigma: 0.2,
        }],
        records: vec![],
        kmeans: None,
    })?;

    // The user's preferred latent, unknown to the optimizer.
    let taste: Vec<f64> = (0..8).map(|i| 0.5 + if i % 2 == 0 { 0.15 } else { -0.1 }).collect();
    let f = |z: &LatentPoint| squared_distance(z.as_slice(), &taste);

    let (session, mut round) = svc.create_session(CreateSessionRequest {
        purpose: Purpose::Personalize,
        mode: None,
        condition_text: "a person walks, my way".into(),
        condition_embedding: Some(vec![1.0, 0.25, 0.0, 0.1]),
        config: Some(serde_json::json!({ "elitism": true, "max_stage2_rounds": 30 })),
        warm_start: Some(StoreRef {
            store_id: "motions".into(),
            entry_id: None,
        }),
        full_restart: false,
        target: None,
        overwrite: None,
        sigma: None,
    })?;
    println!("session {} starts in {:?}, f(stored optimum) = {:.4}", session.id, session.stage, f(&generic));

    let result = loop {
        let latents = svc.get_round(&session.id, true)?.latents.unwrap_or_default();
        let best = (0..latents.len())
            .min_by(|&a, &b| f(&latents[a]).total_cmp(&f(&latents[b])))
            .unwrap_or(0);
        println!("round {:>2}: best candidate f = {:.4}", round.round, f(&latents[best]));
        let fb = FeedbackRequest {
            round: round.round,
            kind: prefsearch::ranking::FeedbackKind::BestOnly,
            ranking: vec![best],
        };
        match svc.submit_feedback(&session.id, fb, false)? {
            FeedbackResponse::NextRound { round: next } => round = next,
            FeedbackResponse::Finished { result } => break result,
        }
    };

    let stored = svc.load_store("motions")?;
    let entry = stored.get("walk").expect("entry kept");
    println!(
        "\nfinished after {} rounds; stored entry now has f = {:.4} ({:?})",
        result.rounds,
        f(&entry.z_star_star),
        result.stored_entry
    );
    Ok(())
}
