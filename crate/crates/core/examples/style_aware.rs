//! Style-aware search: optimize a new style from scratch and add it to a store.
//!
//! Styles sit far from any existing entry, so the session starts cold
//! (Stage 1 gradient rounds, then Stage 2 refinement) and inserts the result
//! as a new entry of the target store.

use prefsearch::oracle::{Objective, ScalarObjective};
use prefsearch::ranking::FeedbackKind;
use prefsearch::service::{
    CreateSessionRequest, CreateStoreRequest, FeedbackRequest, FeedbackResponse, Mode, Purpose, QueryRequest, Service,
    ServiceConfig, StoreRef,
};

fn main() -> anyhow::Result<()> {
    let dir = tempfile::tempdir()?;
    let svc = Service::new(ServiceConfig::new(dir.path()))?;
    svc.create_store(CreateStoreRequest {
        id: "styles".into(),
        latent_dim: 4,
        embedding_dim: 32,
        entries: vec![],
        records: vec![],
        kmeans: None,
    })?;

    let style = "walks like a zombie";
    let target_latent = [0.9, -0.4, 0.2, 0.6];
    let objective = ScalarObjective::Sphere {
        center: target_latent.to_vec(),
    };

    let (session, mut round) = svc.create_session(CreateSessionRequest {
        purpose: Purpose::StyleAware,
        mode: Some(Mode::Scripted),
        condition_text: style.into(),
        condition_embedding: None,
        config: Some(serde_json::json!({ "d": 4, "seed": 5 })),
        warm_start: None,
        full_restart: false,
        target: Some(StoreRef {
            store_id: "styles".into(),
            entry_id: None,
        }),
        overwrite: None,
        sigma: Some(0.1),
    })?;

    let result = loop {
        let latents = svc.get_round(&session.id, true)?.latents.unwrap_or_default();
        let scores: Vec<f64> = latents.iter().map(|z| objective.evaluate(z.as_slice())).collect::<Result<_, _>>()?;
        let mut order: Vec<usize> = (0..scores.len()).collect();
        order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
        println!("round {:>2} {:?}: best f = {:.4}", round.round, round.stage, scores[order[0]]);
        let (kind, ranking) = match round.allowed_feedback[0] {
            FeedbackKind::FullRanking if round.round < 8 => (FeedbackKind::FullRanking, order),
            _ if round.round >= 14 => (FeedbackKind::AcceptAndExit, vec![order[0]]),
            _ => (FeedbackKind::BestOnly, vec![order[0]]),
        };
        let fb = FeedbackRequest {
            round: round.round,
            kind,
            ranking,
        };
        match svc.submit_feedback(&session.id, fb, false)? {
            FeedbackResponse::NextRound { round: next } => round = next,
            FeedbackResponse::Finished { result } => break result,
        }
    };
    println!("\nstored as {:?}", result.stored_entry);

    let hit = svc.select(
        "styles",
        &QueryRequest {
            text: Some("walking like a zombie".into()),
            embedding: None,
        },
    )?;
    println!("lookup for a paraphrase picks {:?} (similarity {:.3})", hit.text, hit.similarity);
    Ok(())
}
