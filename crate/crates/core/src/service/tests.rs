use axum::http::StatusCode;
use serde_json::json;

use super::*;
use crate::priors::EmbeddingRecord;
use crate::ranking::FeedbackKind;

fn service() -> (tempfile::TempDir, Service) {
    let dir = tempfile::tempdir().unwrap();
    let svc = Service::new(ServiceConfig::new(dir.path())).unwrap();
    (dir, svc)
}

fn unit(dim: usize, hot: usize) -> Vec<f64> {
    let mut v = vec![0.05; dim];
    v[hot] = 1.0;
    v
}

/// Store "s" with d=8, e=16 and two entries with known optima.
fn seed_store(svc: &Service) -> Vec<LatentPoint> {
    let optima: Vec<LatentPoint> = (0..2)
        .map(|i| LatentPoint::new((0..8).map(|j| (i as f64 + 1.0) * 0.3 - 0.1 * j as f64).collect()).unwrap())
        .collect();
    let entries = optima
        .iter()
        .enumerate()
        .map(|(i, z)| RepresentativeEntry {
            id: format!("e{i}"),
            text: format!("entry {i}"),
            embedding: Embedding::new(unit(16, i)).unwrap(),
            z_star_star: z.clone(),
            sigma: DEFAULT_SIGMA,
        })
        .collect();
    svc.create_store(CreateStoreRequest {
        id: "s".into(),
        latent_dim: 8,
        embedding_dim: 16,
        entries,
        records: vec![],
        kmeans: None,
    })
    .unwrap();
    optima
}

fn request(purpose: Purpose) -> CreateSessionRequest {
    CreateSessionRequest {
        purpose,
        mode: None,
        condition_text: "walk in a circle".into(),
        condition_embedding: None,
        config: None,
        warm_start: None,
        full_restart: false,
        target: None,
        overwrite: None,
        sigma: None,
    }
}

fn personalize(entry: &str, seed: u64) -> CreateSessionRequest {
    CreateSessionRequest {
        condition_embedding: Some(unit(16, 0)),
        config: Some(json!({ "seed": seed })),
        warm_start: Some(StoreRef {
            store_id: "s".into(),
            entry_id: Some(entry.into()),
        }),
        ..request(Purpose::Personalize)
    }
}

#[test]
fn personalize_round0_stays_near_warm_start() {
    let (_dir, svc) = service();
    let optima = seed_store(&svc);
    let bound = 3.0 * OptimizerConfig::default().mu3;
    let (mut inside, mut total) = (0usize, 0usize);
    for seed in 0..300 {
        let (view, _) = svc.create_session(personalize("e1", seed)).unwrap();
        assert_eq!(view.stage, Stage::Stage2);
        let round = svc.get_round(&view.id, true).unwrap();
        assert_eq!(round.allowed_feedback, vec![FeedbackKind::BestOnly, FeedbackKind::AcceptAndExit]);
        assert_eq!(round.prompt, STAGE2_PROMPT);
        for p in round.latents.unwrap() {
            for (x, c) in p.as_slice().iter().zip(optima[1].as_slice()) {
                total += 1;
                inside += usize::from((x - c).abs() <= bound);
            }
        }
    }
    assert!(inside as f64 / total as f64 >= 0.99, "{inside}/{total}");
}

#[test]
fn representative_round0_is_spread_by_mu1() {
    let (_dir, svc) = service();
    let req = CreateSessionRequest {
        config: Some(json!({ "d": 64 })),
        ..request(Purpose::Representative)
    };
    let (view, round) = svc.create_session(req).unwrap();
    assert_eq!(view.stage, Stage::Stage1);
    assert_eq!(round.candidates.len(), 4);
    assert_eq!(round.allowed_feedback, vec![FeedbackKind::FullRanking, FeedbackKind::BestOnly]);
    assert_eq!(round.prompt, STAGE1_PROMPT);
    let latents = svc.get_round(&view.id, true).unwrap().latents.unwrap();
    let xs: Vec<f64> = latents.iter().flat_map(|p| p.as_slice().to_vec()).collect();
    let rms = (xs.iter().map(|x| x * x).sum::<f64>() / xs.len() as f64).sqrt();
    assert!((rms - 0.8).abs() < 0.1, "rms {rms}");
}

#[test]
fn warm_start_rules() {
    let (_dir, svc) = service();
    seed_store(&svc);
    let style = CreateSessionRequest {
        warm_start: Some(StoreRef {
            store_id: "s".into(),
            entry_id: None,
        }),
        ..request(Purpose::StyleAware)
    };
    assert_eq!(svc.create_session(style).unwrap_err().status, StatusCode::BAD_REQUEST);
    assert_eq!(
        svc.create_session(request(Purpose::Personalize)).unwrap_err().status,
        StatusCode::BAD_REQUEST
    );
    assert_eq!(svc.create_session(personalize("nope", 0)).unwrap_err().status, StatusCode::NOT_FOUND);
    let mut missing_store = personalize("e0", 0);
    missing_store.warm_start.as_mut().unwrap().store_id = "other".into();
    assert_eq!(svc.create_session(missing_store).unwrap_err().status, StatusCode::NOT_FOUND);

    let bad = CreateSessionRequest {
        config: Some(json!({ "gamma": 1.5 })),
        ..request(Purpose::Representative)
    };
    assert_eq!(svc.create_session(bad).unwrap_err().status, StatusCode::BAD_REQUEST);
    let mismatched = CreateSessionRequest {
        config: Some(json!({ "d": 9 })),
        ..personalize("e0", 0)
    };
    assert_eq!(svc.create_session(mismatched).unwrap_err().status, StatusCode::BAD_REQUEST);
}

#[test]
fn personalize_without_entry_id_uses_similarity() {
    let (_dir, svc) = service();
    let optima = seed_store(&svc);
    let mut req = personalize("e0", 3);
    req.warm_start.as_mut().unwrap().entry_id = None;
    req.condition_embedding = Some(unit(16, 1));
    let (view, _) = svc.create_session(req).unwrap();
    assert_eq!(view.z_star_star.as_ref(), Some(&optima[1]));
}

#[test]
fn feedback_protocol() {
    let (_dir, svc) = service();
    let (view, _) = svc.create_session(request(Purpose::Representative)).unwrap();
    let id = view.id;

    let illegal = FeedbackRequest {
        round: 0,
        kind: FeedbackKind::AcceptAndExit,
        ranking: vec![0],
    };
    let err = svc.submit_feedback(&id, illegal, false).unwrap_err();
    assert_eq!(err.status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(err.code, "illegal_feedback_kind");

    let bad_perm = FeedbackRequest {
        round: 0,
        kind: FeedbackKind::FullRanking,
        ranking: vec![0, 0, 1, 2],
    };
    assert_eq!(
        svc.submit_feedback(&id, bad_perm, false).unwrap_err().status,
        StatusCode::UNPROCESSABLE_ENTITY
    );

    let rank = FeedbackRequest {
        round: 0,
        kind: FeedbackKind::FullRanking,
        ranking: vec![2, 0, 3, 1],
    };
    let first = svc.submit_feedback(&id, rank.clone(), true).unwrap();
    let again = svc.submit_feedback(&id, rank.clone(), true).unwrap();
    assert_eq!(first, again);
    let view = svc.get_session(&id).unwrap();
    assert_eq!((view.round, view.tau, view.transcript_len), (1, 1, 1));

    let err = svc
        .submit_feedback(
            &id,
            FeedbackRequest {
                ranking: vec![1, 0, 3, 2],
                ..rank.clone()
            },
            false,
        )
        .unwrap_err();
    assert_eq!(err.status, StatusCode::CONFLICT);
    assert_eq!(err.code, "stale_round");
    assert_eq!(err.body()["current_round"], 1);

    let best = FeedbackRequest {
        round: 1,
        kind: FeedbackKind::BestOnly,
        ranking: vec![3],
    };
    let FeedbackResponse::NextRound { round } = svc.submit_feedback(&id, best, false).unwrap() else {
        panic!("expected another round");
    };
    assert_eq!(round.stage, Stage::Stage2);
    assert_eq!(round.prompt_kind, PromptKind::BestOnly);
    assert_eq!(round.allowed_feedback, vec![FeedbackKind::BestOnly, FeedbackKind::AcceptAndExit]);

    let accept = FeedbackRequest {
        round: 2,
        kind: FeedbackKind::AcceptAndExit,
        ranking: vec![1],
    };
    let FeedbackResponse::Finished { result } = svc.submit_feedback(&id, accept.clone(), false).unwrap() else {
        panic!("expected the session to finish");
    };
    assert_eq!(result.rounds, 3);
    assert_eq!(
        svc.submit_feedback(&id, accept, false).unwrap(),
        FeedbackResponse::Finished { result: result.clone() }
    );

    let err = svc.get_round(&id, false).unwrap_err();
    assert_eq!(err.status, StatusCode::CONFLICT);
    assert_eq!(
        serde_json::from_value::<LatentPoint>(err.body()["result"]["z_star_star"].clone()).unwrap(),
        result.z_star_star
    );
    assert_eq!(svc.get_round("s0000", false).unwrap_err().status, StatusCode::NOT_FOUND);
}

#[test]
fn sessions_survive_restart() {
    let (dir, svc) = service();
    let (view, round) = svc.create_session(request(Purpose::StyleAware)).unwrap();
    svc.submit_feedback(
        &view.id,
        FeedbackRequest {
            round: 0,
            kind: FeedbackKind::FullRanking,
            ranking: vec![1, 0, 2, 3],
        },
        false,
    )
    .unwrap();
    let before = svc.get_round(&view.id, true).unwrap();
    drop(svc);

    let reopened = Service::new(ServiceConfig::new(dir.path())).unwrap();
    let after = reopened.get_round(&view.id, true).unwrap();
    assert_eq!(before, after);
    assert_ne!(after.candidates, round.candidates);
    assert_eq!(reopened.get_session(&view.id).unwrap().tau, 1);
}

fn finish_now(svc: &Service, id: &str) -> SessionResult {
    match svc
        .submit_feedback(
            id,
            FeedbackRequest {
                round: 0,
                kind: FeedbackKind::AcceptAndExit,
                ranking: vec![2],
            },
            false,
        )
        .unwrap()
    {
        FeedbackResponse::Finished { result } => result,
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn personalize_writes_back_to_store() {
    let (_dir, svc) = service();
    seed_store(&svc);

    let (view, _) = svc.create_session(personalize("e0", 1)).unwrap();
    let latents = svc.get_round(&view.id, true).unwrap().latents.unwrap();
    let result = finish_now(&svc, &view.id);
    assert_eq!(result.z_star_star, latents[2]);
    assert_eq!(
        result.stored_entry,
        Some(StoredEntry {
            store_id: "s".into(),
            entry_id: "e0".into()
        })
    );
    assert_eq!(svc.load_store("s").unwrap().get("e0").unwrap().z_star_star, latents[2]);

    let req = CreateSessionRequest {
        overwrite: Some(false),
        sigma: Some(0.3),
        ..personalize("e0", 2)
    };
    let (view, _) = svc.create_session(req).unwrap();
    let result = finish_now(&svc, &view.id);
    let stored = result.stored_entry.unwrap();
    assert_eq!(stored.entry_id, format!("e0:{}", view.id));
    let store = svc.load_store("s").unwrap();
    assert_eq!(store.len(), 3);
    assert_eq!(store.get(&stored.entry_id).unwrap().sigma, 0.3);
}

#[test]
fn representative_session_inserts_into_target() {
    let (_dir, svc) = service();
    seed_store(&svc);
    let req = CreateSessionRequest {
        condition_embedding: Some(unit(16, 5)),
        target: Some(StoreRef {
            store_id: "s".into(),
            entry_id: None,
        }),
        ..request(Purpose::Representative)
    };
    let (view, _) = svc.create_session(req).unwrap();
    assert_eq!(view.z_star.dim(), 8);
    let best = FeedbackRequest {
        round: 0,
        kind: FeedbackKind::BestOnly,
        ranking: vec![0],
    };
    svc.submit_feedback(&view.id, best, false).unwrap();
    let FeedbackResponse::Finished { result } = svc
        .submit_feedback(
            &view.id,
            FeedbackRequest {
                round: 1,
                kind: FeedbackKind::AcceptAndExit,
                ranking: vec![0],
            },
            false,
        )
        .unwrap()
    else {
        panic!("expected the session to finish");
    };
    let store = svc.load_store("s").unwrap();
    let entry = store.get(&view.id).unwrap();
    assert_eq!(entry.z_star_star, result.z_star_star);
    assert_eq!(entry.text, "walk in a circle");
}

#[test]
fn generate_samples_around_selected_entry() {
    let (_dir, svc) = service();
    let optima = seed_store(&svc);
    let tight = svc.load_store("s").unwrap().attach_optimum("e1", optima[1].clone(), 1e-12).unwrap();
    tight.save(svc.store_path("s")).unwrap();

    let c = unit(16, 1);
    let resp = svc
        .generate(
            "s",
            &GenerateRequest {
                query: QueryRequest {
                    text: None,
                    embedding: Some(c.clone()),
                },
                count: 1,
                seed: 0,
            },
        )
        .unwrap();
    assert_eq!(resp.entry_id, "e1");
    let expected = crate::decoder::decode(optima[1].as_slice(), &c, 0).unwrap();
    for (a, b) in resp.samples[0].trajectory.points.iter().zip(&expected.points) {
        assert!((a[0] - b[0]).abs() <= 1e-6 && (a[1] - b[1]).abs() <= 1e-6);
    }

    let resp = svc
        .generate(
            "s",
            &GenerateRequest {
                query: QueryRequest {
                    text: None,
                    embedding: Some(unit(16, 0)),
                },
                count: 1000,
                seed: 11,
            },
        )
        .unwrap();
    assert_eq!(resp.entry_id, "e0");
    for j in 0..8 {
        let xs: Vec<f64> = resp.samples.iter().map(|s| s.latent.as_slice()[j]).collect();
        let sd = crate::stats::std_dev(&xs);
        assert!((0.19..=0.21).contains(&sd), "coordinate {j}: std {sd}");
    }

    let query = GenerateRequest {
        query: QueryRequest::default(),
        count: 1,
        seed: 0,
    };
    assert_eq!(svc.generate("missing", &query).unwrap_err().status, StatusCode::NOT_FOUND);
    svc.create_store(CreateStoreRequest {
        id: "empty".into(),
        latent_dim: 8,
        embedding_dim: 16,
        entries: vec![],
        records: vec![],
        kmeans: None,
    })
    .unwrap();
    let q = GenerateRequest {
        query: QueryRequest {
            text: Some("jump".into()),
            embedding: None,
        },
        ..query
    };
    assert_eq!(svc.generate("empty", &q).unwrap_err().status, StatusCode::NOT_FOUND);
}

#[test]
fn store_creation_with_kmeans() {
    let (_dir, svc) = service();
    assert!(svc.list_stores().unwrap().is_empty());
    let records: Vec<EmbeddingRecord> = (0..12)
        .map(|i| EmbeddingRecord {
            id: format!("r{i}"),
            text: format!("text {i}"),
            embedding: Embedding::new(unit(16, i % 3)).unwrap(),
        })
        .collect();
    let summary = svc
        .create_store(CreateStoreRequest {
            id: "k".into(),
            latent_dim: 4,
            embedding_dim: 16,
            entries: vec![],
            records,
            kmeans: Some(KMeansParams { k: 3, iters: 50, seed: 0 }),
        })
        .unwrap();
    assert_eq!(summary.entries, 3);
    assert_eq!(svc.list_stores().unwrap(), vec![summary]);
    let sel = svc
        .select(
            "k",
            &QueryRequest {
                text: None,
                embedding: Some(unit(16, 2)),
            },
        )
        .unwrap();
    assert!((sel.similarity - 1.0).abs() < 1e-12);
    let dup = CreateStoreRequest {
        id: "k".into(),
        latent_dim: 4,
        embedding_dim: 16,
        entries: vec![],
        records: vec![],
        kmeans: None,
    };
    assert_eq!(svc.create_store(dup).unwrap_err().status, StatusCode::CONFLICT);
    assert_eq!(svc.load_store("../etc").unwrap_err().status, StatusCode::BAD_REQUEST);
}
