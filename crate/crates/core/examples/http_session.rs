//! Drive a session over HTTP the way the browser front end does.
//!
//! Starts the service on an ephemeral port, then a scripted client ranks
//! the candidate latents of each round by distance to a hidden target.
//! Pass a base URL (for example `http://127.0.0.1:8080`) to talk to a
//! running `prefsearch serve` instead.

use std::sync::Arc;

use serde_json::{json, Value};

use prefsearch::service::{serve, Service, ServiceConfig};

#[tokio::main]
async fn main() -> anyhow::Result<()> {
    let mut _dir = None;
    let mut shutdown = None;
    let base = match std::env::args().nth(1) {
        Some(url) => url,
        None => {
            let dir = tempfile::tempdir()?;
            let svc = Arc::new(Service::new(ServiceConfig::new(dir.path()))?);
            let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await?;
            let addr = listener.local_addr()?;
            let (tx, rx) = tokio::sync::oneshot::channel::<()>();
            tokio::spawn(serve(svc, listener, async {
                let _ = rx.await;
            }));
            _dir = Some(dir);
            shutdown = Some(tx);
            format!("http://{addr}")
        }
    };

    let client = reqwest::Client::new();
    let target = [0.3, -0.5, 0.8, 0.1, 0.0, -0.2];
    let dist = |z: &Value| -> f64 {
        z.as_array()
            .unwrap()
            .iter()
            .zip(target)
            .map(|(x, t)| (x.as_f64().unwrap() - t).powi(2))
            .sum()
    };

    let created: Value = client
        .post(format!("{base}/sessions"))
        .json(&json!({
            "purpose": "representative",
            "mode": "scripted",
            "condition_text": "a person dances",
            "config": { "d": target.len(), "seed": 2 },
        }))
        .send()
        .await?
        .error_for_status()?
        .json()
        .await?;
    let id = created["session"]["id"].as_str().unwrap().to_string();
    println!("session {id}");

    let result = loop {
        let round: Value = client
            .get(format!("{base}/sessions/{id}/round?latents=true"))
            .send()
            .await?
            .error_for_status()?
            .json()
            .await?;
        let n = round["round"].as_u64().unwrap();
        let latents = round["latents"].as_array().unwrap();
        let mut order: Vec<usize> = (0..latents.len()).collect();
        order.sort_by(|&a, &b| dist(&latents[a]).total_cmp(&dist(&latents[b])));
        println!("round {n:>2} {:<7} {}  best distance^2 {:.4}", round["stage"].as_str().unwrap(), round["prompt"], dist(&latents[order[0]]));
        let body = match round["stage"].as_str().unwrap() {
            "stage1" if n < 10 => json!({ "round": n, "kind": "full_ranking", "ranking": order }),
            "stage2" if n >= 15 => json!({ "round": n, "kind": "accept_and_exit", "ranking": [order[0]] }),
            _ => json!({ "round": n, "kind": "best_only", "ranking": [order[0]] }),
        };
        let resp: Value = client
            .post(format!("{base}/sessions/{id}/feedback"))
            .json(&body)
            .send()
            .await?
            .error_for_status()?
            .json()
            .await?;
        if resp["status"] == "finished" {
            break resp["result"].clone();
        }
    };
    println!("\nfinal latent {}", result["z_star_star"]);
    println!("final distance^2 {:.4}", dist(&result["z_star_star"]));

    let wrong_method = client
        .post(format!("{base}/sessions/{id}/round"))
        .send()
        .await?;
    println!("POST on a read-only route -> {}", wrong_method.status());
    let finished = client.get(format!("{base}/sessions/{id}/round")).send().await?;
    println!("GET round of a finished session -> {}", finished.status());

    if let Some(tx) = shutdown {
        let _ = tx.send(());
    }
    Ok(())
}
