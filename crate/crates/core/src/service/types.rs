//! Request and response bodies of the HTTP API.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::decoder::Trajectory;
use crate::latent::LatentPoint;
use crate::priors::{EmbeddingRecord, RepresentativeEntry};
use crate::ranking::{FeedbackKind, Stage};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Human,
    Scripted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Purpose {
    Representative,
    Personalize,
    StyleAware,
}

/// A store entry a session reads from or writes to. Without `entry_id` the
/// entry is resolved by similarity (warm start) or created (target).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoreRef {
    pub store_id: String,
    #[serde(default)]
    pub entry_id: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CreateSessionRequest {
    pub purpose: Purpose,
    #[serde(default)]
    pub mode: Option<Mode>,
    pub condition_text: String,
    #[serde(default)]
    pub condition_embedding: Option<Vec<f64>>,
    /// Partial optimizer config laid over the service defaults.
    #[serde(default)]
    pub config: Option<Value>,
    #[serde(default)]
    pub warm_start: Option<StoreRef>,
    /// Personalize only: run both stages from the warm start instead of
    /// refining it locally.
    #[serde(default)]
    pub full_restart: bool,
    #[serde(default)]
    pub target: Option<StoreRef>,
    /// Personalize only: replace the warm-start entry's optimum (default) or
    /// add a separate entry.
    #[serde(default)]
    pub overwrite: Option<bool>,
    /// Sigma recorded with the stored result.
    #[serde(default)]
    pub sigma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundView {
    pub session_id: String,
    pub round: usize,
    pub stage: Stage,
    pub prompt_kind: PromptKind,
    pub prompt: String,
    pub candidates: Vec<Trajectory>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub latents: Option<Vec<LatentPoint>>,
    pub allowed_feedback: Vec<FeedbackKind>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PromptKind {
    RankOrBest,
    BestOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedbackRequest {
    /// The round being answered; guards against stale or repeated submissions.
    pub round: usize,
    pub kind: FeedbackKind,
    pub ranking: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoredEntry {
    pub store_id: String,
    pub entry_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionResult {
    pub z_star_star: LatentPoint,
    #[serde(default)]
    pub stored_entry: Option<StoredEntry>,
    pub rounds: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FeedbackResponse {
    NextRound { round: RoundView },
    Finished { result: SessionResult },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionView {
    pub id: String,
    pub mode: Mode,
    pub purpose: Purpose,
    pub condition_text: String,
    pub stage: Stage,
    pub round: usize,
    pub tau: usize,
    pub z_star: LatentPoint,
    pub z_star_star: Option<LatentPoint>,
    pub transcript_len: usize,
    pub result: Option<SessionResult>,
    pub created_at: u64,
    pub updated_at: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KMeansParams {
    pub k: usize,
    #[serde(default = "default_iters")]
    pub iters: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_iters() -> usize {
    100
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CreateStoreRequest {
    pub id: String,
    pub latent_dim: usize,
    pub embedding_dim: usize,
    #[serde(default)]
    pub entries: Vec<RepresentativeEntry>,
    /// Conditions added with a zero latent; reduced to representatives
    /// first when `kmeans` is given.
    #[serde(default)]
    pub records: Vec<EmbeddingRecord>,
    #[serde(default)]
    pub kmeans: Option<KMeansParams>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoreSummary {
    pub id: String,
    pub entries: usize,
    pub latent_dim: usize,
    pub embedding_dim: usize,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct QueryRequest {
    #[serde(default)]
    pub text: Option<String>,
    #[serde(default)]
    pub embedding: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectResponse {
    pub index: usize,
    pub entry_id: String,
    pub text: String,
    pub similarity: f64,
    pub similarities: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenerateRequest {
    #[serde(flatten)]
    pub query: QueryRequest,
    #[serde(default = "one")]
    pub count: usize,
    #[serde(default)]
    pub seed: u64,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratedSample {
    pub latent: LatentPoint,
    pub trajectory: Trajectory,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerateResponse {
    pub entry_id: String,
    pub samples: Vec<GeneratedSample>,
}
