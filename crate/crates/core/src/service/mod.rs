//! Session orchestration over HTTP/JSON.
//!
//! [`Service`] holds the logic and is usable without a server; [`router`]
//! exposes it through axum. Everything durable lives under the data
//! directory:
//!
//! ```text
//! <data_dir>/sessions/<id>.meta.json    written once at creation
//! <data_dir>/sessions/<id>.jsonl        append-only round transcript
//! <data_dir>/sessions/<id>.result.json  written when the session finishes
//! <data_dir>/stores/<id>.json           prior-store files
//! ```
//!
//! Session state is never stored directly; it is rebuilt by replaying the
//! transcript, so a transcript that survives a crash is always resumable.

mod error;
mod http;
mod types;

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use error::ApiError;
pub use http::{router, serve};
pub use types::*;

use crate::decoder::ToyDecoder;
use crate::error::Error;
use crate::latent::LatentPoint;
use crate::priors::{
    kmeans_representatives, toy_embed_with_dim, Embedding, PriorStore, RepresentativeEntry, DEFAULT_EMBEDDING_DIM,
    DEFAULT_SIGMA,
};
use crate::ranking::transcript::{read_transcript, write_record};
use crate::ranking::{replay, OptimizerConfig, OptimizerState, RankFeedback, RoundRecord, SessionStart, Stage};
use crate::rng::stream_rng;

pub type ApiResult<T> = std::result::Result<T, ApiError>;

pub const STAGE1_PROMPT: &str = "Please input the rank (from best to worst) or best of motion ID";
pub const STAGE2_PROMPT: &str = "Please input the ID of the best motion";

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub data_dir: PathBuf,
    /// Defaults for fields a session request leaves out.
    pub defaults: OptimizerConfig,
    /// Width of toy embeddings made for sessions not tied to a store.
    pub embedding_dim: usize,
    pub decoder_seed: u64,
}

impl ServiceConfig {
    pub fn new(data_dir: impl Into<PathBuf>) -> Self {
        Self {
            data_dir: data_dir.into(),
            defaults: OptimizerConfig::default(),
            embedding_dim: DEFAULT_EMBEDDING_DIM,
            decoder_seed: 0,
        }
    }
}

/// Where a finished session writes its optimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum WriteTarget {
    Attach { store_id: String, entry_id: String },
    Insert { store_id: String, entry_id: String },
}

/// Immutable description of a session, persisted at creation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionMeta {
    pub id: String,
    pub mode: Mode,
    pub purpose: Purpose,
    pub condition_text: String,
    pub condition_embedding: Embedding,
    pub config: OptimizerConfig,
    pub start: SessionStart,
    pub target: Option<WriteTarget>,
    pub sigma: f64,
    pub decoder_seed: u64,
    pub created_at: u64,
}

struct Session {
    meta: SessionMeta,
    state: OptimizerState,
    records: Vec<RoundRecord>,
    result: Option<SessionResult>,
    updated_at: u64,
}

type Shared<T> = Arc<Mutex<T>>;

pub struct Service {
    config: ServiceConfig,
    sessions: Mutex<HashMap<String, Shared<Session>>>,
    store_locks: Mutex<HashMap<String, Shared<()>>>,
    next_id: AtomicU64,
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.len() <= 128 && id.chars().all(|c| c.is_ascii_alphanumeric() || "-_.:".contains(c)) && !id.starts_with('.')
}

fn write_json_atomic<T: Serialize>(path: &Path, value: &T) -> crate::Result<()> {
    let tmp = path.with_extension("tmp");
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(&tmp, text)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

impl Service {
    pub fn new(config: ServiceConfig) -> crate::Result<Self> {
        std::fs::create_dir_all(config.data_dir.join("sessions"))?;
        std::fs::create_dir_all(config.data_dir.join("stores"))?;
        Ok(Self {
            config,
            sessions: Mutex::new(HashMap::new()),
            store_locks: Mutex::new(HashMap::new()),
            next_id: AtomicU64::new(0),
        })
    }

    pub fn config(&self) -> &ServiceConfig {
        &self.config
    }

    fn session_path(&self, id: &str, suffix: &str) -> PathBuf {
        self.config.data_dir.join("sessions").join(format!("{id}.{suffix}"))
    }

    fn store_path(&self, id: &str) -> PathBuf {
        self.config.data_dir.join("stores").join(format!("{id}.json"))
    }

    /// Path of a session's transcript file.
    pub fn transcript_path(&self, id: &str) -> PathBuf {
        self.session_path(id, "jsonl")
    }

    // ---- stores -----------------------------------------------------------

    fn store_lock(&self, id: &str) -> Shared<()> {
        self.store_locks.lock().unwrap().entry(id.to_string()).or_default().clone()
    }

    pub fn load_store(&self, id: &str) -> ApiResult<PriorStore> {
        if !valid_id(id) {
            return Err(ApiError::bad_request(format!("invalid store id {id:?}")));
        }
        let path = self.store_path(id);
        if !path.exists() {
            return Err(ApiError::not_found(format!("no store {id:?}")));
        }
        Ok(PriorStore::load(path)?)
    }

    pub fn create_store(&self, req: CreateStoreRequest) -> ApiResult<StoreSummary> {
        if !valid_id(&req.id) {
            return Err(ApiError::bad_request(format!("invalid store id {:?}", req.id)));
        }
        if req.latent_dim == 0 || req.embedding_dim == 0 {
            return Err(ApiError::bad_request("store dimensions must be positive"));
        }
        let lock = self.store_lock(&req.id);
        let _guard = lock.lock().unwrap();
        let path = self.store_path(&req.id);
        if path.exists() {
            return Err(ApiError::conflict("store_exists", format!("store {:?} already exists", req.id)));
        }
        let mut store = PriorStore::new(req.latent_dim, req.embedding_dim);
        for entry in req.entries {
            store.push(entry)?;
        }
        let records = match &req.kmeans {
            Some(km) => {
                let embeddings: Vec<Embedding> = req.records.iter().map(|r| r.embedding.clone()).collect();
                let texts: Vec<String> = req.records.iter().map(|r| r.text.clone()).collect();
                let out = kmeans_representatives(&embeddings, &texts, km.k, km.iters, km.seed)?;
                out.representatives.iter().map(|rep| req.records[rep.source].clone()).collect()
            }
            None => req.records,
        };
        for rec in records {
            store.push(RepresentativeEntry {
                id: rec.id,
                text: rec.text,
                embedding: rec.embedding,
                z_star_star: LatentPoint::zeros(req.latent_dim),
                sigma: DEFAULT_SIGMA,
            })?;
        }
        store.save(&path)?;
        Ok(summary(&req.id, &store))
    }

    pub fn list_stores(&self) -> ApiResult<Vec<StoreSummary>> {
        let mut out = Vec::new();
        for entry in std::fs::read_dir(self.config.data_dir.join("stores")).map_err(Error::from)? {
            let path = entry.map_err(Error::from)?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("json") {
                continue;
            }
            let Some(id) = path.file_stem().and_then(|s| s.to_str()) else {
                continue;
            };
            let store = PriorStore::load(&path)?;
            out.push(summary(id, &store));
        }
        out.sort_by(|a, b| a.id.cmp(&b.id));
        Ok(out)
    }

    fn query_embedding(&self, store: &PriorStore, query: &QueryRequest) -> ApiResult<Embedding> {
        match (&query.embedding, &query.text) {
            (Some(e), _) => Ok(Embedding::new(e.clone())?),
            (None, Some(t)) => Ok(toy_embed_with_dim(t, store.embedding_dim)?),
            (None, None) => Err(ApiError::bad_request("query needs an embedding or a text")),
        }
    }

    pub fn select(&self, store_id: &str, query: &QueryRequest) -> ApiResult<SelectResponse> {
        let store = self.load_store(store_id)?;
        let q = self.query_embedding(&store, query)?;
        let (index, entry) = store.select_prior(q.as_slice())?;
        let similarities = store.similarities(q.as_slice())?;
        Ok(SelectResponse {
            index,
            entry_id: entry.id.clone(),
            text: entry.text.clone(),
            similarity: similarities[index],
            similarities,
        })
    }

    /// Picks the most similar entry and decodes `count` latents sampled from
    /// its prior, conditioned on the query embedding.
    pub fn generate(&self, store_id: &str, req: &GenerateRequest) -> ApiResult<GenerateResponse> {
        let store = self.load_store(store_id)?;
        let q = self.query_embedding(&store, &req.query)?;
        let (_, entry) = store.select_prior(q.as_slice()).map_err(|e| match e {
            Error::NotFound(m) => ApiError::not_found(m),
            other => other.into(),
        })?;
        let decoder = ToyDecoder::new(store.latent_dim, store.embedding_dim, self.config.decoder_seed);
        let mut rng = stream_rng(req.seed, 0);
        let samples = (0..req.count)
            .map(|_| {
                let latent = entry.sample_latent(&mut rng);
                let trajectory = decoder.decode(latent.as_slice(), q.as_slice())?;
                Ok(GeneratedSample { latent, trajectory })
            })
            .collect::<crate::Result<Vec<_>>>()?;
        Ok(GenerateResponse {
            entry_id: entry.id.clone(),
            samples,
        })
    }

    // ---- sessions ---------------------------------------------------------

    fn new_session_id(&self) -> String {
        loop {
            let n = self.next_id.fetch_add(1, Ordering::Relaxed);
            let nanos = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_nanos()).unwrap_or(0);
            let id = format!("s{:x}{:04x}", nanos, n & 0xffff);
            if !self.session_path(&id, "meta.json").exists() {
                return id;
            }
        }
    }

    fn merged_config(&self, overrides: Option<&Value>, mode: Mode, store_latent_dim: Option<usize>) -> ApiResult<OptimizerConfig> {
        let mut base = serde_json::to_value(&self.config.defaults).map_err(Error::from)?;
        let overrides = match overrides {
            None | Some(Value::Null) => serde_json::Map::new(),
            Some(Value::Object(map)) => map.clone(),
            Some(_) => return Err(ApiError::bad_request("config must be a JSON object")),
        };
        let obj = base.as_object_mut().expect("config serializes as an object");
        if !overrides.contains_key("elitism") {
            obj.insert("elitism".into(), Value::Bool(mode == Mode::Scripted));
        }
        if let (Some(d), false) = (store_latent_dim, overrides.contains_key("d")) {
            obj.insert("d".into(), d.into());
        }
        for (k, v) in overrides {
            obj.insert(k, v);
        }
        let config: OptimizerConfig =
            serde_json::from_value(base).map_err(|e| ApiError::new(axum::http::StatusCode::BAD_REQUEST, "bad_config", e.to_string()))?;
        config.validate()?;
        if let Some(d) = store_latent_dim {
            if config.d != d {
                return Err(ApiError::new(
                    axum::http::StatusCode::BAD_REQUEST,
                    "bad_config",
                    format!("config latent dimension {} does not match the store's {d}", config.d),
                ));
            }
        }
        Ok(config)
    }

    pub fn create_session(&self, req: CreateSessionRequest) -> ApiResult<(SessionView, RoundView)> {
        if req.condition_text.trim().is_empty() && req.condition_embedding.is_none() {
            return Err(ApiError::bad_request("a session needs a condition text or embedding"));
        }
        let mode = req.mode.unwrap_or(Mode::Human);
        let sigma = req.sigma.unwrap_or(DEFAULT_SIGMA);
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(ApiError::bad_request("sigma must be positive"));
        }
        let id = self.new_session_id();

        let warm_store = match (&req.purpose, &req.warm_start) {
            (Purpose::Personalize, None) => {
                return Err(ApiError::bad_request("personalize sessions need a warm_start"));
            }
            (Purpose::Personalize, Some(w)) => Some(self.load_store(&w.store_id)?),
            (_, Some(_)) => {
                return Err(ApiError::bad_request(
                    "representative and style-aware sessions start from scratch; drop warm_start",
                ));
            }
            (_, None) => None,
        };
        let target_store = match &req.target {
            Some(t) => Some(self.load_store(&t.store_id)?),
            None => None,
        };
        let ref_store = warm_store.as_ref().or(target_store.as_ref());
        let embedding_dim = ref_store.map_or(self.config.embedding_dim, |s| s.embedding_dim);
        let embedding = match &req.condition_embedding {
            Some(e) => Embedding::new(e.clone())?,
            None => toy_embed_with_dim(&req.condition_text, embedding_dim)?,
        };
        if let Some(s) = ref_store {
            if embedding.dim() != s.embedding_dim {
                return Err(Error::Dimension {
                    expected: s.embedding_dim,
                    actual: embedding.dim(),
                }
                .into());
            }
        }
        let config = self.merged_config(req.config.as_ref(), mode, ref_store.map(|s| s.latent_dim))?;
        if let Some(t) = &target_store {
            if t.latent_dim != config.d || t.embedding_dim != embedding.dim() {
                return Err(ApiError::bad_request("target store dimensions do not match the session"));
            }
        }

        let (start, target) = match (&req.purpose, &warm_store) {
            (Purpose::Personalize, Some(store)) => {
                let w = req.warm_start.as_ref().expect("checked above");
                let entry = match &w.entry_id {
                    Some(eid) => store
                        .get(eid)
                        .ok_or_else(|| ApiError::not_found(format!("no entry {eid:?} in store {:?}", w.store_id)))?,
                    None => store.select_prior(embedding.as_slice()).map_err(|e| match e {
                        Error::NotFound(m) => ApiError::not_found(m),
                        other => other.into(),
                    })?.1,
                };
                let from = entry.z_star_star.clone();
                let start = if req.full_restart {
                    SessionStart::Restart { from }
                } else {
                    SessionStart::Refine { from }
                };
                let target = match (&req.target, req.overwrite.unwrap_or(true)) {
                    (Some(t), _) => Some(self.write_target(t, &id)),
                    (None, true) => Some(WriteTarget::Attach {
                        store_id: w.store_id.clone(),
                        entry_id: entry.id.clone(),
                    }),
                    (None, false) => Some(WriteTarget::Insert {
                        store_id: w.store_id.clone(),
                        entry_id: format!("{}:{id}", entry.id),
                    }),
                };
                (start, target)
            }
            _ => (SessionStart::Cold, req.target.as_ref().map(|t| self.write_target(t, &id))),
        };
        if let (Some(WriteTarget::Attach { store_id, entry_id }), Some(store)) = (&target, &target_store) {
            if store.get(entry_id).is_none() {
                return Err(ApiError::not_found(format!("no entry {entry_id:?} in store {store_id:?}")));
            }
        }

        let state = OptimizerState::start(config.clone(), &start)?;
        let meta = SessionMeta {
            id: id.clone(),
            mode,
            purpose: req.purpose,
            condition_text: req.condition_text,
            condition_embedding: embedding,
            config,
            start,
            target,
            sigma,
            decoder_seed: self.config.decoder_seed,
            created_at: now(),
        };
        write_json_atomic(&self.session_path(&id, "meta.json"), &meta)?;
        File::create(self.transcript_path(&id)).map_err(Error::from)?;
        let session = Session {
            updated_at: meta.created_at,
            meta,
            state,
            records: Vec::new(),
            result: None,
        };
        let round = round_view(&session, false)?;
        let view = session_view(&session);
        self.sessions.lock().unwrap().insert(id, Arc::new(Mutex::new(session)));
        Ok((view, round))
    }

    fn write_target(&self, t: &StoreRef, session_id: &str) -> WriteTarget {
        match &t.entry_id {
            Some(e) => WriteTarget::Attach {
                store_id: t.store_id.clone(),
                entry_id: e.clone(),
            },
            None => WriteTarget::Insert {
                store_id: t.store_id.clone(),
                entry_id: session_id.to_string(),
            },
        }
    }

    fn session(&self, id: &str) -> ApiResult<Shared<Session>> {
        if let Some(s) = self.sessions.lock().unwrap().get(id) {
            return Ok(s.clone());
        }
        if !valid_id(id) || !self.session_path(id, "meta.json").exists() {
            return Err(ApiError::not_found(format!("no session {id:?}")));
        }
        let session = self.load_session(id)?;
        let shared = Arc::new(Mutex::new(session));
        Ok(self.sessions.lock().unwrap().entry(id.to_string()).or_insert(shared).clone())
    }

    fn load_session(&self, id: &str) -> ApiResult<Session> {
        let meta: SessionMeta =
            serde_json::from_str(&std::fs::read_to_string(self.session_path(id, "meta.json")).map_err(Error::from)?)
                .map_err(Error::from)?;
        let transcript = self.transcript_path(id);
        let records = read_transcript(BufReader::new(File::open(&transcript).map_err(Error::from)?))?;
        let state = replay(meta.config.clone(), &meta.start, &records)?;
        let result_path = self.session_path(id, "result.json");
        let result = if result_path.exists() {
            Some(serde_json::from_str(&std::fs::read_to_string(result_path).map_err(Error::from)?).map_err(Error::from)?)
        } else {
            None
        };
        let updated_at = std::fs::metadata(&transcript)
            .and_then(|m| m.modified())
            .ok()
            .and_then(|t| t.duration_since(UNIX_EPOCH).ok())
            .map_or(meta.created_at, |d| d.as_secs());
        let mut session = Session {
            meta,
            state,
            records,
            result,
            updated_at,
        };
        if session.state.is_finished() && session.result.is_none() {
            self.finalize(&mut session)?;
        }
        Ok(session)
    }

    pub fn get_session(&self, id: &str) -> ApiResult<SessionView> {
        let shared = self.session(id)?;
        let session = shared.lock().unwrap();
        Ok(session_view(&session))
    }

    pub fn session_meta(&self, id: &str) -> ApiResult<SessionMeta> {
        let shared = self.session(id)?;
        let session = shared.lock().unwrap();
        Ok(session.meta.clone())
    }

    pub fn get_round(&self, id: &str, with_latents: bool) -> ApiResult<RoundView> {
        let shared = self.session(id)?;
        let session = shared.lock().unwrap();
        if let Some(result) = &session.result {
            return Err(finished_error(result));
        }
        round_view(&session, with_latents)
    }

    pub fn submit_feedback(&self, id: &str, req: FeedbackRequest, with_latents: bool) -> ApiResult<FeedbackResponse> {
        let shared = self.session(id)?;
        let mut session = shared.lock().unwrap();
        let feedback = RankFeedback {
            kind: req.kind,
            ranking: req.ranking,
        };
        let current = session.state.round();
        if req.round + 1 == current && session.records.last().map(|r| &r.feedback) == Some(&feedback) {
            return respond(&session, with_latents);
        }
        if let Some(result) = &session.result {
            return Err(finished_error(result));
        }
        if req.round != current {
            return Err(ApiError::conflict(
                "stale_round",
                format!("feedback is for round {}, session is at round {current}", req.round),
            )
            .with_extra(serde_json::json!({ "current_round": current })));
        }
        if !session.state.allowed_feedback().contains(&feedback.kind) {
            return Err(ApiError::new(
                axum::http::StatusCode::UNPROCESSABLE_ENTITY,
                "illegal_feedback_kind",
                format!("{:?} feedback is not accepted in {:?}", feedback.kind, session.state.stage),
            ));
        }
        let next = session.state.apply(&feedback)?;
        let record = RoundRecord::new(&session.state, &feedback, &next);
        let mut file = OpenOptions::new()
            .append(true)
            .open(self.transcript_path(id))
            .map_err(Error::from)?;
        write_record(&mut file, &record)?;
        file.flush().map_err(Error::from)?;
        file.sync_data().map_err(Error::from)?;
        session.records.push(record);
        session.state = next;
        session.updated_at = now();
        if session.state.is_finished() {
            self.finalize(&mut session)?;
        }
        respond(&session, with_latents)
    }

    fn finalize(&self, session: &mut Session) -> ApiResult<()> {
        let z = session
            .state
            .z_star_star
            .clone()
            .expect("finished sessions always hold an incumbent");
        let stored_entry = match &session.meta.target {
            None => None,
            Some(target) => {
                let (store_id, entry_id) = match target {
                    WriteTarget::Attach { store_id, entry_id } | WriteTarget::Insert { store_id, entry_id } => {
                        (store_id.clone(), entry_id.clone())
                    }
                };
                let lock = self.store_lock(&store_id);
                let _guard = lock.lock().unwrap();
                let store = self.load_store(&store_id)?;
                let updated = match target {
                    WriteTarget::Attach { .. } => store.attach_optimum(&entry_id, z.clone(), session.meta.sigma)?,
                    WriteTarget::Insert { .. } => {
                        let mut s = store.clone();
                        let entry = RepresentativeEntry {
                            id: entry_id.clone(),
                            text: session.meta.condition_text.clone(),
                            embedding: session.meta.condition_embedding.clone(),
                            z_star_star: z.clone(),
                            sigma: session.meta.sigma,
                        };
                        match s.entries.iter_mut().find(|e| e.id == entry_id) {
                            Some(existing) => *existing = entry,
                            None => s.push(entry)?,
                        }
                        s
                    }
                };
                updated.save(self.store_path(&store_id))?;
                Some(StoredEntry { store_id, entry_id })
            }
        };
        let result = SessionResult {
            z_star_star: z,
            stored_entry,
            rounds: session.records.len(),
        };
        write_json_atomic(&self.session_path(&session.meta.id, "result.json"), &result)?;
        session.result = Some(result);
        Ok(())
    }
}

fn summary(id: &str, store: &PriorStore) -> StoreSummary {
    StoreSummary {
        id: id.to_string(),
        entries: store.len(),
        latent_dim: store.latent_dim,
        embedding_dim: store.embedding_dim,
    }
}

fn finished_error(result: &SessionResult) -> ApiError {
    ApiError::conflict("session_finished", "session is finished").with_extra(serde_json::json!({ "result": result }))
}

fn respond(session: &Session, with_latents: bool) -> ApiResult<FeedbackResponse> {
    Ok(match &session.result {
        Some(result) => FeedbackResponse::Finished { result: result.clone() },
        None => FeedbackResponse::NextRound {
            round: round_view(session, with_latents)?,
        },
    })
}

fn round_view(session: &Session, with_latents: bool) -> ApiResult<RoundView> {
    let state = &session.state;
    let meta = &session.meta;
    let decoder = ToyDecoder::new(meta.config.d, meta.condition_embedding.dim(), meta.decoder_seed);
    let candidates = state
        .candidates
        .points
        .iter()
        .map(|p| decoder.decode(p.as_slice(), meta.condition_embedding.as_slice()))
        .collect::<crate::Result<Vec<_>>>()?;
    let (prompt_kind, prompt) = match state.stage {
        Stage::Stage1 => (PromptKind::RankOrBest, STAGE1_PROMPT),
        _ => (PromptKind::BestOnly, STAGE2_PROMPT),
    };
    Ok(RoundView {
        session_id: meta.id.clone(),
        round: state.round(),
        stage: state.stage,
        prompt_kind,
        prompt: prompt.to_string(),
        candidates,
        latents: with_latents.then(|| state.candidates.points.clone()),
        allowed_feedback: state.allowed_feedback().to_vec(),
    })
}

fn session_view(session: &Session) -> SessionView {
    SessionView {
        id: session.meta.id.clone(),
        mode: session.meta.mode,
        purpose: session.meta.purpose,
        condition_text: session.meta.condition_text.clone(),
        stage: session.state.stage,
        round: session.state.round(),
        tau: session.state.tau,
        z_star: session.state.z_star.clone(),
        z_star_star: session.state.z_star_star.clone(),
        transcript_len: session.records.len(),
        result: session.result.clone(),
        created_at: session.meta.created_at,
        updated_at: session.updated_at,
    }
}

impl FeedbackRequest {
    pub fn new(round: usize, feedback: &RankFeedback) -> Self {
        Self {
            round,
            kind: feedback.kind,
            ranking: feedback.ranking.clone(),
        }
    }
}

#[cfg(test)]
mod tests;
