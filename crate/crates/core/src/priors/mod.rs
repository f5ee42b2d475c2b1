//! Representative conditions paired with optimized latents, and sampling
//! from the prior of the most similar one.

mod embed;
mod kmeans;

use std::io::BufRead;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use embed::{toy_embed, toy_embed_with_dim, DEFAULT_EMBEDDING_DIM};
pub use kmeans::{kmeans_representatives, KMeansOutcome, RepresentativeStub};

use crate::error::{check_dim, Error, Result};
use crate::latent::{dot, norm, LatentPoint};
use crate::rng::normal_vec;

pub const STORE_FORMAT_VERSION: u32 = 1;
pub const DEFAULT_SIGMA: f64 = 0.2;
pub const DEFAULT_REPRESENTATIVES: usize = 5;

/// A condition embedding: finite entries, nonzero norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Embedding(Vec<f64>);

impl Embedding {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("embedding is empty".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("embedding has non-finite entries".into()));
        }
        if norm(&values) == 0.0 {
            return Err(Error::Domain("embedding has zero norm".into()));
        }
        Ok(Self(values))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.0.iter().map(|v| v * factor).collect())
    }
}

impl TryFrom<Vec<f64>> for Embedding {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<Embedding> for Vec<f64> {
    fn from(e: Embedding) -> Self {
        e.0
    }
}

impl AsRef<[f64]> for Embedding {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

pub fn cosine_similarity(a: &[f64], b: &[f64]) -> f64 {
    dot(a, b) / (norm(a) * norm(b))
}

/// A condition together with the prior `N(z_star_star, sigma^2 I)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepresentativeEntry {
    pub id: String,
    pub text: String,
    pub embedding: Embedding,
    pub z_star_star: LatentPoint,
    pub sigma: f64,
}

impl RepresentativeEntry {
    /// `z_star_star + sigma * eps`, `eps ~ N(0, I)`.
    pub fn sample_latent<R: Rng + ?Sized>(&self, rng: &mut R) -> LatentPoint {
        let eps = normal_vec(rng, self.z_star_star.dim(), self.sigma);
        LatentPoint::from_vec_unchecked(
            self.z_star_star.as_slice().iter().zip(eps).map(|(z, e)| z + e).collect(),
        )
    }
}

/// Free-function form of [`RepresentativeEntry::sample_latent`].
pub fn sample_latent<R: Rng + ?Sized>(entry: &RepresentativeEntry, rng: &mut R) -> LatentPoint {
    entry.sample_latent(rng)
}

/// One line of an embedding ingestion file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingRecord {
    pub id: String,
    pub text: String,
    pub embedding: Embedding,
}

pub fn read_embedding_records<R: BufRead>(input: R) -> Result<Vec<EmbeddingRecord>> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: EmbeddingRecord =
            serde_json::from_str(&line).map_err(|e| Error::Serde(format!("line {}: {e}", i + 1)))?;
        out.push(rec);
    }
    Ok(out)
}

/// Ordered list of representative entries. Order matters: similarity ties go
/// to the earlier entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorStore {
    pub format_version: u32,
    pub latent_dim: usize,
    pub embedding_dim: usize,
    pub entries: Vec<RepresentativeEntry>,
}

impl PriorStore {
    pub fn new(latent_dim: usize, embedding_dim: usize) -> Self {
        Self {
            format_version: STORE_FORMAT_VERSION,
            latent_dim,
            embedding_dim,
            entries: Vec::new(),
        }
    }

    /// Entries built from k-means representatives (or any list of records),
    /// each starting at the origin with the default sigma.
    pub fn from_records<'a>(
        latent_dim: usize,
        records: impl IntoIterator<Item = (&'a str, &'a str, &'a Embedding)>,
    ) -> Result<Self> {
        let mut store: Option<Self> = None;
        for (id, text, embedding) in records {
            let s = store.get_or_insert_with(|| Self::new(latent_dim, embedding.dim()));
            s.push(RepresentativeEntry {
                id: id.to_string(),
                text: text.to_string(),
                embedding: embedding.clone(),
                z_star_star: LatentPoint::zeros(latent_dim),
                sigma: DEFAULT_SIGMA,
            })?;
        }
        store.ok_or_else(|| Error::Config("no records to build a store from".into()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&RepresentativeEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    pub fn validate(&self) -> Result<()> {
        if self.format_version != STORE_FORMAT_VERSION {
            return Err(Error::Config(format!("unsupported store format version {}", self.format_version)));
        }
        let mut ids = std::collections::HashSet::new();
        for e in &self.entries {
            self.check_entry(e)?;
            if !ids.insert(e.id.as_str()) {
                return Err(Error::Config(format!("duplicate entry id {:?}", e.id)));
            }
        }
        Ok(())
    }

    fn check_entry(&self, e: &RepresentativeEntry) -> Result<()> {
        check_dim(self.latent_dim, e.z_star_star.dim())?;
        check_dim(self.embedding_dim, e.embedding.dim())?;
        if !(e.sigma > 0.0 && e.sigma.is_finite()) {
            return Err(Error::Domain(format!("sigma must be positive, got {}", e.sigma)));
        }
        Ok(())
    }

    pub fn push(&mut self, entry: RepresentativeEntry) -> Result<()> {
        self.check_entry(&entry)?;
        if self.get(&entry.id).is_some() {
            return Err(Error::Config(format!("duplicate entry id {:?}", entry.id)));
        }
        self.entries.push(entry);
        Ok(())
    }

    /// Cosine similarity of `query` to every entry, in store order.
    pub fn similarities(&self, query: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.embedding_dim, query.len())?;
        if norm(query) == 0.0 || query.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("query embedding must be finite with nonzero norm".into()));
        }
        Ok(self
            .entries
            .iter()
            .map(|e| cosine_similarity(query, e.embedding.as_slice()))
            .collect())
    }

    /// Index and entry with the highest cosine similarity to `query`.
    pub fn select_prior(&self, query: &[f64]) -> Result<(usize, &RepresentativeEntry)> {
        if self.entries.is_empty() {
            return Err(Error::NotFound("prior store is empty".into()));
        }
        let sims = self.similarities(query)?;
        let mut best = 0;
        for (i, &s) in sims.iter().enumerate().skip(1) {
            if s > sims[best] {
                best = i;
            }
        }
        Ok((best, &self.entries[best]))
    }

    /// Copy of the store with entry `id` bound to a new optimum.
    pub fn attach_optimum(&self, id: &str, z_star_star: LatentPoint, sigma: f64) -> Result<Self> {
        let pos = self
            .entries
            .iter()
            .position(|e| e.id == id)
            .ok_or_else(|| Error::NotFound(format!("no entry with id {id:?}")))?;
        let mut next = self.clone();
        let entry = &mut next.entries[pos];
        entry.z_star_star = z_star_star;
        entry.sigma = sigma;
        next.check_entry(&next.entries[pos])?;
        Ok(next)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let store: Self = serde_json::from_str(text)?;
        store.validate()?;
        Ok(store)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Writes through a temporary file and rename so readers never see a
    /// partial store.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let tmp = path.with_extension("json.tmp");
        std::fs::write(&tmp, self.to_json()?)?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    fn entry(id: &str, emb: Vec<f64>, z: Vec<f64>) -> RepresentativeEntry {
        RepresentativeEntry {
            id: id.into(),
            text: format!("text for {id}"),
            embedding: Embedding::new(emb).unwrap(),
            z_star_star: LatentPoint::new(z).unwrap(),
            sigma: DEFAULT_SIGMA,
        }
    }

    fn orthogonal_store() -> PriorStore {
        let mut s = PriorStore::new(2, 4);
        for i in 0..4 {
            let mut e = vec![0.0; 4];
            e[i] = 1.0;
            s.push(entry(&format!("e{i}"), e, vec![i as f64, -(i as f64)])).unwrap();
        }
        s
    }

    #[test]
    fn embedding_invariants() {
        assert!(Embedding::new(vec![0.0, 0.0]).is_err());
        assert!(Embedding::new(vec![]).is_err());
        assert!(Embedding::new(vec![f64::NAN, 1.0]).is_err());
        assert!(serde_json::from_str::<Embedding>("[0.0, 0.0]").is_err());
    }

    #[test]
    fn self_similarity_and_scale() {
        let s = orthogonal_store();
        assert_eq!(s.select_prior(&[0.0, 0.0, 0.0, 1.0]).unwrap().0, 3);
        assert_eq!(s.select_prior(&[0.0, 0.5, 0.0, 0.0]).unwrap().0, 1);
        assert_eq!(s.select_prior(&[0.0, 7.0, 0.1, 0.0]).unwrap().1.id, "e1");
    }

    #[test]
    fn ties_go_to_first_entry() {
        let s = orthogonal_store();
        assert_eq!(s.select_prior(&[0.0, 1.0, 1.0, 0.0]).unwrap().0, 1);
    }

    #[test]
    fn lookup_errors() {
        let empty = PriorStore::new(2, 4);
        assert!(matches!(empty.select_prior(&[1.0, 0.0, 0.0, 0.0]), Err(Error::NotFound(_))));
        let s = orthogonal_store();
        assert!(matches!(s.select_prior(&[0.0; 4]), Err(Error::Domain(_))));
        assert!(matches!(s.select_prior(&[1.0; 3]), Err(Error::Dimension { .. })));
    }

    #[test]
    fn attach_then_select() {
        let s = orthogonal_store();
        let z = LatentPoint::new(vec![9.0, 8.0]).unwrap();
        let t = s.attach_optimum("e2", z.clone(), 0.3).unwrap();
        let (_, e) = t.select_prior(&[0.0, 0.0, 1.0, 0.0]).unwrap();
        assert_eq!(e.z_star_star, z);
        assert_eq!(e.sigma, 0.3);
        // Original untouched.
        assert_eq!(s.get("e2").unwrap().z_star_star.as_slice(), &[2.0, -2.0]);
        assert!(matches!(s.attach_optimum("nope", z.clone(), 0.2), Err(Error::NotFound(_))));
        let short = LatentPoint::new(vec![1.0]).unwrap();
        assert!(matches!(s.attach_optimum("e0", short, 0.2), Err(Error::Dimension { .. })));
        assert!(s.attach_optimum("e0", z, 0.0).is_err());
    }

    #[test]
    fn degenerate_sigma_returns_mean() {
        let mut e = entry("a", vec![1.0], vec![0.5, -3.0, 2.0]);
        e.sigma = 1e-12;
        let z = e.sample_latent(&mut stream_rng(0, 0));
        for (a, b) in z.as_slice().iter().zip(e.z_star_star.as_slice()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn duplicate_ids_rejected() {
        let mut s = orthogonal_store();
        assert!(s.push(entry("e0", vec![1.0, 0.0, 0.0, 0.0], vec![0.0, 0.0])).is_err());
        s.entries.push(s.entries[0].clone());
        assert!(s.validate().is_err());
    }

    #[test]
    fn save_load_save_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let mut s = PriorStore::new(3, 5);
        let mut rng = stream_rng(8, 0);
        for i in 0..5 {
            let e = normal_vec(&mut rng, 5, 1.0);
            let z = normal_vec(&mut rng, 3, 0.7);
            s.push(entry(&format!("r{i}"), e, z)).unwrap();
        }
        let a = dir.path().join("a.json");
        let b = dir.path().join("b.json");
        s.save(&a).unwrap();
        let loaded = PriorStore::load(&a).unwrap();
        assert_eq!(loaded, s);
        loaded.save(&b).unwrap();
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    }

    #[test]
    fn store_file_shape() {
        let s = orthogonal_store();
        let v: serde_json::Value = serde_json::from_str(&s.to_json().unwrap()).unwrap();
        assert_eq!(v["format_version"], 1);
        assert_eq!(v["latent_dim"], 2);
        assert_eq!(v["embedding_dim"], 4);
        let e = &v["entries"][0];
        for key in ["id", "text", "embedding", "z_star_star", "sigma"] {
            assert!(e.get(key).is_some(), "missing {key}");
        }
    }

    #[test]
    fn ingestion_lines() {
        let text = "{\"id\":\"a\",\"text\":\"walk\",\"embedding\":[1.0,0.0]}\n\n{\"id\":\"b\",\"text\":\"run\",\"embedding\":[0.0,2.0]}\n";
        let recs = read_embedding_records(text.as_bytes()).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[1].embedding.as_slice(), &[0.0, 2.0]);
        assert!(read_embedding_records("{\"id\":\"a\",\"text\":\"x\",\"embedding\":[0.0]}".as_bytes()).is_err());
    }
}
