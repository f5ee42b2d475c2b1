//! Dense real vectors used as latent points.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in the latent space being searched.
///
/// Serializes as a bare JSON array of numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatentPoint(Vec<f64>);

impl LatentPoint {
    /// Wraps `values`, rejecting non-finite entries.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("latent coordinate {i} is not finite")));
        }
        Ok(Self(values))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub(crate) fn from_vec_unchecked(values: Vec<f64>) -> Self {
        Self(values)
    }
}

impl AsRef<[f64]> for LatentPoint {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite() {
        assert!(LatentPoint::new(vec![0.0, f64::NAN]).is_err());
        assert!(LatentPoint::new(vec![f64::INFINITY]).is_err());
        assert_eq!(LatentPoint::new(vec![1.0, 2.0]).unwrap().dim(), 2);
    }

    #[test]
    fn serializes_as_array() {
        let p = LatentPoint::new(vec![0.5, -1.25]).unwrap();
        assert_eq!(serde_json::to_string(&p).unwrap(), "[0.5,-1.25]");
    }
}
