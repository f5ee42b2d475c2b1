use super::dag::ComparisonDag;
use super::feedback::{FeedbackKind, RankFeedback};
use crate::error::{check_dim, Error, Result};
use crate::latent::LatentPoint;

/// Rank-based gradient estimate: the mean over edges `(i, j)` of
/// `(x_j - x_i) / mu`.
///
/// Edges point from the better to the worse point, so the result approximates
/// an ascent direction of the hidden objective. Only candidate differences
/// enter, which makes the estimate invariant to translating all candidates.
pub fn estimate_gradient(points: &[LatentPoint], dag: &ComparisonDag, mu: f64) -> Result<Vec<f64>> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::Domain(format!("smoothing parameter must be positive, got {mu}")));
    }
    check_dim(dag.node_count, points.len())?;
    if dag.edges.is_empty() {
        return Err(Error::DegenerateFeedback(
            "comparison graph has no edges; supply k >= 2 or best-only with m >= 2".into(),
        ));
    }
    let d = points[0].dim();
    for p in points {
        check_dim(d, p.dim())?;
    }
    let mut sum = vec![0.0; d];
    for &(better, worse) in &dag.edges {
        if better >= points.len() || worse >= points.len() {
            return Err(Error::Feedback(format!("edge ({better}, {worse}) out of range")));
        }
        let (xb, xw) = (points[better].as_slice(), points[worse].as_slice());
        for ((s, w), b) in sum.iter_mut().zip(xw).zip(xb) {
            *s += (w - b) / mu;
        }
    }
    let n = dag.edges.len() as f64;
    Ok(sum.into_iter().map(|s| s / n).collect())
}

/// Softmax weights over ranking positions.
///
/// The candidate ranked `r`-th (1-based) gets score `k + 1 - r`; unranked
/// candidates score 0. Weights sum to one.
pub fn rank_weights(m: usize, feedback: &RankFeedback) -> Result<Vec<f64>> {
    feedback.validate(m)?;
    let k = feedback.len();
    let mut scores = vec![0.0; m];
    for (r, &i) in feedback.ranking.iter().enumerate() {
        scores[i] = (k - r) as f64;
    }
    let top = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|s| (s - top).exp()).collect();
    let total: f64 = exps.iter().sum();
    Ok(exps.into_iter().map(|e| e / total).collect())
}

/// Softmax-weighted average of the candidates under a total ranking.
pub fn weighted_reference(points: &[LatentPoint], feedback: &RankFeedback) -> Result<LatentPoint> {
    let total = feedback.kind == FeedbackKind::FullRanking && feedback.len() == points.len();
    if points.len() == 1 && feedback.ranking == [0] {
        return Ok(points[0].clone());
    }
    if !total {
        return Err(Error::UnsupportedFeedback(format!(
            "weighted reference needs a total ranking of all {} candidates, got {:?} of length {}",
            points.len(),
            feedback.kind,
            feedback.len()
        )));
    }
    blend(points, &rank_weights(points.len(), feedback)?)
}

/// Like [`weighted_reference`] but also accepts partial rankings, giving the
/// unranked candidates the lowest score.
pub(crate) fn weighted_reference_partial(
    points: &[LatentPoint],
    feedback: &RankFeedback,
) -> Result<LatentPoint> {
    blend(points, &rank_weights(points.len(), feedback)?)
}

fn blend(points: &[LatentPoint], weights: &[f64]) -> Result<LatentPoint> {
    let d = points[0].dim();
    let mut out = vec![0.0; d];
    for (p, &w) in points.iter().zip(weights) {
        check_dim(d, p.dim())?;
        for (o, x) in out.iter_mut().zip(p.as_slice()) {
            *o += w * x;
        }
    }
    Ok(LatentPoint::from_vec_unchecked(out))
}
