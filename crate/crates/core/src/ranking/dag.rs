use serde::{Deserialize, Serialize};

use super::feedback::{FeedbackKind, RankFeedback};
use crate::error::{Error, Result};

/// Comparison graph over `node_count` candidates. Edge `(i, j)` records that
/// candidate `i` was judged better (lower objective) than candidate `j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonDag {
    pub node_count: usize,
    pub edges: Vec<(usize, usize)>,
}

impl ComparisonDag {
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Same graph with every edge flipped.
    pub fn reversed(&self) -> Self {
        Self {
            node_count: self.node_count,
            edges: self.edges.iter().map(|&(i, j)| (j, i)).collect(),
        }
    }
}

/// Builds the comparison graph implied by a (partial) ranking.
///
/// Ranked items are totally ordered among themselves and each one beats every
/// unranked item. Unranked items stay mutually incomparable, so a ranking of
/// depth `k` yields `k(k-1)/2 + k(m-k)` edges.
pub fn build_comparison_dag(m: usize, feedback: &RankFeedback) -> Result<ComparisonDag> {
    if feedback.kind == FeedbackKind::AcceptAndExit {
        return Err(Error::UnsupportedFeedback(
            "accept-and-exit carries no comparison information".into(),
        ));
    }
    feedback.validate(m)?;
    let ranked = &feedback.ranking;
    let mut is_ranked = vec![false; m];
    for &r in ranked {
        is_ranked[r] = true;
    }
    let k = ranked.len();
    let mut edges = Vec::with_capacity(k * (k - 1) / 2 + k * (m - k));
    for (a, &better) in ranked.iter().enumerate() {
        for &worse in &ranked[a + 1..] {
            edges.push((better, worse));
        }
        for j in (0..m).filter(|&j| !is_ranked[j]) {
            edges.push((better, j));
        }
    }
    Ok(ComparisonDag { node_count: m, edges })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn edge_set(dag: &ComparisonDag) -> BTreeSet<(usize, usize)> {
        dag.edges.iter().copied().collect()
    }

    #[test]
    fn total_order_yields_all_pairs() {
        let dag = build_comparison_dag(4, &RankFeedback::full(vec![2, 0, 3, 1])).unwrap();
        let want: BTreeSet<_> = [(2, 0), (2, 3), (2, 1), (0, 3), (0, 1), (3, 1)].into();
        assert_eq!(edge_set(&dag), want);
        assert_eq!(dag.edge_count(), 6);
    }

    #[test]
    fn best_only_is_best_vs_rest() {
        let dag = build_comparison_dag(4, &RankFeedback::best_only(3)).unwrap();
        let want: BTreeSet<_> = [(3, 0), (3, 1), (3, 2)].into();
        assert_eq!(edge_set(&dag), want);
    }

    #[test]
    fn partial_ranking_edges() {
        let dag = build_comparison_dag(5, &RankFeedback::full(vec![4, 1])).unwrap();
        let want: BTreeSet<_> =
            [(4, 1), (4, 0), (4, 2), (4, 3), (1, 0), (1, 2), (1, 3)].into();
        assert_eq!(edge_set(&dag), want);
        assert_eq!(dag.edge_count(), 1 + 6);
    }

    #[test]
    fn rejects_bad_indices() {
        assert!(matches!(
            build_comparison_dag(4, &RankFeedback::full(vec![0, 0])),
            Err(Error::Feedback(_))
        ));
        assert!(matches!(
            build_comparison_dag(4, &RankFeedback::full(vec![0, 9])),
            Err(Error::Feedback(_))
        ));
        assert!(build_comparison_dag(4, &RankFeedback::accept(0)).is_err());
    }

    #[test]
    fn edge_count_formula_and_acyclicity() {
        for m in 2..7 {
            for k in 1..=m {
                let fb = if k == 1 {
                    RankFeedback::best_only(m - 1)
                } else {
                    RankFeedback::full((0..k).rev().collect())
                };
                let dag = build_comparison_dag(m, &fb).unwrap();
                assert_eq!(dag.edge_count(), k * (k - 1) / 2 + k * (m - k));
                // Position in the ranking (unranked last) strictly increases along edges.
                let pos = |i: usize| fb.ranking.iter().position(|&r| r == i).unwrap_or(m);
                assert!(dag.edges.iter().all(|&(i, j)| pos(i) < pos(j)));
            }
        }
    }
}
