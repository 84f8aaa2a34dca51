//! Relative ranks of raw importances: rank-based scores in [0, 1] that are
//! comparable across weeks with different active-set sizes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::timeseries::WeekIndex;

/// Scores for one as-of week. Variables absent from `scores` were not in
/// the active set; active variables carry 1 for the top rank down to 0 for
/// the worst (the included/excluded distinction is carried by membership,
/// not by the score value).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ImportanceRow {
    pub as_of: WeekIndex,
    pub scores: BTreeMap<String, f64>,
}

impl ImportanceRow {
    pub fn score(&self, variable: &str) -> f64 {
        self.scores.get(variable).copied().unwrap_or(0.0)
    }

    pub fn included(&self, variable: &str) -> bool {
        self.scores.contains_key(variable)
    }
}

/// Converts raw importances into rank scores: descending rank r in 1..=p
/// maps to 1 - (r - 1) / max(p - 1, 1); tied raw values share the mean of
/// their positions' scores.
pub fn relative_rank(as_of: WeekIndex, raw: &[(String, f64)]) -> ImportanceRow {
    let p = raw.len();
    let mut scores = BTreeMap::new();
    if p == 0 {
        return ImportanceRow { as_of, scores };
    }
    let denom = (p - 1).max(1) as f64;
    let position_score = |pos: usize| 1.0 - pos as f64 / denom;

    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|a, b| raw[*b].1.total_cmp(&raw[*a].1).then(raw[*a].0.cmp(&raw[*b].0)));
    let mut pos = 0;
    while pos < p {
        let mut end = pos + 1;
        while end < p && raw[order[end]].1 == raw[order[pos]].1 {
            end += 1;
        }
        let mean_score =
            (pos..end).map(position_score).sum::<f64>() / (end - pos) as f64;
        for k in pos..end {
            scores.insert(raw[order[k]].0.clone(), mean_score);
        }
        pos = end;
    }
    ImportanceRow { as_of, scores }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn wk() -> WeekIndex {
        WeekIndex::new(2018, 10).unwrap()
    }

    fn row(raw: &[(&str, f64)]) -> ImportanceRow {
        let raw: Vec<(String, f64)> = raw.iter().map(|(n, v)| (n.to_string(), *v)).collect();
        relative_rank(wk(), &raw)
    }

    #[test]
    fn single_variable_scores_one() {
        let r = row(&[("a", 0.37)]);
        assert_eq!(r.score("a"), 1.0);
        assert_eq!(r.score("missing"), 0.0);
        assert!(r.included("a"));
        assert!(!r.included("missing"));
    }

    #[test]
    fn three_distinct_step_by_half() {
        let r = row(&[("lo", 0.1), ("hi", 0.8), ("mid", 0.5)]);
        assert_eq!(r.score("hi"), 1.0);
        assert_eq!(r.score("mid"), 0.5);
        assert_eq!(r.score("lo"), 0.0);
    }

    #[test]
    fn tied_pair_shares_mean_of_positions() {
        let r = row(&[("a", 0.6), ("b", 0.6), ("c", 0.1)]);
        assert!((r.score("a") - 0.75).abs() < 1e-12);
        assert!((r.score("b") - 0.75).abs() < 1e-12);
        assert_eq!(r.score("c"), 0.0);
    }

    #[test]
    fn empty_active_set_is_empty_row() {
        let r = relative_rank(wk(), &[]);
        assert!(r.scores.is_empty());
    }

    proptest! {
        /// Rank scores are invariant under strictly monotone transforms of
        /// the raw importances.
        #[test]
        fn monotone_transform_invariance(values in proptest::collection::vec(0.0f64..10.0, 1..10)) {
            let raw: Vec<(String, f64)> = values.iter().enumerate()
                .map(|(i, v)| (format!("v{i}"), *v)).collect();
            let transformed: Vec<(String, f64)> = raw.iter()
                .map(|(n, v)| (n.clone(), (v * 3.0 + 1.0).exp())).collect();
            let a = relative_rank(wk(), &raw);
            let b = relative_rank(wk(), &transformed);
            for (name, score) in &a.scores {
                prop_assert!((score - b.score(name)).abs() < 1e-12);
            }
        }

        /// Scores stay inside [0, 1] and the top rank is exactly 1.
        #[test]
        fn scores_bounded(values in proptest::collection::vec(0.0f64..10.0, 1..12)) {
            let raw: Vec<(String, f64)> = values.iter().enumerate()
                .map(|(i, v)| (format!("v{i}"), *v)).collect();
            let r = relative_rank(wk(), &raw);
            for s in r.scores.values() {
                prop_assert!((0.0..=1.0).contains(s));
            }
            let max = r.scores.values().cloned().fold(0.0f64, f64::max);
            // With ties at the top the shared score dips below 1; otherwise
            // the best is exactly 1.
            let top: Vec<&f64> = r.scores.values().filter(|s| **s == max).collect();
            if top.len() == 1 {
                prop_assert_eq!(max, 1.0);
            }
        }
    }
}
