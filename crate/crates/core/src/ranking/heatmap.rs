//! The week-by-variable importance matrix with persistence-ordered columns.

use serde::{Deserialize, Serialize};

use crate::ranking::rank::ImportanceRow;
use crate::timeseries::WeekIndex;

/// Matrix of rank scores (rows = as-of weeks) plus the inclusion mask that
/// separates "worst active" (score 0, included) from "not selected".
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HeatmapMatrix {
    pub weeks: Vec<WeekIndex>,
    /// Variables ordered by the week centroid of their score mass: columns
    /// that mattered early sort before columns that mattered late.
    pub columns: Vec<String>,
    /// Row-major scores, weeks x columns.
    pub scores: Vec<Vec<f64>>,
    /// Row-major inclusion flags.
    pub included: Vec<Vec<bool>>,
}

/// Assembles rows into the matrix. Variables never included anywhere are
/// dropped entirely; an all-empty input yields an empty column set.
pub fn heatmap_matrix(rows: &[ImportanceRow]) -> HeatmapMatrix {
    let weeks: Vec<WeekIndex> = rows.iter().map(|r| r.as_of).collect();
    let mut names: Vec<String> = Vec::new();
    for r in rows {
        for name in r.scores.keys() {
            if !names.contains(name) {
                names.push(name.clone());
            }
        }
    }
    // Centroid of score mass over row positions; inclusion positions break
    // the tie for columns whose scores are all zero, then the mean score
    // (descending), then the name.
    let stat = |name: &str| -> (f64, f64) {
        let mut mass = 0.0;
        let mut weighted = 0.0;
        let mut incl_sum = 0.0;
        let mut incl_n = 0.0;
        let mut score_sum = 0.0;
        for (t, r) in rows.iter().enumerate() {
            let s = r.score(name);
            mass += s;
            weighted += s * t as f64;
            score_sum += s;
            if r.included(name) {
                incl_sum += t as f64;
                incl_n += 1.0;
            }
        }
        let centroid = if mass > 0.0 {
            weighted / mass
        } else if incl_n > 0.0 {
            incl_sum / incl_n
        } else {
            f64::INFINITY
        };
        (centroid, score_sum / rows.len().max(1) as f64)
    };
    let mut ordered: Vec<(String, (f64, f64))> =
        names.into_iter().map(|n| { let s = stat(&n); (n, s) }).collect();
    ordered.sort_by(|a, b| {
        a.1 .0
            .total_cmp(&b.1 .0)
            .then(b.1 .1.total_cmp(&a.1 .1))
            .then(a.0.cmp(&b.0))
    });
    let columns: Vec<String> = ordered.into_iter().map(|(n, _)| n).collect();
    let scores = rows
        .iter()
        .map(|r| columns.iter().map(|c| r.score(c)).collect())
        .collect();
    let included = rows
        .iter()
        .map(|r| columns.iter().map(|c| r.included(c)).collect())
        .collect();
    HeatmapMatrix {
        weeks,
        columns,
        scores,
        included,
    }
}
