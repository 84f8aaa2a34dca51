//! Importance-only regression random forest: bootstrap rows, a random
//! feature subset per split, exact best-split search, and mean decrease in
//! node variance accumulated per feature. Deterministic for a fixed seed.

use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::forecast::DesignMatrix;
use crate::rng;

#[derive(Debug, Clone, Copy)]
pub struct ForestParams {
    pub n_trees: usize,
    pub min_samples_split: usize,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 200,
            min_samples_split: 2,
        }
    }
}

/// Sum of squared deviations of y over `rows`.
fn node_sse(design: &DesignMatrix, rows: &[usize]) -> f64 {
    let n = rows.len() as f64;
    let mean = rows.iter().map(|i| design.y[*i]).sum::<f64>() / n;
    rows.iter().map(|i| (design.y[*i] - mean).powi(2)).sum()
}

/// Partial Fisher-Yates: the first `k` slots of a fresh index vector.
fn sample_features(rng: &mut ChaCha8Rng, p: usize, k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..p).collect();
    for i in 0..k.min(p) {
        let j = i + rng::uniform_index(rng, p - i);
        idx.swap(i, j);
    }
    idx.truncate(k.min(p));
    idx
}

struct SplitSearch<'a> {
    design: &'a DesignMatrix,
    mtry: usize,
    min_samples_split: usize,
    importance: Vec<f64>,
}

impl SplitSearch<'_> {
    /// Recursively splits `rows`, crediting each split's SSE decrease to the
    /// split feature.
    fn grow(&mut self, rows: &[usize], rng: &mut ChaCha8Rng) {
        if rows.len() < self.min_samples_split {
            return;
        }
        let sse = node_sse(self.design, rows);
        if sse <= 1e-12 {
            return;
        }
        let features = sample_features(rng, self.design.n_cols(), self.mtry);
        let mut best: Option<(f64, usize, f64)> = None; // (decrease, feature, threshold)
        for &j in &features {
            let col = &self.design.x[j];
            let mut order: Vec<usize> = rows.to_vec();
            order.sort_by(|a, b| col[*a].total_cmp(&col[*b]));
            // Incremental left/right sums over the sorted order.
            let total_sum: f64 = order.iter().map(|i| self.design.y[*i]).sum();
            let total_sq: f64 = order.iter().map(|i| self.design.y[*i].powi(2)).sum();
            let n = order.len() as f64;
            let mut left_sum = 0.0;
            let mut left_sq = 0.0;
            for (k, &i) in order.iter().enumerate().take(order.len() - 1) {
                let y = self.design.y[i];
                left_sum += y;
                left_sq += y * y;
                // Only between distinct feature values.
                if col[i] == col[order[k + 1]] {
                    continue;
                }
                let nl = (k + 1) as f64;
                let nr = n - nl;
                let sse_l = left_sq - left_sum * left_sum / nl;
                let sse_r = (total_sq - left_sq) - (total_sum - left_sum).powi(2) / nr;
                let decrease = sse - sse_l - sse_r;
                if best.is_none_or(|(b, _, _)| decrease > b) {
                    best = Some((decrease, j, (col[i] + col[order[k + 1]]) / 2.0));
                }
            }
        }
        let Some((decrease, feature, threshold)) = best else {
            return;
        };
        if decrease <= 0.0 {
            return;
        }
        self.importance[feature] += decrease;
        let (left, right): (Vec<usize>, Vec<usize>) = rows
            .iter()
            .partition(|i| self.design.x[feature][**i] <= threshold);
        if left.is_empty() || right.is_empty() {
            return;
        }
        self.grow(&left, rng);
        self.grow(&right, rng);
    }
}

/// Raw per-variable importances (normalized to sum 1 when positive) from a
/// forest on the active-set design. Errors with fewer than 10 rows; an
/// empty active set yields an empty vector.
pub fn rf_importance(design: &DesignMatrix, seed: u64, params: ForestParams) -> Result<Vec<f64>> {
    if design.n_cols() == 0 {
        return Ok(Vec::new());
    }
    let n = design.n_rows();
    if n < 10 {
        return Err(Error::InsufficientData(format!(
            "random forest needs >= 10 rows, got {n}"
        )));
    }
    let p = design.n_cols();
    let mtry = p.div_ceil(3);
    let mut total = vec![0.0; p];
    for t in 0..params.n_trees {
        let mut rng = rng::rng_for(seed, &["rf-tree", &t.to_string()]);
        let rows: Vec<usize> = (0..n).map(|_| rng::uniform_index(&mut rng, n)).collect();
        let mut search = SplitSearch {
            design,
            mtry,
            min_samples_split: params.min_samples_split,
            importance: vec![0.0; p],
        };
        search.grow(&rows, &mut rng);
        for (acc, imp) in total.iter_mut().zip(&search.importance) {
            *acc += imp / n as f64;
        }
    }
    let sum: f64 = total.iter().sum();
    if sum > 0.0 {
        for v in total.iter_mut() {
            *v /= sum;
        }
    }
    Ok(total)
}
