//! Small statistics helpers shared across the crate. All of them ignore
//! missing entries.

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample variance (n - 1 denominator). Needs at least two values.
pub fn sample_var(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

pub fn sample_sd(xs: &[f64]) -> f64 {
    sample_var(xs).sqrt()
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Values of the non-missing entries, in order.
pub fn present(values: &[Option<f64>]) -> Vec<f64> {
    values.iter().filter_map(|v| *v).collect()
}

/// Pearson correlation over the pairwise non-missing entries.
/// `None` when fewer than `min_pairs` overlap or either side is constant.
pub fn pearson(
    xs: &[Option<f64>],
    ys: &[Option<f64>],
    min_pairs: usize,
) -> Option<f64> {
    let pairs: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys.iter())
        .filter_map(|(x, y)| Some(((*x)?, (*y)?)))
        .collect();
    if pairs.len() < min_pairs.max(2) {
        return None;
    }
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (x, y) in &pairs {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

/// Slope of the least-squares line through (0, y_0) .. (n-1, y_{n-1}),
/// missing entries skipped. `None` with fewer than two points.
pub fn ols_slope(values: &[Option<f64>]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = values
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.map(|y| (i as f64, y)))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn basics() {
        assert_abs_diff_eq!(mean(&[1.0, 3.0]), 2.0);
        assert_abs_diff_eq!(sample_sd(&[1.0, 3.0]), 2f64.sqrt());
        assert_abs_diff_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_abs_diff_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn pearson_perfect_and_degenerate() {
        let x = [Some(1.0), Some(2.0), None, Some(4.0)];
        let y = [Some(2.0), Some(4.0), Some(0.0), Some(8.0)];
        assert_abs_diff_eq!(pearson(&x, &y, 3).unwrap(), 1.0, epsilon = 1e-12);
        let c = [Some(5.0), Some(5.0), Some(5.0), Some(5.0)];
        assert!(pearson(&c, &y, 3).is_none());
        assert!(pearson(&x[..2], &y[..2], 3).is_none());
    }

    #[test]
    fn slope_signs() {
        let up: Vec<Option<f64>> = (0..10).map(|i| Some(i as f64)).collect();
        assert!(ols_slope(&up).unwrap() > 0.0);
        let down: Vec<Option<f64>> = (0..10).map(|i| Some(-(i as f64))).collect();
        assert!(ols_slope(&down).unwrap() < 0.0);
        assert_abs_diff_eq!(ols_slope(&[Some(5.0), Some(5.0)]).unwrap(), 0.0);
    }
}
