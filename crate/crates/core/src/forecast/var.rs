//! First-order vector autoregression fitted by per-equation least squares,
//! with a companion-eigenvalue stability check.

use nalgebra::{DMatrix, DVector};

/// z_t = intercept + coef * z_{t-1}.
#[derive(Debug, Clone)]
pub struct VarFit {
    pub intercept: DVector<f64>,
    pub coef: DMatrix<f64>,
}

impl VarFit {
    /// All eigenvalues of the coefficient matrix strictly inside the unit
    /// circle. An unstable fit would explode under iteration.
    pub fn is_stable(&self) -> bool {
        self.coef
            .complex_eigenvalues()
            .iter()
            .all(|e| e.norm() < 1.0 - 1e-9)
    }

    /// Iterates the recursion `horizon` steps from `last`.
    pub fn forecast(&self, last: &DVector<f64>, horizon: usize) -> Vec<DVector<f64>> {
        let mut out = Vec::with_capacity(horizon);
        let mut state = last.clone();
        for _ in 0..horizon {
            state = &self.intercept + &self.coef * &state;
            out.push(state.clone());
        }
        out
    }
}

/// Fits a VAR(1) on `rows` (time-ordered, one Vec per week, all the same
/// length). Returns `None` when there are too few rows for the parameter
/// count or the regression is numerically unusable.
pub fn fit_var1(rows: &[Vec<f64>]) -> Option<VarFit> {
    let t = rows.len();
    let p = rows.first()?.len();
    if p == 0 || t < p + 2 {
        return None;
    }
    if rows.iter().any(|r| r.len() != p || r.iter().any(|v| !v.is_finite())) {
        return None;
    }
    let n_eq = t - 1;
    // Regressors: [1, z_{t-1}]; responses z_t.
    let mut w = DMatrix::zeros(n_eq, p + 1);
    let mut y = DMatrix::zeros(n_eq, p);
    for i in 0..n_eq {
        w[(i, 0)] = 1.0;
        for j in 0..p {
            w[(i, j + 1)] = rows[i][j];
            y[(i, j)] = rows[i + 1][j];
        }
    }
    let svd = w.svd(true, true);
    let solution = svd.solve(&y, 1e-10).ok()?;
    if solution.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let intercept = DVector::from_iterator(p, (0..p).map(|j| solution[(0, j)]));
    let coef = DMatrix::from_fn(p, p, |r, c| solution[(c + 1, r)]);
    Some(VarFit { intercept, coef })
}
