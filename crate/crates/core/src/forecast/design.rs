//! Regressor matrices over panel weeks, including lagged covariate columns
//! named `<id>@lag<k>`.

use crate::error::{Error, Result};
use crate::timeseries::{Panel, WeekIndex};

/// Splits a column name into its underlying series id and lag.
pub fn parse_lagged(name: &str) -> (&str, i64) {
    match name.rsplit_once("@lag") {
        Some((id, k)) => match k.parse() {
            Ok(k) => (id, k),
            Err(_) => (name, 0),
        },
        None => (name, 0),
    }
}

pub fn lagged_name(id: &str, lag: i64) -> String {
    format!("{id}@lag{lag}")
}

/// All candidate regressors over the full panel span, cells possibly
/// missing. Fitting windows are carved out of this with [`window_design`].
#[derive(Debug, Clone)]
pub struct DesignBase {
    pub weeks: Vec<WeekIndex>,
    pub columns: Vec<String>,
    /// Column-major cells over all weeks.
    pub cells: Vec<Vec<Option<f64>>>,
    pub y: Vec<Option<f64>>,
}

impl DesignBase {
    pub fn n_weeks(&self) -> usize {
        self.weeks.len()
    }
}

/// Builds the candidate design from a filtered panel: every covariate as-is
/// plus one lagged copy per significant lead (covariate id, lead weeks).
pub fn build_design(panel: &Panel, leads: &[(String, i64)]) -> DesignBase {
    let n = panel.n_weeks();
    let weeks: Vec<WeekIndex> = panel.target().weeks().collect();
    let mut columns = Vec::new();
    let mut cells: Vec<Vec<Option<f64>>> = Vec::new();
    for cov in panel.covariates() {
        columns.push(cov.id.clone());
        cells.push(cov.values().to_vec());
    }
    for (id, lag) in leads {
        let Some(cov) = panel.get(id) else { continue };
        if *lag <= 0 {
            continue;
        }
        columns.push(lagged_name(id, *lag));
        cells.push(
            (0..n)
                .map(|i| {
                    let j = i as i64 - lag;
                    if j < 0 {
                        None
                    } else {
                        cov.value_at(j as usize)
                    }
                })
                .collect(),
        );
    }
    DesignBase {
        weeks,
        columns,
        cells,
        y: panel.target().values().to_vec(),
    }
}

/// A complete-case fitting matrix: rows are weeks with the target and every
/// retained column observed; columns constant over those rows are dropped
/// (they carry no information and cannot be standardized).
#[derive(Debug, Clone)]
pub struct DesignMatrix {
    pub weeks: Vec<WeekIndex>,
    pub columns: Vec<String>,
    /// Column-major values, all finite.
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
}

impl DesignMatrix {
    pub fn n_rows(&self) -> usize {
        self.y.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }
}

/// Extracts rows `[start_idx, start_idx + len)` of the base as a
/// complete-case matrix. `min_rows` guards against unusable windows.
pub fn window_design(
    base: &DesignBase,
    start_idx: usize,
    len: usize,
    min_rows: usize,
) -> Result<DesignMatrix> {
    let end = (start_idx + len).min(base.n_weeks());
    if start_idx >= end {
        return Err(Error::EmptyRange);
    }
    // Complete rows: y present; column cells decide column retention below,
    // so first find rows where y exists, then keep columns fully observed on
    // those rows, then re-restrict rows to completeness of kept columns.
    let candidate_rows: Vec<usize> = (start_idx..end).filter(|i| base.y[*i].is_some()).collect();
    if candidate_rows.len() < min_rows {
        return Err(Error::InsufficientData(format!(
            "window has {} usable rows, need {}",
            candidate_rows.len(),
            min_rows
        )));
    }
    let mut columns = Vec::new();
    let mut x: Vec<Vec<f64>> = Vec::new();
    for (j, name) in base.columns.iter().enumerate() {
        let col: Vec<Option<f64>> = candidate_rows.iter().map(|i| base.cells[j][*i]).collect();
        if col.iter().any(|v| v.is_none()) {
            continue; // column unusable in this window
        }
        let vals: Vec<f64> = col.into_iter().map(|v| v.unwrap()).collect();
        let first = vals[0];
        if vals.iter().all(|v| (*v - first).abs() < 1e-12) {
            continue; // constant in-window
        }
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("design column"));
        }
        columns.push(name.clone());
        x.push(vals);
    }
    let y: Vec<f64> = candidate_rows.iter().map(|i| base.y[*i].unwrap()).collect();
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("target"));
    }
    Ok(DesignMatrix {
        weeks: candidate_rows.iter().map(|i| base.weeks[*i]).collect(),
        columns,
        x,
        y,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timeseries::{align, AlignRange, WeeklySeries};

    fn wk(y: i32, w: u32) -> WeekIndex {
        WeekIndex::new(y, w).unwrap()
    }

    fn panel() -> Panel {
        let t = WeeklySeries::new(
            "applicant.DE",
            None,
            wk(2018, 1),
            (0..10).map(|i| Some(i as f64)).collect(),
        )
        .unwrap();
        let c = WeeklySeries::new(
            "gt.Visa",
            None,
            wk(2018, 1),
            (0..10).map(|i| Some((i * i) as f64)).collect(),
        )
        .unwrap();
        align(vec![t, c], AlignRange::Union, "applicant.DE").unwrap()
    }

    #[test]
    fn lag_columns_shift_back() {
        let base = build_design(&panel(), &[("gt.Visa".to_string(), 3)]);
        assert_eq!(base.columns, vec!["gt.Visa", "gt.Visa@lag3"]);
        assert_eq!(base.cells[1][2], None);
        assert_eq!(base.cells[1][3], Some(0.0));
        assert_eq!(base.cells[1][9], Some(36.0));
    }

    #[test]
    fn window_drops_incomplete_and_constant() {
        let mut base = build_design(&panel(), &[("gt.Visa".to_string(), 3)]);
        // Add a constant column to check it gets dropped.
        base.columns.push("const".into());
        base.cells.push(vec![Some(2.0); 10]);
        let d = window_design(&base, 0, 10, 2).unwrap();
        // The lagged column has missing cells in rows 0..3, so it goes; the
        // constant column goes too.
        assert_eq!(d.columns, vec!["gt.Visa"]);
        assert_eq!(d.n_rows(), 10);
        let d = window_design(&base, 4, 6, 2).unwrap();
        assert_eq!(d.columns, vec!["gt.Visa", "gt.Visa@lag3"]);
        assert_eq!(d.n_rows(), 6);
    }

    #[test]
    fn parse_round_trip() {
        assert_eq!(parse_lagged("gt.Visa@lag4"), ("gt.Visa", 4));
        assert_eq!(parse_lagged("gt.Visa"), ("gt.Visa", 0));
        assert_eq!(lagged_name("x", 2), "x@lag2");
        assert_eq!(parse_lagged("weird@lagX"), ("weird@lagX", 0));
    }
}
