//! Traffic-light performance classes from mean relative and absolute
//! errors. Magnitudes of the means are classified; clauses are evaluated in
//! a fixed order (very good, good, poor, very poor), first match wins, so
//! the legend's overlaps and gaps resolve deterministically:
//!
//! very good: rel < 10%  or  abs < 10
//! good:      (otherwise) abs <= 20
//! poor:      (otherwise) abs <= 40
//! very poor: everything else

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TrafficClass {
    VeryGood,
    Good,
    Poor,
    VeryPoor,
}

impl fmt::Display for TrafficClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TrafficClass::VeryGood => "very good",
            TrafficClass::Good => "good",
            TrafficClass::Poor => "poor",
            TrafficClass::VeryPoor => "very poor",
        })
    }
}

/// Classifies mean relative error (in percent) and mean absolute error.
pub fn traffic_light(mean_rel_pct: f64, mean_abs: f64) -> TrafficClass {
    let rel = mean_rel_pct.abs();
    let abs = mean_abs.abs();
    if rel < 10.0 || abs < 10.0 {
        TrafficClass::VeryGood
    } else if abs <= 20.0 {
        TrafficClass::Good
    } else if abs <= 40.0 {
        TrafficClass::Poor
    } else {
        TrafficClass::VeryPoor
    }
}
