//! Week-indexed series, frequency alignment, moving averages, and the basic
//! statistics every downstream stage leans on.

mod ops;
mod panel;
mod series;
pub mod stats;
mod week;

pub use ops::{
    aggregate_daily_to_weekly, coefficient_of_variation, interpolate_monthly_to_weekly,
    moving_average,
};
pub use panel::{align, AlignRange, Panel};
pub use series::{
    format_month, months_to_weeks, parse_date, parse_month, MonthlySeries, WeeklySeries,
};
pub use week::WeekIndex;
