//! Ex-post relative importance of the selected variables: a seeded random
//! forest ranks the active set week by week, feeding the persistence
//! heatmap.

mod forest;
mod heatmap;
mod rank;

pub use forest::{rf_importance, ForestParams};
pub use heatmap::{heatmap_matrix, HeatmapMatrix};
pub use rank::{relative_rank, ImportanceRow};
