//! Weighted event indices: raw event records in, five weekly macro-category
//! indices per origin country out, plus the composite Push Factor Index.

mod index;
mod table;

pub use index::{
    compute_indices, dedupe_events, push_factor_index, CountryIndices, EventIndexSet, EventRecord,
};
pub use table::{Category, EventWeight, EventWeightTable, Lookup};
