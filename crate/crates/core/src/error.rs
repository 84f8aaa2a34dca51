use thiserror::Error;

/// Coarse classification used by callers that must translate failures into
/// process exit codes: problems with the data on disk versus problems that
/// arise while analysing valid data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Analysis,
}

/// Error type shared by every module in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty series")]
    EmptySeries,
    #[error("insufficient anchors: need at least 2 non-missing monthly values")]
    InsufficientAnchors,
    #[error("window must be at least 1 week")]
    InvalidWindow,
    #[error("undefined cv: series mean is zero")]
    UndefinedCv,
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("invalid week '{0}'")]
    InvalidWeek(String),
    #[error("invalid month '{0}'")]
    InvalidMonth(String),
    #[error("invalid date '{0}'")]
    InvalidDate(String),
    #[error("series '{0}' not found")]
    SeriesNotFound(String),
    #[error("empty panel")]
    EmptyPanel,
    #[error("empty week range")]
    EmptyRange,
    #[error("disjoint ranges: requested intersection is empty")]
    DisjointRanges,
    #[error("invalid weight table: {0}")]
    InvalidWeightTable(String),
    #[error("degenerate series: no increments to correlate")]
    NoIncrements,
    #[error("lead-lag contrast undefined at every lag")]
    ContrastUndefined,
    #[error("no statistically significant lag")]
    NoSignificantLag,
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("coordinate descent failed to converge after {sweeps} sweeps (last max change {last_change:.3e})")]
    NoConvergence { sweeps: usize, last_change: f64 },
    #[error("all-zero target: lambda grid undefined")]
    ZeroTarget,
    #[error("insufficient history: {0}")]
    InsufficientHistory(String),
    #[error("dyad filtered out: {0}")]
    DyadFiltered(String),
    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("{file}:{line}: {msg}")]
    MalformedRow {
        file: String,
        line: u64,
        msg: String,
    },
    #[error("no target data: applications file is empty")]
    NoTargetData,
    #[error("missing input: {0}")]
    MissingInput(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            InvalidWeek(_) | InvalidMonth(_) | InvalidDate(_) | InvalidWeightTable(_)
            | InvalidConfig(_) | MalformedRow { .. } | NoTargetData | MissingInput(_)
            | InvalidSpec(_) | Io(_) | Csv(_) | Json(_) => ErrorKind::Input,
            _ => ErrorKind::Analysis,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
