//! Mobility trace ingestion: area grid, trace parsing, hourly demand
//! aggregation and synthetic trace generation.

mod aggregate;
mod grid;
mod synth;
mod trace;

use thiserror::Error;

pub use aggregate::{
    aggregate_hourly, read_demand, write_demand, HourlyDemand, DEMAND_HEADER, HOURS, WINDOWS_PER_HOUR, WINDOW_S,
};
pub use grid::{Area, AreaGrid, GeoOrigin, DEFAULT_SIDE_M};
pub use synth::{synthesize_trace, SynthProfile, Target};
pub use trace::{parse_trace, write_trace, Columns, ParsedTrace, TaggedRecord, TraceRecord, SECONDS_PER_DAY};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Format { line: u64, message: String },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("geographic columns require a grid with a geo_origin")]
    MissingGeoOrigin,
    #[error("invalid synthetic profile: {0}")]
    InvalidProfile(String),
    #[error("area {0} is not part of the grid")]
    UnknownArea(String),
}

impl From<csv::Error> for IngestError {
    fn from(e: csv::Error) -> Self {
        let line = e.position().map(|p| p.line()).unwrap_or(0);
        match e.into_kind() {
            csv::ErrorKind::Io(io) => IngestError::Io(io),
            other => IngestError::Format {
                line,
                message: format!("{other:?}"),
            },
        }
    }
}
