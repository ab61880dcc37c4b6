use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::grid::AreaGrid;
use super::IngestError;

pub const SECONDS_PER_DAY: u32 = 86_400;

/// One timestamped vehicle observation in projected map coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    /// Seconds since midnight.
    pub timestamp: u32,
    pub vehicle_id: String,
    pub x: f64,
    pub y: f64,
    pub speed_mps: f64,
}

/// A record together with the index of the grid area containing it.
#[derive(Debug, Clone, PartialEq)]
pub struct TaggedRecord {
    pub record: TraceRecord,
    pub area: Option<usize>,
}

/// Column layout of a trace file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Columns {
    /// `timestamp,vehicle_id,x,y,speed`
    #[default]
    Projected,
    /// `timestamp,vehicle_id,lat,lon,speed`
    Geo,
}

impl Columns {
    pub fn header(self) -> [&'static str; 5] {
        match self {
            Columns::Projected => ["timestamp", "vehicle_id", "x", "y", "speed"],
            Columns::Geo => ["timestamp", "vehicle_id", "lat", "lon", "speed"],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParsedTrace {
    pub records: Vec<TaggedRecord>,
    pub malformed: usize,
    /// 1-based file line of the first malformed record.
    pub first_malformed_line: Option<u64>,
}

impl ParsedTrace {
    pub fn lines(&self) -> usize {
        self.records.len() + self.malformed
    }
}

fn parse_fields(fields: &csv::StringRecord) -> Option<(u32, String, f64, f64, f64)> {
    if fields.len() != 5 {
        return None;
    }
    let timestamp: u32 = fields[0].trim().parse().ok()?;
    let vehicle_id = fields[1].trim();
    let a: f64 = fields[2].trim().parse().ok()?;
    let b: f64 = fields[3].trim().parse().ok()?;
    let speed: f64 = fields[4].trim().parse().ok()?;
    let valid = timestamp < SECONDS_PER_DAY
        && !vehicle_id.is_empty()
        && a.is_finite()
        && b.is_finite()
        && speed.is_finite()
        && speed >= 0.0;
    valid.then(|| (timestamp, vehicle_id.to_string(), a, b, speed))
}

/// Parses a trace CSV and tags each record with its grid area.
///
/// Malformed lines are counted and skipped. If more than half of the data
/// lines are malformed the input is rejected as the wrong kind of file.
pub fn parse_trace<R: Read>(source: R, grid: &AreaGrid, columns: Columns) -> Result<ParsedTrace, IngestError> {
    if columns == Columns::Geo && grid.geo_origin().is_none() {
        return Err(IngestError::MissingGeoOrigin);
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(source);
    let header = reader.headers().map_err(|e| csv_error(e, 1))?.clone();
    let expected = columns.header();
    if header.len() != expected.len() || header.iter().zip(expected).any(|(h, e)| h.trim() != e) {
        return Err(IngestError::Format {
            line: 1,
            message: format!("expected header {}, found {}", expected.join(","), header.iter().collect::<Vec<_>>().join(",")),
        });
    }

    let mut parsed = ParsedTrace::default();
    let mut fields = csv::StringRecord::new();
    loop {
        let line = reader.position().line();
        match reader.read_record(&mut fields) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) if e.is_io_error() => return Err(csv_error(e, line)),
            Err(_) => {
                parsed.malformed += 1;
                parsed.first_malformed_line.get_or_insert(line);
                continue;
            }
        }
        let Some((timestamp, vehicle_id, a, b, speed_mps)) = parse_fields(&fields) else {
            parsed.malformed += 1;
            parsed.first_malformed_line.get_or_insert(line);
            continue;
        };
        let (x, y) = match columns {
            Columns::Projected => (a, b),
            Columns::Geo => grid.project(a, b)?,
        };
        let area = grid.locate(x, y);
        parsed.records.push(TaggedRecord {
            record: TraceRecord {
                timestamp,
                vehicle_id,
                x,
                y,
                speed_mps,
            },
            area,
        });
    }

    if parsed.malformed * 2 > parsed.lines() {
        return Err(IngestError::Format {
            line: parsed.first_malformed_line.unwrap_or(1),
            message: format!("{} of {} lines malformed", parsed.malformed, parsed.lines()),
        });
    }
    Ok(parsed)
}

fn csv_error(e: csv::Error, line: u64) -> IngestError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => IngestError::Io(io),
        other => IngestError::Format {
            line,
            message: format!("{other:?}"),
        },
    }
}

/// Writes records in the projected column layout. Coordinates are written
/// with centimeter precision and speeds with four decimals.
pub fn write_trace<W: Write>(out: W, records: &[TraceRecord]) -> Result<(), IngestError> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(Columns::Projected.header())?;
    for r in records {
        writer.write_record([
            r.timestamp.to_string(),
            r.vehicle_id.clone(),
            format!("{:.2}", r.x),
            format!("{:.2}", r.y),
            format!("{:.4}", r.speed_mps),
        ])?;
    }
    writer.flush()?;
    Ok(())
}
