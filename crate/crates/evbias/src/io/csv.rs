//! Plain-text event CSV: header `x,y,t,p`, one event per line, decimal
//! fields, polarity written as 0/1. The dialect carries no geometry, so
//! readers must be told the sensor dimensions.

use crate::event::{Event, EventStream, Polarity, SensorGeometry};
use crate::io::OrderPolicy;

pub const CSV_HEADER: &str = "x,y,t,p";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CsvError {
    #[error("missing or malformed header line {0:?} (expected \"x,y,t,p\")")]
    BadHeader(String),
    #[error("line {line}: expected 4 comma-separated fields, found {found}")]
    FieldCount { line: usize, found: usize },
    #[error("line {line}: field {field:?} is not a valid {what}")]
    BadField {
        line: usize,
        field: String,
        what: &'static str,
    },
    #[error("line {line}: polarity {value} (must be 0 or 1)")]
    BadPolarity { line: usize, value: String },
    #[error("line {line}: coordinates ({x},{y}) outside {width}x{height} sensor")]
    CoordOutOfRange {
        line: usize,
        x: u16,
        y: u16,
        width: u16,
        height: u16,
    },
    #[error("line {line} violates canonical (t, y, x, p) order")]
    OrderViolation { line: usize },
}

/// Serializes a stream as CSV text. Every line, including the last, ends
/// with `\n`.
pub fn write_csv(stream: &EventStream) -> String {
    let mut out = String::with_capacity(CSV_HEADER.len() + 1 + stream.len() * 16);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for e in stream.iter() {
        out.push_str(&format!("{},{},{},{}\n", e.x, e.y, e.t, e.p.byte()));
    }
    out
}

/// Parses CSV text against an externally supplied geometry.
pub fn read_csv(
    text: &str,
    geometry: SensorGeometry,
    order: OrderPolicy,
) -> Result<EventStream, CsvError> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("");
    if header.trim_end() != CSV_HEADER {
        return Err(CsvError::BadHeader(header.to_owned()));
    }

    let mut events = Vec::new();
    for (i, raw) in lines.enumerate() {
        let line = i + 2; // 1-based, after the header
        let trimmed = raw.trim_end();
        if trimmed.is_empty() {
            continue; // tolerate a trailing blank line
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() != 4 {
            return Err(CsvError::FieldCount {
                line,
                found: fields.len(),
            });
        }
        let x = parse_field::<u16>(fields[0], line, "u16 x coordinate")?;
        let y = parse_field::<u16>(fields[1], line, "u16 y coordinate")?;
        let t = parse_field::<u64>(fields[2], line, "u64 timestamp")?;
        let p = match fields[3] {
            "0" => Polarity::Off,
            "1" => Polarity::On,
            other => {
                return Err(CsvError::BadPolarity {
                    line,
                    value: other.to_owned(),
                });
            }
        };
        if !geometry.contains(x, y) {
            return Err(CsvError::CoordOutOfRange {
                line,
                x,
                y,
                width: geometry.width,
                height: geometry.height,
            });
        }
        events.push(Event { x, y, t, p });
    }

    let built = match order {
        OrderPolicy::Strict => EventStream::new(geometry, events),
        OrderPolicy::Lenient => EventStream::from_unsorted(geometry, events),
    };
    built.map_err(|e| match e {
        crate::event::EventError::OrderViolation { index } => {
            CsvError::OrderViolation { line: index + 2 }
        }
        other => unreachable!("stream validation after field checks: {other}"),
    })
}

fn parse_field<T: std::str::FromStr>(
    field: &str,
    line: usize,
    what: &'static str,
) -> Result<T, CsvError> {
    field.parse().map_err(|_| CsvError::BadField {
        line,
        field: field.to_owned(),
        what,
    })
}
