//! EVT0: a little-endian binary event container.
//!
//! Layout:
//! - 12-byte header: magic `"EVT0"`, width (u16), height (u16), reserved u32
//!   that must be zero.
//! - 14-byte records: t (u64), x (u16), y (u16), polarity byte (0 = OFF,
//!   1 = ON), one zero pad byte.
//!
//! Writing a given stream always produces the same bytes, so equality of
//! files is equality of streams.

use std::io::{Read, Write};

use crate::event::{Event, EventStream, Polarity, SensorGeometry};
use crate::io::OrderPolicy;

pub const EVT0_MAGIC: [u8; 4] = *b"EVT0";
pub const EVT0_HEADER_LEN: usize = 12;
pub const EVT0_RECORD_LEN: usize = 14;

#[derive(Debug, thiserror::Error)]
pub enum Evt0Error {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("bad magic {0:?} (expected \"EVT0\")")]
    BadMagic([u8; 4]),
    #[error("header reserved field is {0:#010x}, must be zero")]
    BadReserved(u32),
    #[error("header geometry {width}x{height} invalid: both sides must be >= 2")]
    BadGeometry { width: u16, height: u16 },
    #[error("truncated record: {got} trailing bytes after record #{records} (records are {EVT0_RECORD_LEN} bytes)")]
    Truncated { records: usize, got: usize },
    #[error("record #{index}: polarity byte {byte} (must be 0 or 1)")]
    BadPolarity { index: usize, byte: u8 },
    #[error("record #{index}: pad byte {byte} (must be 0)")]
    BadPad { index: usize, byte: u8 },
    #[error("record #{index}: coordinates ({x},{y}) outside {width}x{height} sensor")]
    CoordOutOfRange {
        index: usize,
        x: u16,
        y: u16,
        width: u16,
        height: u16,
    },
    #[error("record #{index} violates canonical (t, y, x, p) order")]
    OrderViolation { index: usize },
}

/// Serializes a stream; returns the number of bytes written.
pub fn write_evt0<W: Write>(stream: &EventStream, out: &mut W) -> Result<u64, Evt0Error> {
    let g = stream.geometry();
    out.write_all(&EVT0_MAGIC)?;
    out.write_all(&g.width.to_le_bytes())?;
    out.write_all(&g.height.to_le_bytes())?;
    out.write_all(&0u32.to_le_bytes())?;
    let mut record = [0u8; EVT0_RECORD_LEN];
    for e in stream.iter() {
        record[0..8].copy_from_slice(&e.t.to_le_bytes());
        record[8..10].copy_from_slice(&e.x.to_le_bytes());
        record[10..12].copy_from_slice(&e.y.to_le_bytes());
        record[12] = e.p.byte();
        record[13] = 0;
        out.write_all(&record)?;
    }
    Ok((EVT0_HEADER_LEN + stream.len() * EVT0_RECORD_LEN) as u64)
}

/// Convenience wrapper over [`write_evt0`] producing a byte vector.
pub fn evt0_bytes(stream: &EventStream) -> Vec<u8> {
    let mut out = Vec::with_capacity(EVT0_HEADER_LEN + stream.len() * EVT0_RECORD_LEN);
    write_evt0(stream, &mut out).expect("writing to a Vec cannot fail");
    out
}

/// Parses an EVT0 byte stream, validating magic, geometry, polarity, pad
/// bytes, coordinate ranges, and — under [`OrderPolicy::Strict`] — canonical
/// event order. [`OrderPolicy::Lenient`] sorts out-of-order input instead.
pub fn read_evt0<R: Read>(input: &mut R, order: OrderPolicy) -> Result<EventStream, Evt0Error> {
    let mut header = [0u8; EVT0_HEADER_LEN];
    input.read_exact(&mut header)?;
    let magic: [u8; 4] = header[0..4].try_into().unwrap();
    if magic != EVT0_MAGIC {
        return Err(Evt0Error::BadMagic(magic));
    }
    let width = u16::from_le_bytes(header[4..6].try_into().unwrap());
    let height = u16::from_le_bytes(header[6..8].try_into().unwrap());
    let reserved = u32::from_le_bytes(header[8..12].try_into().unwrap());
    if reserved != 0 {
        return Err(Evt0Error::BadReserved(reserved));
    }
    let geometry =
        SensorGeometry::new(width, height).map_err(|_| Evt0Error::BadGeometry { width, height })?;

    let mut body = Vec::new();
    input.read_to_end(&mut body)?;
    if body.len() % EVT0_RECORD_LEN != 0 {
        return Err(Evt0Error::Truncated {
            records: body.len() / EVT0_RECORD_LEN,
            got: body.len() % EVT0_RECORD_LEN,
        });
    }

    let mut events = Vec::with_capacity(body.len() / EVT0_RECORD_LEN);
    for (index, record) in body.chunks_exact(EVT0_RECORD_LEN).enumerate() {
        let t = u64::from_le_bytes(record[0..8].try_into().unwrap());
        let x = u16::from_le_bytes(record[8..10].try_into().unwrap());
        let y = u16::from_le_bytes(record[10..12].try_into().unwrap());
        let p = Polarity::from_byte(record[12]).ok_or(Evt0Error::BadPolarity {
            index,
            byte: record[12],
        })?;
        if record[13] != 0 {
            return Err(Evt0Error::BadPad {
                index,
                byte: record[13],
            });
        }
        if !geometry.contains(x, y) {
            return Err(Evt0Error::CoordOutOfRange {
                index,
                x,
                y,
                width,
                height,
            });
        }
        events.push(Event { x, y, t, p });
    }

    let built = match order {
        OrderPolicy::Strict => EventStream::new(geometry, events),
        OrderPolicy::Lenient => EventStream::from_unsorted(geometry, events),
    };
    built.map_err(|e| match e {
        crate::event::EventError::OrderViolation { index } => Evt0Error::OrderViolation { index },
        // Coordinates were checked above; geometry was checked at header parse.
        other => unreachable!("stream validation after record checks: {other}"),
    })
}
