//! Serialization: the EVT0 binary container, a plain-text CSV dialect, and
//! binary PGM export for accumulated frames.

mod csv;
mod evt0;
mod pgm;

pub use csv::{read_csv, write_csv, CsvError};
pub use evt0::{
    evt0_bytes, read_evt0, write_evt0, Evt0Error, EVT0_HEADER_LEN, EVT0_MAGIC, EVT0_RECORD_LEN,
};
pub use pgm::{read_pgm, write_pgm, PgmError};

/// What a reader does when events arrive out of canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderPolicy {
    /// Reject the input with an order-violation error.
    Strict,
    /// Accept the input and sort it into canonical order.
    Lenient,
}
