//! Core event-stream types.
//!
//! An event is a timestamped, signed brightness change at one pixel. Streams
//! are kept in a canonical order — ascending `(t, y, x, p)` with OFF sorting
//! before ON on an exact tie — so that serialization is byte-reproducible.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

/// Sign of a brightness change. `Off` orders before `On`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    /// Brightness decrease (−1).
    Off,
    /// Brightness increase (+1).
    On,
}

impl Polarity {
    /// Signed value: +1 for ON, −1 for OFF.
    pub fn sign(self) -> i8 {
        match self {
            Polarity::On => 1,
            Polarity::Off => -1,
        }
    }

    /// Wire encoding: 1 for ON, 0 for OFF.
    pub fn byte(self) -> u8 {
        match self {
            Polarity::On => 1,
            Polarity::Off => 0,
        }
    }

    /// Inverse of [`Polarity::byte`]; any value other than 0 or 1 is invalid.
    pub fn from_byte(b: u8) -> Option<Polarity> {
        match b {
            0 => Some(Polarity::Off),
            1 => Some(Polarity::On),
            _ => None,
        }
    }
}

/// One sensor event: pixel coordinates, timestamp in microseconds, polarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Event {
    pub x: u16,
    pub y: u16,
    /// Microseconds from stream start.
    pub t: u64,
    pub p: Polarity,
}

impl Event {
    /// Canonical sort key: `(t, y, x, p)`, OFF before ON.
    pub fn key(&self) -> (u64, u16, u16, Polarity) {
        (self.t, self.y, self.x, self.p)
    }
}

/// Pixel-array dimensions. Both sides must be at least 2 so that every frame
/// has at least one interior gradient sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SensorGeometry {
    pub width: u16,
    pub height: u16,
}

/// Errors for event and stream construction.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EventError {
    #[error("sensor geometry {width}x{height} invalid: both sides must be >= 2")]
    BadGeometry { width: u16, height: u16 },
    #[error("event #{index} at ({x},{y}) outside {width}x{height} sensor")]
    CoordOutOfRange {
        index: usize,
        x: u16,
        y: u16,
        width: u16,
        height: u16,
    },
    #[error("event #{index} violates canonical (t, y, x, p) order")]
    OrderViolation { index: usize },
}

impl SensorGeometry {
    pub fn new(width: u16, height: u16) -> Result<Self, EventError> {
        if width < 2 || height < 2 {
            return Err(EventError::BadGeometry { width, height });
        }
        Ok(SensorGeometry { width, height })
    }

    pub fn contains(&self, x: u16, y: u16) -> bool {
        x < self.width && y < self.height
    }

    pub fn pixel_count(&self) -> usize {
        self.width as usize * self.height as usize
    }
}

/// Sorts events into canonical order. Idempotent: sorting an already
/// canonical slice leaves it unchanged (the sort is stable and the key is
/// total over all event fields).
pub fn canonical_sort(events: &mut [Event]) {
    events.sort_by_key(|e| e.key());
}

/// True when the slice is in canonical order (duplicates allowed).
pub fn is_canonical(events: &[Event]) -> bool {
    events
        .windows(2)
        .all(|w| w[0].key().cmp(&w[1].key()) != Ordering::Greater)
}

/// A validated event stream: geometry plus events in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventStream {
    geometry: SensorGeometry,
    events: Vec<Event>,
}

impl EventStream {
    /// Builds a stream from events that are already canonically ordered.
    /// Rejects out-of-range coordinates and order violations.
    pub fn new(geometry: SensorGeometry, events: Vec<Event>) -> Result<Self, EventError> {
        for (index, e) in events.iter().enumerate() {
            if !geometry.contains(e.x, e.y) {
                return Err(EventError::CoordOutOfRange {
                    index,
                    x: e.x,
                    y: e.y,
                    width: geometry.width,
                    height: geometry.height,
                });
            }
        }
        if let Some(index) = first_order_violation(&events) {
            return Err(EventError::OrderViolation { index });
        }
        Ok(EventStream { geometry, events })
    }

    /// Builds a stream from events in any order, sorting them canonically.
    pub fn from_unsorted(
        geometry: SensorGeometry,
        mut events: Vec<Event>,
    ) -> Result<Self, EventError> {
        canonical_sort(&mut events);
        Self::new(geometry, events)
    }

    pub fn geometry(&self) -> SensorGeometry {
        self.geometry
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Event> {
        self.events.iter()
    }

    /// Timestamp of the last event, if any (canonical order makes it the max).
    pub fn t_max(&self) -> Option<u64> {
        self.events.last().map(|e| e.t)
    }

    pub fn into_events(self) -> Vec<Event> {
        self.events
    }
}

fn first_order_violation(events: &[Event]) -> Option<usize> {
    events
        .windows(2)
        .position(|w| w[0].key().cmp(&w[1].key()) == Ordering::Greater)
        .map(|i| i + 1)
}
