//! Constant-period accumulation of an event stream into frames.
//!
//! The stream's time axis is partitioned into windows `[k*period, (k+1)*period)`
//! starting at t = 0. Every window up to and including the one holding the
//! last event becomes a frame, so a stream whose last event lands in window
//! `k` yields exactly `k + 1` frames; an empty stream yields none.

use crate::event::{EventStream, SensorGeometry};

/// How a window's events map to a pixel value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FrameMode {
    /// Net polarity, clamped to one step: ON-dominated pixels read 1.0,
    /// OFF-dominated 0.0, quiet or balanced pixels 0.5.
    Polarity,
    /// Event count, clipped then normalized: `min(count, clip) / clip`.
    /// Quiet pixels read 0.0.
    Count,
}

/// Clip applied by [`FrameMode::Count`] under [`accumulate`].
pub const DEFAULT_COUNT_CLIP: u32 = 5;

/// A single accumulated frame; values are row-major in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    geometry: SensorGeometry,
    values: Vec<f64>,
}

/// Errors for frame construction and accumulation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FrameError {
    #[error("frame of {expected} pixels built from {got} values")]
    LengthMismatch { expected: usize, got: usize },
    #[error("frame value {value} at index {index} outside [0, 1]")]
    ValueOutOfRange { index: usize, value: f64 },
    #[error("accumulation period must be positive")]
    ZeroPeriod,
    #[error("count clip must be positive")]
    ZeroClip,
}

impl Frame {
    /// Builds a frame, validating length and the [0, 1] value range.
    pub fn new(geometry: SensorGeometry, values: Vec<f64>) -> Result<Self, FrameError> {
        let expected = geometry.pixel_count();
        if values.len() != expected {
            return Err(FrameError::LengthMismatch {
                expected,
                got: values.len(),
            });
        }
        for (index, &value) in values.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(FrameError::ValueOutOfRange { index, value });
            }
        }
        Ok(Frame { geometry, values })
    }

    /// A frame with every pixel at `value`.
    pub fn uniform(geometry: SensorGeometry, value: f64) -> Result<Self, FrameError> {
        Frame::new(geometry, vec![value; geometry.pixel_count()])
    }

    pub fn geometry(&self) -> SensorGeometry {
        self.geometry
    }

    pub fn width(&self) -> usize {
        self.geometry.width as usize
    }

    pub fn height(&self) -> usize {
        self.geometry.height as usize
    }

    /// Row-major values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, x: u16, y: u16) -> f64 {
        debug_assert!(self.geometry.contains(x, y));
        self.values[y as usize * self.width() + x as usize]
    }
}

/// Accumulates a stream into constant-period frames with the default count
/// clip. See [`accumulate_clipped`].
pub fn accumulate(
    stream: &EventStream,
    period_us: u64,
    mode: FrameMode,
) -> Result<Vec<Frame>, FrameError> {
    accumulate_clipped(stream, period_us, mode, DEFAULT_COUNT_CLIP)
}

/// Accumulates a stream into constant-period frames.
///
/// Frame count is `floor(t_max / period) + 1` for a non-empty stream —
/// every window from t = 0 through the last event's window is emitted, even
/// if some interior window holds no events — and 0 for an empty stream.
pub fn accumulate_clipped(
    stream: &EventStream,
    period_us: u64,
    mode: FrameMode,
    count_clip: u32,
) -> Result<Vec<Frame>, FrameError> {
    if period_us == 0 {
        return Err(FrameError::ZeroPeriod);
    }
    if count_clip == 0 {
        return Err(FrameError::ZeroClip);
    }
    let t_max = match stream.t_max() {
        Some(t) => t,
        None => return Ok(Vec::new()),
    };
    let n_frames = (t_max / period_us) as usize + 1;
    let geometry = stream.geometry();
    let width = geometry.width as usize;
    let n_px = geometry.pixel_count();

    let mut frames = Vec::with_capacity(n_frames);
    let events = stream.events();
    let mut next = 0usize; // index of the first event not yet consumed
    for k in 0..n_frames {
        // Window end as u128: (k+1)*period can exceed u64 near u64::MAX.
        let end = (k as u128 + 1) * period_us as u128;
        match mode {
            FrameMode::Polarity => {
                let mut net = vec![0i64; n_px];
                while next < events.len() && (events[next].t as u128) < end {
                    let e = &events[next];
                    net[e.y as usize * width + e.x as usize] += e.p.sign() as i64;
                    next += 1;
                }
                let values = net
                    .into_iter()
                    .map(|s| (s.clamp(-1, 1) + 1) as f64 / 2.0)
                    .collect();
                frames.push(Frame::new(geometry, values)?);
            }
            FrameMode::Count => {
                let mut counts = vec![0u32; n_px];
                while next < events.len() && (events[next].t as u128) < end {
                    let e = &events[next];
                    let c = &mut counts[e.y as usize * width + e.x as usize];
                    *c = c.saturating_add(1);
                    next += 1;
                }
                let values = counts
                    .into_iter()
                    .map(|c| c.min(count_clip) as f64 / count_clip as f64)
                    .collect();
                frames.push(Frame::new(geometry, values)?);
            }
        }
    }
    debug_assert_eq!(next, events.len(), "every event falls in some window");
    Ok(frames)
}
