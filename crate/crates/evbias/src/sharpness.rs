//! Frame sharpness via the average gradient magnitude.
//!
//! The score of a frame is the mean finite-difference gradient magnitude
//! over its interior grid:
//!
//! ```text
//! AG = (1 / ((m-1)(n-1))) * sum_{i=0}^{m-2} sum_{j=0}^{n-2}
//!          sqrt(Gx(i,j)^2 + Gy(i,j)^2)
//! ```
//!
//! with forward differences `Gx(i,j) = I(i,j+1) - I(i,j)` (along columns)
//! and `Gy(i,j) = I(i+1,j) - I(i,j)` (along rows). Forward differences over
//! the `(m-1) x (n-1)` interior make the normalizer exact — every interior
//! cell contributes one term. More edge content means a larger score, which
//! is how accumulated event frames are compared across sensor settings.
//!
//! Sums are compensated (Kahan), so the result is deterministic and
//! insensitive to accumulation order for realistic frame sizes.

use crate::frame::Frame;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SharpnessError {
    #[error("cannot average sharpness over zero frames")]
    NoFrames,
    #[error("frame {index} is {got_w}x{got_h} but the sequence started {want_w}x{want_h}")]
    GeometryMismatch {
        index: usize,
        want_w: usize,
        want_h: usize,
        got_w: usize,
        got_h: usize,
    },
}

#[inline]
fn kahan_add(sum: &mut f64, comp: &mut f64, term: f64) {
    let y = term - *comp;
    let t = *sum + y;
    *comp = (t - *sum) - y;
    *sum = t;
}

/// Average gradient magnitude of one frame. Total: every [`Frame`] is at
/// least 2x2 by construction, so the interior grid is never empty.
pub fn average_gradient(frame: &Frame) -> f64 {
    let w = frame.width();
    let h = frame.height();
    let v = frame.values();
    let mut sum = 0.0;
    let mut comp = 0.0;
    for i in 0..h - 1 {
        let row = &v[i * w..(i + 1) * w];
        let below = &v[(i + 1) * w..(i + 2) * w];
        for j in 0..w - 1 {
            let gx = row[j + 1] - row[j];
            let gy = below[j] - row[j];
            kahan_add(&mut sum, &mut comp, (gx * gx + gy * gy).sqrt());
        }
    }
    sum / (((h - 1) * (w - 1)) as f64)
}

/// Arithmetic mean of [`average_gradient`] over a recording's frames.
/// All frames must share one geometry; an empty sequence is an error
/// (there is no meaningful score for "no frames").
pub fn mean_ag(frames: &[Frame]) -> Result<f64, SharpnessError> {
    let first = frames.first().ok_or(SharpnessError::NoFrames)?;
    let (w, h) = (first.width(), first.height());
    let mut sum = 0.0;
    let mut comp = 0.0;
    for (index, frame) in frames.iter().enumerate() {
        if frame.width() != w || frame.height() != h {
            return Err(SharpnessError::GeometryMismatch {
                index,
                want_w: w,
                want_h: h,
                got_w: frame.width(),
                got_h: frame.height(),
            });
        }
        kahan_add(&mut sum, &mut comp, average_gradient(frame));
    }
    Ok(sum / frames.len() as f64)
}
