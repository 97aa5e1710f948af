//! Binary PGM ("P5") export of accumulated frames, maxval 255.
//!
//! A frame value v in [0, 1] maps to the byte `round(v * 255)`; rows are
//! written top to bottom. The reader accepts only the subset this writer
//! produces (binary, maxval 255) and maps bytes back to `byte / 255`.

use crate::event::SensorGeometry;
use crate::frame::{Frame, FrameError};

#[derive(Debug, thiserror::Error)]
pub enum PgmError {
    #[error("frame value {value} at index {index} outside [0, 1]")]
    ValueOutOfRange { index: usize, value: f64 },
    #[error("not a binary PGM: {0}")]
    BadHeader(String),
    #[error("unsupported maxval {0} (only 255)")]
    BadMaxval(u32),
    #[error("pixel payload is {got} bytes, expected {expected}")]
    BadPayload { expected: usize, got: usize },
    #[error(transparent)]
    BadFrame(#[from] FrameError),
}

/// Encodes a frame as a binary PGM image.
pub fn write_pgm(frame: &Frame) -> Result<Vec<u8>, PgmError> {
    let header = format!("P5\n{} {}\n255\n", frame.width(), frame.height());
    let mut out = Vec::with_capacity(header.len() + frame.values().len());
    out.extend_from_slice(header.as_bytes());
    for (index, &value) in frame.values().iter().enumerate() {
        if !(0.0..=1.0).contains(&value) {
            return Err(PgmError::ValueOutOfRange { index, value });
        }
        out.push((value * 255.0).round() as u8);
    }
    Ok(out)
}

/// Decodes a binary PGM produced by [`write_pgm`] (maxval must be 255).
pub fn read_pgm(bytes: &[u8]) -> Result<Frame, PgmError> {
    let mut pos = 0usize;
    let magic =
        next_token(bytes, &mut pos).ok_or_else(|| PgmError::BadHeader("missing magic".into()))?;
    if magic != b"P5" {
        return Err(PgmError::BadHeader(format!(
            "magic {:?}",
            String::from_utf8_lossy(magic)
        )));
    }
    let width: u16 = parse_token(bytes, &mut pos, "width")?;
    let height: u16 = parse_token(bytes, &mut pos, "height")?;
    let maxval: u32 = parse_token(bytes, &mut pos, "maxval")?;
    if maxval != 255 {
        return Err(PgmError::BadMaxval(maxval));
    }
    // Exactly one whitespace byte separates the maxval from the payload.
    pos += 1;
    let geometry =
        SensorGeometry::new(width, height).map_err(|e| PgmError::BadHeader(e.to_string()))?;
    let expected = geometry.pixel_count();
    let payload = &bytes[pos.min(bytes.len())..];
    if payload.len() != expected {
        return Err(PgmError::BadPayload {
            expected,
            got: payload.len(),
        });
    }
    let values = payload.iter().map(|&b| b as f64 / 255.0).collect();
    Ok(Frame::new(geometry, values)?)
}

/// Returns the next whitespace-delimited header token, skipping `#` comments.
fn next_token<'a>(bytes: &'a [u8], pos: &mut usize) -> Option<&'a [u8]> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    if *pos >= bytes.len() {
        return None;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    Some(&bytes[start..*pos])
}

fn parse_token<T: std::str::FromStr>(
    bytes: &[u8],
    pos: &mut usize,
    what: &str,
) -> Result<T, PgmError> {
    let token =
        next_token(bytes, pos).ok_or_else(|| PgmError::BadHeader(format!("missing {what}")))?;
    std::str::from_utf8(token)
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| PgmError::BadHeader(format!("{what} {:?}", String::from_utf8_lossy(token))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom(w: u16, h: u16) -> SensorGeometry {
        SensorGeometry::new(w, h).unwrap()
    }

    #[test]
    fn mid_gray_frame_is_byte_exact() {
        let f = Frame::uniform(geom(2, 2), 0.5).unwrap();
        let bytes = write_pgm(&f).unwrap();
        assert_eq!(bytes, b"P5\n2 2\n255\n\x80\x80\x80\x80");
    }

    #[test]
    fn extremes_map_to_0_and_255() {
        let f = Frame::new(geom(2, 2), vec![0.0, 1.0, 0.0, 1.0]).unwrap();
        let bytes = write_pgm(&f).unwrap();
        assert_eq!(&bytes[bytes.len() - 4..], &[0x00, 0xFF, 0x00, 0xFF]);
    }

    #[test]
    fn quantized_values_round_trip() {
        // Byte-quantized values survive write -> read exactly.
        let values: Vec<f64> = (0..16).map(|i| (i * 17) as f64 / 255.0).collect();
        let f = Frame::new(geom(4, 4), values).unwrap();
        let back = read_pgm(&write_pgm(&f).unwrap()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        assert!(matches!(
            read_pgm(b"P2\n2 2\n255\n"),
            Err(PgmError::BadHeader(_))
        ));
        assert!(matches!(
            read_pgm(b"P5\n2 2\n65535\n"),
            Err(PgmError::BadMaxval(65535))
        ));
        assert!(matches!(
            read_pgm(b"P5\n2 2\n255\n\x00\x00"),
            Err(PgmError::BadPayload {
                expected: 4,
                got: 2
            })
        ));
    }
}
