//! Binary PGM (P5) images, 8-bit and 16-bit.

use std::io;
use std::path::Path;

use flower_core::sim::ImageBuf;

#[derive(Debug, thiserror::Error)]
pub enum PgmError {
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error("not a binary PGM file (expected magic `P5`)")]
    BadMagic,
    #[error("malformed PGM header: {0}")]
    BadHeader(&'static str),
    #[error("maxval {0} is outside 1..=65535")]
    BadMaxval(u32),
    #[error("pixel data is truncated: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
}

/// Decodes a P5 image. Samples wider than a byte are big-endian.
pub fn decode(bytes: &[u8]) -> Result<ImageBuf, PgmError> {
    if !bytes.starts_with(b"P5") {
        return Err(PgmError::BadMagic);
    }
    let mut pos = 2;
    let mut fields = [0u32; 3];
    for (i, field) in fields.iter_mut().enumerate() {
        // Whitespace and comments separate header fields.
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                _ => break,
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(PgmError::BadHeader(["missing width", "missing height", "missing maxval"][i]));
        }
        let text = std::str::from_utf8(&bytes[start..pos]).unwrap();
        *field = text.parse().map_err(|_| PgmError::BadHeader("number out of range"))?;
    }
    // Exactly one whitespace byte ends the header.
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(PgmError::BadHeader("no whitespace after maxval"));
    }
    pos += 1;
    let [width, height, maxval] = fields;
    if width == 0 || height == 0 {
        return Err(PgmError::BadHeader("zero width or height"));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(PgmError::BadMaxval(maxval));
    }
    let pixels = width as usize * height as usize;
    let sample = if maxval > 255 { 2 } else { 1 };
    let body = &bytes[pos..];
    if body.len() < pixels * sample {
        return Err(PgmError::Truncated { expected: pixels * sample, found: body.len() });
    }
    let data = if sample == 1 {
        body[..pixels].iter().map(|&b| i32::from(b)).collect()
    } else {
        body.chunks_exact(2).take(pixels).map(|c| i32::from(u16::from_be_bytes([c[0], c[1]]))).collect()
    };
    Ok(ImageBuf::new(width, height, data))
}

/// Encodes `img` as P5. Samples are clamped to `0..=65535`; the file is
/// 8-bit when every sample fits in a byte and 16-bit otherwise.
pub fn encode(img: &ImageBuf) -> Vec<u8> {
    let clamped: Vec<u16> = img.data.iter().map(|&p| p.clamp(0, 65535) as u16).collect();
    let maxval = if clamped.iter().all(|&p| p <= 255) { 255 } else { 65535 };
    let mut out = format!("P5\n{} {}\n{maxval}\n", img.width, img.height).into_bytes();
    if maxval == 255 {
        out.extend(clamped.iter().map(|&p| p as u8));
    } else {
        out.extend(clamped.iter().flat_map(|p| p.to_be_bytes()));
    }
    out
}

pub fn read(path: &Path) -> Result<ImageBuf, PgmError> {
    decode(&std::fs::read(path)?)
}

pub fn write(path: &Path, img: &ImageBuf) -> io::Result<()> {
    std::fs::write(path, encode(img))
}
