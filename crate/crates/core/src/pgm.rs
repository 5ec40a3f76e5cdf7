//! Binary greyscale PGM (`P5`, 8-bit) images.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    maxval: u8,
    pixels: Vec<u8>,
}

impl GrayImage {
    /// Row-major pixels with `maxval = 255`.
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Pgm("image dimensions must be positive".into()));
        }
        if pixels.len() != width * height {
            return Err(Error::Pgm(format!("{} pixels for a {width}x{height} image", pixels.len())));
        }
        Ok(Self { width, height, maxval: 255, pixels })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn maxval(&self) -> u8 {
        self.maxval
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n{}\n", self.width, self.height, self.maxval).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }
}

struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Header<'_> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::Pgm(format!("missing {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .expect("ascii digits")
            .parse()
            .map_err(|_| Error::Pgm(format!("{what} out of range")))
    }
}

/// Parses a `P5` image with `maxval ≤ 255`. Header comments are accepted;
/// bytes after the raster are ignored.
pub fn decode(bytes: &[u8]) -> Result<GrayImage> {
    if !bytes.starts_with(b"P5") {
        return Err(Error::Pgm("missing P5 magic number".into()));
    }
    let mut h = Header { bytes, pos: 2 };
    let width = h.number("width")?;
    let height = h.number("height")?;
    let maxval = h.number("maxval")?;
    if !(1..=255).contains(&maxval) {
        return Err(Error::Pgm(format!("maxval {maxval} is not an 8-bit value")));
    }
    if !bytes.get(h.pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(Error::Pgm("expected whitespace after maxval".into()));
    }
    let start = h.pos + 1;
    let count = width.checked_mul(height).ok_or_else(|| Error::Pgm("image too large".into()))?;
    let raster = bytes
        .get(start..start + count)
        .ok_or_else(|| Error::Pgm(format!("raster truncated: expected {count} bytes")))?;
    let mut img = GrayImage::new(width, height, raster.to_vec())?;
    img.maxval = maxval as u8;
    if img.pixels.iter().any(|&p| p > img.maxval) {
        return Err(Error::Pgm("pixel value exceeds maxval".into()));
    }
    Ok(img)
}

pub fn read(path: &Path) -> Result<GrayImage> {
    decode(&fs::read(path)?).map_err(|e| match e {
        Error::Pgm(msg) => Error::Pgm(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn write(path: &Path, img: &GrayImage) -> Result<()> {
    fs::write(path, img.encode())?;
    Ok(())
}
