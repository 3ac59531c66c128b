//! Portable graymap input and graymap/pixmap output.
//!
//! Maps are read from binary (`P5`) or ASCII (`P2`) graymaps with 8-bit
//! samples. Rasters are written as `P5` graymaps or `P6` pixmaps.

use std::fs;
use std::path::{Path, PathBuf};

use gridplan_core::raster::rasterize;
use gridplan_core::{CellClass, ClassifiedGrid, OccupancyGrid, PredictedClass, World};

use crate::Error;

pub type Rgb = [u8; 3];

/// Fixed palette of the class and overlay rasters.
pub mod palette {
    use super::Rgb;

    pub const OCCUPIED: Rgb = [0, 0, 0];
    pub const UNEXPLAINED: Rgb = [128, 128, 128];
    pub const FREE: Rgb = [255, 255, 255];
    pub const DOOR: Rgb = [192, 192, 192];
    pub const WALL: Rgb = [128, 128, 128];
}

/// An RGB raster, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pixmap {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<Rgb>,
}

impl Pixmap {
    pub fn filled(width: usize, height: usize, color: Rgb) -> Self {
        Self {
            width,
            height,
            pixels: vec![color; width * height],
        }
    }

    pub fn get(&self, x: usize, y: usize) -> Rgb {
        self.pixels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, color: Rgb) {
        self.pixels[y * self.width + x] = color;
    }
}

/// Header tokens and payload offset of a netpbm file.
struct Header {
    magic: [u8; 2],
    width: usize,
    height: usize,
    maxval: usize,
    payload: usize,
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::MalformedRaster(msg.into())
}

/// Splits whitespace-separated tokens, skipping `#` comments, starting at `pos`.
struct Tokens<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn next_token(&mut self) -> Option<&'a [u8]> {
        loop {
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.pos < self.bytes.len() && self.bytes[self.pos] == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
                continue;
            }
            break;
        }
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() && self.bytes[self.pos] != b'#'
        {
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.bytes[start..self.pos])
    }

    fn number(&mut self, what: &str) -> Result<usize, Error> {
        let tok = self.next_token().ok_or_else(|| malformed(format!("missing {what}")))?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| malformed(format!("invalid {what}")))
    }
}

fn header(bytes: &[u8]) -> Result<Header, Error> {
    if bytes.len() < 2 {
        return Err(malformed("file too short for a netpbm header"));
    }
    let magic = [bytes[0], bytes[1]];
    let mut t = Tokens { bytes, pos: 2 };
    let width = t.number("width")?;
    let height = t.number("height")?;
    let maxval = t.number("maxval")?;
    // one whitespace byte separates the header from a binary payload
    let payload = match bytes.get(t.pos) {
        Some(b) if b.is_ascii_whitespace() => t.pos + 1,
        _ if magic == *b"P2" => t.pos,
        _ => return Err(malformed("truncated header")),
    };
    Ok(Header {
        magic,
        width,
        height,
        maxval,
        payload,
    })
}

/// Parses a `P5` or `P2` graymap with at most 8-bit samples. Intensities are
/// kept exactly as stored.
pub fn parse_graymap(bytes: &[u8]) -> Result<OccupancyGrid, Error> {
    let h = header(bytes)?;
    if h.magic != *b"P5" && h.magic != *b"P2" {
        return Err(malformed("expected magic P5 or P2"));
    }
    if h.width == 0 || h.height == 0 {
        return Err(malformed(format!("empty raster {}x{}", h.width, h.height)));
    }
    if h.maxval == 0 || h.maxval > 255 {
        return Err(malformed(format!("maxval {} is not 8-bit", h.maxval)));
    }
    let n = h
        .width
        .checked_mul(h.height)
        .ok_or_else(|| malformed("raster dimensions overflow"))?;
    let samples = if h.magic == *b"P5" {
        let payload = bytes.get(h.payload..).unwrap_or_default();
        if payload.len() < n {
            return Err(malformed(format!(
                "truncated payload: {} of {n} samples",
                payload.len()
            )));
        }
        payload[..n].to_vec()
    } else {
        let mut t = Tokens {
            bytes,
            pos: h.payload.min(bytes.len()),
        };
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let v = t
                .number("sample")
                .map_err(|_| malformed(format!("truncated payload: {} of {n} samples", out.len())))?;
            if v > h.maxval {
                return Err(malformed(format!("sample {v} exceeds maxval {}", h.maxval)));
            }
            out.push(v as u8);
        }
        out
    };
    Ok(OccupancyGrid::new(h.width, h.height, samples)?)
}

/// Sidecar holding map metadata: `<map>.yaml` next to the map.
pub fn sidecar_path(map: &Path) -> PathBuf {
    map.with_extension("yaml")
}

/// Reads `resolution:` from a `key: value` metadata file.
pub fn parse_resolution(text: &str) -> Result<Option<f64>, Error> {
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or_default();
        let Some((key, value)) = line.split_once(':') else {
            continue;
        };
        if key.trim() == "resolution" {
            let r: f64 = value
                .trim()
                .parse()
                .map_err(|_| malformed(format!("invalid resolution {:?}", value.trim())))?;
            if !(r > 0.0 && r.is_finite()) {
                return Err(malformed(format!("resolution must be positive, got {r}")));
            }
            return Ok(Some(r));
        }
    }
    Ok(None)
}

fn read(path: &Path) -> Result<Vec<u8>, Error> {
    fs::read(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::FileNotFound(path.to_path_buf()),
        _ => Error::Io {
            path: path.to_path_buf(),
            source: e,
        },
    })
}

/// Loads a graymap. Resolution comes from `metadata` when given, else from
/// the sidecar next to the map when present, else the default.
pub fn load_grid(path: &Path, metadata: Option<&Path>) -> Result<OccupancyGrid, Error> {
    let grid = parse_graymap(&read(path)?)?;
    let meta = match metadata {
        Some(m) => Some(read(m)?),
        None => {
            let side = sidecar_path(path);
            side.is_file().then(|| read(&side)).transpose()?
        }
    };
    let resolution = match meta {
        Some(bytes) => parse_resolution(&String::from_utf8_lossy(&bytes))?,
        None => None,
    };
    Ok(match resolution {
        Some(r) => grid.with_resolution(r),
        None => grid,
    })
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), Error> {
    fs::write(path, bytes).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

pub fn encode_graymap(width: usize, height: usize, samples: &[u8]) -> Vec<u8> {
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(samples);
    out
}

pub fn encode_pixmap(p: &Pixmap) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", p.width, p.height).into_bytes();
    out.reserve(p.pixels.len() * 3);
    for px in &p.pixels {
        out.extend_from_slice(px);
    }
    out
}

/// Parses a `P6` pixmap with 8-bit samples.
pub fn parse_pixmap(bytes: &[u8]) -> Result<Pixmap, Error> {
    let h = header(bytes)?;
    if h.magic != *b"P6" {
        return Err(malformed("expected magic P6"));
    }
    if h.maxval != 255 {
        return Err(malformed(format!("maxval {} is not 8-bit", h.maxval)));
    }
    let n = h.width * h.height;
    let payload = bytes.get(h.payload..).unwrap_or_default();
    if payload.len() < 3 * n {
        return Err(malformed("truncated payload"));
    }
    Ok(Pixmap {
        width: h.width,
        height: h.height,
        pixels: payload[..3 * n].chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect(),
    })
}

pub fn write_grid(grid: &OccupancyGrid, path: &Path) -> Result<(), Error> {
    write(path, &encode_graymap(grid.width(), grid.height(), grid.intensities()))
}

/// Writes classes as a graymap of canonical intensities, which classify back
/// to the same classes under the default thresholds.
pub fn write_classified_graymap(classified: &ClassifiedGrid, path: &Path) -> Result<(), Error> {
    let samples: Vec<u8> = classified.classes().iter().map(|c| c.intensity()).collect();
    write(path, &encode_graymap(classified.width(), classified.height(), &samples))
}

pub fn write_pixmap(p: &Pixmap, path: &Path) -> Result<(), Error> {
    write(path, &encode_pixmap(p))
}

pub fn class_color(c: CellClass) -> Rgb {
    match c {
        CellClass::Occupied => palette::OCCUPIED,
        CellClass::Unexplained => palette::UNEXPLAINED,
        CellClass::Free => palette::FREE,
    }
}

/// The classified map in the fixed palette.
pub fn render_classified(classified: &ClassifiedGrid) -> Pixmap {
    Pixmap {
        width: classified.width(),
        height: classified.height(),
        pixels: classified.classes().iter().map(|&c| class_color(c)).collect(),
    }
}

/// The source map as a gray pixmap.
pub fn render_grayscale(grid: &OccupancyGrid) -> Pixmap {
    Pixmap {
        width: grid.width(),
        height: grid.height(),
        pixels: grid.intensities().iter().map(|&v| [v, v, v]).collect(),
    }
}

/// Draws the walls and doors of `world` over `background`.
pub fn render_overlay(background: &Pixmap, world: &World) -> Result<Pixmap, Error> {
    let predicted = rasterize(world, background.width, background.height)?;
    let mut out = background.clone();
    for (px, class) in out.pixels.iter_mut().zip(predicted.classes()) {
        match class {
            PredictedClass::Wall => *px = palette::WALL,
            PredictedClass::Door => *px = palette::DOOR,
            PredictedClass::Free | PredictedClass::Unknown => {}
        }
    }
    Ok(out)
}
