//! Minimal 8-bit image I/O: binary PGM/PPM (maxval 255) and non-interlaced
//! 8-bit PNG, plus the conversions between images and tensors.
//!
//! The PNM side is hand-rolled (the profile is tiny and pinning the bytes
//! matters for round-trip tests); PNG goes through the `png` crate. Formats
//! are detected by magic number on read and chosen explicitly (or by file
//! extension) on write.

use crate::error::{Error, Result};
use crate::tensor::Tensor;
use std::fs;
use std::io::BufWriter;
use std::path::Path;

const PNG_MAGIC: [u8; 8] = [0x89, b'P', b'N', b'G', b'\r', b'\n', 0x1a, b'\n'];

/// An 8-bit image, gray (1 channel) or RGB (3 channels), samples interleaved
/// row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    width: usize,
    height: usize,
    channels: usize,
    samples: Vec<u8>,
}

impl Image {
    pub fn new(width: usize, height: usize, channels: usize, samples: Vec<u8>) -> Result<Self> {
        if channels != 1 && channels != 3 {
            return Err(Error::UnsupportedFormat(format!(
                "{channels} channels (only gray and RGB)"
            )));
        }
        if width == 0 || height == 0 {
            return Err(Error::ShapeMismatch(format!("empty image {width}x{height}")));
        }
        if samples.len() != width * height * channels {
            return Err(Error::ShapeMismatch(format!(
                "{width}x{height}x{channels} needs {} samples, got {}",
                width * height * channels,
                samples.len()
            )));
        }
        Ok(Image { width, height, channels, samples })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn samples(&self) -> &[u8] {
        &self.samples
    }
}

/// On-disk formats we can write.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    /// Binary PGM (P5), gray only.
    Pgm,
    /// Binary PPM (P6); gray images are promoted to three equal channels.
    Ppm,
    /// 8-bit non-interlaced PNG, gray or RGB.
    Png,
}

impl ImageFormat {
    /// Picks a format from a file extension (pgm, ppm, png).
    pub fn from_path(path: &Path) -> Result<Self> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| e.to_ascii_lowercase())
            .unwrap_or_default();
        match ext.as_str() {
            "pgm" => Ok(ImageFormat::Pgm),
            "ppm" => Ok(ImageFormat::Ppm),
            "png" => Ok(ImageFormat::Png),
            _ => Err(Error::UnsupportedFormat(format!(
                "cannot infer an image format from {:?} (use .pgm, .ppm, or .png)",
                path
            ))),
        }
    }
}

/// Reads a PGM, PPM, or PNG file, detected by magic number.
pub fn read_image(path: &Path) -> Result<Image> {
    let bytes = fs::read(path)?;
    if bytes.starts_with(b"P5") || bytes.starts_with(b"P6") {
        parse_pnm(&bytes)
    } else if bytes.starts_with(&PNG_MAGIC) {
        decode_png(&bytes)
    } else {
        Err(Error::UnsupportedFormat(format!(
            "{}: unrecognized magic number",
            path.display()
        )))
    }
}

/// Writes an image in the requested format. PGM refuses RGB input; PPM
/// promotes gray to three equal channels.
pub fn write_image(img: &Image, path: &Path, format: ImageFormat) -> Result<()> {
    match format {
        ImageFormat::Pgm | ImageFormat::Ppm => fs::write(path, encode_pnm(img, format)?)?,
        ImageFormat::Png => encode_png(img, path)?,
    }
    Ok(())
}

/// Image samples as real values in [0, 255], losslessly. Gray becomes a
/// rank-2 (height, width) tensor; RGB becomes rank-3 (3, height, width),
/// channel first, so each channel is a contiguous plane.
pub fn to_tensor(img: &Image) -> Tensor {
    let (h, w, c) = (img.height, img.width, img.channels);
    let t = if c == 1 {
        Tensor::new(&[h, w], img.samples.iter().map(|&v| v as f64).collect())
    } else {
        let mut data = vec![0.0; c * h * w];
        for ch in 0..c {
            for i in 0..h * w {
                data[ch * h * w + i] = img.samples[i * c + ch] as f64;
            }
        }
        Tensor::new(&[c, h, w], data)
    };
    t.expect("valid image dimensions are valid tensor dimensions")
}

/// The inverse of [`to_tensor`]: clamps to [0, 255] and rounds half-up to
/// integer samples. Accepts rank 2 (gray) or rank 3 with 1 or 3 leading
/// channels.
pub fn from_tensor(t: &Tensor) -> Result<Image> {
    let q = |v: f64| (v.clamp(0.0, 255.0) + 0.5).floor() as u8;
    match t.shape() {
        [h, w] => Image::new(*w, *h, 1, t.data().iter().map(|&v| q(v)).collect()),
        [c @ (1 | 3), h, w] => {
            let plane = h * w;
            let mut samples = vec![0u8; plane * c];
            for ch in 0..*c {
                for i in 0..plane {
                    samples[i * c + ch] = q(t.data()[ch * plane + i]);
                }
            }
            Image::new(*w, *h, *c, samples)
        }
        other => Err(Error::ShapeMismatch(format!(
            "cannot form an image from shape {other:?} (want HxW or {{1,3}}xHxW)"
        ))),
    }
}

fn parse_pnm(bytes: &[u8]) -> Result<Image> {
    let channels = if bytes.starts_with(b"P5") { 1 } else { 3 };
    let mut pos = 2usize;
    let width = pnm_number(bytes, &mut pos, "width")?;
    let height = pnm_number(bytes, &mut pos, "height")?;
    let maxval = pnm_number(bytes, &mut pos, "maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::UnsupportedFormat(format!("{width}x{height} image")));
    }
    if maxval != 255 {
        return Err(Error::UnsupportedBitDepth(format!("pnm maxval {maxval}, only 255")));
    }
    // Exactly one whitespace byte separates the header from the payload.
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(Error::UnsupportedFormat("missing header terminator".into()));
    }
    pos += 1;
    let need = width * height * channels;
    let payload = &bytes[pos..];
    if payload.len() < need {
        return Err(Error::Truncated(format!(
            "payload has {} of {} bytes",
            payload.len(),
            need
        )));
    }
    Image::new(width, height, channels, payload[..need].to_vec())
}

/// Reads one whitespace-delimited decimal from a PNM header, skipping
/// comment lines.
fn pnm_number(bytes: &[u8], pos: &mut usize, what: &str) -> Result<usize> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
        } else {
            break;
        }
    }
    if *pos >= bytes.len() {
        return Err(Error::Truncated(format!("header ended before {what}")));
    }
    let start = *pos;
    let mut value = 0u64;
    while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
        value = value * 10 + (bytes[*pos] - b'0') as u64;
        if value > u32::MAX as u64 {
            return Err(Error::UnsupportedFormat(format!("{what} out of range")));
        }
        *pos += 1;
    }
    if *pos == start {
        return Err(Error::UnsupportedFormat(format!("bad {what} in header")));
    }
    Ok(value as usize)
}

fn encode_pnm(img: &Image, format: ImageFormat) -> Result<Vec<u8>> {
    let (magic, payload): (&str, Vec<u8>) = match (format, img.channels) {
        (ImageFormat::Pgm, 1) => ("P5", img.samples.clone()),
        (ImageFormat::Pgm, _) => {
            return Err(Error::UnsupportedFormat(
                "cannot write an RGB image as PGM".into(),
            ))
        }
        (ImageFormat::Ppm, 3) => ("P6", img.samples.clone()),
        (ImageFormat::Ppm, _) => {
            // Promote gray to three equal channels.
            ("P6", img.samples.iter().flat_map(|&v| [v, v, v]).collect())
        }
        (ImageFormat::Png, _) => unreachable!("png handled elsewhere"),
    };
    let mut out = format!("{magic}\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&payload);
    Ok(out)
}

fn decode_png(bytes: &[u8]) -> Result<Image> {
    let decoder = png::Decoder::new(bytes);
    let mut reader = decoder.read_info().map_err(|e| Error::Png(e.to_string()))?;
    let mut buf = vec![0u8; reader.output_buffer_size()];
    let info = reader.next_frame(&mut buf).map_err(|e| Error::Png(e.to_string()))?;
    if info.bit_depth != png::BitDepth::Eight {
        return Err(Error::UnsupportedBitDepth(format!("png {:?}", info.bit_depth)));
    }
    let channels = match info.color_type {
        png::ColorType::Grayscale => 1,
        png::ColorType::Rgb => 3,
        other => {
            return Err(Error::UnsupportedFormat(format!("png color type {other:?}")))
        }
    };
    buf.truncate(info.buffer_size());
    Image::new(info.width as usize, info.height as usize, channels, buf)
}

fn encode_png(img: &Image, path: &Path) -> Result<()> {
    let file = fs::File::create(path)?;
    let mut encoder = png::Encoder::new(BufWriter::new(file), img.width as u32, img.height as u32);
    encoder.set_color(if img.channels == 1 {
        png::ColorType::Grayscale
    } else {
        png::ColorType::Rgb
    });
    encoder.set_depth(png::BitDepth::Eight);
    let mut writer = encoder.write_header().map_err(|e| Error::Png(e.to_string()))?;
    writer
        .write_image_data(&img.samples)
        .map_err(|e| Error::Png(e.to_string()))?;
    Ok(())
}
