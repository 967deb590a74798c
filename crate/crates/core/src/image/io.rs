use std::io::Cursor;
use std::path::Path;

use image::{DynamicImage, ImageFormat, ImageReader};

use super::{Image, Plane};
use crate::error::{IqaError, Result};

const PNG_SIGNATURE: &[u8] = b"\x89PNG\r\n\x1a\n";

/// Loads an 8- or 16-bit gray/RGB PNG or a binary/ASCII PGM/PPM.
///
/// Samples are divided by `2^depth - 1`. Palette and alpha layouts are
/// rejected rather than flattened.
pub fn load_image(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| IqaError::Io {
        path: path.to_path_buf(),
        source,
    })?;

    let format = if bytes.starts_with(PNG_SIGNATURE) {
        check_png_header(path, &bytes)?;
        ImageFormat::Png
    } else if bytes.len() >= 2 && bytes[0] == b'P' && (b'1'..=b'6').contains(&bytes[1]) {
        ImageFormat::Pnm
    } else {
        return Err(IqaError::Decode {
            path: path.to_path_buf(),
            message: "not a PNG, PGM or PPM file".into(),
        });
    };

    let decoded = ImageReader::with_format(Cursor::new(&bytes), format)
        .decode()
        .map_err(|e| IqaError::Decode {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
    from_dynamic(path, decoded)
}

// IHDR sits at a fixed offset: 8-byte signature, 4-byte length, "IHDR",
// width, height, then bit depth and color type.
fn check_png_header(path: &Path, bytes: &[u8]) -> Result<()> {
    if bytes.len() < 26 || &bytes[12..16] != b"IHDR" {
        return Err(IqaError::Decode {
            path: path.to_path_buf(),
            message: "missing IHDR chunk".into(),
        });
    }
    let depth = bytes[24];
    let layout = match bytes[25] {
        0 | 2 => None,
        3 => Some("palette"),
        4 => Some("gray+alpha"),
        6 => Some("rgb+alpha"),
        _ => Some("unknown color type"),
    };
    if let Some(layout) = layout {
        return Err(IqaError::UnsupportedLayout {
            path: path.to_path_buf(),
            layout: layout.into(),
        });
    }
    if depth != 8 && depth != 16 {
        return Err(IqaError::UnsupportedBitDepth {
            path: path.to_path_buf(),
            depth,
        });
    }
    Ok(())
}

fn planes_from<T: Copy + Into<f64>>(
    height: usize,
    width: usize,
    channels: usize,
    raw: &[T],
    max: f64,
) -> Result<Image> {
    let n = height * width;
    let mut planes = vec![Vec::with_capacity(n); channels];
    for px in raw.chunks_exact(channels) {
        for (plane, &v) in planes.iter_mut().zip(px) {
            plane.push(v.into() / max);
        }
    }
    let planes = planes
        .into_iter()
        .map(|d| Plane::new(height, width, d))
        .collect::<Result<Vec<_>>>()?;
    Image::from_planes(planes)
}

fn from_dynamic(path: &Path, img: DynamicImage) -> Result<Image> {
    let (w, h) = (img.width() as usize, img.height() as usize);
    match img {
        DynamicImage::ImageLuma8(buf) => planes_from(h, w, 1, buf.as_raw(), 255.0),
        DynamicImage::ImageRgb8(buf) => planes_from(h, w, 3, buf.as_raw(), 255.0),
        DynamicImage::ImageLuma16(buf) => planes_from(h, w, 1, buf.as_raw(), 65535.0),
        DynamicImage::ImageRgb16(buf) => planes_from(h, w, 3, buf.as_raw(), 65535.0),
        other => Err(IqaError::UnsupportedLayout {
            path: path.to_path_buf(),
            layout: format!("{:?}", other.color()),
        }),
    }
}

/// Writes `img` quantized to `bit_depth` (8 or 16) bits.
///
/// The container is chosen from the extension: `.png`, `.pgm`, `.ppm` or `.pnm`.
pub fn save_image(path: impl AsRef<Path>, img: &Image, bit_depth: u8) -> Result<()> {
    let path = path.as_ref();
    let format = match path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .as_deref()
    {
        Some("png") => ImageFormat::Png,
        Some("pgm" | "ppm" | "pnm") => ImageFormat::Pnm,
        _ => {
            return Err(IqaError::InvalidArgument(format!(
                "cannot infer image format from {}",
                path.display()
            )))
        }
    };
    let (h, w, ch) = img.shape();
    let interleaved = |max: f64| -> Vec<f64> {
        let mut out = Vec::with_capacity(h * w * ch);
        for k in 0..h * w {
            for p in img.planes() {
                out.push((p.data()[k].clamp(0.0, 1.0) * max).round());
            }
        }
        out
    };
    let (w32, h32) = (w as u32, h as u32);
    let dynamic = match (bit_depth, ch) {
        (8, 1) => DynamicImage::ImageLuma8(
            image::GrayImage::from_raw(
                w32,
                h32,
                interleaved(255.0).iter().map(|&v| v as u8).collect(),
            )
            .expect("buffer sized from shape"),
        ),
        (8, 3) => DynamicImage::ImageRgb8(
            image::RgbImage::from_raw(
                w32,
                h32,
                interleaved(255.0).iter().map(|&v| v as u8).collect(),
            )
            .expect("buffer sized from shape"),
        ),
        (16, 1) => DynamicImage::ImageLuma16(
            image::ImageBuffer::from_raw(
                w32,
                h32,
                interleaved(65535.0).iter().map(|&v| v as u16).collect(),
            )
            .expect("buffer sized from shape"),
        ),
        (16, 3) => DynamicImage::ImageRgb16(
            image::ImageBuffer::from_raw(
                w32,
                h32,
                interleaved(65535.0).iter().map(|&v| v as u16).collect(),
            )
            .expect("buffer sized from shape"),
        ),
        _ => {
            return Err(IqaError::InvalidArgument(format!(
                "unsupported bit depth {bit_depth}"
            )))
        }
    };
    dynamic
        .save_with_format(path, format)
        .map_err(|e| IqaError::Decode {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
}
