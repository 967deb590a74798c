//! Image representation and the color transforms shared by all metrics.

mod color;
mod io;
mod plane;

pub use color::{rgb_to_lmn, rgb_to_luma, rgb_to_yiq, yiq_to_rgb, Lmn, Yiq, LUMA_WEIGHTS};
pub use io::{load_image, save_image};
pub use plane::Plane;

pub(crate) use color::{lmn_of, yiq_of};

use crate::error::{IqaError, Result};

const RANGE_SLACK: f64 = 1e-6;

/// Planar floating-point raster with samples in `[0, 1]`.
///
/// Construction validates the sample range, so every `Image` in circulation
/// has `data_range == 1`. Metric internals work on [`Plane`]s instead.
#[derive(Clone, Debug, PartialEq)]
pub struct Image {
    height: usize,
    width: usize,
    planes: Vec<Plane>,
}

impl Image {
    /// Builds an image from channel-planar, row-major samples.
    pub fn new(height: usize, width: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        if channels != 1 && channels != 3 {
            return Err(IqaError::InvalidImage(format!(
                "channel count must be 1 or 3, got {channels}"
            )));
        }
        if data.len() != height * width * channels {
            return Err(IqaError::InvalidImage(format!(
                "{height}x{width}x{channels} image needs {} samples, got {}",
                height * width * channels,
                data.len()
            )));
        }
        let n = height * width;
        let planes = (0..channels)
            .map(|c| Plane::new(height, width, data[c * n..(c + 1) * n].to_vec()))
            .collect::<Result<Vec<_>>>()?;
        Self::from_planes(planes)
    }

    pub fn from_planes(planes: Vec<Plane>) -> Result<Self> {
        if planes.len() != 1 && planes.len() != 3 {
            return Err(IqaError::InvalidImage(format!(
                "channel count must be 1 or 3, got {}",
                planes.len()
            )));
        }
        let (height, width) = planes[0].dims();
        if height == 0 || width == 0 {
            return Err(IqaError::InvalidImage("image has zero area".into()));
        }
        if planes.iter().any(|p| p.dims() != (height, width)) {
            return Err(IqaError::InvalidImage(
                "channel planes differ in size".into(),
            ));
        }
        for p in &planes {
            if let Some(bad) = p
                .data()
                .iter()
                .find(|v| !v.is_finite() || **v < -RANGE_SLACK || **v > 1.0 + RANGE_SLACK)
            {
                return Err(IqaError::InvalidImage(format!(
                    "sample {bad} outside [0, 1]"
                )));
            }
        }
        Ok(Self {
            height,
            width,
            planes,
        })
    }

    pub fn from_plane(plane: Plane) -> Result<Self> {
        Self::from_planes(vec![plane])
    }

    /// Gray image with every sample equal to `value`.
    pub fn constant(height: usize, width: usize, channels: usize, value: f64) -> Result<Self> {
        Self::new(
            height,
            width,
            channels,
            vec![value; height * width * channels],
        )
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn channels(&self) -> usize {
        self.planes.len()
    }

    /// `(height, width, channels)`
    pub fn shape(&self) -> (usize, usize, usize) {
        (self.height, self.width, self.planes.len())
    }

    /// Always 1.0: samples are normalized at construction.
    pub fn data_range(&self) -> f64 {
        1.0
    }

    pub fn plane(&self, channel: usize) -> &Plane {
        &self.planes[channel]
    }

    pub fn planes(&self) -> &[Plane] {
        &self.planes
    }

    /// Channel-planar copy of all samples.
    pub fn to_vec(&self) -> Vec<f64> {
        self.planes
            .iter()
            .flat_map(|p| p.data().iter().copied())
            .collect()
    }

    /// Luminance plane: the single channel of a gray image, BT.601 luma otherwise.
    pub fn luma(&self) -> Plane {
        match self.channels() {
            1 => self.planes[0].clone(),
            _ => color::luma_of(&self.planes[0], &self.planes[1], &self.planes[2]),
        }
    }

    /// Three planes, replicating the channel of a gray image.
    pub fn to_rgb_planes(&self) -> [Plane; 3] {
        match self.channels() {
            1 => [
                self.planes[0].clone(),
                self.planes[0].clone(),
                self.planes[0].clone(),
            ],
            _ => [
                self.planes[0].clone(),
                self.planes[1].clone(),
                self.planes[2].clone(),
            ],
        }
    }

    /// Applies `f` to every sample and clamps the result back into `[0, 1]`.
    pub fn map_clamped(&self, f: impl Fn(f64) -> f64) -> Image {
        Image {
            height: self.height,
            width: self.width,
            planes: self
                .planes
                .iter()
                .map(|p| p.map(|v| f(v).clamp(0.0, 1.0)))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range_and_bad_arity() {
        assert!(Image::new(1, 2, 1, vec![0.0, 1.5]).is_err());
        assert!(Image::new(1, 1, 2, vec![0.0, 0.0]).is_err());
        assert!(Image::new(2, 2, 1, vec![0.0; 3]).is_err());
        assert!(Image::new(1, 1, 1, vec![f64::NAN]).is_err());
        // tolerance band around [0, 1]
        assert!(Image::new(1, 2, 1, vec![-1e-7, 1.0 + 1e-7]).is_ok());
    }

    #[test]
    fn planar_layout() {
        let img = Image::new(1, 2, 3, vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6]).unwrap();
        assert_eq!(img.plane(1).data(), &[0.3, 0.4]);
        assert_eq!(img.to_vec(), vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6]);
    }
}
