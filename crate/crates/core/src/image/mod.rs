//! Image and scalar-field containers plus the low-level image operations the
//! rest of the pipeline is built on: codecs, bicubic resampling, windowed
//! minimum filtering and the dark channel.

mod codec;
mod resize;
mod window;

pub use codec::{decode_image, encode_gray_png, encode_png, read_image, write_gray_png, write_png};
pub use resize::{resize, resize_map};
pub use window::{channel_min, dark_channel, min_filter};
pub(crate) use window::min_filter_plane;

use crate::error::{Error, Result};

/// An RGB image with samples stored row-major as linear intensities in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    height: usize,
    width: usize,
    data: Vec<f64>,
}

impl Image {
    /// Wraps an interleaved `r,g,b` buffer, rejecting wrong lengths and
    /// samples outside `[0, 1]`.
    pub fn new(height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::invalid(format!("image dimensions must be nonzero, got {height}x{width}")));
        }
        if data.len() != height * width * 3 {
            return Err(Error::invalid(format!(
                "expected {} samples for a {height}x{width} RGB image, got {}",
                height * width * 3,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|s| !(0.0..=1.0).contains(s)) {
            return Err(Error::invalid(format!("sample {pos} is outside [0, 1]: {}", data[pos])));
        }
        Ok(Image { height, width, data })
    }

    /// Builds an image from a per-pixel function. Values are clamped to `[0, 1]`
    /// and NaN becomes 0.
    pub fn from_fn(height: usize, width: usize, mut f: impl FnMut(usize, usize) -> [f64; 3]) -> Self {
        assert!(height > 0 && width > 0, "image dimensions must be nonzero");
        let mut data = Vec::with_capacity(height * width * 3);
        for row in 0..height {
            for col in 0..width {
                data.extend(f(row, col).iter().map(|&s| clamp_unit(s)));
            }
        }
        Image { height, width, data }
    }

    pub fn filled(height: usize, width: usize, color: [f64; 3]) -> Self {
        Self::from_fn(height, width, |_, _| color)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn pixel_count(&self) -> usize {
        self.height * self.width
    }

    #[inline]
    pub fn pixel(&self, row: usize, col: usize) -> [f64; 3] {
        let i = (row * self.width + col) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    /// Pixel at a row-major linear index.
    #[inline]
    pub fn pixel_at(&self, index: usize) -> [f64; 3] {
        let i = index * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn pixels(&self) -> impl Iterator<Item = [f64; 3]> + '_ {
        self.data.chunks_exact(3).map(|p| [p[0], p[1], p[2]])
    }

    /// One color channel as a scalar map.
    pub fn channel(&self, c: usize) -> ScalarMap {
        assert!(c < 3);
        ScalarMap {
            height: self.height,
            width: self.width,
            data: self.data.iter().skip(c).step_by(3).copied().collect(),
        }
    }

    /// Reassembles an image from three channel maps of equal size.
    pub fn from_channels(channels: [&ScalarMap; 3]) -> Self {
        let (h, w) = channels[0].dims();
        assert!(channels.iter().all(|m| m.dims() == (h, w)), "channel size mismatch");
        Self::from_fn(h, w, |r, c| [channels[0].get(r, c), channels[1].get(r, c), channels[2].get(r, c)])
    }

    pub(crate) fn check_same_dims(&self, other: (usize, usize), what: &str) -> Result<()> {
        if self.dims() != other {
            return Err(Error::invalid(format!(
                "{what} is {}x{} but the image is {}x{}",
                other.0, other.1, self.height, self.width
            )));
        }
        Ok(())
    }
}

/// A single-channel field (dark channel, transmission, luminance) with the
/// same row-major layout as [`Image`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarMap {
    height: usize,
    width: usize,
    data: Vec<f64>,
}

impl ScalarMap {
    pub fn new(height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::invalid(format!("map dimensions must be nonzero, got {height}x{width}")));
        }
        if data.len() != height * width {
            return Err(Error::invalid(format!(
                "expected {} values for a {height}x{width} map, got {}",
                height * width,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|s| !(0.0..=1.0).contains(s)) {
            return Err(Error::invalid(format!("value {pos} is outside [0, 1]: {}", data[pos])));
        }
        Ok(ScalarMap { height, width, data })
    }

    /// Values are clamped to `[0, 1]`; NaN becomes 0.
    pub fn from_fn(height: usize, width: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(height > 0 && width > 0, "map dimensions must be nonzero");
        let mut data = Vec::with_capacity(height * width);
        for row in 0..height {
            for col in 0..width {
                data.push(clamp_unit(f(row, col)));
            }
        }
        ScalarMap { height, width, data }
    }

    pub fn filled(height: usize, width: usize, value: f64) -> Self {
        Self::from_fn(height, width, |_, _| value)
    }

    /// Clamps an arbitrary buffer into a valid map.
    pub(crate) fn from_vec_clamped(height: usize, width: usize, mut data: Vec<f64>) -> Self {
        assert_eq!(data.len(), height * width);
        data.iter_mut().for_each(|v| *v = clamp_unit(*v));
        ScalarMap { height, width, data }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.width + col]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarMap {
        ScalarMap::from_vec_clamped(self.height, self.width, self.data.iter().map(|&v| f(v)).collect())
    }
}

#[inline]
pub(crate) fn clamp_unit(v: f64) -> f64 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(0.0, 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn new_rejects_bad_buffers() {
        assert!(Image::new(2, 2, vec![0.0; 11]).is_err());
        assert!(Image::new(1, 1, vec![0.0, 1.5, 0.0]).is_err());
        assert!(Image::new(0, 3, vec![]).is_err());
        assert!(ScalarMap::new(2, 2, vec![0.0, -0.1, 0.0, 0.0]).is_err());
        assert!(Image::new(1, 1, vec![0.0, 0.5, 1.0]).is_ok());
    }

    #[test]
    fn from_fn_clamps() {
        let img = Image::from_fn(1, 2, |_, c| if c == 0 { [-1.0, 2.0, f64::NAN] } else { [0.25; 3] });
        assert_eq!(img.data(), &[0.0, 1.0, 0.0, 0.25, 0.25, 0.25]);
    }

    #[test]
    fn channels_round_trip() {
        let img = Image::from_fn(3, 4, |r, c| [r as f64 / 3.0, c as f64 / 4.0, 0.5]);
        let (r, g, b) = (img.channel(0), img.channel(1), img.channel(2));
        assert_eq!(Image::from_channels([&r, &g, &b]), img);
        assert_eq!(g.get(2, 3), 0.75);
    }
}
