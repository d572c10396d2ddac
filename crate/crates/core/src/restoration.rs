//! The scattering model `I = J·t + A·(1 - t)` in both directions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{Image, ScalarMap};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RestoreConfig {
    /// Lower bound on the transmission used as a divisor.
    pub t0: f64,
}

impl Default for RestoreConfig {
    fn default() -> Self {
        RestoreConfig { t0: 0.1 }
    }
}

impl RestoreConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t0 > 0.0 && self.t0 <= 1.0) {
            return Err(Error::invalid(format!("t0 must be in (0, 1], got {}", self.t0)));
        }
        Ok(())
    }
}

/// Scene radiance `(I - A) / max(t, t0) + A` per channel, without clamping.
/// Interleaved RGB, row-major.
///
/// Evaluated as `I + (I - A)(1 - t)/t`, which is exact for `t = 1` and for `I = A`.
pub fn restore_unclamped(img: &Image, t: &ScalarMap, airlight: [f64; 3], cfg: &RestoreConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    img.check_same_dims(t.dims(), "transmission")?;
    let mut out = Vec::with_capacity(img.data().len());
    for (px, &tx) in img.pixels().zip(t.data()) {
        let t = tx.max(cfg.t0);
        let gain = (1.0 - t) / t;
        for ch in 0..3 {
            out.push(px[ch] + (px[ch] - airlight[ch]) * gain);
        }
    }
    Ok(out)
}

/// Removes the fog layer given a transmission map and atmospheric light.
/// Results are clamped to `[0, 1]`.
pub fn restore(img: &Image, t: &ScalarMap, airlight: [f64; 3], cfg: &RestoreConfig) -> Result<Image> {
    let raw = restore_unclamped(img, t, airlight, cfg)?;
    Ok(Image::from_fn(img.height(), img.width(), |r, c| {
        let i = (r * img.width() + c) * 3;
        [raw[i], raw[i + 1], raw[i + 2]]
    }))
}

/// Forward model: blends each scene pixel toward the atmospheric light by `1 - t`.
pub fn synthesize_fog(scene: &Image, t: &ScalarMap, airlight: [f64; 3]) -> Result<Image> {
    scene.check_same_dims(t.dims(), "transmission")?;
    if let Some(a) = airlight.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        return Err(Error::invalid(format!("airlight component {a} is outside [0, 1]")));
    }
    let w = scene.width();
    Ok(Image::from_fn(scene.height(), w, |r, c| {
        let j = scene.pixel(r, c);
        let tx = t.get(r, c);
        [0, 1, 2].map(|ch| j[ch] * tx + airlight[ch] * (1.0 - tx))
    }))
}
