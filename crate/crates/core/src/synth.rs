//! Deterministic synthetic foggy scenes with known ground truth.
//!
//! A scene is a sky band over textured ground, optionally with a bright
//! rectangular object (the kind of thing that fools a brightest-pixel
//! airlight estimate). Depth grows toward the horizon, transmission is
//! `exp(-beta * depth)` and the fog is applied with the scattering model.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{Image, ScalarMap};
use crate::restoration::synthesize_fog;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    pub top: usize,
    pub left: usize,
    pub height: usize,
    pub width: usize,
}

impl Rect {
    pub fn contains(&self, row: f64, col: f64) -> bool {
        row >= self.top as f64
            && row <= (self.top + self.height - 1) as f64
            && col >= self.left as f64
            && col <= (self.left + self.width - 1) as f64
    }

    fn covers(&self, row: usize, col: usize) -> bool {
        (self.top..self.top + self.height).contains(&row) && (self.left..self.left + self.width).contains(&col)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distractor {
    pub rect: Rect,
    pub color: [f64; 3],
    pub depth: f64,
}

/// Scene depth in arbitrary units. Ground depth falls linearly from
/// `horizon` just below the sky band to `foreground` on the last row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthProfile {
    /// `None` puts the sky infinitely far away (transmission exactly 0).
    pub sky: Option<f64>,
    pub horizon: f64,
    pub foreground: f64,
}

impl Default for DepthProfile {
    fn default() -> Self {
        DepthProfile { sky: Some(10.0), horizon: 3.0, foreground: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub height: usize,
    pub width: usize,
    /// Rows `0..sky_rows` are sky.
    pub sky_rows: usize,
    pub sky_color: [f64; 3],
    #[serde(default)]
    pub distractor: Option<Distractor>,
    #[serde(default)]
    pub depth: DepthProfile,
    /// Scattering coefficient; 0 means no fog at all.
    pub beta: f64,
    pub airlight: [f64; 3],
    #[serde(default)]
    pub seed: u64,
    /// Amplitude of per-pixel texture noise.
    #[serde(default = "default_texture")]
    pub texture: f64,
}

fn default_texture() -> f64 {
    0.05
}

impl Default for SceneSpec {
    fn default() -> Self {
        SceneSpec {
            height: 120,
            width: 160,
            sky_rows: 40,
            sky_color: [0.78, 0.82, 0.9],
            distractor: None,
            depth: DepthProfile::default(),
            beta: 1.0,
            airlight: [0.85, 0.88, 0.92],
            seed: 0,
            texture: default_texture(),
        }
    }
}

impl SceneSpec {
    pub fn validate(&self) -> Result<()> {
        if self.height == 0 || self.width == 0 {
            return Err(Error::invalid("scene dimensions must be nonzero"));
        }
        if self.sky_rows > self.height {
            return Err(Error::invalid(format!("sky_rows {} exceeds height {}", self.sky_rows, self.height)));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::invalid(format!("beta must be finite and non-negative, got {}", self.beta)));
        }
        let unit = |name: &str, v: &[f64; 3]| {
            if v.iter().all(|x| (0.0..=1.0).contains(x)) {
                Ok(())
            } else {
                Err(Error::invalid(format!("{name} {v:?} must lie in [0, 1]")))
            }
        };
        unit("sky_color", &self.sky_color)?;
        unit("airlight", &self.airlight)?;
        let d = &self.depth;
        if d.horizon < 0.0 || d.foreground < 0.0 || d.sky.is_some_and(|s| s < 0.0) {
            return Err(Error::invalid("depths must be non-negative"));
        }
        if !(0.0..=1.0).contains(&self.texture) {
            return Err(Error::invalid(format!("texture must be in [0, 1], got {}", self.texture)));
        }
        if let Some(dis) = &self.distractor {
            let r = dis.rect;
            if r.height == 0 || r.width == 0 || r.top + r.height > self.height || r.left + r.width > self.width {
                return Err(Error::invalid(format!("distractor rect {r:?} is empty or out of bounds")));
            }
            unit("distractor color", &dis.color)?;
            if dis.depth < 0.0 {
                return Err(Error::invalid("distractor depth must be non-negative"));
            }
        }
        Ok(())
    }

    fn transmission_at(&self, depth: Option<f64>) -> f64 {
        if self.beta == 0.0 {
            return 1.0;
        }
        match depth {
            Some(d) => (-self.beta * d).exp(),
            None => 0.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthScene {
    pub hazy: Image,
    pub truth: Image,
    pub transmission: ScalarMap,
}

/// Ground materials; each has at least one dark channel so the dark
/// channel prior holds for the clear scene.
const GROUND_PALETTE: [[f64; 3]; 5] = [
    [0.22, 0.42, 0.12],
    [0.55, 0.26, 0.14],
    [0.10, 0.12, 0.16],
    [0.42, 0.32, 0.16],
    [0.30, 0.36, 0.08],
];
const GROUND_BLOCK: usize = 6;

pub fn synth_scene(spec: &SceneSpec) -> Result<SynthScene> {
    spec.validate()?;
    let (h, w) = (spec.height, spec.width);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let blocks_r = h.div_ceil(GROUND_BLOCK);
    let blocks_c = w.div_ceil(GROUND_BLOCK);
    let materials: Vec<[f64; 3]> = (0..blocks_r * blocks_c)
        .map(|_| {
            let base = GROUND_PALETTE[rng.random_range(0..GROUND_PALETTE.len())];
            let shade = 0.8 + 0.4 * rng.random::<f64>();
            base.map(|v| v * shade)
        })
        .collect();
    let noise: Vec<f64> = (0..h * w * 3).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();

    let truth = Image::from_fn(h, w, |r, c| {
        if let Some(d) = spec.distractor.as_ref().filter(|d| d.rect.covers(r, c)) {
            return d.color;
        }
        let n = &noise[(r * w + c) * 3..(r * w + c) * 3 + 3];
        if r < spec.sky_rows {
            let lift = 0.04 * (1.0 - r as f64 / spec.sky_rows.max(1) as f64);
            [0, 1, 2].map(|ch| spec.sky_color[ch] + lift + 0.5 * spec.texture * n[ch])
        } else {
            let m = materials[(r / GROUND_BLOCK) * blocks_c + c / GROUND_BLOCK];
            [0, 1, 2].map(|ch| m[ch] + spec.texture * n[ch])
        }
    });

    let ground_rows = (h - spec.sky_rows).max(1);
    let transmission = ScalarMap::from_fn(h, w, |r, c| {
        if let Some(d) = spec.distractor.as_ref().filter(|d| d.rect.covers(r, c)) {
            return spec.transmission_at(Some(d.depth));
        }
        if r < spec.sky_rows {
            return spec.transmission_at(spec.depth.sky);
        }
        let frac = if ground_rows > 1 { (r - spec.sky_rows) as f64 / (ground_rows - 1) as f64 } else { 1.0 };
        let depth = spec.depth.horizon + (spec.depth.foreground - spec.depth.horizon) * frac;
        spec.transmission_at(Some(depth))
    });

    let hazy = synthesize_fog(&truth, &transmission, spec.airlight)?;
    Ok(SynthScene { hazy, truth, transmission })
}

/// A distractor scene for airlight experiments: hazy sky over ground with a
/// white object slightly wider than the 15×15 dark-channel window, so a few
/// of its pixels outrank the sky in the dark channel.
///
/// The object always yields about nine candidates while the sky's share grows
/// with the image area, so the sky dominates the candidate set only from
/// roughly 240×320 up (about 88% of 76 candidates at that size).
pub fn distractor_scene(height: usize, width: usize, seed: u64) -> Result<SceneSpec> {
    if height < 64 || width < 48 {
        return Err(Error::invalid(format!("distractor scenes need at least 64x48 pixels, got {height}x{width}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_d157);
    let sky_rows = height * 3 / 10;
    let side = 17;
    let top = rng.random_range(sky_rows + 8..height - side - 4);
    let left = rng.random_range(4..width - side - 4);
    let airlight = [
        0.80 + 0.08 * rng.random::<f64>(),
        0.82 + 0.08 * rng.random::<f64>(),
        0.85 + 0.08 * rng.random::<f64>(),
    ];
    Ok(SceneSpec {
        height,
        width,
        sky_rows,
        sky_color: airlight.map(|a| a - 0.1),
        distractor: Some(Distractor { rect: Rect { top, left, height: side, width: side }, color: [1.0; 3], depth: 0.4 }),
        depth: DepthProfile { sky: Some(4.5), horizon: 2.0, foreground: 0.3 },
        beta: 1.0,
        airlight,
        seed,
        texture: 0.05,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_beta_means_no_fog() {
        let spec = SceneSpec { beta: 0.0, depth: DepthProfile { sky: None, ..Default::default() }, ..Default::default() };
        let s = synth_scene(&spec).unwrap();
        assert_eq!(s.hazy, s.truth);
        assert!(s.transmission.data().iter().all(|&t| t == 1.0));
    }

    #[test]
    fn infinitely_far_sky_is_airlight() {
        let spec = SceneSpec { depth: DepthProfile { sky: None, ..Default::default() }, ..Default::default() };
        let s = synth_scene(&spec).unwrap();
        for r in 0..spec.sky_rows {
            for c in 0..spec.width {
                assert_eq!(s.hazy.pixel(r, c), spec.airlight);
                assert_eq!(s.transmission.get(r, c), 0.0);
            }
        }
    }

    #[test]
    fn same_seed_same_scene() {
        let spec = distractor_scene(80, 120, 42).unwrap();
        let (a, b) = (synth_scene(&spec).unwrap(), synth_scene(&spec).unwrap());
        assert_eq!(a.hazy, b.hazy);
        assert_eq!(a.truth, b.truth);
        assert_eq!(a.transmission, b.transmission);
        let other = synth_scene(&SceneSpec { seed: 43, ..spec }).unwrap();
        assert_ne!(a.truth, other.truth);
    }

    #[test]
    fn distractor_is_painted() {
        let spec = distractor_scene(100, 150, 3).unwrap();
        let d = spec.distractor.clone().unwrap();
        let s = synth_scene(&spec).unwrap();
        assert_eq!(s.truth.pixel(d.rect.top + 3, d.rect.left + 5), [1.0; 3]);
        assert!(d.rect.contains(d.rect.top as f64, (d.rect.left + d.rect.width - 1) as f64));
        assert!(!d.rect.contains(d.rect.top as f64 - 0.5, d.rect.left as f64));
    }

    #[test]
    fn invalid_geometry() {
        let bad_rect = SceneSpec {
            distractor: Some(Distractor { rect: Rect { top: 110, left: 0, height: 20, width: 5 }, color: [1.0; 3], depth: 1.0 }),
            ..Default::default()
        };
        assert!(matches!(synth_scene(&bad_rect), Err(Error::InvalidArgument(_))));
        assert!(synth_scene(&SceneSpec { sky_rows: 500, ..Default::default() }).is_err());
        assert!(synth_scene(&SceneSpec { beta: -1.0, ..Default::default() }).is_err());
        assert!(distractor_scene(20, 200, 0).is_err());
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = distractor_scene(64, 64, 1).unwrap();
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<SceneSpec>(&text).unwrap(), spec);
        let minimal: SceneSpec = serde_json::from_str(
            r#"{"height":10,"width":12,"sky_rows":3,"sky_color":[0.8,0.8,0.8],"beta":0.5,"airlight":[0.9,0.9,0.9]}"#,
        )
        .unwrap();
        assert_eq!(minimal.texture, 0.05);
        assert!(synth_scene(&minimal).is_ok());
    }
}
