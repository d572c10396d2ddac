//! No-reference defogging quality indicators: contrast enhancement ratio,
//! EME (measure of enhancement) and the blind edge assessment `(e, r, σ)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{Image, ScalarMap};

/// Guard added to block extrema in EME so black blocks stay finite.
pub const EME_GUARD: f64 = 1.0 / 255.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsConfig {
    pub eme_blocks_r: usize,
    pub eme_blocks_c: usize,
    /// Michelson contrast above which a pixel counts as a visible edge.
    pub edge_threshold: f64,
    /// Side of the square window used for the local contrast test.
    pub edge_window: usize,
    /// Count only pixels newly clipped to black in σ (otherwise white too).
    pub black_only: bool,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        MetricsConfig { eme_blocks_r: 8, eme_blocks_c: 8, edge_threshold: 0.05, edge_window: 5, black_only: false }
    }
}

impl MetricsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.eme_blocks_r == 0 || self.eme_blocks_c == 0 {
            return Err(Error::invalid("EME block grid must be at least 1x1"));
        }
        if self.edge_window == 0 || self.edge_window.is_multiple_of(2) {
            return Err(Error::invalid(format!("edge window must be odd, got {}", self.edge_window)));
        }
        if !(0.0..1.0).contains(&self.edge_threshold) {
            return Err(Error::invalid(format!("edge threshold must be in [0, 1), got {}", self.edge_threshold)));
        }
        Ok(())
    }
}

/// Rec. 601 luma, `0.299 r + 0.587 g + 0.114 b`.
pub fn luminance(img: &Image) -> ScalarMap {
    ScalarMap::from_vec_clamped(
        img.height(),
        img.width(),
        img.pixels().map(|[r, g, b]| 0.299 * r + 0.587 * g + 0.114 * b).collect(),
    )
}

fn std_dev(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt()
}

fn check_pair(original: &Image, restored: &Image) -> Result<()> {
    if original.dims() != restored.dims() {
        return Err(Error::invalid(format!(
            "images differ in size: {}x{} vs {}x{}",
            original.height(),
            original.width(),
            restored.height(),
            restored.width()
        )));
    }
    Ok(())
}

/// Relative change in luminance standard deviation, `(C_r - C_o) / C_o`.
/// Fails with [`Error::Degenerate`] when the original has no contrast.
pub fn contrast_enhancement_ratio(original: &Image, restored: &Image) -> Result<f64> {
    check_pair(original, restored)?;
    let c_o = std_dev(luminance(original).data());
    let c_r = std_dev(luminance(restored).data());
    if c_o < 1e-9 {
        return Err(Error::Degenerate(format!("original luminance has no contrast (std {c_o:.3e})")));
    }
    Ok((c_r - c_o) / c_o)
}

/// Half-open bounds of tile `i` when `len` is split into `parts` near-equal tiles.
fn tile(len: usize, parts: usize, i: usize) -> (usize, usize) {
    (i * len / parts, (i + 1) * len / parts)
}

/// EME on luminance: mean over a `blocks_r × blocks_c` tiling of
/// `20 log10((max + g) / (min + g))` with `g = 1/255`. The grid is shrunk to
/// the image size when the image has fewer rows or columns than blocks.
pub fn eme(img: &Image, blocks_r: usize, blocks_c: usize) -> Result<f64> {
    if blocks_r == 0 || blocks_c == 0 {
        return Err(Error::invalid("EME block grid must be at least 1x1"));
    }
    let y = luminance(img);
    let (h, w) = y.dims();
    let (br, bc) = (blocks_r.min(h), blocks_c.min(w));
    let mut total = 0.0;
    for i in 0..br {
        let (r0, r1) = tile(h, br, i);
        for j in 0..bc {
            let (c0, c1) = tile(w, bc, j);
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for r in r0..r1 {
                for &v in &y.data()[r * w + c0..r * w + c1] {
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
            }
            total += 20.0 * ((hi + EME_GUARD) / (lo + EME_GUARD)).log10();
        }
    }
    Ok(total / (br * bc) as f64)
}

/// Result of the blind edge assessment. `e` and `r` are `None` when the
/// original has no visible edges (or the restored image has no measurable
/// gradient for `r`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlindScores {
    pub e: Option<f64>,
    pub r: Option<f64>,
    pub sigma: f64,
    pub visible_edges_original: usize,
    pub visible_edges_restored: usize,
}

fn visible_edges(y: &ScalarMap, window: usize, threshold: f64) -> Vec<bool> {
    let (h, w) = y.dims();
    let rad = window / 2;
    let mut out = vec![false; h * w];
    for r in 0..h {
        for c in 0..w {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for yy in r.saturating_sub(rad)..=(r + rad).min(h - 1) {
                for xx in c.saturating_sub(rad)..=(c + rad).min(w - 1) {
                    let v = y.get(yy, xx);
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
            }
            let sum = hi + lo;
            out[r * w + c] = sum > 0.0 && (hi - lo) / sum > threshold;
        }
    }
    out
}

/// Sobel gradient magnitude with replicated borders.
pub fn sobel_magnitude(y: &ScalarMap) -> Vec<f64> {
    let (h, w) = y.dims();
    let at = |r: isize, c: isize| y.get(r.clamp(0, h as isize - 1) as usize, c.clamp(0, w as isize - 1) as usize);
    let mut out = Vec::with_capacity(h * w);
    for r in 0..h as isize {
        for c in 0..w as isize {
            let gx = (at(r - 1, c + 1) + 2.0 * at(r, c + 1) + at(r + 1, c + 1))
                - (at(r - 1, c - 1) + 2.0 * at(r, c - 1) + at(r + 1, c - 1));
            let gy = (at(r + 1, c - 1) + 2.0 * at(r + 1, c) + at(r + 1, c + 1))
                - (at(r - 1, c - 1) + 2.0 * at(r - 1, c) + at(r - 1, c + 1));
            out.push(gx.hypot(gy));
        }
    }
    out
}

/// Blind contrast-restoration assessment of `restored` against `original`.
///
/// * `e`: relative change in the number of visible edges (local Michelson
///   contrast above the threshold).
/// * `r`: geometric mean, over visible edges of the restored image with a
///   nonzero gradient, of the Sobel gradient ratio restored / original. A
///   zero original gradient is replaced by `1e-9`.
/// * `σ`: share of pixels saturated (all channels 0, or all 1) in the
///   restored image but not in the original.
pub fn blind_assessment(original: &Image, restored: &Image, cfg: &MetricsConfig) -> Result<BlindScores> {
    check_pair(original, restored)?;
    cfg.validate()?;
    let (yo, yr) = (luminance(original), luminance(restored));
    let edges_o = visible_edges(&yo, cfg.edge_window, cfg.edge_threshold);
    let edges_r = visible_edges(&yr, cfg.edge_window, cfg.edge_threshold);
    let n_o = edges_o.iter().filter(|&&v| v).count();
    let n_r = edges_r.iter().filter(|&&v| v).count();

    let (go, gr) = (sobel_magnitude(&yo), sobel_magnitude(&yr));
    let mut log_sum = 0.0;
    let mut count = 0usize;
    for i in 0..edges_r.len() {
        if edges_r[i] && gr[i] > 0.0 {
            let denom = if go[i] > 0.0 { go[i] } else { 1e-9 };
            log_sum += (gr[i] / denom).ln();
            count += 1;
        }
    }

    let saturated = |p: [f64; 3]| {
        let black = p.iter().all(|&v| v <= 0.0);
        let white = p.iter().all(|&v| v >= 1.0);
        black || (!cfg.black_only && white)
    };
    let newly = original.pixels().zip(restored.pixels()).filter(|&(o, r)| saturated(r) && !saturated(o)).count();
    let sigma = newly as f64 / original.pixel_count() as f64;

    let defined = n_o > 0;
    Ok(BlindScores {
        e: defined.then(|| (n_r as f64 - n_o as f64) / n_o as f64),
        r: (defined && count > 0).then(|| (log_sum / count as f64).exp()),
        sigma,
        visible_edges_original: n_o,
        visible_edges_restored: n_r,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmePair {
    pub original: f64,
    pub restored: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlindTriple {
    pub e: Option<f64>,
    pub r: Option<f64>,
    pub sigma: f64,
}

/// All indicators for one original/restored pair. Undefined quantities
/// serialize as `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub contrast_ratio: Option<f64>,
    pub eme: EmePair,
    pub blind: BlindTriple,
    pub params: MetricsConfig,
}

pub fn metrics_report(original: &Image, restored: &Image, cfg: &MetricsConfig) -> Result<MetricsReport> {
    check_pair(original, restored)?;
    cfg.validate()?;
    let contrast_ratio = match contrast_enhancement_ratio(original, restored) {
        Ok(v) => Some(v),
        Err(Error::Degenerate(_)) => None,
        Err(e) => return Err(e),
    };
    let blind = blind_assessment(original, restored, cfg)?;
    Ok(MetricsReport {
        contrast_ratio,
        eme: EmePair {
            original: eme(original, cfg.eme_blocks_r, cfg.eme_blocks_c)?,
            restored: eme(restored, cfg.eme_blocks_r, cfg.eme_blocks_c)?,
        },
        blind: BlindTriple { e: blind.e, r: blind.r, sigma: blind.sigma },
        params: cfg.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn noise(h: usize, w: usize, seed: u64) -> Image {
        let mut s = seed;
        Image::from_fn(h, w, |_, _| {
            [0; 3].map(|_: u8| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (s >> 11) as f64 / (1u64 << 53) as f64
            })
        })
    }

    #[test]
    fn luminance_weights() {
        assert!((luminance(&Image::filled(1, 1, [1.0; 3])).get(0, 0) - 1.0).abs() < 1e-15);
        assert_eq!(luminance(&Image::filled(1, 1, [0.0, 1.0, 0.0])).get(0, 0), 0.587);
        let img = noise(5, 5, 1);
        let y = luminance(&img);
        for r in 0..5 {
            for c in 0..5 {
                let [red, g, b] = img.pixel(r, c);
                assert_eq!(y.get(r, c), 0.299 * red + 0.587 * g + 0.114 * b);
            }
        }
    }

    #[test]
    fn contrast_ratio_cases() {
        let img = noise(16, 16, 2);
        assert_eq!(contrast_enhancement_ratio(&img, &img).unwrap(), 0.0);

        // Gray ramp in [0.3, 0.7]; doubling deviations keeps it in range.
        let ramp = Image::from_fn(8, 8, |r, c| [0.3 + 0.4 * (r * 8 + c) as f64 / 63.0; 3]);
        let mean = 0.5;
        let stretched = Image::from_fn(8, 8, |r, c| ramp.pixel(r, c).map(|v| 2.0 * (v - mean) + mean));
        assert!((contrast_enhancement_ratio(&ramp, &stretched).unwrap() - 1.0).abs() < 1e-12);

        let flat = Image::filled(4, 4, [0.5; 3]);
        assert!(matches!(contrast_enhancement_ratio(&flat, &img.clone()), Err(Error::InvalidArgument(_))));
        assert!(matches!(contrast_enhancement_ratio(&flat, &flat), Err(Error::Degenerate(_))));
    }

    #[test]
    fn eme_closed_forms() {
        assert_eq!(eme(&Image::filled(16, 16, [0.4; 3]), 4, 4).unwrap(), 0.0);
        let bw = Image::from_fn(1, 2, |_, c| [c as f64; 3]);
        let v = eme(&bw, 1, 1).unwrap();
        assert!((v - 20.0 * 256f64.log10()).abs() < 1e-12);
        assert!((v - 48.16).abs() < 0.01);
        assert!(eme(&bw, 0, 1).is_err());
    }

    fn naive_eme(img: &Image, br: usize, bc: usize) -> f64 {
        let (h, w) = img.dims();
        let mut sum = 0.0;
        for i in 0..br {
            for j in 0..bc {
                let mut vals = vec![];
                for r in (i * h / br)..((i + 1) * h / br) {
                    for c in (j * w / bc)..((j + 1) * w / bc) {
                        let [red, g, b] = img.pixel(r, c);
                        vals.push(0.299 * red + 0.587 * g + 0.114 * b);
                    }
                }
                let mx = vals.iter().cloned().fold(f64::MIN, f64::max);
                let mn = vals.iter().cloned().fold(f64::MAX, f64::min);
                sum += 20.0 * ((mx + 1.0 / 255.0) / (mn + 1.0 / 255.0)).log10();
            }
        }
        sum / (br * bc) as f64
    }

    #[test]
    fn eme_matches_naive_blocks() {
        let img = noise(37, 29, 5);
        assert!((eme(&img, 4, 4).unwrap() - naive_eme(&img, 4, 4)).abs() < 1e-9);
    }

    #[test]
    fn identical_pair_blind_scores() {
        let img = noise(24, 24, 3);
        let s = blind_assessment(&img, &img, &MetricsConfig::default()).unwrap();
        assert_eq!((s.e, s.r, s.sigma), (Some(0.0), Some(1.0), 0.0));
    }

    #[test]
    fn sigma_counts_new_black_pixels() {
        let img = Image::from_fn(10, 10, |r, c| [0.2 + 0.005 * (r * 10 + c) as f64; 3]);
        let darkened = Image::from_fn(10, 10, |r, c| if (r, c) == (4, 7) { [0.0; 3] } else { img.pixel(r, c) });
        let s = blind_assessment(&img, &darkened, &MetricsConfig::default()).unwrap();
        assert_eq!(s.sigma, 0.01);

        let whitened = Image::from_fn(10, 10, |r, c| if r == 0 { [1.0; 3] } else { img.pixel(r, c) });
        assert_eq!(blind_assessment(&img, &whitened, &MetricsConfig::default()).unwrap().sigma, 0.1);
        let cfg = MetricsConfig { black_only: true, ..Default::default() };
        assert_eq!(blind_assessment(&img, &whitened, &cfg).unwrap().sigma, 0.0);
    }

    #[test]
    fn step_edge_gradient_ratio() {
        let step = |lo: f64, hi: f64| Image::from_fn(20, 32, move |_, c| if c < 16 { [lo; 3] } else { [hi; 3] });
        let s = blind_assessment(&step(0.4, 0.6), &step(0.3, 0.7), &MetricsConfig::default()).unwrap();
        assert!((s.r.unwrap() - 2.0).abs() <= 0.1, "{s:?}");
        assert_eq!(s.e, Some(0.0));
    }

    #[test]
    fn flat_original_is_degenerate() {
        let flat = Image::filled(12, 12, [0.5; 3]);
        let s = blind_assessment(&flat, &noise(12, 12, 1), &MetricsConfig::default()).unwrap();
        assert_eq!(s.visible_edges_original, 0);
        assert!(s.e.is_none() && s.r.is_none());
    }

    #[test]
    fn report_json_shape() {
        let img = noise(16, 16, 8);
        let rep = metrics_report(&img, &img, &MetricsConfig::default()).unwrap();
        let v = serde_json::to_value(&rep).unwrap();
        assert_eq!(v["contrast_ratio"], 0.0);
        assert_eq!(v["blind"]["r"], 1.0);
        assert!(v["eme"]["original"].is_number());
        assert_eq!(v["params"]["edge_threshold"], 0.05);
    }

    proptest! {
        #[test]
        fn eme_ignores_block_permutation(br in 1usize..5, bc in 1usize..5, bs in 2usize..6, seed in any::<u64>(), perm_seed in any::<u64>()) {
            let (h, w) = (br * bs, bc * bs);
            let img = noise(h, w, seed);
            let mut order: Vec<usize> = (0..br * bc).collect();
            let mut s = perm_seed;
            for i in (1..order.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                order.swap(i, (s >> 33) as usize % (i + 1));
            }
            let shuffled = Image::from_fn(h, w, |r, c| {
                let src = order[(r / bs) * bc + c / bs];
                img.pixel((src / bc) * bs + r % bs, (src % bc) * bs + c % bs)
            });
            let (a, b) = (eme(&img, br, bc).unwrap(), eme(&shuffled, br, bc).unwrap());
            prop_assert!((a - b).abs() < 1e-9);
        }

        #[test]
        fn sigma_in_unit_range_and_r_positive(seed in any::<u64>(), seed2 in any::<u64>()) {
            let (a, b) = (noise(12, 12, seed), noise(12, 12, seed2));
            let s = blind_assessment(&a, &b, &MetricsConfig::default()).unwrap();
            prop_assert!((0.0..=1.0).contains(&s.sigma));
            if let Some(r) = s.r { prop_assert!(r > 0.0); }
            if let Some(e) = s.e { prop_assert!(e >= -1.0); }
        }
    }
}
