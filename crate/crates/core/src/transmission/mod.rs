//! Transmission estimation: the windowed dark-channel estimate and its
//! refinement by solving the sparse matting system `(L + λI) t = λ t̃`.

mod laplacian;
mod rough;
mod sparse;

pub use laplacian::matting_laplacian;
pub use rough::{rough_transmission, AIRLIGHT_FLOOR};
pub use sparse::{conjugate_gradient, CgSettings, CgSolution, CsrMatrix};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{resize, resize_map, Image, ScalarMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum RefineMode {
    /// Solve the matting system at full resolution.
    Matting,
    /// Shrink so the longer side is at most `max_solve_dim`, solve, and
    /// upsample the result bicubically.
    #[value(alias = "downscale_matting")]
    DownscaleMatting,
    /// Keep the rough transmission.
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefineConfig {
    /// Fraction of haze removed, `0 < omega <= 1`.
    pub omega: f64,
    /// Weight of the data term.
    pub lambda: f64,
    /// Covariance regularizer of the matting windows.
    pub epsilon: f64,
    pub matting_window_radius: usize,
    /// Longest side at which the downscaled solve runs.
    pub max_solve_dim: usize,
    pub solver_tol: f64,
    pub solver_max_iter: usize,
    pub mode: RefineMode,
}

impl Default for RefineConfig {
    fn default() -> Self {
        RefineConfig {
            omega: 0.95,
            lambda: 1e-4,
            epsilon: 1e-7,
            matting_window_radius: 1,
            max_solve_dim: 200,
            solver_tol: 1e-5,
            solver_max_iter: 5000,
            mode: RefineMode::DownscaleMatting,
        }
    }
}

impl RefineConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0 && self.omega <= 1.0) {
            return Err(Error::invalid(format!("omega must be in (0, 1], got {}", self.omega)));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::invalid(format!("lambda must be positive, got {}", self.lambda)));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::invalid(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if !(self.solver_tol > 0.0) {
            return Err(Error::invalid(format!("solver tolerance must be positive, got {}", self.solver_tol)));
        }
        if self.solver_max_iter == 0 || self.max_solve_dim == 0 || self.matting_window_radius == 0 {
            return Err(Error::invalid("solver_max_iter, max_solve_dim and matting_window_radius must be >= 1"));
        }
        Ok(())
    }

    fn cg(&self) -> CgSettings {
        CgSettings { tolerance: self.solver_tol, max_iterations: self.solver_max_iter }
    }
}

/// The linear system `(L + λI) t = λ t̃` on a `height × width` grid.
#[derive(Debug, Clone)]
pub struct SparseSystem {
    pub height: usize,
    pub width: usize,
    pub laplacian: CsrMatrix,
    pub lambda: f64,
    /// `λ t̃`, row-major.
    pub rhs: Vec<f64>,
    /// The rough transmission, used as the starting iterate.
    pub rough: Vec<f64>,
}

impl SparseSystem {
    pub fn len(&self) -> usize {
        self.rhs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rhs.is_empty()
    }

    /// `(L + λI) x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.len()];
        self.laplacian.mul_vec_shifted(x, self.lambda, &mut y);
        y
    }

    /// `‖(L + λI) x - λ t̃‖ / ‖λ t̃‖`.
    pub fn relative_residual(&self, x: &[f64]) -> f64 {
        let ax = self.apply(x);
        let num: f64 = ax.iter().zip(&self.rhs).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let den: f64 = self.rhs.iter().map(|b| b * b).sum::<f64>().sqrt();
        if den == 0.0 {
            num
        } else {
            num / den
        }
    }
}

pub fn build_matting_system(img: &Image, rough: &ScalarMap, cfg: &RefineConfig) -> Result<SparseSystem> {
    img.check_same_dims(rough.dims(), "rough transmission")?;
    let laplacian = matting_laplacian(img, cfg.epsilon, cfg.matting_window_radius);
    Ok(SparseSystem {
        height: img.height(),
        width: img.width(),
        laplacian,
        lambda: cfg.lambda,
        rhs: rough.data().iter().map(|t| cfg.lambda * t).collect(),
        rough: rough.data().to_vec(),
    })
}

/// Raw conjugate-gradient solution of the system, before clamping.
pub fn solve_system(system: &SparseSystem, cfg: &RefineConfig) -> Result<CgSolution> {
    let sol = conjugate_gradient(&system.laplacian, system.lambda, &system.rhs, &system.rough, cfg.cg())?;
    debug_assert!(sol.relative_residual <= cfg.solver_tol);
    Ok(sol)
}

/// Refined transmission: solves the system and clamps to `[0, 1]`.
pub fn solve_refined(system: &SparseSystem, cfg: &RefineConfig) -> Result<ScalarMap> {
    let sol = solve_system(system, cfg)?;
    Ok(ScalarMap::from_vec_clamped(system.height, system.width, sol.x))
}

/// Size used by the downscaled solve: longer side at most `max_dim`, aspect kept.
pub fn solve_size(height: usize, width: usize, max_dim: usize) -> (usize, usize) {
    let longer = height.max(width);
    if longer <= max_dim {
        return (height, width);
    }
    let scale = max_dim as f64 / longer as f64;
    let fit = |v: usize| ((v as f64 * scale).round() as usize).clamp(1, max_dim);
    (fit(height), fit(width))
}

pub fn refine_transmission(img: &Image, rough: &ScalarMap, cfg: &RefineConfig) -> Result<ScalarMap> {
    cfg.validate()?;
    img.check_same_dims(rough.dims(), "rough transmission")?;
    match cfg.mode {
        RefineMode::None => Ok(rough.clone()),
        RefineMode::Matting => solve_refined(&build_matting_system(img, rough, cfg)?, cfg),
        RefineMode::DownscaleMatting => {
            let (h, w) = img.dims();
            let (sh, sw) = solve_size(h, w, cfg.max_solve_dim);
            if (sh, sw) == (h, w) {
                return solve_refined(&build_matting_system(img, rough, cfg)?, cfg);
            }
            let small_img = resize(img, sh, sw);
            let small_rough = resize_map(rough, sh, sw);
            let refined = solve_refined(&build_matting_system(&small_img, &small_rough, cfg)?, cfg)?;
            Ok(resize_map(&refined, h, w))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn textured(h: usize, w: usize, seed: u64) -> Image {
        let mut s = seed;
        Image::from_fn(h, w, |r, c| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let n = (s >> 11) as f64 / (1u64 << 53) as f64;
            [0.3 + 0.4 * (r as f64 / h as f64) + 0.1 * n, 0.5 + 0.2 * n, 0.6 - 0.3 * (c as f64 / w as f64)]
        })
    }

    #[test]
    fn config_validation() {
        assert!(RefineConfig::default().validate().is_ok());
        for bad in [
            RefineConfig { omega: 0.0, ..Default::default() },
            RefineConfig { omega: 1.2, ..Default::default() },
            RefineConfig { lambda: 0.0, ..Default::default() },
            RefineConfig { epsilon: -1.0, ..Default::default() },
            RefineConfig { solver_max_iter: 0, ..Default::default() },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn solve_size_keeps_aspect() {
        assert_eq!(solve_size(100, 150, 200), (100, 150));
        assert_eq!(solve_size(400, 600, 200), (133, 200));
        assert_eq!(solve_size(256, 384, 128), (85, 128));
        assert_eq!(solve_size(1000, 2, 10), (10, 1));
    }

    #[test]
    fn mode_none_is_identity() {
        let img = textured(10, 12, 1);
        let rough = rough_transmission(&img, [0.9; 3], 0.95, 2);
        let cfg = RefineConfig { mode: RefineMode::None, ..Default::default() };
        assert_eq!(refine_transmission(&img, &rough, &cfg).unwrap(), rough);
    }

    #[test]
    fn constant_rough_on_constant_image() {
        let img = Image::filled(12, 12, [0.5, 0.6, 0.7]);
        let rough = ScalarMap::filled(12, 12, 0.37);
        let cfg = RefineConfig { mode: RefineMode::Matting, ..Default::default() };
        let t = refine_transmission(&img, &rough, &cfg).unwrap();
        assert!(t.data().iter().all(|v| (v - 0.37).abs() < 1e-6));
    }

    #[test]
    fn heavy_regularization_returns_rough() {
        let img = textured(16, 16, 4);
        let rough = rough_transmission(&img, [0.9; 3], 0.95, 3);
        let cfg = RefineConfig { lambda: 1e3, mode: RefineMode::Matting, ..Default::default() };
        let t = refine_transmission(&img, &rough, &cfg).unwrap();
        for (a, b) in t.data().iter().zip(rough.data()) {
            assert!((a - b).abs() < 0.01);
        }
    }

    #[test]
    fn small_images_skip_resampling() {
        let img = textured(20, 30, 9);
        let rough = rough_transmission(&img, [0.9; 3], 0.95, 3);
        let full = refine_transmission(&img, &rough, &RefineConfig { mode: RefineMode::Matting, ..Default::default() });
        let down =
            refine_transmission(&img, &rough, &RefineConfig { mode: RefineMode::DownscaleMatting, ..Default::default() });
        for (a, b) in full.unwrap().data().iter().zip(down.unwrap().data()) {
            assert!((a - b).abs() <= 1e-6);
        }
    }

    #[test]
    fn residual_bound_holds() {
        let img = textured(24, 20, 2);
        let rough = rough_transmission(&img, [0.85, 0.9, 0.95], 0.95, 3);
        let cfg = RefineConfig { mode: RefineMode::Matting, ..Default::default() };
        let system = build_matting_system(&img, &rough, &cfg).unwrap();
        let sol = solve_system(&system, &cfg).unwrap();
        assert!(system.relative_residual(&sol.x) <= cfg.solver_tol);
    }

    #[test]
    fn rough_values_stay_in_range_after_refinement() {
        let img = textured(30, 40, 5);
        let rough = rough_transmission(&img, [0.8; 3], 0.95, 4);
        let t = refine_transmission(&img, &rough, &RefineConfig { mode: RefineMode::Matting, ..Default::default() })
            .unwrap();
        assert!(t.data().iter().all(|v| (0.0..=1.0).contains(v)));
    }
}
