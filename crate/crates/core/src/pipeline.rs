//! End-to-end defogging: dark channel, atmospheric light, rough and refined
//! transmission, restoration.

use std::time::Instant;

use serde::{Deserialize, Serialize, Serializer};

use crate::airlight::{estimate_airlight, AirlightEstimate, AirlightMethod};
use crate::error::{Error, Result};
use crate::image::{dark_channel, Image, ScalarMap};
use crate::metrics::{MetricsConfig, MetricsReport};
use crate::restoration::{restore, RestoreConfig};
use crate::transmission::{refine_transmission, rough_transmission, RefineConfig, RefineMode};

/// Every tunable of the pipeline. Also the flag set of the command-line
/// tool, where each field is a kebab-case flag that can be overridden by a
/// `DEHAZE_*` environment variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, clap::Args)]
pub struct PipelineConfig {
    /// Dark channel window radius (7 gives a 15x15 window).
    #[arg(long, env = "DEHAZE_WINDOW_RADIUS", default_value_t = 7)]
    pub window_radius: usize,
    /// Share of haze removed, in (0, 1].
    #[arg(long, env = "DEHAZE_OMEGA", default_value_t = 0.95)]
    pub omega: f64,
    /// Fraction of pixels taken as atmospheric light candidates.
    #[arg(long, env = "DEHAZE_FRACTION", default_value_t = 0.001)]
    pub fraction: f64,
    /// Number of k-means clusters.
    #[arg(long, env = "DEHAZE_K", default_value_t = 5)]
    pub k: usize,
    /// Seed for k-means++ initialization.
    #[arg(long, env = "DEHAZE_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Lower bound on transmission during restoration.
    #[arg(long, env = "DEHAZE_T0", default_value_t = 0.1)]
    pub t0: f64,
    /// Data-term weight of the matting system.
    #[arg(long, env = "DEHAZE_LAMBDA", default_value_t = 1e-4)]
    pub lambda: f64,
    /// Matting covariance regularizer.
    #[arg(long, env = "DEHAZE_EPSILON", default_value_t = 1e-7)]
    pub epsilon: f64,
    #[arg(long, env = "DEHAZE_MATTING_WINDOW_RADIUS", default_value_t = 1)]
    pub matting_window_radius: usize,
    #[arg(long, env = "DEHAZE_REFINE_MODE", value_enum, default_value_t = RefineMode::DownscaleMatting)]
    pub refine_mode: RefineMode,
    /// Longest side of the downscaled matting solve.
    #[arg(long, env = "DEHAZE_MAX_SOLVE_DIM", default_value_t = 200)]
    pub max_solve_dim: usize,
    #[arg(long, env = "DEHAZE_SOLVER_TOL", default_value_t = 1e-5)]
    pub solver_tol: f64,
    #[arg(long, env = "DEHAZE_SOLVER_MAX_ITER", default_value_t = 5000)]
    pub solver_max_iter: usize,
    #[arg(long, env = "DEHAZE_AIRLIGHT_METHOD", value_enum, default_value_t = AirlightMethod::Clustered)]
    pub airlight_method: AirlightMethod,
    #[arg(long, env = "DEHAZE_EME_BLOCKS_R", default_value_t = 8)]
    pub eme_blocks_r: usize,
    #[arg(long, env = "DEHAZE_EME_BLOCKS_C", default_value_t = 8)]
    pub eme_blocks_c: usize,
    /// Michelson contrast threshold for visible edges.
    #[arg(long, env = "DEHAZE_EDGE_THRESHOLD", default_value_t = 0.05)]
    pub edge_threshold: f64,
    /// Count only black pixels as newly saturated.
    #[arg(long, env = "DEHAZE_BLACK_ONLY")]
    pub black_only: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let refine = RefineConfig::default();
        let metrics = MetricsConfig::default();
        PipelineConfig {
            window_radius: 7,
            omega: refine.omega,
            fraction: crate::airlight::DEFAULT_SOURCE_FRACTION,
            k: crate::airlight::DEFAULT_CLUSTERS,
            seed: 0,
            t0: RestoreConfig::default().t0,
            lambda: refine.lambda,
            epsilon: refine.epsilon,
            matting_window_radius: refine.matting_window_radius,
            refine_mode: refine.mode,
            max_solve_dim: refine.max_solve_dim,
            solver_tol: refine.solver_tol,
            solver_max_iter: refine.solver_max_iter,
            airlight_method: AirlightMethod::Clustered,
            eme_blocks_r: metrics.eme_blocks_r,
            eme_blocks_c: metrics.eme_blocks_c,
            edge_threshold: metrics.edge_threshold,
            black_only: metrics.black_only,
        }
    }
}

impl PipelineConfig {
    pub fn refine(&self) -> RefineConfig {
        RefineConfig {
            omega: self.omega,
            lambda: self.lambda,
            epsilon: self.epsilon,
            matting_window_radius: self.matting_window_radius,
            max_solve_dim: self.max_solve_dim,
            solver_tol: self.solver_tol,
            solver_max_iter: self.solver_max_iter,
            mode: self.refine_mode,
        }
    }

    pub fn restore(&self) -> RestoreConfig {
        RestoreConfig { t0: self.t0 }
    }

    pub fn metrics(&self) -> MetricsConfig {
        MetricsConfig {
            eme_blocks_r: self.eme_blocks_r,
            eme_blocks_c: self.eme_blocks_c,
            edge_threshold: self.edge_threshold,
            black_only: self.black_only,
            ..MetricsConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fraction > 0.0 && self.fraction <= 1.0) {
            return Err(Error::invalid(format!("fraction must be in (0, 1], got {}", self.fraction)));
        }
        if self.k == 0 {
            return Err(Error::invalid("k must be at least 1"));
        }
        self.refine().validate()?;
        self.restore().validate()?;
        self.metrics().validate()
    }

    /// Command-line flags that reproduce this configuration.
    pub fn to_args(&self) -> Vec<String> {
        let mut args = vec![
            format!("--window-radius={}", self.window_radius),
            format!("--omega={}", self.omega),
            format!("--fraction={}", self.fraction),
            format!("--k={}", self.k),
            format!("--seed={}", self.seed),
            format!("--t0={}", self.t0),
            format!("--lambda={}", self.lambda),
            format!("--epsilon={}", self.epsilon),
            format!("--matting-window-radius={}", self.matting_window_radius),
            format!("--refine-mode={}", value_name(&self.refine_mode)),
            format!("--max-solve-dim={}", self.max_solve_dim),
            format!("--solver-tol={}", self.solver_tol),
            format!("--solver-max-iter={}", self.solver_max_iter),
            format!("--airlight-method={}", value_name(&self.airlight_method)),
            format!("--eme-blocks-r={}", self.eme_blocks_r),
            format!("--eme-blocks-c={}", self.eme_blocks_c),
            format!("--edge-threshold={}", self.edge_threshold),
        ];
        if self.black_only {
            args.push("--black-only".into());
        }
        args
    }
}

fn value_name<T: clap::ValueEnum>(v: &T) -> String {
    v.to_possible_value().expect("no skipped variants").get_name().to_owned()
}

fn seconds_3dp<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64((v * 1000.0).round() / 1000.0)
}

/// Wall-clock seconds per stage. Decode and encode are reported apart from
/// the compute stages; `airlight_estimation` is dark channel + airlight.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimings {
    #[serde(serialize_with = "seconds_3dp")]
    pub decode: f64,
    #[serde(serialize_with = "seconds_3dp")]
    pub dark_channel: f64,
    #[serde(serialize_with = "seconds_3dp")]
    pub airlight: f64,
    #[serde(serialize_with = "seconds_3dp")]
    pub airlight_estimation: f64,
    #[serde(serialize_with = "seconds_3dp")]
    pub rough_transmission: f64,
    #[serde(serialize_with = "seconds_3dp")]
    pub refine: f64,
    #[serde(serialize_with = "seconds_3dp")]
    pub restore: f64,
    #[serde(serialize_with = "seconds_3dp")]
    pub encode: f64,
}

/// Intermediate and final products of one run.
#[derive(Debug, Clone)]
pub struct DefogOutput {
    pub dark: ScalarMap,
    pub airlight: AirlightEstimate,
    pub rough: ScalarMap,
    pub transmission: ScalarMap,
    pub restored: Image,
    pub timings: StageTimings,
}

fn timed<T>(slot: &mut f64, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    *slot = start.elapsed().as_secs_f64();
    out
}

pub fn defog(img: &Image, cfg: &PipelineConfig) -> Result<DefogOutput> {
    cfg.validate()?;
    let mut t = StageTimings::default();
    let dark = timed(&mut t.dark_channel, || dark_channel(img, cfg.window_radius));
    let airlight = timed(&mut t.airlight, || {
        estimate_airlight(cfg.airlight_method, img, &dark, cfg.fraction, cfg.k, cfg.seed)
    })?;
    t.airlight_estimation = t.dark_channel + t.airlight;
    let rough = timed(&mut t.rough_transmission, || {
        rough_transmission(img, airlight.brightness, cfg.omega, cfg.window_radius)
    });
    let transmission = timed(&mut t.refine, || refine_transmission(img, &rough, &cfg.refine()))?;
    let restored = timed(&mut t.restore, || restore(img, &transmission, airlight.brightness, &cfg.restore()))?;
    Ok(DefogOutput { dark, airlight, rough, transmission, restored, timings: t })
}

/// Machine-readable summary printed by `dehaze defog`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub airlight: AirlightEstimate,
    pub timings: StageTimings,
    pub metrics: MetricsReport,
    pub config: PipelineConfig,
}

impl RunReport {
    /// JSON with the timing block removed, for run-to-run comparisons.
    pub fn without_timings(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("report is serializable");
        v.as_object_mut().expect("object").remove("timings");
        v
    }
}
