//! Single-image fog removal based on the atmospheric scattering model.
//!
//! The pipeline computes the dark channel, estimates the atmospheric light
//! by clustering the positions of the brightest dark-channel pixels, derives
//! a windowed transmission estimate, refines it with a matting-Laplacian
//! solve and inverts the scattering model. A brightest-pixel airlight
//! estimator and standard no-reference quality metrics are included for
//! comparison.
//!
//! ```no_run
//! use dehaze::{image::read_image, pipeline::{defog, PipelineConfig}};
//!
//! let img = read_image("foggy.png")?;
//! let out = defog(&img, &PipelineConfig::default())?;
//! dehaze::image::write_png(&out.restored, "clear.png")?;
//! # Ok::<(), dehaze::Error>(())
//! ```

pub mod airlight;
pub mod cli;
mod error;
pub mod image;
pub mod metrics;
pub mod pipeline;
pub mod restoration;
pub mod synth;
pub mod transmission;

pub use error::{Error, Result};
