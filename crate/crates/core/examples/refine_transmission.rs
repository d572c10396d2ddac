//! Rough vs matting-refined transmission, full resolution vs the
//! downscale-solve-upscale shortcut, against the known transmission.

use std::time::Instant;

use dehaze::airlight::estimate_airlight_clustered;
use dehaze::image::{dark_channel, ScalarMap};
use dehaze::synth::{synth_scene, SceneSpec};
use dehaze::transmission::{refine_transmission, rough_transmission, RefineConfig, RefineMode};

fn rmse(a: &ScalarMap, b: &ScalarMap) -> f64 {
    let n = a.data().len() as f64;
    (a.data().iter().zip(b.data()).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / n).sqrt()
}

fn main() -> dehaze::Result<()> {
    let spec = SceneSpec { height: 180, width: 240, sky_rows: 50, ..SceneSpec::default() };
    let scene = synth_scene(&spec)?;
    let img = &scene.hazy;
    let a = estimate_airlight_clustered(img, &dark_channel(img, 7), 0.001, 5, 0)?;
    let rough = rough_transmission(img, a.brightness, 0.95, 7);
    println!("rough          rmse vs truth {:.4}", rmse(&rough, &scene.transmission));

    let mut results = Vec::new();
    let full = RefineConfig { mode: RefineMode::Matting, ..RefineConfig::default() };
    let down = RefineConfig { mode: RefineMode::DownscaleMatting, max_solve_dim: 120, ..RefineConfig::default() };
    for (name, cfg) in [("matting", full), ("downscale 120", down)] {
        let start = Instant::now();
        let t = refine_transmission(img, &rough, &cfg)?;
        println!("{name:<14} rmse vs truth {:.4}  ({:.2?})", rmse(&t, &scene.transmission), start.elapsed());
        results.push(t);
    }
    println!("full vs downscaled rmse {:.4}", rmse(&results[0], &results[1]));
    Ok(())
}
