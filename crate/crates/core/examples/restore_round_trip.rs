//! Fog a clear image with a known transmission and airlight, then invert
//! the model; the error is floating-point noise wherever t >= t0.

use dehaze::restoration::{restore_unclamped, synthesize_fog, RestoreConfig};
use dehaze::synth::{synth_scene, SceneSpec};

fn main() -> dehaze::Result<()> {
    let spec = SceneSpec { beta: 1.5, ..SceneSpec::default() };
    let scene = synth_scene(&spec)?;
    let cfg = RestoreConfig::default();
    let fogged = synthesize_fog(&scene.truth, &scene.transmission, spec.airlight)?;
    let back = restore_unclamped(&fogged, &scene.transmission, spec.airlight, &cfg)?;

    let (mut worst, mut skipped) = (0.0f64, 0);
    for (i, &t) in scene.transmission.data().iter().enumerate() {
        if t < cfg.t0 {
            skipped += 1;
            continue;
        }
        for ch in 0..3 {
            worst = worst.max((back[i * 3 + ch] - scene.truth.data()[i * 3 + ch]).abs());
        }
    }
    println!("max |restored - truth| = {worst:.2e}; {skipped} pixels with t < {} skipped", cfg.t0);
    Ok(())
}
