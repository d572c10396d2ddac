//! No-reference indicators for a foggy image and two candidate restorations:
//! the ground truth and the pipeline output.

use dehaze::metrics::{metrics_report, MetricsConfig};
use dehaze::pipeline::{defog, PipelineConfig};
use dehaze::synth::{synth_scene, SceneSpec};

fn main() -> dehaze::Result<()> {
    let scene = synth_scene(&SceneSpec { height: 160, width: 200, sky_rows: 48, seed: 2, ..SceneSpec::default() })?;
    let restored = defog(&scene.hazy, &PipelineConfig::default())?.restored;
    let cfg = MetricsConfig::default();

    println!("{:<10} {:>8} {:>8} {:>8} {:>8} {:>8}", "", "ratio", "EME", "e", "r", "sigma");
    for (name, img) in [("identity", &scene.hazy), ("truth", &scene.truth), ("defogged", &restored)] {
        let m = metrics_report(&scene.hazy, img, &cfg)?;
        let opt = |v: Option<f64>| v.map_or("null".to_string(), |v| format!("{v:.3}"));
        println!(
            "{name:<10} {:>8} {:>8.2} {:>8} {:>8} {:>8.4}",
            opt(m.contrast_ratio),
            m.eme.restored,
            opt(m.blind.e),
            opt(m.blind.r),
            m.blind.sigma
        );
    }
    Ok(())
}
