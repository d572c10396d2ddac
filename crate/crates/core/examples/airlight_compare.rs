//! Brightest-candidate vs clustered atmospheric light on a scene with a
//! bright object below the horizon.
//!
//! cargo run --release --example airlight_compare [seed]

use dehaze::airlight::{estimate_airlight_baseline, estimate_airlight_clustered, DEFAULT_CLUSTERS, DEFAULT_SOURCE_FRACTION};
use dehaze::cli::{annotate, BASELINE_MARKER, CLUSTERED_MARKER};
use dehaze::image::{dark_channel, write_png};
use dehaze::synth::{distractor_scene, synth_scene};

fn main() -> dehaze::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let spec = distractor_scene(240, 320, seed)?;
    let scene = synth_scene(&spec)?;
    let dark = dark_channel(&scene.hazy, 7);

    let clustered = estimate_airlight_clustered(&scene.hazy, &dark, DEFAULT_SOURCE_FRACTION, DEFAULT_CLUSTERS, 0)?;
    let baseline = estimate_airlight_baseline(&scene.hazy, &dark, DEFAULT_SOURCE_FRACTION)?;

    let err = |a: [f64; 3]| (0..3).map(|i| (a[i] - spec.airlight[i]).abs()).fold(0.0, f64::max);
    println!("true airlight     {:.3?}", spec.airlight);
    for e in [&clustered, &baseline] {
        println!(
            "{:<9} {:.3?} at ({:.1}, {:.1}), error {:.3}",
            format!("{:?}", e.method).to_lowercase(),
            e.brightness,
            e.location[0],
            e.location[1],
            err(e.brightness)
        );
    }
    println!("distractor at {:?}, sky rows 0..{}", spec.distractor.unwrap().rect, spec.sky_rows);

    let marked = annotate(&scene.hazy, &[(baseline.location, BASELINE_MARKER), (clustered.location, CLUSTERED_MARKER)]);
    write_png(&marked, "target/airlight_compare.png")?;
    println!("markers written to target/airlight_compare.png (red: baseline, blue: clustered)");
    Ok(())
}
