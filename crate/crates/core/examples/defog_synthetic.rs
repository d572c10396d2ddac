//! The whole pipeline on a synthetic scene, with the recovered image scored
//! against the ground truth it was made from.
//!
//! cargo run --release --example defog_synthetic [out_dir]

use std::path::PathBuf;

use dehaze::image::{write_gray_png, write_png};
use dehaze::pipeline::{defog, PipelineConfig};
use dehaze::synth::{distractor_scene, synth_scene};

fn main() -> dehaze::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "target/examples-out".into()));
    std::fs::create_dir_all(&out).expect("create output dir");

    let spec = distractor_scene(240, 320, 1)?;
    let scene = synth_scene(&spec)?;
    let result = defog(&scene.hazy, &PipelineConfig::default())?;

    let mae = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() / a.len() as f64;
    println!("airlight {:.3?} (true {:.3?})", result.airlight.brightness, spec.airlight);
    println!("mean |hazy - truth|     {:.4}", mae(scene.hazy.data(), scene.truth.data()));
    println!("mean |restored - truth| {:.4}", mae(result.restored.data(), scene.truth.data()));
    println!("{}", serde_json::to_string_pretty(&result.timings).expect("serializable"));

    write_png(&scene.hazy, out.join("hazy.png"))?;
    write_png(&result.restored, out.join("restored.png"))?;
    write_gray_png(&result.transmission, out.join("transmission.png"))?;
    println!("images written to {}", out.display());
    Ok(())
}
