//! Dark channel of a synthetic foggy scene versus its clear version.
//!
//! cargo run --release --example dark_channel [out_dir]

use std::path::PathBuf;

use dehaze::image::{dark_channel, write_gray_png};
use dehaze::synth::{synth_scene, SceneSpec};

fn main() -> dehaze::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "target/examples-out".into()));
    std::fs::create_dir_all(&out).expect("create output dir");

    let scene = synth_scene(&SceneSpec { height: 240, width: 320, sky_rows: 72, ..SceneSpec::default() })?;
    for (name, img) in [("clear", &scene.truth), ("hazy", &scene.hazy)] {
        let dark = dark_channel(img, 7);
        let ground = &dark.data()[72 * 320..];
        let mean = ground.iter().sum::<f64>() / ground.len() as f64;
        println!("{name:>5}: mean dark channel below the sky {mean:.3}");
        write_gray_png(&dark, out.join(format!("dark_{name}.png")))?;
    }
    println!("wrote dark_clear.png and dark_hazy.png to {}", out.display());
    Ok(())
}
