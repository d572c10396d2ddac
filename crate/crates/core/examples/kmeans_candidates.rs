//! Inside the clustered estimator: candidate positions, the k-means
//! partition and the cluster that wins.

use dehaze::airlight::{estimate_airlight_clustered_detailed, kmeans};
use dehaze::image::dark_channel;
use dehaze::synth::{distractor_scene, synth_scene};

fn main() -> dehaze::Result<()> {
    let spec = distractor_scene(240, 320, 3)?;
    let scene = synth_scene(&spec)?;
    let dark = dark_channel(&scene.hazy, 7);
    let detail = estimate_airlight_clustered_detailed(&scene.hazy, &dark, 0.001, 5, 0)?;

    println!("{} candidates, k = {}", detail.candidates.len(), detail.clusters.k);
    for id in 0..detail.clusters.k {
        let [r, c] = detail.clusters.centroids[id];
        let mark = if id == detail.chosen { "  <- chosen" } else { "" };
        println!("  cluster {id}: {:>3} points around ({r:6.1}, {c:6.1}){mark}", detail.clusters.sizes[id]);
    }
    println!("objective per Lloyd iteration: {:.1?}", detail.clusters.objective_history);

    // Same points, different seeds: the partition may move, the objective stays close.
    let points: Vec<[f64; 2]> = detail.candidates.points.iter().map(|&(r, c)| [r as f64, c as f64]).collect();
    for seed in 1..4 {
        let c = kmeans(&points, 5, seed)?;
        println!("seed {seed}: sizes {:?}, objective {:.1}", c.sizes, c.objective);
    }
    Ok(())
}
