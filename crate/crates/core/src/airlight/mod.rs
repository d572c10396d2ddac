//! Atmospheric light estimation.
//!
//! Both estimators start from the same candidate set: the brightest fraction
//! of the dark channel. The baseline keeps the single brightest candidate,
//! which a bright object wider than the dark-channel window (a white wall, a
//! headlight) can capture. The clustered estimator groups candidate positions
//! with k-means and averages the most populated group, so isolated bright
//! objects are outvoted by the extended hazy region.

mod candidates;
mod kmeans;

pub use candidates::{candidate_count, select_candidates, CandidateSet, DEFAULT_SOURCE_FRACTION};
pub use kmeans::{kmeans, ClusterSet, DEFAULT_CLUSTERS, MAX_ITERATIONS};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::image::{Image, ScalarMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum AirlightMethod {
    /// Centroid and mean color of the largest candidate cluster.
    Clustered,
    /// Brightest single candidate.
    Baseline,
}

/// Estimated atmospheric light: its color and where in the image it was found.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AirlightEstimate {
    pub method: AirlightMethod,
    /// Linear RGB in `[0, 1]`.
    pub brightness: [f64; 3],
    /// `(row, col)`; fractional for the clustered estimator.
    pub location: [f64; 2],
    /// Number of candidate points considered.
    pub candidates: usize,
    pub k: Option<usize>,
    pub seed: Option<u64>,
}

impl AirlightEstimate {
    pub fn distance_to(&self, other: &AirlightEstimate) -> f64 {
        let (dr, dc) = (self.location[0] - other.location[0], self.location[1] - other.location[1]);
        dr.hypot(dc)
    }
}

/// Everything the clustered estimator computed on the way to its answer.
#[derive(Debug, Clone)]
pub struct ClusteredAirlight {
    pub estimate: AirlightEstimate,
    pub candidates: CandidateSet,
    pub clusters: ClusterSet,
    /// Id of the retained (most populated) cluster.
    pub chosen: usize,
}

/// Largest cluster; ties go to the lower within-cluster cost, then the lower id.
fn largest_cluster(clusters: &ClusterSet, points: &[[f64; 2]]) -> usize {
    let costs = clusters.cluster_costs(points);
    (0..clusters.k)
        .min_by(|&a, &b| {
            clusters.sizes[b]
                .cmp(&clusters.sizes[a])
                .then(costs[a].total_cmp(&costs[b]))
                .then(a.cmp(&b))
        })
        .expect("k >= 1")
}

pub fn estimate_airlight_clustered_detailed(
    img: &Image,
    dark: &ScalarMap,
    fraction: f64,
    k: usize,
    seed: u64,
) -> Result<ClusteredAirlight> {
    img.check_same_dims(dark.dims(), "dark channel")?;
    let candidates = select_candidates(dark, fraction)?;
    let points: Vec<[f64; 2]> = candidates.points.iter().map(|&(r, c)| [r as f64, c as f64]).collect();
    let clusters = kmeans(&points, k, seed)?;
    let chosen = largest_cluster(&clusters, &points);

    let mut location = [0.0; 2];
    let mut brightness = [0.0; 3];
    let mut count = 0usize;
    for i in clusters.members(chosen) {
        let (r, c) = candidates.points[i];
        location[0] += r as f64;
        location[1] += c as f64;
        let px = img.pixel(r, c);
        for ch in 0..3 {
            brightness[ch] += px[ch];
        }
        count += 1;
    }
    let n = count as f64;
    location.iter_mut().for_each(|v| *v /= n);
    brightness.iter_mut().for_each(|v| *v = (*v / n).clamp(0.0, 1.0));

    let estimate = AirlightEstimate {
        method: AirlightMethod::Clustered,
        brightness,
        location,
        candidates: candidates.len(),
        k: Some(clusters.k),
        seed: Some(seed),
    };
    Ok(ClusteredAirlight { estimate, candidates, clusters, chosen })
}

/// Atmospheric light from the most populated cluster of candidate positions:
/// location is the cluster centroid, brightness the mean input color over its
/// members.
pub fn estimate_airlight_clustered(
    img: &Image,
    dark: &ScalarMap,
    fraction: f64,
    k: usize,
    seed: u64,
) -> Result<AirlightEstimate> {
    estimate_airlight_clustered_detailed(img, dark, fraction, k, seed).map(|d| d.estimate)
}

/// The brightest candidate by channel mean; ties go to the first in row-major order.
pub fn estimate_airlight_baseline(img: &Image, dark: &ScalarMap, fraction: f64) -> Result<AirlightEstimate> {
    img.check_same_dims(dark.dims(), "dark channel")?;
    let candidates = select_candidates(dark, fraction)?;
    let mut best = candidates.points[0];
    let mut best_level = f64::NEG_INFINITY;
    for &(r, c) in &candidates.points {
        let [red, green, blue] = img.pixel(r, c);
        let level = (red + green + blue) / 3.0;
        if level > best_level {
            best_level = level;
            best = (r, c);
        }
    }
    Ok(AirlightEstimate {
        method: AirlightMethod::Baseline,
        brightness: img.pixel(best.0, best.1),
        location: [best.0 as f64, best.1 as f64],
        candidates: candidates.len(),
        k: None,
        seed: None,
    })
}

pub fn estimate_airlight(
    method: AirlightMethod,
    img: &Image,
    dark: &ScalarMap,
    fraction: f64,
    k: usize,
    seed: u64,
) -> Result<AirlightEstimate> {
    match method {
        AirlightMethod::Clustered => estimate_airlight_clustered(img, dark, fraction, k, seed),
        AirlightMethod::Baseline => estimate_airlight_baseline(img, dark, fraction),
    }
}
