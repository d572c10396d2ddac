use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::image::ScalarMap;

/// Fraction of pixels treated as candidate light sources by default (top 0.1%).
pub const DEFAULT_SOURCE_FRACTION: f64 = 0.001;

/// The brightest dark-channel pixels, stored in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    pub points: Vec<(usize, usize)>,
    pub source_fraction: f64,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Number of candidates drawn from `pixels` pixels: `max(1, floor(fraction·pixels))`.
pub fn candidate_count(pixels: usize, fraction: f64) -> usize {
    ((fraction * pixels as f64).floor() as usize).clamp(1, pixels)
}

/// Picks the `max(1, floor(fraction·H·W))` pixels with the largest dark-channel
/// value. Ties go to the smaller row-major index.
pub fn select_candidates(dark: &ScalarMap, fraction: f64) -> Result<CandidateSet> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::invalid(format!("candidate fraction must be in (0, 1], got {fraction}")));
    }
    let values = dark.data();
    let n = candidate_count(values.len(), fraction);

    // Brighter first, then lower index: a strict total order, so the
    // selection is unique.
    let order = |a: &usize, b: &usize| -> Ordering { values[*b].total_cmp(&values[*a]).then(a.cmp(b)) };
    let mut idx: Vec<usize> = (0..values.len()).collect();
    if n < idx.len() {
        idx.select_nth_unstable_by(n - 1, order);
        idx.truncate(n);
    }
    idx.sort_unstable();

    let w = dark.width();
    Ok(CandidateSet { points: idx.into_iter().map(|i| (i / w, i % w)).collect(), source_fraction: fraction })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn unique_maximum() {
        let dark = ScalarMap::from_fn(10, 10, |r, c| if (r, c) == (6, 3) { 0.9 } else { 0.2 });
        let set = select_candidates(&dark, 0.01).unwrap();
        assert_eq!(set.points, vec![(6, 3)]);
    }

    #[test]
    fn ties_follow_row_major_order() {
        let dark = ScalarMap::filled(10, 10, 0.4);
        let set = select_candidates(&dark, 0.03).unwrap();
        assert_eq!(set.points, vec![(0, 0), (0, 1), (0, 2)]);
    }

    #[test]
    fn count_rounding() {
        assert_eq!(candidate_count(100, 0.001), 1);
        assert_eq!(candidate_count(786_432, 0.001), 786);
        assert_eq!(candidate_count(2, 1.0), 2);
        assert_eq!(candidate_count(999, 0.01), 9);
    }

    #[test]
    fn rejects_bad_fraction() {
        let dark = ScalarMap::filled(2, 2, 0.0);
        assert!(select_candidates(&dark, 0.0).is_err());
        assert!(select_candidates(&dark, 1.5).is_err());
        assert!(select_candidates(&dark, f64::NAN).is_err());
    }

    fn sort_oracle(dark: &ScalarMap, fraction: f64) -> Vec<(usize, usize)> {
        let mut all: Vec<(f64, usize)> = dark.data().iter().copied().zip(0..).collect();
        all.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
        let n = ((fraction * all.len() as f64).floor() as usize).max(1);
        let mut chosen: Vec<usize> = all[..n].iter().map(|&(_, i)| i).collect();
        chosen.sort();
        chosen.into_iter().map(|i| (i / dark.width(), i % dark.width())).collect()
    }

    proptest! {
        #[test]
        fn matches_sort_oracle(h in 1usize..=50, w in 1usize..=50, levels in 1u32..20, fraction in 0.0005f64..0.2, seed in any::<u64>()) {
            // Quantized levels force plenty of ties.
            let mut s = seed;
            let dark = ScalarMap::from_fn(h, w, |_, _| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((s >> 40) % levels as u64) as f64 / levels as f64
            });
            let set = select_candidates(&dark, fraction).unwrap();
            prop_assert_eq!(set.points, sort_oracle(&dark, fraction));
        }
    }
}
