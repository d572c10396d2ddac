use crate::image::{min_filter_plane, Image, ScalarMap};

/// Smallest atmospheric-light component used as a divisor.
pub const AIRLIGHT_FLOOR: f64 = 0.05;

/// Coarse transmission from the dark channel prior:
/// `t(x) = 1 - omega * min_c min_{y in window(x)} I^c(y) / A^c`, clamped to `[0, 1]`.
///
/// `radius` should match the one used for the dark channel. Airlight
/// components below [`AIRLIGHT_FLOOR`] are raised to it.
pub fn rough_transmission(img: &Image, airlight: [f64; 3], omega: f64, radius: usize) -> ScalarMap {
    let a = airlight.map(|v| v.max(AIRLIGHT_FLOOR));
    let normalized: Vec<f64> = img.pixels().map(|p| (p[0] / a[0]).min(p[1] / a[1]).min(p[2] / a[2])).collect();
    let (h, w) = img.dims();
    let windowed = min_filter_plane(&normalized, h, w, radius);
    ScalarMap::from_vec_clamped(h, w, windowed.into_iter().map(|m| 1.0 - omega * m).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive(img: &Image, airlight: [f64; 3], omega: f64, radius: usize) -> ScalarMap {
        let a = airlight.map(|v| v.max(AIRLIGHT_FLOOR));
        let (h, w) = img.dims();
        ScalarMap::from_fn(h, w, |r, c| {
            let mut m = f64::INFINITY;
            for y in r.saturating_sub(radius)..=(r + radius).min(h - 1) {
                for x in c.saturating_sub(radius)..=(c + radius).min(w - 1) {
                    let p = img.pixel(y, x);
                    for ch in 0..3 {
                        m = m.min(p[ch] / a[ch]);
                    }
                }
            }
            (1.0 - omega * m).clamp(0.0, 1.0)
        })
    }

    #[test]
    fn image_equal_to_airlight() {
        let a = [0.8, 0.85, 0.9];
        let t = rough_transmission(&Image::filled(8, 8, a), a, 0.95, 7);
        assert!(t.data().iter().all(|&v| (v - 0.05).abs() < 1e-12));
    }

    #[test]
    fn black_image_is_fully_transmissive() {
        let t = rough_transmission(&Image::filled(5, 9, [0.0; 3]), [0.7; 3], 0.95, 7);
        assert!(t.data().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn dark_airlight_is_floored() {
        let t = rough_transmission(&Image::filled(3, 3, [0.01, 0.5, 0.5]), [0.0, 0.5, 0.5], 1.0, 1);
        assert!(t.data().iter().all(|&v| (v - 0.8).abs() < 1e-12));
    }

    proptest! {
        #[test]
        fn matches_naive_evaluation(h in 1usize..=32, w in 1usize..=32, radius in 0usize..=7, omega in 0.05f64..=1.0,
                                    a in proptest::array::uniform3(0.0f64..=1.0), seed in any::<u64>()) {
            let mut s = seed;
            let img = Image::from_fn(h, w, |_, _| [0; 3].map(|_: i32| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (s >> 11) as f64 / (1u64 << 53) as f64
            }));
            let fast = rough_transmission(&img, a, omega, radius);
            let slow = naive(&img, a, omega, radius);
            for (x, y) in fast.data().iter().zip(slow.data()) {
                prop_assert!((x - y).abs() <= 1e-12);
                prop_assert!((0.0..=1.0).contains(x));
            }
        }
    }
}
