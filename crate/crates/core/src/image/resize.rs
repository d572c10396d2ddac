use super::{clamp_unit, Image, ScalarMap};

const CATMULL_ROM_A: f64 = -0.5;

fn cubic(x: f64) -> f64 {
    let a = CATMULL_ROM_A;
    let x = x.abs();
    if x <= 1.0 {
        ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0
    } else if x < 2.0 {
        ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a
    } else {
        0.0
    }
}

/// Normalized taps for one output coordinate: `(source index, weight)`.
/// When shrinking, the kernel is stretched by the scale factor so the
/// result is area-aware instead of point-sampled. Out-of-range taps are
/// folded onto the nearest edge sample.
fn axis_taps(src_len: usize, dst_len: usize) -> Vec<Vec<(usize, f64)>> {
    let scale = src_len as f64 / dst_len as f64;
    let stretch = scale.max(1.0);
    let support = 2.0 * stretch;
    (0..dst_len)
        .map(|i| {
            let center = (i as f64 + 0.5) * scale;
            let lo = (center - support).floor() as isize;
            let hi = (center + support).ceil() as isize;
            let mut taps: Vec<(usize, f64)> = Vec::with_capacity((hi - lo + 1) as usize);
            let mut total = 0.0;
            for x in lo..=hi {
                let w = cubic((x as f64 + 0.5 - center) / stretch);
                if w == 0.0 {
                    continue;
                }
                let idx = x.clamp(0, src_len as isize - 1) as usize;
                total += w;
                match taps.iter_mut().find(|(j, _)| *j == idx) {
                    Some(t) => t.1 += w,
                    None => taps.push((idx, w)),
                }
            }
            taps.iter_mut().for_each(|t| t.1 /= total);
            taps
        })
        .collect()
}

fn resample_plane(src: &[f64], h: usize, w: usize, new_h: usize, new_w: usize) -> Vec<f64> {
    let col_taps = axis_taps(w, new_w);
    let row_taps = axis_taps(h, new_h);

    let mut horizontal = vec![0.0; h * new_w];
    for (src_row, dst_row) in src.chunks_exact(w).zip(horizontal.chunks_exact_mut(new_w)) {
        for (out, taps) in dst_row.iter_mut().zip(&col_taps) {
            *out = taps.iter().map(|&(j, wt)| src_row[j] * wt).sum();
        }
    }

    let mut out = vec![0.0; new_h * new_w];
    for (dst_row, taps) in out.chunks_exact_mut(new_w).zip(&row_taps) {
        for &(j, wt) in taps {
            let src_row = &horizontal[j * new_w..(j + 1) * new_w];
            for (o, s) in dst_row.iter_mut().zip(src_row) {
                *o += s * wt;
            }
        }
    }
    out
}

/// Separable Catmull-Rom bicubic resampling of a scalar map; output clamped to `[0, 1]`.
pub fn resize_map(map: &ScalarMap, new_h: usize, new_w: usize) -> ScalarMap {
    assert!(new_h >= 1 && new_w >= 1, "target size must be at least 1x1");
    let out = resample_plane(map.data(), map.height(), map.width(), new_h, new_w);
    ScalarMap::from_vec_clamped(new_h, new_w, out)
}

/// Separable Catmull-Rom bicubic resampling, channel by channel; output clamped to `[0, 1]`.
pub fn resize(img: &Image, new_h: usize, new_w: usize) -> Image {
    assert!(new_h >= 1 && new_w >= 1, "target size must be at least 1x1");
    let planes: Vec<Vec<f64>> = (0..3)
        .map(|c| resample_plane(img.channel(c).data(), img.height(), img.width(), new_h, new_w))
        .collect();
    let mut data = Vec::with_capacity(new_h * new_w * 3);
    for i in 0..new_h * new_w {
        data.extend(planes.iter().map(|p| clamp_unit(p[i])));
    }
    Image { height: new_h, width: new_w, data }
}
