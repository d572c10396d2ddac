use super::sparse::CsrMatrix;
use crate::image::Image;

fn inverse_sym3(m: [[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let c00 = m[1][1] * m[2][2] - m[1][2] * m[1][2];
    let c01 = m[0][2] * m[1][2] - m[0][1] * m[2][2];
    let c02 = m[0][1] * m[1][2] - m[0][2] * m[1][1];
    let c11 = m[0][0] * m[2][2] - m[0][2] * m[0][2];
    let c12 = m[0][1] * m[0][2] - m[0][0] * m[1][2];
    let c22 = m[0][0] * m[1][1] - m[0][1] * m[0][1];
    let det = m[0][0] * c00 + m[0][1] * c01 + m[0][2] * c02;
    let inv = 1.0 / det;
    [
        [c00 * inv, c01 * inv, c02 * inv],
        [c01 * inv, c11 * inv, c12 * inv],
        [c02 * inv, c12 * inv, c22 * inv],
    ]
}

/// Closed-form matting Laplacian over all `(2r+1)²` windows that fit inside
/// the image.
///
/// For a window `w` with color mean `μ` and covariance `Σ`, every pixel pair
/// `(i, j)` in it accumulates
/// `δ_ij - (1 + (I_i - μ)ᵀ (Σ + ε/|w| · Id)⁻¹ (I_j - μ)) / |w|`.
/// Each pair's term is computed once and written to both `(i, j)` and
/// `(j, i)`, so the result is exactly symmetric.
pub fn matting_laplacian(img: &Image, epsilon: f64, window_radius: usize) -> CsrMatrix {
    let (h, w) = img.dims();
    let n = h * w;
    let side = 2 * window_radius + 1;
    let reach = 2 * window_radius;
    let span = 2 * reach + 1;
    let slots = span * span;
    let slot_of = |dr: isize, dc: isize| ((dr + reach as isize) as usize) * span + (dc + reach as isize) as usize;

    let mut acc = vec![0.0f64; n * slots];
    let mut touched = vec![false; n * slots];

    if h >= side && w >= side {
        let m = (side * side) as f64;
        let mut idx = vec![0usize; side * side];
        let mut dev = vec![[0.0f64; 3]; side * side];
        let mut proj = vec![[0.0f64; 3]; side * side];

        for cr in window_radius..h - window_radius {
            for cc in window_radius..w - window_radius {
                let mut mean = [0.0; 3];
                let mut k = 0;
                for r in cr - window_radius..=cr + window_radius {
                    for c in cc - window_radius..=cc + window_radius {
                        idx[k] = r * w + c;
                        let p = img.pixel(r, c);
                        for ch in 0..3 {
                            mean[ch] += p[ch];
                        }
                        k += 1;
                    }
                }
                mean.iter_mut().for_each(|v| *v /= m);

                let mut cov = [[0.0; 3]; 3];
                for (d, &i) in dev.iter_mut().zip(&idx) {
                    let p = img.pixel_at(i);
                    *d = [p[0] - mean[0], p[1] - mean[1], p[2] - mean[2]];
                    for a in 0..3 {
                        for b in a..3 {
                            cov[a][b] += d[a] * d[b];
                        }
                    }
                }
                for a in 0..3 {
                    for b in a..3 {
                        cov[a][b] /= m;
                        cov[b][a] = cov[a][b];
                    }
                    cov[a][a] += epsilon / m;
                }
                let inv = inverse_sym3(cov);
                for (pj, d) in proj.iter_mut().zip(&dev) {
                    for a in 0..3 {
                        pj[a] = inv[a][0] * d[0] + inv[a][1] * d[1] + inv[a][2] * d[2];
                    }
                }

                for a in 0..idx.len() {
                    let (ia, ra, ca) = (idx[a], idx[a] / w, idx[a] % w);
                    for b in a..idx.len() {
                        let (ib, rb, cb) = (idx[b], idx[b] / w, idx[b] % w);
                        let q = proj[a][0] * dev[b][0] + proj[a][1] * dev[b][1] + proj[a][2] * dev[b][2];
                        let delta = if a == b { 1.0 } else { 0.0 };
                        let v = delta - (1.0 + q) / m;
                        let dr = rb as isize - ra as isize;
                        let dc = cb as isize - ca as isize;
                        let s_ab = ia * slots + slot_of(dr, dc);
                        acc[s_ab] += v;
                        touched[s_ab] = true;
                        if a != b {
                            let s_ba = ib * slots + slot_of(-dr, -dc);
                            acc[s_ba] += v;
                            touched[s_ba] = true;
                        }
                    }
                }
            }
        }
    }

    // Slots are ordered by (dr, dc), which is increasing column order.
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx = Vec::new();
    let mut values = Vec::new();
    row_ptr.push(0);
    for i in 0..n {
        let (r, c) = ((i / w) as isize, (i % w) as isize);
        for s in 0..slots {
            if !touched[i * slots + s] {
                continue;
            }
            let dr = (s / span) as isize - reach as isize;
            let dc = (s % span) as isize - reach as isize;
            let j = ((r + dr) * w as isize + (c + dc)) as usize;
            col_idx.push(j);
            values.push(acc[i * slots + s]);
        }
        row_ptr.push(col_idx.len());
    }
    CsrMatrix::from_raw(n, row_ptr, col_idx, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sym3_inverse() {
        let m = [[4.0, 1.0, 0.5], [1.0, 3.0, 0.2], [0.5, 0.2, 2.0]];
        let inv = inverse_sym3(m);
        for i in 0..3 {
            for j in 0..3 {
                let v: f64 = (0..3).map(|k| m[i][k] * inv[k][j]).sum();
                assert!((v - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn constant_3x3_image() {
        let img = Image::filled(3, 3, [0.4, 0.5, 0.6]);
        let l = matting_laplacian(&img, 1e-7, 1);
        assert_eq!(l.dim(), 9);
        assert_eq!(l.nnz(), 81);
        for i in 0..9 {
            for j in 0..9 {
                let expected = if i == j { 1.0 - 1.0 / 9.0 } else { -1.0 / 9.0 };
                assert!((l.get(i, j) - expected).abs() < 1e-15);
            }
        }
        assert!(l.mul_vec(&[1.0; 9]).iter().all(|v| v.abs() < 1e-12));
        assert_eq!(l.max_asymmetry(), 0.0);
    }

    #[test]
    fn image_smaller_than_window_has_no_coupling() {
        let l = matting_laplacian(&Image::filled(2, 5, [0.3; 3]), 1e-7, 1);
        assert_eq!(l.nnz(), 0);
    }
}
