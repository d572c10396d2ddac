use super::{Image, ScalarMap};

/// Minimum over the `(2·radius+1)²` square window centered on each pixel.
/// Windows are clipped at the image border.
///
/// Separable van Herk/Gil-Werman passes (rows, then columns), so the cost
/// does not depend on the radius.
pub fn min_filter(map: &ScalarMap, radius: usize) -> ScalarMap {
    let (h, w) = map.dims();
    ScalarMap { height: h, width: w, data: min_filter_plane(map.data(), h, w, radius) }
}

/// [`min_filter`] on a bare row-major plane with no range restriction.
pub(crate) fn min_filter_plane(plane: &[f64], h: usize, w: usize, radius: usize) -> Vec<f64> {
    assert_eq!(plane.len(), h * w);
    if radius == 0 {
        return plane.to_vec();
    }
    let mut scratch = LineScratch::new(h.max(w), radius);

    let mut rows = vec![0.0; h * w];
    for (src, dst) in plane.chunks_exact(w).zip(rows.chunks_exact_mut(w)) {
        scratch.run(src, dst);
    }

    let mut out = vec![0.0; h * w];
    let mut column = vec![0.0; h];
    let mut filtered = vec![0.0; h];
    for col in 0..w {
        for (row, v) in column.iter_mut().enumerate() {
            *v = rows[row * w + col];
        }
        scratch.run(&column, &mut filtered);
        for (row, v) in filtered.iter().enumerate() {
            out[row * w + col] = *v;
        }
    }
    out
}

struct LineScratch {
    radius: usize,
    padded: Vec<f64>,
    prefix: Vec<f64>,
    suffix: Vec<f64>,
}

impl LineScratch {
    fn new(max_len: usize, radius: usize) -> Self {
        let cap = max_len + 2 * radius;
        LineScratch { radius, padded: Vec::with_capacity(cap), prefix: vec![0.0; cap], suffix: vec![0.0; cap] }
    }

    /// 1-D running minimum of `src` into `dst`; the line is padded with +inf
    /// so clipped windows fall out of the block decomposition for free.
    fn run(&mut self, src: &[f64], dst: &mut [f64]) {
        let r = self.radius;
        let span = 2 * r + 1;
        let m = src.len() + 2 * r;

        self.padded.clear();
        self.padded.resize(r, f64::INFINITY);
        self.padded.extend_from_slice(src);
        self.padded.resize(m, f64::INFINITY);

        let (pad, g, hs) = (&self.padded, &mut self.prefix, &mut self.suffix);
        for j in 0..m {
            g[j] = if j % span == 0 { pad[j] } else { g[j - 1].min(pad[j]) };
        }
        for j in (0..m).rev() {
            hs[j] = if j % span == span - 1 || j == m - 1 { pad[j] } else { hs[j + 1].min(pad[j]) };
        }
        for (i, out) in dst.iter_mut().enumerate() {
            *out = hs[i].min(g[i + span - 1]);
        }
    }
}

/// Per-pixel minimum over the three color channels.
pub fn channel_min(img: &Image) -> ScalarMap {
    let data = img.pixels().map(|[r, g, b]| r.min(g).min(b)).collect();
    ScalarMap { height: img.height(), width: img.width(), data }
}

/// Dark channel: minimum over color channels and over the square window of
/// the given radius (radius 7 is a 15×15 window).
pub fn dark_channel(img: &Image, radius: usize) -> ScalarMap {
    min_filter(&channel_min(img), radius)
}
