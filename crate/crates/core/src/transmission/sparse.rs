//! Compressed sparse row storage and a Jacobi-preconditioned conjugate
//! gradient solver for symmetric positive definite systems.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds a square matrix from per-row `(column, value)` lists whose
    /// columns are strictly increasing.
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for row in rows {
            debug_assert!(row.windows(2).all(|w| w[0].0 < w[1].0));
            for (c, v) in row {
                assert!(c < n, "column {c} out of range for {n}x{n} matrix");
                col_idx.push(c);
                values.push(v);
            }
            row_ptr.push(col_idx.len());
        }
        CsrMatrix { n, row_ptr, col_idx, values }
    }

    pub(crate) fn from_raw(n: usize, row_ptr: Vec<usize>, col_idx: Vec<usize>, values: Vec<f64>) -> Self {
        debug_assert_eq!(row_ptr.len(), n + 1);
        debug_assert_eq!(col_idx.len(), values.len());
        CsrMatrix { n, row_ptr, col_idx, values }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[span.clone()].binary_search(&j) {
            Ok(k) => self.values[span.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// `y = self · x + shift · x`, summing each row left to right.
    pub fn mul_vec_shifted(&self, x: &[f64], shift: f64, y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        for (i, out) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            *out = acc + shift * x[i];
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul_vec_shifted(x, 0.0, &mut y);
        y
    }

    /// Largest `|a_ij - a_ji|` over stored entries.
    pub fn max_asymmetry(&self) -> f64 {
        (0..self.n)
            .flat_map(|i| self.row(i).map(move |(j, v)| (i, j, v)))
            .map(|(i, j, v)| (v - self.get(j, i)).abs())
            .fold(0.0, f64::max)
    }

    /// Row-major dense copy. Only meant for small matrices.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n * self.n];
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                d[i * self.n + j] = v;
            }
        }
        d
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgSettings {
    /// Target for `‖b - Ax‖ / ‖b‖`.
    pub tolerance: f64,
    pub max_iterations: usize,
}

#[derive(Debug, Clone)]
pub struct CgSolution {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Relative residual recomputed from scratch at exit.
    pub relative_residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solves `(A + shift·I) x = b` with Jacobi-preconditioned CG starting from `x0`.
///
/// Convergence is declared only after the residual recomputed from `b - Ax`
/// (not the recurrence) meets the tolerance; if the two disagree the
/// iteration restarts from the current iterate.
pub fn conjugate_gradient(
    a: &CsrMatrix,
    shift: f64,
    b: &[f64],
    x0: &[f64],
    settings: CgSettings,
) -> Result<CgSolution> {
    let n = a.dim();
    assert_eq!(b.len(), n);
    assert_eq!(x0.len(), n);
    let b_norm = norm(b);
    if b_norm == 0.0 {
        return Ok(CgSolution { x: vec![0.0; n], iterations: 0, relative_residual: 0.0 });
    }

    let inv_diag: Vec<f64> = a
        .diagonal()
        .into_iter()
        .map(|d| {
            let d = d + shift;
            if d > 0.0 {
                1.0 / d
            } else {
                1.0
            }
        })
        .collect();

    let mut x = x0.to_vec();
    let mut ap = vec![0.0; n];
    let mut r = vec![0.0; n];
    let true_residual = |x: &[f64], r: &mut [f64]| {
        a.mul_vec_shifted(x, shift, r);
        r.iter_mut().zip(b).for_each(|(ri, bi)| *ri = bi - *ri);
        norm(r) / b_norm
    };

    let mut iterations = 0;
    let mut rel = true_residual(&x, &mut r);
    loop {
        if rel <= settings.tolerance {
            return Ok(CgSolution { x, iterations, relative_residual: rel });
        }
        let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(ri, di)| ri * di).collect();
        let mut p = z.clone();
        let mut rz = dot(&r, &z);

        while iterations < settings.max_iterations {
            a.mul_vec_shifted(&p, shift, &mut ap);
            let pap = dot(&p, &ap);
            if pap <= 0.0 || !pap.is_finite() {
                break;
            }
            let alpha = rz / pap;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            iterations += 1;
            if norm(&r) / b_norm <= settings.tolerance {
                break;
            }
            for i in 0..n {
                z[i] = r[i] * inv_diag[i];
            }
            let rz_next = dot(&r, &z);
            let beta = rz_next / rz;
            rz = rz_next;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }

        let previous = rel;
        rel = true_residual(&x, &mut r);
        if rel <= settings.tolerance {
            continue;
        }
        if iterations >= settings.max_iterations || !(rel < previous) {
            return Err(Error::SolverDiverged { iterations, residual: rel });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// 1-D Dirichlet Laplacian, tridiagonal (-1, 2, -1).
    fn laplacian_1d(n: usize) -> CsrMatrix {
        CsrMatrix::from_rows(
            (0..n)
                .map(|i| {
                    let mut row = Vec::new();
                    if i > 0 {
                        row.push((i - 1, -1.0));
                    }
                    row.push((i, 2.0));
                    if i + 1 < n {
                        row.push((i + 1, -1.0));
                    }
                    row
                })
                .collect(),
        )
    }

    #[test]
    fn accessors() {
        let m = laplacian_1d(4);
        assert_eq!(m.nnz(), 10);
        assert_eq!(m.get(1, 0), -1.0);
        assert_eq!(m.get(0, 3), 0.0);
        assert_eq!(m.diagonal(), vec![2.0; 4]);
        assert_eq!(m.max_asymmetry(), 0.0);
        assert_eq!(m.mul_vec(&[1.0; 4]), vec![1.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn solves_tridiagonal_system() {
        let n = 50;
        let m = laplacian_1d(n);
        let truth: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).sin()).collect();
        let mut b = vec![0.0; n];
        m.mul_vec_shifted(&truth, 0.5, &mut b);
        let sol =
            conjugate_gradient(&m, 0.5, &b, &vec![0.0; n], CgSettings { tolerance: 1e-12, max_iterations: 500 })
                .unwrap();
        assert!(sol.relative_residual <= 1e-12);
        for (x, t) in sol.x.iter().zip(&truth) {
            assert!((x - t).abs() < 1e-9);
        }
    }

    #[test]
    fn reports_non_convergence() {
        let n = 200;
        let m = laplacian_1d(n);
        let b = vec![1.0; n];
        let err = conjugate_gradient(&m, 0.0, &b, &vec![0.0; n], CgSettings { tolerance: 1e-14, max_iterations: 3 })
            .unwrap_err();
        match err {
            Error::SolverDiverged { iterations, residual } => {
                assert_eq!(iterations, 3);
                assert!(residual > 1e-14);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let m = laplacian_1d(5);
        let sol = conjugate_gradient(&m, 1.0, &[0.0; 5], &[1.0; 5], CgSettings { tolerance: 1e-8, max_iterations: 10 })
            .unwrap();
        assert_eq!(sol.x, vec![0.0; 5]);
    }
}
