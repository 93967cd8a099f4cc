//! Symmetric positive-definite banded systems from the Whittaker smoother.

use crate::error::{Error, Result};

/// Stencil of the forward difference of the given order, e.g. `[1, -2, 1]` for 2.
pub fn difference_stencil(order: usize) -> Vec<f64> {
    let mut c = vec![1.0];
    for _ in 0..order {
        let mut next = vec![0.0; c.len() + 1];
        for (k, v) in c.iter().enumerate() {
            next[k] -= v;
            next[k + 1] += v;
        }
        c = next;
    }
    c
}

/// Lower band of a symmetric matrix: `band[i][k]` holds `A[i][i - k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymBand {
    n: usize,
    width: usize,
    band: Vec<Vec<f64>>,
}

impl SymBand {
    pub fn zeros(n: usize, width: usize) -> Self {
        Self {
            n,
            width,
            band: vec![vec![0.0; width + 1]; n],
        }
    }

    /// `diag(weights) + lambda * D^T D` with `D` the difference operator of `order`.
    pub fn whittaker(weights: &[f64], lambda: f64, order: usize) -> Self {
        let n = weights.len();
        let mut m = Self::zeros(n, order);
        for (i, w) in weights.iter().enumerate() {
            m.band[i][0] = *w;
        }
        let stencil = difference_stencil(order);
        for r in 0..n.saturating_sub(order) {
            for a in 0..=order {
                for b in 0..=a {
                    m.band[r + a][a - b] += lambda * stencil[a] * stencil[b];
                }
            }
        }
        m
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        if hi - lo > self.width {
            0.0
        } else {
            self.band[hi][hi - lo]
        }
    }

    /// Solves `A x = rhs` by banded Cholesky factorization.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        let p = self.width;
        if rhs.len() != n {
            return Err(Error::SingularSystem(format!(
                "right-hand side has length {} for a system of size {n}",
                rhs.len()
            )));
        }
        // l[i][k] holds L[i][i - k].
        let mut l = vec![vec![0.0; p + 1]; n];
        for i in 0..n {
            let j0 = i.saturating_sub(p);
            for j in j0..=i {
                let mut sum = self.band[i][i - j];
                for m in j0.max(j.saturating_sub(p))..j {
                    sum -= l[i][i - m] * l[j][j - m];
                }
                if j == i {
                    if sum <= 0.0 || !sum.is_finite() {
                        return Err(Error::SingularSystem(format!(
                            "matrix is not positive definite at row {i}"
                        )));
                    }
                    l[i][0] = sum.sqrt();
                } else {
                    l[i][i - j] = sum / l[j][0];
                }
            }
        }
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut sum = rhs[i];
            for m in i.saturating_sub(p)..i {
                sum -= l[i][i - m] * y[m];
            }
            y[i] = sum / l[i][0];
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut sum = y[i];
            for m in i + 1..=(i + p).min(n - 1) {
                sum -= l[m][m - i] * x[m];
            }
            x[i] = sum / l[i][0];
        }
        Ok(x)
    }
}

/// Minimizes `sum w_i (y_i - z_i)^2 + lambda * sum (D^order z)^2`.
pub fn whittaker_smooth(y: &[f64], weights: &[f64], lambda: f64, order: usize) -> Result<Vec<f64>> {
    if y.len() != weights.len() {
        return Err(Error::LengthMismatch {
            left: y.len(),
            right: weights.len(),
        });
    }
    if y.len() < order + 1 {
        return Err(Error::SingularSystem(format!(
            "series of length {} is too short for difference order {order}",
            y.len()
        )));
    }
    let rhs: Vec<f64> = y.iter().zip(weights).map(|(y, w)| y * w).collect();
    SymBand::whittaker(weights, lambda, order).solve(&rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dense_whittaker(w: &[f64], lambda: f64, order: usize) -> DMatrix<f64> {
        let n = w.len();
        let mut d = DMatrix::<f64>::identity(n, n);
        for _ in 0..order {
            let rows = d.nrows() - 1;
            d = DMatrix::from_fn(rows, n, |r, c| d[(r + 1, c)] - d[(r, c)]);
        }
        DMatrix::from_diagonal(&DVector::from_column_slice(w)) + d.transpose() * d * lambda
    }

    #[test]
    fn stencils() {
        assert_eq!(difference_stencil(1), vec![-1.0, 1.0]);
        assert_eq!(difference_stencil(2), vec![1.0, -2.0, 1.0]);
        assert_eq!(difference_stencil(3), vec![-1.0, 3.0, -3.0, 1.0]);
    }

    #[test]
    fn band_matches_dense_assembly() {
        let w = [1.0, 0.5, 0.0, 2.0, 1.0, 1.0, 0.25];
        for order in [1, 2] {
            let band = SymBand::whittaker(&w, 3.0, order);
            let dense = dense_whittaker(&w, 3.0, order);
            for i in 0..w.len() {
                for j in 0..w.len() {
                    assert!((band.get(i, j) - dense[(i, j)]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn banded_solve_matches_dense_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for trial in 0..200 {
            let n = rng.random_range(4..=50);
            let order = 1 + trial % 2;
            let lambda = 10f64.powf(rng.random_range(-1.0..6.0));
            let w: Vec<f64> = (0..n)
                .map(|_| {
                    if rng.random_bool(0.2) {
                        0.0
                    } else {
                        rng.random_range(0.01..3.0)
                    }
                })
                .collect();
            let mut w = w;
            w[0] = 1.0;
            w[n - 1] = 1.0;
            let y: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
            let banded = whittaker_smooth(&y, &w, lambda, order).unwrap();
            let a = dense_whittaker(&w, lambda, order);
            let rhs = DVector::from_iterator(n, y.iter().zip(&w).map(|(y, w)| y * w));
            let dense = a.lu().solve(&rhs).unwrap();
            let scale = dense.amax().max(1e-12);
            for i in 0..n {
                assert!(
                    (banded[i] - dense[i]).abs() <= 1e-8 * scale,
                    "trial {trial} n {n} i {i}: {} vs {}",
                    banded[i],
                    dense[i]
                );
            }
        }
    }

    #[test]
    fn singular_systems_are_reported() {
        // All weights zero leaves the polynomial null space unconstrained.
        let err = whittaker_smooth(&[1.0; 6], &[0.0; 6], 10.0, 2).unwrap_err();
        assert!(matches!(err, Error::SingularSystem(_)));
        assert!(whittaker_smooth(&[1.0], &[1.0], 10.0, 2).is_err());
    }
}
