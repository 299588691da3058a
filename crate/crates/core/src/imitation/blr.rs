use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Posterior over the weights of one output dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlrPosterior {
    pub mean: Vec<f64>,
}

/// Gaussian-prior linear regression sharing one design matrix across all
/// outputs. Solves `(beta Phi^T Phi + alpha I) w = beta Phi^T y` per column of
/// `targets` with a Cholesky factorization.
#[derive(Debug, Clone)]
pub struct BlrFit {
    pub precision: DMatrix<f64>,
    pub rhs: Vec<DVector<f64>>,
    pub posteriors: Vec<BlrPosterior>,
}

impl BlrFit {
    /// `design` is `n x D`, `targets` is `n x m`.
    pub fn solve(design: &DMatrix<f64>, targets: &DMatrix<f64>, alpha: f64, beta: f64) -> Result<Self> {
        if design.nrows() == 0 {
            return Err(Error::Fit("no training pairs".into()));
        }
        if design.nrows() != targets.nrows() {
            return Err(Error::Dimension {
                what: "regression targets",
                expected: design.nrows(),
                got: targets.nrows(),
            });
        }
        if !(alpha > 0.0 && alpha.is_finite() && beta > 0.0 && beta.is_finite()) {
            return Err(Error::Input(format!("precisions must be positive, got alpha={alpha} beta={beta}")));
        }
        if design.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("features"));
        }
        if targets.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("regression targets"));
        }
        let d = design.ncols();
        let mut precision = design.tr_mul(design) * beta;
        for i in 0..d {
            precision[(i, i)] += alpha;
        }
        let chol = Cholesky::new(precision.clone())
            .ok_or_else(|| Error::Fit("posterior precision is not positive definite".into()))?;
        let mut rhs = Vec::with_capacity(targets.ncols());
        let mut posteriors = Vec::with_capacity(targets.ncols());
        for j in 0..targets.ncols() {
            let b = design.tr_mul(&targets.column(j)) * beta;
            let mean = chol.solve(&b);
            if mean.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("posterior mean"));
            }
            posteriors.push(BlrPosterior { mean: mean.iter().copied().collect() });
            rhs.push(b);
        }
        Ok(Self { precision, rhs, posteriors })
    }

    /// `max_j ||A m_j - beta Phi^T y_j||_inf`.
    pub fn residual(&self) -> f64 {
        self.posteriors
            .iter()
            .zip(&self.rhs)
            .map(|(p, b)| {
                let m = DVector::from_column_slice(&p.mean);
                (&self.precision * m - b).amax()
            })
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use rand::Rng;

    /// Dense Gaussian elimination with partial pivoting.
    fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
        let n = b.len();
        for col in 0..n {
            let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
            a.swap(col, piv);
            b.swap(col, piv);
            for row in col + 1..n {
                let f = a[row][col] / a[col][col];
                for k in col..n {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
            x[i] = (b[i] - s) / a[i][i];
        }
        x
    }

    #[test]
    fn matches_dense_normal_equations() {
        let mut rng = rng_from_seed(21);
        let (n, d) = (50, 12);
        let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let y: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).sin()).collect();
        let (alpha, beta) = (0.1, 1.0);
        let mut a = vec![vec![0.0; d]; d];
        let mut b = vec![0.0; d];
        for (r, yi) in rows.iter().zip(&y) {
            for i in 0..d {
                b[i] += beta * r[i] * yi;
                for j in 0..d {
                    a[i][j] += beta * r[i] * r[j];
                }
            }
        }
        for (i, row) in a.iter_mut().enumerate() {
            row[i] += alpha;
        }
        let oracle = gauss_solve(a, b);
        let design = DMatrix::from_fn(n, d, |i, j| rows[i][j]);
        let fit = BlrFit::solve(&design, &DMatrix::from_column_slice(n, 1, &y), alpha, beta).unwrap();
        let scale = oracle.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (w, o) in fit.posteriors[0].mean.iter().zip(&oracle) {
            assert!((w - o).abs() <= 1e-8 * scale, "{w} vs {o}");
        }
        assert!(fit.residual() < 1e-8 * scale.max(1.0));
    }

    #[test]
    fn single_pair_shrinks_toward_zero() {
        let design = DMatrix::from_row_slice(1, 3, &[0.5, -0.2, 0.3]);
        let y = DMatrix::from_row_slice(1, 1, &[1.0]);
        let fit = BlrFit::solve(&design, &y, 0.1, 1.0).unwrap();
        let pred: f64 = design.row(0).iter().zip(&fit.posteriors[0].mean).map(|(a, b)| a * b).sum();
        assert!(pred > 0.0 && pred < 1.0, "{pred}");
    }

    #[test]
    fn errors() {
        let empty = DMatrix::<f64>::zeros(0, 3);
        assert!(matches!(BlrFit::solve(&empty, &DMatrix::zeros(0, 1), 0.1, 1.0), Err(Error::Fit(_))));
        let nan = DMatrix::from_row_slice(1, 1, &[f64::NAN]);
        assert!(matches!(
            BlrFit::solve(&nan, &DMatrix::from_row_slice(1, 1, &[1.0]), 0.1, 1.0),
            Err(Error::NonFinite(_))
        ));
    }
}
