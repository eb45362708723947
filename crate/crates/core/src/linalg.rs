//! Dense symmetric positive-definite solves for the Gaussian-process models.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

/// Cholesky factor of a symmetric positive-definite matrix.
///
/// Solves apply two steps of iterative refinement: the correlation matrices
/// of smooth kernels are close to singular and the refined residual is what
/// keeps the interpolation error of the predictor at round-off level.
#[derive(Debug, Clone)]
pub struct SpdFactor {
    matrix: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
}

impl SpdFactor {
    pub fn new(matrix: DMatrix<f64>) -> Option<Self> {
        let chol = Cholesky::new(matrix.clone())?;
        if chol.l_dirty().diagonal().iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return None;
        }
        Some(Self { matrix, chol })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        let mut x = self.chol.solve(b);
        for _ in 0..2 {
            let residual = b - &self.matrix * &x;
            x += self.chol.solve(&residual);
        }
        x
    }

    pub fn solve_matrix(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        let mut x = self.chol.solve(b);
        for _ in 0..2 {
            let residual = b - &self.matrix * &x;
            x += self.chol.solve(&residual);
        }
        x
    }

    pub fn ln_det(&self) -> f64 {
        2.0 * self.chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>()
    }
}
