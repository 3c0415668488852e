use faer::prelude::*;
use faer::sparse::linalg::solvers::{Llt, Lu};
use faer::sparse::{SparseColMat, Triplet};
use faer::{Col, Side};

use crate::error::{Error, Result};
use crate::sparse::{norm2, CsrMatrix};

enum Factor {
    Lu(Lu<usize, f64>),
    Llt(Llt<usize, f64>),
}

/// Sparse direct factorization with iterative refinement on solve.
pub struct SparseSolver {
    matrix: CsrMatrix,
    factor: Factor,
}

fn to_faer(a: &CsrMatrix) -> Result<SparseColMat<usize, f64>> {
    let trips: Vec<_> = a.iter().map(|(i, j, v)| Triplet::new(i, j, v)).collect();
    SparseColMat::try_new_from_triplets(a.n_rows(), a.n_cols(), &trips)
        .map_err(|e| Error::Solver(format!("sparse matrix conversion failed: {e:?}")))
}

impl SparseSolver {
    /// LU with partial pivoting; for indefinite and non-symmetric systems.
    pub fn lu(a: &CsrMatrix) -> Result<Self> {
        let m = to_faer(a)?;
        let lu = m.sp_lu().map_err(|e| Error::Solver(format!("LU factorization failed: {e:?}")))?;
        Ok(Self { matrix: a.clone(), factor: Factor::Lu(lu) })
    }

    /// Cholesky for symmetric positive definite systems (lower triangle used).
    pub fn cholesky(a: &CsrMatrix) -> Result<Self> {
        let m = to_faer(a)?;
        let llt = m
            .sp_cholesky(Side::Lower)
            .map_err(|e| Error::Solver(format!("Cholesky factorization failed (matrix not positive definite?): {e:?}")))?;
        Ok(Self { matrix: a.clone(), factor: Factor::Llt(llt) })
    }

    pub fn dim(&self) -> usize {
        self.matrix.n_rows()
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    fn raw_solve(&self, b: &[f64]) -> Vec<f64> {
        let rhs = Col::<f64>::from_fn(b.len(), |i| b[i]);
        let x = match &self.factor {
            Factor::Lu(f) => f.solve(&rhs),
            Factor::Llt(f) => f.solve(&rhs),
        };
        (0..b.len()).map(|i| x[i]).collect()
    }

    /// Solve `A x = b` followed by two steps of iterative refinement.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        assert_eq!(b.len(), self.dim());
        let mut x = self.raw_solve(b);
        for _ in 0..2 {
            let ax = self.matrix.mul_vec(&x);
            let r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
            if norm2(&r) == 0.0 {
                break;
            }
            let dx = self.raw_solve(&r);
            for (xi, d) in x.iter_mut().zip(&dx) {
                *xi += d;
            }
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Solver("factorization produced non-finite values (singular matrix)".into()));
        }
        Ok(x)
    }

    /// `|A x - b| / (|A| |x| + |b|)` using the Frobenius norm of `A`.
    pub fn relative_residual(&self, x: &[f64], b: &[f64]) -> f64 {
        let ax = self.matrix.mul_vec(x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        norm2(&r) / (self.matrix.frobenius_norm() * norm2(x) + norm2(b)).max(f64::MIN_POSITIVE)
    }
}
