//! Finite truncations of the Jacobi matrix of a recurrence, its powers, and
//! spectral evaluation of matrix functions `[f(J)]ₙₘ`.

use crate::eig::{decompose, Mode};
use crate::error::{Error, Result};
use crate::families::RecurrenceStream;

/// Symmetric tridiagonal matrix with diagonal `a₀…a_{N-1}` and
/// off-diagonal `b₀…b_{N-2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiMatrix {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl JacobiMatrix {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || offdiag.len() + 1 != diag.len() {
            return Err(Error::InvalidParameter {
                family: "jacobi",
                constraint: format!(
                    "need N >= 1 diagonal and N - 1 off-diagonal entries, got {} and {}",
                    diag.len(),
                    offdiag.len()
                ),
            });
        }
        Ok(JacobiMatrix { diag, offdiag })
    }

    /// The `n × n` truncation of the stream's Jacobi matrix.
    pub fn build(stream: &RecurrenceStream, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter {
                family: stream.family(),
                constraint: "matrix dimension must be at least 1".into(),
            });
        }
        if let Some(max) = stream.max_dimension() {
            if n > max {
                return Err(Error::IndexRange {
                    family: stream.family(),
                    index: n - 1,
                    max: max - 1,
                });
            }
        }
        let diag = (0..n).map(|i| stream.a(i)).collect::<Result<Vec<_>>>()?;
        let offdiag = (0..n - 1)
            .map(|i| stream.b(i))
            .collect::<Result<Vec<_>>>()?;
        Ok(JacobiMatrix { diag, offdiag })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.diag[i]
        } else if i + 1 == j {
            self.offdiag[i]
        } else if j + 1 == i {
            self.offdiag[j]
        } else {
            0.0
        }
    }

    /// The matrix with its first row and column removed.
    pub fn trailing_submatrix(&self) -> Option<JacobiMatrix> {
        if self.dim() < 2 {
            return None;
        }
        Some(JacobiMatrix {
            diag: self.diag[1..].to_vec(),
            offdiag: self.offdiag[1..].to_vec(),
        })
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * v[i];
                if i > 0 {
                    s += self.offdiag[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    s += self.offdiag[i] * v[i + 1];
                }
                s
            })
            .collect()
    }
}

/// `(Jᵏ)ₙₘ` of the full (untruncated) Jacobi matrix.
///
/// A power `k` only reaches `k` places off the diagonal, so a truncation of
/// dimension `max(n, m) + k + 1` gives the exact entry.
pub fn power_element(stream: &RecurrenceStream, k: usize, n: usize, m: usize) -> Result<f64> {
    let mut dim = n.max(m) + k + 1;
    if let Some(max) = stream.max_dimension() {
        if n.max(m) >= max {
            return Err(Error::IndexRange {
                family: stream.family(),
                index: n.max(m),
                max: max - 1,
            });
        }
        dim = dim.min(max);
    }
    let jac = JacobiMatrix::build(stream, dim)?;
    let mut v = vec![0.0; dim];
    v[m] = 1.0;
    for _ in 0..k {
        v = jac.mul_vec(&v);
    }
    Ok(v[n])
}

/// `[f(J)]ₙₘ = Σₖ Λₙₖ f(εₖ) Λₘₖ` from the full eigendecomposition.
pub fn matrix_function_element<F>(jac: &JacobiMatrix, f: F, n: usize, m: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let dec = decompose(jac, Mode::Full)?;
    let vectors = dec.full_matrix.as_ref().expect("full mode");
    let mut total = 0.0;
    for (k, &eps) in dec.eigenvalues.iter().enumerate() {
        let value = f(eps);
        if !value.is_finite() {
            return Err(Error::NonFinite { node: eps, value });
        }
        total += vectors.get(n, k) * value * vectors.get(m, k);
    }
    Ok(total)
}
