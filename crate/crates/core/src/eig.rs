//! Symmetric tridiagonal eigensolver.
//!
//! Eigenvalues come from implicit QL with a Wilkinson-type shift.
//! Eigenvectors are then built one at a time from a twisted factorization of
//! `J - λI`: forward pivots from the top, backward pivots from the bottom,
//! joined at the index where the twist element is smallest. Every component
//! is a product of ratios of pivots, so even components far below `1e-16`
//! keep their relative accuracy; accumulating QL rotations would only give
//! them to absolute accuracy.

use crate::error::{Error, Result};
use crate::jacobi::JacobiMatrix;

const MAX_ITERATIONS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Values,
    FirstRow,
    Full,
}

/// Dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.n + col]
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.n).map(|r| self.get(r, col)).collect()
    }
}

/// Eigenvalues in ascending order, with `first_components[n] = Λ₀ₙ` and
/// column `n` of `full_matrix` the unit eigenvector of `eigenvalues[n]`,
/// signed so that `Λ₀ₙ > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub first_components: Option<Vec<f64>>,
    pub full_matrix: Option<Matrix>,
}

pub fn eigenvalues(jac: &JacobiMatrix) -> Result<Vec<f64>> {
    let mut d = jac.diag().to_vec();
    let mut e = jac.offdiag().to_vec();
    e.push(0.0);
    ql_implicit(&mut d, &mut e)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Eigenvalues of the trailing `(N-1) × (N-1)` principal submatrix.
pub fn deleted_submatrix_eigenvalues(jac: &JacobiMatrix) -> Result<Vec<f64>> {
    match jac.trailing_submatrix() {
        Some(sub) => eigenvalues(&sub),
        None => Err(Error::InvalidParameter {
            family: "jacobi",
            constraint: "deleting the first row needs N >= 2".into(),
        }),
    }
}

pub fn decompose(jac: &JacobiMatrix, mode: Mode) -> Result<EigenDecomposition> {
    let n = jac.dim();
    let eigenvalues = eigenvalues(jac)?;
    if mode == Mode::Values {
        return Ok(EigenDecomposition {
            eigenvalues,
            first_components: None,
            full_matrix: None,
        });
    }

    let mut first = Vec::with_capacity(n);
    let mut data = if mode == Mode::Full {
        vec![0.0; n * n]
    } else {
        Vec::new()
    };
    for (col, &lambda) in eigenvalues.iter().enumerate() {
        let z = twisted_eigenvector(jac, lambda)?;
        first.push(z[0]);
        if mode == Mode::Full {
            for (row, v) in z.iter().enumerate() {
                data[row * n + col] = *v;
            }
        }
    }
    Ok(EigenDecomposition {
        eigenvalues,
        first_components: Some(first),
        full_matrix: (mode == Mode::Full).then_some(Matrix { n, data }),
    })
}

/// Unit eigenvector for the eigenvalue `lambda`, with positive first entry.
fn twisted_eigenvector(jac: &JacobiMatrix, lambda: f64) -> Result<Vec<f64>> {
    let a = jac.diag();
    let b = jac.offdiag();
    let n = a.len();
    if n == 1 {
        return Ok(vec![1.0]);
    }
    let norm_bound = a.iter().fold(0.0f64, |m, v| m.max(v.abs()))
        + 2.0 * b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let pivmin = f64::MIN_POSITIVE.max(f64::EPSILON * f64::EPSILON * norm_bound);
    let guard = |p: f64| {
        if p.abs() < pivmin {
            pivmin.copysign(p)
        } else {
            p
        }
    };

    // forward pivots of J - λI = L D Lᵀ
    let mut fwd = vec![0.0; n];
    fwd[0] = guard(a[0] - lambda);
    for k in 1..n {
        fwd[k] = guard(a[k] - lambda - b[k - 1] * b[k - 1] / fwd[k - 1]);
    }
    // backward pivots of J - λI = U Δ Uᵀ
    let mut bwd = vec![0.0; n];
    bwd[n - 1] = guard(a[n - 1] - lambda);
    for k in (0..n - 1).rev() {
        bwd[k] = guard(a[k] - lambda - b[k] * b[k] / bwd[k + 1]);
    }

    let mut twist = 0;
    let mut smallest = f64::INFINITY;
    for k in 0..n {
        let mut gamma = a[k] - lambda;
        if k > 0 {
            gamma -= b[k - 1] * b[k - 1] / fwd[k - 1];
        }
        if k + 1 < n {
            gamma -= b[k] * b[k] / bwd[k + 1];
        }
        if gamma.abs() < smallest {
            smallest = gamma.abs();
            twist = k;
        }
    }

    let mut z = vec![0.0; n];
    z[twist] = 1.0;
    for k in (0..twist).rev() {
        z[k] = -b[k] * z[k + 1] / fwd[k];
    }
    for k in twist + 1..n {
        z[k] = -b[k - 1] * z[k - 1] / bwd[k];
    }

    let scale = z.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if !scale.is_finite() || scale == 0.0 {
        return Err(Error::Internal(format!(
            "eigenvector for eigenvalue {lambda} is not finite"
        )));
    }
    let norm = scale * z.iter().map(|v| (v / scale).powi(2)).sum::<f64>().sqrt();
    if z[0] == 0.0 {
        return Err(Error::Internal(format!(
            "first eigenvector component vanished for eigenvalue {lambda}"
        )));
    }
    let sign = z[0].signum();
    Ok(z.into_iter().map(|v| sign * v / norm).collect())
}

/// Implicit QL iteration on diagonal `d` and off-diagonal `e` (with
/// `e[n-1] = 0`); eigenvalues are left in `d`, unsorted.
fn ql_implicit(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m] == 0.0 || e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > MAX_ITERATIONS {
                return Err(Error::NoConvergence {
                    index: l,
                    iterations: MAX_ITERATIONS,
                });
            }

            // Wilkinson-type shift from the leading 2×2 block
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;

            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}
