//! Gauss rules from a Jacobi matrix.
//!
//! Two independent constructions are provided. [`gauss_rule`] takes the
//! weights from the first components of the eigenvectors,
//! `ωₙ = Λ₀ₙ²`. [`gauss_rule_eigenvalue_only`] needs eigenvalues only:
//!
//! ```text
//! ωₙ = ∏ₘ (εₙ - ε̂ₘ) / ∏_{k≠n} (εₙ - εₖ)
//! ```
//!
//! where `ε̂` are the eigenvalues of the matrix with its first row and column
//! deleted.

use crate::eig::{decompose, deleted_submatrix_eigenvalues, eigenvalues, Mode};
use crate::error::{Error, Result};
use crate::jacobi::JacobiMatrix;
use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;

/// Nodes `εₙ` (ascending) and weights `ωₙ` of an `N`-point rule.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.len() != weights.len() || nodes.is_empty() {
            return Err(Error::Internal(format!(
                "rule needs matching nonempty node and weight lists, got {} and {}",
                nodes.len(),
                weights.len()
            )));
        }
        Ok(QuadratureRule { nodes, weights })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `Σ ωₙ f(εₙ)`, failing on the first node where `f` is not finite.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> Result<f64> {
        weighted_sum(&self.nodes, &self.weights, f)
    }
}

pub(crate) fn weighted_sum<F: Fn(f64) -> f64>(nodes: &[f64], weights: &[f64], f: F) -> Result<f64> {
    let mut total = 0.0;
    for (&x, &w) in nodes.iter().zip(weights) {
        let value = f(x);
        if !value.is_finite() {
            return Err(Error::NonFinite { node: x, value });
        }
        total += w * value;
    }
    Ok(total)
}

/// Golub–Welsch: nodes are the eigenvalues, weights the squared first
/// eigenvector components.
pub fn gauss_rule(jac: &JacobiMatrix) -> Result<QuadratureRule> {
    let dec = decompose(jac, Mode::FirstRow)?;
    let weights = dec
        .first_components
        .expect("first-row mode")
        .into_iter()
        .map(|v| v * v)
        .collect();
    QuadratureRule::new(dec.eigenvalues, weights)
}

/// Weights from eigenvalues of `J` and of its trailing submatrix only.
///
/// The differences `εₙ - ε̂ₘ` can be far smaller than the eigenvalues
/// themselves, so both spectra are polished by Newton's method on the
/// characteristic polynomials in extended precision, starting from the
/// double-precision eigenvalues. The working precision doubles until two
/// successive weight vectors agree.
pub fn gauss_rule_eigenvalue_only(jac: &JacobiMatrix) -> Result<QuadratureRule> {
    if jac.dim() < 2 {
        return Err(Error::InvalidParameter {
            family: "jacobi",
            constraint: "eigenvalue-only weights need N >= 2".into(),
        });
    }
    let start = eigenvalues(jac)?;
    let start_hat = deleted_submatrix_eigenvalues(jac)?;

    let mut roots = Roots {
        nodes: start
            .iter()
            .map(|&v| big(v, FIRST_PRECISION))
            .collect::<Result<_>>()?,
        hat: start_hat
            .iter()
            .map(|&v| big(v, FIRST_PRECISION))
            .collect::<Result<_>>()?,
    };
    let mut previous: Option<Vec<f64>> = None;
    let mut unresolved = None;
    let mut precision = FIRST_PRECISION;
    while precision <= MAX_PRECISION {
        let weights = match eigenvalue_only_at(jac, &mut roots, precision)? {
            Ok(w) => w,
            Err(index) => {
                // gap below the working resolution
                unresolved = Some(index);
                previous = None;
                precision *= 2;
                continue;
            }
        };
        unresolved = None;
        if let Some(prev) = &previous {
            let settled = prev
                .iter()
                .zip(&weights)
                .all(|(p, w)| (p - w).abs() <= WEIGHT_AGREEMENT * w.abs());
            if settled {
                return QuadratureRule::new(start, weights);
            }
        }
        previous = Some(weights);
        precision *= 2;
    }
    match unresolved {
        Some(index) => Err(Error::Interlacing { index }),
        None => Err(Error::Internal(format!(
            "eigenvalue-only weights did not settle by {MAX_PRECISION} bits"
        ))),
    }
}

type Big = FBig<HalfEven, 2>;

const FIRST_PRECISION: usize = 128;
const MAX_PRECISION: usize = 8192;
const WEIGHT_AGREEMENT: f64 = 1e-14;
const NEWTON_LIMIT: usize = 200;

fn big(x: f64, precision: usize) -> Result<Big> {
    Big::try_from(x)
        .map(|v| v.with_precision(precision).value())
        .map_err(|_| Error::Internal(format!("cannot represent {x} in extended precision")))
}

fn magnitude(x: &Big) -> Big {
    if *x < Big::ZERO {
        -x.clone()
    } else {
        x.clone()
    }
}

struct Roots {
    nodes: Vec<Big>,
    hat: Vec<Big>,
}

/// Polishes `roots` at `precision` bits and forms the weights, or reports
/// the index where the spectra are not yet resolved.
fn eigenvalue_only_at(
    jac: &JacobiMatrix,
    roots: &mut Roots,
    precision: usize,
) -> Result<std::result::Result<Vec<f64>, usize>> {
    let a = jac
        .diag()
        .iter()
        .map(|&v| big(v, precision))
        .collect::<Result<Vec<_>>>()?;
    let b2 = jac
        .offdiag()
        .iter()
        .map(|&v| big(v, precision).map(|x| &x * &x))
        .collect::<Result<Vec<_>>>()?;

    let polish = |a: &[Big], b2: &[Big], guesses: &mut Vec<Big>| -> Result<()> {
        for (i, g) in guesses.iter_mut().enumerate() {
            let x = std::mem::replace(g, Big::ZERO)
                .with_precision(precision)
                .value();
            *g = newton(a, b2, x, i)?;
        }
        Ok(())
    };
    polish(&a, &b2, &mut roots.nodes)?;
    polish(&a[1..], &b2[1..], &mut roots.hat)?;
    let nodes = &roots.nodes;
    let hat = &roots.hat;

    for (i, h) in hat.iter().enumerate() {
        if !(nodes[i] < *h && *h < nodes[i + 1]) {
            return Ok(Err(i));
        }
    }

    let mut weights = Vec::with_capacity(nodes.len());
    for (n, eps) in nodes.iter().enumerate() {
        let mut num = big(1.0, precision)?;
        for h in hat {
            num = &num * &(eps - h);
        }
        let mut den = big(1.0, precision)?;
        for (k, other) in nodes.iter().enumerate() {
            if k != n {
                den = &den * &(eps - other);
            }
        }
        let w = &num / &den;
        if w <= Big::ZERO {
            return Ok(Err(n));
        }
        weights.push(w.to_f64().value());
    }
    Ok(Ok(weights))
}

/// Newton's method on the characteristic polynomial of the tridiagonal
/// matrix with diagonal `a` and squared off-diagonal `b2`, run until the
/// step is within a few units in the last place or stops shrinking.
fn newton(a: &[Big], b2: &[Big], mut x: Big, index: usize) -> Result<Big> {
    let mut last_step: Option<Big> = None;
    for _ in 0..NEWTON_LIMIT {
        let (p, dp) = continuant(a, b2, &x);
        if p == Big::ZERO {
            return Ok(x);
        }
        if dp == Big::ZERO {
            break;
        }
        let step = &p / &dp;
        let size = magnitude(&step);
        if let Some(last) = &last_step {
            if size >= *last {
                return Ok(x);
            }
        }
        let close = size <= &x.ulp() * &Big::from(4u8);
        x = &x - &step;
        if size == Big::ZERO || close {
            return Ok(x);
        }
        last_step = Some(size);
    }
    Err(Error::NoConvergence {
        index,
        iterations: NEWTON_LIMIT,
    })
}

/// `det(xI - T)` and its derivative by the three-term recurrence.
fn continuant(a: &[Big], b2: &[Big], x: &Big) -> (Big, Big) {
    let mut q_prev = Big::ZERO;
    let mut q = Big::ONE;
    let mut dq_prev = Big::ZERO;
    let mut dq = Big::ZERO;
    for (k, ak) in a.iter().enumerate() {
        let shift = x - ak;
        let (q_next, dq_next) = if k == 0 {
            (shift.clone(), Big::ONE)
        } else {
            (
                &(&shift * &q) - &(&b2[k - 1] * &q_prev),
                &(&q + &(&shift * &dq)) - &(&b2[k - 1] * &dq_prev),
            )
        };
        q_prev = std::mem::replace(&mut q, q_next);
        dq_prev = std::mem::replace(&mut dq, dq_next);
    }
    (q, dq)
}

/// `ω̃ₙ = ωₙ / ρ(εₙ)`: turns a weighted rule into one for the plain
/// integral or sum of `f`.
pub fn derivative_weights<W>(rule: &QuadratureRule, weight_fn: W) -> Result<Vec<f64>>
where
    W: Fn(f64) -> f64,
{
    rule.nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&x, &w)| {
            let rho = weight_fn(x);
            if !(rho > 0.0 && rho.is_finite()) {
                return Err(Error::WeightDomain {
                    node: x,
                    value: rho,
                });
            }
            Ok(w / rho)
        })
        .collect()
}
