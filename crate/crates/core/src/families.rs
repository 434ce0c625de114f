//! Orthonormal polynomial families: recurrence coefficients, measures and
//! recurrence-based evaluation.
//!
//! Every family is orthonormal, so the recurrence is the symmetric one
//!
//! ```text
//! x pₙ(x) = aₙ pₙ(x) + bₙ₋₁ pₙ₋₁(x) + bₙ pₙ₊₁(x),   p₀ = 1,  p₁ = (x - a₀)/b₀
//! ```
//!
//! and the total mass of every measure is one. The continuous dual Hahn and
//! Wilson polynomials are polynomials in `x²`; their recurrences, Jacobi
//! matrices, nodes and discrete points all live in that squared variable,
//! while the continuous density is a function of `x ≥ 0`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::special::{ln_abs_gamma_sq, ln_gamma, signed_ln_pochhammer, SignedLn};

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type MassFn = Arc<dyn Fn(usize) -> MassPoint + Send + Sync>;

/// A polynomial family and its parameters.
#[derive(Debug, Clone)]
pub enum FamilySpec {
    Charlier {
        mu: f64,
    },
    Meixner {
        mu: f64,
        beta: f64,
    },
    Krawtchouk {
        m: usize,
        gamma: f64,
    },
    ContinuousDualHahn {
        mu: f64,
        alpha: f64,
        beta: f64,
    },
    Wilson {
        mu: f64,
        nu: f64,
        alpha: f64,
        beta: f64,
    },
    Custom(CustomFamily),
}

/// A user-supplied recurrence table together with the measure it is
/// orthonormal for.
#[derive(Debug, Clone)]
pub struct CustomFamily {
    pub diagonal: Vec<f64>,
    pub off_diagonal: Vec<f64>,
    pub measure: MeasureSpec,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Params {
    Charlier {
        mu: f64,
    },
    Meixner {
        mu: f64,
        beta: f64,
    },
    Krawtchouk {
        m: usize,
        gamma: f64,
    },
    ContinuousDualHahn {
        mu: f64,
        alpha: f64,
        beta: f64,
    },
    Wilson {
        mu: f64,
        nu: f64,
        alpha: f64,
        beta: f64,
    },
}

#[derive(Debug, Clone)]
enum Coefficients {
    Closed(Params),
    Table { a: Arc<[f64]>, b: Arc<[f64]> },
}

/// The coefficient sequence `{aₙ, bₙ}` of a family.
#[derive(Debug, Clone)]
pub struct RecurrenceStream {
    coefficients: Coefficients,
}

fn invalid(family: &'static str, constraint: impl Into<String>) -> Error {
    Error::InvalidParameter {
        family,
        constraint: constraint.into(),
    }
}

fn require(ok: bool, family: &'static str, constraint: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(invalid(family, constraint))
    }
}

impl FamilySpec {
    pub fn name(&self) -> &'static str {
        match self {
            FamilySpec::Charlier { .. } => "charlier",
            FamilySpec::Meixner { .. } => "meixner",
            FamilySpec::Krawtchouk { .. } => "krawtchouk",
            FamilySpec::ContinuousDualHahn { .. } => "continuous-dual-hahn",
            FamilySpec::Wilson { .. } => "wilson",
            FamilySpec::Custom(_) => "custom",
        }
    }

    /// Named parameter values, in a fixed order.
    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match *self {
            FamilySpec::Charlier { mu } => vec![("mu", mu)],
            FamilySpec::Meixner { mu, beta } => vec![("mu", mu), ("beta", beta)],
            FamilySpec::Krawtchouk { m, gamma } => vec![("M", m as f64), ("gamma", gamma)],
            FamilySpec::ContinuousDualHahn { mu, alpha, beta } => {
                vec![("mu", mu), ("alpha", alpha), ("beta", beta)]
            }
            FamilySpec::Wilson {
                mu,
                nu,
                alpha,
                beta,
            } => vec![("mu", mu), ("nu", nu), ("alpha", alpha), ("beta", beta)],
            FamilySpec::Custom(_) => Vec::new(),
        }
    }

    /// True when the recurrence variable is `x²` rather than `x`.
    pub fn squared_argument(&self) -> bool {
        matches!(
            self,
            FamilySpec::ContinuousDualHahn { .. } | FamilySpec::Wilson { .. }
        )
    }

    pub fn validate(&self) -> Result<()> {
        let name = self.name();
        let finite = self.params().iter().all(|(_, v)| v.is_finite());
        require(finite, name, "parameters must be finite")?;
        match *self {
            FamilySpec::Charlier { mu } => require(mu > 0.0, name, "mu > 0"),
            FamilySpec::Meixner { mu, beta } => {
                require(mu > 0.0, name, "mu > 0")?;
                require(beta > 0.0 && beta < 1.0, name, "0 < beta < 1")
            }
            FamilySpec::Krawtchouk { m, gamma } => {
                require(m >= 1, name, "M >= 1")?;
                require(gamma > 0.0 && gamma < 1.0, name, "0 < gamma < 1")
            }
            FamilySpec::ContinuousDualHahn { mu, alpha, beta } => {
                if mu >= 0.0 {
                    require(
                        alpha > 0.0 && beta > 0.0,
                        name,
                        "alpha > 0 and beta > 0 when mu >= 0",
                    )
                } else {
                    require(
                        alpha + mu > 0.0 && beta + mu > 0.0,
                        name,
                        "alpha + mu > 0 and beta + mu > 0 when mu < 0",
                    )
                }
            }
            FamilySpec::Wilson {
                mu,
                nu,
                alpha,
                beta,
            } => {
                if mu >= 0.0 {
                    require(
                        nu > 0.0 && alpha > 0.0 && beta > 0.0,
                        name,
                        "nu, alpha, beta > 0 when mu >= 0",
                    )
                } else {
                    require(
                        nu + mu > 0.0 && alpha + mu > 0.0 && beta + mu > 0.0,
                        name,
                        "nu + mu, alpha + mu, beta + mu > 0 when mu < 0",
                    )
                }
            }
            FamilySpec::Custom(ref c) => c.validate(),
        }
    }

    fn closed_params(&self) -> Option<Params> {
        Some(match *self {
            FamilySpec::Charlier { mu } => Params::Charlier { mu },
            FamilySpec::Meixner { mu, beta } => Params::Meixner { mu, beta },
            FamilySpec::Krawtchouk { m, gamma } => Params::Krawtchouk { m, gamma },
            FamilySpec::ContinuousDualHahn { mu, alpha, beta } => {
                Params::ContinuousDualHahn { mu, alpha, beta }
            }
            FamilySpec::Wilson {
                mu,
                nu,
                alpha,
                beta,
            } => Params::Wilson {
                mu,
                nu,
                alpha,
                beta,
            },
            FamilySpec::Custom(_) => return None,
        })
    }

    pub fn recurrence(&self) -> Result<RecurrenceStream> {
        self.validate()?;
        let coefficients = match self {
            FamilySpec::Custom(c) => Coefficients::Table {
                a: c.diagonal.clone().into(),
                b: c.off_diagonal.clone().into(),
            },
            other => Coefficients::Closed(other.closed_params().expect("closed-form family")),
        };
        Ok(RecurrenceStream { coefficients })
    }

    pub fn measure(&self) -> Result<MeasureSpec> {
        self.validate()?;
        match *self {
            FamilySpec::Charlier { mu } => Ok(charlier_measure(mu)),
            FamilySpec::Meixner { mu, beta } => Ok(meixner_measure(mu, beta)),
            FamilySpec::Krawtchouk { m, gamma } => Ok(krawtchouk_measure(m, gamma)),
            FamilySpec::ContinuousDualHahn { mu, alpha, beta } => cdh_measure(mu, alpha, beta),
            FamilySpec::Wilson {
                mu,
                nu,
                alpha,
                beta,
            } => wilson_measure(mu, nu, alpha, beta),
            FamilySpec::Custom(ref c) => Ok(c.measure.clone()),
        }
    }
}

impl CustomFamily {
    fn validate(&self) -> Result<()> {
        let name = "custom";
        require(
            !self.diagonal.is_empty(),
            name,
            "at least one diagonal coefficient",
        )?;
        require(
            self.off_diagonal.len() + 1 >= self.diagonal.len(),
            name,
            "off-diagonal table must cover the diagonal table",
        )?;
        require(
            self.diagonal.iter().all(|v| v.is_finite()),
            name,
            "diagonal coefficients must be finite",
        )?;
        require(
            self.off_diagonal.iter().all(|v| v.is_finite() && *v != 0.0),
            name,
            "off-diagonal coefficients must be finite and nonzero",
        )?;
        require(
            self.measure.continuous.is_some() || self.measure.discrete.is_some(),
            name,
            "measure needs a continuous or a discrete component",
        )
    }
}

impl RecurrenceStream {
    pub fn family(&self) -> &'static str {
        match &self.coefficients {
            Coefficients::Closed(p) => match p {
                Params::Charlier { .. } => "charlier",
                Params::Meixner { .. } => "meixner",
                Params::Krawtchouk { .. } => "krawtchouk",
                Params::ContinuousDualHahn { .. } => "continuous-dual-hahn",
                Params::Wilson { .. } => "wilson",
            },
            Coefficients::Table { .. } => "custom",
        }
    }

    /// Largest Jacobi matrix dimension the stream supports, if finite.
    pub fn max_dimension(&self) -> Option<usize> {
        match &self.coefficients {
            Coefficients::Closed(Params::Krawtchouk { m, .. }) => Some(m + 1),
            Coefficients::Closed(_) => None,
            Coefficients::Table { a, .. } => Some(a.len()),
        }
    }

    fn range_error(&self, index: usize, max: usize) -> Error {
        Error::IndexRange {
            family: self.family(),
            index,
            max,
        }
    }

    /// Diagonal coefficient `aₙ`.
    pub fn a(&self, n: usize) -> Result<f64> {
        let nf = n as f64;
        Ok(match &self.coefficients {
            Coefficients::Closed(p) => match *p {
                Params::Charlier { mu } => nf + mu,
                Params::Meixner { mu, beta } => {
                    (nf * (1.0 + beta) + 2.0 * mu * beta) / (1.0 - beta)
                }
                Params::Krawtchouk { m, gamma } => {
                    if n > m {
                        return Err(self.range_error(n, m));
                    }
                    m as f64 * gamma + nf * (1.0 - 2.0 * gamma)
                }
                Params::ContinuousDualHahn { mu, alpha, beta } => {
                    (nf + mu + alpha) * (nf + mu + beta) + nf * (nf + alpha + beta - 1.0) - mu * mu
                }
                Params::Wilson {
                    mu,
                    nu,
                    alpha,
                    beta,
                } => {
                    let s = mu + nu + alpha + beta;
                    let first =
                        (nf + mu + nu) * (nf + mu + alpha) * (nf + mu + beta) * (nf + s - 1.0)
                            / ((2.0 * nf + s) * (2.0 * nf + s - 1.0));
                    let second = if n == 0 {
                        0.0
                    } else {
                        nf * (nf + nu + alpha - 1.0)
                            * (nf + nu + beta - 1.0)
                            * (nf + alpha + beta - 1.0)
                            / ((2.0 * nf + s - 1.0) * (2.0 * nf + s - 2.0))
                    };
                    first + second - mu * mu
                }
            },
            Coefficients::Table { a, .. } => match a.get(n) {
                Some(&v) => v,
                None => return Err(self.range_error(n, a.len() - 1)),
            },
        })
    }

    /// Off-diagonal coefficient `bₙ`.
    pub fn b(&self, n: usize) -> Result<f64> {
        let nf = n as f64;
        Ok(match &self.coefficients {
            Coefficients::Closed(p) => match *p {
                Params::Charlier { mu } => -(mu * (nf + 1.0)).sqrt(),
                Params::Meixner { mu, beta } => {
                    -beta.sqrt() / (1.0 - beta) * ((nf + 1.0) * (nf + 2.0 * mu)).sqrt()
                }
                Params::Krawtchouk { m, gamma } => {
                    if n >= m {
                        return Err(self.range_error(n, m - 1));
                    }
                    -((nf + 1.0) * (m as f64 - nf) * gamma * (1.0 - gamma)).sqrt()
                }
                Params::ContinuousDualHahn { mu, alpha, beta } => {
                    -((nf + 1.0) * (nf + alpha + beta) * (nf + mu + alpha) * (nf + mu + beta))
                        .sqrt()
                }
                Params::Wilson {
                    mu,
                    nu,
                    alpha,
                    beta,
                } => {
                    let s = mu + nu + alpha + beta;
                    let num = (nf + 1.0)
                        * (nf + mu + nu)
                        * (nf + alpha + beta)
                        * (nf + mu + alpha)
                        * (nf + mu + beta)
                        * (nf + nu + alpha)
                        * (nf + nu + beta)
                        * (nf + s - 1.0);
                    let den = (2.0 * nf + s - 1.0) * (2.0 * nf + s + 1.0);
                    -(num / den).sqrt() / (2.0 * nf + s)
                }
            },
            Coefficients::Table { b, .. } => match b.get(n) {
                Some(&v) => v,
                None => return Err(self.range_error(n, b.len().saturating_sub(1))),
            },
        })
    }

    /// `pₙ(x)` by forward recurrence.
    ///
    /// The recurrence runs in double-double arithmetic on the double
    /// coefficients: near the ends of the spectrum `pₙ` is the decaying
    /// solution and plain double rounding errors grow with the dominant one.
    pub fn eval_poly(&self, n: usize, x: f64) -> Result<f64> {
        Ok(*self.eval_upto(n, x)?.last().expect("nonempty"))
    }

    /// `[p₀(x), …, pₙ(x)]`.
    pub fn eval_upto(&self, n: usize, x: f64) -> Result<Vec<f64>> {
        if let Some(max) = self.max_dimension() {
            if n >= max {
                return Err(self.range_error(n, max - 1));
            }
        }
        let x = TwoFloat::from(x);
        let mut p = Vec::with_capacity(n + 1);
        p.push(TwoFloat::from(1.0));
        if n > 0 {
            p.push((x - self.a(0)?) / self.b(0)?);
        }
        for j in 1..n {
            let next = ((x - self.a(j)?) * p[j] - p[j - 1] * self.b(j - 1)?) / self.b(j)?;
            p.push(next);
        }
        Ok(p.into_iter().map(f64::from).collect())
    }
}

/// Whether the recurrence variable of a measure is `x` or `x²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Argument {
    Linear,
    Squared,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassPoint {
    pub point: f64,
    pub mass: f64,
}

/// Continuous density `σ(x)` on `[lower, upper]`; `upper` may be infinite.
#[derive(Clone)]
pub struct ContinuousDensity {
    pub lower: f64,
    pub upper: f64,
    density: RealFn,
}

impl ContinuousDensity {
    pub fn new(lower: f64, upper: f64, density: RealFn) -> Self {
        ContinuousDensity {
            lower,
            upper,
            density,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.density)(x)
    }
}

impl fmt::Debug for ContinuousDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ContinuousDensity")
            .field("lower", &self.lower)
            .field("upper", &self.upper)
            .finish_non_exhaustive()
    }
}

#[derive(Clone)]
pub enum MassSequence {
    Finite(Vec<MassPoint>),
    /// Lazily generated; point `k` is `generator(k)`.
    Infinite(MassFn),
}

/// Point masses `{(xₖ, ξₖ)}` plus, optionally, a smooth function `χ` with
/// `χ(xₖ) = ξₖ` used for derivative weights at non-lattice nodes.
#[derive(Clone)]
pub struct DiscreteMeasure {
    pub masses: MassSequence,
    interpolant: Option<RealFn>,
}

impl DiscreteMeasure {
    pub fn finite(points: Vec<MassPoint>) -> Self {
        DiscreteMeasure {
            masses: MassSequence::Finite(points),
            interpolant: None,
        }
    }

    pub fn infinite(generator: MassFn) -> Self {
        DiscreteMeasure {
            masses: MassSequence::Infinite(generator),
            interpolant: None,
        }
    }

    pub fn with_interpolant(mut self, chi: RealFn) -> Self {
        self.interpolant = Some(chi);
        self
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.masses, MassSequence::Finite(_))
    }

    /// The mass points when the sequence is finite.
    pub fn points(&self) -> Option<&[MassPoint]> {
        match &self.masses {
            MassSequence::Finite(v) => Some(v),
            MassSequence::Infinite(_) => None,
        }
    }

    pub fn get(&self, k: usize) -> Option<MassPoint> {
        match &self.masses {
            MassSequence::Finite(v) => v.get(k).copied(),
            MassSequence::Infinite(g) => Some(g(k)),
        }
    }

    /// `χ(x)`, when the measure carries a continuation off its support.
    pub fn interpolant(&self, x: f64) -> Option<f64> {
        self.interpolant.as_ref().map(|chi| chi(x))
    }

    pub fn has_interpolant(&self) -> bool {
        self.interpolant.is_some()
    }

    /// `Σₖ ξₖ g(xₖ)`; infinite sequences are cut off by `policy`.
    pub fn sum<G: Fn(f64) -> f64>(&self, policy: &TruncationPolicy, g: G) -> f64 {
        match &self.masses {
            MassSequence::Finite(v) => v.iter().map(|p| p.mass * g(p.point)).sum(),
            MassSequence::Infinite(gen) => policy.sum((0..).map(|k| gen(k)), g),
        }
    }
}

impl fmt::Debug for DiscreteMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut d = f.debug_struct("DiscreteMeasure");
        match &self.masses {
            MassSequence::Finite(v) => d.field("points", v),
            MassSequence::Infinite(_) => d.field("points", &"infinite"),
        };
        d.field("interpolant", &self.interpolant.is_some()).finish()
    }
}

/// The orthogonality measure `σ(x) dx + Σ ξₖ δ(x - xₖ)`.
///
/// With [`Argument::Squared`] the discrete points are given in the squared
/// variable while the density is a function of `x`.
#[derive(Debug, Clone)]
pub struct MeasureSpec {
    pub continuous: Option<ContinuousDensity>,
    pub discrete: Option<DiscreteMeasure>,
    pub argument: Argument,
}

/// Cutoff rule for infinite discrete sums.
///
/// Summation stops once `patience` consecutive terms each fall below
/// `relative_cutoff` times the accumulated sum of absolute values, or after
/// `max_terms` terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    pub relative_cutoff: f64,
    pub max_terms: usize,
    pub patience: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            relative_cutoff: 1e-18,
            max_terms: 1_000_000,
            patience: 4,
        }
    }
}

impl TruncationPolicy {
    pub fn sum<I, G>(&self, points: I, g: G) -> f64
    where
        I: IntoIterator<Item = MassPoint>,
        G: Fn(f64) -> f64,
    {
        let mut total = 0.0;
        let mut magnitude = 0.0;
        let mut quiet = 0;
        for p in points.into_iter().take(self.max_terms) {
            let term = p.mass * g(p.point);
            total += term;
            magnitude += term.abs();
            if magnitude > 0.0 && term.abs() < self.relative_cutoff * magnitude {
                quiet += 1;
                if quiet >= self.patience {
                    break;
                }
            } else {
                quiet = 0;
            }
        }
        total
    }
}

fn ln_gamma_or_nan(x: f64) -> f64 {
    ln_gamma(x).unwrap_or(f64::NAN)
}

fn charlier_ln_chi(mu: f64, x: f64) -> f64 {
    x * mu.ln() - mu - ln_gamma_or_nan(x + 1.0)
}

fn charlier_measure(mu: f64) -> MeasureSpec {
    let generator: MassFn = Arc::new(move |k| MassPoint {
        point: k as f64,
        mass: charlier_ln_chi(mu, k as f64).exp(),
    });
    let chi: RealFn = Arc::new(move |x| charlier_ln_chi(mu, x).exp());
    MeasureSpec {
        continuous: None,
        discrete: Some(DiscreteMeasure::infinite(generator).with_interpolant(chi)),
        argument: Argument::Linear,
    }
}

fn meixner_ln_chi(mu: f64, beta: f64, x: f64) -> f64 {
    let c = 2.0 * mu;
    c * (1.0 - beta).ln() + ln_gamma_or_nan(c + x) - ln_gamma_or_nan(c) + x * beta.ln()
        - ln_gamma_or_nan(x + 1.0)
}

fn meixner_measure(mu: f64, beta: f64) -> MeasureSpec {
    let generator: MassFn = Arc::new(move |k| MassPoint {
        point: k as f64,
        mass: meixner_ln_chi(mu, beta, k as f64).exp(),
    });
    let chi: RealFn = Arc::new(move |x| meixner_ln_chi(mu, beta, x).exp());
    MeasureSpec {
        continuous: None,
        discrete: Some(DiscreteMeasure::infinite(generator).with_interpolant(chi)),
        argument: Argument::Linear,
    }
}

// The mass exponent is M - k: only that makes the masses sum to one.
fn krawtchouk_ln_chi(m: usize, gamma: f64, x: f64) -> f64 {
    let mf = m as f64;
    (mf - x) * (1.0 - gamma).ln() + ln_gamma_or_nan(mf + 1.0) + x * gamma.ln()
        - ln_gamma_or_nan(mf - x + 1.0)
        - ln_gamma_or_nan(x + 1.0)
}

fn krawtchouk_measure(m: usize, gamma: f64) -> MeasureSpec {
    let points = (0..=m)
        .map(|k| MassPoint {
            point: k as f64,
            mass: krawtchouk_ln_chi(m, gamma, k as f64).exp(),
        })
        .collect();
    let chi: RealFn = Arc::new(move |x| krawtchouk_ln_chi(m, gamma, x).exp());
    MeasureSpec {
        continuous: None,
        discrete: Some(DiscreteMeasure::finite(points).with_interpolant(chi)),
        argument: Argument::Linear,
    }
}

/// `ln(|Γ(μ+ix)|² / |Γ(2ix)|²)`, including the finite limit at `x = 0` when
/// μ is a non-positive integer (zero otherwise, i.e. `-∞` here).
fn ln_mu_over_double(mu: f64, x: f64) -> f64 {
    if x == 0.0 {
        if mu <= 0.0 && mu.fract() == 0.0 {
            let n = -mu;
            return 4f64.ln() - 2.0 * ln_gamma_or_nan(n + 1.0);
        }
        return f64::NEG_INFINITY;
    }
    let num = ln_abs_gamma_sq(mu, x).unwrap_or(f64::NAN);
    let den = ln_abs_gamma_sq(0.0, 2.0 * x).unwrap_or(f64::NAN);
    num - den
}

fn ln_abs_gamma_sq_or_nan(a: f64, x: f64) -> f64 {
    ln_abs_gamma_sq(a, x).unwrap_or(f64::NAN)
}

/// Indices `k ≥ 0` with `k + μ < 0`.
fn bound_state_count(mu: f64) -> usize {
    if mu >= 0.0 {
        0
    } else {
        (-mu).ceil() as usize
    }
}

fn positive_mass(family: &str, k: usize, value: SignedLn) -> Result<MassPoint> {
    if value.sign <= 0.0 || !value.ln_abs.is_finite() {
        return Err(Error::Internal(format!(
            "{family} mass {k} is not positive (sign {}, ln|ξ| = {})",
            value.sign, value.ln_abs
        )));
    }
    Ok(MassPoint {
        point: 0.0,
        mass: value.value(),
    })
}

fn cdh_measure(mu: f64, alpha: f64, beta: f64) -> Result<MeasureSpec> {
    let ln_norm =
        (2.0 * PI).ln() + ln_gamma(mu + alpha)? + ln_gamma(mu + beta)? + ln_gamma(alpha + beta)?;
    let density: RealFn = Arc::new(move |x: f64| {
        let x = x.abs();
        let ln = ln_mu_over_double(mu, x)
            + ln_abs_gamma_sq_or_nan(alpha, x)
            + ln_abs_gamma_sq_or_nan(beta, x)
            - ln_norm;
        ln.exp()
    });
    let continuous = Some(ContinuousDensity::new(0.0, f64::INFINITY, density));

    let count = bound_state_count(mu);
    let discrete = if count == 0 {
        None
    } else {
        let prefactor = SignedLn::from_ln(
            2f64.ln() + ln_gamma(alpha - mu)? + ln_gamma(beta - mu)?
                - ln_gamma(alpha + beta)?
                - ln_gamma(1.0 - 2.0 * mu)?,
        );
        let mut points = Vec::with_capacity(count);
        for k in 0..count {
            let kf = k as f64;
            let parity = if k % 2 == 0 { 1.0 } else { -1.0 };
            let value = prefactor * SignedLn::from_value(-mu - kf)
                / (SignedLn::from_value(parity) * SignedLn::from_ln(ln_gamma(kf + 1.0)?))
                * signed_ln_pochhammer(mu + alpha, k)
                * signed_ln_pochhammer(mu + beta, k)
                * signed_ln_pochhammer(2.0 * mu, k)
                / (signed_ln_pochhammer(mu - alpha + 1.0, k)
                    * signed_ln_pochhammer(mu - beta + 1.0, k));
            let mut p = positive_mass("continuous dual Hahn", k, value)?;
            p.point = -(kf + mu) * (kf + mu);
            points.push(p);
        }
        Some(DiscreteMeasure::finite(points))
    };
    Ok(MeasureSpec {
        continuous,
        discrete,
        argument: Argument::Squared,
    })
}

fn wilson_measure(mu: f64, nu: f64, alpha: f64, beta: f64) -> Result<MeasureSpec> {
    let s = mu + nu + alpha + beta;
    let ln_gamma_s = ln_gamma(s)?;
    let ln_norm = (2.0 * PI).ln() - ln_gamma_s
        + ln_gamma(mu + nu)?
        + ln_gamma(alpha + beta)?
        + ln_gamma(mu + alpha)?
        + ln_gamma(mu + beta)?
        + ln_gamma(nu + alpha)?
        + ln_gamma(nu + beta)?;
    let density: RealFn = Arc::new(move |x: f64| {
        let x = x.abs();
        let ln = ln_mu_over_double(mu, x)
            + ln_abs_gamma_sq_or_nan(nu, x)
            + ln_abs_gamma_sq_or_nan(alpha, x)
            + ln_abs_gamma_sq_or_nan(beta, x)
            - ln_norm;
        ln.exp()
    });
    let continuous = Some(ContinuousDensity::new(0.0, f64::INFINITY, density));

    let count = bound_state_count(mu);
    let discrete = if count == 0 {
        None
    } else {
        let prefactor = SignedLn::from_ln(
            2f64.ln()
                + ln_gamma_s
                + ln_gamma(nu - mu)?
                + ln_gamma(alpha - mu)?
                + ln_gamma(beta - mu)?
                - ln_gamma(1.0 - 2.0 * mu)?
                - ln_gamma(alpha + beta)?
                - ln_gamma(alpha + nu)?
                - ln_gamma(beta + nu)?,
        );
        let mut points = Vec::with_capacity(count);
        for k in 0..count {
            let kf = k as f64;
            let value = prefactor
                * SignedLn::from_value(-mu - kf)
                * signed_ln_pochhammer(2.0 * mu, k)
                * signed_ln_pochhammer(mu + nu, k)
                * signed_ln_pochhammer(mu + alpha, k)
                * signed_ln_pochhammer(mu + beta, k)
                / (signed_ln_pochhammer(mu - nu + 1.0, k)
                    * signed_ln_pochhammer(mu - alpha + 1.0, k)
                    * signed_ln_pochhammer(mu - beta + 1.0, k)
                    * SignedLn::from_ln(ln_gamma(kf + 1.0)?));
            let mut p = positive_mass("Wilson", k, value)?;
            p.point = -(kf + mu) * (kf + mu);
            points.push(p);
        }
        Some(DiscreteMeasure::finite(points))
    };
    Ok(MeasureSpec {
        continuous,
        discrete,
        argument: Argument::Squared,
    })
}
