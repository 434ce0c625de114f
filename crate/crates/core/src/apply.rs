//! Applying rules to integrals, sums and mixed integral-plus-sum
//! functionals, the reference values the tables are compared against, and
//! an adaptive integrator used as an independent check.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::families::{Argument, FamilySpec, MeasureSpec, RealFn, TruncationPolicy};
use crate::jacobi::{matrix_function_element, JacobiMatrix};
use crate::rule::{derivative_weights, gauss_rule, weighted_sum, QuadratureRule};
use crate::special::{gamma, ln_gamma};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_SUBDIVISION_LIMIT: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FunctionalKind {
    /// `∫ ρ f`
    WeightedIntegral,
    /// `∫ f`
    PlainIntegral,
    /// `Σ ξₖ f(xₖ)`
    WeightedSum,
    /// `Σ f(xₖ)`
    PlainSum,
    /// `∫ σ f + Σ ξₖ f(xₖ)`
    Mixed,
    /// `∫ σ f`, as the rule minus the exact discrete part
    ContinuousPart,
    /// `∫₀^∞ σ(x) f(x²) dx + Σ ξₖ f(xₖ²)`, with `f` applied to the nodes
    MixedSquaredArg,
}

impl FunctionalKind {
    pub const ALL: [FunctionalKind; 7] = [
        FunctionalKind::WeightedIntegral,
        FunctionalKind::PlainIntegral,
        FunctionalKind::WeightedSum,
        FunctionalKind::PlainSum,
        FunctionalKind::Mixed,
        FunctionalKind::ContinuousPart,
        FunctionalKind::MixedSquaredArg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FunctionalKind::WeightedIntegral => "weighted-integral",
            FunctionalKind::PlainIntegral => "plain-integral",
            FunctionalKind::WeightedSum => "weighted-sum",
            FunctionalKind::PlainSum => "plain-sum",
            FunctionalKind::Mixed => "mixed",
            FunctionalKind::ContinuousPart => "continuous-part",
            FunctionalKind::MixedSquaredArg => "mixed-squared-arg",
        }
    }

    fn check(self, family: &'static str, m: &MeasureSpec) -> Result<()> {
        let continuous = m.continuous.is_some();
        let discrete = m.discrete.as_ref();
        let squared = m.argument == Argument::Squared;
        let reason = match self {
            FunctionalKind::WeightedIntegral | FunctionalKind::PlainIntegral
                if !continuous || discrete.is_some() =>
            {
                Some("needs a purely continuous measure")
            }
            FunctionalKind::WeightedSum | FunctionalKind::PlainSum
                if continuous || discrete.is_none() =>
            {
                Some("needs a purely discrete measure")
            }
            FunctionalKind::PlainSum if !discrete.is_some_and(|d| d.has_interpolant()) => {
                Some("needs a weight function defined between the mass points")
            }
            FunctionalKind::Mixed | FunctionalKind::ContinuousPart
                if !continuous || discrete.is_none() =>
            {
                Some("needs both a density and point masses")
            }
            FunctionalKind::Mixed if squared => {
                Some("the recurrence variable is x², use mixed-squared-arg")
            }
            FunctionalKind::ContinuousPart if !discrete.is_some_and(|d| d.is_finite()) => {
                Some("needs finitely many point masses")
            }
            FunctionalKind::MixedSquaredArg if !squared || !continuous => {
                Some("needs a density whose recurrence variable is x²")
            }
            _ => None,
        };
        match reason {
            Some(reason) => Err(Error::Incompatible {
                kind: self.name(),
                family,
                reason,
            }),
            None => Ok(()),
        }
    }
}

/// A functional of `f` to be approximated by the `order`-point rule of
/// `family`.
#[derive(Clone)]
pub struct Functional {
    kind: FunctionalKind,
    family: FamilySpec,
    order: usize,
    f: RealFn,
    measure: MeasureSpec,
}

impl std::fmt::Debug for Functional {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Functional")
            .field("kind", &self.kind)
            .field("family", &self.family)
            .field("order", &self.order)
            .finish_non_exhaustive()
    }
}

impl Functional {
    pub fn new<F>(kind: FunctionalKind, family: FamilySpec, order: usize, f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        family.validate()?;
        if order == 0 {
            return Err(Error::InvalidParameter {
                family: family.name(),
                constraint: "rule order must be at least 1".into(),
            });
        }
        let measure = family.measure()?;
        kind.check(family.name(), &measure)?;
        Ok(Functional {
            kind,
            family,
            order,
            f: Arc::new(f),
            measure,
        })
    }

    pub fn kind(&self) -> FunctionalKind {
        self.kind
    }

    pub fn family(&self) -> &FamilySpec {
        &self.family
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn measure(&self) -> &MeasureSpec {
        &self.measure
    }

    pub fn rule(&self) -> Result<QuadratureRule> {
        let stream = self.family.recurrence()?;
        gauss_rule(&JacobiMatrix::build(&stream, self.order)?)
    }

    /// The weight function that plain kinds divide by.
    fn weight_fn(&self) -> Box<dyn Fn(f64) -> f64 + '_> {
        match self.kind {
            FunctionalKind::PlainSum => {
                let d = self.measure.discrete.as_ref().expect("checked");
                Box::new(move |x| d.interpolant(x).unwrap_or(f64::NAN))
            }
            _ => {
                let c = self.measure.continuous.as_ref().expect("checked");
                match self.measure.argument {
                    Argument::Linear => Box::new(move |x| {
                        if x < c.lower || x > c.upper {
                            0.0
                        } else {
                            c.eval(x)
                        }
                    }),
                    // density of t = x² is σ(√t) / 2√t
                    Argument::Squared => Box::new(move |t: f64| {
                        if t <= 0.0 {
                            0.0
                        } else {
                            c.eval(t.sqrt()) / (2.0 * t.sqrt())
                        }
                    }),
                }
            }
        }
    }
}

/// The rule's estimate of the functional.
pub fn approximate(func: &Functional) -> Result<f64> {
    if func.kind == FunctionalKind::ContinuousPart {
        return continuous_part_estimate(func);
    }
    let rule = func.rule()?;
    match func.kind {
        FunctionalKind::PlainIntegral | FunctionalKind::PlainSum => {
            let weights = derivative_weights(&rule, func.weight_fn())?;
            weighted_sum(rule.nodes(), &weights, |x| (func.f)(x))
        }
        _ => rule.integrate(|x| (func.f)(x)),
    }
}

/// `Σ ωₙ f(εₙ) - Σ ξₖ f(xₖ)`: the continuous part of a mixed functional.
pub fn continuous_part_estimate(func: &Functional) -> Result<f64> {
    FunctionalKind::ContinuousPart.check(func.family.name(), &func.measure)?;
    let points = func
        .measure
        .discrete
        .as_ref()
        .and_then(|d| d.points())
        .expect("checked");
    let rule = func.rule()?;
    let total = rule.integrate(|x| (func.f)(x))?;
    let mut discrete = 0.0;
    for p in points {
        let value = (func.f)(p.point);
        if !value.is_finite() {
            return Err(Error::NonFinite {
                node: p.point,
                value,
            });
        }
        discrete += p.mass * value;
    }
    Ok(total - discrete)
}

/// `Σₖ Λₙₖ f(εₖ) Λₘₖ` for the `order × order` truncation of `family`.
pub fn matrix_element<F>(family: &FamilySpec, order: usize, f: F, n: usize, m: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if n.max(m) >= order {
        return Err(Error::IndexRange {
            family: family.name(),
            index: n.max(m),
            max: order.saturating_sub(1),
        });
    }
    let jac = JacobiMatrix::build(&family.recurrence()?, order)?;
    matrix_function_element(&jac, f, n, m)
}

/// `|exact - approx| / |exact + approx|`.
pub fn relative_error(exact: f64, approx: f64) -> Result<f64> {
    let den = (exact + approx).abs();
    if den == 0.0 {
        return Err(Error::DegenerateDenominator);
    }
    Ok((exact - approx).abs() / den)
}

/// `Σₖ rᵏ / k! = eʳ`.
pub fn oracle_table1(r: f64) -> f64 {
    r.exp()
}

/// `Σ_{k=0}^{M} (k+1) r^{k+1} / Γ(k+r+2) = 1/Γ(r) - r^{M+2} / Γ(M+r+2)`.
pub fn oracle_table2(r: f64, m_max: usize) -> Result<f64> {
    if r.is_nan() || r <= 0.0 {
        return Err(Error::Domain {
            function: "oracle_table2",
            argument: r,
            constraint: "r > 0",
        });
    }
    let m = m_max as f64;
    let head = match gamma(r)? {
        g if g.is_finite() => 1.0 / g,
        _ => (-ln_gamma(r)?).exp(),
    };
    let tail = ((m + 2.0) * r.ln() - ln_gamma(m + r + 2.0)?).exp();
    Ok(head - tail)
}

/// `[f(J)]₀₀` on the `k × k` truncation of `family`.
pub fn oracle_table3<F>(family: &FamilySpec, f: F, k: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    matrix_element(family, k, f, 0, 0)
}

/// Sum of the `Σ ξₖ g(xₖ)` part of a measure under the default truncation.
pub fn discrete_sum<G: Fn(f64) -> f64>(measure: &MeasureSpec, g: G) -> f64 {
    measure
        .discrete
        .as_ref()
        .map_or(0.0, |d| d.sum(&TruncationPolicy::default(), g))
}

/// Adaptive Simpson estimate of `∫_lo^hi g`, with `hi` possibly `+∞`
/// (mapped through `x = lo + t/(1-t)`). Intervals are accepted once the
/// Richardson error estimate is below `tol` in absolute or relative terms.
pub fn adaptive_integral<G>(g: G, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    G: Fn(f64) -> f64,
{
    adaptive_integral_with_limit(g, lo, hi, tol, DEFAULT_SUBDIVISION_LIMIT)
}

pub fn adaptive_integral_with_limit<G>(
    g: G,
    lo: f64,
    hi: f64,
    tol: f64,
    limit: usize,
) -> Result<f64>
where
    G: Fn(f64) -> f64,
{
    if !lo.is_finite() || hi.is_nan() || hi < lo || tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain {
            function: "adaptive_integral",
            argument: lo,
            constraint: "finite lower limit below the upper limit, positive tolerance",
        });
    }
    if hi.is_infinite() {
        let mapped = |t: f64| {
            if t >= 1.0 {
                return 0.0;
            }
            let s = 1.0 - t;
            g(lo + t / s) / (s * s)
        };
        simpson(&mapped, 0.0, 1.0, tol, limit)
    } else {
        simpson(&g, lo, hi, tol, limit)
    }
}

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    depth: u32,
}

fn simpson<G: Fn(f64) -> f64>(g: &G, a: f64, b: f64, tol: f64, limit: usize) -> Result<f64> {
    const INITIAL: usize = 16;
    const MAX_DEPTH: u32 = 60;

    let h = (b - a) / INITIAL as f64;
    let mut stack = Vec::new();
    let mut rough = 0.0;
    for i in 0..INITIAL {
        let pa = a + i as f64 * h;
        let pb = if i + 1 == INITIAL { b } else { pa + h };
        let (fa, fm, fb) = (g(pa), g(0.5 * (pa + pb)), g(pb));
        let whole = (pb - pa) / 6.0 * (fa + 4.0 * fm + fb);
        rough += whole.abs();
        stack.push(Panel {
            a: pa,
            b: pb,
            fa,
            fm,
            fb,
            whole,
            depth: 0,
        });
    }
    let target = tol.max(tol * rough);

    let mut total = 0.0;
    let mut panels = 0;
    while let Some(p) = stack.pop() {
        panels += 1;
        if panels > limit {
            return Err(Error::SubdivisionLimit { limit });
        }
        let m = 0.5 * (p.a + p.b);
        let (lm, rm) = (0.5 * (p.a + m), 0.5 * (m + p.b));
        let (flm, frm) = (g(lm), g(rm));
        let left = (m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
        let right = (p.b - m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
        let delta = left + right - p.whole;
        if !delta.is_finite() {
            return Err(Error::NonFinite {
                node: m,
                value: delta,
            });
        }
        let local = target * (p.b - p.a) / (b - a);
        if delta.abs() <= 15.0 * local || p.depth >= MAX_DEPTH {
            if p.depth >= MAX_DEPTH && delta.abs() > 15.0 * local {
                return Err(Error::SubdivisionLimit { limit });
            }
            total += left + right + delta / 15.0;
        } else {
            stack.push(Panel {
                a: p.a,
                b: m,
                fa: p.fa,
                fm: flm,
                fb: p.fm,
                whole: left,
                depth: p.depth + 1,
            });
            stack.push(Panel {
                a: m,
                b: p.b,
                fa: p.fm,
                fm: frm,
                fb: p.fb,
                whole: right,
                depth: p.depth + 1,
            });
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{ContinuousDensity, CustomFamily};
    use crate::jacobi::power_element;

    fn cdh() -> FamilySpec {
        FamilySpec::ContinuousDualHahn {
            mu: -3.5,
            alpha: 4.5,
            beta: 4.5,
        }
    }

    fn table3_f(x: f64) -> f64 {
        x.powi(3) * (-x / 2.0).exp()
    }

    #[test]
    fn approximate_examples() {
        let one = Functional::new(
            FunctionalKind::WeightedSum,
            FamilySpec::Charlier { mu: 2.0 },
            9,
            |_| 1.0,
        )
        .unwrap();
        assert!((approximate(&one).unwrap() - 1.0).abs() < 1e-13);

        let mean = Functional::new(
            FunctionalKind::WeightedSum,
            FamilySpec::Charlier { mu: 2.0 },
            2,
            |x| x,
        )
        .unwrap();
        assert!((approximate(&mean).unwrap() - 2.0).abs() < 1e-14);

        let table1 = Functional::new(
            FunctionalKind::PlainSum,
            FamilySpec::Charlier { mu: 2.0 },
            7,
            |x| (x * 3f64.ln() - ln_gamma(x + 1.0).unwrap()).exp(),
        )
        .unwrap();
        let err = relative_error(oracle_table1(3.0), approximate(&table1).unwrap()).unwrap();
        assert!(err > 4.165e-11 / 5.0 && err < 4.165e-11 * 5.0, "{err}");
    }

    #[test]
    fn incompatible_kinds_are_rejected() {
        let bad = [
            (
                FunctionalKind::WeightedIntegral,
                FamilySpec::Charlier { mu: 2.0 },
            ),
            (
                FunctionalKind::Mixed,
                FamilySpec::Meixner { mu: 1.0, beta: 0.5 },
            ),
            (FunctionalKind::PlainSum, cdh()),
            (FunctionalKind::Mixed, cdh()),
            (
                FunctionalKind::ContinuousPart,
                FamilySpec::ContinuousDualHahn {
                    mu: 1.0,
                    alpha: 1.0,
                    beta: 1.0,
                },
            ),
        ];
        for (kind, family) in bad {
            let err = Functional::new(kind, family, 3, |x| x).unwrap_err();
            assert!(matches!(err, Error::Incompatible { .. }), "{err:?}");
            assert!(err.is_validation());
        }
        assert!(Functional::new(
            FunctionalKind::WeightedSum,
            FamilySpec::Charlier { mu: 2.0 },
            0,
            |x| x
        )
        .is_err());
    }

    #[test]
    fn non_finite_integrand_reports_node() {
        let func = Functional::new(
            FunctionalKind::WeightedSum,
            FamilySpec::Charlier { mu: 2.0 },
            2,
            |x| 1.0 / (x - 1.0),
        )
        .unwrap();
        // nodes of the two-point rule are 1 and 4
        assert!(matches!(approximate(&func), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn exactness_transfer_mixed_cdh() {
        let stream = cdh().recurrence().unwrap();
        for n in [3usize, 6, 10] {
            for k in 0..2 * n {
                let func = Functional::new(FunctionalKind::MixedSquaredArg, cdh(), n, move |x| {
                    x.powi(k as i32)
                })
                .unwrap();
                let got = approximate(&func).unwrap();
                let want = power_element(&stream, k, 0, 0).unwrap();
                assert!(
                    (got - want).abs() <= 1e-9 * want.abs().max(1.0),
                    "n={n} k={k}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn continuous_part_is_consistent() {
        for f in [table3_f as fn(f64) -> f64, |_| 1.0, |_| 0.0] {
            let mixed = Functional::new(FunctionalKind::MixedSquaredArg, cdh(), 20, f).unwrap();
            let part = Functional::new(FunctionalKind::ContinuousPart, cdh(), 20, f).unwrap();
            let direct = discrete_sum(part.measure(), f);
            let estimate = continuous_part_estimate(&part).unwrap();
            assert_eq!(approximate(&part).unwrap(), estimate);
            let whole = approximate(&mixed).unwrap();
            assert!((estimate + direct - whole).abs() <= 1e-15 * whole.abs().max(1.0));
        }
        let zero = Functional::new(FunctionalKind::ContinuousPart, cdh(), 20, |_| 0.0).unwrap();
        assert_eq!(continuous_part_estimate(&zero).unwrap(), 0.0);
    }

    #[test]
    fn continuous_part_matches_integration() {
        let func = Functional::new(FunctionalKind::ContinuousPart, cdh(), 100, table3_f).unwrap();
        let estimate = continuous_part_estimate(&func).unwrap();
        let sigma = func.measure().continuous.clone().unwrap();
        let oracle = adaptive_integral(
            |x| sigma.eval(x) * table3_f(x * x),
            0.0,
            f64::INFINITY,
            1e-12,
        )
        .unwrap();
        assert!(
            (estimate - oracle).abs() <= 1e-6 * oracle.abs(),
            "{estimate} vs {oracle}"
        );
    }

    #[test]
    fn unit_mass_of_cdh() {
        let m = cdh().measure().unwrap();
        let sigma = m.continuous.clone().unwrap();
        let integral =
            adaptive_integral(|x| sigma.eval(x), 0.0, f64::INFINITY, DEFAULT_TOLERANCE).unwrap();
        let masses = discrete_sum(&m, |_| 1.0);
        assert!(
            (integral - (1.0 - masses)).abs() < 1e-9,
            "{integral} {masses}"
        );
    }

    fn legendre(n: usize) -> FamilySpec {
        let off = (1..n)
            .map(|k| {
                let k = k as f64;
                k / (4.0 * k * k - 1.0).sqrt()
            })
            .collect();
        FamilySpec::Custom(CustomFamily {
            diagonal: vec![0.0; n],
            off_diagonal: off,
            measure: MeasureSpec {
                continuous: Some(ContinuousDensity::new(-1.0, 1.0, Arc::new(|_| 0.5))),
                discrete: None,
                argument: Argument::Linear,
            },
        })
    }

    #[test]
    fn plain_integral_linear() {
        let func =
            Functional::new(FunctionalKind::PlainIntegral, legendre(12), 12, f64::cos).unwrap();
        let got = approximate(&func).unwrap();
        assert!((got - 2.0 * 1f64.sin()).abs() < 1e-14, "{got}");
    }

    #[test]
    fn plain_integral_squared() {
        // μ > 0: purely continuous, recurrence variable t = x²
        let family = FamilySpec::ContinuousDualHahn {
            mu: 1.5,
            alpha: 1.0,
            beta: 2.0,
        };
        let sigma = family.measure().unwrap().continuous.unwrap();
        // ∫ f dt with f = ρ(t) t is the mean a₀ of the measure
        let f = move |t: f64| sigma.eval(t.sqrt()) / (2.0 * t.sqrt()) * t;
        let func = Functional::new(FunctionalKind::PlainIntegral, family.clone(), 8, f).unwrap();
        let a0 = family.recurrence().unwrap().a(0).unwrap();
        let got = approximate(&func).unwrap();
        assert!((got - a0).abs() < 1e-12 * a0.abs(), "{got} vs {a0}");

        let weighted =
            Functional::new(FunctionalKind::WeightedIntegral, family, 3, |_| 1.0).unwrap();
        assert!((approximate(&weighted).unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn matrix_element_examples() {
        let charlier = FamilySpec::Charlier { mu: 2.0 };
        for n in 0..4 {
            for m in 0..4 {
                let want = if n == m { 1.0 } else { 0.0 };
                assert!(
                    (matrix_element(&charlier, 6, |_| 1.0, n, m).unwrap() - want).abs() < 1e-13
                );
            }
        }
        let j = JacobiMatrix::build(&charlier.recurrence().unwrap(), 6).unwrap();
        assert!((matrix_element(&charlier, 6, |x| x, 2, 3).unwrap() - j.get(2, 3)).abs() < 1e-13);
        assert!((matrix_element(&charlier, 3, |x| x * x, 0, 0).unwrap() - 6.0).abs() < 1e-13);
        assert!(matches!(
            matrix_element(&charlier, 3, |x| x, 3, 0),
            Err(Error::IndexRange { .. })
        ));
    }

    #[test]
    fn relative_error_examples() {
        assert_eq!(relative_error(2.0, 2.0).unwrap(), 0.0);
        assert_eq!(relative_error(1.0, 0.0).unwrap(), 1.0);
        assert_eq!(relative_error(3.0, 1.0).unwrap(), 0.5);
        assert_eq!(relative_error(1.0, -1.0), Err(Error::DegenerateDenominator));
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(oracle_table1(3.0), 20.085536923187668);
        assert_eq!(oracle_table1(1.0), std::f64::consts::E);
        assert!((oracle_table1(1e-300) - 1.0).abs() < 1e-15);

        assert_eq!(oracle_table2(3.0, 100).unwrap(), 0.5);
        let r = 2.5f64;
        let want = 1.0 / gamma(r).unwrap() - r * r / gamma(r + 2.0).unwrap();
        assert!((oracle_table2(r, 0).unwrap() - want).abs() < 1e-15);
        // brute-force summation
        let brute: f64 = (0..=100)
            .map(|k| {
                let k = k as f64;
                ((k + 1.0).ln() + (k + 1.0) * 3f64.ln() - ln_gamma(k + 5.0).unwrap()).exp()
            })
            .sum();
        assert!((brute - oracle_table2(3.0, 100).unwrap()).abs() < 1e-14 * brute);
        assert!(oracle_table2(0.0, 3).is_err());

        assert!((oracle_table3(&cdh(), |_| 1.0, 50).unwrap() - 1.0).abs() < 1e-13);
        assert!((oracle_table3(&cdh(), |x| x, 50).unwrap() + 11.25).abs() < 1e-11);
    }

    #[test]
    fn integrator_examples() {
        let third = adaptive_integral(|x| x * x, 0.0, 1.0, DEFAULT_TOLERANCE).unwrap();
        assert!((third - 1.0 / 3.0).abs() < 1e-12);
        let one = adaptive_integral(|x| (-x).exp(), 0.0, f64::INFINITY, DEFAULT_TOLERANCE).unwrap();
        assert!((one - 1.0).abs() < 1e-9);
        assert!(matches!(
            adaptive_integral_with_limit(
                |x: f64| x.sin() / x.abs().sqrt().max(1e-300),
                0.0,
                1.0,
                1e-15,
                10
            ),
            Err(Error::SubdivisionLimit { .. })
        ));
    }
}
