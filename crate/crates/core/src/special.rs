//! Scalar special functions used by the weight functions of the polynomial
//! families: log-gamma on the positive axis, `ln |Γ(a + ix)|²` along vertical
//! lines of the complex plane, and the Pochhammer symbol.
//!
//! Everything downstream composes logarithms and exponentiates once, so most
//! routines here return values in log space.

use std::f64::consts::{LN_2, PI};
use std::ops::{Div, Mul};

use num_complex::Complex64;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;

// Godfrey's coefficients for g = 7, n = 9.
#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_8;

/// Natural logarithm of Γ(x) for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 {
        return Err(Error::Domain {
            function: "ln_gamma",
            argument: x,
            constraint: "x > 0",
        });
    }
    if x == 1.0 || x == 2.0 {
        return Ok(0.0);
    }
    if x < 0.5 {
        // Γ(x) = Γ(x + 1) / x keeps the series in its accurate region.
        return Ok(lanczos_ln_gamma(x + 1.0) - x.ln());
    }
    Ok(lanczos_ln_gamma(x))
}

fn lanczos_ln_gamma(x: f64) -> f64 {
    let z = x - 1.0;
    let mut series = LANCZOS_COEFFS[0];
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        series += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    HALF_LN_TWO_PI + (z + 0.5) * t.ln() - t + series.ln()
}

fn lanczos_ln_gamma_complex(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut series = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        series += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    HALF_LN_TWO_PI + (z + 0.5) * t.ln() - t + series.ln()
}

/// `ln |Γ(a + ix)|²`.
///
/// Uses the reflection formula for `a < 0.5`, where the series is inaccurate.
/// The result depends on `|x|` only, so it is exactly even in `x`.
pub fn ln_abs_gamma_sq(a: f64, x: f64) -> Result<f64> {
    let x = x.abs();
    if a.is_nan() || x.is_nan() {
        return Err(Error::Domain {
            function: "ln_abs_gamma_sq",
            argument: f64::NAN,
            constraint: "finite arguments",
        });
    }
    if x == 0.0 && a <= 0.0 && a.fract() == 0.0 {
        return Err(Error::Pole { re: a, im: 0.0 });
    }
    if x == 0.0 && a > 0.0 {
        return Ok(2.0 * ln_gamma(a)?);
    }
    if a >= 0.5 {
        return Ok(2.0 * lanczos_ln_gamma_complex(Complex64::new(a, x)).re);
    }
    // |Γ(z)|² |Γ(1 - z)|² = π² / |sin πz|²
    let reflected = 2.0 * lanczos_ln_gamma_complex(Complex64::new(1.0 - a, -x)).re;
    Ok(2.0 * PI.ln() - ln_abs_sin_pi_sq(a, x) - reflected)
}

/// `ln |sin(π(a + ix))|² = ln(sin²(πa) + sinh²(πx))` without overflow.
fn ln_abs_sin_pi_sq(a: f64, x: f64) -> f64 {
    let s = sin_pi(a);
    let y = PI * x.abs();
    if y > 20.0 {
        let e = (-2.0 * y).exp();
        let ln_sinh_sq = 2.0 * (y - LN_2 + (-e).ln_1p());
        let ratio = s * s * 4.0 * e / ((1.0 - e) * (1.0 - e));
        ln_sinh_sq + ratio.ln_1p()
    } else {
        let sh = y.sinh();
        (s * s + sh * sh).ln()
    }
}

/// sin(πa) with the argument reduced to [-1, 1] first.
pub(crate) fn sin_pi(a: f64) -> f64 {
    let r = a % 2.0;
    let r = if r > 1.0 {
        r - 2.0
    } else if r < -1.0 {
        r + 2.0
    } else {
        r
    };
    if r == 0.0 || r.abs() == 1.0 {
        return 0.0;
    }
    (PI * r).sin()
}

/// Γ(x) on the real line, via reflection for negative non-integers.
pub fn gamma(x: f64) -> Result<f64> {
    if x > 0.0 && x <= 171.0 && x.fract() == 0.0 {
        return Ok((2..x as u32).fold(1.0, |acc, k| acc * k as f64));
    }
    if x > 0.0 {
        return Ok(ln_gamma(x)?.exp());
    }
    if x.is_nan() || x.fract() == 0.0 {
        return Err(Error::Pole { re: x, im: 0.0 });
    }
    let reflected = ln_gamma(1.0 - x)?.exp();
    Ok(PI / (sin_pi(x) * reflected))
}

/// Rising factorial `(a)ₙ = a (a+1) ⋯ (a+n-1)`, by direct product.
pub fn pochhammer(a: f64, n: usize) -> f64 {
    (0..n).fold(1.0, |acc, j| acc * (a + j as f64))
}

/// A real number stored as `sign × exp(ln_abs)`.
///
/// Products and quotients of many factors (Pochhammer symbols, products of
/// eigenvalue gaps) stay representable long after the plain value would
/// over- or underflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLn {
    pub ln_abs: f64,
    /// -1, 0 or +1.
    pub sign: f64,
}

impl SignedLn {
    pub const ONE: SignedLn = SignedLn {
        ln_abs: 0.0,
        sign: 1.0,
    };

    pub fn from_value(v: f64) -> Self {
        if v == 0.0 {
            SignedLn {
                ln_abs: f64::NEG_INFINITY,
                sign: 0.0,
            }
        } else {
            SignedLn {
                ln_abs: v.abs().ln(),
                sign: v.signum(),
            }
        }
    }

    pub fn from_ln(ln_abs: f64) -> Self {
        SignedLn { ln_abs, sign: 1.0 }
    }

    pub fn value(self) -> f64 {
        if self.sign == 0.0 {
            0.0
        } else {
            self.sign * self.ln_abs.exp()
        }
    }

    pub fn recip(self) -> Self {
        SignedLn {
            ln_abs: -self.ln_abs,
            sign: self.sign,
        }
    }
}

impl Mul for SignedLn {
    type Output = SignedLn;
    fn mul(self, rhs: SignedLn) -> SignedLn {
        if self.sign == 0.0 || rhs.sign == 0.0 {
            return SignedLn::from_value(0.0);
        }
        SignedLn {
            ln_abs: self.ln_abs + rhs.ln_abs,
            sign: self.sign * rhs.sign,
        }
    }
}

impl Div for SignedLn {
    type Output = SignedLn;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: SignedLn) -> SignedLn {
        self * rhs.recip()
    }
}

impl std::iter::Product for SignedLn {
    fn product<I: Iterator<Item = SignedLn>>(iter: I) -> SignedLn {
        iter.fold(SignedLn::ONE, |acc, v| acc * v)
    }
}

/// `(a)ₙ` in signed log form; the sign is tracked factor by factor.
pub fn signed_ln_pochhammer(a: f64, n: usize) -> SignedLn {
    (0..n).map(|j| SignedLn::from_value(a + j as f64)).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Stirling series after shifting the argument above 30; independent of
    /// the Lanczos route.
    fn stirling_ln_gamma(x: f64) -> f64 {
        let mut shift = 0.0;
        let mut y = x;
        while y < 30.0 {
            shift += y.ln();
            y += 1.0;
        }
        let inv = 1.0 / y;
        let inv2 = inv * inv;
        let series = inv
            * (1.0 / 12.0
                - inv2
                    * (1.0 / 360.0
                        - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 / 1188.0))));
        (y - 0.5) * y.ln() - y + HALF_LN_TWO_PI + series - shift
    }

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1.0)
    }

    #[test]
    fn ln_gamma_known_values() {
        assert_eq!(ln_gamma(1.0).unwrap(), 0.0);
        assert!(close(ln_gamma(5.0).unwrap(), 24f64.ln(), 1e-15));
        assert!(close(ln_gamma(0.5).unwrap(), 0.5723649429247001, 1e-15));
        assert!(close(ln_gamma(0.5).unwrap(), PI.sqrt().ln(), 1e-15));
    }

    #[test]
    fn ln_gamma_rejects_nonpositive() {
        assert!(matches!(ln_gamma(0.0), Err(Error::Domain { .. })));
        assert!(matches!(ln_gamma(-2.5), Err(Error::Domain { .. })));
        assert!(ln_gamma(f64::NAN).is_err());
    }

    #[test]
    fn ln_gamma_matches_stirling_oracle() {
        let mut x = 0.5;
        while x < 1.0e6 {
            let got = ln_gamma(x).unwrap();
            let want = stirling_ln_gamma(x);
            // Near the zeros at 1 and 2 the comparison is absolute.
            let scale = want.abs().max(1.0);
            assert!(
                (got - want).abs() <= 1e-13 * scale,
                "x = {x}: {got} vs {want}"
            );
            x *= 1.37;
        }
    }

    #[test]
    fn abs_gamma_sq_identities() {
        assert!(ln_abs_gamma_sq(1.0, 0.0).unwrap().abs() < 1e-15);
        let want = (PI / PI.sinh()).ln();
        assert!(close(ln_abs_gamma_sq(1.0, 1.0).unwrap(), want, 1e-14));
        assert!(close(ln_abs_gamma_sq(0.5, 0.0).unwrap(), PI.ln(), 1e-14));
        // |Γ(1/2 + iy)|² = π / cosh(πy)
        for y in [0.1, 0.7, 2.0, 9.0, 40.0] {
            let want = PI.ln() - (PI * y).cosh().ln();
            assert!(
                close(ln_abs_gamma_sq(0.5, y).unwrap(), want, 1e-13),
                "y = {y}"
            );
        }
        // |Γ(iy)|² = π / (y sinh πy), through the reflection branch
        for y in [0.05f64, 0.3, 1.5, 12.0] {
            let want = PI.ln() - y.ln() - (PI * y).sinh().ln();
            assert!(
                close(ln_abs_gamma_sq(0.0, y).unwrap(), want, 1e-13),
                "y = {y}"
            );
        }
    }

    #[test]
    fn abs_gamma_sq_reflection_matches_real_gamma() {
        // Γ(-3.5) = 16 √π / 105
        let want = 2.0 * (16.0 * PI.sqrt() / 105.0).ln();
        assert!(close(ln_abs_gamma_sq(-3.5, 0.0).unwrap(), want, 1e-14));
        // continuity across the branch switch at a = 0.5
        for x in [0.0, 0.3, 3.0] {
            let lo = ln_abs_gamma_sq(0.5 - 1e-12, x).unwrap();
            let hi = ln_abs_gamma_sq(0.5, x).unwrap();
            assert!((lo - hi).abs() < 1e-10);
        }
    }

    #[test]
    fn abs_gamma_sq_pole() {
        assert!(matches!(ln_abs_gamma_sq(0.0, 0.0), Err(Error::Pole { .. })));
        assert!(matches!(
            ln_abs_gamma_sq(-3.0, 0.0),
            Err(Error::Pole { .. })
        ));
        assert!(ln_abs_gamma_sq(-3.0, 0.25).is_ok());
    }

    #[test]
    fn real_gamma() {
        assert!(close(gamma(5.0).unwrap(), 24.0, 1e-14));
        assert!(close(gamma(-0.5).unwrap(), -2.0 * PI.sqrt(), 1e-14));
        assert!(gamma(-2.0).is_err());
        assert!(gamma(0.0).is_err());
    }

    #[test]
    fn pochhammer_values() {
        assert_eq!(pochhammer(3.0, 4), 360.0);
        assert_eq!(pochhammer(1.7, 0), 1.0);
        assert_eq!(pochhammer(-2.0, 4), 0.0);
        let s = signed_ln_pochhammer(-7.0, 3);
        assert_eq!(s.sign, -1.0);
        assert!(close(s.value(), -210.0, 1e-14));
        assert_eq!(signed_ln_pochhammer(-2.0, 4).value(), 0.0);
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn functional_equation(x in 0.5f64..100.0) {
                let lhs = ln_gamma(x + 1.0).unwrap().exp();
                let rhs = x * ln_gamma(x).unwrap().exp();
                prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs());
            }

            #[test]
            fn abs_gamma_sq_is_even(a in -6.0f64..6.0, x in 0.01f64..50.0) {
                prop_assert_eq!(ln_abs_gamma_sq(a, x).unwrap(), ln_abs_gamma_sq(a, -x).unwrap());
            }

            #[test]
            fn pochhammer_step(a in -10.0f64..10.0, n in 0usize..30) {
                prop_assert_eq!(pochhammer(a, n + 1), pochhammer(a, n) * (a + n as f64));
            }
        }
    }
}
