//! Real special functions used by the closed-form classical solutions and the
//! eigenstate constructors.

use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};

/// Truncation control for power series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    pub max_terms: usize,
    pub rel_tol: f64,
}

impl SeriesControl {
    pub fn new(max_terms: usize, rel_tol: f64) -> Result<Self> {
        if max_terms == 0 {
            return Err(invalid("max_terms must be at least 1"));
        }
        if !(rel_tol > 0.0 && rel_tol < 1.0) {
            return Err(invalid(format!("rel_tol must lie in (0, 1), got {rel_tol}")));
        }
        Ok(Self { max_terms, rel_tol })
    }
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self { max_terms: 500, rel_tol: 1e-12 }
    }
}

/// Physicists' Hermite polynomial `H_n(x)` by the three-term recurrence.
pub fn hermite_poly(n: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * x;
    for k in 1..n {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Normalised Hermite function `(2^n n! √π)^{-1/2} H_n(ξ) e^{-ξ²/2}`.
///
/// Uses the orthonormal recurrence, which stays finite where `H_n` alone
/// would overflow.
pub fn hermite_function(n: usize, xi: f64) -> f64 {
    let mut prev = PI.powf(-0.25) * (-0.5 * xi * xi).exp();
    if n == 0 {
        return prev;
    }
    let mut cur = std::f64::consts::SQRT_2 * xi * prev;
    for k in 1..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * xi * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn is_nonpositive_integer(b: f64) -> bool {
    b <= 0.0 && b == b.round()
}

fn kummer_series(a: f64, b: f64, z: f64, ctl: &SeriesControl) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..ctl.max_terms {
        let kf = k as f64;
        if a + kf == 0.0 {
            return Ok(sum);
        }
        term *= (a + kf) / (b + kf) * z / (kf + 1.0);
        sum += term;
        let shrinking = ((a + kf + 1.0) * z).abs() < ((b + kf + 1.0) * (kf + 2.0)).abs();
        if shrinking && kf + 1.0 >= z.abs() && term.abs() <= 1e-2 * ctl.rel_tol * sum.abs() {
            return Ok(sum);
        }
        if !sum.is_finite() {
            return Err(Error::Overflow { what: "1F1", arg: z });
        }
    }
    Err(Error::NonConvergence { terms: ctl.max_terms })
}

/// Kummer's confluent hypergeometric function `₁F₁(a; b; z)`.
///
/// Negative arguments go through `e^z ₁F₁(b−a; b; −z)` so the summed series
/// has at most a finite number of sign changes.
pub fn kummer_1f1(a: f64, b: f64, z: f64, ctl: &SeriesControl) -> Result<f64> {
    if is_nonpositive_integer(b) {
        return Err(Error::PoleParameter(b));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    if z < 0.0 {
        // polynomial case stays exact without the transformation
        if is_nonpositive_integer(a) {
            return kummer_series(a, b, z, ctl);
        }
        if -z > 700.0 {
            return Err(Error::Overflow { what: "1F1", arg: z });
        }
        Ok(z.exp() * kummer_series(b - a, b, -z, ctl)?)
    } else {
        kummer_series(a, b, z, ctl)
    }
}

/// `d/dz ₁F₁(a; b; z) = (a/b) ₁F₁(a+1; b+1; z)`.
pub fn kummer_1f1_dz(a: f64, b: f64, z: f64, ctl: &SeriesControl) -> Result<f64> {
    if a == 0.0 {
        return Ok(0.0);
    }
    Ok(a / b * kummer_1f1(a + 1.0, b + 1.0, z, ctl)?)
}

/// Imaginary error function `erfi(x) = (2/√π) Σ x^{2k+1} / (k! (2k+1))`.
pub fn erfi(x: f64, ctl: &SeriesControl) -> Result<f64> {
    if x * x > 700.0 {
        return Err(Error::Overflow { what: "erfi", arg: x });
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let x2 = x * x;
    let mut power = x;
    let mut sum = x;
    for k in 1..ctl.max_terms {
        let kf = k as f64;
        power *= x2 / kf;
        let term = power / (2.0 * kf + 1.0);
        sum += term;
        if kf >= x2 && term.abs() <= 1e-2 * ctl.rel_tol * sum.abs() {
            return Ok(2.0 / PI.sqrt() * sum);
        }
    }
    Err(Error::NonConvergence { terms: ctl.max_terms })
}

/// Integer-order parabolic cylinder function
/// `D_n(z) = 2^{-n/2} e^{-z²/4} H_n(z/√2)`.
pub fn parabolic_cylinder_int(n: usize, z: f64) -> f64 {
    2f64.powf(-(n as f64) / 2.0) * (-0.25 * z * z).exp() * hermite_poly(n, z / std::f64::consts::SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::integrate;
    use proptest::prelude::*;

    /// Direct, untransformed summation with a fixed number of terms.
    fn direct_series(a: f64, b: f64, z: f64, terms: usize) -> f64 {
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 0..terms {
            let kf = k as f64;
            term *= (a + kf) / (b + kf) * z / (kf + 1.0);
            sum += term;
        }
        sum
    }

    #[test]
    fn hermite_examples() {
        assert_eq!(hermite_poly(0, 1.7), 1.0);
        assert_eq!(hermite_poly(1, 0.5), 1.0);
        assert_eq!(hermite_poly(3, 2.0), 40.0);
        assert_eq!(hermite_poly(2, 0.0), -2.0);
    }

    #[test]
    fn hermite_recurrence_consistency() {
        for n in 1..20 {
            for i in 0..41 {
                let x = -4.0 + 0.2 * i as f64;
                let lhs = hermite_poly(n + 1, x);
                let rhs = 2.0 * x * hermite_poly(n, x) - 2.0 * n as f64 * hermite_poly(n - 1, x);
                let scale = lhs.abs().max(2.0 * x.abs() * hermite_poly(n, x).abs()).max(1.0);
                assert!((lhs - rhs).abs() <= 1e-10 * scale, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn hermite_function_matches_polynomial_form() {
        for n in 0..12 {
            let norm = (2f64.powi(n as i32) * (1..=n).product::<usize>() as f64 * PI.sqrt()).sqrt();
            for &xi in &[-3.1, -0.4, 0.0, 1.3, 2.7] {
                let expect = hermite_poly(n, xi) * (-0.5 * xi * xi).exp() / norm;
                assert!((hermite_function(n, xi) - expect).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn kummer_examples() {
        let ctl = SeriesControl::default();
        assert_eq!(kummer_1f1(0.3, 0.5, 0.0, &ctl).unwrap(), 1.0);
        assert!((kummer_1f1(1.0, 1.0, 0.7, &ctl).unwrap() - 0.7f64.exp()).abs() < 1e-14);
        // oracle: direct summation of 200 terms; √π erf(1)/2 frozen from it
        let oracle = direct_series(0.5, 1.5, -1.0, 200);
        assert!((oracle - 0.746_824_132_812_427_1).abs() < 1e-15);
        let v = kummer_1f1(0.5, 1.5, -1.0, &ctl).unwrap();
        assert!((v - oracle).abs() < 1e-13);
    }

    #[test]
    fn kummer_pole_and_budget() {
        let ctl = SeriesControl::default();
        assert_eq!(kummer_1f1(1.0, -2.0, 0.3, &ctl), Err(Error::PoleParameter(-2.0)));
        assert!(matches!(kummer_1f1(1.0, 0.0, 0.3, &ctl), Err(Error::PoleParameter(_))));
        let tight = SeriesControl::new(3, 1e-12).unwrap();
        assert!(matches!(kummer_1f1(1.5, 2.5, 9.0, &tight), Err(Error::NonConvergence { .. })));
        assert!(SeriesControl::new(0, 1e-3).is_err());
        assert!(SeriesControl::new(10, 1.5).is_err());
    }

    #[test]
    fn kummer_polynomial_case_is_exact() {
        // 1F1(-2; b; z) = 1 - 2z/b + z²/(b(b+1))
        let ctl = SeriesControl::default();
        let (b, z) = (1.5, -3.0);
        let exact = 1.0 - 2.0 * z / b + z * z / (b * (b + 1.0));
        assert!((kummer_1f1(-2.0, b, z, &ctl).unwrap() - exact).abs() < 1e-13);
    }

    #[test]
    fn kummer_large_negative_argument_stays_accurate() {
        // 1F1(1/2; 3/2; -x²) = √π erf(x) / (2x) → √π/(2x) for large x
        let ctl = SeriesControl::default();
        let x: f64 = 8.0;
        let v = kummer_1f1(0.5, 1.5, -x * x, &ctl).unwrap();
        assert!((v - PI.sqrt() / (2.0 * x)).abs() < 1e-13);
    }

    #[test]
    fn kummer_derivative_matches_finite_difference() {
        let ctl = SeriesControl::default();
        let (a, b, z) = (2.3, 0.7, -1.9);
        let h = 1e-4;
        let fd = (-kummer_1f1(a, b, z + 2.0 * h, &ctl).unwrap() + 8.0 * kummer_1f1(a, b, z + h, &ctl).unwrap()
            - 8.0 * kummer_1f1(a, b, z - h, &ctl).unwrap()
            + kummer_1f1(a, b, z - 2.0 * h, &ctl).unwrap())
            / (12.0 * h);
        assert!((kummer_1f1_dz(a, b, z, &ctl).unwrap() - fd).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn kummer_transform_identity(a in -3.0f64..3.0, b in 0.5f64..4.0, z in -5.0f64..5.0) {
            let ctl = SeriesControl::default();
            let lhs = kummer_1f1(a, b, z, &ctl).unwrap();
            let rhs = z.exp() * kummer_1f1(b - a, b, -z, &ctl).unwrap();
            let scale = lhs.abs().max(1.0);
            prop_assert!((lhs - rhs).abs() <= 1e-10 * scale, "lhs={lhs} rhs={rhs}");
        }

        #[test]
        fn erfi_is_odd(x in -4.0f64..4.0) {
            let ctl = SeriesControl::default();
            prop_assert_eq!(erfi(-x, &ctl).unwrap(), -erfi(x, &ctl).unwrap());
        }
    }

    #[test]
    fn erfi_examples() {
        let ctl = SeriesControl::default();
        assert_eq!(erfi(0.0, &ctl).unwrap(), 0.0);
        let quad = integrate(|t| Ok((t * t).exp()), 0.0, 1.0, 1e-15, 1e-15).unwrap() * 2.0 / PI.sqrt();
        assert!((quad - 1.650_425_758_797_542_8).abs() < 1e-14);
        assert!((erfi(1.0, &ctl).unwrap() - quad).abs() < 1e-13);
        assert!(matches!(erfi(30.0, &ctl), Err(Error::Overflow { .. })));
    }

    #[test]
    fn erfi_derivative_by_finite_differences() {
        let ctl = SeriesControl::default();
        for &x in &[-1.5, -0.3, 0.0, 0.8, 2.1] {
            let h = 1e-3;
            let fd = (-erfi(x + 2.0 * h, &ctl).unwrap() + 8.0 * erfi(x + h, &ctl).unwrap()
                - 8.0 * erfi(x - h, &ctl).unwrap()
                + erfi(x - 2.0 * h, &ctl).unwrap())
                / (12.0 * h);
            let exact = 2.0 / PI.sqrt() * (x * x).exp();
            assert!((fd - exact).abs() < 1e-6 * exact.max(1.0));
        }
    }

    #[test]
    fn parabolic_cylinder_examples() {
        for &z in &[-2.0, 0.0, 0.5, 3.0] {
            assert!((parabolic_cylinder_int(0, z) - (-z * z / 4.0).exp()).abs() < 1e-15);
        }
        assert!((parabolic_cylinder_int(1, 2.0) - 2.0 * (-1.0f64).exp()).abs() < 1e-15);
        assert!((parabolic_cylinder_int(1, 2.0) - 0.735_758_882_342_884_6).abs() < 1e-12);
        assert!((parabolic_cylinder_int(2, 0.0) + 1.0).abs() < 1e-15);
    }
}
