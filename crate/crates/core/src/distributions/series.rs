use std::ops::{Add, Mul, Sub};

use super::CompensatedSum;
use crate::error::ensure;
use crate::Result;

/// Number of coefficients kept when no order is given.
pub const DEFAULT_ORDER: usize = 128;

/// Taylor coefficients `c_0, …, c_{K-1}` of a function about zero.
///
/// Binary operations truncate to the shorter operand, so products and
/// quotients are exact in every retained coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries {
    coeffs: Vec<f64>,
}

impl PowerSeries {
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "a power series needs at least one coefficient");
        PowerSeries { coeffs }
    }

    /// A polynomial padded with zeros to `order` coefficients.
    pub fn polynomial(coeffs: &[f64], order: usize) -> Self {
        assert!(order > 0 && coeffs.len() <= order, "polynomial longer than the truncation order");
        let mut c = coeffs.to_vec();
        c.resize(order, 0.0);
        PowerSeries { coeffs: c }
    }

    pub fn constant(c: f64, order: usize) -> Self {
        Self::polynomial(&[c], order)
    }

    /// `exp(c0 + c1 ρ) = e^{c0} Σ c1ⁿ ρⁿ / n!`.
    pub fn exp_affine(c0: f64, c1: f64, order: usize) -> Self {
        assert!(order > 0);
        let mut coeffs = Vec::with_capacity(order);
        let mut term = c0.exp();
        for n in 0..order {
            coeffs.push(term);
            term *= c1 / (n + 1) as f64;
        }
        PowerSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, n: usize) -> f64 {
        self.coeffs.get(n).copied().unwrap_or(0.0)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Quotient `self / divisor`, by forward substitution.
    pub fn div(&self, divisor: &PowerSeries) -> Result<PowerSeries> {
        let b0 = divisor.coeffs[0];
        ensure!(
            b0 != 0.0 && b0.is_finite(),
            Singular,
            "power-series divisor has constant term {b0}"
        );
        let k = self.order().min(divisor.order());
        let mut q = Vec::with_capacity(k);
        for n in 0..k {
            let mut acc = CompensatedSum::new();
            acc.add(self.coeffs[n]);
            for i in 1..=n {
                acc.add(-divisor.coeffs[i] * q[n - i]);
            }
            q.push(acc.value() / b0);
        }
        Ok(PowerSeries { coeffs: q })
    }

    fn zip_with(&self, other: &PowerSeries, f: impl Fn(f64, f64) -> f64) -> PowerSeries {
        let k = self.order().min(other.order());
        PowerSeries {
            coeffs: (0..k).map(|i| f(self.coeffs[i], other.coeffs[i])).collect(),
        }
    }
}

impl Add for &PowerSeries {
    type Output = PowerSeries;
    fn add(self, rhs: &PowerSeries) -> PowerSeries {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &PowerSeries {
    type Output = PowerSeries;
    fn sub(self, rhs: &PowerSeries) -> PowerSeries {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul for &PowerSeries {
    type Output = PowerSeries;
    fn mul(self, rhs: &PowerSeries) -> PowerSeries {
        let k = self.order().min(rhs.order());
        let coeffs = (0..k)
            .map(|n| {
                (0..=n)
                    .map(|i| self.coeffs[i] * rhs.coeffs[n - i])
                    .collect::<CompensatedSum>()
                    .value()
            })
            .collect();
        PowerSeries { coeffs }
    }
}

impl Mul<f64> for &PowerSeries {
    type Output = PowerSeries;
    fn mul(self, rhs: f64) -> PowerSeries {
        PowerSeries {
            coeffs: self.coeffs.iter().map(|c| c * rhs).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn geometric_series() {
        let one = PowerSeries::constant(1.0, 16);
        let q = one.div(&PowerSeries::polynomial(&[1.0, -1.0], 16)).unwrap();
        assert!(q.coeffs().iter().all(|&c| c == 1.0));
    }

    #[test]
    fn difference_of_squares() {
        let a = PowerSeries::polynomial(&[1.0, 1.0], 8);
        let b = PowerSeries::polynomial(&[1.0, -1.0], 8);
        let p = &a * &b;
        assert_eq!(p.coeffs(), &[1.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn exp_affine_coefficients() {
        // d^n/dρ^n e^{0.1(1-ρ)} at 0 is e^{0.1}(-0.1)^n.
        let s = PowerSeries::exp_affine(0.1, -0.1, 20);
        let mut factorial = 1.0;
        for n in 0..20 {
            if n > 0 {
                factorial *= n as f64;
            }
            let expected = 0.1f64.exp() * (-0.1f64).powi(n as i32) / factorial;
            assert!((s.coeff(n) - expected).abs() <= 1e-15 * expected.abs());
        }
        assert!((s.eval(0.5) - 0.05f64.exp()).abs() < 1e-15);
    }

    #[test]
    fn zero_constant_divisor_is_singular() {
        let a = PowerSeries::constant(1.0, 4);
        let b = PowerSeries::polynomial(&[0.0, 1.0], 4);
        assert!(matches!(a.div(&b), Err(crate::Error::Singular(_))));
    }

    proptest! {
        #[test]
        fn mul_div_round_trip(
            a in prop::collection::vec(-1.0f64..1.0, 12),
            mut b in prop::collection::vec(-0.3f64..0.3, 12),
            b0 in prop_oneof![0.5f64..2.0, -2.0f64..-0.5],
        ) {
            b[0] = b0;
            let a = PowerSeries::new(a);
            let b = PowerSeries::new(b);
            let back = (&a * &b).div(&b).unwrap();
            for n in 0..12 {
                prop_assert!((back.coeff(n) - a.coeff(n)).abs() < 1e-12, "coefficient {}", n);
            }
        }
    }
}
