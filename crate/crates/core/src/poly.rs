//! Points in the natural coordinate and dense polynomials in `η`.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};

use crate::{Error, Result, C64};

/// Highest degree handled by coefficient vectors and terminating series.
pub const DEGREE_CAP: usize = 30;

/// A point in the natural coordinate of a family: the complex `x` itself for
/// `η = x` and `η = x²`, or `z = e^{ix}` for `η = cos x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point(pub C64);

/// Dense polynomial `Σ c_k η^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct EtaPolynomial {
    coeffs: Vec<C64>,
}

impl EtaPolynomial {
    pub fn new(coeffs: Vec<C64>) -> Result<Self> {
        let p = Self { coeffs };
        if p.degree() > DEGREE_CAP {
            return Err(Error::DegreeCap(p.degree()));
        }
        Ok(p)
    }

    pub fn constant(c: C64) -> Self {
        Self { coeffs: vec![c] }
    }

    /// `η^n`.
    pub fn monomial(n: usize) -> Result<Self> {
        let mut c = vec![C64::new(0.0, 0.0); n + 1];
        c[n] = C64::new(1.0, 0.0);
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| *c != C64::new(0.0, 0.0)).unwrap_or(0)
    }

    /// Horner evaluation.
    pub fn eval(&self, eta: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * eta + c)
    }

    /// `η · self`.
    pub fn times_eta(&self) -> Result<Self> {
        let mut c = Vec::with_capacity(self.coeffs.len() + 1);
        c.push(C64::new(0.0, 0.0));
        c.extend_from_slice(&self.coeffs);
        Self::new(c)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|&c| c * s).collect() }
    }
}

impl Add for &EtaPolynomial {
    type Output = EtaPolynomial;
    fn add(self, rhs: Self) -> EtaPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let get = |v: &[C64], k: usize| v.get(k).copied().unwrap_or_default();
        EtaPolynomial { coeffs: (0..n).map(|k| get(&self.coeffs, k) + get(&rhs.coeffs, k)).collect() }
    }
}

impl Sub for &EtaPolynomial {
    type Output = EtaPolynomial;
    fn sub(self, rhs: Self) -> EtaPolynomial {
        self + &rhs.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul<C64> for &EtaPolynomial {
    type Output = EtaPolynomial;
    fn mul(self, rhs: C64) -> EtaPolynomial {
        self.scale(rhs)
    }
}

/// Coefficients of the polynomial of degree `< nodes.len()` through
/// `(nodes[k], values[k])`, by the Björck-Pereyra algorithm.
pub fn interpolate(nodes: &[C64], values: &[C64]) -> Vec<C64> {
    let n = nodes.len();
    let mut a: Vec<C64> = values.to_vec();
    for k in 0..n {
        for j in (k + 1..n).rev() {
            a[j] = (a[j] - a[j - 1]) / (nodes[j] - nodes[j - k - 1]);
        }
    }
    for k in (0..n).rev() {
        for j in k..n.saturating_sub(1) {
            let t = a[j + 1] * nodes[k];
            a[j] -= t;
        }
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn horner_and_arithmetic() {
        let p = EtaPolynomial::new(vec![c(1.0), c(-2.0), c(3.0)]).unwrap();
        assert_eq!(p.eval(c(2.0)), c(9.0));
        assert_eq!(p.degree(), 2);
        let q = p.times_eta().unwrap();
        assert_eq!(q.eval(c(2.0)), c(18.0));
        assert_eq!((&q - &p).eval(c(2.0)), c(9.0));
        assert_eq!(EtaPolynomial::monomial(3).unwrap().eval(c(-2.0)), c(-8.0));
    }

    #[test]
    fn degree_cap() {
        assert!(EtaPolynomial::monomial(30).is_ok());
        assert_eq!(EtaPolynomial::monomial(31), Err(Error::DegreeCap(31)));
    }

    #[test]
    fn interpolation_recovers_coefficients() {
        let coeffs = [c(0.5), C64::new(-1.0, 2.0), c(0.25), c(3.0)];
        let p = EtaPolynomial::new(coeffs.to_vec()).unwrap();
        let nodes: Vec<C64> = (0..4).map(|k| c(-1.0 + 0.6 * k as f64)).collect();
        let values: Vec<C64> = nodes.iter().map(|&x| p.eval(x)).collect();
        let got = interpolate(&nodes, &values);
        for (g, w) in got.iter().zip(coeffs.iter()) {
            assert!((g - w).norm() < 1e-13);
        }
    }
}
