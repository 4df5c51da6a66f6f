//! Special functions over `Complex64`.
//!
//! | function | definition |
//! |---|---|
//! | [`pochhammer`] | `(a)_n = a(a+1)...(a+n-1)` |
//! | [`q_pochhammer`] | `(a;q)_n = (1-a)(1-aq)...(1-aq^{n-1})` |
//! | [`q_pochhammer_inf`] | `(a;q)_∞`, truncated once `|aq^k|` drops below `rel_eps` |
//! | [`gamma`], [`ln_gamma`] | Lanczos (g = 7) with reflection for `Re z < 1/2` |
//! | [`q_gamma`] | `(q;q)_∞ / (q^z;q)_∞ (1-q)^{1-z}` |
//! | [`hypergeometric_f`] | terminating `rFs`, exactly `n_terms + 1` terms |
//! | [`basic_hypergeometric_phi`] | terminating `rφs` |
//!
//! Sums use Neumaier compensation and add terms in ascending order.

use core::f64::consts::PI;

use crate::dd::{Cdd, Dd};
use alloc::vec::Vec;

use crate::{Error, Result, C64};

const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesTolerance {
    pub rel_eps: f64,
    pub max_terms: usize,
}

impl Default for SeriesTolerance {
    fn default() -> Self {
        Self { rel_eps: 1e-15, max_terms: 10_000 }
    }
}

/// Neumaier-compensated complex accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: C64,
    comp: C64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: C64) {
        self.sum.re = neumaier(self.sum.re, x.re, &mut self.comp.re);
        self.sum.im = neumaier(self.sum.im, x.im, &mut self.comp.im);
    }

    pub fn value(&self) -> C64 {
        self.sum + self.comp
    }
}

fn neumaier(s: f64, x: f64, c: &mut f64) -> f64 {
    let t = s + x;
    if libm::fabs(s) >= libm::fabs(x) {
        *c += (s - t) + x;
    } else {
        *c += (x - t) + s;
    }
    t
}

pub(crate) fn check_q(q: f64) -> Result<()> {
    if q > 0.0 && q < 1.0 {
        Ok(())
    } else {
        Err(Error::QDomain(q))
    }
}

pub fn pochhammer(a: C64, n: usize) -> C64 {
    (0..n).fold(C64::new(1.0, 0.0), |acc, k| acc * (a + k as f64))
}

pub fn q_pochhammer(a: C64, q: f64, n: usize) -> Result<C64> {
    check_q(q)?;
    let mut acc = C64::new(1.0, 0.0);
    let mut aqk = a;
    for _ in 0..n {
        acc *= 1.0 - aqk;
        aqk *= q;
    }
    Ok(acc)
}

pub fn q_pochhammer_inf(a: C64, q: f64, tol: SeriesTolerance) -> Result<C64> {
    check_q(q)?;
    let mut acc = C64::new(1.0, 0.0);
    let mut aqk = a;
    for _ in 0..tol.max_terms {
        if aqk.norm() < tol.rel_eps {
            return Ok(acc);
        }
        acc *= 1.0 - aqk;
        aqk *= q;
    }
    Err(Error::NonConvergence(tol.max_terms))
}

/// Product of several infinite q-products.
pub fn q_pochhammer_inf_many(a: &[C64], q: f64, tol: SeriesTolerance) -> Result<C64> {
    a.iter().try_fold(C64::new(1.0, 0.0), |acc, &x| Ok(acc * q_pochhammer_inf(x, q, tol)?))
}

pub fn q_pochhammer_many(a: &[C64], q: f64, n: usize) -> Result<C64> {
    a.iter().try_fold(C64::new(1.0, 0.0), |acc, &x| Ok(acc * q_pochhammer(x, q, n)?))
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn is_pole(z: C64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == libm::round(z.re)
}

/// A logarithm of `Γ(z)`; not necessarily the principal branch.
pub fn ln_gamma(z: C64) -> Result<C64> {
    if is_pole(z) {
        return Err(Error::GammaPole { re: z.re, im: z.im });
    }
    if z.re < 0.5 {
        return Ok(C64::new(libm::log(PI), 0.0) - ln_sin_pi(z) - ln_gamma_right(1.0 - z));
    }
    Ok(ln_gamma_right(z))
}

fn ln_gamma_right(z: C64) -> C64 {
    let z = z - 1.0;
    let mut x = C64::new(LANCZOS[0], 0.0);
    for (i, &p) in LANCZOS.iter().enumerate().skip(1) {
        x += p / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * libm::log(2.0 * PI) + (z + 0.5) * t.ln() - t + x.ln()
}

/// `ln sin(πz)`, stable for large `|Im z|`.
fn ln_sin_pi(z: C64) -> C64 {
    let w = PI * z;
    if w.im > 15.0 {
        // sin w = e^{-iw} (e^{2iw} - 1) / (2i)
        -I * w + ((2.0 * I * w).exp() - 1.0).ln() - (2.0 * I).ln()
    } else if w.im < -15.0 {
        I * w + (1.0 - (-2.0 * I * w).exp()).ln() - (2.0 * I).ln()
    } else {
        w.sin().ln()
    }
}

pub fn gamma(z: C64) -> Result<C64> {
    Ok(ln_gamma(z)?.exp())
}

/// `ln |Γ(z)|`.
pub fn ln_abs_gamma(z: C64) -> Result<f64> {
    Ok(ln_gamma(z)?.re)
}

pub fn q_gamma(z: C64, q: f64, tol: SeriesTolerance) -> Result<C64> {
    check_q(q)?;
    // (q;q)_∞ / (q^z;q)_∞ as one product, so that neither factor underflows
    let qz = (z * libm::log(q)).exp();
    let mut acc = C64::new(1.0, 0.0);
    let mut qk = 1.0;
    for _ in 0..tol.max_terms {
        if qk * q.max(qz.norm()) < tol.rel_eps {
            return Ok(acc * ((1.0 - z) * libm::log(1.0 - q)).exp());
        }
        let den = 1.0 - qz * qk;
        if den.norm() == 0.0 {
            return Err(Error::GammaPole { re: z.re, im: z.im });
        }
        acc *= (1.0 - q * qk) / den;
        qk *= q;
    }
    Err(Error::NonConvergence(tol.max_terms))
}

const POLE_EPS: f64 = 1e-13;

/// Terminating `rFs(num; den; z)`: the sum of terms `0..=n_terms`, stopping
/// early when a numerator parameter hits zero. Terms are accumulated in
/// double-double precision.
pub fn hypergeometric_f(num: &[C64], den: &[C64], z: C64, n_terms: usize) -> Result<C64> {
    let num: Vec<Cdd> = num.iter().map(|&a| Cdd::from(a)).collect();
    let den: Vec<Cdd> = den.iter().map(|&a| Cdd::from(a)).collect();
    hypergeometric_f_dd(&num, &den, Cdd::from(z), n_terms).map(|s| s.value)
}

/// A terminating sum with the total magnitude of its terms, which bounds
/// the cancellation the double-double accumulation has to absorb.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct DdSum {
    pub value: C64,
    pub magnitude: f64,
}

pub(crate) fn hypergeometric_f_dd(num: &[Cdd], den: &[Cdd], z: Cdd, n_terms: usize) -> Result<DdSum> {
    let mut term = Cdd::ONE;
    let mut sum = Cdd::ONE;
    let mut magnitude = 1.0;
    for k in 0..n_terms {
        let kf = Cdd::real(Dd::from(k as f64));
        let top = num.iter().fold(Cdd::ONE, |acc, &a| acc * (a + kf));
        if top.is_zero() {
            break;
        }
        if den.iter().any(|&b| (b + kf).norm() < POLE_EPS) {
            return Err(Error::DenominatorPole(k + 1));
        }
        let bottom = den.iter().fold(Cdd::ONE, |acc, &b| acc * (b + kf));
        term = term * top * z / (bottom * (kf + Cdd::ONE));
        sum = sum + term;
        magnitude += term.norm();
    }
    Ok(DdSum { value: sum.to_c64(), magnitude })
}

/// Terminating `rφs(num; den; q; z)` including the factor
/// `((-1)^k q^{k(k-1)/2})^{1+s-r}`, accumulated in double-double precision.
pub fn basic_hypergeometric_phi(num: &[C64], den: &[C64], q: f64, z: C64, n_terms: usize) -> Result<C64> {
    check_q(q)?;
    let num: Vec<Cdd> = num.iter().map(|&a| Cdd::from(a)).collect();
    let den: Vec<Cdd> = den.iter().map(|&a| Cdd::from(a)).collect();
    basic_hypergeometric_phi_dd(&num, &den, Dd::from(q), Cdd::from(z), n_terms).map(|s| s.value)
}

pub(crate) fn basic_hypergeometric_phi_dd(num: &[Cdd], den: &[Cdd], q: Dd, z: Cdd, n_terms: usize) -> Result<DdSum> {
    let power = 1 + den.len() as i32 - num.len() as i32;
    let mut term = Cdd::ONE;
    let mut sum = Cdd::ONE;
    let mut magnitude = 1.0;
    let mut qk = Dd::ONE;
    for k in 0..n_terms {
        let one_minus = |a: Cdd| Cdd::ONE - a.scale(qk);
        let top = num.iter().fold(Cdd::ONE, |acc, &a| acc * one_minus(a));
        if top.is_zero() {
            break;
        }
        if den.iter().any(|&b| one_minus(b).norm() < POLE_EPS) {
            return Err(Error::DenominatorPole(k + 1));
        }
        let bottom = den.iter().fold(Cdd::ONE, |acc, &b| acc * one_minus(b));
        let sign = (-qk).powi(power);
        let next = qk * q;
        term = term * top * z.scale(sign) / bottom.scale(Dd::ONE - next);
        sum = sum + term;
        magnitude += term.norm();
        qk = next;
    }
    Ok(DdSum { value: sum.to_c64(), magnitude })
}

/// Convergent non-terminating `rFs`; stops once two successive terms fall
/// below `rel_eps` of the running sum.
pub fn hypergeometric_f_series(num: &[C64], den: &[C64], z: C64, tol: SeriesTolerance) -> Result<C64> {
    let mut sum = CompensatedSum::new();
    let mut term = C64::new(1.0, 0.0);
    sum.add(term);
    let mut small = 0;
    for k in 0..tol.max_terms {
        let kf = k as f64;
        let top = num.iter().fold(C64::new(1.0, 0.0), |acc, &a| acc * (a + kf));
        if top == C64::new(0.0, 0.0) {
            return Ok(sum.value());
        }
        if den.iter().any(|&b| (b + kf).norm() < POLE_EPS) {
            return Err(Error::DenominatorPole(k + 1));
        }
        let bottom = den.iter().fold(C64::new(1.0, 0.0), |acc, &b| acc * (b + kf));
        term *= top / bottom * z / (kf + 1.0);
        sum.add(term);
        small = if term.norm() <= tol.rel_eps * sum.value().norm() { small + 1 } else { 0 };
        if small == 2 {
            return Ok(sum.value());
        }
    }
    Err(Error::NonConvergence(tol.max_terms))
}

/// Convergent non-terminating `rφs`.
pub fn basic_hypergeometric_phi_series(num: &[C64], den: &[C64], q: f64, z: C64, tol: SeriesTolerance) -> Result<C64> {
    check_q(q)?;
    let power = 1 + den.len() as i32 - num.len() as i32;
    let mut sum = CompensatedSum::new();
    let mut term = C64::new(1.0, 0.0);
    sum.add(term);
    let mut qk = 1.0;
    let mut small = 0;
    for k in 0..tol.max_terms {
        let top = num.iter().fold(C64::new(1.0, 0.0), |acc, &a| acc * (1.0 - a * qk));
        if top == C64::new(0.0, 0.0) {
            return Ok(sum.value());
        }
        if den.iter().any(|&b| (1.0 - b * qk).norm() < POLE_EPS) {
            return Err(Error::DenominatorPole(k + 1));
        }
        let bottom = den.iter().fold(C64::new(1.0, 0.0), |acc, &b| acc * (1.0 - b * qk));
        let sign = libm::pow(-qk, power as f64);
        term *= top / bottom * sign * z / (1.0 - qk * q);
        sum.add(term);
        qk *= q;
        small = if term.norm() <= tol.rel_eps * sum.value().norm() { small + 1 } else { 0 };
        if small == 2 {
            return Ok(sum.value());
        }
    }
    Err(Error::NonConvergence(tol.max_terms))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn pochhammer_values() {
        assert_eq!(pochhammer(c(3.0), 2), c(12.0));
        assert_eq!(pochhammer(c(0.5), 3), c(1.875));
        assert_eq!(pochhammer(c(7.3), 0), c(1.0));
        assert_eq!(pochhammer(c(-2.0), 3), c(0.0));
    }

    #[test]
    fn q_pochhammer_values() {
        assert!(close(q_pochhammer(c(0.5), 0.5, 2).unwrap(), c(0.375), 1e-15));
        assert!(close(q_pochhammer(c(2.0), 0.5, 1).unwrap(), c(-1.0), 1e-15));
        assert_eq!(q_pochhammer(c(0.5), 1.5, 2), Err(Error::QDomain(1.5)));
        assert_eq!(q_pochhammer(c(0.5), 0.0, 2), Err(Error::QDomain(0.0)));
    }

    #[test]
    fn infinite_products() {
        let t = SeriesTolerance::default();
        let v = q_pochhammer_inf(c(0.5), 0.5, t).unwrap();
        assert!((v.re - 0.288_788_095_1).abs() < 1e-10);
        let v = q_pochhammer_inf(c(-0.5), 0.5, t).unwrap();
        assert!((v.re - 2.384_231_029_0).abs() < 1e-10);
        let tight = SeriesTolerance { rel_eps: 1e-15, max_terms: 10 };
        assert_eq!(q_pochhammer_inf(c(0.5), 0.99, tight), Err(Error::NonConvergence(10)));
    }

    #[test]
    fn gamma_values() {
        // |Γ(1+i)|² = π / sinh π
        let g = gamma(C64::new(1.0, 1.0)).unwrap();
        assert!((g.norm() - libm::sqrt(PI / libm::sinh(PI))).abs() < 1e-14);
        assert!((g.norm() - 0.521_564_046_9).abs() < 1e-10);
        assert!(close(gamma(c(5.0)).unwrap(), c(24.0), 1e-13));
        assert!(close(gamma(c(0.5)).unwrap(), c(PI.sqrt()), 1e-13));
        assert!(close(gamma(c(-0.5)).unwrap(), c(-2.0 * PI.sqrt()), 1e-13));
        assert!(matches!(gamma(c(-3.0)), Err(Error::GammaPole { .. })));
        assert!(matches!(gamma(c(0.0)), Err(Error::GammaPole { .. })));
    }

    #[test]
    fn gamma_modulus_on_imaginary_axis() {
        // |Γ(iy)|² = π / (y sinh πy)
        for &y in &[0.3, 2.0, 10.0, 40.0] {
            let lhs = 2.0 * ln_abs_gamma(C64::new(0.0, y)).unwrap();
            let rhs = libm::log(PI / (y * libm::sinh(PI * y)));
            assert!((lhs - rhs).abs() < 1e-12 * (1.0 + rhs.abs()), "y={y}");
        }
    }

    #[test]
    fn q_gamma_values() {
        let t = SeriesTolerance::default();
        assert!(close(q_gamma(c(2.0), 0.5, t).unwrap(), c(1.0), 1e-14));
        let wide = SeriesTolerance { rel_eps: 1e-15, max_terms: 100_000 };
        let g = q_gamma(c(3.0), 0.999, wide).unwrap();
        assert!((g.re - 2.0).abs() < 1e-2);
        // Γ_q(n+1) = [n]_q!
        let g = q_gamma(c(4.0), 0.5, t).unwrap();
        assert!(close(g, c(1.0 * 1.5 * 1.75), 1e-13));
        assert!(matches!(q_gamma(c(-1.0), 0.5, t), Err(Error::GammaPole { .. })));
    }

    #[test]
    fn terminating_sums() {
        let v = hypergeometric_f(&[c(-2.0), c(5.0), c(1.0)], &[c(2.0), c(3.0)], c(1.0), 2).unwrap();
        assert!(close(v, c(1.0 / 6.0), 1e-15));
        // only the requested terms are summed
        let v = hypergeometric_f(&[c(1.0)], &[], c(0.5), 3).unwrap();
        assert!(close(v, c(1.0 + 0.5 + 0.25 + 0.125), 1e-15));
        let e = hypergeometric_f(&[c(-3.0)], &[c(-1.0)], c(1.0), 3);
        assert_eq!(e, Err(Error::DenominatorPole(2)));
        let e = basic_hypergeometric_phi(&[C64::new(0.25, 0.0)], &[c(4.0)], 0.5, c(1.0), 3);
        assert_eq!(e, Err(Error::DenominatorPole(3)));
    }

    #[test]
    fn q_binomial_theorem() {
        // 1φ0(q^{-n};;q;z) = (q^{-n}z;q)_n
        let q = 0.6;
        let z = C64::new(0.3, 0.2);
        for n in 0..6 {
            let a = c(libm::pow(q, -(n as f64)));
            let lhs = basic_hypergeometric_phi(&[a], &[], q, z, n).unwrap();
            let rhs = q_pochhammer(a * z, q, n).unwrap();
            assert!(close(lhs, rhs, 1e-12), "n={n}");
        }
    }

    #[test]
    fn chu_vandermonde() {
        // 2F1(-n, b; c; 1) = (c-b)_n / (c)_n
        let b = C64::new(0.7, 0.4);
        let cc = C64::new(2.3, -0.1);
        for n in 0..8 {
            let lhs = hypergeometric_f(&[c(-(n as f64)), b], &[cc], c(1.0), n).unwrap();
            let rhs = pochhammer(cc - b, n) / pochhammer(cc, n);
            assert!(close(lhs, rhs, 1e-13), "n={n}");
        }
    }

    #[test]
    fn convergent_series() {
        let t = SeriesTolerance::default();
        let z = C64::new(0.3, -0.7);
        let e = hypergeometric_f_series(&[], &[], z, t).unwrap();
        assert!(close(e, z.exp(), 1e-14));
        // q-binomial: 1φ0(a;;q;z) = (az;q)_∞ / (z;q)_∞
        let (a, q) = (C64::new(0.4, 0.1), 0.5);
        let lhs = basic_hypergeometric_phi_series(&[a], &[], q, z * 0.5, t).unwrap();
        let rhs = q_pochhammer_inf(a * z * 0.5, q, t).unwrap() / q_pochhammer_inf(z * 0.5, q, t).unwrap();
        assert!(close(lhs, rhs, 1e-13));
        let tight = SeriesTolerance { rel_eps: 1e-15, max_terms: 5 };
        assert_eq!(hypergeometric_f_series(&[], &[], z, tight), Err(Error::NonConvergence(5)));
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::new();
        s.add(c(1.0));
        for _ in 0..10 {
            s.add(c(1e-17));
        }
        s.add(c(-1.0));
        assert!((s.value().re - 1e-16).abs() < 1e-30);
    }
}
