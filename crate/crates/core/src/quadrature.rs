//! Inner products with the ground-state weight.
//!
//! `(−∞,∞)` uses the sinh-sinh double-exponential map, `(0,∞)` the exp-sinh
//! map, both with trapezoidal step halving. `(0,π)` uses composite
//! Gauss-Legendre with panel doubling.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use crate::family::{EtaKind, System};
use crate::poly::{EtaPolynomial, Point};
use crate::{operators, Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Rule {
    DoubleExponential,
    GaussLegendreComposite,
}

impl Rule {
    pub fn for_kind(kind: EtaKind) -> Self {
        match kind {
            EtaKind::Cosine => Rule::GaussLegendreComposite,
            _ => Rule::DoubleExponential,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// nodes whose contribution falls below this fraction of the largest one
    /// end the outward walk of the trapezoidal rule
    pub truncation: f64,
    /// step halvings or panel doublings
    pub max_level: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { abs_tol: 1e-10, rel_tol: 1e-12, truncation: 1e-18, max_level: 10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: C64,
    /// difference between the last two refinements
    pub error: f64,
    /// `∫ |f|`
    pub l1: f64,
    pub evaluations: usize,
}

/// `∫ f(x) dx` over the interval of the family.
pub fn integrate<F: Fn(f64) -> C64>(s: &System, f: F, spec: &QuadratureSpec) -> Result<Quadrature> {
    match s.eta_kind() {
        EtaKind::Linear => double_exponential(
            |t| {
                let u = FRAC_PI_2 * libm::sinh(t);
                (libm::sinh(u), FRAC_PI_2 * libm::cosh(t) * libm::cosh(u))
            },
            &f,
            spec,
        ),
        EtaKind::Quadratic => double_exponential(
            |t| {
                let x = libm::exp(FRAC_PI_2 * libm::sinh(t));
                (x, FRAC_PI_2 * libm::cosh(t) * x)
            },
            &f,
            spec,
        ),
        EtaKind::Cosine => gauss_legendre_composite(0.0, PI, &f, spec),
    }
}

/// `(g, f) = ∫ g(x)* f(x) dx`.
pub fn inner_product<F, G>(s: &System, f: F, g: G, spec: &QuadratureSpec) -> Result<C64>
where
    F: Fn(f64) -> C64,
    G: Fn(f64) -> C64,
{
    integrate(s, |x| g(x).conj() * f(x), spec).map(|r| r.value)
}

/// `∫ φ_0(x)² Q(x)* P(x) dx`; the weight is formed from `ln φ_0`.
pub fn weighted_inner_product<P, Q>(s: &System, p: P, q: Q, spec: &QuadratureSpec) -> Result<Quadrature>
where
    P: Fn(Point) -> C64,
    Q: Fn(Point) -> C64,
{
    integrate(
        s,
        |x| {
            let w = libm::exp(2.0 * s.ln_ground_state(x));
            if w == 0.0 {
                return C64::new(0.0, 0.0);
            }
            let pt = s.point(x);
            w * q(pt).conj() * p(pt)
        },
        spec,
    )
}

/// Gram matrix of `φ_0 P_n` for `n ≤ n_max`, against `h_n δ_nm`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OrthoMatrix {
    pub n_max: usize,
    /// row-major `(n_max+1)²` entries
    pub entries: Vec<f64>,
    pub expected_diag: Vec<f64>,
    pub max_diag_rel: f64,
    pub max_offdiag_rel: f64,
    pub max_error_estimate: f64,
}

impl OrthoMatrix {
    pub fn get(&self, n: usize, m: usize) -> f64 {
        self.entries[n * (self.n_max + 1) + m]
    }
}

pub fn orthogonality_matrix(s: &System, n_max: usize, spec: &QuadratureSpec) -> Result<OrthoMatrix> {
    let dim = n_max + 1;
    let rec = s.recurrence(n_max);
    let h0 = s.h0();
    let expected_diag: Vec<f64> = (0..dim).map(|n| h0 / s.coefficients(n).norm_ratio).collect();
    let mut entries = vec![0.0; dim * dim];
    let mut max_err: f64 = 0.0;
    for n in 0..dim {
        for m in 0..=n {
            let r = weighted_inner_product(s, |pt| rec.value(n, s.eta(pt)), |pt| rec.value(m, s.eta(pt)), spec)?;
            entries[n * dim + m] = r.value.re;
            entries[m * dim + n] = r.value.re;
            max_err = max_err.max(r.error / libm::sqrt(expected_diag[n] * expected_diag[m]));
        }
    }
    let mut max_diag_rel: f64 = 0.0;
    let mut max_offdiag_rel: f64 = 0.0;
    for n in 0..dim {
        for m in 0..dim {
            let e = entries[n * dim + m];
            if n == m {
                max_diag_rel = max_diag_rel.max((e / expected_diag[n] - 1.0).abs());
            } else {
                max_offdiag_rel = max_offdiag_rel.max(e.abs() / libm::sqrt(expected_diag[n] * expected_diag[m]));
            }
        }
    }
    Ok(OrthoMatrix { n_max, entries, expected_diag, max_diag_rel, max_offdiag_rel, max_error_estimate: max_err })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hermiticity {
    /// `(g, H f)`
    pub lhs: C64,
    /// `(H g, f)`
    pub rhs: C64,
    pub residual: f64,
}

/// `(g, Hf)` against `(Hg, f)` for `f = φ_0 P`, `g = φ_0 Q`.
pub fn hermiticity_check(
    s: &System,
    p: &EtaPolynomial,
    q: &EtaPolynomial,
    spec: &QuadratureSpec,
) -> Result<Hermiticity> {
    let pf = operators::poly_fn(s, p);
    let qf = operators::poly_fn(s, q);
    let hp = operators::hamiltonian(s, operators::poly_fn(s, p));
    let hq = operators::hamiltonian(s, operators::poly_fn(s, q));
    let lhs = weighted_inner_product(s, &hp, &qf, spec)?.value;
    let rhs = weighted_inner_product(s, &pf, &hq, spec)?.value;
    Ok(Hermiticity { lhs, rhs, residual: (lhs - rhs).norm() / (1.0 + lhs.norm()) })
}

fn accept(err: f64, l1: f64, spec: &QuadratureSpec) -> bool {
    err <= spec.abs_tol.max(spec.rel_tol * l1)
}

/// Trapezoidal rule in `t` for `∫ f(x(t)) x'(t) dt`.
fn double_exponential<M, F>(map: M, f: &F, spec: &QuadratureSpec) -> Result<Quadrature>
where
    M: Fn(f64) -> (f64, f64),
    F: Fn(f64) -> C64,
{
    const T_MAX: f64 = 4.5;
    let mut evals = 0usize;
    let mut max_term: f64 = 0.0;
    let term = |t: f64, evals: &mut usize, max_term: &mut f64| -> Option<(C64, f64)> {
        let (x, jac) = map(t);
        if !x.is_finite() || !jac.is_finite() {
            return None;
        }
        *evals += 1;
        let v = f(x) * jac;
        if !(v.re.is_finite() && v.im.is_finite()) {
            return None;
        }
        let a = v.norm();
        *max_term = max_term.max(a);
        Some((v, a))
    };

    // walk outwards from t0 in steps of `step` until contributions die off
    let walk = |t0: f64, step: f64, evals: &mut usize, max_term: &mut f64| -> (C64, f64) {
        let mut sum = C64::new(0.0, 0.0);
        let mut abs = 0.0;
        let mut small = 0;
        let mut t = t0;
        while t.abs() <= T_MAX {
            match term(t, evals, max_term) {
                Some((v, a)) => {
                    sum += v;
                    abs += a;
                    if a <= spec.truncation * *max_term {
                        small += 1;
                        if small >= 3 {
                            break;
                        }
                    } else {
                        small = 0;
                    }
                }
                None => break,
            }
            t += step;
        }
        (sum, abs)
    };

    let mut h = 0.5;
    let (c, ca) = match term(0.0, &mut evals, &mut max_term) {
        Some(v) => v,
        None => (C64::new(0.0, 0.0), 0.0),
    };
    let (r, ra) = walk(h, h, &mut evals, &mut max_term);
    let (l, la) = walk(-h, -h, &mut evals, &mut max_term);
    let mut sum = c + r + l;
    let mut abs = ca + ra + la;
    let mut value = sum * h;
    let mut error = f64::INFINITY;
    for level in 1..=spec.max_level {
        h *= 0.5;
        let (r, ra) = walk(h, 2.0 * h, &mut evals, &mut max_term);
        let (l, la) = walk(-h, -2.0 * h, &mut evals, &mut max_term);
        sum += r + l;
        abs += ra + la;
        let next = sum * h;
        error = (next - value).norm();
        value = next;
        if level >= 3 && accept(error, abs * h, spec) {
            return Ok(Quadrature { value, error, l1: abs * h, evaluations: evals });
        }
    }
    Err(Error::Quadrature { estimate: error })
}

const GL_POINTS: usize = 16;

/// Nodes and weights of the `GL_POINTS`-point Gauss-Legendre rule on
/// `[-1, 1]`.
fn gauss_legendre_rule() -> ([f64; GL_POINTS], [f64; GL_POINTS]) {
    let n = GL_POINTS;
    let mut nodes = [0.0; GL_POINTS];
    let mut weights = [0.0; GL_POINTS];
    for i in 0..n {
        let mut x = libm::cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn gauss_legendre_composite<F: Fn(f64) -> C64>(a: f64, b: f64, f: &F, spec: &QuadratureSpec) -> Result<Quadrature> {
    let (nodes, weights) = gauss_legendre_rule();
    let mut evals = 0usize;
    let panel_sum = |panels: usize, evals: &mut usize| -> (C64, f64) {
        let w = (b - a) / panels as f64;
        let mut sum = C64::new(0.0, 0.0);
        let mut abs = 0.0;
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * w;
            for k in 0..GL_POINTS {
                let v = f(mid + 0.5 * w * nodes[k]) * (0.5 * w * weights[k]);
                sum += v;
                abs += v.norm();
            }
            *evals += GL_POINTS;
        }
        (sum, abs)
    };
    let mut panels = 2;
    let (mut value, _) = panel_sum(panels, &mut evals);
    let mut error = f64::INFINITY;
    for _ in 0..spec.max_level {
        panels *= 2;
        let (next, abs) = panel_sum(panels, &mut evals);
        error = (next - value).norm();
        value = next;
        if accept(error, abs, spec) {
            return Ok(Quadrature { value, error, l1: abs, evaluations: evals });
        }
    }
    Err(Error::Quadrature { estimate: error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{FamilyId, ParamSet};
    use crate::specfun::{self, SeriesTolerance};

    #[test]
    fn gauss_legendre_exact_on_polynomials() {
        let (x, w) = gauss_legendre_rule();
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        let m30: f64 = x.iter().zip(w.iter()).map(|(x, w)| w * x.powi(30)).sum();
        assert!((m30 - 2.0 / 31.0).abs() < 1e-14);
    }

    #[test]
    fn gaussian_and_exponential_integrals() {
        let spec = QuadratureSpec::default();
        let lin = System::new(FamilyId::MeixnerPollaczek, ParamSet::new().with_real_a(&[1.0]).with_phi(1.0)).unwrap();
        let r = integrate(&lin, |x| C64::new(libm::exp(-x * x), 0.0), &spec).unwrap();
        assert!((r.value.re - libm::sqrt(PI)).abs() < 1e-13);
        let quad = System::new(FamilyId::ContinuousDualHahn, ParamSet::new().with_real_a(&[1.0, 1.0, 1.0])).unwrap();
        let r = integrate(&quad, |x| C64::new(x * libm::exp(-x), 0.0), &spec).unwrap();
        assert!((r.value.re - 1.0).abs() < 1e-13);
        let cos = System::new(FamilyId::ContinuousQHermite, ParamSet::new().with_q(0.5)).unwrap();
        let r = integrate(&cos, |x| C64::new(libm::sin(x), 0.0), &spec).unwrap();
        assert!((r.value.re - 2.0).abs() < 1e-13);
        let zero = integrate(&cos, |_| C64::new(0.0, 0.0), &spec).unwrap();
        assert_eq!(zero.value, C64::new(0.0, 0.0));
    }

    #[test]
    fn q_hermite_ground_norm() {
        let s = System::new(FamilyId::ContinuousQHermite, ParamSet::new().with_q(0.5)).unwrap();
        let one = |_: Point| C64::new(1.0, 0.0);
        let r = weighted_inner_product(&s, one, one, &QuadratureSpec::default()).unwrap();
        let qq = specfun::q_pochhammer_inf(C64::new(0.5, 0.0), 0.5, SeriesTolerance::default()).unwrap();
        let want = 2.0 * PI / qq.re;
        assert!((r.value.re - want).abs() < 1e-10 * want, "{} vs {want}", r.value);
        assert!((want - 21.7568).abs() < 1e-3);
    }

    #[test]
    fn orthogonality_all_families() {
        let spec = QuadratureSpec::default();
        for s in crate::family::tests::fixtures() {
            let m = orthogonality_matrix(&s, 4, &spec).unwrap();
            assert!(m.max_diag_rel < 1e-5, "{} diag {}", s.id(), m.max_diag_rel);
            assert!(m.max_offdiag_rel < 1e-6, "{} off {}", s.id(), m.max_offdiag_rel);
        }
    }

    #[test]
    fn hermiticity_on_monomials() {
        let spec = QuadratureSpec::default();
        for s in crate::family::tests::fixtures() {
            let p = EtaPolynomial::monomial(2).unwrap();
            let q = EtaPolynomial::monomial(3).unwrap();
            let h = hermiticity_check(&s, &p, &q, &spec).unwrap();
            assert!(h.residual < 1e-6, "{} {:?}", s.id(), h);
            let one = EtaPolynomial::monomial(0).unwrap();
            let h = hermiticity_check(&s, &one, &one, &spec).unwrap();
            assert!(h.lhs.norm() < 1e-12 && h.rhs.norm() < 1e-12);
        }
    }
}
