//! Difference operators acting on functions analytic in the natural
//! coordinate.
//!
//! With `e^{γp} f(x) = f(x - iγ)`, on the polynomial level
//!
//! ```text
//! H̃ = V (e^{γp} - 1) + V* (e^{-γp} - 1)
//! F = i φ(x)⁻¹ (e^{γp/2} - e^{-γp/2})
//! B = -i (V e^{γp/2} - V* e^{-γp/2}) φ(x)
//! ```
//!
//! `V*` is the function with conjugated coefficients, `V*(x) = V(x*)*`. A
//! starred shifted value `V(x + a)*` is the conjugate of `V(x + a)` at real
//! `x`, continued analytically, which is `V*(x + a*)`.
//!
//! Every builder takes a function of [`Point`] and returns another, so
//! operators compose by nesting; evaluation happens at the shifted complex
//! points.

use crate::family::{EtaKind, FamilyId, System};
use crate::poly::{EtaPolynomial, Point};
use crate::{Error, Result, C64};

const I: C64 = C64::new(0.0, 1.0);
const ZERO: C64 = C64::new(0.0, 0.0);

/// `P(η(x))` as a function of the point.
pub fn poly_fn<'a>(s: &'a System, p: &'a EtaPolynomial) -> impl Fn(Point) -> C64 + 'a {
    move |pt| p.eval(s.eta(pt))
}

/// `P_n(η(x))` evaluated through the three-term recurrence.
pub fn level_fn(s: &System, n: usize) -> impl Fn(Point) -> C64 + '_ {
    let r = s.recurrence(n);
    move |pt| r.value(n, s.eta(pt))
}

pub fn hamiltonian<'a, F: Fn(Point) -> C64 + 'a>(s: &'a System, f: F) -> impl Fn(Point) -> C64 + 'a {
    move |pt| {
        let f0 = f(pt);
        s.potential(pt) * (f(s.shift(pt, -1.0)) - f0) + s.potential_conj(pt) * (f(s.shift(pt, 1.0)) - f0)
    }
}

pub fn times_eta<'a, F: Fn(Point) -> C64 + 'a>(s: &'a System, f: F) -> impl Fn(Point) -> C64 + 'a {
    move |pt| s.eta(pt) * f(pt)
}

/// `[H̃, η] f`.
pub fn commutator_h_eta<'a, F: Fn(Point) -> C64 + 'a>(s: &'a System, f: F) -> impl Fn(Point) -> C64 + 'a {
    move |pt| {
        let e = s.eta(pt);
        let (m, p) = (s.shift(pt, -1.0), s.shift(pt, 1.0));
        s.potential(pt) * (s.eta(m) - e) * f(m) + s.potential_conj(pt) * (s.eta(p) - e) * f(p)
    }
}

/// `[η, H̃] f`.
pub fn commutator_eta_h<'a, F: Fn(Point) -> C64 + 'a>(s: &'a System, f: F) -> impl Fn(Point) -> C64 + 'a {
    let c = commutator_h_eta(s, f);
    move |pt| -c(pt)
}

/// Forward shift `F(λ)`.
pub fn forward_shift<'a, F: Fn(Point) -> C64 + 'a>(s: &'a System, f: F) -> impl Fn(Point) -> C64 + 'a {
    move |pt| I / s.aux_phi(pt) * (f(s.shift(pt, -0.5)) - f(s.shift(pt, 0.5)))
}

/// Backward shift `B(λ)`.
pub fn backward_shift<'a, F: Fn(Point) -> C64 + 'a>(s: &'a System, f: F) -> impl Fn(Point) -> C64 + 'a {
    move |pt| {
        let (m, p) = (s.shift(pt, -0.5), s.shift(pt, 0.5));
        -I * (s.potential(pt) * s.aux_phi(m) * f(m) - s.potential_conj(pt) * s.aux_phi(p) * f(p))
    }
}

/// Scalars of the ladder operators at level `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderContext {
    pub e_n: f64,
    pub e_prev: f64,
    pub e_next: f64,
    pub rm1: f64,
}

impl LadderContext {
    pub fn new(s: &System, n: usize) -> Self {
        let e_n = s.energy(n);
        Self { e_n, e_prev: s.energy_ext(n as i64 - 1), e_next: s.energy(n + 1), rm1: s.closure_polys().rm1(e_n) }
    }

    /// `α_+(E_n) = E_{n+1} - E_n`.
    pub fn alpha_plus(&self) -> f64 {
        self.e_next - self.e_n
    }

    /// `α_-(E_n) = E_{n-1} - E_n`.
    pub fn alpha_minus(&self) -> f64 {
        self.e_prev - self.e_n
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// `a^{(±)}` acting on an eigenfunction of level `n`:
/// `±(E_{n+1} - E_{n-1})⁻¹ ([H̃,η] + (E_n - E_{n∓1}) η + R_{-1}(E_n)/(E_{n±1} - E_n))`.
/// The lowering operator annihilates level 0.
pub fn ladder<'a, F: Fn(Point) -> C64 + 'a>(s: &'a System, sign: Sign, n: usize, f: F) -> impl Fn(Point) -> C64 + 'a {
    let ctx = LadderContext::new(s, n);
    let (pm, e_opp, e_same) = match sign {
        Sign::Plus => (1.0, ctx.e_prev, ctx.e_next),
        Sign::Minus => (-1.0, ctx.e_next, ctx.e_prev),
    };
    let zero = sign == Sign::Minus && n == 0;
    let scale = pm / (ctx.e_next - ctx.e_prev);
    let k_eta = ctx.e_n - e_opp;
    let k_const = ctx.rm1 / (e_same - ctx.e_n);
    move |pt| {
        if zero {
            return ZERO;
        }
        let (m, p) = (s.shift(pt, -1.0), s.shift(pt, 1.0));
        let e = s.eta(pt);
        let fm = f(m);
        let fp = f(p);
        let f0 = f(pt);
        let comm = s.potential(pt) * (s.eta(m) - e) * fm + s.potential_conj(pt) * (s.eta(p) - e) * fp;
        scale * (comm + k_eta * e * f0 + k_const * f0)
    }
}

/// λ-shift operator `X` on the polynomial level.
///
/// Meixner-Pollaczek at `φ = π/2`: `X̃ = ¼(e^{γp/2} + e^{-γp/2})`.
/// Continuous dual Hahn: `X̃ = -iφ⁻¹ e^{γp/2} V e^{γp} + c₊ φ⁻¹ e^{γp/2}
/// + iφ⁻¹ e^{-γp/2} V* e^{-γp} + c₋ φ⁻¹ e^{-γp/2}` with
/// `c₊ = x - iV(x - i/2)* - iK/(8(1+x²))`, `c₋ = x + iV(x - i/2) + iK/(8(1+x²))`,
/// `K = Π(2a_j - 1)`.
/// Continuous q-Hermite (no λ): `X̃ = ½q^½ (e^{γp/2}/(1-z²) + e^{-γp/2}/(1-z⁻²)) (H̃+1)⁻¹`
/// acting on a level-`n` eigenfunction.
pub fn lambda_shift<'a, F: Fn(Point) -> C64 + 'a>(s: &'a System, n: usize, f: F) -> Result<impl Fn(Point) -> C64 + 'a> {
    let kind = lambda_shift_kind(s)?;
    let k = dual_hahn_k(s);
    let inv_h1 = 1.0 / (s.energy(n) + 1.0);
    Ok(move |pt: Point| match kind {
        ShiftKind::Meixner => 0.25 * (f(s.shift(pt, -0.5)) + f(s.shift(pt, 0.5))),
        ShiftKind::DualHahn => {
            let (m, p) = (s.shift(pt, -0.5), s.shift(pt, 0.5));
            let phi = s.aux_phi(pt);
            let x = pt.0;
            let tail = I * k / (8.0 * (1.0 + x * x));
            let c_plus = x - I * s.potential_conj(p) - tail;
            let c_minus = x + I * s.potential(m) + tail;
            let t_plus = -I * s.potential(m) * f(s.shift(pt, -1.5));
            let t_minus = I * s.potential_conj(p) * f(s.shift(pt, 1.5));
            (t_plus + c_plus * f(m) + t_minus + c_minus * f(p)) / phi
        }
        ShiftKind::QHermite => {
            let z = pt.0;
            let q = s.q();
            0.5 * libm::sqrt(q)
                * inv_h1
                * (f(s.shift(pt, -0.5)) / (1.0 - z * z) + f(s.shift(pt, 0.5)) / (1.0 - 1.0 / (z * z)))
        }
    })
}

/// Adjoint λ-shift `X†` on the polynomial level, mapping level-`n`
/// functions of `λ + δ` to functions of `λ`; `s` is the system at `λ`.
pub fn lambda_shift_adjoint<'a, F: Fn(Point) -> C64 + 'a>(s: &'a System, f: F) -> Result<impl Fn(Point) -> C64 + 'a> {
    let kind = lambda_shift_kind(s)?;
    if kind == ShiftKind::QHermite {
        return Err(Error::Unsupported("X† for continuous q-Hermite".into()));
    }
    let k = dual_hahn_k(s);
    Ok(move |pt: Point| match kind {
        ShiftKind::Meixner => {
            0.25 * (s.potential(pt) * f(s.shift(pt, -0.5)) + s.potential_conj(pt) * f(s.shift(pt, 0.5)))
        }
        _ => {
            // X† = i T₊ S₊† + S₊† c̄₊ - i T₋ S₋† + S₋† c̄₋ with T₊ = V e^{γp},
            // S₊† = V e^{γp/2} φ, and c̄ the conjugate functions of c₊, c₋
            let conj_fn = |g: &dyn Fn(Point) -> C64, w: Point| g(s.conj_point(w)).conj();
            let tail = |w: Point| I * k / (8.0 * (1.0 + w.0 * w.0));
            let c_plus = |w: Point| w.0 - I * s.potential_conj(s.shift(w, 0.5)) - tail(w);
            let c_minus = |w: Point| w.0 + I * s.potential(s.shift(w, -0.5)) + tail(w);
            let s_plus = |g: &dyn Fn(Point) -> C64, w: Point| {
                let m = s.shift(w, -0.5);
                s.potential(w) * s.aux_phi(m) * g(m)
            };
            let s_minus = |g: &dyn Fn(Point) -> C64, w: Point| {
                let p = s.shift(w, 0.5);
                s.potential_conj(w) * s.aux_phi(p) * g(p)
            };
            let ff = |w: Point| f(w);
            let cp_f = |w: Point| conj_fn(&c_plus, w) * f(w);
            let cm_f = |w: Point| conj_fn(&c_minus, w) * f(w);
            let m1 = s.shift(pt, -1.0);
            let p1 = s.shift(pt, 1.0);
            I * s.potential(pt) * s_plus(&ff, m1) + s_plus(&cp_f, pt) - I * s.potential_conj(pt) * s_minus(&ff, p1)
                + s_minus(&cm_f, pt)
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ShiftKind {
    Meixner,
    DualHahn,
    QHermite,
}

fn lambda_shift_kind(s: &System) -> Result<ShiftKind> {
    match s.id() {
        FamilyId::MeixnerPollaczek => {
            let phi = s.params().phi.unwrap_or(0.0);
            if (phi - core::f64::consts::FRAC_PI_2).abs() > 1e-12 {
                return Err(Error::Unsupported("explicit X for Meixner-Pollaczek needs φ = π/2".into()));
            }
            Ok(ShiftKind::Meixner)
        }
        FamilyId::ContinuousDualHahn => Ok(ShiftKind::DualHahn),
        FamilyId::ContinuousQHermite => Ok(ShiftKind::QHermite),
        id => Err(Error::Unsupported(alloc::format!("no explicit λ-shift operator for {id}"))),
    }
}

fn dual_hahn_k(s: &System) -> C64 {
    if s.id() != FamilyId::ContinuousDualHahn {
        return ZERO;
    }
    s.potential_factors().iter().fold(C64::new(1.0, 0.0), |acc, &a| acc * (2.0 * a - 1.0))
}

/// `η(x - iγ) - η(x)` and `η(x + iγ) - η(x)`.
pub fn eta_steps(s: &System, pt: Point) -> (C64, C64) {
    let e = s.eta(pt);
    (s.eta(s.shift(pt, -1.0)) - e, s.eta(s.shift(pt, 1.0)) - e)
}

/// `R_1^dual`, `R_0^dual` at a point; both are polynomials in `η`.
pub fn dual_closure_polys(s: &System, pt: Point) -> (C64, C64) {
    let (dm, dp) = eta_steps(s, pt);
    (dm + dp, -dm * dp)
}

/// Both sides of `[η,[η,H̃]] f = H̃ R₀ᵈ f + [η,H̃] R₁ᵈ f + R₋₁ᵈ f`, where
/// the `Rᵈ` multiply before the operators act.
pub fn dual_closure_sides<F: Fn(Point) -> C64>(s: &System, f: F, pt: Point) -> (C64, C64) {
    let f = &f;
    let inner = |w: Point| commutator_eta_h(s, f)(w);
    let lhs = s.eta(pt) * inner(pt) - commutator_eta_h(s, |w: Point| s.eta(w) * f(w))(pt);
    let r0f = |w: Point| dual_closure_polys(s, w).1 * f(w);
    let r1f = |w: Point| dual_closure_polys(s, w).0 * f(w);
    let vv = s.potential(pt) + s.potential_conj(pt);
    let rhs = hamiltonian(s, r0f)(pt) + commutator_eta_h(s, r1f)(pt) + vv * dual_closure_polys(s, pt).1 * f(pt);
    (lhs, rhs)
}

/// Both sides of `[H̃,[H̃,η]] P_n = η R₀(E_n) P_n + R₁(E_n) [H̃,η] P_n + R₋₁(E_n) P_n`.
pub fn closure_sides<F: Fn(Point) -> C64>(s: &System, n: usize, f: F, pt: Point) -> (C64, C64) {
    let f = &f;
    let e = s.energy(n);
    let r = s.closure_polys();
    let comm = |w: Point| commutator_h_eta(s, f)(w);
    let lhs = hamiltonian(s, comm)(pt) - commutator_h_eta(s, hamiltonian(s, f))(pt);
    let rhs = s.eta(pt) * r.r0(e) * f(pt) + r.r1(e) * comm(pt) + r.rm1(e) * f(pt);
    (lhs, rhs)
}

/// The six pointwise conditions equivalent to the closure relation, as
/// `(lhs, rhs)` pairs: the two second-difference conditions, the two
/// conditions linear in `V`, the quadratic one, and the three-point form of
/// the first.
pub fn closure_conditions(s: &System, pt: Point) -> [(C64, C64); 6] {
    let r = s.closure_polys();
    let e = |k: f64| s.eta(s.shift(pt, k));
    let v = |k: f64| s.potential(s.shift(pt, k));
    let vc = |k: f64| s.potential_conj(s.shift(pt, k));
    let (e0, em, ep) = (e(0.0), e(-1.0), e(1.0));
    let (dm, dp) = (em - e0, ep - e0);
    let quad = r.r0[2] * e0 + r.rm1[2];
    let lin = r.r0[1] * e0 + r.rm1[1];
    let c1 = (e(-2.0) - 2.0 * em + e0, quad + r.r1[1] * dm);
    let c1p = (e(2.0) - 2.0 * ep + e0, quad + r.r1[1] * dp);
    let c2 = {
        let a = v(-1.0) + vc(-1.0);
        let b = v(0.0) + vc(0.0);
        (dm * (a - b), -quad * (a + b) - r.r1[1] * dm * a + lin + r.r1[0] * dm)
    };
    let c2p = {
        let a = vc(1.0) + v(1.0);
        let b = vc(0.0) + v(0.0);
        (dp * (a - b), -quad * (a + b) - r.r1[1] * dp * a + lin + r.r1[0] * dp)
    };
    let c3 = {
        let (v0, vc0) = (v(0.0), vc(0.0));
        let x1 = v0 * vc(-1.0);
        let x2 = vc0 * v(1.0);
        let lhs = 2.0 * (e0 - em) * x1 + 2.0 * (e0 - ep) * x2;
        let rhs = quad * (x1 + x2 + (v0 + vc0) * (v0 + vc0)) + r.r1[1] * dm * x1 + r.r1[1] * dp * x2 - lin * (v0 + vc0)
            + r.r0[0] * e0
            + r.rm1[0];
        (lhs, rhs)
    };
    let c4 = (em - (2.0 + r.r1[1]) * e0 + ep, C64::new(r.rm1[2], 0.0));
    [c1, c1p, c2, c2p, c3, c4]
}

/// Both sides of the two shape-invariance relations at a point:
/// `V(x-iγ/2;λ) V(x+iγ/2;λ)* = κ² V(x;λ+δ) V(x+iγ;λ+δ)*` and
/// `V(x+iγ/2;λ) + V(x+iγ/2;λ)* = κ(V(x;λ+δ) + V(x;λ+δ)*) - E_1(λ)`.
pub fn shape_invariance_sides(s: &System, next: &System, pt: Point) -> [(C64, C64); 2] {
    let k = s.kappa();
    let (m, p) = (s.shift(pt, -0.5), s.shift(pt, 0.5));
    let prod =
        (s.potential(m) * s.potential_conj(m), k * k * next.potential(pt) * next.potential_conj(s.shift(pt, -1.0)));
    let sum = (s.potential(p) + s.potential_conj(m), k * (next.potential(pt) + next.potential_conj(pt)) - s.energy(1));
    [prod, sum]
}

/// `H̃ P` at a real point.
pub fn apply_h_at(s: &System, p: &EtaPolynomial, x: f64) -> C64 {
    hamiltonian(s, poly_fn(s, p))(s.point(x))
}

/// Coefficients of `H̃ η^n`, recovered by interpolation in `η` on `n + 3`
/// nodes; the entries above `n` vanish for a lower-triangular `H̃`.
pub fn h_on_monomial(s: &System, n: usize) -> Result<alloc::vec::Vec<C64>> {
    let m = EtaPolynomial::monomial(n)?;
    let count = n + 3;
    let xs: alloc::vec::Vec<f64> = (0..count)
        .map(|k| {
            let t = core::f64::consts::PI * (k as f64 + 0.5) / count as f64;
            let c = libm::cos(t);
            match s.eta_kind() {
                EtaKind::Linear => 1.5 * c,
                EtaKind::Quadratic => libm::sqrt(1.2 + c),
                EtaKind::Cosine => libm::acos(0.9 * c),
            }
        })
        .collect();
    let h = hamiltonian(s, poly_fn(s, &m));
    let nodes: alloc::vec::Vec<C64> = xs.iter().map(|&x| s.eta(s.point(x))).collect();
    let vals: alloc::vec::Vec<C64> = xs.iter().map(|&x| h(s.point(x))).collect();
    Ok(crate::poly::interpolate(&nodes, &vals))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::ParamSet;
    use alloc::vec::Vec;

    fn systems() -> Vec<System> {
        crate::family::tests::fixtures()
    }

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn eigen_equation() {
        for s in systems() {
            for n in 0..=10 {
                let p = level_fn(&s, n);
                let h = hamiltonian(&s, &p);
                for x in s.sample_points(12, 3) {
                    let pt = s.point(x);
                    let want = s.energy(n) * p(pt);
                    assert!(close(h(pt), want, 1e-9), "{} n={n} x={x}: {} vs {want}", s.id(), h(pt));
                }
            }
        }
    }

    #[test]
    fn lower_triangular_on_monomials() {
        for s in systems() {
            for n in 0..=6 {
                let c = h_on_monomial(&s, n).unwrap();
                let scale = c.iter().map(|x| x.norm()).fold(1.0, f64::max);
                assert!((c[n] - s.energy(n)).norm() < 1e-8 * scale, "{} n={n}", s.id());
                for (k, ck) in c.iter().enumerate().skip(n + 1) {
                    assert!(ck.norm() < 1e-8 * scale, "{} n={n} k={k}: {ck}", s.id());
                }
            }
        }
    }

    #[test]
    fn closure_conditions_hold() {
        for s in systems() {
            for x in s.sample_points(10, 1) {
                for (k, (l, r)) in closure_conditions(&s, s.point(x)).iter().enumerate() {
                    let scale = 1.0 + l.norm().max(r.norm());
                    assert!((l - r).norm() < 1e-9 * scale, "{} cond {k} x={x}: {l} vs {r}", s.id());
                }
            }
        }
    }

    #[test]
    fn closure_on_eigenfunctions() {
        for s in systems() {
            for n in 0..6 {
                let p = level_fn(&s, n);
                for x in s.sample_points(6, 2) {
                    let (l, r) = closure_sides(&s, n, &p, s.point(x));
                    assert!(close(l, r, 1e-9), "{} n={n} x={x}: {l} vs {r}", s.id());
                }
            }
        }
    }

    #[test]
    fn dual_closure() {
        for s in systems() {
            for n in 0..5 {
                let p = level_fn(&s, n);
                for x in s.sample_points(6, 4) {
                    let (l, r) = dual_closure_sides(&s, &p, s.point(x));
                    assert!(close(l, r, 1e-9), "{} n={n} x={x}: {l} vs {r}", s.id());
                }
            }
        }
    }

    #[test]
    fn shape_invariance() {
        for s in systems() {
            let next = s.shifted(1).unwrap();
            for x in s.sample_points(10, 5) {
                for (l, r) in shape_invariance_sides(&s, &next, s.point(x)) {
                    assert!(close(l, r, 1e-10), "{} x={x}: {l} vs {r}", s.id());
                }
            }
        }
    }

    #[test]
    fn shifts_and_factorisation() {
        for s in systems() {
            let next = s.shifted(1).unwrap();
            for n in 0..=6 {
                let c = s.coefficients(n);
                let pn = level_fn(&s, n);
                let pn_next = level_fn(&next, n);
                let f = forward_shift(&s, &pn);
                let b = backward_shift(&s, &pn_next);
                let pn1 = level_fn(&s, n + 1);
                let bf = backward_shift(&s, forward_shift(&s, &pn));
                let fb = forward_shift(&s, backward_shift(&s, &pn_next));
                let e_shift = s.kappa() * next.energy(n) + s.energy(1);
                for x in s.sample_points(6, 6) {
                    let pt = s.point(x);
                    if n > 0 {
                        let want = c.f * level_fn(&next, n - 1)(pt);
                        assert!(close(f(pt), want, 1e-9), "F {} n={n}", s.id());
                    }
                    assert!(close(b(pt), c.b * pn1(pt), 1e-9), "B {} n={n}", s.id());
                    assert!(close(bf(pt), s.energy(n) * pn(pt), 1e-9), "BF {} n={n}", s.id());
                    assert!(close(fb(pt), e_shift * pn_next(pt), 1e-9), "FB {} n={n}", s.id());
                }
            }
        }
    }

    #[test]
    fn ladder_actions() {
        for s in systems() {
            for n in 0..6 {
                let c = s.coefficients(n);
                let pn = level_fn(&s, n);
                let up = ladder(&s, Sign::Plus, n, &pn);
                let down = ladder(&s, Sign::Minus, n, &pn);
                for x in s.sample_points(5, 8) {
                    let pt = s.point(x);
                    let want_up = c.big_a * level_fn(&s, n + 1)(pt);
                    assert!(close(up(pt), want_up, 1e-9), "a+ {} n={n}: {} vs {want_up}", s.id(), up(pt));
                    let want_down = if n == 0 { ZERO } else { c.big_c * level_fn(&s, n - 1)(pt) };
                    assert!(close(down(pt), want_down, 1e-9), "a- {} n={n}: {} vs {want_down}", s.id(), down(pt));
                }
            }
        }
    }

    #[test]
    fn q_hermite_raising_ground() {
        let s = System::new(FamilyId::ContinuousQHermite, ParamSet::new().with_q(0.5)).unwrap();
        assert!((s.coefficients(0).big_a - 0.5).abs() < 1e-15);
        let up = ladder(&s, Sign::Plus, 0, |_: Point| C64::new(1.0, 0.0));
        for x in [0.3, 1.2, 2.9] {
            let pt = s.point(x);
            assert!(close(up(pt), s.eta(pt), 1e-12));
        }
    }

    #[test]
    fn meixner_pollaczek_lambda_shift() {
        let s = System::new(
            FamilyId::MeixnerPollaczek,
            ParamSet::new().with_real_a(&[0.8]).with_phi(core::f64::consts::FRAC_PI_2),
        )
        .unwrap();
        let next = s.shifted(1).unwrap();
        for n in 0..=6 {
            let x = lambda_shift(&s, n, level_fn(&s, n)).unwrap();
            let xd = lambda_shift_adjoint(&s, level_fn(&next, n)).unwrap();
            for t in s.sample_points(6, 9) {
                let pt = s.point(t);
                assert!(close(x(pt), 0.5 * level_fn(&next, n)(pt), 1e-9), "X n={n}");
                let want = 0.25 * (n as f64 + 1.6) * level_fn(&s, n)(pt);
                assert!(close(xd(pt), want, 1e-9), "X† n={n}: {} vs {want}", xd(pt));
            }
        }
        let other = System::new(FamilyId::MeixnerPollaczek, ParamSet::new().with_real_a(&[0.8]).with_phi(1.0)).unwrap();
        assert!(lambda_shift(&other, 0, level_fn(&other, 0)).is_err());
    }

    #[test]
    fn dual_hahn_lambda_shift() {
        for a in [[c(0.7), C64::new(0.5, 0.3), C64::new(0.5, -0.3)], [c(0.4), c(1.3), c(0.9)]] {
            let s = System::new(FamilyId::ContinuousDualHahn, ParamSet::new().with_a(&a)).unwrap();
            let next = s.shifted(1).unwrap();
            for n in 0..=6 {
                let x = lambda_shift(&s, n, level_fn(&s, n)).unwrap();
                let xd = lambda_shift_adjoint(&s, level_fn(&next, n)).unwrap();
                let nf = n as f64;
                let k = (nf + a[0] + a[1]) * (nf + a[0] + a[2]) * (nf + a[1] + a[2]);
                for t in s.sample_points(6, 10) {
                    let pt = s.point(t);
                    let want = level_fn(&next, n)(pt);
                    assert!(close(x(pt), want, 1e-9), "X n={n}: {} vs {want}", x(pt));
                    let want = k * level_fn(&s, n)(pt);
                    assert!(close(xd(pt), want, 1e-9), "X† n={n}: {} vs {want}", xd(pt));
                }
            }
        }
    }

    #[test]
    fn q_hermite_lambda_shift() {
        let s = System::new(FamilyId::ContinuousQHermite, ParamSet::new().with_q(0.6)).unwrap();
        let q: f64 = 0.6;
        for n in 0..=6 {
            let x = lambda_shift(&s, n, level_fn(&s, n)).unwrap();
            for t in s.sample_points(6, 11) {
                let pt = s.point(t);
                let want = 0.5 * q.powf((n as f64 + 1.0) / 2.0) * level_fn(&s, n)(pt);
                assert!(close(x(pt), want, 1e-10), "n={n}: {} vs {want}", x(pt));
            }
        }
    }

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }
}
