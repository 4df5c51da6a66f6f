//! Identity checks grouped into suites, each producing [`CheckResult`]s.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::family::{FamilyId, ParamSet, System};
use crate::operators::{self as op, Sign};
use crate::poly::{EtaPolynomial, Point};
use crate::quadrature::{self, QuadratureSpec};
use crate::specfun::{self, SeriesTolerance};
use crate::{Error, Result, C64};
#[allow(unused_imports)]
use num_traits::Float;

const ONE: C64 = C64::new(1.0, 0.0);
const ZERO: C64 = C64::new(0.0, 0.0);

const TOL_POLY: f64 = 1e-9;
const TOL_SYMMETRY: f64 = 1e-10;
const TOL_REFLECTION: f64 = 1e-12;
const TOL_RECURRENCE: f64 = 1e-12;
const TOL_EIGEN: f64 = 1e-9;
const TOL_SHAPE: f64 = 1e-10;
const TOL_SPECTRUM: f64 = 1e-10;
const TOL_CLOSURE: f64 = 1e-9;
const TOL_THREE_POINT: f64 = 1e-12;
const TOL_SHIFT: f64 = 1e-9;
const TOL_LADDER: f64 = 1e-10;
const TOL_COHERENT: f64 = 1e-7;
const TOL_CLOSED_FORM: f64 = 1e-8;
const TOL_ORTHO_DIAG: f64 = 1e-5;
const TOL_ORTHO_OFF: f64 = 1e-6;
const TOL_HERMITICITY: f64 = 1e-6;
const TOL_HERMITICITY_REAL: f64 = 1e-8;
const TOL_NUMBER: f64 = 1e-10;
const TOL_LIMIT: f64 = 1e-2;

/// Coherent-state series are cut at this many terms.
pub const COHERENT_CAP: usize = 60;
const COHERENT_MIN: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Suite {
    Eigen,
    ShapeInvariance,
    Closure,
    DualClosure,
    Shifts,
    Ladder,
    Coherent,
    Orthogonality,
    Hermiticity,
    Limit,
    NumberOperator,
}

impl Suite {
    pub const ALL: [Suite; 11] = [
        Suite::Eigen,
        Suite::ShapeInvariance,
        Suite::Closure,
        Suite::DualClosure,
        Suite::Shifts,
        Suite::Ladder,
        Suite::Coherent,
        Suite::Orthogonality,
        Suite::Hermiticity,
        Suite::Limit,
        Suite::NumberOperator,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Eigen => "eigen",
            Suite::ShapeInvariance => "shape_invariance",
            Suite::Closure => "closure",
            Suite::DualClosure => "dual_closure",
            Suite::Shifts => "shifts",
            Suite::Ladder => "ladder",
            Suite::Coherent => "coherent",
            Suite::Orthogonality => "orthogonality",
            Suite::Hermiticity => "hermiticity",
            Suite::Limit => "limit",
            Suite::NumberOperator => "number_operator",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        let s = s.replace('-', "_");
        Self::ALL.iter().copied().find(|x| x.name() == s)
    }
}

impl core::fmt::Display for Suite {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VerifyConfig {
    pub n_max: usize,
    pub samples: usize,
    pub seed: u64,
    /// replaces every per-check tolerance when set
    pub tol: Option<f64>,
    pub quadrature: QuadratureSpec,
    pub ortho_n_max: usize,
    pub shift_n_max: usize,
    pub lambda_n_max: usize,
    /// coherent-state eigenvalue; per-family default when absent
    pub alpha: Option<C64>,
    /// `L` values of the q → 1 limit, `q = e^{-π/L}`
    pub lengths: Vec<f64>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            n_max: 10,
            samples: 20,
            seed: 0,
            tol: None,
            quadrature: QuadratureSpec::default(),
            ortho_n_max: 6,
            shift_n_max: 8,
            lambda_n_max: 6,
            alpha: None,
            lengths: vec![20.0, 40.0, 80.0],
        }
    }
}

/// Outcome of one identity check. `passed` holds exactly when
/// `max_residual <= tolerance`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CheckResult {
    pub check_id: String,
    pub family: FamilyId,
    pub params: ParamSet,
    pub level_range: (usize, usize),
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub samples_used: usize,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub note: Option<String>,
    /// per-step values for sequence checks
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Vec::is_empty"))]
    pub sequence: Vec<f64>,
}

/// Running maximum of residuals; non-finite residuals saturate to `f64::MAX`.
#[derive(Debug, Clone, Copy, Default)]
struct Acc {
    max: f64,
    count: usize,
}

impl Acc {
    fn push(&mut self, r: f64) {
        self.count += 1;
        if !(r <= self.max) {
            self.max = if r.is_finite() { r } else { f64::MAX };
        }
    }
}

fn rel(got: C64, want: C64) -> f64 {
    (got - want).norm() / (1.0 + want.norm())
}

fn rel_sym(a: C64, b: C64) -> f64 {
    (a - b).norm() / (1.0 + a.norm().max(b.norm()))
}

fn pure_rel(got: f64, want: f64) -> f64 {
    if want == 0.0 {
        got.abs()
    } else {
        (got - want).abs() / want.abs()
    }
}

struct Run<'a> {
    s: &'a System,
    cfg: &'a VerifyConfig,
    out: Vec<CheckResult>,
}

impl<'a> Run<'a> {
    fn new(s: &'a System, cfg: &'a VerifyConfig) -> Self {
        Self { s, cfg, out: Vec::new() }
    }

    fn xs(&self) -> Vec<f64> {
        self.s.sample_points(self.cfg.samples, self.cfg.seed)
    }

    fn emit(&mut self, id: &str, levels: (usize, usize), acc: Acc, tol: f64, note: Option<String>) {
        let tol = self.cfg.tol.unwrap_or(tol);
        self.emit_fixed(id, levels, acc, tol, note, Vec::new());
    }

    fn emit_fixed(
        &mut self,
        id: &str,
        levels: (usize, usize),
        acc: Acc,
        tolerance: f64,
        note: Option<String>,
        sequence: Vec<f64>,
    ) {
        self.out.push(CheckResult {
            check_id: id.to_string(),
            family: self.s.id(),
            params: self.s.params().clone(),
            level_range: levels,
            max_residual: acc.max,
            tolerance,
            passed: acc.max <= tolerance,
            samples_used: acc.count,
            note,
            sequence,
        });
    }

    fn emit_error(&mut self, id: &str, levels: (usize, usize), tol: f64, e: &Error) {
        let acc = Acc { max: f64::MAX, count: 0 };
        self.emit(id, levels, acc, tol, Some(e.to_string()));
    }
}

/// Runs one suite. `Limit` needs a Wilson system; `NumberOperator` fails
/// with a regime error where the spectrum cannot be inverted.
pub fn run_suite(suite: Suite, s: &System, cfg: &VerifyConfig) -> Result<Vec<CheckResult>> {
    let mut r = Run::new(s, cfg);
    match suite {
        Suite::Eigen => suite_eigen(&mut r)?,
        Suite::ShapeInvariance => suite_shape(&mut r)?,
        Suite::Closure => suite_closure(&mut r),
        Suite::DualClosure => suite_dual_closure(&mut r),
        Suite::Shifts => suite_shifts(&mut r)?,
        Suite::Ladder => suite_ladder(&mut r),
        Suite::Coherent => suite_coherent(&mut r)?,
        Suite::Orthogonality => suite_orthogonality(&mut r),
        Suite::Hermiticity => suite_hermiticity(&mut r)?,
        Suite::Limit => {
            if s.id() != FamilyId::Wilson {
                return Err(Error::Unsupported(format!("limit suite takes the Wilson family, not {}", s.id())));
            }
            r.out = check_limit_aw_wilson(s, &cfg.lengths, cfg)?;
        }
        Suite::NumberOperator => r.out.push(check_number_operator(s, 0, cfg.n_max, cfg)?),
    }
    Ok(r.out)
}

/// Every suite that applies to the family, in [`Suite::ALL`] order.
pub fn run_all(s: &System, cfg: &VerifyConfig) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for suite in Suite::ALL {
        match run_suite(suite, s, cfg) {
            Ok(v) => out.extend(v),
            Err(Error::Unsupported(_) | Error::Regime(_)) if matches!(suite, Suite::Limit | Suite::NumberOperator) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

// ---- eigen ----

fn suite_eigen(r: &mut Run) -> Result<()> {
    let s = r.s;
    let n_max = r.cfg.n_max;
    let xs = r.xs();
    let rec = s.recurrence(n_max);
    let mut dual = Acc::default();
    let mut eig = Acc::default();
    let (mut flagged, mut worst_estimate) = (0usize, 0.0f64);
    for &x in &xs {
        let pt = s.point(x);
        let vals = rec.values(s.eta(pt));
        for (n, &p) in vals.iter().enumerate() {
            let (v, warn) = s.eval_poly_hypergeometric_checked(n, pt)?;
            if let Some(w) = warn {
                flagged += 1;
                worst_estimate = worst_estimate.max(w.error_estimate);
            }
            dual.push(rel(v, p));
            let h = op::hamiltonian(s, |w: Point| rec.value(n, s.eta(w)))(pt);
            eig.push(rel(h, s.energy(n) * p));
        }
    }
    let note = (flagged > 0)
        .then(|| format!("{flagged} ill-conditioned series evaluations, error estimate up to {worst_estimate:.1e}"));
    r.emit("poly.dual_path", (0, n_max), dual, TOL_POLY, note);
    r.emit("hamiltonian.eigen", (0, n_max), eig, TOL_EIGEN, None);

    let tri_max = n_max.min(10);
    let mut tri = Acc::default();
    for n in 0..=tri_max {
        let c = op::h_on_monomial(s, n)?;
        let scale = c.iter().map(|v| v.norm()).fold(1.0, f64::max);
        tri.push((c[n] - s.energy(n)).norm() / scale);
        for v in &c[n + 1..] {
            tri.push(v.norm() / scale);
        }
    }
    r.emit("hamiltonian.lower_triangular", (0, tri_max), tri, TOL_EIGEN, None);

    // b^rec_n > 0 and b^rec_n = (c_{n-1}/c_n)² h_n/h_{n-1}
    let mut recur = Acc::default();
    let mut positive = true;
    for n in 1..=20 {
        let (c0, c1) = (s.coefficients(n - 1), s.coefficients(n));
        positive &= c1.b_rec > 0.0;
        let want = (c0.c / c1.c).powi(2) * c0.norm_ratio / c1.norm_ratio;
        recur.push(pure_rel(c1.b_rec, want));
    }
    let note = (!positive).then(|| "b_n^rec not positive".to_string());
    if !positive {
        recur.push(f64::MAX);
    }
    r.emit("recurrence.norm_consistency", (1, 20), recur, TOL_RECURRENCE, note);

    parameter_symmetry(r, &xs)?;
    Ok(())
}

fn parameter_symmetry(r: &mut Run, xs: &[f64]) -> Result<()> {
    let s = r.s;
    let n_max = r.cfg.n_max;
    let a = s.params().a.clone();
    let perms: Vec<Vec<C64>> = match s.id() {
        FamilyId::ContinuousHahn => vec![vec![a[1], a[0]]],
        FamilyId::Wilson | FamilyId::AskeyWilson => {
            vec![vec![a[1], a[0], a[2], a[3]], vec![a[3], a[2], a[1], a[0]], vec![a[2], a[3], a[0], a[1]]]
        }
        FamilyId::MeixnerPollaczek => {
            let (aa, phi) = (a[0], s.params().phi.unwrap_or(core::f64::consts::FRAC_PI_2));
            let rec = s.recurrence(n_max);
            let mut acc = Acc::default();
            for &x in xs {
                let vals = rec.values(C64::new(-x, 0.0));
                for (n, &v) in vals.iter().enumerate() {
                    acc.push(rel(meixner_pollaczek_series(aa, -phi, n, x)?, v));
                }
            }
            r.emit("poly.reflection", (0, n_max), acc, TOL_REFLECTION, None);
            return Ok(());
        }
        _ => return Ok(()),
    };
    let rec = s.recurrence(n_max);
    let mut acc = Acc::default();
    for p in perms {
        let other = System::new(s.id(), ParamSet { a: p, ..s.params().clone() })?;
        let orec = other.recurrence(n_max);
        for &x in xs {
            let pt = s.point(x);
            let vals = rec.values(s.eta(pt));
            let ovals = orec.values(s.eta(pt));
            for n in 0..=n_max {
                acc.push(rel(ovals[n], vals[n]));
                acc.push(rel(other.eval_poly_hypergeometric(n, pt)?, vals[n]));
            }
        }
    }
    r.emit("poly.parameter_symmetry", (0, n_max), acc, TOL_SYMMETRY, None);
    Ok(())
}

/// Meixner-Pollaczek series at an arbitrary angle, outside the validated
/// range `0 < φ < π`.
fn meixner_pollaczek_series(a: C64, phi: f64, n: usize, x: f64) -> Result<C64> {
    let nf = n as f64;
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    let pre = specfun::pochhammer(2.0 * a, n) / fact * C64::from_polar(1.0, nf * phi);
    let arg = ONE - C64::from_polar(1.0, -2.0 * phi);
    Ok(pre * specfun::hypergeometric_f(&[C64::new(-nf, 0.0), a + C64::new(0.0, x)], &[2.0 * a], arg, n)?)
}

// ---- shape invariance and spectrum ----

fn suite_shape(r: &mut Run) -> Result<()> {
    let s = r.s;
    let next = s.shifted(1)?;
    let mut prod = Acc::default();
    let mut sum = Acc::default();
    for x in r.xs() {
        let [p, q] = op::shape_invariance_sides(s, &next, s.point(x));
        prod.push(rel_sym(p.0, p.1));
        sum.push(rel_sym(q.0, q.1));
    }
    r.emit("shape_invariance.product", (0, 0), prod, TOL_SHAPE, None);
    r.emit("shape_invariance.sum", (0, 0), sum, TOL_SHAPE, None);

    let n_max = r.cfg.n_max;
    let mut acc = Acc::default();
    for n in 0..=n_max {
        acc.push(pure_rel(spectrum_from_shape_invariance(s, n)?, s.energy(n)));
    }
    r.emit("spectrum.generation", (0, n_max), acc, TOL_SPECTRUM, None);
    Ok(())
}

/// `E_n(λ) = Σ_{s<n} κ^s E_1(λ + sδ)`.
pub fn spectrum_from_shape_invariance(s: &System, n: usize) -> Result<f64> {
    let k = s.kappa();
    let mut total = 0.0;
    for j in 0..n {
        total += k.powi(j as i32) * s.shifted(j)?.energy(1);
    }
    Ok(total)
}

// ---- closure ----

const CONDITION_IDS: [&str; 6] = [
    "closure.expanded.first",
    "closure.expanded.first_conjugate",
    "closure.expanded.second",
    "closure.expanded.second_conjugate",
    "closure.expanded.third",
    "closure.three_point",
];

fn suite_closure(r: &mut Run) {
    let s = r.s;
    let n_max = r.cfg.n_max;
    let xs = r.xs();
    let mut eig = Acc::default();
    for n in 0..=n_max {
        let rec = s.recurrence(n);
        let p = |w: Point| rec.value(n, s.eta(w));
        for &x in &xs {
            let (l, rr) = op::closure_sides(s, n, p, s.point(x));
            eig.push(rel_sym(l, rr));
        }
    }
    r.emit("closure.eigen", (0, n_max), eig, TOL_CLOSURE, None);

    let mut conds = [Acc::default(); 6];
    for &x in &xs {
        for (acc, (l, rr)) in conds.iter_mut().zip(op::closure_conditions(s, s.point(x))) {
            acc.push(rel_sym(l, rr));
        }
    }
    for (k, acc) in conds.into_iter().enumerate() {
        let tol = if k == 5 { TOL_THREE_POINT } else { TOL_CLOSURE };
        r.emit(CONDITION_IDS[k], (0, 0), acc, tol, None);
    }

    let c = s.closure_polys();
    let mut constraints = Acc::default();
    constraints.push((c.r0[2] - c.r1[1]).abs());
    constraints.push((c.r0[1] - 2.0 * c.r1[0]).abs());
    r.emit("closure.constraints", (0, 0), constraints, TOL_THREE_POINT, None);
}

fn suite_dual_closure(r: &mut Run) {
    let s = r.s;
    let n_max = r.cfg.n_max;
    let xs = r.xs();
    let mut acc = Acc::default();
    for n in 0..=n_max {
        let rec = s.recurrence(n);
        let p = |w: Point| rec.value(n, s.eta(w));
        for &x in &xs {
            let (l, rr) = op::dual_closure_sides(s, p, s.point(x));
            acc.push(rel_sym(l, rr));
        }
    }
    r.emit("dual_closure.eigen", (0, n_max), acc, TOL_CLOSURE, None);
}

// ---- shift operators ----

fn suite_shifts(r: &mut Run) -> Result<()> {
    let s = r.s;
    let nm = r.cfg.shift_n_max;
    let xs = r.xs();
    let systems: Vec<System> = (0..=nm).map(|k| s.shifted(k)).collect::<Result<_>>()?;
    let next = &systems[1.min(nm)];
    let next = if nm == 0 { s.shifted(1)? } else { next.clone() };
    let rec = s.recurrence(nm + 1);
    let nrec = next.recurrence(nm + 1);
    let (mut fwd, mut bwd, mut amp, mut fact) = (Acc::default(), Acc::default(), Acc::default(), Acc::default());
    for n in 0..=nm {
        let c = s.coefficients(n);
        let pn = |w: Point| rec.value(n, s.eta(w));
        let qn = |w: Point| nrec.value(n, s.eta(w));
        let f = op::forward_shift(s, pn);
        let b = op::backward_shift(s, qn);
        let bf = op::backward_shift(s, op::forward_shift(s, pn));
        let fb = op::forward_shift(s, op::backward_shift(s, qn));
        let e_fb = s.kappa() * next.energy(n) + s.energy(1);
        for &x in &xs {
            let pt = s.point(x);
            let eta = s.eta(pt);
            let want_f = if n == 0 { ZERO } else { c.f * nrec.value(n - 1, eta) };
            fwd.push(rel(f(pt), want_f));
            bwd.push(rel(b(pt), c.b * rec.value(n + 1, eta)));
            fact.push(rel(bf(pt), s.energy(n) * rec.value(n, eta)));
            fact.push(rel(fb(pt), e_fb * nrec.value(n, eta)));
        }
        if n >= 1 {
            amp.push(pure_rel(c.f * s.coefficients(n - 1).b, s.energy(n)));
        }
    }
    r.emit("shift.forward", (0, nm), fwd, TOL_SHIFT, None);
    r.emit("shift.backward", (0, nm), bwd, TOL_SHIFT, None);
    r.emit("shift.amplitude_product", (1, nm), amp, TOL_SHIFT, None);
    r.emit("shift.factorisation", (0, nm), fact, TOL_SHIFT, None);

    // P_n(λ) = B(λ) B(λ+δ) ... B(λ+(n-1)δ) 1 / Π b
    let mut rod = Acc::default();
    for n in 0..=nm {
        let mut f: Box<dyn Fn(Point) -> C64 + '_> = Box::new(|_| ONE);
        let mut prod = 1.0;
        for j in 0..n {
            let sys = &systems[n - 1 - j];
            prod *= sys.coefficients(j).b;
            f = Box::new(op::backward_shift(sys, f));
        }
        for &x in &xs {
            let pt = s.point(x);
            rod.push(rel(f(pt) / prod, rec.value(n, s.eta(pt))));
        }
    }
    r.emit("shift.rodrigues", (0, nm), rod, TOL_SHIFT, None);

    lambda_shift_checks(r, &xs)
}

fn lambda_shift_checks(r: &mut Run, xs: &[f64]) -> Result<()> {
    let s = r.s;
    let nm = r.cfg.lambda_n_max;
    let rec = s.recurrence(nm);
    match s.id() {
        FamilyId::MeixnerPollaczek | FamilyId::ContinuousDualHahn => {
            if s.id() == FamilyId::MeixnerPollaczek
                && (s.params().phi.unwrap_or(0.0) - core::f64::consts::FRAC_PI_2).abs() > 1e-12
            {
                return Ok(());
            }
            let next = s.shifted(1)?;
            let nrec = next.recurrence(nm);
            let a = s.params().a.clone();
            let (mut x_acc, mut xd_acc) = (Acc::default(), Acc::default());
            for n in 0..=nm {
                let nf = n as f64;
                let (fx, fxd) = if s.id() == FamilyId::MeixnerPollaczek {
                    (C64::new(0.5, 0.0), 0.25 * (nf + 2.0 * a[0]))
                } else {
                    (ONE, (nf + a[0] + a[1]) * (nf + a[0] + a[2]) * (nf + a[1] + a[2]))
                };
                let x = op::lambda_shift(s, n, |w: Point| rec.value(n, s.eta(w)))?;
                let xd = op::lambda_shift_adjoint(s, |w: Point| nrec.value(n, s.eta(w)))?;
                for &t in xs {
                    let pt = s.point(t);
                    let eta = s.eta(pt);
                    x_acc.push(rel(x(pt), fx * nrec.value(n, eta)));
                    xd_acc.push(rel(xd(pt), fxd * rec.value(n, eta)));
                }
            }
            r.emit("lambda_shift.x", (0, nm), x_acc, TOL_SHIFT, None);
            r.emit("lambda_shift.x_adjoint", (0, nm), xd_acc, TOL_SHIFT, None);
        }
        FamilyId::ContinuousQHermite => {
            let q = s.q();
            let (mut x_acc, mut sq_acc) = (Acc::default(), Acc::default());
            for n in 0..=nm {
                let pn = |w: Point| rec.value(n, s.eta(w));
                let x = op::lambda_shift(s, n, pn)?;
                // (2q^{-1/2} X (H+1))² P_n = (H+1) P_n
                let e1 = s.energy(n) + 1.0;
                let k = 2.0 / libm::sqrt(q) * e1;
                let inner = op::lambda_shift(s, n, move |w: Point| k * pn(w))?;
                let outer = op::lambda_shift(s, n, move |w: Point| k * inner(w))?;
                for &t in xs {
                    let pt = s.point(t);
                    let p = rec.value(n, s.eta(pt));
                    x_acc.push(rel(x(pt), 0.5 * libm::pow(q, (n as f64 + 1.0) / 2.0) * p));
                    sq_acc.push(rel(outer(pt), e1 * p));
                }
            }
            r.emit("lambda_shift.x", (0, nm), x_acc, TOL_SHIFT, None);
            r.emit("lambda_shift.square", (0, nm), sq_acc, TOL_SHIFT, None);
        }
        _ => {}
    }
    Ok(())
}

// ---- ladder operators ----

/// `E_n = q^{-n} - 1` for the first few levels.
fn has_geometric_spectrum(s: &System) -> bool {
    s.id().is_q() && (1..=4).all(|n| pure_rel(s.energy(n), libm::pow(s.q(), -(n as f64)) - 1.0) < 1e-13)
}

fn suite_ladder(r: &mut Run) {
    let s = r.s;
    let n_max = r.cfg.n_max;
    let top = n_max.saturating_sub(1);
    let xs = r.xs();
    let q = s.q();
    let rec = s.recurrence(n_max + 1);
    let cp = s.closure_polys();
    let geometric = has_geometric_spectrum(s);
    let oscillator = matches!(s.id(), FamilyId::ContinuousQHermite | FamilyId::ContinuousBigQHermite);
    let mut alpha = Acc::default();
    let (mut action, mut spectral, mut comm) = (Acc::default(), Acc::default(), Acc::default());
    let (mut qcomm, mut qosc, mut shape) = (Acc::default(), Acc::default(), Acc::default());
    for n in 0..=top {
        let e = s.energy(n);
        let (ap, am) = cp.alpha(e);
        alpha.push(pure_rel(ap, s.energy(n + 1) - e));
        alpha.push(pure_rel(am, s.energy_ext(n as i64 - 1) - e));

        let c = s.coefficients(n);
        let pn = |w: Point| rec.value(n, s.eta(w));
        let up = op::ladder(s, Sign::Plus, n, pn);
        let down = op::ladder(s, Sign::Minus, n, pn);
        let h_up = op::hamiltonian(s, &up);
        let h_down = op::hamiltonian(s, &down);
        let down_up = op::ladder(s, Sign::Minus, n + 1, &up);
        let up_down = op::ladder(s, Sign::Plus, n.saturating_sub(1), &down);
        let b_gap = s.coefficients(n + 1).b_rec - if n == 0 { 0.0 } else { c.b_rec };
        let fb = op::forward_shift(s, op::backward_shift(s, pn));
        let bf = op::backward_shift(s, op::forward_shift(s, pn));
        for &x in &xs {
            let pt = s.point(x);
            let eta = s.eta(pt);
            let p = rec.value(n, eta);
            let (u, d) = (up(pt), down(pt));
            action.push(rel(u, c.big_a * rec.value(n + 1, eta)));
            let want_d = if n == 0 { ZERO } else { c.big_c * rec.value(n - 1, eta) };
            action.push(rel(d, want_d));
            spectral.push(rel(h_up(pt) - e * u, (s.energy(n + 1) - e) * u));
            spectral.push(rel(h_down(pt) - e * d, (s.energy_ext(n as i64 - 1) - e) * d));
            let ud = if n == 0 { ZERO } else { up_down(pt) };
            comm.push(rel(down_up(pt) - ud, b_gap * p));
            if geometric {
                qcomm.push(rel(h_up(pt) - e * u / q, (1.0 / q - 1.0) * u));
                qcomm.push(rel(h_down(pt) - q * e * d, (q - 1.0) * d));
            }
            if oscillator {
                qosc.push(rel(down_up(pt) - q * ud, 0.25 * (1.0 - q) * p));
            }
            if s.id() == FamilyId::ContinuousQHermite {
                shape.push(rel(fb(pt) - bf(pt) / q, (1.0 / q - 1.0) * p));
            }
        }
    }
    r.emit("ladder.alpha", (0, top), alpha, TOL_LADDER, None);
    r.emit("ladder.action", (0, top), action, TOL_LADDER, None);
    r.emit("ladder.spectral_commutator", (0, top), spectral, TOL_LADDER, None);
    r.emit("ladder.commutator", (0, top), comm, TOL_LADDER, None);
    if geometric {
        r.emit("ladder.q_commutator", (0, top), qcomm, TOL_LADDER, None);
    }
    if oscillator {
        r.emit("ladder.q_oscillator", (0, top), qosc, TOL_LADDER, None);
    }
    if s.id() == FamilyId::ContinuousQHermite {
        r.emit("ladder.shape_oscillator", (0, top), shape, TOL_LADDER, None);
    }
}

// ---- coherent states ----

/// Default coherent-state eigenvalue per family.
pub fn default_alpha(id: FamilyId) -> C64 {
    match id {
        FamilyId::MeixnerPollaczek => C64::new(0.5, 0.0),
        FamilyId::ContinuousHahn | FamilyId::Wilson | FamilyId::ContinuousDualHahn => C64::new(0.3, 0.0),
        _ => C64::new(0.2, 0.0),
    }
}

/// Coherent state divided by `φ_0`, at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CoherentEval {
    pub alpha: C64,
    pub x: f64,
    pub truncation_n: usize,
    pub partial_sum: C64,
    pub closed_form: Option<C64>,
    /// `|a⁻ψ - αψ| / |αψ|` with `a⁻` applied level by level as a
    /// difference operator
    pub annihilation_residual: f64,
    /// last included term relative to the partial sum
    pub tail: f64,
}

/// Series coefficients `αⁿ / Π_{k≤n} C_k`, `n ≤ COHERENT_CAP`.
fn coherent_coefficients(s: &System, alpha: C64) -> Vec<C64> {
    let mut out = Vec::with_capacity(COHERENT_CAP + 1);
    let mut c = ONE;
    out.push(c);
    for k in 1..=COHERENT_CAP {
        c = c * alpha / s.coefficients(k).big_c;
        out.push(c);
    }
    out
}

pub fn coherent_state(s: &System, alpha: C64, x: f64) -> Result<CoherentEval> {
    let coef = coherent_coefficients(s, alpha);
    let rec = s.recurrence(COHERENT_CAP);
    let pt = s.point(x);
    let vals = rec.values(s.eta(pt));
    let mut sum = ZERO;
    let mut n_used = COHERENT_CAP;
    let mut tail = 0.0;
    for n in 0..=COHERENT_CAP {
        let t = coef[n] * vals[n];
        sum += t;
        tail = t.norm() / sum.norm().max(f64::MIN_POSITIVE);
        // three negligible terms in a row, since parity can zero every other one
        if n + 3 <= COHERENT_CAP && n >= COHERENT_MIN {
            let small = (n + 1..=n + 3).all(|k| (coef[k] * vals[k]).norm() < 1e-14 * sum.norm());
            if small {
                n_used = n;
                break;
            }
        }
    }
    let mut lowered = ZERO;
    for (n, &c) in coef.iter().enumerate().take(n_used + 1).skip(1) {
        let down = op::ladder(s, Sign::Minus, n, |w: Point| rec.value(n, s.eta(w)));
        lowered += c * down(pt);
    }
    let target = alpha * sum;
    let annihilation_residual = (lowered - target).norm() / target.norm();
    Ok(CoherentEval {
        alpha,
        x,
        truncation_n: n_used,
        partial_sum: sum,
        closed_form: coherent_closed_form(s, alpha, x)?,
        annihilation_residual,
        tail,
    })
}

/// Summed forms of the coherent state divided by `φ_0`, where known.
pub fn coherent_closed_form(s: &System, alpha: C64, x: f64) -> Result<Option<C64>> {
    let tol = SeriesTolerance::default();
    let q = s.q();
    let z = C64::from_polar(1.0, x);
    let two_a = 2.0 * alpha;
    let v = match s.id() {
        FamilyId::MeixnerPollaczek => {
            let a = s.params().a[0];
            let phi = s.params().phi.unwrap_or(core::f64::consts::FRAC_PI_2);
            let sin = libm::sin(phi);
            let pre = (C64::new(0.0, 1.0) * alpha * (ONE - C64::from_polar(1.0, 2.0 * phi))).exp();
            let arg = C64::new(0.0, -4.0) * alpha * sin * sin;
            pre * specfun::hypergeometric_f_series(&[a + C64::new(0.0, x)], &[2.0 * a], arg, tol)?
        }
        FamilyId::AlSalamChihara | FamilyId::ContinuousQLaguerre => {
            let a = s.potential_factors();
            let (a1, a2) = (a[0], a[1]);
            let phi = specfun::basic_hypergeometric_phi_series(&[a1 * z, a2 * z], &[a1 * a2], q, two_a / z, tol)?;
            phi / specfun::q_pochhammer_inf(two_a * z, q, tol)?
        }
        FamilyId::ContinuousBigQHermite => {
            let a = s.potential_factors()[0];
            specfun::q_pochhammer_inf(two_a * a, q, tol)?
                / specfun::q_pochhammer_inf_many(&[two_a * z, two_a / z], q, tol)?
        }
        FamilyId::ContinuousQHermite => ONE / specfun::q_pochhammer_inf_many(&[two_a * z, two_a / z], q, tol)?,
        _ => return Ok(None),
    };
    Ok(Some(v))
}

/// `1/Π_{k≤n} C_k` in the per-family closed form.
pub fn coherent_coefficient_closed(s: &System, n: usize) -> Result<C64> {
    let a = s.potential_factors();
    let q = s.q();
    let nf = n as f64;
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    let pairs = |m: usize| -> C64 {
        let mut p = ONE;
        for j in 0..m {
            for k in j + 1..m {
                p *= specfun::pochhammer(a[j] + a[k], n);
            }
        }
        p
    };
    let qpairs = |m: usize| -> Result<C64> {
        let mut p = ONE;
        for j in 0..m {
            for k in j + 1..m {
                p *= specfun::q_pochhammer(a[j] * a[k], q, n)?;
            }
        }
        Ok(p)
    };
    let two_n = C64::new(libm::pow(2.0, nf), 0.0);
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let b1: C64 = a.iter().sum();
    Ok(match s.id() {
        FamilyId::ContinuousHahn => {
            let mut den = ONE;
            for j in 0..2 {
                for k in 2..4 {
                    den *= specfun::pochhammer(a[j] + a[k], n);
                }
            }
            specfun::pochhammer(b1, 2 * n) / den
        }
        FamilyId::MeixnerPollaczek => {
            let phi = s.params().phi.unwrap_or(core::f64::consts::FRAC_PI_2);
            libm::pow(2.0 * libm::sin(phi), nf) / specfun::pochhammer(2.0 * a[0], n)
        }
        FamilyId::Wilson => sign * specfun::pochhammer(b1, 2 * n) / (fact * pairs(4)),
        FamilyId::ContinuousDualHahn => C64::new(sign, 0.0) / (fact * pairs(3)),
        FamilyId::AskeyWilson => {
            let b4 = a.iter().fold(ONE, |acc, &x| acc * x);
            two_n * specfun::q_pochhammer(b4, q, 2 * n)? / (specfun::q_pochhammer(C64::new(q, 0.0), q, n)? * qpairs(4)?)
        }
        FamilyId::ContinuousDualQHahn => two_n / (specfun::q_pochhammer(C64::new(q, 0.0), q, n)? * qpairs(3)?),
        FamilyId::AlSalamChihara => two_n / specfun::q_pochhammer_many(&[C64::new(q, 0.0), a[0] * a[1]], q, n)?,
        FamilyId::ContinuousBigQHermite | FamilyId::ContinuousQHermite => {
            two_n / specfun::q_pochhammer(C64::new(q, 0.0), q, n)?
        }
        FamilyId::ContinuousQJacobi | FamilyId::ContinuousQLaguerre => {
            let al = s.params().alpha.unwrap_or(0.0);
            let pre = libm::pow(2.0 * libm::pow(q, -0.5 * (al + 0.5)), nf);
            let mut v = C64::new(pre, 0.0) / specfun::q_pochhammer(C64::new(libm::pow(q, al + 1.0), 0.0), q, n)?;
            if s.id() == FamilyId::ContinuousQJacobi {
                let be = s.params().beta.unwrap_or(0.0);
                let top = C64::new(libm::pow(q, 0.5 * (al + be) + 1.0), 0.0);
                v *= specfun::q_pochhammer(top, libm::sqrt(q), 2 * n)?;
                v /= specfun::q_pochhammer(C64::new(libm::pow(q, be + 1.0), 0.0), q, n)?;
            }
            v
        }
    })
}

fn suite_coherent(r: &mut Run) -> Result<()> {
    let s = r.s;
    let alpha = r.cfg.alpha.unwrap_or_else(|| default_alpha(s.id()));
    let (evals, coef_acc) = check_coherent(s, alpha, &r.xs(), r.cfg.n_max)?;
    let n_used = evals.iter().map(|e| e.truncation_n).max().unwrap_or(0);
    let unconverged = evals.iter().any(|e| e.truncation_n >= COHERENT_CAP && e.tail > 1e-12);
    let mut note = format!("alpha = {} (engineering default bound)", alpha);
    if unconverged {
        note.push_str("; series not converged at the term cap");
    }
    r.emit("coherent.coefficients", (0, r.cfg.n_max), coef_acc, TOL_SHIFT, None);
    let mut ann = Acc::default();
    let mut closed = Acc::default();
    for e in &evals {
        ann.push(e.annihilation_residual);
        if let Some(c) = e.closed_form {
            closed.push((e.partial_sum - c).norm() / c.norm());
        }
        if unconverged {
            ann.push(f64::MAX);
        }
    }
    r.emit("coherent.annihilation", (0, n_used), ann, TOL_COHERENT, Some(note.clone()));
    if closed.count > 0 {
        r.emit("coherent.closed_form", (0, n_used), closed, TOL_CLOSED_FORM, Some(note));
    }
    Ok(())
}

/// Coherent state at each sample point, plus the residuals of the series
/// coefficients against their per-family closed forms for `n ≤ n_max`.
fn check_coherent(s: &System, alpha: C64, xs: &[f64], n_max: usize) -> Result<(Vec<CoherentEval>, Acc)> {
    let mut coef = Acc::default();
    let mut prod = ONE;
    for n in 0..=n_max {
        if n > 0 {
            prod /= s.coefficients(n).big_c;
        }
        coef.push(rel(prod, coherent_coefficient_closed(s, n)?) / (1.0 + prod.norm()).min(1.0));
    }
    let evals = xs.iter().map(|&x| coherent_state(s, alpha, x)).collect::<Result<Vec<_>>>()?;
    Ok((evals, coef))
}

// ---- orthogonality and hermiticity ----

fn suite_orthogonality(r: &mut Run) {
    let s = r.s;
    let nm = r.cfg.ortho_n_max;
    let m = match quadrature::orthogonality_matrix(s, nm, &r.cfg.quadrature) {
        Ok(m) => m,
        Err(e) => {
            r.emit_error("orthogonality.diagonal", (0, nm), TOL_ORTHO_DIAG, &e);
            return;
        }
    };
    let dim = nm + 1;
    let mut diag = Acc::default();
    let mut off = Acc::default();
    let mut ratio = Acc::default();
    for n in 0..dim {
        let d = m.get(n, n);
        diag.push(if d > 0.0 { (d / m.expected_diag[n] - 1.0).abs() } else { f64::MAX });
        if n > 0 {
            let want = m.expected_diag[n] / m.expected_diag[n - 1];
            ratio.push(pure_rel(d / m.get(n - 1, n - 1), want));
        }
        for k in 0..dim {
            if k != n {
                off.push(m.get(n, k).abs() / libm::sqrt(m.expected_diag[n] * m.expected_diag[k]));
            }
        }
    }
    let note = Some(format!("h0 = {:.12e}", m.expected_diag[0]));
    r.emit("orthogonality.diagonal", (0, nm), diag, TOL_ORTHO_DIAG, note);
    r.emit("orthogonality.off_diagonal", (0, nm), off, TOL_ORTHO_OFF, None);
    r.emit("orthogonality.norm_ratio", (1, nm), ratio, TOL_ORTHO_DIAG, None);
}

fn suite_hermiticity(r: &mut Run) -> Result<()> {
    let s = r.s;
    let mono = |k: usize| EtaPolynomial::monomial(k);
    let pairs = [
        (mono(0)?, mono(0)?),
        (mono(1)?, mono(1)?),
        (mono(1)?, mono(2)?),
        (mono(2)?, mono(3)?),
        (s.eval_poly_recurrence(1)?, s.eval_poly_recurrence(2)?),
    ];
    let mut acc = Acc::default();
    let mut real = Acc::default();
    for (k, (p, q)) in pairs.iter().enumerate() {
        match quadrature::hermiticity_check(s, p, q, &r.cfg.quadrature) {
            Ok(h) => {
                acc.push(h.residual);
                if k < 2 {
                    real.push(h.lhs.im.abs() / (1.0 + h.lhs.norm()));
                }
            }
            Err(e) => {
                r.emit_error("hermiticity.pairs", (0, 3), TOL_HERMITICITY, &e);
                return Ok(());
            }
        }
    }
    r.emit("hermiticity.pairs", (0, 3), acc, TOL_HERMITICITY, None);
    r.emit("hermiticity.real_diagonal", (0, 1), real, TOL_HERMITICITY_REAL, None);
    Ok(())
}

// ---- number operator ----

/// Level `N` recovered from an energy through the family's inversion of
/// its spectrum.
pub fn number_operator(s: &System, e: f64) -> Result<f64> {
    let q = s.q();
    let geometric = |qn: f64| libm::log(qn) / libm::log(q);
    // q^N = 2 / (H' + sqrt(H'² - 4c)), the rationalised form of
    // (H' - sqrt(H'² - 4c)) / 2c
    let quadratic = |h: f64, c: f64| 2.0 / (h + libm::sqrt(h * h - 4.0 * c));
    let b1: f64 = s.potential_factors().iter().map(|a| a.re).sum();
    match s.id() {
        FamilyId::ContinuousHahn | FamilyId::Wilson => {
            if b1 <= 1.0 {
                return Err(Error::Regime(format!("b1 = {b1} must exceed 1")));
            }
            Ok(libm::sqrt(e + 0.25 * (b1 - 1.0) * (b1 - 1.0)) - 0.5 * (b1 - 1.0))
        }
        FamilyId::MeixnerPollaczek => Ok(e / (2.0 * libm::sin(s.params().phi.unwrap_or(0.0)))),
        FamilyId::ContinuousDualHahn => Ok(e),
        FamilyId::AskeyWilson => {
            let b4 = s.potential_factors().iter().fold(ONE, |acc, &a| acc * a).re;
            if !(b4 > 0.0 && b4 < q) {
                return Err(Error::Regime(format!("b4 = {b4} outside (0, q)")));
            }
            Ok(geometric(quadratic(e + 1.0 + b4 / q, b4 / q)))
        }
        FamilyId::ContinuousQJacobi => {
            let (al, be) = (s.params().alpha.unwrap_or(0.0), s.params().beta.unwrap_or(0.0));
            let c = libm::pow(q, al + be + 1.0);
            if !(c > 0.0 && c < 1.0) {
                return Err(Error::Regime(format!("q^(α+β+1) = {c} outside (0, 1)")));
            }
            Ok(geometric(quadratic(e + 1.0 + c, c)))
        }
        _ => Ok(geometric(1.0 / (e + 1.0))),
    }
}

pub fn check_number_operator(s: &System, n_min: usize, n_max: usize, cfg: &VerifyConfig) -> Result<CheckResult> {
    let mut acc = Acc::default();
    for n in n_min..=n_max {
        let nf = n as f64;
        acc.push((number_operator(s, s.energy(n))? - nf).abs() / (1.0 + nf));
    }
    let mut r = Run::new(s, cfg);
    r.emit("number_operator.inversion", (n_min, n_max), acc, TOL_NUMBER, None);
    Ok(r.out.remove(0))
}

/// Structured record of the shape-invariance relations at given points.
pub fn check_shape_invariance(s: &System, xs: &[f64], cfg: &VerifyConfig) -> Result<Vec<CheckResult>> {
    let next = s.shifted(1)?;
    let mut prod = Acc::default();
    let mut sum = Acc::default();
    for &x in xs {
        let [p, q] = op::shape_invariance_sides(s, &next, s.point(x));
        prod.push(rel_sym(p.0, p.1));
        sum.push(rel_sym(q.0, q.1));
    }
    let mut r = Run::new(s, cfg);
    r.emit("shape_invariance.product", (0, 0), prod, TOL_SHAPE, None);
    r.emit("shape_invariance.sum", (0, 0), sum, TOL_SHAPE, None);
    Ok(r.out)
}

// ---- Askey-Wilson to Wilson ----

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum LimitQuantity {
    Energy,
    Potential,
    Polynomial,
    Phi0,
    ForwardAmplitude,
    BackwardAmplitude,
}

/// The Askey-Wilson system with `a_j = q^{a'_j}`, `q = e^{-π/L}`.
pub fn askey_wilson_for(wilson: &System, length: f64) -> Result<System> {
    if wilson.id() != FamilyId::Wilson {
        return Err(Error::Unsupported(format!("expected Wilson parameters, got {}", wilson.id())));
    }
    let q = libm::exp(-core::f64::consts::PI / length);
    let ln_q = libm::log(q);
    let a: Vec<C64> = wilson.params().a.iter().map(|&a| (a * ln_q).exp()).collect();
    System::new(FamilyId::AskeyWilson, ParamSet::new().with_a(&a).with_q(q))
}

/// Scaled Askey-Wilson quantity and its Wilson counterpart at level `n`
/// and Wilson coordinate `x'`.
pub fn aw_to_wilson_scaled(
    quantity: LimitQuantity,
    wilson: &System,
    length: f64,
    n: usize,
    x_prime: f64,
) -> Result<(C64, C64)> {
    let aw = askey_wilson_for(wilson, length)?;
    let q = aw.q();
    let oq = 1.0 - q;
    let x = core::f64::consts::PI * x_prime / length;
    let wpt = wilson.point(x_prime);
    let c = |v: f64| C64::new(v, 0.0);
    Ok(match quantity {
        LimitQuantity::Energy => (c(aw.energy(n) / (oq * oq)), c(wilson.energy(n))),
        LimitQuantity::Potential => (aw.potential(aw.point(x)) / (oq * oq), wilson.potential_conj(wpt)),
        LimitQuantity::Polynomial => {
            let p = aw.recurrence(n).value(n, aw.eta(aw.point(x)));
            (p / libm::pow(oq, 3.0 * n as f64), wilson.recurrence(n).value(n, wilson.eta(wpt)))
        }
        LimitQuantity::Phi0 => {
            let tol = SeriesTolerance { rel_eps: 1e-17, max_terms: 1_000_000 };
            let qq = specfun::q_pochhammer_inf(c(q), q, tol)?.re;
            let sum_a: f64 = wilson.params().a.iter().map(|a| a.re).sum();
            let pre = qq * qq * qq * libm::pow(oq, 3.0 - sum_a);
            (c(pre * aw.ground_state(x)), c(wilson.ground_state(x_prime)))
        }
        LimitQuantity::ForwardAmplitude => (c(aw.coefficients(n).f / (oq * oq)), c(-wilson.coefficients(n).f)),
        LimitQuantity::BackwardAmplitude => (c(aw.coefficients(n).b), c(-wilson.coefficients(n).b)),
    })
}

/// For each of energy, potential, `f_n` and `b_n`: the largest relative
/// deviation at each `L`, checked for strict decrease and final size.
pub fn check_limit_aw_wilson(wilson: &System, lengths: &[f64], cfg: &VerifyConfig) -> Result<Vec<CheckResult>> {
    if lengths.len() < 3 || lengths.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("L sequence must increase and have at least 3 entries".into()));
    }
    let levels: Vec<usize> = (1..=3).collect();
    let xs: Vec<f64> = wilson.sample_points(cfg.samples.min(10), cfg.seed);
    let items: [(&str, LimitQuantity, bool); 4] = [
        ("limit.energy", LimitQuantity::Energy, false),
        ("limit.potential", LimitQuantity::Potential, true),
        ("limit.forward_amplitude", LimitQuantity::ForwardAmplitude, false),
        ("limit.backward_amplitude", LimitQuantity::BackwardAmplitude, false),
    ];
    let mut r = Run::new(wilson, cfg);
    for (id, quantity, pointwise) in items {
        let mut seq = Vec::with_capacity(lengths.len());
        let mut count = 0;
        for &l in lengths {
            let mut dev: f64 = 0.0;
            let ns: &[usize] = if quantity == LimitQuantity::BackwardAmplitude { &[0, 1, 2, 3] } else { &levels };
            for &n in ns {
                let pts: &[f64] = if pointwise { &xs } else { &[1.0] };
                for &x in pts {
                    let (got, want) = aw_to_wilson_scaled(quantity, wilson, l, n, x)?;
                    dev = dev.max((got - want).norm() / want.norm());
                    count += 1;
                }
                if pointwise {
                    break;
                }
            }
            seq.push(dev);
        }
        let last = *seq.last().unwrap_or(&f64::MAX);
        let worst_ratio = seq.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
        let decreasing = seq.windows(2).all(|w| w[1] < w[0]);
        let note = (!decreasing).then(|| "deviation not strictly decreasing".to_string());
        let tol = cfg.tol.unwrap_or(TOL_LIMIT);
        r.emit_fixed(id, (0, 3), Acc { max: last, count }, tol, note, seq.clone());
        let mono = Acc { max: if decreasing { worst_ratio } else { f64::MAX }, count: seq.len() };
        r.emit_fixed(&format!("{id}.decreasing"), (0, 3), mono, 1.0, None, seq);
    }
    Ok(r.out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::tests::fixtures;

    fn failures(v: &[CheckResult]) -> Vec<String> {
        v.iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{} {}: {:e} > {:e} {:?}", c.family, c.check_id, c.max_residual, c.tolerance, c.note))
            .collect()
    }

    fn quick() -> VerifyConfig {
        VerifyConfig { n_max: 6, samples: 6, ortho_n_max: 3, shift_n_max: 4, lambda_n_max: 3, ..Default::default() }
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(Suite::from_name(s.name()), Some(s));
        }
        assert_eq!(Suite::from_name("shape-invariance"), Some(Suite::ShapeInvariance));
        assert_eq!(Suite::from_name("nope"), None);
    }

    #[test]
    fn algebraic_suites_pass_on_fixtures() {
        let cfg = quick();
        for s in fixtures() {
            for suite in [
                Suite::Eigen,
                Suite::ShapeInvariance,
                Suite::Closure,
                Suite::DualClosure,
                Suite::Shifts,
                Suite::Ladder,
                Suite::Coherent,
            ] {
                let v = run_suite(suite, &s, &cfg).unwrap();
                assert!(!v.is_empty());
                let f = failures(&v);
                assert!(f.is_empty(), "{f:?}");
            }
        }
    }

    #[test]
    fn q_hermite_coherent_value() {
        let s = System::new(FamilyId::ContinuousQHermite, ParamSet::new().with_q(0.5)).unwrap();
        let e = coherent_state(&s, C64::new(0.2, 0.0), core::f64::consts::FRAC_PI_2).unwrap();
        let c = e.closed_form.unwrap();
        assert!((e.partial_sum - c).norm() < 1e-12 * c.norm(), "{e:?}");
        // at x = π/2: 1/(0.4i, -0.4i; q)_∞ = 1/Π(1 + 0.16 q^{2k})
        let mut want = 1.0;
        for k in 0..200 {
            want /= 1.0 + 0.16 * 0.25f64.powi(k);
        }
        assert!((c.re - want).abs() < 1e-14 && c.im.abs() < 1e-14);
        let zero = coherent_state(&s, ZERO, 1.0).unwrap();
        assert_eq!(zero.partial_sum, ONE);
    }

    #[test]
    fn number_operator_forms() {
        let mp = System::new(
            FamilyId::MeixnerPollaczek,
            ParamSet::new().with_real_a(&[1.0]).with_phi(core::f64::consts::FRAC_PI_6),
        )
        .unwrap();
        assert!((number_operator(&mp, 3.0).unwrap() - 3.0).abs() < 1e-14);
        for s in fixtures() {
            match check_number_operator(&s, 0, 10, &VerifyConfig::default()) {
                Ok(c) => assert!(c.passed, "{c:?}"),
                Err(e) => assert!(matches!(e, Error::Regime(_)), "{e}"),
            }
            assert!(number_operator(&s, 0.0).map(|v| v.abs() < 1e-15).unwrap_or(true));
        }
        let aw = System::new(
            FamilyId::AskeyWilson,
            ParamSet::new()
                .with_a(&[C64::new(0.5, 0.0), C64::new(0.6, 0.0), C64::new(0.3, 0.4), C64::new(0.3, -0.4)])
                .with_q(0.55),
        )
        .unwrap();
        assert!(check_number_operator(&aw, 0, 10, &VerifyConfig::default()).unwrap().passed);
    }

    #[test]
    fn spectrum_generation() {
        for s in fixtures() {
            for n in 0..=10 {
                let e = spectrum_from_shape_invariance(&s, n).unwrap();
                assert!(pure_rel(e, s.energy(n)) < 1e-10, "{} n={n}", s.id());
            }
        }
    }

    #[test]
    fn limit_energy_converges() {
        let w = System::new(
            FamilyId::Wilson,
            ParamSet::new().with_a(&[C64::new(0.6, 0.0), C64::new(0.9, 0.0), C64::new(1.1, 0.4), C64::new(1.1, -0.4)]),
        )
        .unwrap();
        let (g, w0) = aw_to_wilson_scaled(LimitQuantity::Energy, &w, 20.0, 0, 1.0).unwrap();
        assert_eq!((g, w0), (ZERO, ZERO));
        let dev = |l: f64| {
            let (g, t) = aw_to_wilson_scaled(LimitQuantity::Energy, &w, l, 2, 1.0).unwrap();
            (g - t).norm()
        };
        assert!(dev(40.0) < dev(20.0) && dev(80.0) < dev(40.0));
        let (b, t) = aw_to_wilson_scaled(LimitQuantity::BackwardAmplitude, &w, 80.0, 0, 1.0).unwrap();
        assert_eq!(t, ONE);
        assert!((b.re - libm::exp(core::f64::consts::PI / 160.0)).abs() < 1e-12);
    }
}
