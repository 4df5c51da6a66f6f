//! The eleven families.
//!
//! | family | η | parameters | δ |
//! |---|---|---|---|
//! | continuous Hahn | x | a₁, a₂ (Re > 0) | +½ |
//! | Meixner-Pollaczek | x | a > 0, 0 < φ < π | +½ |
//! | Wilson | x² | a₁..a₄ (Re > 0, conjugate-closed) | +½ |
//! | continuous dual Hahn | x² | a₁..a₃ (Re > 0, conjugate-closed) | +½ |
//! | Askey-Wilson | cos x | a₁..a₄ (\|a\| < 1, conjugate-closed), q | ×q^½ |
//! | continuous dual q-Hahn | cos x | a₁..a₃, q | ×q^½ |
//! | Al-Salam-Chihara | cos x | a₁, a₂, q | ×q^½ |
//! | continuous big q-Hermite | cos x | -1 < a < 1, q | ×q^½ |
//! | continuous q-Hermite | cos x | q | none |
//! | continuous q-Jacobi | cos x | α, β ≥ -½, q | +1 |
//! | continuous q-Laguerre | cos x | α ≥ -½, q | +1 |
//!
//! Complex parameters of the continuous Hahn family are completed by
//! `a₃ = a₁*`, `a₄ = a₂*`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::dd::{Cdd, Dd};
use crate::poly::{EtaPolynomial, Point, DEGREE_CAP};
use crate::specfun::{
    self, basic_hypergeometric_phi_dd, hypergeometric_f_dd, ln_abs_gamma, pochhammer, SeriesTolerance,
};
use crate::{Error, Result, C64};

const I: C64 = C64::new(0.0, 1.0);
const ONE: C64 = C64::new(1.0, 0.0);
const ZERO: C64 = C64::new(0.0, 0.0);
const CONJ_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum FamilyId {
    ContinuousHahn,
    MeixnerPollaczek,
    Wilson,
    ContinuousDualHahn,
    AskeyWilson,
    ContinuousDualQHahn,
    AlSalamChihara,
    ContinuousBigQHermite,
    ContinuousQHermite,
    ContinuousQJacobi,
    ContinuousQLaguerre,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EtaKind {
    /// `η = x` on `(-∞, ∞)`.
    Linear,
    /// `η = x²` on `(0, ∞)`.
    Quadratic,
    /// `η = cos x` on `(0, π)`.
    Cosine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FamilySpec {
    pub id: FamilyId,
    pub name: &'static str,
    pub slug: &'static str,
    pub label: &'static str,
    pub eta: EtaKind,
    pub n_a: usize,
    pub uses_q: bool,
    pub uses_phi: bool,
    pub uses_alpha: bool,
    pub uses_beta: bool,
    pub params: &'static str,
}

macro_rules! spec {
    ($id:ident, $name:expr, $slug:expr, $label:expr, $eta:ident, $n_a:expr, q=$q:expr, phi=$phi:expr, alpha=$al:expr, beta=$be:expr, $params:expr) => {
        FamilySpec {
            id: FamilyId::$id,
            name: $name,
            slug: $slug,
            label: $label,
            eta: EtaKind::$eta,
            n_a: $n_a,
            uses_q: $q,
            uses_phi: $phi,
            uses_alpha: $al,
            uses_beta: $be,
            params: $params,
        }
    };
}

static CATALOG: [FamilySpec; 11] = [
    spec!(
        ContinuousHahn,
        "continuous Hahn",
        "continuous-hahn",
        "KS1.4",
        Linear,
        2,
        q = false,
        phi = false,
        alpha = false,
        beta = false,
        "a1, a2 complex, Re > 0"
    ),
    spec!(
        MeixnerPollaczek,
        "Meixner-Pollaczek",
        "meixner-pollaczek",
        "KS1.7",
        Linear,
        1,
        q = false,
        phi = true,
        alpha = false,
        beta = false,
        "a > 0, 0 < phi < pi"
    ),
    spec!(
        Wilson,
        "Wilson",
        "wilson",
        "KS1.1",
        Quadratic,
        4,
        q = false,
        phi = false,
        alpha = false,
        beta = false,
        "a1..a4, Re > 0, closed under conjugation"
    ),
    spec!(
        ContinuousDualHahn,
        "continuous dual Hahn",
        "continuous-dual-hahn",
        "KS1.3",
        Quadratic,
        3,
        q = false,
        phi = false,
        alpha = false,
        beta = false,
        "a1..a3, Re > 0, closed under conjugation"
    ),
    spec!(
        AskeyWilson,
        "Askey-Wilson",
        "askey-wilson",
        "KS3.1",
        Cosine,
        4,
        q = true,
        phi = false,
        alpha = false,
        beta = false,
        "a1..a4, |a| < 1, closed under conjugation; 0 < q < 1"
    ),
    spec!(
        ContinuousDualQHahn,
        "continuous dual q-Hahn",
        "continuous-dual-q-hahn",
        "KS3.3",
        Cosine,
        3,
        q = true,
        phi = false,
        alpha = false,
        beta = false,
        "a1..a3, |a| < 1, closed under conjugation; 0 < q < 1"
    ),
    spec!(
        AlSalamChihara,
        "Al-Salam-Chihara",
        "al-salam-chihara",
        "KS3.8",
        Cosine,
        2,
        q = true,
        phi = false,
        alpha = false,
        beta = false,
        "a1, a2, |a| < 1, closed under conjugation; 0 < q < 1"
    ),
    spec!(
        ContinuousBigQHermite,
        "continuous big q-Hermite",
        "continuous-big-q-hermite",
        "KS3.18",
        Cosine,
        1,
        q = true,
        phi = false,
        alpha = false,
        beta = false,
        "-1 < a < 1; 0 < q < 1"
    ),
    spec!(
        ContinuousQHermite,
        "continuous q-Hermite",
        "continuous-q-hermite",
        "KS3.26",
        Cosine,
        0,
        q = true,
        phi = false,
        alpha = false,
        beta = false,
        "0 < q < 1"
    ),
    spec!(
        ContinuousQJacobi,
        "continuous q-Jacobi",
        "continuous-q-jacobi",
        "KS3.10",
        Cosine,
        0,
        q = true,
        phi = false,
        alpha = true,
        beta = true,
        "alpha, beta >= -1/2; 0 < q < 1"
    ),
    spec!(
        ContinuousQLaguerre,
        "continuous q-Laguerre",
        "continuous-q-laguerre",
        "KS3.19",
        Cosine,
        0,
        q = true,
        phi = false,
        alpha = true,
        beta = false,
        "alpha >= -1/2; 0 < q < 1"
    ),
];

pub fn catalog() -> &'static [FamilySpec] {
    &CATALOG
}

impl FamilyId {
    pub const ALL: [FamilyId; 11] = [
        FamilyId::ContinuousHahn,
        FamilyId::MeixnerPollaczek,
        FamilyId::Wilson,
        FamilyId::ContinuousDualHahn,
        FamilyId::AskeyWilson,
        FamilyId::ContinuousDualQHahn,
        FamilyId::AlSalamChihara,
        FamilyId::ContinuousBigQHermite,
        FamilyId::ContinuousQHermite,
        FamilyId::ContinuousQJacobi,
        FamilyId::ContinuousQLaguerre,
    ];

    pub fn spec(self) -> &'static FamilySpec {
        &CATALOG[self as usize]
    }

    pub fn slug(self) -> &'static str {
        self.spec().slug
    }

    /// Accepts the slug, or the slug without the `continuous-` prefix.
    pub fn from_slug(s: &str) -> Option<Self> {
        let s = s.trim().to_ascii_lowercase().replace(['_', ' '], "-");
        CATALOG.iter().find(|f| f.slug == s || f.slug.strip_prefix("continuous-") == Some(s.as_str())).map(|f| f.id)
    }

    pub fn is_q(self) -> bool {
        self.spec().uses_q
    }
}

impl core::fmt::Display for FamilyId {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.slug())
    }
}

/// Parameters of a family; unused fields stay `None`.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ParamSet {
    #[cfg_attr(feature = "serde", serde(default))]
    pub a: Vec<C64>,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub q: Option<f64>,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub phi: Option<f64>,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub alpha: Option<f64>,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub beta: Option<f64>,
}

impl ParamSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_a(mut self, a: &[C64]) -> Self {
        self.a = a.to_vec();
        self
    }

    pub fn with_real_a(mut self, a: &[f64]) -> Self {
        self.a = a.iter().map(|&x| C64::new(x, 0.0)).collect();
        self
    }

    pub fn with_q(mut self, q: f64) -> Self {
        self.q = Some(q);
        self
    }

    pub fn with_phi(mut self, phi: f64) -> Self {
        self.phi = Some(phi);
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = Some(alpha);
        self
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = Some(beta);
        self
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

const SUBSCRIPTS: [&str; 5] = ["₁", "₂", "₃", "₄", "₅"];

fn conjugate_closed(a: &[C64]) -> bool {
    let mut used = vec![false; a.len()];
    for x in a {
        let target = x.conj();
        let hit = (0..a.len()).find(|&j| !used[j] && (a[j] - target).norm() <= CONJ_EPS * (1.0 + target.norm()));
        match hit {
            Some(j) => used[j] = true,
            None => return false,
        }
    }
    true
}

pub fn validate_params(id: FamilyId, p: &ParamSet) -> Result<()> {
    let spec = id.spec();
    if p.a.len() != spec.n_a {
        return Err(invalid(format!("{} takes {} 'a' parameter(s), got {}", spec.slug, spec.n_a, p.a.len())));
    }
    if p.a.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
        return Err(invalid("non-finite parameter"));
    }
    let check_presence = |given: bool, used: bool, name: &str| -> Result<()> {
        match (given, used) {
            (true, false) => Err(invalid(format!("{} does not take {name}", spec.slug))),
            (false, true) => Err(invalid(format!("{} requires {name}", spec.slug))),
            _ => Ok(()),
        }
    };
    check_presence(p.q.is_some(), spec.uses_q, "q")?;
    check_presence(p.phi.is_some(), spec.uses_phi, "phi")?;
    check_presence(p.alpha.is_some(), spec.uses_alpha, "alpha")?;
    check_presence(p.beta.is_some(), spec.uses_beta, "beta")?;
    if let Some(q) = p.q {
        if !(q > 0.0 && q < 1.0) {
            return Err(invalid("0<q<1 violated"));
        }
    }
    match spec.eta {
        EtaKind::Linear | EtaKind::Quadratic => {
            if id == FamilyId::MeixnerPollaczek {
                let a = p.a[0];
                if a.im != 0.0 {
                    return Err(invalid("a must be real"));
                }
                if !(a.re > 0.0) {
                    return Err(invalid("a>0 violated"));
                }
                let phi = p.phi.unwrap_or(f64::NAN);
                if !(phi > 0.0 && phi < PI) {
                    return Err(invalid("0<φ<π violated"));
                }
            } else {
                for (j, a) in p.a.iter().enumerate() {
                    if !(a.re > 0.0) {
                        return Err(invalid(format!("Re a{}>0 violated", SUBSCRIPTS[j])));
                    }
                }
            }
            if spec.eta == EtaKind::Quadratic && !conjugate_closed(&p.a) {
                return Err(invalid("parameters not closed under complex conjugation"));
            }
        }
        EtaKind::Cosine => {
            for (j, a) in p.a.iter().enumerate() {
                if a.norm() >= 1.0 {
                    return Err(invalid(format!("|a{}| ≥ 1", SUBSCRIPTS[j])));
                }
            }
            if id == FamilyId::ContinuousBigQHermite && p.a[0].im != 0.0 {
                return Err(invalid("a must be real"));
            }
            if !conjugate_closed(&p.a) {
                return Err(invalid("parameters not closed under complex conjugation"));
            }
            for (name, v) in [("α", p.alpha), ("β", p.beta)] {
                if let Some(v) = v {
                    if !(v >= -0.5) || !v.is_finite() {
                        return Err(invalid(format!("{name}≥-1/2 violated")));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Elementary symmetric polynomials `b_0..b_4` of up to four values.
fn elementary(a: &[C64]) -> [C64; 5] {
    let mut e = [ONE, ZERO, ZERO, ZERO, ZERO];
    for &x in a {
        for k in (1..5).rev() {
            e[k] += e[k - 1] * x;
        }
    }
    e
}

/// Coefficient bundle for level `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    /// leading coefficient `P_n = c_n η^n + ...`
    pub c: f64,
    /// `ηP_n = A_n P_{n+1} + B_n P_n + C_n P_{n-1}`
    pub big_a: f64,
    pub big_b: f64,
    pub big_c: f64,
    /// monic recurrence coefficients
    pub a_rec: f64,
    pub b_rec: f64,
    /// forward and backward shift amplitudes
    pub f: f64,
    pub b: f64,
    /// `h_0 / h_n`
    pub norm_ratio: f64,
}

/// Closure polynomials `R_0(y)`, `R_1(y)`, `R_{-1}(y)`; index `k` holds the
/// coefficient of `y^k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosurePolys {
    pub r0: [f64; 3],
    pub r1: [f64; 2],
    pub rm1: [f64; 3],
}

impl ClosurePolys {
    pub fn r0(&self, y: f64) -> f64 {
        self.r0[0] + y * (self.r0[1] + y * self.r0[2])
    }

    pub fn r1(&self, y: f64) -> f64 {
        self.r1[0] + y * self.r1[1]
    }

    pub fn rm1(&self, y: f64) -> f64 {
        self.rm1[0] + y * (self.rm1[1] + y * self.rm1[2])
    }

    /// Roots `α_±(y) = (R_1 ± sqrt(R_1² + 4R_0)) / 2`.
    pub fn alpha(&self, y: f64) -> (f64, f64) {
        let r1 = self.r1(y);
        let d = libm::sqrt(r1 * r1 + 4.0 * self.r0(y));
        (0.5 * (r1 + d), 0.5 * (r1 - d))
    }
}

/// Conditioning note attached to series evaluations past [`DEGREE_CAP`] or
/// whose terms cancel beyond what double-double accumulation absorbs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditioningWarning {
    pub degree: usize,
    /// a-priori bound on `|error| / (1 + |P_n|)`
    pub error_estimate: f64,
}

impl core::fmt::Display for ConditioningWarning {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        if self.degree > DEGREE_CAP {
            write!(f, "degree {} exceeds {DEGREE_CAP}; ", self.degree)?;
        }
        write!(f, "series error estimate {:.1e}", self.error_estimate)
    }
}

/// Error estimates above this raise a [`ConditioningWarning`].
pub const SERIES_WARN_LEVEL: f64 = 1e-12;
/// Per-unit-magnitude rounding of a double-double series, with headroom for
/// the operation count.
const DD_ROUNDING: f64 = 1e-30;

fn scaled(pre: C64, s: specfun::DdSum) -> (C64, f64) {
    (pre * s.value, pre.norm() * s.magnitude * DD_ROUNDING)
}

/// A validated family with fixed parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct System {
    id: FamilyId,
    params: ParamSet,
    q: f64,
    /// factors `a_j` of the numerator of `V`; for the continuous Hahn family
    /// all four of `a₁, a₂, a₁*, a₂*`
    a: Vec<C64>,
}

impl System {
    pub fn new(id: FamilyId, params: ParamSet) -> Result<Self> {
        validate_params(id, &params)?;
        let q = params.q.unwrap_or(1.0);
        let qh = |e: f64| C64::new(libm::pow(q, e), 0.0);
        let a = match id {
            FamilyId::ContinuousHahn => {
                let (a1, a2) = (params.a[0], params.a[1]);
                vec![a1, a2, a1.conj(), a2.conj()]
            }
            FamilyId::ContinuousQJacobi => {
                let (al, be) = (params.alpha.unwrap_or(0.0), params.beta.unwrap_or(0.0));
                vec![qh((al + 0.5) / 2.0), qh((al + 1.5) / 2.0), -qh((be + 0.5) / 2.0), -qh((be + 1.5) / 2.0)]
            }
            FamilyId::ContinuousQLaguerre => {
                let al = params.alpha.unwrap_or(0.0);
                vec![qh((al + 0.5) / 2.0), qh((al + 1.5) / 2.0)]
            }
            _ => params.a.clone(),
        };
        Ok(Self { id, params, q, a })
    }

    pub fn id(&self) -> FamilyId {
        self.id
    }

    pub fn params(&self) -> &ParamSet {
        &self.params
    }

    pub fn eta_kind(&self) -> EtaKind {
        self.id.spec().eta
    }

    /// `q`, or 1 for the families without it.
    pub fn q(&self) -> f64 {
        self.q
    }

    /// Factors of the numerator of the potential, after completing or
    /// translating the family parameters.
    pub fn potential_factors(&self) -> &[C64] {
        &self.a
    }

    /// Parameters shifted by `s δ`.
    pub fn shifted_params(&self, s: f64) -> ParamSet {
        let mut p = self.params.clone();
        match self.id {
            FamilyId::ContinuousHahn | FamilyId::MeixnerPollaczek | FamilyId::Wilson | FamilyId::ContinuousDualHahn => {
                for a in &mut p.a {
                    *a += 0.5 * s;
                }
            }
            FamilyId::ContinuousQJacobi | FamilyId::ContinuousQLaguerre => {
                p.alpha = p.alpha.map(|x| x + s);
                p.beta = p.beta.map(|x| x + s);
            }
            _ => {
                let f = libm::pow(self.q, 0.5 * s);
                for a in &mut p.a {
                    *a *= f;
                }
            }
        }
        p
    }

    /// The system at `λ + sδ`.
    pub fn shifted(&self, s: usize) -> Result<Self> {
        Self::new(self.id, self.shifted_params(s as f64))
    }

    // ---- geometry ----

    /// `γ`: 1, or `log q`.
    pub fn gamma(&self) -> f64 {
        match self.eta_kind() {
            EtaKind::Cosine => libm::log(self.q),
            _ => 1.0,
        }
    }

    /// `κ`: 1, or `1/q`.
    pub fn kappa(&self) -> f64 {
        match self.eta_kind() {
            EtaKind::Cosine => 1.0 / self.q,
            _ => 1.0,
        }
    }

    pub fn interval(&self) -> (f64, f64) {
        match self.eta_kind() {
            EtaKind::Linear => (f64::NEG_INFINITY, f64::INFINITY),
            EtaKind::Quadratic => (0.0, f64::INFINITY),
            EtaKind::Cosine => (0.0, PI),
        }
    }

    pub fn point(&self, x: f64) -> Point {
        match self.eta_kind() {
            EtaKind::Cosine => Point(C64::new(libm::cos(x), libm::sin(x))),
            _ => Point(C64::new(x, 0.0)),
        }
    }

    /// The point `x + i s γ`.
    pub fn shift(&self, p: Point, s: f64) -> Point {
        match self.eta_kind() {
            EtaKind::Cosine => Point(p.0 * libm::pow(self.q, -s)),
            _ => Point(p.0 + I * s),
        }
    }

    /// The point `x*`.
    pub fn conj_point(&self, p: Point) -> Point {
        match self.eta_kind() {
            EtaKind::Cosine => Point(ONE / p.0.conj()),
            _ => Point(p.0.conj()),
        }
    }

    pub fn eta(&self, p: Point) -> C64 {
        match self.eta_kind() {
            EtaKind::Linear => p.0,
            EtaKind::Quadratic => p.0 * p.0,
            EtaKind::Cosine => 0.5 * (p.0 + ONE / p.0),
        }
    }

    /// Auxiliary function `φ(x)`: 1, `2x` or `2 sin x`.
    pub fn aux_phi(&self, p: Point) -> C64 {
        match self.eta_kind() {
            EtaKind::Linear => ONE,
            EtaKind::Quadratic => 2.0 * p.0,
            EtaKind::Cosine => -I * (p.0 - ONE / p.0),
        }
    }

    /// Deterministic low-discrepancy sample points inside the interval, away
    /// from the singular points of the potential.
    pub fn sample_points(&self, count: usize, seed: u64) -> Vec<f64> {
        let (lo, hi) = match self.eta_kind() {
            EtaKind::Linear => (-3.0, 3.0),
            EtaKind::Quadratic => (0.05, 3.0),
            EtaKind::Cosine => (0.05, PI - 0.05),
        };
        let golden = 0.618_033_988_749_894_8;
        let start = (seed % 1_000_003) as f64 * 0.754_877_666_246_692_7;
        (1..=count)
            .map(|k| {
                let t = start + k as f64 * golden;
                lo + (hi - lo) * (t - libm::floor(t))
            })
            .collect()
    }

    // ---- potential and ground state ----

    /// `V` continued to complex points.
    pub fn potential(&self, p: Point) -> C64 {
        let u = p.0;
        match self.id {
            FamilyId::ContinuousHahn => (self.a[0] + I * u) * (self.a[1] + I * u),
            FamilyId::MeixnerPollaczek => {
                let phi = self.phi();
                C64::from_polar(1.0, 0.5 * PI - phi) * (self.a[0] + I * u)
            }
            FamilyId::Wilson | FamilyId::ContinuousDualHahn => {
                let num = self.a.iter().fold(ONE, |acc, &a| acc * (a + I * u));
                num / (2.0 * I * u * (2.0 * I * u + 1.0))
            }
            _ => {
                let num = self.a.iter().fold(ONE, |acc, &a| acc * (1.0 - a * u));
                num / ((1.0 - u * u) * (1.0 - self.q * u * u))
            }
        }
    }

    /// `V*`, the conjugate function continued to complex points.
    pub fn potential_conj(&self, p: Point) -> C64 {
        self.potential(self.conj_point(p)).conj()
    }

    pub fn ground_state(&self, x: f64) -> f64 {
        libm::exp(self.ln_ground_state(x))
    }

    /// `ln φ_0(x)`; `-∞` where `φ_0` vanishes.
    pub fn ln_ground_state(&self, x: f64) -> f64 {
        let lg = |z: C64| ln_abs_gamma(z).unwrap_or(f64::INFINITY);
        let ix = C64::new(0.0, x);
        match self.id {
            FamilyId::ContinuousHahn => lg(self.a[0] + ix) + lg(self.a[1] + ix),
            FamilyId::MeixnerPollaczek => (self.phi() - 0.5 * PI) * x + lg(self.a[0] + ix),
            FamilyId::Wilson | FamilyId::ContinuousDualHahn => {
                if x == 0.0 {
                    return f64::NEG_INFINITY;
                }
                self.a.iter().map(|&a| lg(a + ix)).sum::<f64>() - lg(2.0 * ix)
            }
            _ => {
                let tol = SeriesTolerance::default();
                let z = C64::new(libm::cos(x), libm::sin(x));
                let num = specfun::q_pochhammer_inf(z * z, self.q, tol).unwrap_or(ZERO);
                let den = match self.id {
                    FamilyId::ContinuousQJacobi | FamilyId::ContinuousQLaguerre => {
                        // products in base q^{1/2}
                        let qh = libm::sqrt(self.q);
                        let mut d = specfun::q_pochhammer_inf(self.a[0] * z, qh, tol).unwrap_or(ONE);
                        if self.id == FamilyId::ContinuousQJacobi {
                            d *= specfun::q_pochhammer_inf(self.a[2] * z, qh, tol).unwrap_or(ONE);
                        }
                        d
                    }
                    _ => self
                        .a
                        .iter()
                        .map(|&a| specfun::q_pochhammer_inf(a * z, self.q, tol).unwrap_or(ONE))
                        .fold(ONE, |acc, v| acc * v),
                };
                libm::log(num.norm()) - libm::log(den.norm())
            }
        }
    }

    // ---- spectrum ----

    fn phi(&self) -> f64 {
        self.params.phi.unwrap_or(0.5 * PI)
    }

    fn alpha_p(&self) -> f64 {
        self.params.alpha.unwrap_or(0.0)
    }

    fn beta_p(&self) -> f64 {
        self.params.beta.unwrap_or(0.0)
    }

    fn qp(&self, e: f64) -> f64 {
        libm::pow(self.q, e)
    }

    fn qpoch(&self, a: C64, n: usize) -> C64 {
        specfun::q_pochhammer(a, self.q, n).unwrap_or(C64::new(f64::NAN, 0.0))
    }

    fn esym(&self) -> [C64; 5] {
        elementary(&self.a)
    }

    /// `b_1 = Σ a_j` as a real number for the Wilson-type families.
    fn b1(&self) -> f64 {
        self.esym()[1].re
    }

    fn b4(&self) -> f64 {
        self.esym()[4].re
    }

    pub fn energy(&self, n: usize) -> f64 {
        self.energy_ext(n as i64)
    }

    /// The closed-form energy, continued to any integer level.
    pub fn energy_ext(&self, n: i64) -> f64 {
        let nf = n as f64;
        match self.id {
            FamilyId::ContinuousHahn | FamilyId::Wilson => nf * (nf + self.b1() - 1.0),
            FamilyId::MeixnerPollaczek => 2.0 * nf * libm::sin(self.phi()),
            FamilyId::ContinuousDualHahn => nf,
            FamilyId::AskeyWilson => (self.qp(-nf) - 1.0) * (1.0 - self.b4() * self.qp(nf - 1.0)),
            FamilyId::ContinuousQJacobi => {
                (self.qp(-nf) - 1.0) * (1.0 - self.qp(nf + self.alpha_p() + self.beta_p() + 1.0))
            }
            _ => self.qp(-nf) - 1.0,
        }
    }

    pub fn closure_polys(&self) -> ClosurePolys {
        let e = self.esym();
        match self.id {
            FamilyId::ContinuousHahn => {
                let b1 = self.b1();
                let s = self.a[0] + self.a[1];
                let p = self.a[0] * self.a[1];
                ClosurePolys {
                    r0: [b1 * (b1 - 2.0), 4.0, 0.0],
                    r1: [2.0, 0.0],
                    rm1: [4.0 * (s.re - 1.0) * p.im, 2.0 * s.im, 0.0],
                }
            }
            FamilyId::MeixnerPollaczek => {
                let phi = self.phi();
                let sn = libm::sin(phi);
                ClosurePolys {
                    r0: [4.0 * sn * sn, 0.0, 0.0],
                    r1: [0.0, 0.0],
                    rm1: [2.0 * self.a[0].re * libm::sin(2.0 * phi), 2.0 * libm::cos(phi), 0.0],
                }
            }
            FamilyId::Wilson => {
                let b1 = e[1].re;
                ClosurePolys {
                    r0: [b1 * (b1 - 2.0), 4.0, 0.0],
                    r1: [2.0, 0.0],
                    rm1: [(2.0 - b1) * e[3].re, b1 - 2.0 * e[2].re, -2.0],
                }
            }
            FamilyId::ContinuousDualHahn => {
                ClosurePolys { r0: [1.0, 0.0, 0.0], r1: [0.0, 0.0], rm1: [-e[2].re, 1.0 - 2.0 * e[1].re, -2.0] }
            }
            _ => {
                let q = self.q;
                let c = (1.0 / libm::sqrt(q) - libm::sqrt(q)).powi(2);
                let (shift, k, lin, cst) = match self.id {
                    FamilyId::ContinuousQJacobi => {
                        let (al, be) = (self.alpha_p(), self.beta_p());
                        let s = 1.0 + self.qp(al + be + 1.0);
                        let k = (1.0 + q).powi(2) * self.qp(al + be);
                        let m = -0.5
                            * c
                            * self.qp(0.25)
                            * (1.0 + libm::sqrt(q))
                            * (self.qp(al / 2.0) - self.qp(be / 2.0))
                            * (1.0 - self.qp((al + be) / 2.0));
                        (s, k, m, m * (1.0 + q) * self.qp((al + be) / 2.0))
                    }
                    FamilyId::ContinuousQLaguerre => {
                        let m = -0.5 * c * self.qp((self.alpha_p() + 0.5) / 2.0) * (1.0 + libm::sqrt(q));
                        (1.0, 0.0, m, 0.0)
                    }
                    _ => {
                        // Askey-Wilson form; the subfamilies have b_3 = b_4 = 0 where absent
                        let (b1, b3, b4) = (e[1].re, e[3].re, e[4].re);
                        let s = 1.0 + b4 / q;
                        let k = (1.0 + 1.0 / q).powi(2) * b4;
                        let m = -0.5 * c * (b1 + b3 / q);
                        (s, k, m, 0.5 * c * (1.0 + 1.0 / q) * (b3 + b1 * b4 / q))
                    }
                };
                // R_{-1} = lin·(y + shift) + cst
                ClosurePolys {
                    r0: [c * (shift * shift - k), 2.0 * c * shift, c],
                    r1: [c * shift, c],
                    rm1: [lin * shift + cst, lin, 0.0],
                }
            }
        }
    }

    // ---- coefficients ----

    /// Index of the parameter with the largest modulus.
    fn pivot(&self) -> Vec<C64> {
        let mut a = self.a.clone();
        if let Some(k) = (0..a.len()).max_by(|&i, &j| a[i].norm().total_cmp(&a[j].norm())) {
            a.swap(0, k);
        }
        a
    }

    fn leading(&self, n: usize) -> C64 {
        let nf = n as f64;
        let fact = pochhammer(ONE, n);
        match self.id {
            FamilyId::ContinuousHahn => pochhammer(C64::new(nf + self.b1() - 1.0, 0.0), n) / fact,
            FamilyId::MeixnerPollaczek => C64::new((2.0 * libm::sin(self.phi())).powi(n as i32), 0.0) / fact,
            FamilyId::Wilson => pochhammer(C64::new(nf + self.b1() - 1.0, 0.0), n) * (-1.0f64).powi(n as i32),
            FamilyId::ContinuousDualHahn => C64::new((-1.0f64).powi(n as i32), 0.0),
            FamilyId::AskeyWilson => self.qpoch(C64::new(self.b4() * self.qp(nf - 1.0), 0.0), n) * 2f64.powi(n as i32),
            FamilyId::ContinuousQJacobi => {
                let (al, be) = (self.alpha_p(), self.beta_p());
                let num = self.qpoch(C64::new(self.qp(nf + al + be + 1.0), 0.0), n);
                let den = self.qpoch(C64::new(self.q, 0.0), n)
                    * self.qpoch(C64::new(-self.qp((al + be + 1.0) / 2.0), 0.0), n)
                    * self.qpoch(C64::new(-self.qp((al + be + 2.0) / 2.0), 0.0), n);
                num / den * 2f64.powi(n as i32) * self.qp((al + 0.5) * nf / 2.0)
            }
            FamilyId::ContinuousQLaguerre => {
                C64::new(2f64.powi(n as i32) * self.qp((self.alpha_p() + 0.5) * nf / 2.0), 0.0)
                    / self.qpoch(C64::new(self.q, 0.0), n)
            }
            _ => C64::new(2f64.powi(n as i32), 0.0),
        }
    }

    fn a_rec(&self, n: usize) -> C64 {
        let nf = n as f64;
        let q = self.q;
        match self.id {
            FamilyId::ContinuousHahn => {
                let a = &self.a;
                let b1 = self.b1();
                let first = (nf + b1 - 1.0) * (nf + a[0] + a[2]) * (nf + a[0] + a[3])
                    / ((2.0 * nf + b1 - 1.0) * (2.0 * nf + b1));
                let second = if n == 0 {
                    ZERO
                } else {
                    nf * (nf + a[1] + a[2] - 1.0) * (nf + a[1] + a[3] - 1.0)
                        / ((2.0 * nf + b1 - 2.0) * (2.0 * nf + b1 - 1.0))
                };
                I * (a[0] - first + second)
            }
            FamilyId::MeixnerPollaczek => {
                let phi = self.phi();
                C64::new(-(nf + self.a[0].re) * libm::cos(phi) / libm::sin(phi), 0.0)
            }
            FamilyId::Wilson => {
                let a = &self.a;
                let b1 = self.b1();
                let first = (nf + b1 - 1.0) * (1..4).fold(ONE, |acc, j| acc * (nf + a[0] + a[j]))
                    / ((2.0 * nf + b1 - 1.0) * (2.0 * nf + b1));
                let second = if n == 0 {
                    ZERO
                } else {
                    nf * (nf + a[1] + a[2] - 1.0) * (nf + a[1] + a[3] - 1.0) * (nf + a[2] + a[3] - 1.0)
                        / ((2.0 * nf + b1 - 2.0) * (2.0 * nf + b1 - 1.0))
                };
                first + second - a[0] * a[0]
            }
            FamilyId::ContinuousDualHahn => {
                let a = &self.a;
                (nf + a[0] + a[1]) * (nf + a[0] + a[2]) + nf * (nf + a[1] + a[2] - 1.0) - a[0] * a[0]
            }
            FamilyId::AskeyWilson => {
                let a = self.pivot();
                if a[0].norm() == 0.0 {
                    return ZERO;
                }
                let b4 = self.b4();
                let qn = self.qp(nf);
                let first = (1.0 - b4 * self.qp(nf - 1.0)) * (1..4).fold(ONE, |acc, j| acc * (1.0 - a[0] * a[j] * qn))
                    / (a[0] * (1.0 - b4 * self.qp(2.0 * nf - 1.0)) * (1.0 - b4 * self.qp(2.0 * nf)));
                let second = if n == 0 {
                    ZERO
                } else {
                    let qm = self.qp(nf - 1.0);
                    a[0] * (1.0 - qn) * (1.0 - a[1] * a[2] * qm) * (1.0 - a[1] * a[3] * qm) * (1.0 - a[2] * a[3] * qm)
                        / ((1.0 - b4 * self.qp(2.0 * nf - 2.0)) * (1.0 - b4 * self.qp(2.0 * nf - 1.0)))
                };
                0.5 * (a[0] + ONE / a[0] - first - second)
            }
            FamilyId::ContinuousDualQHahn => {
                let a = self.pivot();
                if a[0].norm() == 0.0 {
                    return ZERO;
                }
                let qn = self.qp(nf);
                0.5 * (a[0] + ONE / a[0]
                    - (1.0 - a[0] * a[1] * qn) * (1.0 - a[0] * a[2] * qn) / a[0]
                    - a[0] * (1.0 - qn) * (1.0 - a[1] * a[2] * self.qp(nf - 1.0)))
            }
            FamilyId::AlSalamChihara => 0.5 * (self.a[0] + self.a[1]) * self.qp(nf),
            FamilyId::ContinuousBigQHermite => 0.5 * self.a[0] * self.qp(nf),
            FamilyId::ContinuousQHermite => ZERO,
            FamilyId::ContinuousQJacobi => {
                let (al, be) = (self.alpha_p(), self.beta_p());
                let s = al + be;
                let h = self.qp((al + 0.5) / 2.0);
                let t1 = (1.0 - self.qp(nf + al + 1.0))
                    * (1.0 - self.qp(nf + s + 1.0))
                    * (1.0 + self.qp(nf + (s + 1.0) / 2.0))
                    * (1.0 + self.qp(nf + (s + 2.0) / 2.0))
                    / (h * (1.0 - self.qp(2.0 * nf + s + 1.0)) * (1.0 - self.qp(2.0 * nf + s + 2.0)));
                let t2 = if n == 0 {
                    0.0
                } else {
                    h * (1.0 - self.qp(nf))
                        * (1.0 - self.qp(nf + be))
                        * (1.0 + self.qp(nf + s / 2.0))
                        * (1.0 + self.qp(nf + (s + 1.0) / 2.0))
                        / ((1.0 - self.qp(2.0 * nf + s)) * (1.0 - self.qp(2.0 * nf + s + 1.0)))
                };
                C64::new(0.5 * (h + 1.0 / h - t1 - t2), 0.0)
            }
            FamilyId::ContinuousQLaguerre => {
                C64::new(0.5 * self.qp(nf + (self.alpha_p() + 0.5) / 2.0) * (1.0 + libm::sqrt(q)), 0.0)
            }
        }
    }

    fn b_rec(&self, n: usize) -> C64 {
        if n == 0 {
            return ZERO;
        }
        let nf = n as f64;
        // (n + b1 - 2)/(2n + b1 - 3) and its q-analogue equal 1 at n = 1
        let wilson_ratio = |b1: f64| if n == 1 { 1.0 } else { (nf + b1 - 2.0) / (2.0 * nf + b1 - 3.0) };
        match self.id {
            FamilyId::ContinuousHahn => {
                let a = &self.a;
                let b1 = self.b1();
                let mut num = C64::new(nf * wilson_ratio(b1), 0.0);
                for j in 0..2 {
                    for k in 2..4 {
                        num *= nf + a[j] + a[k] - 1.0;
                    }
                }
                num / ((2.0 * nf + b1 - 2.0).powi(2) * (2.0 * nf + b1 - 1.0))
            }
            FamilyId::MeixnerPollaczek => {
                let s = 2.0 * libm::sin(self.phi());
                C64::new(nf * (nf + 2.0 * self.a[0].re - 1.0) / (s * s), 0.0)
            }
            FamilyId::Wilson => {
                let a = &self.a;
                let b1 = self.b1();
                let mut num = C64::new(nf * wilson_ratio(b1), 0.0);
                for j in 0..4 {
                    for k in j + 1..4 {
                        num *= nf + a[j] + a[k] - 1.0;
                    }
                }
                num / ((2.0 * nf + b1 - 2.0).powi(2) * (2.0 * nf + b1 - 1.0))
            }
            FamilyId::ContinuousDualHahn => {
                let a = &self.a;
                nf * (nf + a[0] + a[1] - 1.0) * (nf + a[0] + a[2] - 1.0) * (nf + a[1] + a[2] - 1.0)
            }
            FamilyId::AskeyWilson => {
                let a = &self.a;
                let b4 = self.b4();
                let qm = self.qp(nf - 1.0);
                let ratio =
                    if n == 1 { 1.0 } else { (1.0 - b4 * self.qp(nf - 2.0)) / (1.0 - b4 * self.qp(2.0 * nf - 3.0)) };
                let mut num = C64::new((1.0 - self.qp(nf)) * ratio, 0.0);
                for j in 0..4 {
                    for k in j + 1..4 {
                        num *= 1.0 - a[j] * a[k] * qm;
                    }
                }
                num / (4.0 * (1.0 - b4 * self.qp(2.0 * nf - 2.0)).powi(2) * (1.0 - b4 * self.qp(2.0 * nf - 1.0)))
            }
            FamilyId::ContinuousDualQHahn => {
                let a = &self.a;
                let qm = self.qp(nf - 1.0);
                0.25 * (1.0 - self.qp(nf))
                    * (1.0 - a[0] * a[1] * qm)
                    * (1.0 - a[0] * a[2] * qm)
                    * (1.0 - a[1] * a[2] * qm)
            }
            FamilyId::AlSalamChihara => 0.25 * (1.0 - self.qp(nf)) * (1.0 - self.a[0] * self.a[1] * self.qp(nf - 1.0)),
            FamilyId::ContinuousBigQHermite | FamilyId::ContinuousQHermite => C64::new(0.25 * (1.0 - self.qp(nf)), 0.0),
            FamilyId::ContinuousQJacobi => {
                let (al, be) = (self.alpha_p(), self.beta_p());
                let s = al + be;
                let ratio = if n == 1 { 1.0 } else { (1.0 - self.qp(nf + s)) / (1.0 - self.qp(2.0 * nf + s - 1.0)) };
                let num = (1.0 - self.qp(nf))
                    * (1.0 - self.qp(nf + al))
                    * (1.0 - self.qp(nf + be))
                    * ratio
                    * (1.0 + self.qp(nf + (s - 1.0) / 2.0))
                    * (1.0 + self.qp(nf + s / 2.0)).powi(2)
                    * (1.0 + self.qp(nf + (s + 1.0) / 2.0));
                let den = 4.0 * (1.0 - self.qp(2.0 * nf + s)).powi(2) * (1.0 - self.qp(2.0 * nf + s + 1.0));
                C64::new(num / den, 0.0)
            }
            FamilyId::ContinuousQLaguerre => {
                C64::new(0.25 * (1.0 - self.qp(nf)) * (1.0 - self.qp(nf + self.alpha_p())), 0.0)
            }
        }
    }

    /// `(f_n, b_n)` of the forward and backward shift relations.
    fn shift_amplitudes(&self, n: usize) -> (f64, f64) {
        let nf = n as f64;
        match self.id {
            FamilyId::ContinuousHahn => (nf + self.b1() - 1.0, nf + 1.0),
            FamilyId::MeixnerPollaczek => (2.0 * libm::sin(self.phi()), nf + 1.0),
            FamilyId::Wilson => (-nf * (nf + self.b1() - 1.0), -1.0),
            FamilyId::ContinuousDualHahn => (-nf, -1.0),
            FamilyId::AskeyWilson => (
                self.qp(nf / 2.0) * (self.qp(-nf) - 1.0) * (1.0 - self.b4() * self.qp(nf - 1.0)),
                self.qp(-(nf + 1.0) / 2.0),
            ),
            FamilyId::ContinuousQJacobi | FamilyId::ContinuousQLaguerre => {
                let al = self.alpha_p();
                let (num, pair) = if self.id == FamilyId::ContinuousQJacobi {
                    let s = al + self.beta_p();
                    (1.0 - self.qp(nf + s + 1.0), (1.0 + self.qp((s + 1.0) / 2.0)) * (1.0 + self.qp((s + 2.0) / 2.0)))
                } else {
                    (1.0, 1.0)
                };
                let h = self.qp((al + 1.5) / 2.0);
                (h * self.qp(-nf) * num / pair, self.qp(nf + 1.0) * (self.qp(-(nf + 1.0)) - 1.0) * pair / h)
            }
            _ => (self.qp(nf / 2.0) * (self.qp(-nf) - 1.0), self.qp(-(nf + 1.0) / 2.0)),
        }
    }

    /// `h_0`, the squared norm of the ground state.
    pub fn h0(&self) -> f64 {
        let tol = SeriesTolerance { rel_eps: 1e-17, max_terms: 100_000 };
        let g = |z: C64| specfun::gamma(z).unwrap_or(C64::new(f64::NAN, 0.0));
        let qinf = |a: C64| specfun::q_pochhammer_inf(a, self.q, tol).unwrap_or(C64::new(f64::NAN, 0.0));
        let a = &self.a;
        let pairs = |m: usize| -> Vec<C64> {
            let mut v = Vec::new();
            for j in 0..m {
                for k in j + 1..m {
                    v.push(a[j] * a[k]);
                }
            }
            v
        };
        let two_pi = 2.0 * PI;
        let inv = match self.id {
            FamilyId::ContinuousHahn => {
                let mut den = C64::new(two_pi, 0.0);
                for j in 0..2 {
                    for k in 2..4 {
                        den *= g(a[j] + a[k]);
                    }
                }
                g(C64::new(self.b1(), 0.0)) / den
            }
            FamilyId::MeixnerPollaczek => {
                let a0 = a[0].re;
                C64::new((2.0 * libm::sin(self.phi())).powf(2.0 * a0), 0.0) / (two_pi * g(C64::new(2.0 * a0, 0.0)))
            }
            FamilyId::Wilson | FamilyId::ContinuousDualHahn => {
                let m = a.len();
                let mut den = C64::new(two_pi, 0.0);
                for j in 0..m {
                    for k in j + 1..m {
                        den *= g(a[j] + a[k]);
                    }
                }
                let num = if self.id == FamilyId::Wilson { g(C64::new(self.b1(), 0.0)) } else { ONE };
                num / den
            }
            FamilyId::ContinuousQJacobi => {
                let (al, be) = (self.alpha_p(), self.beta_p());
                let s = al + be;
                let num = [
                    self.q,
                    self.qp(al + 1.0),
                    self.qp(be + 1.0),
                    -self.qp((s + 1.0) / 2.0),
                    -self.qp((s + 2.0) / 2.0),
                ]
                .iter()
                .fold(ONE, |acc, &x| acc * qinf(C64::new(x, 0.0)));
                let den = qinf(C64::new(self.qp((s + 2.0) / 2.0), 0.0)) * qinf(C64::new(self.qp((s + 3.0) / 2.0), 0.0));
                num / (two_pi * den)
            }
            FamilyId::ContinuousQLaguerre => {
                qinf(C64::new(self.q, 0.0)) * qinf(C64::new(self.qp(self.alpha_p() + 1.0), 0.0)) / two_pi
            }
            _ => {
                let num = pairs(a.len()).into_iter().fold(qinf(C64::new(self.q, 0.0)), |acc, x| acc * qinf(x));
                let den = if self.id == FamilyId::AskeyWilson { qinf(C64::new(self.b4(), 0.0)) } else { ONE };
                num / (two_pi * den)
            }
        };
        1.0 / inv.re
    }

    fn norm_ratio(&self, n: usize) -> f64 {
        let nf = n as f64;
        let a = &self.a;
        let poch_pairs = |m: usize, k: usize| -> C64 {
            let mut acc = ONE;
            for j in 0..m {
                for l in j + 1..m {
                    acc *= pochhammer(a[j] + a[l], k);
                }
            }
            acc
        };
        let qpoch_pairs = |m: usize, k: usize| -> C64 {
            let mut acc = ONE;
            for j in 0..m {
                for l in j + 1..m {
                    acc *= self.qpoch(a[j] * a[l], k);
                }
            }
            acc
        };
        let fact = pochhammer(ONE, n);
        let qfact = self.qpoch(C64::new(self.q, 0.0), n);
        let v = match self.id {
            FamilyId::ContinuousHahn => {
                let b1 = self.b1();
                let mut den = ONE;
                for j in 0..2 {
                    for k in 2..4 {
                        den *= pochhammer(a[j] + a[k], n);
                    }
                }
                let pre = if n == 0 { 1.0 } else { (b1 + 2.0 * nf - 1.0) / (b1 + nf - 1.0) };
                pre * fact * pochhammer(C64::new(b1, 0.0), n) / den
            }
            FamilyId::MeixnerPollaczek => fact / pochhammer(2.0 * a[0], n),
            FamilyId::Wilson => {
                let b1 = self.b1();
                let pre = if n == 0 { 1.0 } else { (b1 + 2.0 * nf - 1.0) / (b1 + nf - 1.0) };
                pre * pochhammer(C64::new(b1, 0.0), n) / (fact * poch_pairs(4, n))
            }
            FamilyId::ContinuousDualHahn => ONE / (fact * poch_pairs(3, n)),
            FamilyId::AskeyWilson => {
                let b4 = self.b4();
                let pre =
                    if n == 0 { 1.0 } else { (1.0 - b4 * self.qp(2.0 * nf - 1.0)) / (1.0 - b4 * self.qp(nf - 1.0)) };
                pre * self.qpoch(C64::new(b4, 0.0), n) / (qfact * qpoch_pairs(4, n))
            }
            FamilyId::ContinuousDualQHahn => ONE / (qfact * qpoch_pairs(3, n)),
            FamilyId::AlSalamChihara => ONE / (qfact * self.qpoch(a[0] * a[1], n)),
            FamilyId::ContinuousBigQHermite | FamilyId::ContinuousQHermite => ONE / qfact,
            FamilyId::ContinuousQJacobi => {
                let (al, be) = (self.alpha_p(), self.beta_p());
                let s = al + be;
                let pre = if n == 0 { 1.0 } else { (1.0 - self.qp(2.0 * nf + s + 1.0)) / (1.0 - self.qp(s + 1.0)) };
                let r = |x: f64| self.qpoch(C64::new(x, 0.0), n);
                let num = r(self.q) * r(self.qp(s + 1.0)) * r(-self.qp((s + 1.0) / 2.0));
                let den = r(self.qp(al + 1.0)) * r(self.qp(be + 1.0)) * r(-self.qp((s + 3.0) / 2.0));
                pre * num / den * self.qp(-(al + 0.5) * nf)
            }
            FamilyId::ContinuousQLaguerre => {
                let al = self.alpha_p();
                qfact / self.qpoch(C64::new(self.qp(al + 1.0), 0.0), n) * self.qp(-(al + 0.5) * nf)
            }
        };
        v.re
    }

    pub fn coefficients(&self, n: usize) -> Coefficients {
        let c = self.leading(n).re;
        let c_next = self.leading(n + 1).re;
        let b_rec = self.b_rec(n).re;
        let big_c = if n == 0 { 0.0 } else { c / self.leading(n - 1).re * b_rec };
        let (f, b) = self.shift_amplitudes(n);
        Coefficients {
            c,
            big_a: c / c_next,
            big_b: self.a_rec(n).re,
            big_c,
            a_rec: self.a_rec(n).re,
            b_rec,
            f,
            b,
            norm_ratio: self.norm_ratio(n),
        }
    }

    // ---- polynomials ----

    /// Three-term recurrence tables for levels `0..=n_max`.
    pub fn recurrence(&self, n_max: usize) -> Recurrence {
        let coeffs: Vec<Coefficients> = (0..=n_max).map(|n| self.coefficients(n)).collect();
        Recurrence {
            a: coeffs.iter().map(|c| c.big_a).collect(),
            b: coeffs.iter().map(|c| c.big_b).collect(),
            c: coeffs.iter().map(|c| c.big_c).collect(),
        }
    }

    /// `P_n` as a coefficient vector built from the three-term recurrence.
    pub fn eval_poly_recurrence(&self, n: usize) -> Result<EtaPolynomial> {
        if n > DEGREE_CAP {
            return Err(Error::DegreeCap(n));
        }
        let r = self.recurrence(n);
        let mut prev = EtaPolynomial::constant(ZERO);
        let mut cur = EtaPolynomial::constant(ONE);
        for k in 0..n {
            let next = &(&cur.times_eta()? - &cur.scale(C64::new(r.b[k], 0.0))) - &prev.scale(C64::new(r.c[k], 0.0));
            prev = cur;
            cur = next.scale(C64::new(1.0 / r.a[k], 0.0));
        }
        Ok(cur)
    }

    /// `P_n` at a point of the natural coordinate from its hypergeometric
    /// representation, with a warning past the degree cap or when the
    /// estimated error exceeds [`SERIES_WARN_LEVEL`].
    pub fn eval_poly_hypergeometric_checked(&self, n: usize, p: Point) -> Result<(C64, Option<ConditioningWarning>)> {
        let (v, err) = self.series(n, p)?;
        // relative to the smallest magnitude the exact value can have
        let error_estimate = err / (1.0 + (v.norm() - err).max(0.0));
        let warn = (n > DEGREE_CAP || !(error_estimate <= SERIES_WARN_LEVEL))
            .then_some(ConditioningWarning { degree: n, error_estimate });
        Ok((v, warn))
    }

    pub fn eval_poly_hypergeometric(&self, n: usize, p: Point) -> Result<C64> {
        self.series(n, p).map(|(v, _)| v)
    }

    /// Value and absolute error estimate.
    fn series(&self, n: usize, p: Point) -> Result<(C64, f64)> {
        // parameters are formed in double-double so that the cancelling
        // terms of the sum stay mutually consistent
        let nf = n as f64;
        let u = Cdd::from(p.0);
        let d = |x: f64| Cdd::real(Dd::from(x));
        let cd = Cdd::from;
        let i = cd(I);
        let fact = pochhammer(ONE, n);
        let qd = Dd::from(self.q);
        match self.id {
            FamilyId::ContinuousHahn => {
                let (a1, a2) = (cd(self.params.a[0]), cd(self.params.a[1]));
                let (d1, d2) = (a1 + a1.conj(), a1 + a2.conj());
                let top = a1 + a2 + a1.conj() + a2.conj() + d(nf - 1.0);
                let pre = I.powu(n as u32) * pochhammer(d1.to_c64(), n) * pochhammer(d2.to_c64(), n) / fact;
                Ok(scaled(pre, hypergeometric_f_dd(&[d(-nf), top, a1 + i * u], &[d1, d2], Cdd::ONE, n)?))
            }
            FamilyId::MeixnerPollaczek => {
                let (a, phi) = (self.a[0], self.phi());
                let pre = pochhammer(2.0 * a, n) / fact * C64::from_polar(1.0, nf * phi);
                let arg = ONE - C64::from_polar(1.0, -2.0 * phi);
                Ok(scaled(pre, hypergeometric_f_dd(&[d(-nf), cd(a) + i * u], &[cd(2.0 * a)], cd(arg), n)?))
            }
            FamilyId::Wilson | FamilyId::ContinuousDualHahn => {
                let a: Vec<Cdd> = self.a.iter().map(|&x| cd(x)).collect();
                let den: Vec<Cdd> = a[1..].iter().map(|&x| a[0] + x).collect();
                let pre = den.iter().fold(ONE, |acc, &x| acc * pochhammer(x.to_c64(), n));
                let mut num = vec![d(-nf)];
                if self.id == FamilyId::Wilson {
                    num.push(a.iter().fold(d(nf - 1.0), |acc, &x| acc + x));
                }
                num.push(a[0] + i * u);
                num.push(a[0] - i * u);
                Ok(scaled(pre, hypergeometric_f_dd(&num, &den, Cdd::ONE, n)?))
            }
            FamilyId::AskeyWilson
            | FamilyId::ContinuousDualQHahn
            | FamilyId::AlSalamChihara
            | FamilyId::ContinuousBigQHermite => {
                let a = self.pivot();
                if a[0].norm() == 0.0 {
                    return self.q_hermite_series(n, u);
                }
                let ad: Vec<Cdd> = a.iter().map(|&x| cd(x)).collect();
                let mut num = vec![Cdd::real(qd.powi(-(n as i32)))];
                if self.id == FamilyId::AskeyWilson {
                    let b4 = ad.iter().fold(Cdd::ONE, |acc, &x| acc * x);
                    num.push(b4.scale(qd.powi(n as i32 - 1)));
                }
                num.push(ad[0] * u);
                num.push(ad[0] / u);
                let mut den: Vec<Cdd> = ad[1..].iter().map(|&x| ad[0] * x).collect();
                match self.id {
                    FamilyId::AlSalamChihara => den.push(Cdd::default()),
                    FamilyId::ContinuousBigQHermite => den.extend([Cdd::default(), Cdd::default()]),
                    _ => {}
                }
                let pre = a[1..].iter().fold(a[0].powi(-(n as i32)), |acc, &x| acc * self.qpoch(a[0] * x, n));
                Ok(scaled(pre, basic_hypergeometric_phi_dd(&num, &den, qd, Cdd::real(qd), n)?))
            }
            FamilyId::ContinuousQHermite => self.q_hermite_series(n, u),
            FamilyId::ContinuousQJacobi | FamilyId::ContinuousQLaguerre => {
                let h = Dd::from(self.qp((self.alpha_p() + 0.5) / 2.0));
                let sq = qd.sqrt();
                let qa1 = h * h * sq;
                let mut num = vec![Cdd::real(qd.powi(-(n as i32)))];
                let mut den = vec![Cdd::real(qa1)];
                if self.id == FamilyId::ContinuousQJacobi {
                    let g = Dd::from(self.qp((self.beta_p() + 0.5) / 2.0));
                    num.push(Cdd::real(qd.powi(n as i32) * h * h * g * g));
                    den.push(Cdd::real(-(h * g)));
                    den.push(Cdd::real(-(h * g * sq)));
                } else {
                    den.push(Cdd::default());
                }
                num.push(u.scale(h));
                num.push((Cdd::ONE / u).scale(h));
                let pre = self.qpoch(C64::new(qa1.to_f64(), 0.0), n) / self.qpoch(C64::new(self.q, 0.0), n);
                Ok(scaled(pre, basic_hypergeometric_phi_dd(&num, &den, qd, Cdd::real(qd), n)?))
            }
        }
    }

    fn q_hermite_series(&self, n: usize, z: Cdd) -> Result<(C64, f64)> {
        let qd = Dd::from(self.q);
        let num = [Cdd::real(qd.powi(-(n as i32))), Cdd::default()];
        let arg = Cdd::real(qd.powi(n as i32)) / (z * z);
        Ok(scaled(z.to_c64().powi(n as i32), basic_hypergeometric_phi_dd(&num, &[], qd, arg, n)?))
    }
}

/// Three-term recurrence tables: `ηP_n = A_n P_{n+1} + B_n P_n + C_n P_{n-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Recurrence {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

impl Recurrence {
    pub fn n_max(&self) -> usize {
        self.a.len() - 1
    }

    /// `P_0(η) .. P_{n_max}(η)`.
    pub fn values(&self, eta: C64) -> Vec<C64> {
        let n = self.n_max();
        let mut out = Vec::with_capacity(n + 1);
        out.push(ONE);
        if n == 0 {
            return out;
        }
        out.push((eta - self.b[0]) / self.a[0]);
        for k in 1..n {
            let next = ((eta - self.b[k]) * out[k] - self.c[k] * out[k - 1]) / self.a[k];
            out.push(next);
        }
        out
    }

    pub fn value(&self, n: usize, eta: C64) -> C64 {
        self.values(eta)[n]
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use alloc::string::ToString;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn rel(a: C64, b: C64) -> f64 {
        (a - b).norm() / (1.0 + b.norm())
    }

    pub(crate) fn fixtures() -> Vec<System> {
        let mk = |id, p| System::new(id, p).unwrap();
        vec![
            mk(FamilyId::ContinuousHahn, ParamSet::new().with_a(&[C64::new(0.8, 0.3), C64::new(1.3, -0.2)])),
            mk(FamilyId::MeixnerPollaczek, ParamSet::new().with_real_a(&[0.7]).with_phi(1.1)),
            mk(FamilyId::Wilson, ParamSet::new().with_a(&[c(0.6), c(0.9), C64::new(1.1, 0.4), C64::new(1.1, -0.4)])),
            mk(
                FamilyId::ContinuousDualHahn,
                ParamSet::new().with_a(&[c(0.7), C64::new(0.5, 0.3), C64::new(0.5, -0.3)]),
            ),
            mk(
                FamilyId::AskeyWilson,
                ParamSet::new().with_a(&[c(0.3), c(-0.4), C64::new(0.2, 0.35), C64::new(0.2, -0.35)]).with_q(0.55),
            ),
            mk(
                FamilyId::ContinuousDualQHahn,
                ParamSet::new().with_a(&[c(0.45), C64::new(-0.1, 0.3), C64::new(-0.1, -0.3)]).with_q(0.6),
            ),
            mk(FamilyId::AlSalamChihara, ParamSet::new().with_a(&[c(0.3), c(0.5)]).with_q(0.5)),
            mk(FamilyId::ContinuousBigQHermite, ParamSet::new().with_real_a(&[-0.4]).with_q(0.65)),
            mk(FamilyId::ContinuousQHermite, ParamSet::new().with_q(0.5)),
            mk(FamilyId::ContinuousQJacobi, ParamSet::new().with_alpha(0.3).with_beta(0.8).with_q(0.6)),
            mk(FamilyId::ContinuousQLaguerre, ParamSet::new().with_alpha(0.4).with_q(0.55)),
        ]
    }

    #[test]
    fn catalog_lookup() {
        assert_eq!(catalog().len(), 11);
        for f in catalog() {
            assert_eq!(f.id.spec().slug, f.slug);
            assert_eq!(FamilyId::from_slug(f.slug), Some(f.id));
        }
        assert_eq!(FamilyId::from_slug("q-hermite"), Some(FamilyId::ContinuousQHermite));
        assert_eq!(FamilyId::from_slug("nope"), None);
    }

    #[test]
    fn validation_messages() {
        let aw = ParamSet::new().with_real_a(&[1.2, 0.1, 0.1, 0.1]).with_q(0.5);
        let e = validate_params(FamilyId::AskeyWilson, &aw).unwrap_err();
        assert!(e.to_string().contains("|a₁| ≥ 1"), "{e}");
        let mp = ParamSet::new().with_real_a(&[-1.0]).with_phi(1.0);
        let e = validate_params(FamilyId::MeixnerPollaczek, &mp).unwrap_err();
        assert!(e.to_string().contains("a>0 violated"), "{e}");
        let w = ParamSet::new().with_a(&[c(1.0), c(1.0), C64::new(1.0, 0.5), C64::new(1.0, 0.5)]);
        assert!(validate_params(FamilyId::Wilson, &w).is_err());
        let qh = ParamSet::new().with_q(1.0);
        assert!(validate_params(FamilyId::ContinuousQHermite, &qh).is_err());
        let qj = ParamSet::new().with_alpha(-0.6).with_beta(0.0).with_q(0.5);
        assert!(validate_params(FamilyId::ContinuousQJacobi, &qj).is_err());
        let extra = ParamSet::new().with_q(0.5).with_phi(1.0);
        assert!(validate_params(FamilyId::ContinuousQHermite, &extra).is_err());
        assert!(validate_params(FamilyId::ContinuousQHermite, &ParamSet::new().with_q(0.5)).is_ok());
    }

    #[test]
    fn frozen_values() {
        let qh = System::new(FamilyId::ContinuousQHermite, ParamSet::new().with_q(0.5)).unwrap();
        let v = qh.potential(qh.point(PI / 2.0));
        assert!(rel(v, c(1.0 / 3.0)) < 1e-15);
        // φ_0(π/2) = 2(-q;q)_∞
        assert!((qh.ground_state(PI / 2.0) - 4.768_462_058_0).abs() < 1e-9);
        let ch = System::new(FamilyId::ContinuousHahn, ParamSet::new().with_real_a(&[1.0, 2.0])).unwrap();
        assert!(rel(ch.potential(ch.point(0.0)), c(2.0)) < 1e-15);
        let mp =
            System::new(FamilyId::MeixnerPollaczek, ParamSet::new().with_real_a(&[1.0]).with_phi(PI / 6.0)).unwrap();
        assert!((mp.energy(3) - 3.0).abs() < 1e-14);
        let aw =
            System::new(FamilyId::AskeyWilson, ParamSet::new().with_real_a(&[0.5, 0.5, 0.8, 0.5]).with_q(0.5)).unwrap();
        assert!((aw.energy(1) - 0.9).abs() < 1e-14);
        let asc = System::new(FamilyId::AlSalamChihara, ParamSet::new().with_real_a(&[0.3, 0.5]).with_q(0.5)).unwrap();
        assert!((asc.coefficients(1).b_rec - 0.106_25).abs() < 1e-15);
    }

    #[test]
    fn q_hermite_low_degrees() {
        let q = 0.5;
        let qh = System::new(FamilyId::ContinuousQHermite, ParamSet::new().with_q(q)).unwrap();
        let p2 = qh.eval_poly_recurrence(2).unwrap();
        let want = [c(-(1.0 - q)), c(0.0), c(4.0)];
        for (g, w) in p2.coeffs().iter().zip(want.iter()) {
            assert!(rel(*g, *w) < 1e-14);
        }
        assert!((qh.coefficients(1).f - libm::sqrt(q) * (1.0 / q - 1.0)).abs() < 1e-15);
        let x = 0.7;
        let s = qh.eval_poly_hypergeometric(1, qh.point(x)).unwrap();
        assert!(rel(s, c(2.0 * libm::cos(x))) < 1e-15);
    }

    #[test]
    fn meixner_pollaczek_first_degree() {
        let mp =
            System::new(FamilyId::MeixnerPollaczek, ParamSet::new().with_real_a(&[1.3]).with_phi(PI / 2.0)).unwrap();
        for &x in &[-1.0, 0.4, 2.0] {
            let s = mp.eval_poly_hypergeometric(1, mp.point(x)).unwrap();
            assert!(rel(s, c(2.0 * x)) < 1e-14);
            assert!(rel(mp.eval_poly_recurrence(1).unwrap().eval(c(x)), c(2.0 * x)) < 1e-14);
        }
    }

    #[test]
    fn dual_path_agreement() {
        for s in fixtures() {
            for n in 0..=10 {
                let p = s.eval_poly_recurrence(n).unwrap();
                for x in s.sample_points(20, 7) {
                    let pt = s.point(x);
                    let h = s.eval_poly_hypergeometric(n, pt).unwrap();
                    let r = p.eval(s.eta(pt));
                    assert!((h - r).norm() <= 1e-9 * (1.0 + r.norm()), "{} n={n} x={x}: {h} vs {r}", s.id());
                }
            }
        }
    }

    #[test]
    fn leading_coefficient_matches_recurrence() {
        for s in fixtures() {
            for n in 0..8 {
                let p = s.eval_poly_recurrence(n).unwrap();
                let lead = p.coeffs()[n].re;
                let c = s.coefficients(n).c;
                assert!((lead - c).abs() <= 1e-11 * c.abs(), "{} n={n}", s.id());
            }
        }
    }

    #[test]
    fn norm_ratio_consistent_with_recurrence() {
        // b^rec_n = (c_{n-1}/c_n)² h_n/h_{n-1}
        for s in fixtures() {
            for n in 1..8 {
                let (cn, cm) = (s.coefficients(n), s.coefficients(n - 1));
                let want = (cm.c / cn.c).powi(2) * cm.norm_ratio / cn.norm_ratio;
                assert!((cn.b_rec - want).abs() <= 1e-11 * want.abs(), "{} n={n}: {} vs {want}", s.id(), cn.b_rec);
            }
        }
    }

    #[test]
    fn shift_amplitudes_factor_energy() {
        for s in fixtures() {
            for n in 1..10 {
                let e = s.energy(n);
                let fb = s.coefficients(n).f * s.coefficients(n - 1).b;
                assert!((fb - e).abs() <= 1e-12 * (1.0 + e.abs()), "{} n={n}", s.id());
            }
        }
    }

    #[test]
    fn closure_constraints() {
        for s in fixtures() {
            let r = s.closure_polys();
            assert!((r.r0[2] - r.r1[1]).abs() < 1e-14, "{}", s.id());
            assert!((r.r0[1] - 2.0 * r.r1[0]).abs() < 1e-13, "{}", s.id());
            // α_± reproduce the spacings of the spectrum
            for n in 1..8 {
                let (ap, am) = r.alpha(s.energy(n));
                assert!((ap - (s.energy(n + 1) - s.energy(n))).abs() < 1e-9, "{} n={n}", s.id());
                assert!((am - (s.energy(n - 1) - s.energy(n))).abs() < 1e-9, "{} n={n}", s.id());
            }
        }
    }

    #[test]
    fn q_jacobi_matches_askey_wilson_specialisation() {
        let (al, be, q) = (0.3, 0.8, 0.6);
        let qj =
            System::new(FamilyId::ContinuousQJacobi, ParamSet::new().with_alpha(al).with_beta(be).with_q(q)).unwrap();
        let aw = System::new(FamilyId::AskeyWilson, ParamSet::new().with_a(qj.potential_factors()).with_q(q)).unwrap();
        let (r, s) = (qj.closure_polys(), aw.closure_polys());
        for k in 0..3 {
            assert!((r.rm1[k] - s.rm1[k]).abs() < 1e-14);
            assert!((r.r0[k] - s.r0[k]).abs() < 1e-14);
        }
        for n in 0..6 {
            assert!((qj.energy(n) - aw.energy(n)).abs() < 1e-13);
        }
    }

    #[test]
    fn shifted_params() {
        let s = &fixtures()[4];
        let t = s.shifted(1).unwrap();
        assert!(rel(t.params().a[0], s.params().a[0] * libm::sqrt(0.55)) < 1e-15);
        let qj = &fixtures()[9];
        assert_eq!(qj.shifted(2).unwrap().params().alpha, Some(2.3));
    }

    #[test]
    fn small_parameters_flag_series_conditioning() {
        let s =
            System::new(FamilyId::ContinuousBigQHermite, ParamSet::new().with_real_a(&[-0.045]).with_q(0.15)).unwrap();
        let pt = s.point(0.05);
        let (v, w) = s.eval_poly_hypergeometric_checked(7, pt).unwrap();
        let w = w.expect("ill-conditioned series is flagged");
        let r = s.recurrence(7).value(7, s.eta(pt));
        assert!((v - r).norm() / (1.0 + r.norm()) <= w.error_estimate);

        let a = [C64::new(0.0, 0.0), C64::new(0.0, 0.05), C64::new(0.0, -0.05)];
        let s = System::new(FamilyId::ContinuousDualQHahn, ParamSet::new().with_a(&a).with_q(0.15)).unwrap();
        let pt = s.point(0.05);
        let (v, w) = s.eval_poly_hypergeometric_checked(9, pt).unwrap();
        let r = s.recurrence(9).value(9, s.eta(pt));
        assert!((v - r).norm() / (1.0 + r.norm()) <= w.unwrap().error_estimate);
        for f in fixtures() {
            for n in 0..=10 {
                assert!(f.eval_poly_hypergeometric_checked(n, f.point(0.7)).unwrap().1.is_none(), "{} n={n}", f.id());
            }
        }
    }
}
