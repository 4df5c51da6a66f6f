use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParameter(String),
    #[error("q = {0} outside (0, 1)")]
    QDomain(f64),
    #[error("gamma pole at {re} + {im}i")]
    GammaPole { re: f64, im: f64 },
    #[error("denominator vanishes at term {0}")]
    DenominatorPole(usize),
    #[error("series did not converge within {0} terms")]
    NonConvergence(usize),
    #[error("degree {0} exceeds the cap of {cap}", cap = crate::poly::DEGREE_CAP)]
    DegreeCap(usize),
    #[error("quadrature tolerance not met: estimate {estimate:e}")]
    Quadrature { estimate: f64 },
    #[error("outside regime: {0}")]
    Regime(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}
