//! Versioned fixtures file. The bundled copy is compiled in; `DQM_FIXTURES`
//! names a replacement on disk.

use std::path::Path;

use dqm_core::{FamilyId, ParamSet};
use serde::Deserialize;

use crate::complex::parse_complex;
use crate::error::CliError;

pub const FIXTURES_VERSION: u32 = 1;
pub const FIXTURES_ENV: &str = "DQM_FIXTURES";
const BUNDLED: &str = include_str!("../fixtures/fixtures.toml");

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    version: u32,
    #[serde(default)]
    fixture: Vec<RawFixture>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFixture {
    family: String,
    name: String,
    #[serde(default)]
    a: Vec<String>,
    q: Option<f64>,
    phi: Option<f64>,
    alpha: Option<f64>,
    beta: Option<f64>,
    description: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fixture {
    pub family: FamilyId,
    pub name: String,
    pub params: ParamSet,
    pub description: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fixtures {
    pub version: u32,
    pub entries: Vec<Fixture>,
}

impl Fixtures {
    pub fn bundled() -> Self {
        Self::parse(BUNDLED).expect("bundled fixtures parse")
    }

    /// `DQM_FIXTURES` if set, else the bundled file.
    pub fn load() -> Result<Self, CliError> {
        match std::env::var_os(FIXTURES_ENV) {
            Some(p) => Self::from_path(Path::new(&p)),
            None => Ok(Self::bundled()),
        }
    }

    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Fixture(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let raw: RawFile = toml::from_str(text).map_err(|e| CliError::Fixture(e.to_string()))?;
        if raw.version != FIXTURES_VERSION {
            return Err(CliError::Fixture(format!(
                "unsupported version {} (expected {FIXTURES_VERSION})",
                raw.version
            )));
        }
        let mut entries: Vec<Fixture> = Vec::with_capacity(raw.fixture.len());
        for f in raw.fixture {
            let family = FamilyId::from_slug(&f.family)
                .ok_or_else(|| CliError::Fixture(format!("unknown family '{}'", f.family)))?;
            if entries.iter().any(|e| e.family == family && e.name == f.name) {
                return Err(CliError::Fixture(format!("duplicate fixture {family}/{}", f.name)));
            }
            let a =
                f.a.iter()
                    .map(|t| parse_complex(t))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| CliError::Fixture(format!("{family}/{}: {e}", f.name)))?;
            let params = ParamSet { a, q: f.q, phi: f.phi, alpha: f.alpha, beta: f.beta };
            entries.push(Fixture { family, name: f.name, params, description: f.description });
        }
        Ok(Self { version: raw.version, entries })
    }

    pub fn get(&self, family: FamilyId, name: &str) -> Option<&Fixture> {
        self.entries.iter().find(|f| f.family == family && f.name == name)
    }

    pub fn names(&self, family: FamilyId) -> Vec<&str> {
        self.entries.iter().filter(|f| f.family == family).map(|f| f.name.as_str()).collect()
    }
}
