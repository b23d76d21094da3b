//! The reference values a run is checked against.

use std::collections::BTreeMap;
use std::path::Path;

use rmlt::obstruct::E32Expectations;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const BUILTIN: &str = include_str!("../expectations.json");
pub const VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Expectations {
    pub version: u32,
    #[serde(default)]
    pub source: String,
    pub catalog: BTreeMap<String, usize>,
    pub search: BTreeMap<String, usize>,
    pub classify: BTreeMap<String, ClassRow>,
    pub autotopism: BTreeMap<String, AutotopismExpect>,
    pub obstruct: ObstructExpect,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassRow {
    pub parastrophy_classes: usize,
    pub proper_g_classes: usize,
    pub distinct_fingerprints: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AutotopismExpect {
    pub order: usize,
    pub infinite_profile: Vec<usize>,
    pub nonisomorphic: bool,
    pub psl27: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ObstructExpect {
    pub certificates: BTreeMap<String, CertExpect>,
    pub e32: E32Expectations,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertExpect {
    pub holds: bool,
    /// `None`: the sizes are not pinned.
    pub sizes: Option<Vec<usize>>,
}

impl Expectations {
    pub fn builtin() -> Self {
        serde_json::from_str(BUILTIN).expect("bundled expectations parse")
    }

    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let e: Expectations = match path {
            None => return Ok(Self::builtin()),
            Some(p) => serde_json::from_str(&std::fs::read_to_string(p)?)?,
        };
        if e.version != VERSION {
            return Err(CliError::Expectations(format!(
                "unsupported expectations version {} (this build reads {VERSION})",
                e.version
            )));
        }
        Ok(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rmlt::catalog::CaseId;

    #[test]
    fn builtin_parses_and_names_real_cases() {
        let e = Expectations::builtin();
        assert_eq!(e.version, VERSION);
        let keys = e
            .catalog
            .keys()
            .chain(e.search.keys())
            .chain(e.classify.keys())
            .chain(e.autotopism.keys())
            .chain(e.obstruct.certificates.keys());
        for k in keys {
            assert!(k.parse::<CaseId>().is_ok(), "{k}");
        }
        for (k, &order) in &e.catalog {
            let id: CaseId = k.parse().unwrap();
            assert_eq!(id.descriptor().expected_order, order, "{k}");
        }
        assert_eq!(e.obstruct.e32, E32Expectations::default());
    }
}
