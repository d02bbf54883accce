//! Run descriptions: the JSON document consumed by `qkrec tau` and `qkrec f1`.
//!
//! ```json
//! {
//!   "variables": ["e"],
//!   "order": 2,
//!   "inputs": [{"level": 1, "terms": [
//!     {"exponent": 1, "coefficient": "e"},
//!     {"exponent": 0, "coefficient": [{"coeff": "-1", "powers": {"e": 1}}]}
//!   ]}],
//!   "tables": ["bundled:point"]
//! }
//! ```
//!
//! A coefficient is either a single atom (a variable name or an exact scalar)
//! or an explicit list of monomials.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::correlators::{bundled_point_table, Backend, CorrelatorTable, BUNDLED_POINT_NAME};
use crate::error::{Error, Result};
use crate::qfun::{KVector, LaurentQ};
use crate::reconstruct::{ReconstructionInput, Toggles};
use crate::ring::{CycloRational, Ring, Series, SeriesRingConfig, NOVIKOV_NAME};

/// Search path for relative table names.
pub const TABLE_PATH_ENV: &str = "QKREC_TABLE_PATH";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub variables: Vec<String>,
    #[serde(default)]
    pub novikov: bool,
    pub order: u32,
    #[serde(default)]
    pub inputs: Vec<InputSpec>,
    #[serde(default = "default_tables")]
    pub tables: Vec<String>,
    #[serde(default)]
    pub toggles: Toggles,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn default_tables() -> Vec<String> {
    vec![BUNDLED_POINT_NAME.to_owned()]
}

/// `t_level(q) = sum_terms coefficient * phi_basis * q^exponent`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSpec {
    pub level: u32,
    pub terms: Vec<TermSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub exponent: i32,
    #[serde(default)]
    pub basis: usize,
    pub coefficient: CoefficientSpec,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoefficientSpec {
    Atom(String),
    Monomials(Vec<MonomialSpec>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonomialSpec {
    pub coeff: String,
    #[serde(default)]
    pub powers: BTreeMap<String, u32>,
}

/// A table as resolved for a run: the name given in the spec and its checksum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableRef {
    pub name: String,
    pub sha256: String,
}

impl RunSpec {
    pub fn from_json_str(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }

    pub fn ring(&self) -> Result<Ring> {
        SeriesRingConfig::new(self.variables.iter().cloned(), self.novikov, self.order)
    }

    /// Builds `t_1, ..., t_{r_max}` of the given rank; absent levels are zero.
    pub fn input(&self, rank: usize) -> Result<ReconstructionInput> {
        let ring = self.ring()?;
        let r_max = self.inputs.iter().map(|i| i.level).max().unwrap_or(1) as usize;
        let mut t = vec![LaurentQ::zero(&ring, rank); r_max];
        for inp in &self.inputs {
            if inp.level == 0 {
                return Err(Error::InvalidConfig("input level must be >= 1".into()));
            }
            let slot = &mut t[inp.level as usize - 1];
            for term in &inp.terms {
                if term.basis >= rank {
                    return Err(Error::BasisMismatch(format!(
                        "basis index {} on level {} but the target has rank {rank}",
                        term.basis, inp.level
                    )));
                }
                let c = term.coefficient.to_series(&ring)?;
                if !c.is_zero() && c.filtration_order() == Some(0) {
                    return Err(Error::InvalidConfig(format!(
                        "coefficient of q^{} on level {} has a nonzero constant term; inputs must lie in the maximal ideal",
                        term.exponent, inp.level
                    )));
                }
                slot.add_term(term.exponent, &KVector::basis(&ring, rank, term.basis, c));
            }
        }
        Ok(ReconstructionInput {
            ring,
            t,
            toggles: self.toggles,
        })
    }

    /// Loads and merges the spec's tables; `base` resolves relative paths first.
    pub fn load_tables(&self, base: Option<&Path>) -> Result<(CorrelatorTable, Vec<TableRef>)> {
        let mut tables = Vec::new();
        let mut refs = Vec::new();
        for name in &self.tables {
            let table = if name == BUNDLED_POINT_NAME {
                bundled_point_table()?
            } else {
                CorrelatorTable::load(&resolve_table(name, base)?)?
            };
            refs.push(TableRef {
                name: name.clone(),
                sha256: table.checksum().to_owned(),
            });
            tables.push(table);
        }
        Ok((CorrelatorTable::merge(&tables)?, refs))
    }

    /// Input, backend and table references in one go.
    pub fn prepare(&self, base: Option<&Path>) -> Result<(ReconstructionInput, Backend, Vec<TableRef>)> {
        let (table, refs) = self.load_tables(base)?;
        let rank = table.target().rank();
        let input = self.input(rank)?;
        let backend = Backend::new(table, self.toggles.cycle_weight_in_brackets);
        Ok((input, backend, refs))
    }
}

/// Absolute paths as given; relative ones against `base`, then each entry of
/// `QKREC_TABLE_PATH`.
pub fn resolve_table(name: &str, base: Option<&Path>) -> Result<PathBuf> {
    let p = Path::new(name);
    if p.is_absolute() {
        return Ok(p.to_owned());
    }
    let mut candidates: Vec<PathBuf> = base.map(|b| b.join(p)).into_iter().collect();
    if let Some(paths) = std::env::var_os(TABLE_PATH_ENV) {
        candidates.extend(std::env::split_paths(&paths).map(|d| d.join(p)));
    }
    candidates.push(p.to_owned());
    candidates
        .into_iter()
        .find(|c| c.is_file())
        .ok_or_else(|| Error::Table(format!("table {name:?} not found (searched the spec directory and {TABLE_PATH_ENV})")))
}

impl CoefficientSpec {
    pub fn to_series(&self, ring: &Ring) -> Result<Series> {
        match self {
            CoefficientSpec::Atom(s) => {
                let s = s.trim();
                if ring.variable_index(s).is_some() {
                    Series::var(ring, s)
                } else {
                    Ok(Series::constant(ring, CycloRational::parse(s)?))
                }
            }
            CoefficientSpec::Monomials(ms) => {
                let mut out = Series::zero(ring);
                for m in ms {
                    let mut exps = vec![0u32; ring.arity()];
                    for (name, e) in &m.powers {
                        let i = ring
                            .variable_index(name)
                            .ok_or_else(|| Error::Parse(format!("unknown variable {name:?} (declare it in \"variables\"{})", if name == NOVIKOV_NAME { " or set \"novikov\"" } else { "" })))?;
                        exps[i] += e;
                    }
                    let c = CycloRational::parse(&m.coeff)?;
                    out = out.checked_add(&Series::monomial(ring, exps, c))?;
                }
                Ok(out)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOLDEN: &str = r#"{
      "variables": ["e"], "order": 2,
      "inputs": [{"level": 1, "terms": [
        {"exponent": 1, "coefficient": "e"},
        {"exponent": 0, "coefficient": [{"coeff": "-1", "powers": {"e": 1}}]}]}]
    }"#;

    #[test]
    fn parses_and_round_trips() {
        let spec = RunSpec::from_json_str(GOLDEN).unwrap();
        assert_eq!(spec.tables, vec![BUNDLED_POINT_NAME.to_owned()]);
        assert_eq!(RunSpec::from_json_str(&spec.to_json()).unwrap(), spec);
        let input = spec.input(1).unwrap();
        assert_eq!(input.t.len(), 1);
        assert_eq!(input.t[0].coeff(1).comp(0).to_string(), "e");
        assert_eq!(input.t[0].coeff(0).comp(0).to_string(), "(-1)*e");
    }

    #[test]
    fn rejects_bad_inputs() {
        let unit = GOLDEN.replace("\"coefficient\": \"e\"", "\"coefficient\": \"1\"");
        assert!(matches!(RunSpec::from_json_str(&unit).unwrap().input(1), Err(Error::InvalidConfig(_))));
        let unknown = GOLDEN.replace("\"powers\": {\"e\": 1}", "\"powers\": {\"f\": 1}");
        assert!(RunSpec::from_json_str(&unknown).unwrap().input(1).is_err());
        let typo = GOLDEN.replace("\"order\"", "\"ordr\"");
        assert!(matches!(RunSpec::from_json_str(&typo), Err(Error::Json(_))));
        match RunSpec::from_json_str("{\n  \"variables\": [,\n}") {
            Err(Error::Json(e)) => assert_eq!(e.line(), 2),
            other => panic!("{other:?}"),
        }
    }
}
