//! The reconstruction pipeline: `tau`, `G`, `S`, `tbar`, `A_r`, the `y` classes,
//! the four `F_{1,M}` assemblies and the genus-1 total.

mod assemble;
pub mod linalg;
mod sop;
mod tau;
mod wdvv;

use serde::{Deserialize, Serialize};

pub use assemble::{
    ancestor_inputs, assemble_f1m, bracket_rational, case2_residue_identity, chain_sum_y, run_pipeline, theorem1, CaseResidues,
    Pipeline, SlotVar, Theorem1Report, CASES,
};
pub use sop::{compute_g, compute_s, compute_tbar, GMatrix, SOperator};
pub use tau::{a_jet, compute_a, compute_tau, perturbation_jacobian, tau_map, tbar_derivative, TauRun};
pub use wdvv::{wdvv_check, WdvvOutcome};

use crate::qfun::LaurentQ;
use crate::ring::Ring;

/// Sign in front of the correction term of `y_r` and `y_2^L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum YSign {
    Plus,
    #[default]
    Minus,
}

/// Which jet is inserted into `A_r`: `tbar'_{r,1}` or `tbar'_{1,1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum AInsertion {
    #[default]
    #[serde(rename = "level_r")]
    LevelR,
    #[serde(rename = "level_1")]
    Level1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Toggles {
    #[serde(default)]
    pub y_sign: YSign,
    #[serde(default = "default_true")]
    pub cycle_weight_in_brackets: bool,
    #[serde(default)]
    pub a_insertion: AInsertion,
}

fn default_true() -> bool {
    true
}

impl Default for Toggles {
    fn default() -> Self {
        Self {
            y_sign: YSign::Minus,
            cycle_weight_in_brackets: true,
            a_insertion: AInsertion::LevelR,
        }
    }
}

/// Descendant inputs `t_1, ..., t_{r_max}` over a common ring.
#[derive(Debug, Clone)]
pub struct ReconstructionInput {
    pub ring: Ring,
    pub t: Vec<LaurentQ>,
    pub toggles: Toggles,
}
