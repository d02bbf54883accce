//! JSON reports written by the command-line front end.
//!
//! Every report echoes the truncation order, the toggles and the tables (name
//! and sha256) it was computed from.  Mathematical values are exact strings;
//! filtration orders are strings as well, with `"inf"` for a vanishing term.
//! Serialization is deterministic: identical inputs give identical bytes.

use serde::Serialize;

use crate::correlators::{Backend, TauVector};
use crate::error::Result;
use crate::qfun::LaurentQ;
use crate::reconstruct::{ancestor_inputs, compute_tau, theorem1, CaseResidues, ReconstructionInput, Toggles};
use crate::ring::{CycloRational, Series};
use crate::spec::TableRef;

pub const TAU_REPORT_SCHEMA: &str = "qkrec-tau-report-v1";
pub const F1_REPORT_SCHEMA: &str = "qkrec-f1-report-v1";

/// Filtration order as a string, `"inf"` for zero.
pub fn order_string(o: Option<u32>) -> String {
    o.map_or_else(|| "inf".to_owned(), |o| o.to_string())
}

#[derive(Debug, Clone, Serialize)]
pub struct RunHeader {
    pub schema: &'static str,
    pub order: u32,
    pub variables: Vec<String>,
    pub novikov: bool,
    pub toggles: Toggles,
    pub tables: Vec<TableRef>,
}

impl RunHeader {
    fn new(schema: &'static str, input: &ReconstructionInput, tables: &[TableRef]) -> Self {
        Self {
            schema,
            order: input.ring.order(),
            variables: input.ring.variables().to_vec(),
            novikov: input.ring.novikov_enabled(),
            toggles: input.toggles,
            tables: tables.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TauReport {
    #[serde(flatten)]
    pub header: RunHeader,
    pub tau: TauVector,
    pub iterates: Vec<TauVector>,
    pub gap_orders: Vec<String>,
    pub gaps_strictly_increase: bool,
    pub iterations: usize,
    pub tbar: Vec<LaurentQ>,
    /// Per level, the filtration order of `tbar_r(1)`.
    pub tbar_residual_order: Vec<String>,
}

pub fn tau_report(backend: &Backend, input: &ReconstructionInput, tables: &[TableRef]) -> Result<TauReport> {
    let run = compute_tau(backend, &input.ring, &input.t)?;
    let tbar = ancestor_inputs(backend, &run.tau, &input.t)?;
    let residual = tbar
        .iter()
        .map(|t| t.eval_at(&CycloRational::one()).map(|v| order_string(v.filtration_order())))
        .collect::<Result<_>>()?;
    Ok(TauReport {
        header: RunHeader::new(TAU_REPORT_SCHEMA, input, tables),
        gaps_strictly_increase: run.gaps_increase(),
        gap_orders: run.gap_orders.iter().copied().map(order_string).collect(),
        iterations: run.iterations,
        tau: run.tau,
        iterates: run.iterates,
        tbar,
        tbar_residual_order: residual,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct F1Report {
    #[serde(flatten)]
    pub header: RunHeader,
    pub tau: TauVector,
    pub tau_iterations: usize,
    pub gap_orders: Vec<String>,
    pub tbar: Vec<LaurentQ>,
    pub tbar_residual_order: Vec<String>,
    pub f1_tau: Series,
    pub logdet: Series,
    pub residues: Vec<CaseResidues>,
    pub total: Series,
    /// `total` in display form, for quick reading.
    pub total_display: String,
}

pub fn f1_report(backend: &Backend, input: &ReconstructionInput, tables: &[TableRef]) -> Result<F1Report> {
    let rep = theorem1(backend, input)?;
    Ok(F1Report {
        header: RunHeader::new(F1_REPORT_SCHEMA, input, tables),
        tau: rep.tau,
        tau_iterations: rep.tau_iterations,
        gap_orders: rep.gap_orders.into_iter().map(order_string).collect(),
        tbar: rep.tbar,
        tbar_residual_order: rep.tbar_residual_order.into_iter().map(order_string).collect(),
        f1_tau: rep.f1_tau,
        logdet: rep.logdet,
        residues: rep.residues,
        total_display: rep.total.to_string(),
        total: rep.total,
    })
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports are serializable") + "\n"
}
