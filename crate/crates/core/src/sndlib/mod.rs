//! SNDlib native-format input and instance preparation.

mod parse;
mod prep;
mod scaling;

pub use parse::{parse_sndlib, RawDemand, RawInstance, RawLink};
pub use prep::{calibrate_costs, calibrate_with, merge_commodities, symmetrize, CostKind};
pub use scaling::{scale_to_congestion, Probe, ScalingReport, ACCEPT_TOL, MARGIN};

use crate::error::PrepError;
use crate::model::Instance;

/// Counts reported after preparation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrepSummary {
    pub nodes: usize,
    pub raw_links: usize,
    pub arcs: usize,
    pub raw_demands: usize,
    pub commodities: usize,
}

/// Symmetrize, merge, calibrate and scale slightly above congestion.
pub fn prepare(
    raw: &RawInstance,
    kind: CostKind,
) -> Result<(Instance, ScalingReport, PrepSummary), PrepError> {
    let sym = merge_commodities(&symmetrize(raw));
    let inst = calibrate_costs(&sym, kind)?;
    let (scaled, report) = scale_to_congestion(&inst)?;
    let summary = PrepSummary {
        nodes: raw.nodes.len(),
        raw_links: raw.links.len(),
        arcs: scaled.network.num_arcs(),
        raw_demands: raw.demands.len(),
        commodities: scaled.num_commodities(),
    };
    Ok((scaled, report, summary))
}
