use thiserror::Error;

use crate::model::{ArcId, CommodityId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("load {x} outside the domain of the {kind} cost")]
    Domain { kind: &'static str, x: f64 },
    #[error("invalid cost parameter: {0}")]
    BadParameter(String),
    #[error("invalid network: {0}")]
    BadNetwork(String),
    #[error("invalid commodity {id}: {reason}")]
    BadCommodity { id: usize, reason: String },
    #[error("penalty {penalty} must exceed the Lipschitz sum {lipschitz_sum}")]
    PenaltyTooSmall { penalty: f64, lipschitz_sum: f64 },
    #[error("invalid path for commodity {commodity:?}: {reason}")]
    BadPath { commodity: CommodityId, reason: String },
    #[error("solution does not match the instance: {0}")]
    Shape(String),
}

#[derive(Debug, Error)]
pub enum ColgenError {
    #[error("column generation did not converge in {iterations} iterations (last bound {bound})")]
    Convergence { iterations: usize, bound: f64 },
    #[error("restricted master is unbounded")]
    Unbounded,
    #[error("time limit reached during column generation")]
    TimeLimit,
    #[error("bandwidths cannot be scaled to integers: {0}")]
    Scaling(String),
    #[error(transparent)]
    Lp(#[from] cmcf_lp::LpError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Error)]
pub enum BnpError {
    #[error("commodity {0:?} has no fractional variable to branch on")]
    NotFractional(CommodityId),
    #[error("divergence needs at least two distinct paths")]
    TooFewPaths,
    #[error("relative gap undefined: upper value {upper} does not exceed splittable optimum {splittable}")]
    UndefinedGap { splittable: f64, upper: f64 },
    #[error(transparent)]
    Colgen(#[from] ColgenError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Error)]
pub enum FlowDevError {
    #[error("commodity {0:?} has no path from source to target")]
    Disconnected(CommodityId),
    #[error("arc {0:?} has a negative marginal weight")]
    NegativeWeight(ArcId),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum PrepError {
    #[error("arc {link} has capacity {capacity} but cost {cost}; cannot calibrate")]
    Calibration { link: String, capacity: f64, cost: f64 },
    #[error("no capacity factor up to 2^20 accepts every commodity")]
    NoFeasibleFactor,
    #[error("instance has no commodities to scale against")]
    NoDemand,
    #[error("LP failed while computing acceptance: {0}")]
    Lp(#[from] cmcf_lp::LpError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("arc {0:?} has a black-box cost, which has no serialized form")]
    BlackBox(ArcId),
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
}
