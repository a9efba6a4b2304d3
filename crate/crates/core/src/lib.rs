//! Convex multi-commodity flow: models, relaxations and solvers.

pub mod bnp;
pub mod colgen;
pub mod compact;
pub mod error;
pub mod flowdev;
pub mod graph;
pub mod heuristic;
pub mod json;
pub mod model;
pub mod sndlib;

pub use error::{BnpError, ColgenError, FlowDevError, FormatError, ModelError, ParseError, PrepError};
pub use model::{ArcId, CommodityId, CostFunction, FlowSolution, Instance, Network, NodeId};
