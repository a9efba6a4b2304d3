//! Graph, demands, cost functions and solution evaluation.

mod cost;
mod instance;
mod network;
mod solution;

pub use cost::{fd_step, BlackBox, CostFunction};
pub use instance::{default_penalty, lipschitz_sum, Commodity, Instance};
pub use network::{Arc, ArcId, CommodityId, Network, NodeId};
pub use solution::{
    check_feasible, describe_path, objective, objective_from_loads, FeasibilityReport, FlowSolution, Path,
    Routing, Violation,
};
