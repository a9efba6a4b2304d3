//! Canonical JSON documents for instances and solutions.
//!
//! Field order is fixed by the struct definitions and floats use the
//! shortest representation that reads back to the same value, so equal
//! inputs serialize to identical bytes.

use serde::{Deserialize, Serialize};

use crate::error::FormatError;
use crate::model::{ArcId, CostFunction, FlowSolution, Instance, Network, NodeId, Routing};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CostDoc {
    Linear { f: f64 },
    Quadratic { f: f64 },
    Kleinrock { f: f64, d: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcDoc {
    pub tail: usize,
    pub head: usize,
    pub capacity: f64,
    pub cost: CostDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommodityDoc {
    pub source: usize,
    pub target: usize,
    pub bandwidth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceDoc {
    pub nodes: Vec<String>,
    pub arcs: Vec<ArcDoc>,
    pub commodities: Vec<CommodityDoc>,
    pub penalty: f64,
}

impl InstanceDoc {
    pub fn from_instance(inst: &Instance) -> Result<Self, FormatError> {
        let net = &inst.network;
        let arcs = net
            .arcs()
            .iter()
            .map(|a| {
                let cost = match a.cost {
                    CostFunction::Linear { f } => CostDoc::Linear { f },
                    CostFunction::Quadratic { f } => CostDoc::Quadratic { f },
                    CostFunction::Kleinrock { f, d } => CostDoc::Kleinrock { f, d },
                    CostFunction::BlackBox(_) => return Err(FormatError::BlackBox(a.id)),
                };
                Ok(ArcDoc { tail: a.tail.0, head: a.head.0, capacity: a.capacity, cost })
            })
            .collect::<Result<_, _>>()?;
        let commodities = inst
            .commodities
            .iter()
            .map(|c| CommodityDoc { source: c.source.0, target: c.target.0, bandwidth: c.bandwidth })
            .collect();
        Ok(Self { nodes: net.node_names().to_vec(), arcs, commodities, penalty: inst.penalty() })
    }

    pub fn to_instance(&self) -> Result<Instance, FormatError> {
        let mut net = Network::new();
        for name in &self.nodes {
            net.add_node(name.clone());
        }
        for a in &self.arcs {
            let cost = match a.cost {
                CostDoc::Linear { f } => CostFunction::linear(f)?,
                CostDoc::Quadratic { f } => CostFunction::quadratic(f)?,
                CostDoc::Kleinrock { f, d } => CostFunction::kleinrock(f, d)?,
            };
            net.add_arc(NodeId(a.tail), NodeId(a.head), a.capacity, cost)?;
        }
        let demands: Vec<_> =
            self.commodities.iter().map(|c| (NodeId(c.source), NodeId(c.target), c.bandwidth)).collect();
        Ok(Instance::with_penalty(net, &demands, self.penalty)?)
    }
}

pub fn write_instance(inst: &Instance) -> Result<String, FormatError> {
    to_string(&InstanceDoc::from_instance(inst)?)
}

pub fn read_instance(text: &str) -> Result<Instance, FormatError> {
    serde_json::from_str::<InstanceDoc>(text)?.to_instance()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathDoc {
    pub arcs: Vec<usize>,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoutingDoc {
    pub commodity: usize,
    pub paths: Vec<PathDoc>,
    pub rejected: f64,
}

/// Solver output. Wall-clock time is deliberately absent so that reruns
/// produce identical bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionDoc {
    pub solver: String,
    pub status: String,
    pub objective: f64,
    pub bound: Option<f64>,
    pub routings: Vec<RoutingDoc>,
    pub loads: Vec<f64>,
    pub stats: serde_json::Value,
}

impl SolutionDoc {
    pub fn new(
        inst: &Instance,
        solver: &str,
        status: &str,
        flow: &FlowSolution,
        objective: f64,
        bound: Option<f64>,
        stats: serde_json::Value,
    ) -> Result<Self, FormatError> {
        let loads = flow.loads(inst)?;
        let routings = flow
            .routes
            .iter()
            .enumerate()
            .map(|(k, r)| RoutingDoc {
                commodity: k,
                paths: r
                    .paths
                    .iter()
                    .map(|(p, v)| PathDoc { arcs: p.iter().map(|a| a.0).collect(), ratio: *v })
                    .collect(),
                rejected: r.rejected,
            })
            .collect();
        Ok(Self {
            solver: solver.to_string(),
            status: status.to_string(),
            objective,
            bound,
            routings,
            loads,
            stats,
        })
    }

    pub fn flow(&self) -> FlowSolution {
        FlowSolution {
            routes: self
                .routings
                .iter()
                .map(|r| Routing {
                    paths: r.paths.iter().map(|p| (p.arcs.iter().map(|a| ArcId(*a)).collect(), p.ratio)).collect(),
                    rejected: r.rejected,
                })
                .collect(),
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_string<T: Serialize>(value: &T) -> Result<String, FormatError> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}
