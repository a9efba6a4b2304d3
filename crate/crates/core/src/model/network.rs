use serde::{Deserialize, Serialize};

use super::cost::CostFunction;
use crate::error::ModelError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ArcId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CommodityId(pub usize);

#[derive(Debug, Clone)]
pub struct Arc {
    pub id: ArcId,
    pub tail: NodeId,
    pub head: NodeId,
    pub capacity: f64,
    pub cost: CostFunction,
}

/// Directed graph with named nodes. Parallel arcs are allowed and told
/// apart by id.
#[derive(Debug, Clone, Default)]
pub struct Network {
    names: Vec<String>,
    arcs: Vec<Arc>,
    out: Vec<Vec<ArcId>>,
    inc: Vec<Vec<ArcId>>,
}

impl Network {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, name: impl Into<String>) -> NodeId {
        self.names.push(name.into());
        self.out.push(Vec::new());
        self.inc.push(Vec::new());
        NodeId(self.names.len() - 1)
    }

    pub fn add_arc(
        &mut self,
        tail: NodeId,
        head: NodeId,
        capacity: f64,
        cost: CostFunction,
    ) -> Result<ArcId, ModelError> {
        let n = self.names.len();
        if tail.0 >= n || head.0 >= n {
            return Err(ModelError::BadNetwork(format!(
                "arc {}->{} references an undeclared node",
                tail.0, head.0
            )));
        }
        if tail == head {
            return Err(ModelError::BadNetwork(format!("self loop at node {}", self.names[tail.0])));
        }
        if !(capacity.is_finite() && capacity >= 0.0) {
            return Err(ModelError::BadNetwork(format!("capacity {capacity} is not finite and nonnegative")));
        }
        if let Some(d) = cost.pole() {
            if d <= capacity {
                return Err(ModelError::BadParameter(format!(
                    "Kleinrock pole {d} must exceed capacity {capacity}"
                )));
            }
        }
        let id = ArcId(self.arcs.len());
        self.arcs.push(Arc { id, tail, head, capacity, cost });
        self.out[tail.0].push(id);
        self.inc[head.0].push(id);
        Ok(id)
    }

    pub fn num_nodes(&self) -> usize {
        self.names.len()
    }

    pub fn num_arcs(&self) -> usize {
        self.arcs.len()
    }

    pub fn node_name(&self, v: NodeId) -> &str {
        &self.names[v.0]
    }

    pub fn node_names(&self) -> &[String] {
        &self.names
    }

    pub fn node_by_name(&self, name: &str) -> Option<NodeId> {
        self.names.iter().position(|n| n == name).map(NodeId)
    }

    pub fn arc(&self, a: ArcId) -> &Arc {
        &self.arcs[a.0]
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    /// δ⁺(v)
    pub fn out_arcs(&self, v: NodeId) -> &[ArcId] {
        &self.out[v.0]
    }

    /// δ⁻(v)
    pub fn in_arcs(&self, v: NodeId) -> &[ArcId] {
        &self.inc[v.0]
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.names.len()).map(NodeId)
    }

    /// Same topology with capacities multiplied by `factor` and each cost
    /// stretched so that `r(factor·x)` equals the old `r(x)`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut net = self.clone();
        for a in &mut net.arcs {
            a.capacity *= factor;
            a.cost = a.cost.rescaled(factor);
        }
        net
    }
}
