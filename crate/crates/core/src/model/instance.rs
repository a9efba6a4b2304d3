use super::network::{ArcId, CommodityId, Network, NodeId};
use crate::error::ModelError;

#[derive(Debug, Clone, PartialEq)]
pub struct Commodity {
    pub id: CommodityId,
    pub source: NodeId,
    pub target: NodeId,
    pub bandwidth: f64,
}

/// Network, demands and the rejection penalty `M`.
#[derive(Debug, Clone)]
pub struct Instance {
    pub network: Network,
    pub commodities: Vec<Commodity>,
    penalty: f64,
}

impl Instance {
    /// Builds an instance with `M = 2·(1 + Σ_a L_a)`.
    pub fn new(network: Network, demands: &[(NodeId, NodeId, f64)]) -> Result<Self, ModelError> {
        let m = default_penalty(&network);
        Self::with_penalty(network, demands, m)
    }

    pub fn with_penalty(
        network: Network,
        demands: &[(NodeId, NodeId, f64)],
        penalty: f64,
    ) -> Result<Self, ModelError> {
        let mut commodities = Vec::with_capacity(demands.len());
        for (i, &(s, t, b)) in demands.iter().enumerate() {
            let bad = |reason: &str| ModelError::BadCommodity { id: i, reason: reason.to_string() };
            if s.0 >= network.num_nodes() || t.0 >= network.num_nodes() {
                return Err(bad("endpoint is not a declared node"));
            }
            if s == t {
                return Err(bad("source equals target"));
            }
            if !(b > 0.0 && b.is_finite()) {
                return Err(bad("bandwidth must be positive"));
            }
            commodities.push(Commodity { id: CommodityId(i), source: s, target: t, bandwidth: b });
        }
        let lipschitz_sum = lipschitz_sum(&network);
        if !(penalty > lipschitz_sum) {
            return Err(ModelError::PenaltyTooSmall { penalty, lipschitz_sum });
        }
        Ok(Self { network, commodities, penalty })
    }

    /// `M`
    pub fn penalty(&self) -> f64 {
        self.penalty
    }

    pub fn commodity(&self, k: CommodityId) -> &Commodity {
        &self.commodities[k.0]
    }

    pub fn num_commodities(&self) -> usize {
        self.commodities.len()
    }

    pub fn demands(&self) -> Vec<(NodeId, NodeId, f64)> {
        self.commodities.iter().map(|c| (c.source, c.target, c.bandwidth)).collect()
    }

    /// `Σ_a r_a(0)`, the cost of the empty flow without penalties.
    pub fn offset_sum(&self) -> Result<f64, ModelError> {
        self.network.arcs().iter().map(|a| a.cost.evaluate(0.0)).sum()
    }

    /// Arcs whose cost is declared non-convex.
    pub fn nonconvex_arcs(&self) -> Vec<ArcId> {
        self.network.arcs().iter().filter(|a| !a.cost.is_convex()).map(|a| a.id).collect()
    }

    /// Same demands on a network with capacities multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self, ModelError> {
        Self::new(self.network.scaled(factor), &self.demands())
    }
}

pub fn lipschitz_sum(network: &Network) -> f64 {
    network.arcs().iter().map(|a| a.cost.lipschitz_bound(a.capacity)).sum()
}

pub fn default_penalty(network: &Network) -> f64 {
    2.0 * (1.0 + lipschitz_sum(network))
}
