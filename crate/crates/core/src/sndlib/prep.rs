use std::collections::HashSet;
use std::str::FromStr;

use super::parse::{RawDemand, RawInstance, RawLink};
use crate::error::{ModelError, PrepError};
use crate::model::{CostFunction, Instance, Network};

/// Cost family used when calibrating library costs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostKind {
    Linear,
    Quadratic,
    Kleinrock,
}

impl FromStr for CostKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "linear" => Ok(Self::Linear),
            "quadratic" => Ok(Self::Quadratic),
            "kleinrock" => Ok(Self::Kleinrock),
            _ => Err(format!("unknown cost kind '{s}' (linear, quadratic, kleinrock)")),
        }
    }
}

impl CostKind {
    /// Cost with `r(c) = cost` on an arc of capacity `c`.
    pub fn calibrated(self, capacity: f64, cost: f64) -> Result<CostFunction, ModelError> {
        match self {
            Self::Linear => CostFunction::linear(cost / capacity),
            Self::Quadratic => CostFunction::quadratic(cost / (capacity * capacity)),
            Self::Kleinrock => {
                let d = 1.01 * capacity;
                CostFunction::kleinrock(cost * (d - capacity), d)
            }
        }
    }
}

/// Adds a reverse arc, with the same capacity and cost, for every link
/// lacking one.
pub fn symmetrize(raw: &RawInstance) -> RawInstance {
    let mut out = raw.clone();
    let mut present: HashSet<(String, String)> =
        raw.links.iter().map(|l| (l.source.clone(), l.target.clone())).collect();
    for l in &raw.links {
        let rev = (l.target.clone(), l.source.clone());
        if present.insert(rev) {
            out.links.push(RawLink {
                id: format!("{}_rev", l.id),
                source: l.target.clone(),
                target: l.source.clone(),
                capacity: l.capacity,
                cost: l.cost,
            });
        }
    }
    out
}

/// Replaces demands sharing source and target by one carrying their sum,
/// in order of first appearance.
pub fn merge_commodities(raw: &RawInstance) -> RawInstance {
    let mut demands: Vec<RawDemand> = Vec::new();
    for d in &raw.demands {
        match demands.iter_mut().find(|m| m.source == d.source && m.target == d.target) {
            Some(m) => m.value += d.value,
            None => demands.push(d.clone()),
        }
    }
    RawInstance { demands, ..raw.clone() }
}

/// Builds an instance whose arc costs reproduce the library link costs at
/// capacity; links without a cost use 1.
pub fn calibrate_costs(raw: &RawInstance, kind: CostKind) -> Result<Instance, PrepError> {
    calibrate_with(raw, |c, cost| kind.calibrated(c, cost))
}

pub fn calibrate_with(
    raw: &RawInstance,
    mut make: impl FnMut(f64, f64) -> Result<CostFunction, ModelError>,
) -> Result<Instance, PrepError> {
    let mut net = Network::new();
    for n in &raw.nodes {
        net.add_node(n.clone());
    }
    let node = |name: &str, net: &Network| {
        net.node_by_name(name)
            .ok_or_else(|| ModelError::BadNetwork(format!("unknown node '{name}'")))
    };
    for l in &raw.links {
        let cost = l.cost.unwrap_or(1.0);
        if l.capacity <= 0.0 && cost != 0.0 {
            return Err(PrepError::Calibration { link: l.id.clone(), capacity: l.capacity, cost });
        }
        let f = make(l.capacity, cost)?;
        let (s, t) = (node(&l.source, &net)?, node(&l.target, &net)?);
        net.add_arc(s, t, l.capacity, f)?;
    }
    let mut demands = Vec::with_capacity(raw.demands.len());
    for d in &raw.demands {
        demands.push((node(&d.source, &net)?, node(&d.target, &net)?, d.value));
    }
    Ok(Instance::new(net, &demands)?)
}
