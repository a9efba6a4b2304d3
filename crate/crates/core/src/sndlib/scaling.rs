use serde::Serialize;

use crate::compact::max_acceptance;
use crate::error::PrepError;
use crate::graph::reachable;
use crate::model::Instance;

/// Unaccepted bandwidth below which a factor counts as feasible.
pub const ACCEPT_TOL: f64 = 1e-6;
/// Capacity margin applied on top of the congestion factor.
pub const MARGIN: f64 = 1.05;
const MAX_FACTOR: f64 = 1048576.0;

#[derive(Debug, Clone, Serialize)]
pub struct Probe {
    pub factor: f64,
    pub unaccepted: f64,
    pub feasible: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingReport {
    /// Smallest probed factor accepting every commodity.
    pub tau: f64,
    /// Every probe in evaluation order.
    pub probes: Vec<Probe>,
    /// `tau·1.05`, applied to every capacity.
    pub multiplier: f64,
    /// Probe at `0.99·tau`, expected infeasible.
    pub below: Probe,
}

fn probe(inst: &Instance, factor: f64) -> Result<Probe, PrepError> {
    let unaccepted = max_acceptance(&inst.scaled(factor)?)?;
    Ok(Probe { factor, unaccepted, feasible: unaccepted <= ACCEPT_TOL })
}

/// Finds the capacity factor `tau` at which the instance just becomes fully
/// acceptable and returns the instance with capacities scaled by
/// `tau·1.05`.
pub fn scale_to_congestion(inst: &Instance) -> Result<(Instance, ScalingReport), PrepError> {
    if inst.commodities.is_empty() {
        return Err(PrepError::NoDemand);
    }
    let net = &inst.network;
    if inst.commodities.iter().any(|c| !reachable(net, c.source, c.target, |_| true)) {
        return Err(PrepError::NoFeasibleFactor);
    }
    let mut probes = Vec::new();
    let run = |f: f64, probes: &mut Vec<Probe>| -> Result<bool, PrepError> {
        let p = probe(inst, f)?;
        let ok = p.feasible;
        probes.push(p);
        Ok(ok)
    };
    let (mut lo, mut hi);
    if run(1.0, &mut probes)? {
        hi = 1.0;
        lo = 0.5;
        while run(lo, &mut probes)? {
            hi = lo;
            lo /= 2.0;
            if lo < 1.0 / MAX_FACTOR {
                return Err(PrepError::NoFeasibleFactor);
            }
        }
    } else {
        lo = 1.0;
        hi = 2.0;
        while !run(hi, &mut probes)? {
            lo = hi;
            hi *= 2.0;
            if hi > MAX_FACTOR {
                return Err(PrepError::NoFeasibleFactor);
            }
        }
    }
    while hi / lo > 1.01 {
        let mid = (lo * hi).sqrt();
        if run(mid, &mut probes)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let tau = hi;
    let below = probe(inst, 0.99 * tau)?;
    let multiplier = tau * MARGIN;
    let scaled = inst.scaled(multiplier)?;
    Ok((scaled, ScalingReport { tau, probes, multiplier, below }))
}
