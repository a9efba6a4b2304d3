//! Flow deviation (Frank-Wolfe) for the uncapacitated splittable problem.
//!
//! Capacities are ignored. Kleinrock costs are continued past `0.99·d` by
//! their second-order Taylor expansion so every load has a finite cost.

use serde::Serialize;

use crate::colgen::golden_section_max;
use crate::error::FlowDevError;
use crate::graph::shortest_path;
use crate::model::{ArcId, CommodityId, CostFunction, FlowSolution, Instance, Routing};

/// Fraction of the pole where Kleinrock costs switch to the quadratic
/// continuation.
pub const POLE_SWITCH: f64 = 0.99;
const LINE_SEARCH_ITERS: usize = 80;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FwState {
    pub loads: Vec<f64>,
    /// Value of the modified objective.
    pub objective: f64,
    /// Frank-Wolfe duality gap `∇F(x)·(x − y)`.
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Path decomposition of `loads`: per commodity, paths with ratios.
    pub paths: Vec<Vec<(Vec<ArcId>, f64)>>,
    /// Objective after each iteration.
    pub trajectory: Vec<f64>,
}

impl FwState {
    pub fn relative_gap(&self) -> f64 {
        self.gap / self.objective.abs().max(1e-12)
    }

    pub fn flow(&self) -> FlowSolution {
        FlowSolution {
            routes: self.paths.iter().map(|p| Routing { paths: p.clone(), rejected: 0.0 }).collect(),
        }
    }
}

/// Cost with the Kleinrock continuation.
pub fn modified_cost(cost: &CostFunction, x: f64) -> Result<f64, FlowDevError> {
    if let CostFunction::Kleinrock { f, d } = *cost {
        let s = POLE_SWITCH * d;
        if x > s {
            let h = x - s;
            let u = d - s;
            return Ok(f / u + f / (u * u) * h + f / (u * u * u) * h * h);
        }
    }
    Ok(cost.evaluate(x.max(0.0))?)
}

pub fn modified_derivative(cost: &CostFunction, x: f64, cap: f64) -> Result<f64, FlowDevError> {
    if let CostFunction::Kleinrock { f, d } = *cost {
        let s = POLE_SWITCH * d;
        if x > s {
            let u = d - s;
            return Ok(f / (u * u) + 2.0 * f / (u * u * u) * (x - s));
        }
    }
    Ok(cost.derivative(x.max(0.0), cap)?)
}

/// Routes every commodity entirely on its `weights`-shortest path.
/// Returns the arc loads and the chosen paths.
pub fn all_or_nothing(inst: &Instance, weights: &[f64]) -> Result<(Vec<f64>, Vec<Vec<ArcId>>), FlowDevError> {
    if let Some(a) = weights.iter().position(|w| *w < 0.0 || w.is_nan()) {
        return Err(FlowDevError::NegativeWeight(ArcId(a)));
    }
    let net = &inst.network;
    let mut loads = vec![0.0; net.num_arcs()];
    let mut paths = Vec::with_capacity(inst.num_commodities());
    for (k, c) in inst.commodities.iter().enumerate() {
        let (_, arcs) = shortest_path(net, c.source, c.target, |a| Some(weights[a.0]))
            .ok_or(FlowDevError::Disconnected(CommodityId(k)))?;
        for a in &arcs {
            loads[a.0] += c.bandwidth;
        }
        paths.push(arcs);
    }
    Ok((loads, paths))
}

fn total(inst: &Instance, loads: &[f64]) -> Result<f64, FlowDevError> {
    let mut sum = 0.0;
    for (arc, x) in inst.network.arcs().iter().zip(loads) {
        sum += modified_cost(&arc.cost, *x)?;
    }
    Ok(sum)
}

fn marginals(inst: &Instance, loads: &[f64]) -> Result<Vec<f64>, FlowDevError> {
    inst.network
        .arcs()
        .iter()
        .zip(loads)
        .map(|(arc, x)| modified_derivative(&arc.cost, *x, arc.capacity).map(|w| w.max(0.0)))
        .collect()
}

/// Frank-Wolfe until the relative gap is at most `tol` or `max_iters`
/// iterations ran.
pub fn run(inst: &Instance, tol: f64, max_iters: usize) -> Result<FwState, FlowDevError> {
    let m = inst.network.num_arcs();
    let (mut x, first) = all_or_nothing(inst, &marginals(inst, &vec![0.0; m])?)?;
    let mut paths: Vec<Vec<(Vec<ArcId>, f64)>> = first.into_iter().map(|p| vec![(p, 1.0)]).collect();
    let mut obj = total(inst, &x)?;
    let mut state = FwState {
        loads: Vec::new(),
        objective: obj,
        gap: f64::INFINITY,
        iterations: 0,
        converged: false,
        paths: Vec::new(),
        trajectory: vec![obj],
    };

    while state.iterations < max_iters {
        state.iterations += 1;
        let w = marginals(inst, &x)?;
        let (y, aon) = all_or_nothing(inst, &w)?;
        let gap: f64 = (0..m).map(|a| w[a] * (x[a] - y[a])).sum::<f64>().max(0.0);
        state.gap = gap;
        if gap <= tol * obj.abs().max(1e-12) {
            state.converged = true;
            break;
        }
        let along = |t: f64| -> f64 {
            let z: Vec<f64> = (0..m).map(|a| x[a] + t * (y[a] - x[a])).collect();
            total(inst, &z).map_or(f64::NEG_INFINITY, |v| -v)
        };
        let mut theta = golden_section_max(along, 0.0, 1.0, 1e-12, LINE_SEARCH_ITERS);
        let mut next = -along(theta);
        if !(next <= obj) {
            theta = 0.0;
            next = obj;
        }
        if theta == 0.0 {
            // No descent found along the direction.
            break;
        }
        for a in 0..m {
            x[a] += theta * (y[a] - x[a]);
        }
        for (k, p) in aon.into_iter().enumerate() {
            let route = &mut paths[k];
            for entry in route.iter_mut() {
                entry.1 *= 1.0 - theta;
            }
            match route.iter_mut().find(|(q, _)| *q == p) {
                Some(entry) => entry.1 += theta,
                None => route.push((p, theta)),
            }
            route.retain(|(_, v)| *v > 1e-15);
        }
        obj = next;
        state.trajectory.push(obj);
    }
    state.loads = x;
    state.objective = obj;
    state.paths = paths;
    Ok(state)
}
