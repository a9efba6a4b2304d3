use std::collections::HashSet;

use serde::Serialize;

use super::instance::Instance;
use super::network::{ArcId, CommodityId, Network};
use crate::error::ModelError;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    pub commodity: CommodityId,
    pub arcs: Vec<ArcId>,
}

impl Path {
    pub fn new(commodity: CommodityId, arcs: Vec<ArcId>) -> Self {
        Self { commodity, arcs }
    }

    /// Checks chaining, endpoints and simplicity.
    pub fn validate(&self, inst: &Instance) -> Result<(), ModelError> {
        let bad = |reason: String| ModelError::BadPath { commodity: self.commodity, reason };
        let k = inst
            .commodities
            .get(self.commodity.0)
            .ok_or_else(|| bad("unknown commodity".into()))?;
        let net = &inst.network;
        if self.arcs.is_empty() {
            return Err(bad("empty path".into()));
        }
        if let Some(a) = self.arcs.iter().find(|a| a.0 >= net.num_arcs()) {
            return Err(bad(format!("unknown arc {}", a.0)));
        }
        let mut at = k.source;
        let mut seen = HashSet::from([at]);
        for a in &self.arcs {
            let arc = net.arc(*a);
            if arc.tail != at {
                return Err(bad(format!("arc {} does not leave node {}", a.0, net.node_name(at))));
            }
            at = arc.head;
            if !seen.insert(at) {
                return Err(bad(format!("node {} repeats", net.node_name(at))));
            }
        }
        if at != k.target {
            return Err(bad(format!("ends at {} instead of {}", net.node_name(at), net.node_name(k.target))));
        }
        Ok(())
    }

    pub fn contains(&self, a: ArcId) -> bool {
        self.arcs.contains(&a)
    }
}

/// Routing of one commodity: path ratios and rejected share.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Routing {
    pub paths: Vec<(Vec<ArcId>, f64)>,
    pub rejected: f64,
}

impl Routing {
    pub fn routed(&self) -> f64 {
        self.paths.iter().map(|p| p.1).sum()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FlowSolution {
    pub routes: Vec<Routing>,
}

impl FlowSolution {
    /// Every commodity rejected.
    pub fn empty(inst: &Instance) -> Self {
        Self {
            routes: vec![Routing { paths: Vec::new(), rejected: 1.0 }; inst.num_commodities()],
        }
    }

    /// One full path per commodity, `None` meaning rejected.
    pub fn from_single_paths(paths: &[Option<Vec<ArcId>>]) -> Self {
        let routes = paths
            .iter()
            .map(|p| match p {
                Some(arcs) => Routing { paths: vec![(arcs.clone(), 1.0)], rejected: 0.0 },
                None => Routing { paths: Vec::new(), rejected: 1.0 },
            })
            .collect();
        Self { routes }
    }

    /// Per-arc load `x_a = Σ_k Σ_{p∋a} b_k x_k^p`.
    pub fn loads(&self, inst: &Instance) -> Result<Vec<f64>, ModelError> {
        self.check_shape(inst)?;
        let mut x = vec![0.0; inst.network.num_arcs()];
        for (k, r) in self.routes.iter().enumerate() {
            let b = inst.commodities[k].bandwidth;
            for (arcs, ratio) in &r.paths {
                for a in arcs {
                    let slot = x
                        .get_mut(a.0)
                        .ok_or_else(|| ModelError::Shape(format!("unknown arc {}", a.0)))?;
                    *slot += b * ratio;
                }
            }
        }
        Ok(x)
    }

    fn check_shape(&self, inst: &Instance) -> Result<(), ModelError> {
        if self.routes.len() != inst.num_commodities() {
            return Err(ModelError::Shape(format!(
                "{} routings for {} commodities",
                self.routes.len(),
                inst.num_commodities()
            )));
        }
        Ok(())
    }
}

/// `Σ_a r_a(x_a) + Σ_k M·b_k·y_k`.
pub fn objective(inst: &Instance, sol: &FlowSolution) -> Result<f64, ModelError> {
    let loads = sol.loads(inst)?;
    objective_from_loads(inst, &loads, sol.routes.iter().map(|r| r.rejected))
}

pub fn objective_from_loads(
    inst: &Instance,
    loads: &[f64],
    rejected: impl Iterator<Item = f64>,
) -> Result<f64, ModelError> {
    let mut total = 0.0;
    for (arc, x) in inst.network.arcs().iter().zip(loads) {
        // Loads assembled from LP ratios may dip below zero by rounding.
        total += arc.cost.evaluate(x.max(0.0))?;
    }
    for (k, y) in rejected.enumerate() {
        total += inst.penalty() * inst.commodities[k].bandwidth * y;
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Path { commodity: usize, reason: String },
    Ratio { commodity: usize, value: f64 },
    Coverage { commodity: usize, missing: f64 },
    Capacity { arc: usize, excess: f64 },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub violations: Vec<Violation>,
    /// Arcs with non-convex costs; accepted but reported.
    pub nonconvex_arcs: Vec<usize>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn check_feasible(inst: &Instance, sol: &FlowSolution, tol: f64) -> FeasibilityReport {
    let mut report = FeasibilityReport {
        nonconvex_arcs: inst.nonconvex_arcs().into_iter().map(|a| a.0).collect(),
        ..Default::default()
    };
    if let Err(e) = sol.check_shape(inst) {
        report.violations.push(Violation::Path { commodity: 0, reason: e.to_string() });
        return report;
    }
    let mut loads = vec![0.0; inst.network.num_arcs()];
    for (k, r) in sol.routes.iter().enumerate() {
        let b = inst.commodities[k].bandwidth;
        for (arcs, ratio) in &r.paths {
            let path = Path::new(CommodityId(k), arcs.clone());
            match path.validate(inst) {
                Ok(()) => {
                    for a in arcs {
                        loads[a.0] += b * ratio;
                    }
                }
                Err(e) => report.violations.push(Violation::Path { commodity: k, reason: e.to_string() }),
            }
            if *ratio < -tol || *ratio > 1.0 + tol {
                report.violations.push(Violation::Ratio { commodity: k, value: *ratio });
            }
        }
        if r.rejected < -tol || r.rejected > 1.0 + tol {
            report.violations.push(Violation::Ratio { commodity: k, value: r.rejected });
        }
        let covered = r.routed() + r.rejected;
        if covered < 1.0 - tol {
            report.violations.push(Violation::Coverage { commodity: k, missing: 1.0 - covered });
        }
    }
    for (arc, x) in inst.network.arcs().iter().zip(&loads) {
        if *x > arc.capacity + tol {
            report.violations.push(Violation::Capacity { arc: arc.id.0, excess: x - arc.capacity });
        }
    }
    report
}

/// Arc sequence rendered with node names, e.g. `s-a-t`.
pub fn describe_path(net: &Network, arcs: &[ArcId]) -> String {
    let mut out = String::new();
    for (i, a) in arcs.iter().enumerate() {
        let arc = net.arc(*a);
        if i == 0 {
            out.push_str(net.node_name(arc.tail));
        }
        out.push('-');
        out.push_str(net.node_name(arc.head));
    }
    out
}
