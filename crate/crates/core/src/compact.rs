//! Arc-flow (compact) linear programs over an instance.

use cmcf_lp::{Lp, LpError, Sense, Status};

use crate::model::{CostFunction, Instance};

/// Objective of the compact LP.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompactObjective {
    /// `min Σ_k b_k y_k`: rejected bandwidth.
    Acceptance,
    /// `min Σ_a f_a x_a + M Σ_k b_k y_k` on linear-cost instances.
    LinearCost,
}

#[derive(Debug, Clone)]
pub struct CompactSolution {
    pub objective: f64,
    /// Per-arc load.
    pub loads: Vec<f64>,
    /// Per-commodity rejected share.
    pub rejected: Vec<f64>,
}

/// Solves the splittable arc-flow LP with flow conservation, capacity rows
/// and rejection variables.
pub fn solve_compact(inst: &Instance, objective: CompactObjective) -> Result<CompactSolution, LpError> {
    let net = &inst.network;
    let (n, m, kk) = (net.num_nodes(), net.num_arcs(), inst.num_commodities());
    let mut lp = Lp::new();
    // Conservation rows per (commodity, node), the target row omitted
    // because it is implied by the others.
    let mut node_row = vec![vec![None; n]; kk];
    for (k, c) in inst.commodities.iter().enumerate() {
        for v in net.nodes() {
            if v == c.target {
                continue;
            }
            let rhs = if v == c.source { 1.0 } else { 0.0 };
            node_row[k][v.0] = Some(lp.add_row(Sense::Eq, rhs));
        }
    }
    let cap_row: Vec<usize> = net.arcs().iter().map(|a| lp.add_row(Sense::Le, a.capacity)).collect();
    let mut flow_col = vec![vec![0usize; m]; kk];
    for (k, c) in inst.commodities.iter().enumerate() {
        for arc in net.arcs() {
            let mut entries = vec![(cap_row[arc.id.0], c.bandwidth)];
            if let Some(r) = node_row[k][arc.tail.0] {
                entries.push((r, 1.0));
            }
            if let Some(r) = node_row[k][arc.head.0] {
                entries.push((r, -1.0));
            }
            let cost = match objective {
                CompactObjective::Acceptance => 0.0,
                CompactObjective::LinearCost => match &arc.cost {
                    CostFunction::Linear { f } => f * c.bandwidth,
                    other => {
                        return Err(LpError::Numerical(format!(
                            "linear-cost LP needs linear arcs, found {}",
                            other.kind()
                        )))
                    }
                },
            };
            flow_col[k][arc.id.0] = lp.add_column(cost, 0.0, None, &entries)?;
        }
    }
    let mut rej_col = Vec::with_capacity(kk);
    for (k, c) in inst.commodities.iter().enumerate() {
        let cost = match objective {
            CompactObjective::Acceptance => c.bandwidth,
            CompactObjective::LinearCost => inst.penalty() * c.bandwidth,
        };
        let row = node_row[k][c.source.0].expect("source row");
        rej_col.push(lp.add_column(cost, 0.0, Some(1.0), &[(row, 1.0)])?);
    }
    let sol = lp.solve()?;
    if sol.status != Status::Optimal {
        return Err(LpError::Numerical(format!("compact LP ended {:?}", sol.status)));
    }
    let mut loads = vec![0.0; m];
    for (k, c) in inst.commodities.iter().enumerate() {
        for a in 0..m {
            loads[a] += c.bandwidth * sol.primal[flow_col[k][a]];
        }
    }
    let rejected = rej_col.iter().map(|j| sol.primal[*j]).collect();
    Ok(CompactSolution { objective: sol.objective, loads, rejected })
}

/// Bandwidth that cannot be accepted even when splitting is allowed.
pub fn max_acceptance(inst: &Instance) -> Result<f64, LpError> {
    Ok(solve_compact(inst, CompactObjective::Acceptance)?.objective.max(0.0))
}
