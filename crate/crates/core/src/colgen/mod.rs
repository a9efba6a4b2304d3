//! Column generation for the INNER, TIGHT-INNER and PATTERN relaxations.
//!
//! Every restricted master starts from the all-rejected solution and grows
//! path columns per commodity and arc columns (vertices or patterns) per
//! arc until no column prices out.

mod inner;
mod knapsack;
mod pattern;
mod pricing;

use std::collections::BTreeSet;
use std::time::Instant;

use cmcf_lp::{Lp, LpSolution, Status};
use serde::Serialize;

pub use inner::{price_paths, price_vertices, InnerDuals, InnerRmp, Mode};
pub use knapsack::{best_subset, BandwidthScale, KnapsackItem, KnapsackPick};
pub use pattern::{price_pattern_paths, price_patterns, PatternDuals, PatternRmp};
pub use pricing::{best_vertex, golden_section_max, GRID_POINTS};

use crate::error::ColgenError;
use crate::model::{ArcId, CommodityId, FlowSolution, Instance};

/// Slack used when comparing bandwidths against capacities.
pub const CAP_TOL: f64 = 1e-9;
/// Integrality tolerance on LP values.
pub const INT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum YFix {
    Free,
    /// Commodity must be routed.
    Zero,
    /// Commodity is rejected.
    One,
}

/// Branching state: arcs forbidden per commodity and rejection fixings.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Restrictions {
    pub forbidden: Vec<BTreeSet<ArcId>>,
    pub y: Vec<YFix>,
}

impl Restrictions {
    pub fn none(commodities: usize) -> Self {
        Self { forbidden: vec![BTreeSet::new(); commodities], y: vec![YFix::Free; commodities] }
    }

    pub fn for_instance(inst: &Instance) -> Self {
        Self::none(inst.num_commodities())
    }

    /// Whether a single-path routing (or rejection) of `k` respects the
    /// fixings.
    pub fn permits(&self, k: CommodityId, route: Option<&[ArcId]>) -> bool {
        match route {
            None => self.y[k.0] != YFix::Zero,
            Some(arcs) => self.y[k.0] != YFix::One && arcs.iter().all(|a| !self.forbidden[k.0].contains(a)),
        }
    }

    /// Arcs commodity `k` is forced through: starting at the source, follow
    /// nodes with exactly one allowed outgoing arc. Only commodities fixed
    /// as routed are forced.
    pub fn forced_arcs(&self, inst: &Instance, k: CommodityId) -> Vec<ArcId> {
        if self.y[k.0] != YFix::Zero {
            return Vec::new();
        }
        let c = inst.commodity(k);
        let net = &inst.network;
        let mut out = Vec::new();
        let mut at = c.source;
        let mut seen = vec![false; net.num_nodes()];
        while at != c.target && !seen[at.0] {
            seen[at.0] = true;
            let mut allowed = net.out_arcs(at).iter().filter(|a| {
                !self.forbidden[k.0].contains(a) && net.arc(**a).capacity + CAP_TOL >= c.bandwidth
            });
            match (allowed.next(), allowed.next()) {
                (Some(a), None) => {
                    out.push(*a);
                    at = net.arc(*a).head;
                }
                _ => break,
            }
        }
        out
    }
}

/// Per-commodity arc masks for pricing.
#[derive(Debug, Clone)]
pub struct Admissible {
    mask: Vec<Vec<bool>>,
}

impl Admissible {
    /// `unsplittable` adds the capacity and residual-capacity rules of the
    /// tightened relaxations.
    pub fn new(inst: &Instance, restr: &Restrictions, unsplittable: bool) -> Self {
        let net = &inst.network;
        let m = net.num_arcs();
        let mut forced_load = vec![0.0; m];
        let mut forced_by: Vec<Vec<bool>> = vec![vec![false; m]; inst.num_commodities()];
        if unsplittable {
            for c in &inst.commodities {
                for a in restr.forced_arcs(inst, c.id) {
                    forced_load[a.0] += c.bandwidth;
                    forced_by[c.id.0][a.0] = true;
                }
            }
        }
        let mask = inst
            .commodities
            .iter()
            .map(|c| {
                let k = c.id.0;
                net.arcs()
                    .iter()
                    .map(|arc| {
                        let a = arc.id.0;
                        if restr.y[k] == YFix::One || restr.forbidden[k].contains(&arc.id) {
                            return false;
                        }
                        if !unsplittable {
                            return true;
                        }
                        let others = forced_load[a] - if forced_by[k][a] { c.bandwidth } else { 0.0 };
                        arc.capacity - others + CAP_TOL >= c.bandwidth
                    })
                    .collect()
            })
            .collect();
        Self { mask }
    }

    pub fn allows(&self, k: CommodityId, a: ArcId) -> bool {
        self.mask[k.0][a.0]
    }

    pub fn allows_path(&self, k: CommodityId, arcs: &[ArcId]) -> bool {
        arcs.iter().all(|a| self.allows(k, *a))
    }
}

#[derive(Debug, Clone)]
pub struct ColgenOptions {
    /// Relative pricing tolerance `ε_price`.
    pub price_tol: f64,
    pub max_iterations: usize,
    pub deadline: Option<Instant>,
    /// Disable to evaluate a fixed set of path columns.
    pub price_paths: bool,
    /// Disable to evaluate a fixed set of vertex or pattern columns.
    pub price_arc_columns: bool,
}

impl Default for ColgenOptions {
    fn default() -> Self {
        Self { price_tol: 1e-7, max_iterations: 10_000, deadline: None, price_paths: true, price_arc_columns: true }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ColgenStats {
    pub iterations: usize,
    pub path_columns: usize,
    pub arc_columns: usize,
    /// RMP optimum after each phase-two solve.
    pub bound_trajectory: Vec<f64>,
    pub farkas_rounds: usize,
    /// Candidates dropped because an identical column already existed.
    pub duplicates: usize,
    /// Vertex searches that went through the non-convex grid.
    pub grid_searches: usize,
    pub lp_pivots: usize,
    /// Pattern relaxation: integer scale applied to bandwidths.
    pub bandwidth_scale: Option<u64>,
    pub bandwidth_rounded: bool,
    /// Pattern relaxation: knapsack table cells per arc, last round.
    pub dp_cells: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeStatus {
    Optimal,
    Infeasible,
}

/// Value of an arc column (vertex or pattern) in the final RMP.
#[derive(Debug, Clone, Serialize)]
pub struct ArcColumnValue {
    pub arc: ArcId,
    /// Breakpoint `c_a^i` or pattern total.
    pub load: f64,
    /// Pattern members; empty for vertices.
    pub members: Vec<CommodityId>,
    pub cost: f64,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct RelaxationResult {
    pub status: NodeStatus,
    pub bound: f64,
    pub flow: FlowSolution,
    pub arc_columns: Vec<ArcColumnValue>,
    pub stats: ColgenStats,
}

impl RelaxationResult {
    /// All path and rejection values within [`INT_TOL`] of 0 or 1.
    pub fn is_integral(&self) -> bool {
        self.flow.routes.iter().all(|r| {
            is_binary(r.rejected) && r.paths.iter().all(|(_, v)| is_binary(*v))
        })
    }

    pub fn arc_columns_integral(&self) -> bool {
        self.arc_columns.iter().all(|c| is_binary(c.value))
    }

    /// `Σ_i value_i·cost_i` over the columns of one arc.
    pub fn arc_cost(&self, a: ArcId) -> f64 {
        self.arc_columns.iter().filter(|c| c.arc == a).map(|c| c.value * c.cost).sum()
    }
}

pub fn is_binary(v: f64) -> bool {
    v.abs() <= INT_TOL || (v - 1.0).abs() <= INT_TOL
}

/// Common interface of the restricted masters.
pub trait Relaxation {
    fn instance(&self) -> &Instance;
    /// Column generation under `restr` until no column prices out.
    fn solve(&mut self, restr: &Restrictions, opts: &ColgenOptions) -> Result<RelaxationResult, ColgenError>;
    fn name(&self) -> &'static str;
}

const MAX_POLISH_ROUNDS: usize = 8;

/// Master-specific steps of the shared column-generation loop.
pub(crate) trait Master {
    fn lp(&mut self) -> &mut Lp;
    fn apply(&mut self, restr: &Restrictions, adm: &Admissible) -> Result<(), ColgenError>;
    /// Adds priced columns; `weight` is 1 for optimal duals, 0 for Farkas
    /// multipliers. Returns the number of columns added.
    fn price(
        &mut self,
        sol: &LpSolution,
        farkas: bool,
        adm: &Admissible,
        opts: &ColgenOptions,
        stats: &mut ColgenStats,
    ) -> Result<usize, ColgenError>;
    fn extract(&self, sol: &LpSolution) -> (FlowSolution, Vec<ArcColumnValue>);
    /// Called once pricing is exhausted: adds columns that let the next
    /// solve reach a sparser optimal basis. Returns the number added.
    fn polish(&mut self, _sol: &LpSolution, _opts: &ColgenOptions) -> Result<usize, ColgenError> {
        Ok(0)
    }
    fn unsplittable(&self) -> bool;
    fn instance(&self) -> &Instance;
}

pub(crate) fn drive<M: Master>(
    master: &mut M,
    restr: &Restrictions,
    opts: &ColgenOptions,
    mut stats: ColgenStats,
) -> Result<RelaxationResult, ColgenError> {
    let adm = Admissible::new(master.instance(), restr, master.unsplittable());
    master.apply(restr, &adm)?;
    let mut polish_rounds = 0;
    // Pricing runs at the configured tolerance, then finishes at a tenth of
    // it so that no column sits just under the stopping threshold.
    let fine = ColgenOptions { price_tol: opts.price_tol / 10.0, ..opts.clone() };
    let mut cur = opts;
    loop {
        if stats.iterations >= opts.max_iterations {
            let bound = stats.bound_trajectory.last().copied().unwrap_or(f64::NAN);
            return Err(ColgenError::Convergence { iterations: stats.iterations, bound });
        }
        if opts.deadline.is_some_and(|d| Instant::now() >= d) {
            return Err(ColgenError::TimeLimit);
        }
        stats.iterations += 1;
        let sol = master.lp().solve()?;
        stats.lp_pivots += sol.pivots;
        match sol.status {
            Status::Unbounded => return Err(ColgenError::Unbounded),
            Status::Infeasible => {
                stats.farkas_rounds += 1;
                if master.price(&sol, true, &adm, cur, &mut stats)? == 0 {
                    return Ok(RelaxationResult {
                        status: NodeStatus::Infeasible,
                        bound: f64::INFINITY,
                        flow: FlowSolution::default(),
                        arc_columns: Vec::new(),
                        stats,
                    });
                }
            }
            Status::Optimal => {
                stats.bound_trajectory.push(sol.objective);
                if master.price(&sol, false, &adm, cur, &mut stats)? == 0 {
                    if !std::ptr::eq(cur, &fine) {
                        cur = &fine;
                        continue;
                    }
                    if polish_rounds < MAX_POLISH_ROUNDS && master.polish(&sol, cur)? > 0 {
                        polish_rounds += 1;
                        continue;
                    }
                    let (flow, arc_columns) = master.extract(&sol);
                    return Ok(RelaxationResult {
                        status: NodeStatus::Optimal,
                        bound: sol.objective,
                        flow,
                        arc_columns,
                        stats,
                    });
                }
            }
        }
    }
}

/// Row price: normalised dual, or normalised Farkas multiplier.
pub(crate) fn price_of(lp: &Lp, sol: &LpSolution, row: usize, farkas: bool) -> f64 {
    if farkas {
        sol.farkas_price(lp, row).unwrap_or(0.0)
    } else {
        sol.row_price(lp, row)
    }
}

/// Splittable optimum: INNER column generation without restrictions.
pub fn solve_inner(inst: &Instance, opts: &ColgenOptions) -> Result<RelaxationResult, ColgenError> {
    InnerRmp::new(inst, Mode::Inner, None)?.solve(&Restrictions::for_instance(inst), opts)
}

pub fn solve_tight(inst: &Instance, opts: &ColgenOptions) -> Result<RelaxationResult, ColgenError> {
    InnerRmp::new(inst, Mode::Tight, None)?.solve(&Restrictions::for_instance(inst), opts)
}

pub fn solve_pattern(inst: &Instance, opts: &ColgenOptions) -> Result<RelaxationResult, ColgenError> {
    PatternRmp::new(inst)?.solve(&Restrictions::for_instance(inst), opts)
}
