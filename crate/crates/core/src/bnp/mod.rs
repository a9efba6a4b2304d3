//! Branch-and-price for the unsplittable problem.
//!
//! Nodes carry arc forbiddances and rejection fixings; every node is solved
//! by one shared restricted master (TIGHT-INNER or PATTERN) whose column
//! pool persists across the tree.

mod branch;

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use serde::Serialize;

pub use branch::{branch, divergence, is_fractional, Rule};

use crate::colgen::{ColgenOptions, InnerRmp, Mode, NodeStatus, PatternRmp, Relaxation, Restrictions};
use crate::error::{BnpError, ColgenError};
use crate::heuristic::multi_start;
use crate::model::{check_feasible, objective, ArcId, CommodityId, FlowSolution, Instance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RelaxationKind {
    Tight,
    Pattern,
}

#[derive(Debug, Clone)]
pub struct BnpOptions {
    /// Stop once `(incumbent − bound) / incumbent` is at most this.
    pub gap_target: f64,
    pub time_limit: Option<Duration>,
    pub node_limit: Option<usize>,
    /// Seed of the greedy multi-start that provides the first incumbent.
    pub seed: u64,
    pub greedy_starts: usize,
    pub colgen: ColgenOptions,
}

impl Default for BnpOptions {
    fn default() -> Self {
        Self {
            gap_target: 1e-3,
            time_limit: None,
            node_limit: None,
            seed: 0,
            greedy_starts: 16,
            colgen: ColgenOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BnpStatus {
    /// Gap target reached or tree exhausted.
    Solved,
    TimeLimit,
    NodeLimit,
    /// A node's column generation hit its iteration cap.
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum NodeOutcome {
    Branched { commodity: CommodityId, children: usize },
    Integral { value: f64 },
    Pruned,
    Infeasible,
    Unresolved,
}

/// One processed node.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRecord {
    pub node: usize,
    pub parent: Option<usize>,
    pub depth: usize,
    pub rule: Option<Rule>,
    pub bound: f64,
    #[serde(flatten)]
    pub outcome: NodeOutcome,
    /// Seconds since the start of the run. Not serialized, so that traces
    /// of identical runs compare equal.
    #[serde(skip_serializing)]
    pub time_s: f64,
}

/// Integral node and whether its arc columns were integral too.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegralNode {
    pub node: usize,
    pub arc_columns_binary: bool,
}

#[derive(Debug, Clone)]
pub struct BnpResult {
    pub status: BnpStatus,
    pub incumbent: Vec<Option<Vec<ArcId>>>,
    pub incumbent_value: f64,
    pub greedy_value: f64,
    /// Global lower bound.
    pub bound: f64,
    pub root_bound: f64,
    pub root_integral: bool,
    pub nodes: usize,
    pub columns: usize,
    pub trace: Vec<TraceRecord>,
    pub integral_nodes: Vec<IntegralNode>,
    /// Incumbent value and global bound after each processed node.
    pub history: Vec<(f64, f64)>,
}

impl BnpResult {
    pub fn gap(&self) -> f64 {
        gap(self.incumbent_value, self.bound)
    }

    pub fn flow(&self) -> FlowSolution {
        FlowSolution::from_single_paths(&self.incumbent)
    }
}

/// `(incumbent − bound) / incumbent`, zero once the bound meets the incumbent.
pub fn gap(incumbent: f64, bound: f64) -> f64 {
    if bound >= incumbent {
        return 0.0;
    }
    (incumbent - bound) / incumbent.abs().max(1e-12)
}

/// Share of the distance between the splittable optimum `s` and the
/// unsplittable optimum `u` closed by a bound `r`.
pub fn relative_gap(s: f64, u: f64, r: f64) -> Result<f64, BnpError> {
    if u <= s + 1e-9 * s.abs().max(1.0) {
        return Err(BnpError::UndefinedGap { splittable: s, upper: u });
    }
    Ok((r - s) / (u - s))
}

struct Open {
    id: usize,
    parent: Option<usize>,
    depth: usize,
    bound: f64,
    rule: Option<Rule>,
    restr: Restrictions,
}

impl PartialEq for Open {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Open {}

impl PartialOrd for Open {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Open {
    /// Max-heap order: lowest bound first, then oldest node.
    fn cmp(&self, other: &Self) -> Ordering {
        other.bound.total_cmp(&self.bound).then_with(|| other.id.cmp(&self.id))
    }
}

/// Best-bound-first branch-and-price.
pub fn run(inst: &Instance, kind: RelaxationKind, opts: &BnpOptions) -> Result<BnpResult, BnpError> {
    let start = Instant::now();
    let deadline = opts.time_limit.map(|t| start + t);
    let colgen = ColgenOptions { deadline, ..opts.colgen.clone() };
    let mut master: Box<dyn Relaxation + '_> = match kind {
        RelaxationKind::Tight => Box::new(InnerRmp::new(inst, Mode::Tight, None)?),
        RelaxationKind::Pattern => Box::new(PatternRmp::new(inst)?),
    };

    let greedy = multi_start(inst, opts.greedy_starts, opts.seed);
    let mut res = BnpResult {
        status: BnpStatus::Solved,
        incumbent: greedy.paths.clone(),
        incumbent_value: greedy.objective,
        greedy_value: greedy.objective,
        bound: f64::NEG_INFINITY,
        root_bound: f64::NEG_INFINITY,
        root_integral: false,
        nodes: 0,
        columns: 0,
        trace: Vec::new(),
        integral_nodes: Vec::new(),
        history: Vec::new(),
    };

    let mut open = BinaryHeap::new();
    open.push(Open {
        id: 0,
        parent: None,
        depth: 0,
        bound: f64::NEG_INFINITY,
        rule: None,
        restr: Restrictions::for_instance(inst),
    });
    let mut next_id = 1;

    while let Some(node) = open.pop() {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            res.status = BnpStatus::TimeLimit;
            open.push(node);
            break;
        }
        if opts.node_limit.is_some_and(|n| res.nodes >= n) {
            res.status = BnpStatus::NodeLimit;
            open.push(node);
            break;
        }
        let record = |bound: f64, outcome: NodeOutcome| TraceRecord {
            node: node.id,
            parent: node.parent,
            depth: node.depth,
            rule: node.rule,
            bound,
            outcome,
            time_s: start.elapsed().as_secs_f64(),
        };
        if node.id != 0 && prunable(node.bound, res.incumbent_value) {
            res.trace.push(record(node.bound, NodeOutcome::Pruned));
            continue;
        }

        res.nodes += 1;
        let relaxed = match master.solve(&node.restr, &colgen) {
            Ok(r) => r,
            Err(e @ (ColgenError::TimeLimit | ColgenError::Convergence { .. })) => {
                res.status = match e {
                    ColgenError::TimeLimit => BnpStatus::TimeLimit,
                    _ => BnpStatus::IterationLimit,
                };
                res.trace.push(record(node.bound, NodeOutcome::Unresolved));
                open.push(node);
                break;
            }
            Err(e) => return Err(e.into()),
        };
        res.columns = relaxed.stats.path_columns + relaxed.stats.arc_columns;
        if node.id == 0 {
            res.root_bound = relaxed.bound;
            res.root_integral = relaxed.status == NodeStatus::Optimal && relaxed.is_integral();
        }

        if relaxed.status == NodeStatus::Infeasible {
            res.trace.push(record(f64::INFINITY, NodeOutcome::Infeasible));
        } else if relaxed.is_integral() {
            let paths = round_routing(&relaxed.flow);
            let flow = FlowSolution::from_single_paths(&paths);
            let value = objective(inst, &flow)?;
            if check_feasible(inst, &flow, 1e-6).is_feasible() && value < res.incumbent_value {
                res.incumbent = paths;
                res.incumbent_value = value;
            }
            res.integral_nodes.push(IntegralNode {
                node: node.id,
                arc_columns_binary: relaxed.arc_columns_integral(),
            });
            res.trace.push(record(relaxed.bound, NodeOutcome::Integral { value }));
        } else if prunable(relaxed.bound, res.incumbent_value) {
            res.trace.push(record(relaxed.bound, NodeOutcome::Pruned));
        } else {
            let k = branching_commodity(inst, &relaxed.flow).ok_or(BnpError::NotFractional(CommodityId(0)))?;
            let children = branch(inst, &node.restr, &relaxed.flow.routes[k.0], k)?;
            let bound = relaxed.bound.max(node.bound);
            res.trace.push(record(
                relaxed.bound,
                NodeOutcome::Branched { commodity: k, children: children.len() },
            ));
            for (rule, restr) in children {
                open.push(Open { id: next_id, parent: Some(node.id), depth: node.depth + 1, bound, rule: Some(rule), restr });
                next_id += 1;
            }
        }

        let lowest = open.peek().map_or(res.incumbent_value, |n| n.bound.min(res.incumbent_value));
        res.bound = res.bound.max(lowest);
        res.history.push((res.incumbent_value, res.bound));
        if gap(res.incumbent_value, res.bound) <= opts.gap_target {
            break;
        }
    }

    if open.is_empty() && res.status == BnpStatus::Solved {
        res.bound = res.bound.max(res.incumbent_value);
    } else if let Some(lowest) = open.iter().map(|n| n.bound).min_by(f64::total_cmp) {
        // Unprocessed nodes keep the bound of their parent.
        res.bound = res.bound.max(lowest.min(res.incumbent_value));
    }
    Ok(res)
}

fn prunable(bound: f64, incumbent: f64) -> bool {
    bound >= incumbent - 1e-9 * incumbent.abs().max(1.0)
}

/// Fractional commodity with the largest bandwidth, lowest id on ties.
fn branching_commodity(inst: &Instance, flow: &FlowSolution) -> Option<CommodityId> {
    let mut best: Option<CommodityId> = None;
    for (k, route) in flow.routes.iter().enumerate() {
        if !is_fractional(route) {
            continue;
        }
        let b = inst.commodities[k].bandwidth;
        if best.map_or(true, |j| b > inst.commodities[j.0].bandwidth) {
            best = Some(CommodityId(k));
        }
    }
    best
}

/// Single path per commodity from a near-integral routing.
fn round_routing(flow: &FlowSolution) -> Vec<Option<Vec<ArcId>>> {
    flow.routes
        .iter()
        .map(|r| {
            if r.rejected >= 0.5 {
                return None;
            }
            r.paths.iter().max_by(|a, b| a.1.total_cmp(&b.1)).map(|(p, _)| p.clone())
        })
        .collect()
}
