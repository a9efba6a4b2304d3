use std::collections::{HashMap, HashSet};

use cmcf_lp::{Lp, LpSolution, Sense};

use super::inner::set_y_bounds;
use super::knapsack::{best_subset, BandwidthScale, KnapsackItem};
use super::{
    drive, price_of, Admissible, ArcColumnValue, ColgenOptions, ColgenStats, Master, Relaxation,
    RelaxationResult, Restrictions, CAP_TOL,
};
use crate::error::ColgenError;
use crate::graph::shortest_path;
use crate::model::{ArcId, CommodityId, FlowSolution, Instance, Routing};

/// Sign-normalised duals of the PATTERN master.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternDuals {
    pub alpha: Vec<f64>,
    /// Linking rows `β_a^k ≥ 0`, indexed by arc then commodity.
    pub beta: Vec<Vec<f64>>,
    pub gamma: Vec<f64>,
    pub weight: f64,
}

/// One improving path per commodity: shortest path under `β_a^k`.
///
/// A path column has reduced cost `Σ_{a∈p} β_a^k − α_k` because the
/// linking rows count paths, not bandwidth.
pub fn price_pattern_paths(
    inst: &Instance,
    duals: &PatternDuals,
    adm: &Admissible,
    price_tol: f64,
) -> Vec<(CommodityId, Vec<ArcId>)> {
    let mut out = Vec::new();
    for c in &inst.commodities {
        let k = c.id;
        let alpha = duals.alpha[k.0];
        let found = shortest_path(&inst.network, c.source, c.target, |a| {
            adm.allows(k, a).then(|| duals.beta[a.0][k.0].max(0.0))
        });
        if let Some((dist, arcs)) = found {
            if dist < alpha - price_tol * (1.0 + alpha.abs()) {
                out.push((k, arcs));
            }
        }
    }
    out
}

/// One improving pattern per arc from the exact-total knapsack.
///
/// Returns the candidates and the DP table size of each arc.
pub fn price_patterns(
    inst: &Instance,
    duals: &PatternDuals,
    adm: &Admissible,
    scale: &BandwidthScale,
    price_tol: f64,
) -> (Vec<(ArcId, Vec<CommodityId>)>, Vec<usize>) {
    let mut out = Vec::new();
    let mut cells = Vec::with_capacity(inst.network.num_arcs());
    for arc in inst.network.arcs() {
        let a = arc.id;
        let items: Vec<KnapsackItem> = inst
            .commodities
            .iter()
            .filter(|c| adm.allows(c.id, a) && c.bandwidth <= arc.capacity + CAP_TOL)
            .map(|c| KnapsackItem { id: c.id.0, weight: scale.weights[c.id.0], profit: duals.beta[a.0][c.id.0] })
            .collect();
        if items.is_empty() {
            cells.push(0);
            continue;
        }
        let cost = |w: u64| match arc.cost.evaluate(scale.to_load(w)) {
            Ok(r) => duals.weight * r,
            Err(_) => f64::INFINITY,
        };
        let pick = best_subset(&items, scale.capacity(arc.capacity), cost);
        cells.push(pick.cells);
        let gamma = duals.gamma[a.0];
        if !pick.items.is_empty() && pick.value > gamma + price_tol * (1.0 + gamma.abs()) {
            out.push((a, pick.items.into_iter().map(CommodityId).collect()));
        }
    }
    (out, cells)
}

#[derive(Debug, Clone)]
struct PathCol {
    commodity: CommodityId,
    arcs: Vec<ArcId>,
    col: usize,
    fixed: Option<(f64, f64)>,
}

#[derive(Debug, Clone)]
struct PatternCol {
    arc: ArcId,
    members: Vec<CommodityId>,
    total: f64,
    cost: f64,
    col: usize,
}

/// Restricted master of the PATTERN relaxation.
#[derive(Debug, Clone)]
pub struct PatternRmp<'a> {
    inst: &'a Instance,
    scale: BandwidthScale,
    lp: Lp,
    cov_rows: Vec<usize>,
    /// Linking rows, indexed by arc then commodity.
    link_rows: Vec<Vec<usize>>,
    conv_rows: Vec<usize>,
    y_cols: Vec<usize>,
    paths: Vec<PathCol>,
    path_index: HashMap<(CommodityId, Vec<ArcId>), usize>,
    patterns: Vec<PatternCol>,
    pattern_index: HashSet<(ArcId, Vec<CommodityId>)>,
}

impl<'a> PatternRmp<'a> {
    /// Rejection columns plus the empty pattern on every arc.
    pub fn new(inst: &'a Instance) -> Result<Self, ColgenError> {
        let bws: Vec<f64> = inst.commodities.iter().map(|c| c.bandwidth).collect();
        let scale = BandwidthScale::new(&bws);
        let mut lp = Lp::new();
        let cov_rows = inst.commodities.iter().map(|_| lp.add_row(Sense::Le, -1.0)).collect();
        let link_rows = inst
            .network
            .arcs()
            .iter()
            .map(|_| inst.commodities.iter().map(|_| lp.add_row(Sense::Le, 0.0)).collect())
            .collect();
        let conv_rows = inst.network.arcs().iter().map(|_| lp.add_row(Sense::Eq, 1.0)).collect();
        let mut rmp = Self {
            inst,
            scale,
            lp,
            cov_rows,
            link_rows,
            conv_rows,
            y_cols: Vec::new(),
            paths: Vec::new(),
            path_index: HashMap::new(),
            patterns: Vec::new(),
            pattern_index: HashSet::new(),
        };
        for c in &inst.commodities {
            let col = rmp.lp.add_column(
                inst.penalty() * c.bandwidth,
                0.0,
                Some(1.0),
                &[(rmp.cov_rows[c.id.0], -1.0)],
            )?;
            rmp.y_cols.push(col);
        }
        for arc in inst.network.arcs() {
            rmp.add_pattern(arc.id, Vec::new())?;
        }
        Ok(rmp)
    }

    pub fn scale(&self) -> &BandwidthScale {
        &self.scale
    }

    pub fn lp(&self) -> &Lp {
        &self.lp
    }

    pub fn num_patterns(&self) -> usize {
        self.patterns.len()
    }

    /// Adds the pattern `members` on arc `a`; members must be sorted.
    pub fn add_pattern(&mut self, a: ArcId, members: Vec<CommodityId>) -> Result<usize, ColgenError> {
        if self.pattern_index.contains(&(a, members.clone())) {
            return Err(ColgenError::Model(crate::error::ModelError::BadParameter("duplicate pattern".into())));
        }
        let total: f64 = members.iter().map(|k| self.inst.commodity(*k).bandwidth).sum();
        let cost = self.inst.network.arc(a).cost.evaluate(total)?;
        let mut entries: Vec<(usize, f64)> = members.iter().map(|k| (self.link_rows[a.0][k.0], -1.0)).collect();
        entries.push((self.conv_rows[a.0], 1.0));
        let col = self.lp.add_column(cost, 0.0, None, &entries)?;
        self.pattern_index.insert((a, members.clone()));
        self.patterns.push(PatternCol { arc: a, members, total, cost, col });
        Ok(col)
    }

    /// Adds a path column, optionally pinned to `[lower, upper]`.
    pub fn add_path(
        &mut self,
        k: CommodityId,
        arcs: Vec<ArcId>,
        fixed: Option<(f64, f64)>,
    ) -> Result<usize, ColgenError> {
        if let Some(i) = self.path_index.get(&(k, arcs.clone())) {
            self.paths[*i].fixed = fixed;
            return Ok(self.paths[*i].col);
        }
        let mut entries = vec![(self.cov_rows[k.0], -1.0)];
        entries.extend(arcs.iter().map(|a| (self.link_rows[a.0][k.0], 1.0)));
        let (lo, hi) = match fixed {
            Some((l, u)) => (l, Some(u)),
            None => (0.0, None),
        };
        let col = self.lp.add_column(0.0, lo, hi, &entries)?;
        self.path_index.insert((k, arcs.clone()), self.paths.len());
        self.paths.push(PathCol { commodity: k, arcs, col, fixed });
        Ok(col)
    }

    pub fn duals(&self, sol: &LpSolution, farkas: bool) -> PatternDuals {
        let p = |r: usize| price_of(&self.lp, sol, r, farkas);
        PatternDuals {
            alpha: self.cov_rows.iter().map(|r| p(*r)).collect(),
            beta: self.link_rows.iter().map(|rows| rows.iter().map(|r| p(*r)).collect()).collect(),
            gamma: self.conv_rows.iter().map(|r| -p(*r)).collect(),
            weight: if farkas { 0.0 } else { 1.0 },
        }
    }
}

impl Master for PatternRmp<'_> {
    fn lp(&mut self) -> &mut Lp {
        &mut self.lp
    }

    fn instance(&self) -> &Instance {
        self.inst
    }

    fn unsplittable(&self) -> bool {
        true
    }

    fn apply(&mut self, restr: &Restrictions, adm: &Admissible) -> Result<(), ColgenError> {
        for p in &self.paths {
            let (lo, hi) = match (adm.allows_path(p.commodity, &p.arcs), p.fixed) {
                (false, _) => (0.0, Some(0.0)),
                (true, Some((l, u))) => (l, Some(u)),
                (true, None) => (0.0, None),
            };
            self.lp.set_bounds(p.col, lo, hi)?;
        }
        for s in &self.patterns {
            let ok = s.members.iter().all(|k| adm.allows(*k, s.arc));
            self.lp.set_bounds(s.col, 0.0, if ok { None } else { Some(0.0) })?;
        }
        set_y_bounds(&mut self.lp, &self.y_cols, restr)
    }

    fn price(
        &mut self,
        sol: &LpSolution,
        farkas: bool,
        adm: &Admissible,
        opts: &ColgenOptions,
        stats: &mut ColgenStats,
    ) -> Result<usize, ColgenError> {
        let duals = self.duals(sol, farkas);
        let mut added = 0;
        if opts.price_paths {
            for (k, arcs) in price_pattern_paths(self.inst, &duals, adm, opts.price_tol) {
                if self.path_index.contains_key(&(k, arcs.clone())) {
                    stats.duplicates += 1;
                    continue;
                }
                self.add_path(k, arcs, None)?;
                added += 1;
            }
        }
        let (cands, cells) = if opts.price_arc_columns {
            price_patterns(self.inst, &duals, adm, &self.scale, opts.price_tol)
        } else {
            (Vec::new(), Vec::new())
        };
        stats.dp_cells = cells;
        for (a, members) in cands {
            if self.pattern_index.contains(&(a, members.clone())) {
                stats.duplicates += 1;
                continue;
            }
            self.add_pattern(a, members)?;
            added += 1;
        }
        stats.path_columns = self.paths.len();
        stats.arc_columns = self.patterns.len();
        Ok(added)
    }

    fn extract(&self, sol: &LpSolution) -> (FlowSolution, Vec<ArcColumnValue>) {
        let mut routes: Vec<Routing> = self
            .y_cols
            .iter()
            .map(|c| Routing { paths: Vec::new(), rejected: sol.primal[*c] })
            .collect();
        for p in &self.paths {
            let v = sol.primal[p.col];
            if v > 1e-9 {
                routes[p.commodity.0].paths.push((p.arcs.clone(), v));
            }
        }
        let arc_columns = self
            .patterns
            .iter()
            .filter(|s| sol.primal[s.col] > 1e-12)
            .map(|s| ArcColumnValue {
                arc: s.arc,
                load: s.total,
                members: s.members.clone(),
                cost: s.cost,
                value: sol.primal[s.col],
            })
            .collect();
        (FlowSolution { routes }, arc_columns)
    }
}

impl Relaxation for PatternRmp<'_> {
    fn instance(&self) -> &Instance {
        self.inst
    }

    fn name(&self) -> &'static str {
        "pattern"
    }

    fn solve(&mut self, restr: &Restrictions, opts: &ColgenOptions) -> Result<RelaxationResult, ColgenError> {
        let stats = ColgenStats {
            path_columns: self.paths.len(),
            arc_columns: self.patterns.len(),
            bandwidth_scale: Some(self.scale.factor),
            bandwidth_rounded: self.scale.rounded,
            ..Default::default()
        };
        drive(self, restr, opts, stats)
    }
}
