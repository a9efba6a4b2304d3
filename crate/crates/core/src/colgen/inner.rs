use std::collections::HashMap;

use cmcf_lp::{Lp, LpSolution, Sense};
use serde::Serialize;

use super::pricing::best_vertex;
use super::{
    drive, price_of, Admissible, ArcColumnValue, ColgenOptions, ColgenStats, Master, Relaxation,
    RelaxationResult, Restrictions, YFix,
};
use crate::error::{ColgenError, ModelError};
use crate::graph::shortest_path;
use crate::model::{ArcId, CommodityId, FlowSolution, Instance, Routing};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Splittable inner approximation, one load row per arc.
    Inner,
    /// One load row per arc and bandwidth threshold, with the
    /// unsplittable admissibility rules.
    Tight,
}

/// Sign-normalised duals of the INNER / TIGHT-INNER master.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerDuals {
    /// Coverage rows, `α_k ≥ 0`.
    pub alpha: Vec<f64>,
    /// Load rows `β_a^j ≥ 0`, indexed by arc then threshold.
    pub beta: Vec<Vec<f64>>,
    /// Convexity rows, free.
    pub gamma: Vec<f64>,
    /// Weight of column costs: 1 for optimal duals, 0 for Farkas pricing.
    pub weight: f64,
}

fn at_or_above(c: f64, f: f64) -> bool {
    f <= c + 1e-12 * c.abs().max(1.0)
}

/// One improving path per commodity, if any: shortest path under
/// `w_a = Σ_{j: f_j ≤ b_k} β_a^j` over admissible arcs.
pub fn price_paths(
    inst: &Instance,
    duals: &InnerDuals,
    thresholds: &[f64],
    adm: &Admissible,
    price_tol: f64,
) -> Vec<(CommodityId, Vec<ArcId>)> {
    let mut out = Vec::new();
    for c in &inst.commodities {
        let alpha = duals.alpha[c.id.0];
        let eps = price_tol * (1.0 + alpha.abs());
        let found = shortest_path(&inst.network, c.source, c.target, |a| {
            if !adm.allows(c.id, a) {
                return None;
            }
            let w: f64 = thresholds
                .iter()
                .zip(&duals.beta[a.0])
                .filter(|(f, _)| at_or_above(c.bandwidth, **f))
                .map(|(_, b)| *b)
                .sum();
            Some(w.max(0.0))
        });
        if let Some((dist, arcs)) = found {
            if dist < alpha / c.bandwidth - eps {
                out.push((c.id, arcs));
            }
        }
    }
    out
}

/// One improving breakpoint per arc, if any: maximise
/// `B(c)·c − r_a(c)` on each threshold interval and keep the best.
///
/// Returns the candidates and the number of grid searches used.
pub fn price_vertices(
    inst: &Instance,
    duals: &InnerDuals,
    thresholds: &[f64],
    price_tol: f64,
) -> (Vec<(ArcId, f64)>, usize) {
    let mut out = Vec::new();
    let mut grids = 0;
    for arc in inst.network.arcs() {
        let a = arc.id.0;
        let cap = arc.capacity;
        let beta = &duals.beta[a];
        let b_at = |c: f64| -> f64 {
            thresholds.iter().zip(beta).filter(|(f, _)| at_or_above(c, **f)).map(|(_, b)| *b).sum()
        };
        let g = |c: f64| match arc.cost.evaluate(c) {
            Ok(r) => b_at(c) * c - duals.weight * r,
            Err(_) => f64::NEG_INFINITY,
        };
        let mut best: Option<(f64, f64)> = None;
        let mut prefix = 0.0;
        for (j, f) in thresholds.iter().enumerate() {
            if *f > cap {
                break;
            }
            prefix += beta[j];
            let hi = thresholds.get(j + 1).map_or(cap, |n| n.min(cap));
            let (c, grid) = best_vertex(&arc.cost, prefix, duals.weight, *f, hi, cap);
            grids += grid as usize;
            let v = g(c);
            if best.map_or(true, |(_, bv)| v > bv) {
                best = Some((c, v));
            }
        }
        if let Some((c, v)) = best {
            let gamma = duals.gamma[a];
            if v > gamma + price_tol * (1.0 + gamma.abs()) {
                out.push((arc.id, c));
            }
        }
    }
    (out, grids)
}

#[derive(Debug, Clone)]
struct PathCol {
    commodity: CommodityId,
    arcs: Vec<ArcId>,
    col: usize,
    fixed: Option<(f64, f64)>,
}

#[derive(Debug, Clone)]
struct VertexCol {
    arc: ArcId,
    c: f64,
    cost: f64,
    col: usize,
}

/// Restricted master of INNER (thresholds `{0}`) or TIGHT-INNER.
#[derive(Debug, Clone)]
pub struct InnerRmp<'a> {
    inst: &'a Instance,
    mode: Mode,
    thresholds: Vec<f64>,
    lp: Lp,
    cov_rows: Vec<usize>,
    load_rows: Vec<Vec<usize>>,
    conv_rows: Vec<usize>,
    y_cols: Vec<usize>,
    paths: Vec<PathCol>,
    path_index: HashMap<(CommodityId, Vec<ArcId>), usize>,
    vertices: Vec<VertexCol>,
}

impl<'a> InnerRmp<'a> {
    /// Builds the initial master: rejection columns and the breakpoints
    /// `{0, c_a}`. TIGHT-INNER defaults to thresholds `{0} ∪ {b_k}`.
    pub fn new(inst: &'a Instance, mode: Mode, thresholds: Option<Vec<f64>>) -> Result<Self, ColgenError> {
        let thresholds = match (mode, thresholds) {
            (Mode::Inner, _) => vec![0.0],
            (Mode::Tight, Some(t)) => t,
            (Mode::Tight, None) => {
                let mut t: Vec<f64> = inst.commodities.iter().map(|c| c.bandwidth).collect();
                t.push(0.0);
                t.sort_by(|a, b| a.partial_cmp(b).unwrap());
                t.dedup();
                t
            }
        };
        if thresholds.first() != Some(&0.0) || thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ModelError::BadParameter(
                "thresholds must start at 0 and increase strictly".into(),
            )
            .into());
        }
        let mut lp = Lp::new();
        let cov_rows = inst.commodities.iter().map(|_| lp.add_row(Sense::Le, -1.0)).collect();
        let load_rows = inst
            .network
            .arcs()
            .iter()
            .map(|_| thresholds.iter().map(|_| lp.add_row(Sense::Le, 0.0)).collect())
            .collect();
        let conv_rows = inst.network.arcs().iter().map(|_| lp.add_row(Sense::Eq, 1.0)).collect();
        let mut rmp = Self {
            inst,
            mode,
            thresholds,
            lp,
            cov_rows,
            load_rows,
            conv_rows,
            y_cols: Vec::new(),
            paths: Vec::new(),
            path_index: HashMap::new(),
            vertices: Vec::new(),
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
            rmp.add_vertex(arc.id, 0.0)?;
            if arc.capacity > 0.0 {
                rmp.add_vertex(arc.id, arc.capacity)?;
            }
        }
        Ok(rmp)
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn lp(&self) -> &Lp {
        &self.lp
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_paths(&self) -> usize {
        self.paths.len()
    }

    /// Adds the breakpoint `c` on arc `a`.
    pub fn add_vertex(&mut self, a: ArcId, c: f64) -> Result<usize, ColgenError> {
        let cost = self.inst.network.arc(a).cost.evaluate(c)?;
        let mut entries: Vec<(usize, f64)> = self
            .thresholds
            .iter()
            .enumerate()
            .filter(|(_, f)| at_or_above(c, **f))
            .map(|(j, _)| (self.load_rows[a.0][j], -c))
            .collect();
        entries.push((self.conv_rows[a.0], 1.0));
        let col = self.lp.add_column(cost, 0.0, None, &entries)?;
        self.vertices.push(VertexCol { arc: a, c, cost, col });
        Ok(col)
    }

    /// Adds a path column, optionally pinned to `[lower, upper]`. Returns
    /// the existing column if the path is already present.
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
        let b = self.inst.commodity(k).bandwidth;
        let mut entries = vec![(self.cov_rows[k.0], -1.0)];
        for a in &arcs {
            for (j, f) in self.thresholds.iter().enumerate() {
                if at_or_above(b, *f) {
                    entries.push((self.load_rows[a.0][j], b));
                }
            }
        }
        let (lo, hi) = match fixed {
            Some((l, u)) => (l, Some(u)),
            None => (0.0, None),
        };
        let col = self.lp.add_column(0.0, lo, hi, &entries)?;
        self.path_index.insert((k, arcs.clone()), self.paths.len());
        self.paths.push(PathCol { commodity: k, arcs, col, fixed });
        Ok(col)
    }

    pub fn duals(&self, sol: &LpSolution, farkas: bool) -> InnerDuals {
        let p = |r: usize| price_of(&self.lp, sol, r, farkas);
        InnerDuals {
            alpha: self.cov_rows.iter().map(|r| p(*r)).collect(),
            beta: self.load_rows.iter().map(|rows| rows.iter().map(|r| p(*r)).collect()).collect(),
            gamma: self.conv_rows.iter().map(|r| -p(*r)).collect(),
            weight: if farkas { 0.0 } else { 1.0 },
        }
    }
}

impl Master for InnerRmp<'_> {
    fn lp(&mut self) -> &mut Lp {
        &mut self.lp
    }

    fn instance(&self) -> &Instance {
        self.inst
    }

    fn unsplittable(&self) -> bool {
        self.mode == Mode::Tight
    }

    fn apply(&mut self, restr: &Restrictions, adm: &Admissible) -> Result<(), ColgenError> {
        for p in &self.paths {
            let (lo, hi) = if adm.allows_path(p.commodity, &p.arcs) {
                match p.fixed {
                    Some((l, u)) => (l, Some(u)),
                    None => (0.0, None),
                }
            } else {
                (0.0, Some(0.0))
            };
            self.lp.set_bounds(p.col, lo, hi)?;
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
            for (k, arcs) in price_paths(self.inst, &duals, &self.thresholds, adm, opts.price_tol) {
                if self.path_index.contains_key(&(k, arcs.clone())) {
                    stats.duplicates += 1;
                    continue;
                }
                self.add_path(k, arcs, None)?;
                added += 1;
            }
        }
        let (cands, grids) = if opts.price_arc_columns {
            price_vertices(self.inst, &duals, &self.thresholds, opts.price_tol)
        } else {
            (Vec::new(), 0)
        };
        stats.grid_searches += grids;
        for (a, c) in cands {
            let cap = self.inst.network.arc(a).capacity;
            let dup = self
                .vertices
                .iter()
                .any(|v| v.arc == a && (v.c - c).abs() <= 1e-9 * cap.max(1e-12));
            if dup {
                stats.duplicates += 1;
                continue;
            }
            self.add_vertex(a, c)?;
            added += 1;
        }
        stats.path_columns = self.paths.len();
        stats.arc_columns = self.vertices.len();
        Ok(added)
    }

    /// Adds a vertex at the exact load of every arc whose load is spread
    /// over several vertices.
    fn polish(&mut self, sol: &LpSolution, opts: &ColgenOptions) -> Result<usize, ColgenError> {
        if !opts.price_arc_columns {
            return Ok(0);
        }
        let m = self.inst.network.num_arcs();
        let mut load = vec![0.0; m];
        let mut support = vec![0usize; m];
        for v in &self.vertices {
            let z = sol.primal[v.col];
            load[v.arc.0] += z * v.c;
            support[v.arc.0] += (z > 1e-6) as usize;
        }
        let mut added = 0;
        for a in 0..m {
            if support[a] < 2 {
                continue;
            }
            let cap = self.inst.network.arc(ArcId(a)).capacity;
            let c = load[a].clamp(0.0, cap);
            let dup = self
                .vertices
                .iter()
                .any(|v| v.arc.0 == a && (v.c - c).abs() <= 1e-9 * cap.max(1e-12));
            if !dup {
                self.add_vertex(ArcId(a), c)?;
                added += 1;
            }
        }
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
            .vertices
            .iter()
            .filter(|v| sol.primal[v.col] > 1e-12)
            .map(|v| ArcColumnValue {
                arc: v.arc,
                load: v.c,
                members: Vec::new(),
                cost: v.cost,
                value: sol.primal[v.col],
            })
            .collect();
        (FlowSolution { routes }, arc_columns)
    }
}

pub(crate) fn set_y_bounds(lp: &mut Lp, y_cols: &[usize], restr: &Restrictions) -> Result<(), ColgenError> {
    for (k, col) in y_cols.iter().enumerate() {
        let (lo, hi) = match restr.y[k] {
            YFix::Free => (0.0, 1.0),
            YFix::Zero => (0.0, 0.0),
            YFix::One => (1.0, 1.0),
        };
        lp.set_bounds(*col, lo, Some(hi))?;
    }
    Ok(())
}

impl Relaxation for InnerRmp<'_> {
    fn instance(&self) -> &Instance {
        self.inst
    }

    fn name(&self) -> &'static str {
        match self.mode {
            Mode::Inner => "inner",
            Mode::Tight => "tight-inner",
        }
    }

    fn solve(&mut self, restr: &Restrictions, opts: &ColgenOptions) -> Result<RelaxationResult, ColgenError> {
        let stats = ColgenStats {
            path_columns: self.paths.len(),
            arc_columns: self.vertices.len(),
            ..Default::default()
        };
        drive(self, restr, opts, stats)
    }
}
