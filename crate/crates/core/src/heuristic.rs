//! Greedy sequential routing for the unsplittable problem.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::Serialize;

use crate::colgen::CAP_TOL;
use crate::graph::shortest_path;
use crate::model::{objective_from_loads, ArcId, CommodityId, FlowSolution, Instance};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreedyResult {
    /// Path per commodity, `None` when rejected.
    pub paths: Vec<Option<Vec<ArcId>>>,
    pub objective: f64,
    pub order: Vec<CommodityId>,
    pub seed: Option<u64>,
}

impl GreedyResult {
    pub fn flow(&self) -> FlowSolution {
        FlowSolution::from_single_paths(&self.paths)
    }
}

/// Routes commodities one by one in `order`, each on the path of least
/// marginal cost `r_a(x_a + b_k) − r_a(x_a)` among arcs with room for it.
/// A commodity with no such path is rejected.
///
/// # Panics
///
/// Panics if `order` is not a permutation of the commodity ids.
pub fn greedy_once(inst: &Instance, order: &[CommodityId]) -> GreedyResult {
    let n = inst.num_commodities();
    let mut seen = vec![false; n];
    for k in order {
        assert!(k.0 < n && !seen[k.0], "order is not a permutation of the commodities");
        seen[k.0] = true;
    }
    assert_eq!(order.len(), n, "order is not a permutation of the commodities");

    let net = &inst.network;
    let mut load = vec![0.0; net.num_arcs()];
    let mut paths = vec![None; n];
    for &k in order {
        let c = inst.commodity(k);
        let b = c.bandwidth;
        let weight = |a: ArcId| {
            let arc = net.arc(a);
            let x = load[a.0];
            if x + b > arc.capacity + CAP_TOL {
                return None;
            }
            let hi = arc.cost.evaluate(x + b).ok()?;
            let lo = arc.cost.evaluate(x).ok()?;
            // Non-monotone black boxes can give negative steps.
            Some((hi - lo).max(0.0))
        };
        if let Some((_, arcs)) = shortest_path(net, c.source, c.target, weight) {
            for a in &arcs {
                load[a.0] += b;
            }
            paths[k.0] = Some(arcs);
        }
    }
    let rejected = paths.iter().map(|p| if p.is_some() { 0.0 } else { 1.0 });
    let objective = objective_from_loads(inst, &load, rejected).unwrap_or(f64::INFINITY);
    GreedyResult { paths, objective, order: order.to_vec(), seed: None }
}

/// Identity order of the commodities shuffled by a generator seeded with
/// `seed`.
pub fn shuffled_order(n: usize, seed: u64) -> Vec<CommodityId> {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut order: Vec<CommodityId> = (0..n).map(CommodityId).collect();
    order.shuffle(&mut rng);
    order
}

/// Best of `n_starts` greedy runs. All orders come from one generator
/// seeded with `seed`, so the first run matches `shuffled_order(n, seed)`
/// and more starts never do worse.
pub fn multi_start(inst: &Instance, n_starts: usize, seed: u64) -> GreedyResult {
    let n = inst.num_commodities();
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut best: Option<GreedyResult> = None;
    for _ in 0..n_starts.max(1) {
        let mut order: Vec<CommodityId> = (0..n).map(CommodityId).collect();
        order.shuffle(&mut rng);
        let res = greedy_once(inst, &order);
        if best.as_ref().map_or(true, |b| res.objective < b.objective) {
            best = Some(res);
        }
    }
    let mut best = best.expect("at least one start");
    best.seed = Some(seed);
    best
}
