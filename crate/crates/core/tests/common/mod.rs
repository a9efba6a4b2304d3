//! Independent oracles and generators shared by the integration tests.
#![allow(dead_code)]

use cmcf_core::colgen::Restrictions;
use cmcf_core::model::{ArcId, CommodityId, CostFunction, Instance, Network, NodeId};
use cmcf_lp::{Lp, Sense, Status};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Linear,
    Quadratic,
    Kleinrock,
}

pub struct Shape {
    pub nodes: usize,
    pub arcs: usize,
    pub commodities: usize,
}

/// Random connected-ish digraph with a bidirected spanning path and
/// random extra arcs; commodities on distinct ordered pairs.
pub fn random_instance(seed: u64, shape: Shape, kinds: &[Kind], cap_range: (f64, f64), bw_range: (f64, f64), integral_bw: bool) -> Instance {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut net = Network::new();
    let nodes: Vec<NodeId> = (0..shape.nodes).map(|i| net.add_node(format!("v{i}"))).collect();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for i in 0..shape.nodes - 1 {
        pairs.push((i, i + 1));
        pairs.push((i + 1, i));
    }
    let mut guard = 0;
    while pairs.len() < shape.arcs && guard < 10_000 {
        guard += 1;
        let u = rng.gen_range(0..shape.nodes);
        let v = rng.gen_range(0..shape.nodes);
        if u != v && !pairs.contains(&(u, v)) {
            pairs.push((u, v));
        }
    }
    pairs.truncate(shape.arcs.max(2 * (shape.nodes - 1)));
    for (u, v) in pairs {
        let cap = rng.gen_range(cap_range.0..cap_range.1);
        let kind = kinds[rng.gen_range(0..kinds.len())];
        let cost = match kind {
            Kind::Linear => CostFunction::linear(rng.gen_range(0.5..5.0)).unwrap(),
            Kind::Quadratic => CostFunction::quadratic(rng.gen_range(0.1..2.0) / cap).unwrap(),
            Kind::Kleinrock => {
                let d = cap * rng.gen_range(1.05..1.5);
                CostFunction::kleinrock(rng.gen_range(1.0..10.0) * cap, d).unwrap()
            }
        };
        net.add_arc(nodes[u], nodes[v], cap, cost).unwrap();
    }
    let mut demands: Vec<(NodeId, NodeId, f64)> = Vec::new();
    let mut guard = 0;
    while demands.len() < shape.commodities && guard < 10_000 {
        guard += 1;
        let s = rng.gen_range(0..shape.nodes);
        let t = rng.gen_range(0..shape.nodes);
        if s == t || demands.iter().any(|d| d.0 .0 == s && d.1 .0 == t) {
            continue;
        }
        let mut b = rng.gen_range(bw_range.0..bw_range.1);
        if integral_bw {
            b = b.round().max(1.0);
        }
        demands.push((nodes[s], nodes[t], b));
    }
    Instance::new(net, &demands).unwrap()
}

/// All simple source→target paths of a commodity, in DFS order over arc ids.
pub fn simple_paths(inst: &Instance, k: CommodityId) -> Vec<Vec<ArcId>> {
    let c = inst.commodity(k);
    let net = &inst.network;
    let mut out = Vec::new();
    let mut stack = Vec::new();
    let mut seen = vec![false; net.num_nodes()];
    fn dfs(
        net: &Network,
        at: NodeId,
        t: NodeId,
        seen: &mut Vec<bool>,
        stack: &mut Vec<ArcId>,
        out: &mut Vec<Vec<ArcId>>,
    ) {
        if at == t {
            out.push(stack.clone());
            return;
        }
        seen[at.0] = true;
        for &a in net.out_arcs(at) {
            let h = net.arc(a).head;
            if !seen[h.0] {
                stack.push(a);
                dfs(net, h, t, seen, stack, out);
                stack.pop();
            }
        }
        seen[at.0] = false;
    }
    dfs(net, c.source, c.target, &mut seen, &mut stack, &mut out);
    out
}

/// Every single-path (or rejected) assignment respecting capacities.
pub fn feasible_assignments(inst: &Instance) -> Vec<Vec<Option<Vec<ArcId>>>> {
    let paths: Vec<Vec<Vec<ArcId>>> = inst.commodities.iter().map(|c| simple_paths(inst, c.id)).collect();
    let mut out = Vec::new();
    let mut cur: Vec<Option<Vec<ArcId>>> = Vec::new();
    let mut load = vec![0.0; inst.network.num_arcs()];
    fn rec(
        inst: &Instance,
        paths: &[Vec<Vec<ArcId>>],
        k: usize,
        cur: &mut Vec<Option<Vec<ArcId>>>,
        load: &mut Vec<f64>,
        out: &mut Vec<Vec<Option<Vec<ArcId>>>>,
    ) {
        if k == paths.len() {
            out.push(cur.clone());
            return;
        }
        let b = inst.commodities[k].bandwidth;
        cur.push(None);
        rec(inst, paths, k + 1, cur, load, out);
        cur.pop();
        for p in &paths[k] {
            if p.iter().all(|a| load[a.0] + b <= inst.network.arc(*a).capacity + 1e-9) {
                for a in p {
                    load[a.0] += b;
                }
                cur.push(Some(p.clone()));
                rec(inst, paths, k + 1, cur, load, out);
                cur.pop();
                for a in p {
                    load[a.0] -= b;
                }
            }
        }
    }
    rec(inst, &paths, 0, &mut cur, &mut load, &mut out);
    out
}

pub fn assignment_cost(inst: &Instance, asg: &[Option<Vec<ArcId>>]) -> f64 {
    let mut load = vec![0.0; inst.network.num_arcs()];
    let mut total = 0.0;
    for (k, p) in asg.iter().enumerate() {
        let b = inst.commodities[k].bandwidth;
        match p {
            Some(p) => p.iter().for_each(|a| load[a.0] += b),
            None => total += inst.penalty() * b,
        }
    }
    for (arc, x) in inst.network.arcs().iter().zip(&load) {
        total += arc.cost.evaluate(*x).unwrap();
    }
    total
}

/// Exhaustive unsplittable optimum, optionally restricted.
pub fn unsplittable_optimum(inst: &Instance, restr: Option<&Restrictions>) -> Option<(f64, Vec<Option<Vec<ArcId>>>)> {
    feasible_assignments(inst)
        .into_iter()
        .filter(|asg| restr.map_or(true, |r| permits(r, asg)))
        .map(|asg| (assignment_cost(inst, &asg), asg))
        .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
}

pub fn permits(r: &Restrictions, asg: &[Option<Vec<ArcId>>]) -> bool {
    asg.iter().enumerate().all(|(k, p)| r.permits(CommodityId(k), p.as_deref()))
}

/// Splittable optimum of the compact model with every cost replaced by
/// its chord interpolation on `segments` equal pieces of `[0, c_a]`.
pub fn pwl_compact_optimum(inst: &Instance, segments: usize) -> f64 {
    let net = &inst.network;
    let mut lp = Lp::new();
    let mut node_row = vec![vec![None; net.num_nodes()]; inst.num_commodities()];
    for (k, c) in inst.commodities.iter().enumerate() {
        for v in net.nodes() {
            if v != c.target {
                node_row[k][v.0] = Some(lp.add_row(Sense::Eq, if v == c.source { 1.0 } else { 0.0 }));
            }
        }
    }
    let load_row: Vec<usize> = net.arcs().iter().map(|_| lp.add_row(Sense::Eq, 0.0)).collect();
    let mut offset = 0.0;
    for arc in net.arcs() {
        let r0 = arc.cost.evaluate(0.0).unwrap();
        offset += r0;
        let h = arc.capacity / segments as f64;
        let mut prev = r0;
        for s in 0..segments {
            let next = arc.cost.evaluate(h * (s + 1) as f64).unwrap();
            lp.add_column((next - prev) / h, 0.0, Some(h), &[(load_row[arc.id.0], -1.0)]).unwrap();
            prev = next;
        }
    }
    for (k, c) in inst.commodities.iter().enumerate() {
        for arc in net.arcs() {
            let mut e = vec![(load_row[arc.id.0], c.bandwidth)];
            if let Some(r) = node_row[k][arc.tail.0] {
                e.push((r, 1.0));
            }
            if let Some(r) = node_row[k][arc.head.0] {
                e.push((r, -1.0));
            }
            lp.add_column(0.0, 0.0, None, &e).unwrap();
        }
        let r = node_row[k][c.source.0].unwrap();
        lp.add_column(inst.penalty() * c.bandwidth, 0.0, Some(1.0), &[(r, 1.0)]).unwrap();
    }
    let sol = lp.solve().unwrap();
    assert_eq!(sol.status, Status::Optimal);
    sol.objective + offset
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-12)
}

/// Two commodities (b = 1 and 2), each with one path through a shared
/// quadratic arc `g` and one bypass. Returns the instance, the arc `g` and
/// each commodity's two paths.
pub fn two_path_toy() -> (Instance, ArcId, Vec<[Vec<ArcId>; 2]>) {
    let mut net = Network::new();
    let s1 = net.add_node("s1");
    let t1 = net.add_node("t1");
    let s2 = net.add_node("s2");
    let t2 = net.add_node("t2");
    let u = net.add_node("u");
    let v = net.add_node("v");
    let lin = || CostFunction::linear(0.01).unwrap();
    let g = net.add_arc(u, v, 3.0, CostFunction::quadratic(1.0).unwrap()).unwrap();
    let a1 = net.add_arc(s1, u, 4.0, lin()).unwrap();
    let a2 = net.add_arc(v, t1, 4.0, lin()).unwrap();
    let a3 = net.add_arc(s1, t1, 4.0, lin()).unwrap();
    let b1 = net.add_arc(s2, u, 4.0, lin()).unwrap();
    let b2 = net.add_arc(v, t2, 4.0, lin()).unwrap();
    let b3 = net.add_arc(s2, t2, 4.0, lin()).unwrap();
    let inst = Instance::new(net, &[(s1, t1, 1.0), (s2, t2, 2.0)]).unwrap();
    (inst, g, vec![[vec![a1, g, a2], vec![a3]], [vec![b1, g, b2], vec![b3]]])
}

/// Same network and demands with every arc cost replaced; the penalty is
/// kept unless the new costs need a larger one.
pub fn with_costs(inst: &Instance, mut cost: impl FnMut(&cmcf_core::model::Arc) -> CostFunction) -> Instance {
    let mut net = Network::new();
    for v in inst.network.nodes() {
        net.add_node(inst.network.node_name(v));
    }
    for arc in inst.network.arcs() {
        net.add_arc(arc.tail, arc.head, arc.capacity, cost(arc)).unwrap();
    }
    let demands: Vec<_> = inst.commodities.iter().map(|c| (c.source, c.target, c.bandwidth)).collect();
    let penalty = inst.penalty().max(cmcf_core::model::default_penalty(&net));
    Instance::with_penalty(net, &demands, penalty).unwrap()
}

/// Chord interpolation of `r` on `segments` equal pieces of `[0, cap]`.
pub fn chord_interpolation(r: &CostFunction, cap: f64, segments: usize) -> CostFunction {
    let h = cap / segments as f64;
    let ys: Vec<f64> = (0..=segments).map(|i| r.evaluate(h * i as f64).unwrap()).collect();
    let bb = cmcf_core::model::BlackBox::new("chords", true, move |x: f64| {
        let i = ((x / h).floor() as usize).min(ys.len() - 2);
        let t = x / h - i as f64;
        ys[i] + t * (ys[i + 1] - ys[i])
    });
    CostFunction::BlackBox(bb)
}

/// Lower convex envelope of `r` sampled at `samples + 1` points of
/// `[0, cap]`, as a convex black box.
pub fn sampled_envelope(r: &CostFunction, cap: f64, samples: usize) -> CostFunction {
    let pts: Vec<(f64, f64)> = (0..=samples)
        .map(|i| {
            let x = cap * i as f64 / samples as f64;
            (x, r.evaluate(x).unwrap())
        })
        .collect();
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            if (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0) <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let bb = cmcf_core::model::BlackBox::new("envelope", true, move |x: f64| {
        let i = hull.partition_point(|p| p.0 <= x).clamp(1, hull.len() - 1);
        let (a, b) = (hull[i - 1], hull[i]);
        a.1 + (x - a.0) * (b.1 - a.1) / (b.0 - a.0)
    });
    CostFunction::BlackBox(bb)
}

/// Three commodities (b = 3, 2, 2) from `s` to `t` over three parallel
/// arcs `s→x` and two parallel arcs `x→t`. Every greedy order ends above
/// the unsplittable optimum.
pub fn greedy_trap() -> Instance {
    let mut net = Network::new();
    let s = net.add_node("s");
    let x = net.add_node("x");
    let t = net.add_node("t");
    let q = |f: f64| CostFunction::quadratic(f).unwrap();
    net.add_arc(s, x, 3.0, q(0.25)).unwrap();
    net.add_arc(s, x, 7.0, q(0.1)).unwrap();
    net.add_arc(s, x, 3.0, q(0.2)).unwrap();
    net.add_arc(x, t, 7.0, q(0.2)).unwrap();
    net.add_arc(x, t, 4.0, CostFunction::linear(0.25).unwrap()).unwrap();
    Instance::new(net, &[(s, t, 3.0), (s, t, 2.0), (s, t, 2.0)]).unwrap()
}

/// All permutations of `0..n`.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

#[derive(Debug, Default)]
pub struct PartitionReport {
    pub branchings: usize,
    pub integral_nodes: usize,
    pub violations: Vec<String>,
}

/// Breadth-first walk of the branching tree (no pruning). At every
/// branching checks that each enumerated assignment allowed at the parent
/// is allowed in exactly one child, and that no child admits the parent's
/// fractional routing.
pub fn partition_walk(inst: &Instance, kind: cmcf_core::bnp::RelaxationKind, max_branchings: usize) -> PartitionReport {
    use cmcf_core::bnp::{branch, is_fractional, RelaxationKind};
    use cmcf_core::colgen::{ColgenOptions, InnerRmp, Mode, NodeStatus, PatternRmp, Relaxation, YFix};

    let all = feasible_assignments(inst);
    let mut rmp: Box<dyn Relaxation> = match kind {
        RelaxationKind::Pattern => Box::new(PatternRmp::new(inst).unwrap()),
        RelaxationKind::Tight => Box::new(InnerRmp::new(inst, Mode::Tight, None).unwrap()),
    };
    let mut queue = std::collections::VecDeque::from([Restrictions::for_instance(inst)]);
    let mut report = PartitionReport::default();
    while let Some(restr) = queue.pop_front() {
        if report.branchings >= max_branchings {
            break;
        }
        let res = rmp.solve(&restr, &ColgenOptions::default()).unwrap();
        if res.status == NodeStatus::Infeasible {
            continue;
        }
        let frac: Vec<usize> = (0..inst.num_commodities()).filter(|k| is_fractional(&res.flow.routes[*k])).collect();
        let Some(&k) = frac.iter().max_by(|a, b| {
            inst.commodities[**a].bandwidth.total_cmp(&inst.commodities[**b].bandwidth).then(b.cmp(a))
        }) else {
            report.integral_nodes += 1;
            continue;
        };
        let route = &res.flow.routes[k];
        let children = branch(inst, &restr, route, CommodityId(k)).unwrap();
        report.branchings += 1;
        for asg in all.iter().filter(|a| permits(&restr, a)) {
            let n = children.iter().filter(|(_, r)| permits(r, asg)).count();
            if n != 1 {
                report.violations.push(format!("assignment {asg:?} allowed in {n} children"));
            }
        }
        for (rule, child) in &children {
            let admits = route.paths.iter().filter(|(_, v)| *v > 1e-6).all(|(p, _)| child.permits(CommodityId(k), Some(p)))
                && (route.rejected <= 1e-6 || child.y[k] != YFix::Zero)
                && (route.routed() <= 1e-6 || child.y[k] != YFix::One);
            if admits {
                report.violations.push(format!("child {rule:?} keeps the fractional routing"));
            }
        }
        queue.extend(children.into_iter().map(|(_, r)| r));
    }
    report
}
