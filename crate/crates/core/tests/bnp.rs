mod common;

use cmcf_core::bnp::{branch, divergence, gap, relative_gap, run, BnpOptions, BnpStatus, NodeOutcome, RelaxationKind, Rule};
use cmcf_core::colgen::{solve_inner, ColgenOptions, Restrictions, YFix};
use cmcf_core::graph::shortest_path;
use cmcf_core::model::{check_feasible, objective, ArcId, CommodityId, CostFunction, Instance, Network, Routing};
use cmcf_core::BnpError;
use common::*;

/// s→u→v→t and s→u→v→w→t, plus s→w so the commodity can leave early.
fn fig5() -> (Instance, [ArcId; 6]) {
    let mut net = Network::new();
    let s = net.add_node("s");
    let u = net.add_node("u");
    let v = net.add_node("v");
    let w = net.add_node("w");
    let t = net.add_node("t");
    let q = || CostFunction::quadratic(1.0).unwrap();
    let su = net.add_arc(s, u, 5.0, q()).unwrap();
    let uv = net.add_arc(u, v, 5.0, q()).unwrap();
    let vt = net.add_arc(v, t, 5.0, q()).unwrap();
    let vw = net.add_arc(v, w, 5.0, q()).unwrap();
    let wt = net.add_arc(w, t, 5.0, q()).unwrap();
    let sw = net.add_arc(s, w, 5.0, q()).unwrap();
    let inst = Instance::new(net, &[(s, t, 1.0)]).unwrap();
    (inst, [su, uv, vt, vw, wt, sw])
}

#[test]
fn divergence_examples() {
    let (inst, [su, uv, vt, vw, wt, sw]) = fig5();
    let net = &inst.network;
    let (v, common) = divergence(net, &[&[su, uv, vt], &[su, uv, vw, wt]]).unwrap();
    assert_eq!(net.node_name(v), "v");
    assert_eq!(common, vec![su, uv]);
    let (v, common) = divergence(net, &[&[su, uv, vt], &[sw, wt]]).unwrap();
    assert_eq!(net.node_name(v), "s");
    assert!(common.is_empty());
    assert!(matches!(divergence(net, &[&[sw, wt], &[sw, wt]]), Err(BnpError::TooFewPaths)));
}

#[test]
fn divergence_matches_brute_force_prefix() {
    // Chain a→b→c→d, then two ways to e.
    let mut net = Network::new();
    let n: Vec<_> = (0..5).map(|i| net.add_node(format!("n{i}"))).collect();
    let lin = || CostFunction::linear(1.0).unwrap();
    let chain: Vec<ArcId> = (0..3).map(|i| net.add_arc(n[i], n[i + 1], 1.0, lin()).unwrap()).collect();
    let x = net.add_arc(n[3], n[4], 1.0, lin()).unwrap();
    let y = net.add_arc(n[3], n[4], 1.0, lin()).unwrap();
    let p1: Vec<ArcId> = chain.iter().copied().chain([x]).collect();
    let p2: Vec<ArcId> = chain.iter().copied().chain([y]).collect();
    let lcp = p1.iter().zip(&p2).take_while(|(a, b)| a == b).count();
    let (v, common) = divergence(&net, &[&p1, &p2]).unwrap();
    assert_eq!(common.len(), lcp);
    assert_eq!(lcp, 3);
    assert_eq!(v, n[3]);
}

#[test]
fn fig5_branching_creates_five_children() {
    let (inst, [su, uv, vt, vw, wt, _]) = fig5();
    let route = Routing { paths: vec![(vec![su, uv, vt], 0.6), (vec![su, uv, vw, wt], 0.4)], rejected: 0.0 };
    let restr = Restrictions::for_instance(&inst);
    let kids = branch(&inst, &restr, &route, CommodityId(0)).unwrap();
    let rules: Vec<Rule> = kids.iter().map(|k| k.0).collect();
    let k = CommodityId(0);
    let net = &inst.network;
    assert_eq!(
        rules,
        vec![
            Rule::ForceArc { commodity: k, arc: vt },
            Rule::ForbidArc { commodity: k, arc: vt },
            Rule::CutCommon { commodity: k, node: net.node_by_name("u").unwrap(), arc: uv },
            Rule::CutCommon { commodity: k, node: net.node_by_name("s").unwrap(), arc: su },
            Rule::Reject { commodity: k },
        ]
    );
    for (rule, r) in &kids[..4] {
        assert_eq!(r.y[0], YFix::Zero, "{rule:?}");
    }
    assert_eq!(kids[4].1.y[0], YFix::One);
    // Rule A forbids the alternative out of v and the early exit at s.
    assert!(kids[0].1.forbidden[0].contains(&vw));
    assert!(kids[0].1.permits(k, Some(&[su, uv, vt])));
    assert!(!kids[1].1.permits(k, Some(&[su, uv, vt])));
    assert!(kids[1].1.permits(k, Some(&[su, uv, vw, wt])));
}

#[test]
fn single_fractional_path_splits_on_rejection() {
    let (inst, [su, uv, vt, ..]) = fig5();
    let route = Routing { paths: vec![(vec![su, uv, vt], 0.3)], rejected: 0.7 };
    let kids = branch(&inst, &Restrictions::for_instance(&inst), &route, CommodityId(0)).unwrap();
    assert_eq!(kids.len(), 2);
    assert_eq!(kids[0].1.y[0], YFix::Zero);
    assert_eq!(kids[1].1.y[0], YFix::One);
}

#[test]
fn empty_common_path_with_routed_commodity_gives_two_children() {
    let (inst, [su, uv, vt, _, wt, sw]) = fig5();
    let route = Routing { paths: vec![(vec![su, uv, vt], 0.5), (vec![sw, wt], 0.5)], rejected: 0.0 };
    let mut restr = Restrictions::for_instance(&inst);
    restr.y[0] = YFix::Zero;
    let kids = branch(&inst, &restr, &route, CommodityId(0)).unwrap();
    assert_eq!(kids.len(), 2);
    assert!(matches!(kids[0].0, Rule::ForceArc { .. }));
    assert!(matches!(kids[1].0, Rule::ForbidArc { .. }));
}

#[test]
fn integral_routing_cannot_be_branched() {
    let (inst, [su, uv, vt, ..]) = fig5();
    let route = Routing { paths: vec![(vec![su, uv, vt], 1.0)], rejected: 0.0 };
    let res = branch(&inst, &Restrictions::for_instance(&inst), &route, CommodityId(0));
    assert!(matches!(res, Err(BnpError::NotFractional(_))));
}

#[test]
fn relative_gap_examples() {
    assert!((relative_gap(10.0, 12.0, 11.0).unwrap() - 0.5).abs() < 1e-12);
    assert_eq!(relative_gap(10.0, 12.0, 10.0).unwrap(), 0.0);
    assert_eq!(relative_gap(10.0, 12.0, 12.0).unwrap(), 1.0);
    assert!(matches!(relative_gap(10.0, 10.0, 10.0), Err(BnpError::UndefinedGap { .. })));
    assert_eq!(gap(10.0, 10.0), 0.0);
}

/// Tight capacities so that TIGHT-INNER roots are fractional.
fn small(seed: u64) -> Instance {
    random_instance(seed, Shape { nodes: 4, arcs: 10, commodities: 5 }, &[Kind::Quadratic, Kind::Kleinrock, Kind::Linear], (2.0, 4.5), (1.5, 3.5), true)
}

#[test]
fn branchings_partition_the_assignments() {
    let mut branchings = 0;
    for kind in [RelaxationKind::Tight, RelaxationKind::Pattern] {
        for seed in 0..12 {
            let report = partition_walk(&small(seed), kind, 25);
            assert!(report.violations.is_empty(), "{kind:?} seed {seed}: {:?}", report.violations);
            branchings += report.branchings;
        }
    }
    assert!(branchings >= 20, "{branchings}");
}

#[test]
fn bnp_matches_enumeration() {
    for kind in [RelaxationKind::Pattern, RelaxationKind::Tight] {
        for seed in 0..6 {
            let inst = small(seed);
            let (opt, _) = unsplittable_optimum(&inst, None).unwrap();
            let res = run(&inst, kind, &BnpOptions { gap_target: 1e-9, ..Default::default() }).unwrap();
            assert_eq!(res.status, BnpStatus::Solved);
            assert!(rel_diff(res.incumbent_value, opt) <= 1e-6, "{kind:?} seed {seed}: {} vs {opt}", res.incumbent_value);
            let flow = res.flow();
            assert!(check_feasible(&inst, &flow, 1e-9).is_feasible());
            assert!(rel_diff(objective(&inst, &flow).unwrap(), res.incumbent_value) <= 1e-12);
        }
    }
}

#[test]
fn tree_invariants_hold() {
    let mut branched = 0;
    for seed in 0..6 {
        let inst = small(seed);
        let res = run(&inst, RelaxationKind::Pattern, &BnpOptions { gap_target: 1e-9, ..Default::default() }).unwrap();
        for w in res.history.windows(2) {
            assert!(w[1].0 <= w[0].0);
            assert!(w[1].1 >= w[0].1);
        }
        for rec in &res.trace {
            let Some(parent) = rec.parent else { continue };
            if rec.outcome == NodeOutcome::Pruned {
                continue;
            }
            let pb = res.trace.iter().find(|r| r.node == parent).unwrap().bound;
            assert!(rec.bound >= pb - 1e-6 * pb.abs().max(1.0), "seed {seed}: node {} {} < {}", rec.node, rec.bound, pb);
        }
        for node in &res.integral_nodes {
            assert!(node.arc_columns_binary, "seed {seed}: node {}", node.node);
        }
        let tight = run(&inst, RelaxationKind::Tight, &BnpOptions { gap_target: 1e-9, ..Default::default() }).unwrap();
        for w in tight.history.windows(2) {
            assert!(w[1].0 <= w[0].0);
            assert!(w[1].1 >= w[0].1);
        }
        for rec in &tight.trace {
            let Some(parent) = rec.parent else { continue };
            if matches!(rec.outcome, NodeOutcome::Pruned | NodeOutcome::Infeasible) {
                continue;
            }
            let pb = tight.trace.iter().find(|r| r.node == parent).unwrap().bound;
            assert!(rec.bound >= pb - 1e-6 * pb.abs().max(1.0), "seed {seed}: node {} {} < {}", rec.node, rec.bound, pb);
        }
        branched += (tight.nodes > 1) as usize;
        assert!(res.greedy_value >= res.incumbent_value);
        let s = solve_inner(&inst, &ColgenOptions::default()).unwrap().bound;
        if let Ok(g) = relative_gap(s, res.incumbent_value, res.greedy_value) {
            assert!(g >= 1.0 - 1e-9);
        }
    }
    assert!(branched >= 3, "{branched}");
}

#[test]
fn full_gap_target_stops_at_the_root() {
    let inst = small(3);
    let res = run(&inst, RelaxationKind::Pattern, &BnpOptions { gap_target: 1.0, ..Default::default() }).unwrap();
    assert_eq!(res.nodes, 1);
    assert_eq!(res.incumbent_value.min(res.greedy_value), res.incumbent_value);
}

#[test]
fn integral_root_needs_one_node() {
    let mut net = Network::new();
    let s = net.add_node("s");
    let t = net.add_node("t");
    net.add_arc(s, t, 10.0, CostFunction::quadratic(1.0).unwrap()).unwrap();
    let inst = Instance::new(net, &[(s, t, 2.0)]).unwrap();
    let res = run(&inst, RelaxationKind::Pattern, &BnpOptions::default()).unwrap();
    assert_eq!(res.nodes, 1);
    assert!(res.root_integral);
    assert_eq!(res.gap(), 0.0);
    assert!((res.incumbent_value - 4.0).abs() < 1e-9);
}

#[test]
fn single_commodity_is_a_shortest_path() {
    for seed in 0..8 {
        let base = random_instance(seed, Shape { nodes: 6, arcs: 14, commodities: 1 }, &[Kind::Quadratic, Kind::Kleinrock], (1.0, 6.0), (2.0, 4.0), false);
        let c = base.commodities[0].clone();
        let net = &base.network;
        let sp = shortest_path(net, c.source, c.target, |a| {
            let arc = net.arc(a);
            (arc.capacity >= c.bandwidth).then(|| arc.cost.evaluate(c.bandwidth).unwrap() - arc.cost.evaluate(0.0).unwrap())
        });
        let offset = base.offset_sum().unwrap();
        let oracle = sp.map_or(offset + base.penalty() * c.bandwidth, |(d, _)| offset + d.min(base.penalty() * c.bandwidth));
        let res = run(&base, RelaxationKind::Pattern, &BnpOptions::default()).unwrap();
        assert_eq!(res.nodes, 1, "seed {seed}");
        assert!(rel_diff(res.incumbent_value, oracle) <= 1e-9, "seed {seed}: {} vs {oracle}", res.incumbent_value);
    }
}

#[test]
fn node_limit_reports_partial_result() {
    let inst = small(1);
    let res = run(&inst, RelaxationKind::Tight, &BnpOptions { gap_target: 1e-12, node_limit: Some(1), ..Default::default() }).unwrap();
    assert!(res.nodes <= 1);
    assert!(res.bound <= res.incumbent_value + 1e-9);
    if res.status == BnpStatus::NodeLimit {
        assert!(res.gap() > 0.0);
    }
}

