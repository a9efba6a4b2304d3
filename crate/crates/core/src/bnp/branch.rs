//! Divergence node and the branching rules.

use serde::Serialize;

use crate::colgen::{Restrictions, YFix, INT_TOL};
use crate::error::BnpError;
use crate::model::{ArcId, CommodityId, Instance, Network, NodeId, Routing};

/// Rule that created a child node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Rule {
    /// Commodity must be routed (single fractional path).
    Route { commodity: CommodityId },
    /// Commodity is rejected.
    Reject { commodity: CommodityId },
    /// Common path forced, plus the most used arc out of the divergence node.
    ForceArc { commodity: CommodityId, arc: ArcId },
    /// Common path forced, most used arc out of the divergence node forbidden.
    ForbidArc { commodity: CommodityId, arc: ArcId },
    /// Common path forced up to `node`, its common arc there forbidden.
    CutCommon { commodity: CommodityId, node: NodeId, arc: ArcId },
}

/// Last node shared by all `paths` when walked from the source, and the
/// arcs leading there.
pub fn divergence(net: &Network, paths: &[&[ArcId]]) -> Result<(NodeId, Vec<ArcId>), BnpError> {
    let first = paths.first().ok_or(BnpError::TooFewPaths)?;
    if paths.iter().all(|p| p == first) {
        return Err(BnpError::TooFewPaths);
    }
    let source = first.first().map(|a| net.arc(*a).tail).ok_or(BnpError::TooFewPaths)?;
    let mut common = Vec::new();
    for (i, a) in first.iter().enumerate() {
        if paths.iter().all(|p| p.get(i) == Some(a)) {
            common.push(*a);
        } else {
            break;
        }
    }
    let v = common.last().map_or(source, |a| net.arc(*a).head);
    Ok((v, common))
}

/// Routing values strictly between 0 and 1 for a commodity, or a routed
/// share spread over several paths.
pub fn is_fractional(route: &Routing) -> bool {
    let frac = |v: f64| v > INT_TOL && v < 1.0 - INT_TOL;
    frac(route.rejected)
        || route.paths.iter().any(|(_, v)| frac(*v))
        || route.paths.iter().filter(|(_, v)| *v > INT_TOL).count() > 1
}

/// Children of a node whose relaxed routing of `k` is fractional.
///
/// With a single fractional path the split is on rejection. Otherwise the
/// children force the common path and the most used arc out of the
/// divergence node, force the common path and forbid that arc, leave the
/// common path at each of its nodes (deepest first), and reject the
/// commodity if that is still allowed. Every child except the rejection
/// requires the commodity to be routed.
pub fn branch(
    inst: &Instance,
    restr: &Restrictions,
    route: &Routing,
    k: CommodityId,
) -> Result<Vec<(Rule, Restrictions)>, BnpError> {
    if !is_fractional(route) {
        return Err(BnpError::NotFractional(k));
    }
    let y_free = restr.y[k.0] == YFix::Free;
    let frac: Vec<&[ArcId]> = route
        .paths
        .iter()
        .filter(|(_, v)| *v > INT_TOL && *v < 1.0 - INT_TOL)
        .map(|(p, _)| p.as_slice())
        .collect();
    let support: Vec<&[ArcId]> =
        route.paths.iter().filter(|(_, v)| *v > INT_TOL).map(|(p, _)| p.as_slice()).collect();
    let diverging = if frac.len() >= 2 { frac.clone() } else { support };
    if frac.len() <= 1 && y_free && (frac.len() == 1 || diverging.len() < 2) {
        return Ok(split_rejection(restr, k));
    }
    if diverging.len() < 2 {
        return Err(BnpError::NotFractional(k));
    }

    let net = &inst.network;
    let (v, common) = divergence(net, &diverging)?;
    let usage = |a: ArcId| -> f64 { route.paths.iter().filter(|(p, _)| p.contains(&a)).map(|(_, x)| *x).sum() };
    let mut top: Option<(ArcId, f64)> = None;
    for &a in net.out_arcs(v) {
        let u = usage(a);
        if u > INT_TOL && top.map_or(true, |(_, best)| u > best) {
            top = Some((a, u));
        }
    }
    let (hot, _) = top.ok_or(BnpError::NotFractional(k))?;

    let routed = |mut r: Restrictions, upto: usize| {
        r.y[k.0] = YFix::Zero;
        for a in &common[..upto] {
            let tail = net.arc(*a).tail;
            r.forbidden[k.0].extend(net.out_arcs(tail).iter().filter(|o| *o != a));
        }
        r
    };

    let mut out = Vec::new();
    let mut force = routed(restr.clone(), common.len());
    force.forbidden[k.0].extend(net.out_arcs(v).iter().filter(|o| **o != hot));
    out.push((Rule::ForceArc { commodity: k, arc: hot }, force));

    let mut forbid = routed(restr.clone(), common.len());
    forbid.forbidden[k.0].insert(hot);
    out.push((Rule::ForbidArc { commodity: k, arc: hot }, forbid));

    for i in (0..common.len()).rev() {
        let mut cut = routed(restr.clone(), i);
        cut.forbidden[k.0].insert(common[i]);
        let node = net.arc(common[i]).tail;
        out.push((Rule::CutCommon { commodity: k, node, arc: common[i] }, cut));
    }

    if y_free {
        let mut reject = restr.clone();
        reject.y[k.0] = YFix::One;
        out.push((Rule::Reject { commodity: k }, reject));
    }
    Ok(out)
}

fn split_rejection(restr: &Restrictions, k: CommodityId) -> Vec<(Rule, Restrictions)> {
    let mut route = restr.clone();
    route.y[k.0] = YFix::Zero;
    let mut reject = restr.clone();
    reject.y[k.0] = YFix::One;
    vec![(Rule::Route { commodity: k }, route), (Rule::Reject { commodity: k }, reject)]
}
