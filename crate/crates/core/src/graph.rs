//! Shortest paths with a deterministic tie-break.

use std::cmp::Ordering;

use crate::model::{ArcId, Network, NodeId};

#[derive(Debug, Clone)]
struct Label {
    dist: f64,
    arcs: Vec<ArcId>,
}

impl Label {
    /// Orders by distance, then hop count, then arc ids lexicographically.
    fn cmp_key(&self, other: &Label) -> Ordering {
        self.dist
            .partial_cmp(&other.dist)
            .unwrap_or(Ordering::Equal)
            .then(self.arcs.len().cmp(&other.arcs.len()))
            .then_with(|| self.arcs.cmp(&other.arcs))
    }
}

/// Dijkstra from `source` to `target` over arcs with a nonnegative weight;
/// `weight` returns `None` for arcs that may not be used.
///
/// Among paths of equal weight the one with fewer arcs wins, then the one
/// with the lexicographically smaller arc sequence.
pub fn shortest_path(
    net: &Network,
    source: NodeId,
    target: NodeId,
    mut weight: impl FnMut(ArcId) -> Option<f64>,
) -> Option<(f64, Vec<ArcId>)> {
    let n = net.num_nodes();
    let mut best: Vec<Option<Label>> = vec![None; n];
    let mut done = vec![false; n];
    best[source.0] = Some(Label { dist: 0.0, arcs: Vec::new() });
    loop {
        let mut pick: Option<usize> = None;
        for v in 0..n {
            if done[v] {
                continue;
            }
            if let Some(l) = &best[v] {
                let better = match pick {
                    None => true,
                    Some(u) => l.cmp_key(best[u].as_ref().unwrap()) == Ordering::Less,
                };
                if better {
                    pick = Some(v);
                }
            }
        }
        let u = pick?;
        done[u] = true;
        let label = best[u].clone().unwrap();
        if u == target.0 {
            return Some((label.dist, label.arcs));
        }
        for &a in net.out_arcs(NodeId(u)) {
            let head = net.arc(a).head.0;
            if done[head] {
                continue;
            }
            let Some(w) = weight(a) else { continue };
            let mut arcs = label.arcs.clone();
            arcs.push(a);
            let cand = Label { dist: label.dist + w, arcs };
            let replace = match &best[head] {
                None => true,
                Some(cur) => cand.cmp_key(cur) == Ordering::Less,
            };
            if replace {
                best[head] = Some(cand);
            }
        }
    }
}

/// Whether `target` is reachable from `source` through allowed arcs.
pub fn reachable(net: &Network, source: NodeId, target: NodeId, allowed: impl Fn(ArcId) -> bool) -> bool {
    shortest_path(net, source, target, |a| allowed(a).then_some(0.0)).is_some()
}
