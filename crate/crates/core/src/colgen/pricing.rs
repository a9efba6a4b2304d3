use crate::model::CostFunction;

/// Grid size of the global pass for non-convex costs.
pub const GRID_POINTS: usize = 256;
const GOLDEN_ITERS: usize = 200;

/// Maximiser of a unimodal `g` on `[lo, hi]` by golden-section search,
/// checked against both endpoints. Ties go to the larger point.
pub fn golden_section_max(g: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64, max_iter: usize) -> f64 {
    if hi <= lo {
        return lo;
    }
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut g1, mut g2) = (g(x1), g(x2));
    for _ in 0..max_iter {
        if b - a <= tol {
            break;
        }
        if g1 < g2 {
            a = x1;
            x1 = x2;
            g1 = g2;
            x2 = a + inv_phi * (b - a);
            g2 = g(x2);
        } else {
            b = x2;
            x2 = x1;
            g2 = g1;
            x1 = b - inv_phi * (b - a);
            g1 = g(x1);
        }
    }
    let mid = 0.5 * (a + b);
    let mut best = (hi, g(hi));
    for c in [mid, lo] {
        let v = g(c);
        if v > best.1 {
            best = (c, v);
        }
    }
    best.0
}

/// Argmax over `c ∈ [lo, hi]` of `beta·c − weight·r(c)`, with closed forms
/// for the analytic kinds. `cap` scales the search tolerance.
///
/// Returns the point and whether the non-convex grid was used.
pub fn best_vertex(cost: &CostFunction, beta: f64, weight: f64, lo: f64, hi: f64, cap: f64) -> (f64, bool) {
    if hi <= lo {
        return (lo, false);
    }
    if weight <= 0.0 {
        // Farkas pricing: only the load term counts.
        return (if beta > 0.0 { hi } else { lo }, false);
    }
    let b = beta / weight;
    let c = match cost {
        CostFunction::Linear { f } => {
            if b > *f {
                hi
            } else {
                lo
            }
        }
        CostFunction::Quadratic { f } => (b / (2.0 * f)).clamp(lo, hi),
        CostFunction::Kleinrock { f, d } => {
            if b <= 0.0 {
                lo
            } else {
                (d - (f / b).sqrt()).clamp(lo, hi)
            }
        }
        CostFunction::BlackBox(bb) => {
            let g = |c: f64| match cost.evaluate(c) {
                Ok(r) => b * c - r,
                Err(_) => f64::NEG_INFINITY,
            };
            let tol = 1e-9 * cap.max(1e-12);
            if bb.is_convex() {
                golden_section_max(g, lo, hi, tol, GOLDEN_ITERS)
            } else {
                let step = (hi - lo) / (GRID_POINTS - 1) as f64;
                let mut best = (0usize, f64::NEG_INFINITY);
                for i in 0..GRID_POINTS {
                    let v = g(lo + step * i as f64);
                    if v >= best.1 {
                        best = (i, v);
                    }
                }
                let i = best.0;
                let a = lo + step * i.saturating_sub(1) as f64;
                let z = (lo + step * (i + 1) as f64).min(hi);
                let c = golden_section_max(&g, a, z, tol, GOLDEN_ITERS);
                let grid_point = lo + step * i as f64;
                return (if g(c) >= best.1 { c } else { grid_point }, true);
            }
        }
    };
    (c, false)
}
