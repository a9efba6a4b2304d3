/// Integer image of the bandwidths for the pattern knapsack.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BandwidthScale {
    /// Power of ten applied to bandwidths and capacities.
    pub factor: u64,
    /// Set when no power up to 10⁶ made every bandwidth integral.
    pub rounded: bool,
    pub weights: Vec<u64>,
}

const MAX_POWER: u32 = 6;

impl BandwidthScale {
    pub fn new(bandwidths: &[f64]) -> Self {
        for p in 0..=MAX_POWER {
            let factor = 10u64.pow(p);
            let f = factor as f64;
            let integral = bandwidths.iter().all(|b| {
                let s = b * f;
                (s - s.round()).abs() <= 1e-9 * s.abs().max(1.0)
            });
            if integral {
                return Self { factor, rounded: false, weights: scale_all(bandwidths, f) };
            }
        }
        let factor = 10u64.pow(MAX_POWER);
        Self { factor, rounded: true, weights: scale_all(bandwidths, factor as f64) }
    }

    /// Largest integer total fitting in `capacity`.
    pub fn capacity(&self, capacity: f64) -> u64 {
        let s = capacity * self.factor as f64;
        (s + 1e-9 * s.abs().max(1.0)).floor().max(0.0) as u64
    }

    pub fn to_load(&self, w: u64) -> f64 {
        w as f64 / self.factor as f64
    }
}

fn scale_all(bandwidths: &[f64], f: f64) -> Vec<u64> {
    bandwidths.iter().map(|b| (b * f).round().max(0.0) as u64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnapsackItem {
    pub id: usize,
    pub weight: u64,
    pub profit: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnapsackPick {
    /// Ids of the chosen items, ascending.
    pub items: Vec<usize>,
    pub total: u64,
    /// `profit − cost(total)`
    pub value: f64,
    /// Size of the DP table.
    pub cells: usize,
}

/// Maximises `Σ_{i∈s} profit_i − cost(Σ_{i∈s} weight_i)` over subsets with
/// total at most `cap`.
///
/// `best[w]` holds the largest profit of a subset weighing exactly `w`;
/// ties in the final scan go to the smaller total.
pub fn best_subset(items: &[KnapsackItem], cap: u64, cost: impl Fn(u64) -> f64) -> KnapsackPick {
    let total_weight: u64 = items.iter().map(|i| i.weight).sum();
    let w_max = cap.min(total_weight) as usize;
    let width = w_max + 1;
    let mut best = vec![f64::NEG_INFINITY; width];
    best[0] = 0.0;
    let mut keep = vec![false; items.len() * width];
    for (i, it) in items.iter().enumerate() {
        let wi = it.weight as usize;
        if wi > w_max {
            continue;
        }
        for w in (wi..width).rev() {
            let from = best[w - wi];
            if from > f64::NEG_INFINITY && from + it.profit > best[w] {
                best[w] = from + it.profit;
                keep[i * width + w] = true;
            }
        }
    }
    let mut pick = (0usize, f64::NEG_INFINITY);
    for (w, p) in best.iter().enumerate() {
        if *p == f64::NEG_INFINITY {
            continue;
        }
        let v = p - cost(w as u64);
        if v > pick.1 {
            pick = (w, v);
        }
    }
    let mut chosen = Vec::new();
    let mut w = pick.0;
    for (i, it) in items.iter().enumerate().rev() {
        if w > 0 && keep[i * width + w] {
            chosen.push(it.id);
            w -= it.weight as usize;
        }
    }
    chosen.sort_unstable();
    KnapsackPick { items: chosen, total: pick.0 as u64, value: pick.1, cells: items.len() * width }
}
