use crate::program::{LinearProgram, Sense};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Result of a solve.
///
/// `duals` follow the `cost_j − Σ_i dual_i·a_ij` convention, which makes
/// duals of `≤` rows nonpositive at a minimum. [`LpSolution::row_price`]
/// flips `≤` rows so that they read as nonnegative prices.
#[derive(Debug, Clone)]
pub struct LpSolution<T: Scalar = f64> {
    pub status: Status,
    pub primal: Vec<T>,
    pub duals: Vec<T>,
    pub objective: T,
    /// Phase-one duals when the program is infeasible. Pricing columns
    /// against them with zero cost finds columns that reduce infeasibility.
    pub farkas: Option<Vec<T>>,
    pub pivots: usize,
}

impl<T: Scalar> LpSolution<T> {
    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }

    /// Sign-normalised dual: `−dual` for `≤` rows, `dual` for `=` rows.
    pub fn row_price(&self, lp: &LinearProgram<T>, row: usize) -> T {
        normalize(lp.rows()[row].sense, &self.duals[row])
    }

    /// Sign-normalised Farkas multipliers, if the solve was infeasible.
    pub fn farkas_price(&self, lp: &LinearProgram<T>, row: usize) -> Option<T> {
        self.farkas
            .as_ref()
            .map(|f| normalize(lp.rows()[row].sense, &f[row]))
    }

    pub fn reduced_cost(&self, lp: &LinearProgram<T>, col: usize) -> T {
        let c = lp.column(col);
        let mut d = c.cost.clone();
        for (i, a) in &c.entries {
            d = d - self.duals[*i].clone() * a.clone();
        }
        d
    }

    /// Row activity `a_i·x`.
    pub fn activity(&self, lp: &LinearProgram<T>) -> Vec<T> {
        let mut act = vec![T::zero(); lp.num_rows()];
        for (j, c) in lp.columns().iter().enumerate() {
            if self.primal[j].is_zero() {
                continue;
            }
            for (i, a) in &c.entries {
                act[*i] = act[*i].clone() + a.clone() * self.primal[j].clone();
            }
        }
        act
    }
}

fn normalize<T: Scalar>(sense: Sense, v: &T) -> T {
    match sense {
        Sense::Le => -v.clone(),
        Sense::Eq => v.clone(),
    }
}
