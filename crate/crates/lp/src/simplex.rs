//! Bounded-variable revised primal simplex on a dense basis inverse.
//!
//! Every `≤` row owns a slack in `[0, ∞)`. Equality rows have no slack.
//! A cold start puts one artificial per row that the all-at-lower-bound
//! point leaves infeasible and minimises their sum (phase one); afterwards
//! artificials are fixed to zero and may stay basic at zero.

use crate::error::LpError;
use crate::program::{Column, Row, Sense};
use crate::scalar::Scalar;
use crate::solution::{LpSolution, Status};

const REFACTOR_EVERY: usize = 100;
const DEGENERATE_BEFORE_BLAND: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Var {
    Col(usize),
    Slack(usize),
    Art(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Basic(usize),
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    One,
    Two,
}

#[derive(Debug, Clone)]
pub(crate) struct Workspace<T: Scalar> {
    m: usize,
    basis: Vec<Var>,
    /// Row-major `m × m` basis inverse; row `p` belongs to basis position `p`.
    binv: Vec<T>,
    col_state: Vec<State>,
    col_x: Vec<T>,
    slack_of_row: Vec<bool>,
    slack_state: Vec<State>,
    slack_x: Vec<T>,
    art_sign: Vec<T>,
    art_state: Vec<State>,
    art_x: Vec<T>,
    since_refactor: usize,
    degenerate_run: usize,
    bland: bool,
    pivots: usize,
}

enum Outcome {
    Optimal,
    Unbounded,
}

struct Problem<'a, T: Scalar> {
    rows: &'a [Row<T>],
    cols: &'a [Column<T>],
}

pub(crate) fn solve<T: Scalar>(
    rows: &[Row<T>],
    cols: &[Column<T>],
    cache: &mut Option<Workspace<T>>,
) -> Result<LpSolution<T>, LpError> {
    let prob = Problem { rows, cols };
    if let Some(ws) = cache.as_mut() {
        if ws.m == rows.len() && ws.col_state.len() == cols.len() && ws.warm_start(&prob) {
            match ws.run_phase(&prob, Phase::Two) {
                Ok(outcome) => {
                    let sol = ws.extract(&prob, outcome);
                    return Ok(sol);
                }
                Err(LpError::Numerical(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }
    let mut ws = Workspace::cold(&prob);
    let result = ws.solve_cold(&prob);
    match result {
        Ok(sol) => {
            *cache = Some(ws);
            Ok(sol)
        }
        Err(e) => {
            *cache = None;
            Err(e)
        }
    }
}

impl<T: Scalar> Workspace<T> {
    fn cold(prob: &Problem<'_, T>) -> Self {
        let m = prob.rows.len();
        let n = prob.cols.len();
        let col_x: Vec<T> = prob.cols.iter().map(|c| c.lower.clone()).collect();
        let mut resid: Vec<T> = prob.rows.iter().map(|r| r.rhs.clone()).collect();
        for (j, c) in prob.cols.iter().enumerate() {
            if col_x[j].is_zero() {
                continue;
            }
            for (i, a) in &c.entries {
                resid[*i] = resid[*i].clone() - a.clone() * col_x[j].clone();
            }
        }
        let mut ws = Workspace {
            m,
            basis: Vec::with_capacity(m),
            binv: vec![T::zero(); m * m],
            col_state: vec![State::Lower; n],
            col_x,
            slack_of_row: prob.rows.iter().map(|r| r.sense == Sense::Le).collect(),
            slack_state: vec![State::Lower; m],
            slack_x: vec![T::zero(); m],
            art_sign: vec![T::one(); m],
            art_state: vec![State::Lower; m],
            art_x: vec![T::zero(); m],
            since_refactor: 0,
            degenerate_run: 0,
            bland: false,
            pivots: 0,
        };
        for (i, r) in resid.into_iter().enumerate() {
            if ws.slack_of_row[i] && r >= T::zero() {
                ws.basis.push(Var::Slack(i));
                ws.slack_state[i] = State::Basic(i);
                ws.slack_x[i] = r;
                ws.binv[i * m + i] = T::one();
            } else {
                let sign = if r < T::zero() { -T::one() } else { T::one() };
                ws.art_x[i] = r.abs();
                ws.art_sign[i] = sign.clone();
                ws.art_state[i] = State::Basic(i);
                ws.basis.push(Var::Art(i));
                ws.binv[i * m + i] = sign;
            }
        }
        ws
    }

    fn solve_cold(&mut self, prob: &Problem<'_, T>) -> Result<LpSolution<T>, LpError> {
        let needs_phase_one = self.basis.iter().any(|v| matches!(v, Var::Art(_)));
        if needs_phase_one {
            self.run_phase(prob, Phase::One)?;
            let infeas = self.art_x.iter().fold(T::zero(), |acc, v| acc + v.clone());
            let bscale = prob
                .rows
                .iter()
                .fold(T::one(), |acc, r| if r.rhs.abs() > acc { r.rhs.abs() } else { acc });
            if infeas > T::feas_tol() * T::from_f64(10.0).unwrap() * bscale {
                let farkas = self.duals(prob, Phase::One);
                return Ok(LpSolution {
                    status: Status::Infeasible,
                    primal: self.col_x.clone(),
                    duals: vec![T::zero(); self.m],
                    objective: T::zero(),
                    farkas: Some(farkas),
                    pivots: self.pivots,
                });
            }
            for v in self.art_x.iter_mut() {
                *v = T::zero();
            }
        }
        let outcome = self.run_phase(prob, Phase::Two)?;
        Ok(self.extract(prob, outcome))
    }

    fn extract(&self, prob: &Problem<'_, T>, outcome: Outcome) -> LpSolution<T> {
        let status = match outcome {
            Outcome::Optimal => Status::Optimal,
            Outcome::Unbounded => Status::Unbounded,
        };
        let objective = prob
            .cols
            .iter()
            .zip(&self.col_x)
            .fold(T::zero(), |acc, (c, x)| acc + c.cost.clone() * x.clone());
        LpSolution {
            status,
            primal: self.col_x.clone(),
            duals: self.duals(prob, Phase::Two),
            objective,
            farkas: None,
            pivots: self.pivots,
        }
    }

    pub(crate) fn push_column(&mut self, cols: &[Column<T>]) {
        let c = cols.last().expect("column just pushed");
        self.col_state.push(State::Lower);
        self.col_x.push(c.lower.clone());
    }

    /// Moves nonbasic columns onto their current bounds and checks whether
    /// the cached basis is still primal feasible.
    fn warm_start(&mut self, prob: &Problem<'_, T>) -> bool {
        for (j, c) in prob.cols.iter().enumerate() {
            match self.col_state[j] {
                State::Basic(_) => {}
                State::Lower => self.col_x[j] = c.lower.clone(),
                State::Upper => match &c.upper {
                    Some(u) => self.col_x[j] = u.clone(),
                    None => {
                        self.col_state[j] = State::Lower;
                        self.col_x[j] = c.lower.clone();
                    }
                },
            }
        }
        if self.refactor(prob).is_err() {
            return false;
        }
        let tol = T::feas_tol();
        for p in 0..self.m {
            let var = self.basis[p];
            let (lo, up) = self.bounds(prob, var, Phase::Two);
            let x = self.value(var);
            if x < lo.clone() - tol.clone() {
                return false;
            }
            if let Some(u) = up {
                if x > u + tol.clone() {
                    return false;
                }
            }
        }
        self.degenerate_run = 0;
        self.bland = false;
        true
    }

    fn bounds(&self, prob: &Problem<'_, T>, var: Var, phase: Phase) -> (T, Option<T>) {
        match var {
            Var::Col(j) => (prob.cols[j].lower.clone(), prob.cols[j].upper.clone()),
            Var::Slack(_) => (T::zero(), None),
            Var::Art(_) => match phase {
                Phase::One => (T::zero(), None),
                Phase::Two => (T::zero(), Some(T::zero())),
            },
        }
    }

    fn cost(&self, prob: &Problem<'_, T>, var: Var, phase: Phase) -> T {
        match (phase, var) {
            (Phase::One, Var::Art(_)) => T::one(),
            (Phase::Two, Var::Col(j)) => prob.cols[j].cost.clone(),
            _ => T::zero(),
        }
    }

    fn value(&self, var: Var) -> T {
        match var {
            Var::Col(j) => self.col_x[j].clone(),
            Var::Slack(i) => self.slack_x[i].clone(),
            Var::Art(i) => self.art_x[i].clone(),
        }
    }

    fn value_mut(&mut self, var: Var) -> &mut T {
        match var {
            Var::Col(j) => &mut self.col_x[j],
            Var::Slack(i) => &mut self.slack_x[i],
            Var::Art(i) => &mut self.art_x[i],
        }
    }

    fn state(&self, var: Var) -> State {
        match var {
            Var::Col(j) => self.col_state[j],
            Var::Slack(i) => self.slack_state[i],
            Var::Art(i) => self.art_state[i],
        }
    }

    fn set_state(&mut self, var: Var, s: State) {
        match var {
            Var::Col(j) => self.col_state[j] = s,
            Var::Slack(i) => self.slack_state[i] = s,
            Var::Art(i) => self.art_state[i] = s,
        }
    }

    fn order_key(&self, var: Var) -> usize {
        let n = self.col_state.len();
        match var {
            Var::Col(j) => j,
            Var::Slack(i) => n + i,
            Var::Art(i) => n + self.m + i,
        }
    }

    fn for_each_entry(&self, prob: &Problem<'_, T>, var: Var, mut f: impl FnMut(usize, &T)) {
        match var {
            Var::Col(j) => {
                for (i, a) in &prob.cols[j].entries {
                    f(*i, a);
                }
            }
            Var::Slack(i) => f(i, &T::one()),
            Var::Art(i) => f(i, &self.art_sign[i]),
        }
    }

    fn duals(&self, prob: &Problem<'_, T>, phase: Phase) -> Vec<T> {
        let m = self.m;
        let mut y = vec![T::zero(); m];
        for p in 0..m {
            let c = self.cost(prob, self.basis[p], phase);
            if c.is_zero() {
                continue;
            }
            let row = &self.binv[p * m..(p + 1) * m];
            for (yi, b) in y.iter_mut().zip(row) {
                if !b.is_zero() {
                    *yi = yi.clone() + c.clone() * b.clone();
                }
            }
        }
        y
    }

    /// Reduced cost and the magnitude of the terms it was summed from,
    /// which bounds its rounding error.
    fn reduced_cost_with_scale(&self, prob: &Problem<'_, T>, var: Var, y: &[T], phase: Phase) -> (T, T) {
        let mut d = self.cost(prob, var, phase);
        let mut scale = d.abs();
        self.for_each_entry(prob, var, |i, a| {
            if !y[i].is_zero() {
                let term = y[i].clone() * a.clone();
                scale = scale.clone() + term.abs();
                d = d.clone() - term;
            }
        });
        (d, scale)
    }

    fn ftran(&self, prob: &Problem<'_, T>, var: Var) -> Vec<T> {
        let m = self.m;
        let mut alpha = vec![T::zero(); m];
        self.for_each_entry(prob, var, |i, a| {
            for (p, al) in alpha.iter_mut().enumerate() {
                let b = &self.binv[p * m + i];
                if !b.is_zero() {
                    *al = al.clone() + b.clone() * a.clone();
                }
            }
        });
        alpha
    }

    fn run_phase(&mut self, prob: &Problem<'_, T>, phase: Phase) -> Result<Outcome, LpError> {
        let n = prob.cols.len();
        let limit = 10_000 + 50 * (self.m + n);
        let mut iters = 0usize;
        self.degenerate_run = 0;
        self.bland = false;
        loop {
            iters += 1;
            if iters > limit {
                return Err(LpError::IterationLimit(limit));
            }
            if self.since_refactor >= REFACTOR_EVERY {
                self.refactor(prob)?;
            }
            let y = self.duals(prob, phase);
            let Some((entering, increase)) = self.choose_entering(prob, &y, phase) else {
                if self.since_refactor > 0 {
                    // Confirm optimality on a fresh factorisation.
                    self.refactor(prob)?;
                    let y = self.duals(prob, phase);
                    if self.choose_entering(prob, &y, phase).is_some() {
                        continue;
                    }
                }
                return Ok(Outcome::Optimal);
            };
            let alpha = self.ftran(prob, entering);
            match self.ratio_test(prob, entering, increase, &alpha, phase) {
                None => return Ok(Outcome::Unbounded),
                Some((step, leave)) => self.apply(prob, entering, increase, &alpha, step, leave, phase),
            }
        }
    }

    fn choose_entering(&self, prob: &Problem<'_, T>, y: &[T], phase: Phase) -> Option<(Var, bool)> {
        let tol = T::opt_tol();
        let mut best: Option<(Var, bool, T)> = None;
        let mut consider = |var: Var, ws: &Self| -> bool {
            let state = ws.state(var);
            if matches!(state, State::Basic(_)) {
                return false;
            }
            let (lo, up) = ws.bounds(prob, var, phase);
            if let Some(u) = &up {
                if *u == lo {
                    return false;
                }
            }
            let (d, scale) = ws.reduced_cost_with_scale(prob, var, y, phase);
            // Absolute tolerance, widened once the summed terms are large
            // enough for cancellation error to exceed it.
            let tol = tol.clone() * (T::one() + scale * T::from_f64(1e-3).unwrap());
            let (eligible, increase) = match state {
                State::Lower => (d < -tol.clone(), true),
                State::Upper => (d > tol, false),
                State::Basic(_) => unreachable!(),
            };
            if !eligible {
                return false;
            }
            let score = d.abs();
            match &best {
                Some((_, _, s)) if *s >= score => {}
                _ => best = Some((var, increase, score)),
            }
            ws.bland
        };
        for j in 0..prob.cols.len() {
            if consider(Var::Col(j), self) {
                return best.map(|(v, inc, _)| (v, inc));
            }
        }
        for i in 0..self.m {
            if self.slack_of_row[i] && consider(Var::Slack(i), self) {
                return best.map(|(v, inc, _)| (v, inc));
            }
        }
        if phase == Phase::One {
            for i in 0..self.m {
                if consider(Var::Art(i), self) {
                    return best.map(|(v, inc, _)| (v, inc));
                }
            }
        }
        best.map(|(v, inc, _)| (v, inc))
    }

    /// Two-pass (Harris) ratio test. Returns the step length and the
    /// leaving basis position, or `None` position for a bound flip.
    #[allow(clippy::type_complexity)]
    fn ratio_test(
        &self,
        prob: &Problem<'_, T>,
        entering: Var,
        increase: bool,
        alpha: &[T],
        phase: Phase,
    ) -> Option<(T, Option<(usize, bool)>)> {
        let piv_tol = T::pivot_tol();
        let feas_tol = T::feas_tol();
        let (lo_e, up_e) = self.bounds(prob, entering, phase);
        let own = up_e.map(|u| u - lo_e);

        // Per basic position: direction of change and the distance to the
        // bound it moves towards (None when that bound is infinite).
        let mut cands: Vec<(usize, T, T, bool)> = Vec::new();
        for (p, a) in alpha.iter().enumerate() {
            if a.abs() <= piv_tol {
                continue;
            }
            let delta = if increase { -a.clone() } else { a.clone() };
            let var = self.basis[p];
            let (lo, up) = self.bounds(prob, var, phase);
            let x = self.value(var);
            if delta < T::zero() {
                let room = x - lo;
                cands.push((p, room, -delta, false));
            } else if let Some(u) = up {
                let room = u - x;
                cands.push((p, room, delta, true));
            }
        }

        let zero = T::zero();
        let clamp = |v: T| if v < zero { zero.clone() } else { v };
        if self.bland {
            let mut best: Option<(T, usize, bool, usize)> = None;
            for (p, room, rate, to_upper) in &cands {
                let t = clamp(room.clone() / rate.clone());
                let key = self.order_key(self.basis[*p]);
                let better = match &best {
                    None => true,
                    Some((bt, _, _, bk)) => t < *bt || (t == *bt && key < *bk),
                };
                if better {
                    best = Some((t, *p, *to_upper, key));
                }
            }
            return match (best, own) {
                (None, None) => None,
                (None, Some(o)) => Some((o, None)),
                (Some((t, p, up, _)), Some(o)) if o <= t => {
                    let _ = (p, up);
                    Some((o, None))
                }
                (Some((t, p, up, _)), _) => Some((t, Some((p, up)))),
            };
        }

        let mut relaxed: Option<T> = None;
        for (_, room, rate, _) in &cands {
            let t = clamp(room.clone() + feas_tol.clone()) / rate.clone();
            if relaxed.as_ref().map_or(true, |r| t < *r) {
                relaxed = Some(t);
            }
        }
        let Some(limit) = relaxed else {
            return own.map(|o| (o, None));
        };
        let mut chosen: Option<(T, usize, bool, T)> = None;
        for (p, room, rate, to_upper) in &cands {
            let t = clamp(room.clone() / rate.clone());
            if t > limit {
                continue;
            }
            let mag = alpha[*p].abs();
            let better = match &chosen {
                None => true,
                Some((_, _, _, bm)) => mag > *bm,
            };
            if better {
                chosen = Some((t, *p, *to_upper, mag));
            }
        }
        let (t, p, to_upper, _) = chosen.expect("limit comes from a candidate");
        if let Some(o) = own {
            if o <= t {
                return Some((o, None));
            }
        }
        Some((t, Some((p, to_upper))))
    }

    #[allow(clippy::too_many_arguments)]
    fn apply(
        &mut self,
        prob: &Problem<'_, T>,
        entering: Var,
        increase: bool,
        alpha: &[T],
        step: T,
        leave: Option<(usize, bool)>,
        phase: Phase,
    ) {
        self.pivots += 1;
        if step <= T::feas_tol() {
            self.degenerate_run += 1;
            if self.degenerate_run > DEGENERATE_BEFORE_BLAND {
                self.bland = true;
            }
        } else {
            self.degenerate_run = 0;
            self.bland = false;
        }
        if !step.is_zero() {
            let signed = if increase { step.clone() } else { -step.clone() };
            for p in 0..self.m {
                if alpha[p].is_zero() {
                    continue;
                }
                let var = self.basis[p];
                let v = self.value_mut(var);
                *v = v.clone() - alpha[p].clone() * signed.clone();
            }
            let v = self.value_mut(entering);
            *v = v.clone() + signed;
        }
        match leave {
            None => {
                let (lo, up) = self.bounds(prob, entering, phase);
                if increase {
                    *self.value_mut(entering) = up.expect("flip needs a finite bound");
                    self.set_state(entering, State::Upper);
                } else {
                    *self.value_mut(entering) = lo;
                    self.set_state(entering, State::Lower);
                }
            }
            Some((r, to_upper)) => {
                let leaving = self.basis[r];
                let (lo, up) = self.bounds(prob, leaving, phase);
                if to_upper {
                    *self.value_mut(leaving) = up.expect("bounded above");
                    self.set_state(leaving, State::Upper);
                } else {
                    *self.value_mut(leaving) = lo;
                    self.set_state(leaving, State::Lower);
                }
                self.basis[r] = entering;
                self.set_state(entering, State::Basic(r));
                self.update_inverse(r, alpha);
                self.since_refactor += 1;
            }
        }
    }

    fn update_inverse(&mut self, r: usize, alpha: &[T]) {
        let m = self.m;
        let piv = alpha[r].clone();
        let pivot_row: Vec<T> = self.binv[r * m..(r + 1) * m]
            .iter()
            .map(|v| v.clone() / piv.clone())
            .collect();
        for p in 0..m {
            if p == r || alpha[p].is_zero() {
                continue;
            }
            let f = alpha[p].clone();
            let row = &mut self.binv[p * m..(p + 1) * m];
            for (b, pr) in row.iter_mut().zip(&pivot_row) {
                if !pr.is_zero() {
                    *b = b.clone() - f.clone() * pr.clone();
                }
            }
        }
        self.binv[r * m..(r + 1) * m].clone_from_slice(&pivot_row);
    }

    /// Rebuilds the inverse from the basis columns and recomputes basic
    /// values from the nonbasic ones.
    fn refactor(&mut self, prob: &Problem<'_, T>) -> Result<(), LpError> {
        let m = self.m;
        let mut covered: Vec<Option<usize>> = vec![None; m];
        let mut structural: Vec<usize> = Vec::new();
        for (p, var) in self.basis.iter().enumerate() {
            match *var {
                Var::Col(_) => structural.push(p),
                Var::Slack(i) | Var::Art(i) => {
                    if covered[i].is_some() {
                        return Err(LpError::Numerical("singular basis".into()));
                    }
                    covered[i] = Some(p);
                }
            }
        }
        let free_rows: Vec<usize> = (0..m).filter(|i| covered[*i].is_none()).collect();
        let k = structural.len();
        if free_rows.len() != k {
            return Err(LpError::Numerical("singular basis".into()));
        }
        let mut row_index = vec![usize::MAX; m];
        for (r, i) in free_rows.iter().enumerate() {
            row_index[*i] = r;
        }
        // Dense k × k block of structural columns on uncovered rows, augmented
        // with the identity for Gauss-Jordan inversion.
        let w = 2 * k;
        let mut block = vec![T::zero(); k * w];
        for (s, p) in structural.iter().enumerate() {
            let Var::Col(j) = self.basis[*p] else { unreachable!() };
            for (i, a) in &prob.cols[j].entries {
                let r = row_index[*i];
                if r != usize::MAX {
                    block[r * w + s] = a.clone();
                }
            }
        }
        for r in 0..k {
            block[r * w + k + r] = T::one();
        }
        for c in 0..k {
            let mut piv_row = None;
            let mut piv_mag = T::zero();
            for r in c..k {
                let mag = block[r * w + c].abs();
                if mag > piv_mag {
                    piv_mag = mag;
                    piv_row = Some(r);
                }
            }
            let Some(pr) = piv_row else {
                return Err(LpError::Numerical("singular basis".into()));
            };
            if piv_mag <= T::pivot_tol() {
                return Err(LpError::Numerical("singular basis".into()));
            }
            if pr != c {
                for col in 0..w {
                    block.swap(pr * w + col, c * w + col);
                }
            }
            let piv = block[c * w + c].clone();
            for col in 0..w {
                block[c * w + col] = block[c * w + col].clone() / piv.clone();
            }
            for r in 0..k {
                if r == c {
                    continue;
                }
                let f = block[r * w + c].clone();
                if f.is_zero() {
                    continue;
                }
                for col in 0..w {
                    let v = block[c * w + col].clone();
                    if !v.is_zero() {
                        block[r * w + col] = block[r * w + col].clone() - f.clone() * v;
                    }
                }
            }
        }
        // After elimination, row s of the right half is row s of B11⁻¹, where
        // s indexes structural basis positions in `structural` order.
        let mut binv = vec![T::zero(); m * m];
        for (s, p) in structural.iter().enumerate() {
            for (r, i) in free_rows.iter().enumerate() {
                binv[p * m + i] = block[s * w + k + r].clone();
            }
        }
        for i in 0..m {
            let Some(p) = covered[i] else { continue };
            let sign = match self.basis[p] {
                Var::Slack(_) => T::one(),
                Var::Art(_) => self.art_sign[i].clone(),
                Var::Col(_) => unreachable!(),
            };
            let mut row = vec![T::zero(); m];
            row[i] = T::one();
            for q in &structural {
                let Var::Col(j) = self.basis[*q] else { unreachable!() };
                if let Ok(pos) = prob.cols[j].entries.binary_search_by_key(&i, |e| e.0) {
                    let a = prob.cols[j].entries[pos].1.clone();
                    for col in 0..m {
                        let v = &binv[q * m + col];
                        if !v.is_zero() {
                            row[col] = row[col].clone() - a.clone() * v.clone();
                        }
                    }
                }
            }
            for (col, v) in row.into_iter().enumerate() {
                binv[p * m + col] = v * sign.clone();
            }
        }
        self.binv = binv;
        self.since_refactor = 0;
        self.recompute_basic(prob);
        Ok(())
    }

    fn recompute_basic(&mut self, prob: &Problem<'_, T>) {
        let m = self.m;
        let mut rhs: Vec<T> = prob.rows.iter().map(|r| r.rhs.clone()).collect();
        let mut subtract = |var: Var, x: &T, ws: &Self| {
            if x.is_zero() {
                return;
            }
            ws.for_each_entry(prob, var, |i, a| {
                rhs[i] = rhs[i].clone() - a.clone() * x.clone();
            });
        };
        for j in 0..prob.cols.len() {
            if !matches!(self.col_state[j], State::Basic(_)) {
                subtract(Var::Col(j), &self.col_x[j], self);
            }
        }
        for i in 0..m {
            if self.slack_of_row[i] && !matches!(self.slack_state[i], State::Basic(_)) {
                subtract(Var::Slack(i), &self.slack_x[i], self);
            }
            if !matches!(self.art_state[i], State::Basic(_)) {
                subtract(Var::Art(i), &self.art_x[i], self);
            }
        }
        for p in 0..m {
            let row = &self.binv[p * m..(p + 1) * m];
            let mut v = T::zero();
            for (b, r) in row.iter().zip(&rhs) {
                if !b.is_zero() && !r.is_zero() {
                    v = v + b.clone() * r.clone();
                }
            }
            let var = self.basis[p];
            *self.value_mut(var) = v;
        }
    }
}
