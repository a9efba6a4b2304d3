//! Random dense LPs checked against an exact vertex-enumeration oracle.

use cmcf_lp::{BigRational, LinearProgram, Sense, Status};
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;

type Q = Ratio<i128>;

#[derive(Debug, Clone)]
struct Dense {
    cost: Vec<i64>,
    upper: Vec<i64>,
    rows: Vec<(Vec<i64>, bool, i64)>,
}

fn dense_lp() -> impl Strategy<Value = Dense> {
    (1usize..=5, 1usize..=5).prop_flat_map(|(n, m)| {
        let row = (prop::collection::vec(-9i64..=9, n), prop::bool::weighted(0.25), -9i64..=9);
        (
            prop::collection::vec(-9i64..=9, n),
            prop::collection::vec(1i64..=9, n),
            prop::collection::vec(row, m),
        )
            .prop_map(|(cost, upper, rows)| Dense { cost, upper, rows })
    })
}

/// Solves `a x = b` by Gauss-Jordan; `None` when singular.
fn solve_square(mut a: Vec<Vec<Q>>, mut b: Vec<Q>) -> Option<Vec<Q>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).find(|r| !a[*r][c].is_zero())?;
        a.swap(c, p);
        b.swap(c, p);
        let piv = a[c][c];
        for k in 0..n {
            a[c][k] /= piv;
        }
        b[c] /= piv;
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c];
                for k in 0..n {
                    let v = a[c][k];
                    a[r][k] -= f * v;
                }
                let v = b[c];
                b[r] -= f * v;
            }
        }
    }
    Some(b)
}

/// Minimum over all basic feasible points; the box bounds keep the region
/// bounded, so `None` means infeasible.
fn vertex_oracle(lp: &Dense) -> Option<Q> {
    let n = lp.cost.len();
    // Hyperplanes: rows, then x_j = 0, then x_j = u_j.
    let mut planes: Vec<(Vec<Q>, Q)> = Vec::new();
    for (coef, _, rhs) in &lp.rows {
        planes.push((coef.iter().map(|&c| Q::from(c as i128)).collect(), Q::from(*rhs as i128)));
    }
    for j in 0..n {
        let mut e = vec![Q::zero(); n];
        e[j] = Q::from(1);
        planes.push((e.clone(), Q::zero()));
        planes.push((e, Q::from(lp.upper[j] as i128)));
    }
    let eq_rows: Vec<usize> = (0..lp.rows.len()).filter(|i| lp.rows[*i].1).collect();
    let feasible = |x: &[Q]| {
        for j in 0..n {
            if x[j] < Q::zero() || x[j] > Q::from(lp.upper[j] as i128) {
                return false;
            }
        }
        lp.rows.iter().all(|(coef, eq, rhs)| {
            let act: Q = coef.iter().zip(x).map(|(c, v)| Q::from(*c as i128) * v).sum();
            if *eq {
                act == Q::from(*rhs as i128)
            } else {
                act <= Q::from(*rhs as i128)
            }
        })
    };
    let mut best: Option<Q> = None;
    let total = planes.len();
    let mut chosen: Vec<usize> = Vec::new();
    fn rec(
        start: usize,
        total: usize,
        n: usize,
        chosen: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if chosen.len() == n {
            visit(chosen);
            return;
        }
        for i in start..total {
            if total - i < n - chosen.len() {
                break;
            }
            chosen.push(i);
            rec(i + 1, total, n, chosen, visit);
            chosen.pop();
        }
    }
    let mut visit = |set: &[usize]| {
        if !eq_rows.iter().all(|r| set.contains(r)) {
            return;
        }
        let a: Vec<Vec<Q>> = set.iter().map(|i| planes[*i].0.clone()).collect();
        let b: Vec<Q> = set.iter().map(|i| planes[*i].1).collect();
        if let Some(x) = solve_square(a, b) {
            if feasible(&x) {
                let obj: Q = lp.cost.iter().zip(&x).map(|(c, v)| Q::from(*c as i128) * v).sum();
                if best.map_or(true, |b| obj < b) {
                    best = Some(obj);
                }
            }
        }
    };
    rec(0, total, n, &mut chosen, &mut visit);
    best
}

fn build_f64(lp: &Dense) -> LinearProgram<f64> {
    let mut prog = LinearProgram::new();
    let rows: Vec<usize> = lp
        .rows
        .iter()
        .map(|(_, eq, rhs)| prog.add_row(if *eq { Sense::Eq } else { Sense::Le }, *rhs as f64))
        .collect();
    for j in 0..lp.cost.len() {
        let entries: Vec<(usize, f64)> =
            lp.rows.iter().enumerate().map(|(i, r)| (rows[i], r.0[j] as f64)).collect();
        prog.add_column(lp.cost[j] as f64, 0.0, Some(lp.upper[j] as f64), &entries).unwrap();
    }
    prog
}

fn build_exact(lp: &Dense) -> LinearProgram<BigRational> {
    let q = |v: i64| BigRational::from_integer(v.into());
    let mut prog = LinearProgram::new();
    for (_, eq, rhs) in &lp.rows {
        prog.add_row(if *eq { Sense::Eq } else { Sense::Le }, q(*rhs));
    }
    for j in 0..lp.cost.len() {
        let entries: Vec<(usize, BigRational)> =
            lp.rows.iter().enumerate().map(|(i, r)| (i, q(r.0[j]))).collect();
        prog.add_column(q(lp.cost[j]), q(0), Some(q(lp.upper[j])), &entries).unwrap();
    }
    prog
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn float_simplex_matches_vertex_enumeration(lp in dense_lp()) {
        let oracle = vertex_oracle(&lp);
        let sol = build_f64(&lp).solve().unwrap();
        match oracle {
            None => prop_assert_eq!(sol.status, Status::Infeasible),
            Some(best) => {
                prop_assert_eq!(sol.status, Status::Optimal);
                let expect = best.to_f64().unwrap();
                prop_assert!((sol.objective - expect).abs() <= 1e-7, "{} vs {}", sol.objective, expect);
            }
        }
    }

    #[test]
    fn exact_simplex_matches_vertex_enumeration(lp in dense_lp()) {
        let oracle = vertex_oracle(&lp);
        let sol = build_exact(&lp).solve().unwrap();
        match oracle {
            None => prop_assert_eq!(sol.status, Status::Infeasible),
            Some(best) => {
                prop_assert_eq!(sol.status, Status::Optimal);
                let expect = BigRational::new((*best.numer()).into(), (*best.denom()).into());
                prop_assert_eq!(sol.objective, expect);
            }
        }
    }

    #[test]
    fn optimal_solves_certify_themselves(lp in dense_lp()) {
        let mut prog = build_f64(&lp);
        let sol = prog.solve().unwrap();
        prop_assume!(sol.status == Status::Optimal);
        let act = sol.activity(&prog);
        let mut dual_obj = 0.0;
        for (i, row) in prog.rows().iter().enumerate() {
            let slack = row.rhs - act[i];
            match row.sense {
                Sense::Le => {
                    prop_assert!(slack >= -1e-7);
                    prop_assert!(sol.row_price(&prog, i) >= -1e-7);
                    prop_assert!((sol.duals[i] * slack).abs() <= 1e-6);
                }
                Sense::Eq => prop_assert!(slack.abs() <= 1e-7),
            }
            dual_obj += sol.duals[i] * row.rhs;
        }
        for j in 0..prog.num_cols() {
            let d = sol.reduced_cost(&prog, j);
            let c = prog.column(j);
            let x = sol.primal[j];
            let ub = c.upper.unwrap();
            if x <= c.lower + 1e-9 {
                prop_assert!(d >= -1e-7);
            } else if x >= ub - 1e-9 {
                prop_assert!(d <= 1e-7);
            } else {
                prop_assert!(d.abs() <= 1e-7);
            }
            dual_obj += d * x;
        }
        prop_assert!((sol.objective - dual_obj).abs() <= 1e-6);
    }
}

fn full_size_lp() -> impl Strategy<Value = Dense> {
    (6usize..=12, 4usize..=10).prop_flat_map(|(n, m)| {
        let row = (prop::collection::vec(-9i64..=9, n), prop::bool::weighted(0.2), -9i64..=20);
        (
            prop::collection::vec(-9i64..=9, n),
            prop::collection::vec(1i64..=9, n),
            prop::collection::vec(row, m),
        )
            .prop_map(|(cost, upper, rows)| Dense { cost, upper, rows })
    })
}

/// Exact optimality certificate: primal feasibility, sign-correct duals,
/// complementary reduced costs and zero duality gap, all in rationals.
fn exact_certificate(prog: &LinearProgram<BigRational>, sol: &cmcf_lp::LpSolution<BigRational>) -> bool {
    let zero = BigRational::zero();
    let act = sol.activity(prog);
    let mut dual_obj = zero.clone();
    for (i, row) in prog.rows().iter().enumerate() {
        let slack = row.rhs.clone() - act[i].clone();
        let ok = match row.sense {
            Sense::Le => slack >= zero && sol.duals[i] <= zero && (sol.duals[i].clone() * slack).is_zero(),
            Sense::Eq => slack.is_zero(),
        };
        if !ok {
            return false;
        }
        dual_obj = dual_obj + sol.duals[i].clone() * row.rhs.clone();
    }
    for j in 0..prog.num_cols() {
        let c = prog.column(j);
        let x = &sol.primal[j];
        let d = sol.reduced_cost(prog, j);
        let ub = c.upper.clone().unwrap();
        if *x < c.lower || *x > ub {
            return false;
        }
        let ok = if *x == c.lower {
            d >= zero
        } else if *x == ub {
            d <= zero
        } else {
            d.is_zero()
        };
        if !ok {
            return false;
        }
        dual_obj = dual_obj + d * x.clone();
    }
    dual_obj == sol.objective
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn float_simplex_matches_exact_certificate_at_full_size(lp in full_size_lp()) {
        let mut exact = build_exact(&lp);
        let reference = exact.solve().unwrap();
        let sol = build_f64(&lp).solve().unwrap();
        prop_assert_eq!(sol.status, reference.status);
        if reference.status == Status::Optimal {
            prop_assert!(exact_certificate(&exact, &reference));
            let expect = reference.objective.to_f64().unwrap();
            prop_assert!((sol.objective - expect).abs() <= 1e-7 * expect.abs().max(1.0), "{} vs {}", sol.objective, expect);
        }
    }
}
