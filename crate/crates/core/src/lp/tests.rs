use proptest::prelude::*;
use num_traits::Signed;

use super::*;
use crate::rational::{int, Rational};

fn r(n: i64) -> Rational {
    int(n)
}

#[test]
fn bound_tight_minimum() {
    let mut p = LpProblem::new();
    let x = p.add_var(r(3), None);
    p.set_cost(x, r(1));
    let sol = solve(&p);
    assert_eq!(sol.status, LpStatus::Optimal);
    assert_eq!(sol.value, Some(r(3)));
    assert_eq!(sol.x, Some(vec![r(3)]));
}

#[test]
fn segment_minimum() {
    let mut p = LpProblem::new();
    let x = p.add_nonneg();
    let y = p.add_nonneg();
    p.set_cost(x, r(-1));
    p.set_cost(y, r(-1));
    p.add_row(vec![(x, r(1)), (y, r(1))], r(1));
    let sol = solve(&p);
    assert_eq!(sol.status, LpStatus::Optimal);
    assert_eq!(sol.value, Some(r(-1)));
    assert!(p.is_feasible(sol.x.as_ref().unwrap()));
}

#[test]
fn contradictory_equalities() {
    let mut p = LpProblem::new();
    let x = p.add_nonneg();
    p.add_row(vec![(x, r(1))], r(1));
    p.add_row(vec![(x, r(1))], r(0));
    assert_eq!(solve(&p).status, LpStatus::Infeasible);
}

#[test]
fn unbounded_ray() {
    let mut p = LpProblem::new();
    let x = p.add_nonneg();
    let y = p.add_nonneg();
    p.set_cost(x, r(-1));
    p.add_row(vec![(x, r(1)), (y, r(-1))], r(2));
    assert_eq!(solve(&p).status, LpStatus::Unbounded);
}

#[test]
fn upper_and_negative_lower_bounds() {
    // minimize -x + y with -2 <= x <= 5, 1 <= y <= 4, x + y = 3
    let mut p = LpProblem::new();
    let x = p.add_var(r(-2), Some(r(5)));
    let y = p.add_var(r(1), Some(r(4)));
    p.set_cost(x, r(-1));
    p.set_cost(y, r(1));
    p.add_row(vec![(x, r(1)), (y, r(1))], r(3));
    let sol = solve(&p);
    assert_eq!(sol.value, Some(r(-1)));
    assert_eq!(sol.x, Some(vec![r(2), r(1)]));
}

#[test]
fn inverted_bounds_are_infeasible() {
    let mut p = LpProblem::new();
    p.add_var(r(2), Some(r(1)));
    assert_eq!(solve(&p).status, LpStatus::Infeasible);
}

#[test]
fn redundant_rows_are_tolerated() {
    let mut p = LpProblem::new();
    let x = p.add_nonneg();
    let y = p.add_nonneg();
    p.set_cost(y, r(1));
    p.add_row(vec![(x, r(1)), (y, r(1))], r(2));
    p.add_row(vec![(x, r(2)), (y, r(2))], r(4));
    let sol = solve(&p);
    assert_eq!(sol.value, Some(r(0)));
    assert!(p.is_feasible(sol.x.as_ref().unwrap()));
}

#[test]
fn warm_start_tracks_moving_bounds() {
    // minimize y subject to x - y = 0 ... with x in [lo, lo + 1]
    let mut p = LpProblem::new();
    let x = p.add_var(r(0), Some(r(1)));
    let y = p.add_nonneg();
    let z = p.add_nonneg();
    p.set_cost(y, r(1));
    p.set_cost(z, r(2));
    p.add_row(vec![(x, r(1)), (y, r(-1)), (z, r(1))], r(0));
    let mut warm = WarmSimplex::new();
    for lo in -3..4 {
        p.set_bounds(x, r(lo), Some(r(lo + 1)));
        let a = warm.solve(&p);
        let b = solve(&p);
        assert_eq!(a.status, b.status);
        assert_eq!(a.value, b.value, "lo = {lo}");
    }
    let (cold, warm_count) = warm.stats();
    assert_eq!(cold, 1);
    assert_eq!(warm_count, 6);
}

#[test]
fn dump_contains_exact_coefficients() {
    let mut p = LpProblem::new();
    let x = p.add_nonneg();
    p.set_name(x, "z0");
    p.set_cost(x, crate::rational::rat(-1, 3));
    p.add_row(vec![(x, crate::rational::rat(2, 5))], r(1));
    let text = p.to_lp_text();
    assert!(text.contains("-1/3 z0"), "{text}");
    assert!(text.contains("r0: 2/5 z0 = 1"), "{text}");
}

// --- brute-force oracle over basic solutions -------------------------------

/// Solves `A_S x = b` exactly; `Some` only if the columns are independent
/// and the system is consistent.
fn solve_subset(a: &[Vec<Rational>], b: &[Rational], cols: &[usize]) -> Option<Vec<Rational>> {
    let m = a.len();
    let k = cols.len();
    let mut mat: Vec<Vec<Rational>> = (0..m)
        .map(|i| {
            let mut row: Vec<Rational> = cols.iter().map(|&j| a[i][j].clone()).collect();
            row.push(b[i].clone());
            row
        })
        .collect();
    let mut rank = 0;
    for c in 0..k {
        let piv = (rank..m).find(|&i| !mat[i][c].is_zero())?;
        mat.swap(rank, piv);
        let inv = mat[rank][c].recip();
        for v in mat[rank].iter_mut() {
            *v *= &inv;
        }
        for i in 0..m {
            if i != rank && !mat[i][c].is_zero() {
                let f = mat[i][c].clone();
                for j in 0..=k {
                    let d = &f * &mat[rank][j];
                    mat[i][j] -= d;
                }
            }
        }
        rank += 1;
    }
    if (rank..m).any(|i| !mat[i][k].is_zero()) {
        return None;
    }
    Some((0..k).map(|c| mat[c][k].clone()).collect())
}

fn brute_force_min(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> Option<Rational> {
    let n = c.len();
    let mut best: Option<Rational> = None;
    for mask in 0u32..(1 << n) {
        let cols: Vec<usize> = (0..n).filter(|j| mask & (1 << j) != 0).collect();
        if cols.len() > a.len() {
            continue;
        }
        if let Some(xs) = solve_subset(a, b, &cols) {
            if xs.iter().all(|v| !v.is_negative()) {
                let val: Rational = cols.iter().zip(&xs).map(|(&j, v)| &c[j] * v).sum();
                if best.as_ref().is_none_or(|bv| val < *bv) {
                    best = Some(val);
                }
            }
        }
    }
    best
}

fn small_lp() -> impl Strategy<Value = (Vec<Vec<i64>>, Vec<i64>, Vec<i64>)> {
    (1usize..=3, 2usize..=6).prop_flat_map(|(m, n)| {
        (
            prop::collection::vec(prop::collection::vec(-3i64..=3, n), m),
            prop::collection::vec(-4i64..=4, m),
            prop::collection::vec(-3i64..=3, n),
        )
    })
}

fn build(a: &[Vec<i64>], b: &[i64], c: &[i64]) -> LpProblem {
    let mut p = LpProblem::new();
    let vars: Vec<usize> = c.iter().map(|_| p.add_nonneg()).collect();
    for (j, cj) in c.iter().enumerate() {
        p.set_cost(vars[j], r(*cj));
    }
    for (row, bi) in a.iter().zip(b) {
        p.add_row(row.iter().enumerate().map(|(j, v)| (j, r(*v))).collect(), r(*bi));
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn optimum_matches_basic_solution_enumeration((a, b, c) in small_lp()) {
        let p = build(&a, &b, &c);
        let sol = solve(&p);
        let ar: Vec<Vec<Rational>> = a.iter().map(|row| row.iter().map(|v| r(*v)).collect()).collect();
        let br: Vec<Rational> = b.iter().map(|v| r(*v)).collect();
        let cr: Vec<Rational> = c.iter().map(|v| r(*v)).collect();
        let oracle = brute_force_min(&ar, &br, &cr);
        match sol.status {
            LpStatus::Optimal => {
                let x = sol.x.as_ref().unwrap();
                prop_assert!(p.is_feasible(x));
                prop_assert_eq!(sol.value.clone(), Some(p.objective_value(x)));
                // no basic feasible point beats the reported optimum
                prop_assert_eq!(sol.value, oracle);
            }
            LpStatus::Infeasible => prop_assert!(oracle.is_none()),
            LpStatus::Unbounded => prop_assert!(oracle.is_some()),
        }
    }

    #[test]
    fn solving_is_deterministic((a, b, c) in small_lp()) {
        let p = build(&a, &b, &c);
        prop_assert_eq!(solve(&p), solve(&p));
    }

    #[test]
    fn warm_resolve_agrees_with_cold((a, b, c) in small_lp(), shifts in prop::collection::vec(prop::collection::vec(-3i64..=3, 3), 1..5)) {
        let mut p = build(&a, &b, &c);
        let mut warm = WarmSimplex::new();
        warm.solve(&p);
        for shift in shifts {
            for i in 0..p.num_rows() {
                let rhs = &p.rows()[i].rhs + r(shift[i % shift.len()]);
                p.set_rhs(i, rhs);
            }
            let w = warm.solve(&p);
            let cold = solve(&p);
            prop_assert_eq!(w.status, cold.status);
            prop_assert_eq!(&w.value, &cold.value);
            if let Some(x) = &w.x {
                prop_assert!(p.is_feasible(x));
            }
        }
    }
}
