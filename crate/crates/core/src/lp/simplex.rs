use num_traits::{One, Signed, Zero};

use super::{LpProblem, LpSolution, LpSolver, LpStatus};
use crate::rational::Rational;

/// Cold-start two-phase simplex with Bland's rule.
#[derive(Debug, Clone, Copy, Default)]
pub struct Simplex;

impl LpSolver for Simplex {
    fn solve(&mut self, problem: &LpProblem) -> LpSolution {
        Tableau::solve_cold(problem).0
    }
}

/// Simplex that keeps the last optimal tableau. A problem with the same
/// structure (see [`LpProblem::same_structure`]) is re-solved by dual
/// simplex from that basis; anything else falls back to a cold start.
#[derive(Debug, Default)]
pub struct WarmSimplex {
    state: Option<(LpProblem, Tableau)>,
    cold_solves: usize,
    warm_solves: usize,
}

impl WarmSimplex {
    pub fn new() -> Self {
        Self::default()
    }

    /// `(cold, warm)` solve counts so far.
    pub fn stats(&self) -> (usize, usize) {
        (self.cold_solves, self.warm_solves)
    }
}

impl LpSolver for WarmSimplex {
    fn solve(&mut self, problem: &LpProblem) -> LpSolution {
        if let Some((prev, tab)) = self.state.as_mut() {
            if prev.same_structure(problem) {
                if let Some(sol) = tab.resolve(problem) {
                    self.warm_solves += 1;
                    *prev = problem.clone();
                    return sol;
                }
            }
        }
        self.cold_solves += 1;
        let (sol, tab) = Tableau::solve_cold(problem);
        self.state = tab.map(|t| (problem.clone(), t));
        sol
    }
}

#[derive(Debug, Clone)]
struct Tableau {
    n: usize,
    ub_vars: Vec<usize>,
    num_eq: usize,
    /// First artificial column; artificials occupy `art..art + m`.
    art: usize,
    rows: Vec<Vec<Rational>>,
    cost: Vec<Rational>,
    basis: Vec<usize>,
    flip: Vec<bool>,
    /// Phase-2 costs per column (zero for slacks and artificials).
    phase2: Vec<Rational>,
    barred: Vec<bool>,
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn m(&self) -> usize {
        self.rows.len()
    }

    fn width(&self) -> usize {
        self.art + self.m()
    }

    /// Right-hand sides of the shifted system `y = x - l`, before flips.
    fn converted_rhs(problem: &LpProblem, ub_vars: &[usize]) -> Vec<Rational> {
        let lower = problem.lower();
        let mut b: Vec<Rational> = problem
            .rows()
            .iter()
            .map(|row| {
                let shift: Rational = row.coeffs.iter().map(|(j, a)| a * &lower[*j]).sum();
                &row.rhs - shift
            })
            .collect();
        for &j in ub_vars {
            let u = problem.upper()[j].as_ref().expect("upper-bound row without bound");
            b.push(u - &lower[j]);
        }
        b
    }

    fn build(problem: &LpProblem) -> Tableau {
        let n = problem.num_vars();
        let ub_vars: Vec<usize> = (0..n).filter(|&j| problem.upper()[j].is_some()).collect();
        let num_eq = problem.num_rows();
        let m = num_eq + ub_vars.len();
        let art = n + ub_vars.len();
        let width = art + m;
        let b = Self::converted_rhs(problem, &ub_vars);
        let mut rows = Vec::with_capacity(m);
        let mut flip = Vec::with_capacity(m);
        for i in 0..m {
            let mut row = vec![Rational::zero(); width + 1];
            if i < num_eq {
                for (j, a) in &problem.rows()[i].coeffs {
                    row[*j] = a.clone();
                }
            } else {
                let k = i - num_eq;
                row[ub_vars[k]] = Rational::one();
                row[n + k] = Rational::one();
            }
            row[width] = b[i].clone();
            let negative = b[i].is_negative();
            if negative {
                for v in row.iter_mut() {
                    *v = -&*v;
                }
            }
            row[art + i] = Rational::one();
            rows.push(row);
            flip.push(negative);
        }
        let mut phase2 = vec![Rational::zero(); width];
        phase2[..n].clone_from_slice(problem.objective());
        Tableau {
            n,
            ub_vars,
            num_eq,
            art,
            rows,
            cost: vec![Rational::zero(); width + 1],
            basis: (art..art + m).collect(),
            flip,
            phase2,
            barred: vec![false; width],
        }
    }

    fn pivot(&mut self, r: usize, k: usize) {
        let width = self.width();
        let piv = self.rows[r][k].clone();
        if !piv.is_one() {
            let inv = piv.recip();
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v *= &inv;
                }
            }
        }
        let nz: Vec<usize> = (0..=width).filter(|&j| !self.rows[r][j].is_zero()).collect();
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let eliminate = |row: &mut Vec<Rational>| {
            let factor = row[k].clone();
            if factor.is_zero() {
                return;
            }
            for &j in &nz {
                row[j] -= &factor * &pivot_row[j];
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.cost);
        self.rows[r] = pivot_row;
        self.basis[r] = k;
    }

    /// Primal simplex with Bland's rule on the current cost row.
    fn primal(&mut self) -> Outcome {
        let width = self.width();
        loop {
            let entering = (0..width).find(|&j| !self.barred[j] && self.cost[j].is_negative());
            let Some(k) = entering else {
                return Outcome::Optimal;
            };
            let mut best: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[k].is_positive() {
                    let ratio = &row[width] / &row[k];
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => {
                            ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                        }
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, k),
                None => return Outcome::Unbounded,
            }
        }
    }

    fn load_phase2_costs(&mut self) {
        let width = self.width();
        let mut cost = vec![Rational::zero(); width + 1];
        cost[..width].clone_from_slice(&self.phase2);
        for (i, row) in self.rows.iter().enumerate() {
            let cb = &self.phase2[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for j in 0..=width {
                if !row[j].is_zero() {
                    cost[j] -= cb * &row[j];
                }
            }
        }
        self.cost = cost;
    }

    fn solve_cold(problem: &LpProblem) -> (LpSolution, Option<Tableau>) {
        let mut tab = Tableau::build(problem);
        let width = tab.width();

        // Phase 1: minimize the sum of artificials.
        let mut cost = vec![Rational::zero(); width + 1];
        for row in &tab.rows {
            for j in 0..tab.art {
                if !row[j].is_zero() {
                    cost[j] -= &row[j];
                }
            }
            cost[width] -= &row[width];
        }
        tab.cost = cost;
        // artificials that leave the basis never come back
        for j in tab.art..width {
            tab.barred[j] = true;
        }
        tab.primal();
        if !tab.cost[width].is_zero() {
            return (LpSolution::infeasible(), None);
        }
        // Drive zero-level artificials out where the row allows it.
        for r in 0..tab.m() {
            if tab.basis[r] >= tab.art {
                if let Some(k) = (0..tab.art).find(|&j| !tab.rows[r][j].is_zero()) {
                    tab.pivot(r, k);
                }
            }
        }

        tab.load_phase2_costs();
        match tab.primal() {
            Outcome::Unbounded => (LpSolution::unbounded(), None),
            Outcome::Optimal => {
                let sol = tab.extract(problem);
                (sol, Some(tab))
            }
        }
    }

    /// Dual simplex from the stored optimal basis after a right-hand-side
    /// change. `None` means the warm start gave up and a cold solve is needed.
    fn resolve(&mut self, problem: &LpProblem) -> Option<LpSolution> {
        let width = self.width();
        let m = self.m();
        let mut b = Self::converted_rhs(problem, &self.ub_vars);
        for (bi, &f) in b.iter_mut().zip(&self.flip) {
            if f {
                *bi = -&*bi;
            }
        }
        for r in 0..m {
            let mut v = Rational::zero();
            for (i, bi) in b.iter().enumerate() {
                let coef = &self.rows[r][self.art + i];
                if !coef.is_zero() && !bi.is_zero() {
                    v += coef * bi;
                }
            }
            self.rows[r][width] = v;
        }
        let mut z = Rational::zero();
        for r in 0..m {
            z -= &self.phase2[self.basis[r]] * &self.rows[r][width];
        }
        self.cost[width] = z;

        let limit = 50 * (width + m) + 100;
        for _ in 0..limit {
            let leaving = (0..m)
                .filter(|&r| self.rows[r][width].is_negative())
                .min_by_key(|&r| self.basis[r]);
            let Some(r) = leaving else {
                if (0..m).any(|r| self.basis[r] >= self.art && !self.rows[r][width].is_zero()) {
                    return Some(LpSolution::infeasible());
                }
                return Some(self.extract(problem));
            };
            let mut best: Option<(usize, Rational)> = None;
            for j in 0..self.art {
                let a = &self.rows[r][j];
                if a.is_negative() {
                    let ratio = &self.cost[j] / (-a);
                    if best.as_ref().is_none_or(|(_, br)| ratio < *br) {
                        best = Some((j, ratio));
                    }
                }
            }
            match best {
                Some((k, _)) => self.pivot(r, k),
                None => return Some(LpSolution::infeasible()),
            }
        }
        None
    }

    fn extract(&self, problem: &LpProblem) -> LpSolution {
        let width = self.width();
        let mut x: Vec<Rational> = problem.lower().to_vec();
        for (r, &j) in self.basis.iter().enumerate() {
            if j < self.n {
                x[j] += &self.rows[r][width];
            }
        }
        debug_assert!(self.num_eq == problem.num_rows());
        let value = problem.objective_value(&x);
        LpSolution {
            status: LpStatus::Optimal,
            value: Some(value),
            x: Some(x),
        }
    }
}
