//! Exact rational linear programming.
//!
//! Problems are `minimize c·x` subject to equality rows `A x = b` and bounds
//! `l ≤ x ≤ u` (finite `l`, optional `u`). The bundled solver is a dense
//! two-phase primal simplex with Bland's rule; [`WarmSimplex`] additionally
//! re-solves a problem whose right-hand side or bounds changed by running
//! dual simplex from the previous optimal basis.

mod dump;
mod simplex;

use std::fmt;

use num_traits::Zero;

use crate::rational::Rational;

pub use simplex::{Simplex, WarmSimplex};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub coeffs: Vec<(usize, Rational)>,
    pub rhs: Rational,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LpProblem {
    objective: Vec<Rational>,
    lower: Vec<Rational>,
    upper: Vec<Option<Rational>>,
    rows: Vec<Row>,
    names: Vec<Option<String>>,
}

impl LpProblem {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a variable with bounds `lower ≤ x ≤ upper` and zero cost.
    pub fn add_var(&mut self, lower: Rational, upper: Option<Rational>) -> usize {
        self.objective.push(Rational::zero());
        self.lower.push(lower);
        self.upper.push(upper);
        self.names.push(None);
        self.objective.len() - 1
    }

    /// Adds a nonnegative, unbounded-above variable.
    pub fn add_nonneg(&mut self) -> usize {
        self.add_var(Rational::zero(), None)
    }

    pub fn set_name(&mut self, var: usize, name: impl Into<String>) {
        self.names[var] = Some(name.into());
    }

    pub fn name(&self, var: usize) -> String {
        self.names[var].clone().unwrap_or_else(|| format!("x{var}"))
    }

    pub fn set_cost(&mut self, var: usize, cost: Rational) {
        self.objective[var] = cost;
    }

    pub fn clear_objective(&mut self) {
        self.objective.iter_mut().for_each(|c| *c = Rational::zero());
    }

    pub fn set_bounds(&mut self, var: usize, lower: Rational, upper: Option<Rational>) {
        self.lower[var] = lower;
        self.upper[var] = upper;
    }

    /// Adds `Σ coeffs · x = rhs`; repeated indices are summed.
    ///
    /// # Panics
    /// Panics if a coefficient references an unknown variable.
    pub fn add_row(&mut self, coeffs: Vec<(usize, Rational)>, rhs: Rational) -> usize {
        let mut merged: Vec<(usize, Rational)> = Vec::with_capacity(coeffs.len());
        for (j, a) in coeffs {
            assert!(j < self.num_vars(), "row references unknown variable {j}");
            match merged.iter_mut().find(|(k, _)| *k == j) {
                Some(slot) => slot.1 += a,
                None => merged.push((j, a)),
            }
        }
        merged.retain(|(_, a)| !a.is_zero());
        merged.sort_by_key(|(j, _)| *j);
        self.rows.push(Row {
            coeffs: merged,
            rhs,
        });
        self.rows.len() - 1
    }

    pub fn set_rhs(&mut self, row: usize, rhs: Rational) {
        self.rows[row].rhs = rhs;
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn objective(&self) -> &[Rational] {
        &self.objective
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn lower(&self) -> &[Rational] {
        &self.lower
    }

    pub fn upper(&self) -> &[Option<Rational>] {
        &self.upper
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Exact feasibility check of a candidate point.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        if x.len() != self.num_vars() {
            return false;
        }
        let bounds_ok = x.iter().enumerate().all(|(j, v)| {
            *v >= self.lower[j] && self.upper[j].as_ref().is_none_or(|u| v <= u)
        });
        bounds_ok
            && self.rows.iter().all(|row| {
                let lhs: Rational = row.coeffs.iter().map(|(j, a)| a * &x[*j]).sum();
                lhs == row.rhs
            })
    }

    /// Same variables, objective, and constraint matrix; only right-hand
    /// sides and bound values may differ (bound finiteness must match).
    pub fn same_structure(&self, other: &LpProblem) -> bool {
        self.objective == other.objective
            && self.rows.len() == other.rows.len()
            && self
                .rows
                .iter()
                .zip(&other.rows)
                .all(|(a, b)| a.coeffs == b.coeffs)
            && self.upper.len() == other.upper.len()
            && self
                .upper
                .iter()
                .zip(&other.upper)
                .all(|(a, b)| a.is_some() == b.is_some())
    }

    /// Human-readable dump in CPLEX-LP-like syntax with exact `p/q`
    /// coefficients.
    pub fn to_lp_text(&self) -> String {
        dump::write_lp(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

impl fmt::Display for LpStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LpStatus::Optimal => "optimal",
            LpStatus::Infeasible => "infeasible",
            LpStatus::Unbounded => "unbounded",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub value: Option<Rational>,
    pub x: Option<Vec<Rational>>,
}

impl LpSolution {
    pub(crate) fn infeasible() -> Self {
        Self {
            status: LpStatus::Infeasible,
            value: None,
            x: None,
        }
    }

    pub(crate) fn unbounded() -> Self {
        Self {
            status: LpStatus::Unbounded,
            value: None,
            x: None,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// Pluggable solver backend.
pub trait LpSolver {
    fn solve(&mut self, problem: &LpProblem) -> LpSolution;
}

/// Solves with a fresh [`Simplex`].
pub fn solve(problem: &LpProblem) -> LpSolution {
    Simplex.solve(problem)
}

#[cfg(test)]
mod tests;
