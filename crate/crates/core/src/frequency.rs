//! State-action frequency polytope over the augmented space.
//!
//! Variables are the occupation measures `z_t(x, a)` for `t < T` and the
//! terminal marginals `z_T(x)`. Intermediate marginals `z_t(x)` equal
//! `Σ_a z_t(x, a)` and are substituted rather than carried as variables.
//! Constraints: nonnegativity, unit mass on `(s₀, 0)`, and flow conservation
//! under the factored kernel `p_t(s'|s,a)·g_t(w'-w|s,a)`.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::error::Result;
use crate::lp::{LpProblem, LpSolution, LpSolver, LpStatus, WarmSimplex};
use crate::model::{
    augment_with_cap, occupation, ActionChoice, AugState, AugmentedSpace, Kernel, Mdp,
    PolicyClass, PolicySpec, DEFAULT_LAYER_CAP,
};
use crate::rational::Rational;

/// Occupation measures with every augmented entry present (zeros included).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyVector {
    /// `z_t(x, a)` for `t < T`.
    pub state_action: Vec<BTreeMap<(AugState, usize), Rational>>,
    /// `z_t(x)` for `t ≤ T`.
    pub state: Vec<BTreeMap<AugState, Rational>>,
}

impl FrequencyVector {
    /// `(Σ w z_T(x), Σ w² z_T(x))`, the mean and second moment of `W_T`.
    pub fn moments(&self) -> (Rational, Rational) {
        let mut mean = Rational::zero();
        let mut second = Rational::zero();
        for (x, z) in self.state.last().into_iter().flatten() {
            mean += &x.w * z;
            second += &x.w * &x.w * z;
        }
        (mean, second)
    }

    pub fn horizon(&self) -> usize {
        self.state.len() - 1
    }
}

#[derive(Debug, Clone)]
pub struct Feasibility {
    pub feasible: bool,
    pub witness: Option<FrequencyVector>,
}

#[derive(Debug, Clone)]
pub struct IntervalMin {
    pub status: LpStatus,
    pub qhat: Option<Rational>,
    pub witness: Option<FrequencyVector>,
}

/// The polytope plus an LP backend for queries against it.
pub struct FrequencyPolytope {
    kernel: Kernel,
    aug: AugmentedSpace,
    skeleton: LpProblem,
    sa_vars: Vec<Vec<Vec<usize>>>,
    terminal_vars: Vec<usize>,
    solver: Box<dyn LpSolver>,
}

impl std::fmt::Debug for FrequencyPolytope {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FrequencyPolytope")
            .field("vars", &self.skeleton.num_vars())
            .field("rows", &self.skeleton.num_rows())
            .finish()
    }
}

/// Builds the constraint skeleton (no objective) for `mdp` over `aug`.
pub fn build_polytope(aug: &AugmentedSpace, mdp: &Mdp) -> Result<FrequencyPolytope> {
    let kernel = mdp.kernel()?;
    Ok(FrequencyPolytope::from_parts(kernel, aug.clone()))
}

impl FrequencyPolytope {
    pub fn new(mdp: &Mdp) -> Result<Self> {
        Self::with_cap(mdp, DEFAULT_LAYER_CAP)
    }

    pub fn with_cap(mdp: &Mdp, cap: usize) -> Result<Self> {
        let aug = augment_with_cap(mdp, cap)?;
        let kernel = mdp.kernel()?;
        Ok(Self::from_parts(kernel, aug))
    }

    /// Replaces the LP backend (default: [`WarmSimplex`]).
    pub fn with_solver(mut self, solver: Box<dyn LpSolver>) -> Self {
        self.solver = solver;
        self
    }

    fn from_parts(kernel: Kernel, aug: AugmentedSpace) -> Self {
        let horizon = kernel.horizon();
        let mut lp = LpProblem::new();
        let mut sa_vars = Vec::with_capacity(horizon);
        for t in 0..horizon {
            let layer: Vec<Vec<usize>> = aug
                .layer(t)
                .iter()
                .enumerate()
                .map(|(i, x)| {
                    (0..kernel.num_actions(x.state))
                        .map(|a| {
                            let v = lp.add_nonneg();
                            lp.set_name(v, format!("z_{t}_{i}_{a}"));
                            v
                        })
                        .collect()
                })
                .collect();
            sa_vars.push(layer);
        }
        let terminal_vars: Vec<usize> = (0..aug.layer(horizon).len())
            .map(|i| {
                let v = lp.add_nonneg();
                lp.set_name(v, format!("zT_{i}"));
                v
            })
            .collect();

        // One row per augmented state: outflow (or terminal mass) minus inflow.
        let mut rows: Vec<Vec<Vec<(usize, Rational)>>> = (0..=horizon)
            .map(|t| vec![Vec::new(); aug.layer(t).len()])
            .collect();
        for t in 0..horizon {
            for (i, x) in aug.layer(t).iter().enumerate() {
                for (a, &var) in sa_vars[t][i].iter().enumerate() {
                    rows[t][i].push((var, Rational::one()));
                    for (s2, w2, prob) in kernel.successors(t, x.state, &x.w, a) {
                        if prob.is_zero() {
                            continue;
                        }
                        let j = aug
                            .position(t + 1, &AugState::new(s2, w2))
                            .expect("augmented space is closed under successors");
                        rows[t + 1][j].push((var, -prob));
                    }
                }
            }
        }
        for (i, &var) in terminal_vars.iter().enumerate() {
            rows[horizon][i].push((var, Rational::one()));
        }
        for (t, layer) in rows.into_iter().enumerate() {
            for coeffs in layer {
                let rhs = if t == 0 { Rational::one() } else { Rational::zero() };
                lp.add_row(coeffs, rhs);
            }
        }
        FrequencyPolytope {
            kernel,
            aug,
            skeleton: lp,
            sa_vars,
            terminal_vars,
            solver: Box::new(WarmSimplex::new()),
        }
    }

    pub fn skeleton(&self) -> &LpProblem {
        &self.skeleton
    }

    pub fn augmented(&self) -> &AugmentedSpace {
        &self.aug
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    fn terminal_w(&self) -> impl Iterator<Item = (usize, &Rational)> + '_ {
        let layer = self.aug.layer(self.kernel.horizon());
        self.terminal_vars
            .iter()
            .zip(layer)
            .map(|(&v, x)| (v, &x.w))
    }

    fn mean_coeffs(&self) -> Vec<(usize, Rational)> {
        self.terminal_w().map(|(v, w)| (v, w.clone())).collect()
    }

    fn second_coeffs(&self) -> Vec<(usize, Rational)> {
        self.terminal_w().map(|(v, w)| (v, w * w)).collect()
    }

    /// Assembles a frequency vector from an LP point over the skeleton's
    /// variables (extra trailing variables are ignored).
    fn witness(&self, x: &[Rational]) -> FrequencyVector {
        let horizon = self.kernel.horizon();
        let mut state_action = Vec::with_capacity(horizon);
        let mut state = Vec::with_capacity(horizon + 1);
        for t in 0..horizon {
            let mut sa = BTreeMap::new();
            let mut marg = BTreeMap::new();
            for (i, xs) in self.aug.layer(t).iter().enumerate() {
                let mut total = Rational::zero();
                for (a, &var) in self.sa_vars[t][i].iter().enumerate() {
                    total += &x[var];
                    sa.insert((xs.clone(), a), x[var].clone());
                }
                marg.insert(xs.clone(), total);
            }
            state_action.push(sa);
            state.push(marg);
        }
        let last = self
            .aug
            .layer(horizon)
            .iter()
            .zip(&self.terminal_vars)
            .map(|(xs, &var)| (xs.clone(), x[var].clone()))
            .collect();
        state.push(last);
        FrequencyVector {
            state_action,
            state,
        }
    }

    /// LP point of a frequency vector, `None` if it has entries outside the
    /// augmented space.
    fn to_point(&self, z: &FrequencyVector) -> Option<Vec<Rational>> {
        let horizon = self.kernel.horizon();
        if z.horizon() != horizon {
            return None;
        }
        let mut x = vec![Rational::zero(); self.skeleton.num_vars()];
        for t in 0..horizon {
            for ((xs, a), val) in &z.state_action[t] {
                let i = self.aug.position(t, xs)?;
                x[*self.sa_vars[t][i].get(*a)?] = val.clone();
            }
        }
        for (xs, val) in &z.state[horizon] {
            let i = self.aug.position(horizon, xs)?;
            x[self.terminal_vars[i]] = val.clone();
        }
        Some(x)
    }

    /// Exact membership test, including `z_t(x) = Σ_a z_t(x, a)` for `t < T`.
    pub fn contains(&self, z: &FrequencyVector) -> bool {
        let Some(x) = self.to_point(z) else {
            return false;
        };
        if !self.skeleton.is_feasible(&x) {
            return false;
        }
        (0..self.kernel.horizon()).all(|t| {
            self.aug.layer(t).iter().enumerate().all(|(i, xs)| {
                let total: Rational = self.sa_vars[t][i].iter().map(|&v| x[v].clone()).sum();
                z.state[t].get(xs).map_or(total.is_zero(), |m| *m == total)
            })
        })
    }

    /// Frequency vector induced by a Markov policy.
    pub fn frequencies_of(&self, policy: &PolicySpec) -> Result<FrequencyVector> {
        let occ = occupation(&self.kernel, policy)?;
        let mut x = vec![Rational::zero(); self.skeleton.num_vars()];
        for t in 0..self.kernel.horizon() {
            for ((xs, a), val) in &occ.state_action[t] {
                let i = self.aug.position(t, xs).expect("reachable state is augmented");
                x[self.sa_vars[t][i][*a]] = val.clone();
            }
        }
        let horizon = self.kernel.horizon();
        for (xs, val) in &occ.state[horizon] {
            let i = self.aug.position(horizon, xs).expect("reachable state is augmented");
            x[self.terminal_vars[i]] = val.clone();
        }
        Ok(self.witness(&x))
    }

    fn run(&mut self, lp: &LpProblem) -> LpSolution {
        self.solver.solve(lp)
    }

    /// Is there a policy with `(J, V) = (λ, v)` exactly?
    pub fn exact_pair_feasible(&mut self, lambda: &Rational, v: &Rational) -> Feasibility {
        let mut lp = self.skeleton.clone();
        lp.add_row(self.mean_coeffs(), lambda.clone());
        lp.add_row(self.second_coeffs(), v + lambda * lambda);
        self.feasibility(&lp)
    }

    /// Is there a policy with `J = λ` and `V ≤ v`?
    pub fn mean_fixed_var_bounded(&mut self, lambda: &Rational, v: &Rational) -> Feasibility {
        let mut lp = self.skeleton.clone();
        lp.add_row(self.mean_coeffs(), lambda.clone());
        let slack = lp.add_nonneg();
        let mut coeffs = self.second_coeffs();
        coeffs.push((slack, Rational::one()));
        lp.add_row(coeffs, v + lambda * lambda);
        self.feasibility(&lp)
    }

    fn feasibility(&mut self, lp: &LpProblem) -> Feasibility {
        let sol = self.run(lp);
        match sol.x {
            Some(x) if sol.status == LpStatus::Optimal => Feasibility {
                feasible: true,
                witness: Some(self.witness(&x)),
            },
            _ => Feasibility {
                feasible: false,
                witness: None,
            },
        }
    }

    /// `min Σ w² z_T` subject to `lo ≤ Σ w z_T ≤ hi`.
    pub fn min_q_over_interval(&mut self, lo: &Rational, hi: &Rational) -> IntervalMin {
        let mut lp = self.skeleton.clone();
        for (v, c) in self.second_coeffs() {
            lp.set_cost(v, c);
        }
        let mean = lp.add_var(lo.clone(), Some(hi.clone()));
        let mut coeffs = self.mean_coeffs();
        coeffs.push((mean, -Rational::one()));
        lp.add_row(coeffs, Rational::zero());
        let sol = self.run(&lp);
        match (sol.status, sol.x) {
            (LpStatus::Optimal, Some(x)) => IntervalMin {
                status: LpStatus::Optimal,
                qhat: sol.value,
                witness: Some(self.witness(&x)),
            },
            (status, _) => IntervalMin {
                status,
                qhat: None,
                witness: None,
            },
        }
    }

    /// Minimizes `Σ (α w² + β w) z_T` over the polytope; returns the
    /// optimal `(J, Q)` point.
    fn minimize_moment_form(&mut self, alpha: &Rational, beta: &Rational) -> (Rational, Rational) {
        let mut lp = self.skeleton.clone();
        for (v, w) in self.terminal_w().map(|(v, w)| (v, w.clone())).collect::<Vec<_>>() {
            lp.set_cost(v, alpha * &w * &w + beta * &w);
        }
        let sol = self.run(&lp);
        let x = sol.x.expect("the frequency polytope is nonempty and bounded");
        self.witness(&x).moments()
    }

    /// `[min J, max J]` over all policies.
    pub fn mean_range(&mut self) -> (Rational, Rational) {
        let zero = Rational::zero();
        let one = Rational::one();
        let lo = self.minimize_moment_form(&zero, &one).0;
        let hi = self.minimize_moment_form(&zero, &-one).0;
        (lo, hi)
    }

    /// Vertices of the lower boundary `q*(λ)` of the achievable
    /// `(mean, second moment)` set, left to right, found by recursive chord
    /// refinement with one LP per probe.
    pub fn lower_boundary(&mut self) -> Vec<(Rational, Rational)> {
        let (lo, hi) = self.mean_range();
        let left = self.min_q_at(&lo);
        let right = self.min_q_at(&hi);
        if lo == hi {
            return vec![(lo, left)];
        }
        let mut points = vec![(lo, left)];
        let mut stack = vec![(points[0].clone(), (hi.clone(), right.clone()))];
        let mut found = vec![(hi, right)];
        while let Some((a, b)) = stack.pop() {
            let slope = (&b.1 - &a.1) / (&b.0 - &a.0);
            let p = self.minimize_moment_form(&Rational::one(), &-slope.clone());
            let chord_at_p = &a.1 + &slope * (&p.0 - &a.0);
            if p.1 < chord_at_p {
                stack.push((a, p.clone()));
                stack.push((p.clone(), b));
                found.push(p);
            }
        }
        points.extend(found);
        points.sort();
        points.dedup();
        // drop points that sit on a straight run
        let mut hull: Vec<(Rational, Rational)> = Vec::with_capacity(points.len());
        for p in points {
            while hull.len() >= 2 {
                let (o, a) = (&hull[hull.len() - 2], &hull[hull.len() - 1]);
                let cross = (&a.0 - &o.0) * (&p.1 - &o.1) - (&a.1 - &o.1) * (&p.0 - &o.0);
                if cross.is_positive() {
                    break;
                }
                hull.pop();
            }
            hull.push(p);
        }
        hull
    }

    fn min_q_at(&mut self, lambda: &Rational) -> Rational {
        self.min_q_over_interval(lambda, lambda)
            .qhat
            .expect("mean inside the achievable range")
    }
}

/// Exact `(λ, v)` feasibility over randomized history-dependent policies.
pub fn exact_pair_feasible(mdp: &Mdp, lambda: &Rational, v: &Rational) -> Result<Feasibility> {
    Ok(FrequencyPolytope::new(mdp)?.exact_pair_feasible(lambda, v))
}

/// `J = λ`, `V ≤ v` feasibility.
pub fn mean_fixed_var_bounded(mdp: &Mdp, lambda: &Rational, v: &Rational) -> Result<Feasibility> {
    Ok(FrequencyPolytope::new(mdp)?.mean_fixed_var_bounded(lambda, v))
}

/// Smallest achievable `E[W_T²]` with `E[W_T] ∈ [lo, hi]`.
pub fn min_q_over_interval(mdp: &Mdp, lo: &Rational, hi: &Rational) -> Result<IntervalMin> {
    Ok(FrequencyPolytope::new(mdp)?.min_q_over_interval(lo, hi))
}

/// Behavioral `(t, s, w)` policy reproducing `z`:
/// `μ_t(a | x) = z_t(x, a) / z_t(x)`, first action where `z_t(x) = 0`.
pub fn frequencies_to_policy(z: &FrequencyVector) -> PolicySpec {
    let mut policy = PolicySpec::new(PolicyClass::TswU);
    for (t, layer) in z.state_action.iter().enumerate() {
        let mut per_state: BTreeMap<&AugState, Vec<(usize, &Rational)>> = BTreeMap::new();
        for ((x, a), val) in layer {
            per_state.entry(x).or_default().push((*a, val));
        }
        for (x, acts) in per_state {
            let total: Rational = acts.iter().map(|(_, v)| (*v).clone()).sum();
            let choice = if total.is_positive() {
                ActionChoice::mixed(acts.iter().map(|(a, v)| (*a, *v / &total)))
            } else {
                let first = acts.iter().map(|(a, _)| *a).min().unwrap_or(0);
                ActionChoice::pure(first)
            };
            policy.set(t, x.state, Some(x.w.clone()), choice);
        }
    }
    policy
}
