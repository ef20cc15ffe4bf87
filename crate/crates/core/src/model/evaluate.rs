//! Exact forward evaluation of Markov policies.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::{AugState, Kernel, Mdp, PolicySpec};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Occupation measures induced by a policy: `P(X_t = x)` for `t = 0..=T`
/// and `P(X_t = x, A_t = a)` for `t < T`. Only positive entries are stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Occupation {
    pub state: Vec<BTreeMap<AugState, Rational>>,
    pub state_action: Vec<BTreeMap<(AugState, usize), Rational>>,
}

impl Occupation {
    /// Distribution of the terminal cumulative reward `W_T`.
    pub fn terminal_distribution(&self) -> BTreeMap<Rational, Rational> {
        let mut dist = BTreeMap::new();
        for (x, p) in self.state.last().into_iter().flatten() {
            *dist.entry(x.w.clone()).or_insert_with(Rational::zero) += p;
        }
        dist
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    /// `J = E[W_T]`
    pub mean: Rational,
    /// `Q = E[W_T^2]`
    pub second_moment: Rational,
    /// `V = Q - J^2`
    pub variance: Rational,
    pub terminal: BTreeMap<Rational, Rational>,
}

impl Evaluation {
    pub fn from_distribution(terminal: BTreeMap<Rational, Rational>) -> Self {
        let mut mean = Rational::zero();
        let mut second = Rational::zero();
        for (w, p) in &terminal {
            mean += w * p;
            second += w * w * p;
        }
        let variance = &second - &mean * &mean;
        Evaluation {
            mean,
            second_moment: second,
            variance,
            terminal,
        }
    }
}

/// Propagates the joint law of `(S_t, W_t)` forward under `policy`.
pub fn occupation(kernel: &Kernel, policy: &PolicySpec) -> Result<Occupation> {
    policy.check(kernel)?;
    let horizon = kernel.horizon();
    let mut state = Vec::with_capacity(horizon + 1);
    let mut state_action = Vec::with_capacity(horizon);
    let mut current: BTreeMap<AugState, Rational> = BTreeMap::new();
    current.insert(AugState::new(kernel.initial(), Rational::zero()), Rational::one());
    for t in 0..horizon {
        let mut next: BTreeMap<AugState, Rational> = BTreeMap::new();
        let mut joint = BTreeMap::new();
        for (x, mass) in &current {
            let choice = policy.lookup(t, x.state, &x.w).ok_or_else(|| {
                Error::UncoveredState(format!(
                    "(t={t}, s={}, w={})",
                    kernel.state_name(x.state),
                    x.w
                ))
            })?;
            for (a, pa) in choice.entries() {
                let za = mass * pa;
                for (s2, w2, prob) in kernel.successors(t, x.state, &x.w, *a) {
                    *next
                        .entry(AugState::new(s2, w2))
                        .or_insert_with(Rational::zero) += &za * prob;
                }
                joint.insert((x.clone(), *a), za);
            }
        }
        state.push(current);
        state_action.push(joint);
        current = next;
    }
    state.push(current);
    Ok(Occupation {
        state,
        state_action,
    })
}

/// Mean, second moment, variance, and terminal law of `W_T` under `policy`.
pub fn evaluate_policy(mdp: &Mdp, policy: &PolicySpec) -> Result<Evaluation> {
    let kernel = mdp.kernel()?;
    evaluate_kernel(&kernel, policy)
}

pub(crate) fn evaluate_kernel(kernel: &Kernel, policy: &PolicySpec) -> Result<Evaluation> {
    let occ = occupation(kernel, policy)?;
    Ok(Evaluation::from_distribution(occ.terminal_distribution()))
}
