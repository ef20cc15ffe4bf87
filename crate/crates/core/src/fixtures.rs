//! Canonical small instances: the policy-class separation examples and a few
//! degenerate models used throughout the tests and the CLI.
//!
//! Rewards described only by their moments ("mean 1, variance 1") are
//! realized as the two-point law `{0: 1/2, 2: 1/2}`.

use std::ops::RangeInclusive;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::Mdp;
use crate::rational::{int, rat, Rational};

fn coin_flip_two() -> Vec<(Rational, Rational)> {
    vec![(int(0), rat(1, 2)), (int(2), rat(1, 2))]
}

fn sure(r: i64) -> Vec<(Rational, Rational)> {
    vec![(int(r), Rational::one())]
}

/// One stage, two actions: `a` pays 0 surely, `b` pays 0 or 2 with equal
/// probability. Randomizing between them beats every deterministic policy.
pub fn randomization_gap() -> Mdp {
    let mut m = Mdp::new(1, ["s0", "terminal"], "s0");
    m.set_actions("s0", ["a", "b"]);
    m.add_stationary("s0", "a", vec![("terminal", int(1))], sure(0));
    m.add_stationary("s0", "b", vec![("terminal", int(1))], coin_flip_two());
    m.make_terminal("terminal");
    m
}

/// Two stages. `a1` stops with reward 0; `a2` pays 0 or 1 and continues to
/// `s1`, where `a3` pays 0 and `a4` pays 1. Seeing the first reward lets a
/// policy lock in a total of exactly 1.
pub fn information_gap() -> Mdp {
    let mut m = Mdp::new(2, ["s0", "s1", "terminal"], "s0");
    m.set_actions("s0", ["a1", "a2"]);
    m.set_actions("s1", ["a3", "a4"]);
    m.add_stationary("s0", "a1", vec![("terminal", int(1))], sure(0));
    m.add_stationary(
        "s0",
        "a2",
        vec![("s1", int(1))],
        vec![(int(0), rat(1, 2)), (int(1), rat(1, 2))],
    );
    m.add_stationary("s1", "a3", vec![("terminal", int(1))], sure(0));
    m.add_stationary("s1", "a4", vec![("terminal", int(1))], sure(1));
    m.make_terminal("terminal");
    m
}

/// Three stages. The start branches to `s1` (probability `p`) or `s1p`,
/// both lead to `s2` with zero reward, and `s2` offers the same choice as
/// [`randomization_gap`]. A policy that remembers the branch can take the
/// risky action with probability `p`; a `(t, s, w)` policy cannot.
pub fn history_gap(p: Rational) -> Mdp {
    let q = Rational::one() - &p;
    let mut m = Mdp::new(3, ["s0", "s1", "s1p", "s2", "terminal"], "s0");
    m.set_actions("s0", ["go"]);
    m.set_actions("s1", ["go"]);
    m.set_actions("s1p", ["go"]);
    m.set_actions("s2", ["a", "b"]);
    m.add_stationary("s0", "go", vec![("s1", p), ("s1p", q)], sure(0));
    m.add_stationary("s1", "go", vec![("s2", int(1))], sure(0));
    m.add_stationary("s1p", "go", vec![("s2", int(1))], sure(0));
    m.add_stationary("s2", "a", vec![("terminal", int(1))], sure(0));
    m.add_stationary("s2", "b", vec![("terminal", int(1))], coin_flip_two());
    m.make_terminal("terminal");
    m
}

/// One stage, two actions with deterministic rewards 0 and 1.
pub fn two_point_max_variance() -> Mdp {
    let mut m = Mdp::new(1, ["s0", "terminal"], "s0");
    m.set_actions("s0", ["zero", "one"]);
    m.add_stationary("s0", "zero", vec![("terminal", int(1))], sure(0));
    m.add_stationary("s0", "one", vec![("terminal", int(1))], sure(1));
    m.make_terminal("terminal");
    m
}

/// Two states with random transitions, a single action each, and no reward.
pub fn zero_reward_chain(horizon: usize) -> Mdp {
    let mut m = Mdp::new(horizon, ["s0", "s1"], "s0");
    m.set_actions("s0", ["go"]);
    m.set_actions("s1", ["go"]);
    m.add_stationary(
        "s0",
        "go",
        vec![("s0", rat(1, 3)), ("s1", rat(2, 3))],
        vec![(Rational::zero(), Rational::one())],
    );
    m.add_stationary(
        "s1",
        "go",
        vec![("s0", rat(1, 2)), ("s1", rat(1, 2))],
        vec![(Rational::zero(), Rational::one())],
    );
    m
}

/// Like [`zero_reward_chain`] but with two actions everywhere, all paying
/// nothing.
pub fn zero_reward_choices(horizon: usize) -> Mdp {
    let mut m = Mdp::new(horizon, ["s0", "s1"], "s0");
    for s in ["s0", "s1"] {
        m.set_actions(s, ["stay", "move"]);
        let other = if s == "s0" { "s1" } else { "s0" };
        m.add_stationary(s, "stay", vec![(s, int(1))], sure(0));
        m.add_stationary(s, "move", vec![(other, rat(3, 4)), (s, rat(1, 4))], sure(0));
    }
    m
}

/// One stage with rewards `{1/3, 2/3}` (equal mass) under `coin` and `1/3`
/// surely under `safe`. Non-integer rewards for the discretization pipeline.
pub fn thirds() -> Mdp {
    let mut m = Mdp::new(1, ["s0", "terminal"], "s0");
    m.set_actions("s0", ["safe", "coin"]);
    m.add_stationary("s0", "safe", vec![("terminal", int(1))], vec![(rat(1, 3), int(1))]);
    m.add_stationary(
        "s0",
        "coin",
        vec![("terminal", int(1))],
        vec![(rat(1, 3), rat(1, 2)), (rat(2, 3), rat(1, 2))],
    );
    m.make_terminal("terminal");
    m
}

/// Shape of [`random_mdp`] instances.
#[derive(Debug, Clone)]
pub struct RandomSpec {
    pub states: RangeInclusive<usize>,
    pub actions: RangeInclusive<usize>,
    pub horizon: RangeInclusive<usize>,
    /// Rewards lie in `[-reward_bound, reward_bound]`.
    pub reward_bound: i64,
    /// Rewards are `n/d` with `1 ≤ d ≤ max_denominator`.
    pub max_denominator: i64,
    /// Support size of each reward law, at most 3.
    pub max_outcomes: usize,
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec {
            states: 1..=3,
            actions: 1..=2,
            horizon: 1..=3,
            reward_bound: 2,
            max_denominator: 1,
            max_outcomes: 2,
        }
    }
}

fn random_split(rng: &mut ChaCha8Rng, parts: usize) -> Vec<Rational> {
    match parts {
        1 => vec![Rational::one()],
        2 => {
            let k = rng.gen_range(1..=3);
            vec![rat(k, 4), rat(4 - k, 4)]
        }
        _ => {
            let mut v = vec![rat(1, 4), rat(1, 4), rat(1, 2)];
            v.shuffle(rng);
            v
        }
    }
}

/// Seeded random instance with stationary dynamics; states `s0 …`,
/// actions `a0 …` in every state.
pub fn random_mdp(seed: u64, spec: &RandomSpec) -> Mdp {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(spec.states.clone());
    let horizon = rng.gen_range(spec.horizon.clone());
    let names: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let mut m = Mdp::new(horizon, names.clone(), "s0");
    for s in &names {
        let k = rng.gen_range(spec.actions.clone());
        let actions: Vec<String> = (0..k).map(|a| format!("a{a}")).collect();
        m.set_actions(s, actions.clone());
        for a in &actions {
            let succ = rng.gen_range(1..=n.min(2));
            let targets: Vec<&String> = names.choose_multiple(&mut rng, succ).collect();
            let rows = targets
                .iter()
                .zip(random_split(&mut rng, succ))
                .map(|(t, p)| (t.as_str(), p))
                .collect();
            let outcomes = rng.gen_range(1..=spec.max_outcomes.clamp(1, 3));
            let mut values: Vec<Rational> = Vec::new();
            while values.len() < outcomes {
                let d = rng.gen_range(1..=spec.max_denominator.max(1));
                let b = spec.reward_bound * d;
                let r = rat(rng.gen_range(-b..=b), d);
                if !values.contains(&r) {
                    values.push(r);
                }
            }
            let pmf = values.into_iter().zip(random_split(&mut rng, outcomes)).collect();
            m.add_stationary(s, a, rows, pmf);
        }
    }
    m
}
