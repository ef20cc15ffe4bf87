//! Markov policy representations over `(t, s)` or `(t, s, w)`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::Kernel;
use crate::error::{Error, Result};
use crate::rational::json::Json;
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum PolicyClass {
    /// Deterministic, depends on `(t, s)`.
    #[serde(rename = "TS")]
    Ts,
    /// Randomized, depends on `(t, s)`.
    #[serde(rename = "TS_U")]
    TsU,
    /// Deterministic, depends on `(t, s, w)`.
    #[serde(rename = "TSW")]
    Tsw,
    /// Randomized, depends on `(t, s, w)`.
    #[serde(rename = "TSW_U")]
    TswU,
}

impl PolicyClass {
    pub fn uses_reward(self) -> bool {
        matches!(self, PolicyClass::Tsw | PolicyClass::TswU)
    }

    pub fn randomized(self) -> bool {
        matches!(self, PolicyClass::TsU | PolicyClass::TswU)
    }

    pub fn tag(self) -> &'static str {
        match self {
            PolicyClass::Ts => "TS",
            PolicyClass::TsU => "TS_U",
            PolicyClass::Tsw => "TSW",
            PolicyClass::TswU => "TSW_U",
        }
    }
}

impl fmt::Display for PolicyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl std::str::FromStr for PolicyClass {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_uppercase().replace('-', "_").as_str() {
            "TS" => Ok(PolicyClass::Ts),
            "TS_U" | "TSU" => Ok(PolicyClass::TsU),
            "TSW" => Ok(PolicyClass::Tsw),
            "TSW_U" | "TSWU" | "H_U" => Ok(PolicyClass::TswU),
            other => Err(format!("unknown policy class `{other}`")),
        }
    }
}

/// Where a decision is taken. `w` is `None` for classes that ignore the
/// accumulated reward.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DecisionPoint {
    pub t: usize,
    pub state: usize,
    pub w: Option<Rational>,
}

/// Action distribution as `(action index, probability)` with positive
/// probabilities, sorted by action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionChoice(Vec<(usize, Rational)>);

impl ActionChoice {
    pub fn pure(action: usize) -> Self {
        ActionChoice(vec![(action, Rational::one())])
    }

    /// Builds a distribution, dropping zero entries and merging repeats.
    pub fn mixed(entries: impl IntoIterator<Item = (usize, Rational)>) -> Self {
        let mut map: BTreeMap<usize, Rational> = BTreeMap::new();
        for (a, p) in entries {
            *map.entry(a).or_insert_with(Rational::zero) += p;
        }
        ActionChoice(map.into_iter().filter(|(_, p)| !p.is_zero()).collect())
    }

    pub fn entries(&self) -> &[(usize, Rational)] {
        &self.0
    }

    pub fn is_pure(&self) -> bool {
        self.0.len() == 1 && self.0[0].1.is_one()
    }

    pub fn probability(&self, action: usize) -> Rational {
        self.0
            .iter()
            .find(|(a, _)| *a == action)
            .map(|(_, p)| p.clone())
            .unwrap_or_else(Rational::zero)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolicySpec {
    class: PolicyClass,
    rules: BTreeMap<DecisionPoint, ActionChoice>,
}

impl PolicySpec {
    pub fn new(class: PolicyClass) -> Self {
        Self {
            class,
            rules: BTreeMap::new(),
        }
    }

    pub fn class(&self) -> PolicyClass {
        self.class
    }

    pub fn rules(&self) -> &BTreeMap<DecisionPoint, ActionChoice> {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn set(&mut self, t: usize, state: usize, w: Option<Rational>, choice: ActionChoice) {
        self.rules.insert(DecisionPoint { t, state, w }, choice);
    }

    /// The rule applied at augmented state `(t, s, w)`.
    pub fn lookup(&self, t: usize, state: usize, w: &Rational) -> Option<&ActionChoice> {
        let key = DecisionPoint {
            t,
            state,
            w: self.class.uses_reward().then(|| w.clone()),
        };
        self.rules.get(&key)
    }

    /// Checks that the rule shape matches the class and every action exists.
    pub fn check(&self, kernel: &Kernel) -> Result<()> {
        for (point, choice) in &self.rules {
            if point.w.is_some() != self.class.uses_reward() {
                return Err(Error::Policy(format!(
                    "{} policy has a rule keyed {} w at t={}",
                    self.class,
                    if point.w.is_some() { "with" } else { "without" },
                    point.t
                )));
            }
            if point.t >= kernel.horizon() || point.state >= kernel.num_states() {
                return Err(Error::Policy(format!(
                    "rule at t={} for state index {} is outside the model",
                    point.t, point.state
                )));
            }
            let mut total = Rational::zero();
            for (a, p) in choice.entries() {
                if *a >= kernel.num_actions(point.state) {
                    return Err(Error::Policy(format!(
                        "action index {a} not available in state `{}`",
                        kernel.state_name(point.state)
                    )));
                }
                if p.is_negative() {
                    return Err(Error::Policy("negative action probability".into()));
                }
                total += p;
            }
            if !total.is_one() {
                return Err(Error::Policy(format!(
                    "action distribution at t={} state `{}` sums to {total}",
                    point.t,
                    kernel.state_name(point.state)
                )));
            }
            if !self.class.randomized() && !choice.is_pure() {
                return Err(Error::Policy(format!(
                    "{} policy randomizes at t={} state `{}`",
                    self.class,
                    point.t,
                    kernel.state_name(point.state)
                )));
            }
        }
        Ok(())
    }

    /// Name-based JSON rendering for reports.
    pub fn to_json_value(&self, kernel: &Kernel) -> serde_json::Value {
        #[derive(Serialize)]
        struct Rule<'a> {
            t: usize,
            s: &'a str,
            #[serde(skip_serializing_if = "Option::is_none")]
            w: Option<Json>,
            actions: Vec<(&'a str, Json)>,
        }
        #[derive(Serialize)]
        struct Doc<'a> {
            class: PolicyClass,
            rules: Vec<Rule<'a>>,
        }
        let rules = self
            .rules
            .iter()
            .map(|(p, c)| Rule {
                t: p.t,
                s: kernel.state_name(p.state),
                w: p.w.clone().map(Json),
                actions: c
                    .entries()
                    .iter()
                    .map(|(a, pr)| (kernel.action_name(p.state, *a), Json(pr.clone())))
                    .collect(),
            })
            .collect();
        serde_json::to_value(Doc {
            class: self.class,
            rules,
        })
        .expect("policy serialization is infallible")
    }
}
