//! Finite-horizon MDP data model.
//!
//! [`Mdp`] is the declared model exactly as written in an instance file:
//! state and action names, and transition/reward entries that may be
//! stage-specific or stationary. It can hold invariant violations;
//! [`validate`] reports them as data. Solvers work on the dense, index-based
//! [`Kernel`], which only exists for valid models.

mod augment;
mod evaluate;
mod json;
mod policy;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{is_integer, Rational};

pub use augment::{augment, augment_with_cap, AugState, AugmentedSpace, DEFAULT_LAYER_CAP};
pub use evaluate::{evaluate_policy, occupation, Evaluation, Occupation};
pub(crate) use evaluate::evaluate_kernel;
pub use policy::{ActionChoice, DecisionPoint, PolicyClass, PolicySpec};

/// Transition row for `(t, s, a)`; `t == None` applies to every stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionEntry {
    pub t: Option<usize>,
    pub state: String,
    pub action: String,
    pub rows: Vec<(String, Rational)>,
}

/// Reward pmf for `(t, s, a)` as `(reward, probability)` pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewardEntry {
    pub t: Option<usize>,
    pub state: String,
    pub action: String,
    pub pmf: Vec<(Rational, Rational)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mdp {
    horizon: usize,
    states: Vec<String>,
    initial_state: String,
    actions: Vec<(String, Vec<String>)>,
    transitions: Vec<TransitionEntry>,
    rewards: Vec<RewardEntry>,
}

impl Mdp {
    pub fn new<S: Into<String>>(
        horizon: usize,
        states: impl IntoIterator<Item = S>,
        initial_state: impl Into<String>,
    ) -> Self {
        Self {
            horizon,
            states: states.into_iter().map(Into::into).collect(),
            initial_state: initial_state.into(),
            actions: Vec::new(),
            transitions: Vec::new(),
            rewards: Vec::new(),
        }
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn initial_state(&self) -> &str {
        &self.initial_state
    }

    pub fn transitions(&self) -> &[TransitionEntry] {
        &self.transitions
    }

    pub fn rewards(&self) -> &[RewardEntry] {
        &self.rewards
    }

    /// Declared action names of `state`, empty if none were declared.
    pub fn actions(&self, state: &str) -> &[String] {
        self.actions
            .iter()
            .find(|(s, _)| s == state)
            .map(|(_, a)| a.as_slice())
            .unwrap_or(&[])
    }

    pub fn action_table(&self) -> &[(String, Vec<String>)] {
        &self.actions
    }

    pub fn set_actions<A: Into<String>>(
        &mut self,
        state: &str,
        actions: impl IntoIterator<Item = A>,
    ) -> &mut Self {
        let list: Vec<String> = actions.into_iter().map(Into::into).collect();
        match self.actions.iter_mut().find(|(s, _)| s == state) {
            Some(slot) => slot.1 = list,
            None => self.actions.push((state.to_string(), list)),
        }
        self
    }

    pub fn add_transition(
        &mut self,
        t: Option<usize>,
        state: &str,
        action: &str,
        rows: Vec<(&str, Rational)>,
    ) -> &mut Self {
        self.transitions.push(TransitionEntry {
            t,
            state: state.to_string(),
            action: action.to_string(),
            rows: rows.into_iter().map(|(s, p)| (s.to_string(), p)).collect(),
        });
        self
    }

    pub fn add_reward(
        &mut self,
        t: Option<usize>,
        state: &str,
        action: &str,
        pmf: Vec<(Rational, Rational)>,
    ) -> &mut Self {
        self.rewards.push(RewardEntry {
            t,
            state: state.to_string(),
            action: action.to_string(),
            pmf,
        });
        self
    }

    /// Stationary dynamics for `(state, action)`: next-state row and reward pmf.
    pub fn add_stationary(
        &mut self,
        state: &str,
        action: &str,
        rows: Vec<(&str, Rational)>,
        pmf: Vec<(Rational, Rational)>,
    ) -> &mut Self {
        self.add_transition(None, state, action, rows);
        self.add_reward(None, state, action, pmf)
    }

    /// Declares `state` absorbing with a single zero-reward action.
    pub fn make_terminal(&mut self, state: &str) -> &mut Self {
        self.set_actions(state, ["stay"]);
        self.add_stationary(
            state,
            "stay",
            vec![(state, Rational::one())],
            vec![(Rational::zero(), Rational::one())],
        )
    }

    /// `K`: the largest absolute reward carrying positive mass anywhere.
    pub fn reward_bound(&self) -> Rational {
        self.rewards
            .iter()
            .flat_map(|e| e.pmf.iter())
            .filter(|(_, p)| p.is_positive())
            .map(|(r, _)| r.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// True iff every reward with positive mass is an integer.
    pub fn has_integer_rewards(&self) -> bool {
        self.rewards
            .iter()
            .flat_map(|e| e.pmf.iter())
            .filter(|(_, p)| p.is_positive())
            .all(|(r, _)| is_integer(r))
    }

    /// Returns a copy with every reward replaced by `f(reward)`; transitions
    /// are untouched and masses of colliding values are merged.
    pub fn map_rewards(&self, f: impl Fn(&Rational) -> Rational) -> Mdp {
        let mut out = self.clone();
        for entry in &mut out.rewards {
            let mut merged: Vec<(Rational, Rational)> = Vec::new();
            for (r, p) in &entry.pmf {
                let v = f(r);
                match merged.iter_mut().find(|(x, _)| *x == v) {
                    Some(slot) => slot.1 += p,
                    None => merged.push((v, p.clone())),
                }
            }
            entry.pmf = merged;
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&json::Document::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Mdp> {
        let doc: json::Document = serde_json::from_str(text)?;
        Ok(doc.into())
    }

    /// Validates and compiles into the dense solver representation.
    pub fn kernel(&self) -> Result<Kernel> {
        let report = validate(self);
        if !report.is_valid() {
            return Err(Error::Invalid(report));
        }
        Ok(Kernel::compile(self))
    }

    fn state_index(&self) -> HashMap<&str, usize> {
        self.states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect()
    }
}

/// Where a violation was found. Unset fields are not applicable.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Location {
    pub t: Option<usize>,
    pub state: Option<String>,
    pub action: Option<String>,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = self.t.map_or("*".to_string(), |t| t.to_string());
        let s = self.state.as_deref().unwrap_or("-");
        let a = self.action.as_deref().unwrap_or("-");
        write!(f, "(t={t}, s={s}, a={a})")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    ZeroHorizon,
    NoStates,
    DuplicateState,
    UnknownInitialState,
    NoActions,
    DuplicateAction,
    ActionsForUnknownState,
    UnknownState,
    UnknownAction,
    StageOutOfRange,
    UnknownNextState(String),
    NegativeProbability,
    TransitionSum(Rational),
    RewardSum(Rational),
    MissingTransition,
    MissingReward,
    DuplicateTransition,
    DuplicateReward,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ViolationKind::*;
        match self {
            ZeroHorizon => f.write_str("horizon must be positive"),
            NoStates => f.write_str("state set is empty"),
            DuplicateState => f.write_str("state declared twice"),
            UnknownInitialState => f.write_str("initial state is not a declared state"),
            NoActions => f.write_str("state has no actions"),
            DuplicateAction => f.write_str("action declared twice for this state"),
            ActionsForUnknownState => f.write_str("actions declared for an unknown state"),
            UnknownState => f.write_str("entry references an unknown state"),
            UnknownAction => f.write_str("entry references an action not available in this state"),
            StageOutOfRange => f.write_str("stage index outside 0..T"),
            UnknownNextState(s) => write!(f, "transition row references unknown state `{s}`"),
            NegativeProbability => f.write_str("negative probability"),
            TransitionSum(s) => write!(f, "transition probabilities sum to {s}, not 1"),
            RewardSum(s) => write!(f, "reward probabilities sum to {s}, not 1"),
            MissingTransition => f.write_str("no transition row"),
            MissingReward => f.write_str("no reward distribution"),
            DuplicateTransition => f.write_str("transition row defined more than once"),
            DuplicateReward => f.write_str("reward distribution defined more than once"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub location: Location,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.kind)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, t: Option<usize>, state: Option<&str>, action: Option<&str>, kind: ViolationKind) {
        self.violations.push(Violation {
            location: Location {
                t,
                state: state.map(str::to_string),
                action: action.map(str::to_string),
            },
            kind,
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        for v in &self.violations {
            writeln!(f, "  {v}")?;
        }
        Ok(())
    }
}

/// Checks every model invariant; an empty report means the model is valid.
pub fn validate(mdp: &Mdp) -> ValidationReport {
    use ViolationKind::*;
    let mut report = ValidationReport::default();
    let horizon = mdp.horizon;
    if horizon == 0 {
        report.push(None, None, None, ZeroHorizon);
    }
    if mdp.states.is_empty() {
        report.push(None, None, None, NoStates);
    }
    let mut seen = BTreeSet::new();
    for s in &mdp.states {
        if !seen.insert(s.as_str()) {
            report.push(None, Some(s), None, DuplicateState);
        }
    }
    let index = mdp.state_index();
    if !index.contains_key(mdp.initial_state.as_str()) {
        report.push(None, Some(&mdp.initial_state), None, UnknownInitialState);
    }
    for (s, acts) in &mdp.actions {
        if !index.contains_key(s.as_str()) {
            report.push(None, Some(s), None, ActionsForUnknownState);
        }
        let mut seen = BTreeSet::new();
        for a in acts {
            if !seen.insert(a.as_str()) {
                report.push(None, Some(s), Some(a), DuplicateAction);
            }
        }
    }
    for s in &mdp.states {
        if mdp.actions(s).is_empty() {
            report.push(None, Some(s), None, NoActions);
        }
    }

    // Coverage counters per (t, state, action).
    let mut trans_cover: HashMap<(usize, &str, &str), usize> = HashMap::new();
    let mut reward_cover: HashMap<(usize, &str, &str), usize> = HashMap::new();

    let entry_ok = |report: &mut ValidationReport, t: Option<usize>, s: &str, a: &str| -> bool {
        if !index.contains_key(s) {
            report.push(t, Some(s), Some(a), UnknownState);
            return false;
        }
        if !mdp.actions(s).iter().any(|x| x == a) {
            report.push(t, Some(s), Some(a), UnknownAction);
            return false;
        }
        if let Some(t) = t {
            if t >= horizon {
                report.push(Some(t), Some(s), Some(a), StageOutOfRange);
                return false;
            }
        }
        true
    };

    for e in &mdp.transitions {
        let (s, a) = (e.state.as_str(), e.action.as_str());
        if !entry_ok(&mut report, e.t, s, a) {
            continue;
        }
        let mut sum = Rational::zero();
        for (next, p) in &e.rows {
            if !index.contains_key(next.as_str()) {
                report.push(e.t, Some(s), Some(a), UnknownNextState(next.clone()));
            }
            if p.is_negative() {
                report.push(e.t, Some(s), Some(a), NegativeProbability);
            }
            sum += p;
        }
        if !sum.is_one() {
            report.push(e.t, Some(s), Some(a), TransitionSum(sum));
        }
        for t in stages(e.t, horizon) {
            *trans_cover.entry((t, s, a)).or_default() += 1;
        }
    }
    for e in &mdp.rewards {
        let (s, a) = (e.state.as_str(), e.action.as_str());
        if !entry_ok(&mut report, e.t, s, a) {
            continue;
        }
        let mut sum = Rational::zero();
        for (_, p) in &e.pmf {
            if p.is_negative() {
                report.push(e.t, Some(s), Some(a), NegativeProbability);
            }
            sum += p;
        }
        if !sum.is_one() {
            report.push(e.t, Some(s), Some(a), RewardSum(sum));
        }
        for t in stages(e.t, horizon) {
            *reward_cover.entry((t, s, a)).or_default() += 1;
        }
    }

    for t in 0..horizon {
        for s in &mdp.states {
            for a in mdp.actions(s) {
                let key = (t, s.as_str(), a.as_str());
                match trans_cover.get(&key).copied().unwrap_or(0) {
                    0 => report.push(Some(t), Some(s), Some(a), MissingTransition),
                    1 => {}
                    _ => report.push(Some(t), Some(s), Some(a), DuplicateTransition),
                }
                match reward_cover.get(&key).copied().unwrap_or(0) {
                    0 => report.push(Some(t), Some(s), Some(a), MissingReward),
                    1 => {}
                    _ => report.push(Some(t), Some(s), Some(a), DuplicateReward),
                }
            }
        }
    }
    report
}

fn stages(t: Option<usize>, horizon: usize) -> std::ops::Range<usize> {
    match t {
        Some(t) => t..t + 1,
        None => 0..horizon,
    }
}

/// Dynamics of one `(t, s, a)`: positive-probability successors and the
/// reward pmf with merged, sorted support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub next: Vec<(usize, Rational)>,
    pub rewards: Vec<(Rational, Rational)>,
}

/// Dense, validated form of an [`Mdp`]. States and actions are indices in
/// declaration order.
#[derive(Debug, Clone)]
pub struct Kernel {
    horizon: usize,
    initial: usize,
    state_names: Vec<String>,
    action_names: Vec<Vec<String>>,
    offsets: Vec<usize>,
    total_actions: usize,
    steps: Vec<Step>,
    reward_bound: Rational,
    integer_rewards: bool,
}

impl Kernel {
    fn compile(mdp: &Mdp) -> Kernel {
        let index = mdp.state_index();
        let action_names: Vec<Vec<String>> =
            mdp.states.iter().map(|s| mdp.actions(s).to_vec()).collect();
        let mut offsets = Vec::with_capacity(action_names.len());
        let mut total = 0;
        for acts in &action_names {
            offsets.push(total);
            total += acts.len();
        }
        let empty = Step {
            next: Vec::new(),
            rewards: Vec::new(),
        };
        let mut steps = vec![empty; total * mdp.horizon];
        let slot = |t: usize, s: &str, a: &str| -> usize {
            let si = index[s];
            let ai = action_names[si].iter().position(|x| x == a).unwrap();
            t * total + offsets[si] + ai
        };
        for e in &mdp.transitions {
            let mut next: Vec<(usize, Rational)> = Vec::new();
            for (n, p) in &e.rows {
                if p.is_zero() {
                    continue;
                }
                let ni = index[n.as_str()];
                match next.iter_mut().find(|(x, _)| *x == ni) {
                    Some(slot) => slot.1 += p,
                    None => next.push((ni, p.clone())),
                }
            }
            next.sort_by_key(|(i, _)| *i);
            for t in stages(e.t, mdp.horizon) {
                steps[slot(t, &e.state, &e.action)].next = next.clone();
            }
        }
        for e in &mdp.rewards {
            let mut pmf: Vec<(Rational, Rational)> = Vec::new();
            for (r, p) in &e.pmf {
                if p.is_zero() {
                    continue;
                }
                match pmf.iter_mut().find(|(x, _)| x == r) {
                    Some(slot) => slot.1 += p,
                    None => pmf.push((r.clone(), p.clone())),
                }
            }
            pmf.sort();
            for t in stages(e.t, mdp.horizon) {
                steps[slot(t, &e.state, &e.action)].rewards = pmf.clone();
            }
        }
        Kernel {
            horizon: mdp.horizon,
            initial: index[mdp.initial_state.as_str()],
            state_names: mdp.states.clone(),
            action_names,
            offsets,
            total_actions: total,
            steps,
            reward_bound: mdp.reward_bound(),
            integer_rewards: mdp.has_integer_rewards(),
        }
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn num_states(&self) -> usize {
        self.state_names.len()
    }

    pub fn num_actions(&self, state: usize) -> usize {
        self.action_names[state].len()
    }

    pub fn state_name(&self, state: usize) -> &str {
        &self.state_names[state]
    }

    pub fn action_name(&self, state: usize, action: usize) -> &str {
        &self.action_names[state][action]
    }

    pub fn state_id(&self, name: &str) -> Option<usize> {
        self.state_names.iter().position(|s| s == name)
    }

    pub fn action_id(&self, state: usize, name: &str) -> Option<usize> {
        self.action_names[state].iter().position(|a| a == name)
    }

    pub fn step(&self, t: usize, state: usize, action: usize) -> &Step {
        &self.steps[t * self.total_actions + self.offsets[state] + action]
    }

    /// `K = max |r|` over rewards with positive mass.
    pub fn reward_bound(&self) -> &Rational {
        &self.reward_bound
    }

    pub fn integer_rewards(&self) -> bool {
        self.integer_rewards
    }

    /// Successor augmented states of `(s, w)` under action `a` at stage `t`
    /// with their probabilities `p_t(s'|s,a) * g_t(r|s,a)`.
    pub fn successors<'a>(
        &'a self,
        t: usize,
        state: usize,
        w: &'a Rational,
        action: usize,
    ) -> impl Iterator<Item = (usize, Rational, Rational)> + 'a {
        let step = self.step(t, state, action);
        step.next.iter().flat_map(move |(s2, p)| {
            step.rewards
                .iter()
                .map(move |(r, g)| (*s2, w + r, p * g))
        })
    }
}
