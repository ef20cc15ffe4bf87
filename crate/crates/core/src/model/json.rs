//! On-disk MDP format. Rationals are `[num, den]` arrays; entries without
//! `t` are stationary.

use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Mdp, RewardEntry, TransitionEntry};
use crate::rational::json::Json;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(super) struct Document {
    horizon: usize,
    states: Vec<String>,
    initial_state: String,
    actions: ActionTable,
    transitions: Vec<TransitionDoc>,
    rewards: Vec<RewardDoc>,
}

/// `{"state": ["a", "b"], ...}` written in declaration order.
struct ActionTable(Vec<(String, Vec<String>)>);

impl Serialize for ActionTable {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for ActionTable {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let map = std::collections::BTreeMap::<String, Vec<String>>::deserialize(d)?;
        Ok(ActionTable(map.into_iter().collect()))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransitionDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    t: Option<usize>,
    s: String,
    a: String,
    rows: Vec<(String, Json)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RewardDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    t: Option<usize>,
    s: String,
    a: String,
    pmf: Vec<(Json, Json)>,
}

impl From<&Mdp> for Document {
    fn from(m: &Mdp) -> Self {
        Document {
            horizon: m.horizon,
            states: m.states.clone(),
            initial_state: m.initial_state.clone(),
            actions: ActionTable(m.actions.clone()),
            transitions: m
                .transitions
                .iter()
                .map(|e| TransitionDoc {
                    t: e.t,
                    s: e.state.clone(),
                    a: e.action.clone(),
                    rows: e.rows.iter().map(|(s, p)| (s.clone(), Json(p.clone()))).collect(),
                })
                .collect(),
            rewards: m
                .rewards
                .iter()
                .map(|e| RewardDoc {
                    t: e.t,
                    s: e.state.clone(),
                    a: e.action.clone(),
                    pmf: e
                        .pmf
                        .iter()
                        .map(|(r, p)| (Json(r.clone()), Json(p.clone())))
                        .collect(),
                })
                .collect(),
        }
    }
}

impl From<Document> for Mdp {
    fn from(d: Document) -> Self {
        // Declaration order follows `states`; stray keys keep their sorted order
        // after the declared ones so validation can report them.
        let mut table = d.actions.0;
        let mut actions = Vec::with_capacity(table.len());
        for s in &d.states {
            if let Some(pos) = table.iter().position(|(k, _)| k == s) {
                actions.push(table.remove(pos));
            }
        }
        actions.extend(table);
        Mdp {
            horizon: d.horizon,
            states: d.states,
            initial_state: d.initial_state,
            actions,
            transitions: d
                .transitions
                .into_iter()
                .map(|e| TransitionEntry {
                    t: e.t,
                    state: e.s,
                    action: e.a,
                    rows: e.rows.into_iter().map(|(s, p)| (s, p.0)).collect(),
                })
                .collect(),
            rewards: d
                .rewards
                .into_iter()
                .map(|e| RewardEntry {
                    t: e.t,
                    state: e.s,
                    action: e.a,
                    pmf: e.pmf.into_iter().map(|(r, p)| (r.0, p.0)).collect(),
                })
                .collect(),
        }
    }
}
