use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use crate::error::Result;
use crate::model::{augment, ActionChoice, AugState, Mdp, PolicyClass, PolicySpec};
use crate::rational::Rational;

/// Terminal values that the controller can force surely.
#[derive(Debug, Clone)]
pub struct GameResult {
    pub achievable_values: BTreeSet<Rational>,
    /// A deterministic `(t, s, w)` policy forcing each value.
    pub winning_policy: BTreeMap<Rational, PolicySpec>,
}

/// Backward induction over `(t, s, w)`, tracking per state the whole set of
/// forcible terminal values: `Win_T(s, w) = {w}` and `Win_t(s, w)` is the
/// union over actions of the intersection over positive-probability
/// outcomes of `Win_{t+1}`.
pub fn zero_variance_values(mdp: &Mdp) -> Result<GameResult> {
    let kernel = mdp.kernel()?;
    let aug = augment(mdp)?;
    let horizon = kernel.horizon();

    let mut win: Vec<BTreeMap<AugState, BTreeSet<Rational>>> = vec![BTreeMap::new(); horizon + 1];
    // choice[t][(x, k)] = first action forcing k from x
    let mut choice: Vec<BTreeMap<(AugState, Rational), usize>> = vec![BTreeMap::new(); horizon];
    for x in aug.layer(horizon) {
        win[horizon].insert(x.clone(), BTreeSet::from([x.w.clone()]));
    }
    for t in (0..horizon).rev() {
        let (head, tail) = win.split_at_mut(t + 1);
        let next = &tail[0];
        for x in aug.layer(t) {
            let mut here = BTreeSet::new();
            for a in 0..kernel.num_actions(x.state) {
                let mut forced: Option<BTreeSet<Rational>> = None;
                for (s2, w2, _) in kernel.successors(t, x.state, &x.w, a) {
                    let child = &next[&AugState::new(s2, w2)];
                    forced = Some(match forced {
                        None => child.clone(),
                        Some(f) => f.intersection(child).cloned().collect(),
                    });
                    if forced.as_ref().is_some_and(BTreeSet::is_empty) {
                        break;
                    }
                }
                for k in forced.unwrap_or_default() {
                    choice[t].entry((x.clone(), k.clone())).or_insert(a);
                    here.insert(k);
                }
            }
            head[t].insert(x.clone(), here);
        }
    }

    let root = AugState::new(kernel.initial(), Rational::zero());
    let achievable_values = win[0].remove(&root).unwrap_or_default();
    let mut winning_policy = BTreeMap::new();
    for k in &achievable_values {
        let mut policy = PolicySpec::new(PolicyClass::Tsw);
        let mut frontier = BTreeSet::from([root.clone()]);
        for t in 0..horizon {
            let mut next = BTreeSet::new();
            for x in frontier {
                let a = choice[t][&(x.clone(), k.clone())];
                policy.set(t, x.state, Some(x.w.clone()), ActionChoice::pure(a));
                for (s2, w2, _) in kernel.successors(t, x.state, &x.w, a) {
                    next.insert(AugState::new(s2, w2));
                }
            }
            frontier = next;
        }
        winning_policy.insert(k.clone(), policy);
    }
    Ok(GameResult {
        achievable_values,
        winning_policy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::games::gen_subset_sum;
    use crate::model::evaluate_policy;
    use crate::rational::int;

    fn values(mdp: &Mdp) -> Vec<Rational> {
        zero_variance_values(mdp).unwrap().achievable_values.into_iter().collect()
    }

    #[test]
    fn subset_sum_instances() {
        assert!(values(&gen_subset_sum(&[1, 2, 3]).unwrap()).contains(&int(0)));
        assert!(!values(&gen_subset_sum(&[1, 1, 3]).unwrap()).contains(&int(0)));
        assert!(values(&gen_subset_sum(&[5]).unwrap()).is_empty());
    }

    #[test]
    fn information_gap_values() {
        assert_eq!(values(&fixtures::information_gap()), vec![int(0), int(1)]);
    }

    #[test]
    fn winning_policies_replay_exactly() {
        for mdp in [fixtures::information_gap(), gen_subset_sum(&[1, 2, 3]).unwrap(), fixtures::thirds()] {
            let res = zero_variance_values(&mdp).unwrap();
            for (k, pol) in &res.winning_policy {
                let ev = evaluate_policy(&mdp, pol).unwrap();
                assert_eq!(ev.mean, *k);
                assert_eq!(ev.second_moment, k * k);
                assert!(ev.variance.is_zero());
            }
        }
    }

    #[test]
    fn randomization_gap_forces_only_zero() {
        assert_eq!(values(&fixtures::randomization_gap()), vec![int(0)]);
    }
}
