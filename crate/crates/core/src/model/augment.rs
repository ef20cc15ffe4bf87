//! Forward reachability over augmented states `(s, w)`.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};

use super::{Kernel, Mdp};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Per-layer state cap used by [`augment`].
pub const DEFAULT_LAYER_CAP: usize = 1_000_000;

/// Augmented state: underlying state index and cumulative reward so far.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AugState {
    pub state: usize,
    pub w: Rational,
}

impl AugState {
    pub fn new(state: usize, w: Rational) -> Self {
        Self { state, w }
    }
}

/// Reachable augmented states, one sorted layer per stage `0..=T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugmentedSpace {
    layers: Vec<Vec<AugState>>,
    integer_flag: bool,
}

impl AugmentedSpace {
    pub fn horizon(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn layer(&self, t: usize) -> &[AugState] {
        &self.layers[t]
    }

    pub fn layers(&self) -> &[Vec<AugState>] {
        &self.layers
    }

    /// Position of `x` within layer `t`.
    pub fn position(&self, t: usize, x: &AugState) -> Option<usize> {
        self.layers[t].binary_search(x).ok()
    }

    pub fn integer_flag(&self) -> bool {
        self.integer_flag
    }

    pub fn len(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Distinct cumulative-reward values present in layer `t`.
    pub fn w_values(&self, t: usize) -> BTreeSet<Rational> {
        self.layers[t].iter().map(|x| x.w.clone()).collect()
    }
}

pub fn augment(mdp: &Mdp) -> Result<AugmentedSpace> {
    augment_with_cap(mdp, DEFAULT_LAYER_CAP)
}

pub fn augment_with_cap(mdp: &Mdp, cap: usize) -> Result<AugmentedSpace> {
    let kernel = mdp.kernel()?;
    augment_kernel(&kernel, cap)
}

pub(crate) fn augment_kernel(kernel: &Kernel, cap: usize) -> Result<AugmentedSpace> {
    let horizon = kernel.horizon();
    let mut layers = Vec::with_capacity(horizon + 1);
    layers.push(vec![AugState::new(kernel.initial(), Rational::zero())]);
    for t in 0..horizon {
        let mut next = BTreeSet::new();
        for x in &layers[t] {
            for a in 0..kernel.num_actions(x.state) {
                for (s2, w2, prob) in kernel.successors(t, x.state, &x.w, a) {
                    if prob.is_positive() {
                        next.insert(AugState::new(s2, w2));
                    }
                }
            }
            if next.len() > cap {
                return Err(Error::AugmentationCap {
                    layer: t + 1,
                    size: next.len(),
                    cap,
                });
            }
        }
        layers.push(next.into_iter().collect());
    }
    Ok(AugmentedSpace {
        layers,
        integer_flag: kernel.integer_rewards(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::games::gen_subset_sum;
    use crate::rational::{int, rat};

    #[test]
    fn randomization_gap_layer_one() {
        let aug = augment(&fixtures::randomization_gap()).unwrap();
        assert_eq!(aug.layer(0).len(), 1);
        assert_eq!(aug.w_values(1), [int(0), int(2)].into_iter().collect());
    }

    #[test]
    fn subset_sum_final_layer() {
        let mdp = gen_subset_sum(&[1, 2]).unwrap();
        let aug = augment(&mdp).unwrap();
        let ws = aug.w_values(3);
        let expected: BTreeSet<_> = [0, 3, -3, 1, -1].into_iter().map(int).collect();
        assert_eq!(ws, expected);
        // the balancing value 0 only appears on the terminal branch
        let terminal = mdp.states().iter().position(|s| s == "terminal").unwrap();
        for x in aug.layer(3) {
            assert_eq!(x.w.is_zero(), x.state == terminal);
        }
    }

    #[test]
    fn zero_rewards_keep_w_at_zero() {
        let aug = augment(&fixtures::history_gap(rat(1, 3))).unwrap();
        // history_gap has nonzero rewards only at the last stage
        for t in 0..3 {
            assert_eq!(aug.w_values(t), [int(0)].into_iter().collect());
        }
        let zero = fixtures::zero_reward_chain(3);
        let aug = augment(&zero).unwrap();
        for t in 0..=3 {
            assert_eq!(aug.w_values(t), [int(0)].into_iter().collect());
        }
    }

    #[test]
    fn integer_layers_respect_bound() {
        let mdp = gen_subset_sum(&[3, 1, 2]).unwrap();
        let aug = augment(&mdp).unwrap();
        let k = mdp.reward_bound();
        for t in 0..=aug.horizon() {
            for x in aug.layer(t) {
                assert!(x.w.abs() <= &k * int(t as i64));
            }
            let bound = mdp.states().len() as i64 * (2 * 3 * t as i64 + 1);
            assert!((aug.layer(t).len() as i64) <= bound);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let mdp = gen_subset_sum(&[1, 2, 4, 8]).unwrap();
        match augment_with_cap(&mdp, 4) {
            Err(Error::AugmentationCap { cap: 4, .. }) => {}
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn deterministic_and_idempotent() {
        let mdp = fixtures::information_gap();
        assert_eq!(augment(&mdp).unwrap(), augment(&mdp).unwrap());
    }
}
