//! Benchmark workloads shared by the criterion targets.

use mvmdp_core::fixtures::{random_mdp, RandomSpec};
use mvmdp_core::games::gen_subset_sum;
use mvmdp_core::Mdp;

/// Seeded random instance with `states` states, two actions, and rewards
/// in `-3..=3`.
pub fn random_instance(seed: u64, states: usize, horizon: usize) -> Mdp {
    let spec = RandomSpec {
        states: states..=states,
        actions: 2..=2,
        horizon: horizon..=horizon,
        reward_bound: 3,
        ..RandomSpec::default()
    };
    random_mdp(seed, &spec)
}

/// Subset-sum reduction over `1, 2, …, n`.
pub fn subset_sum_instance(n: i64) -> Mdp {
    let r: Vec<i64> = (1..=n).collect();
    gen_subset_sum(&r).expect("positive weights")
}

/// Named instances used across the benchmark groups.
pub fn workloads() -> Vec<(String, Mdp)> {
    let mut out: Vec<(String, Mdp)> = [(2, 3), (3, 4), (3, 5)]
        .iter()
        .map(|&(s, t)| (format!("random-s{s}-t{t}"), random_instance(20_000 + t as u64, s, t)))
        .collect();
    out.push(("subset-sum-6".into(), subset_sum_instance(6)));
    out
}
