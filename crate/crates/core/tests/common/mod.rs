#![allow(dead_code)]

use mvmdp_core::fixtures::{random_mdp, RandomSpec};
use mvmdp_core::games::count_policies;
use mvmdp_core::geometry::{MomentPolygon, Point};
use mvmdp_core::{Mdp, PolicyClass};

/// Deterministic-TSW policy count above which a corpus instance is skipped
/// so the enumeration oracle stays fast.
pub const ENUMERATION_LIMIT: u128 = 1 << 12;

/// The first `count` seeded instances with `|S| ≤ 3`, `|A| ≤ 2`, `T ≤ 3`,
/// integer rewards in `[-2, 2]`, and at most [`ENUMERATION_LIMIT`]
/// deterministic `(t, s, w)` policies. Returns `(seed, mdp)` pairs.
pub fn corpus(count: usize) -> Vec<(u64, Mdp)> {
    let spec = RandomSpec::default();
    let mut out = Vec::with_capacity(count);
    let mut seed = 0u64;
    while out.len() < count {
        let mdp = random_mdp(seed, &spec);
        if count_policies(&mdp, PolicyClass::Tsw).unwrap() <= ENUMERATION_LIMIT {
            out.push((seed, mdp));
        }
        seed += 1;
    }
    out
}

/// Hull of the `(J, Q)` pairs of every deterministic `(t, s, w)` policy.
pub fn enumerated_hull(mdp: &Mdp) -> MomentPolygon {
    let all = mvmdp_core::games::enumerate_policies(mdp, PolicyClass::Tsw).unwrap();
    MomentPolygon::hull(all.into_iter().map(|e| Point::new(e.mean, e.second_moment)))
}
