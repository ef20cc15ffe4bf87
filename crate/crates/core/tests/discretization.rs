use mvmdp_core::fixtures::{random_mdp, RandomSpec};
use mvmdp_core::games::enumerate_policies;
use mvmdp_core::geometry::hausdorff_inf;
use mvmdp_core::model::{evaluate_policy, PolicySpec};
use mvmdp_core::rational::{int, rat};
use mvmdp_core::setdp::compute_pmq;
use mvmdp_core::tradeoff::discretize_rewards;
use mvmdp_core::{Mdp, PolicyClass};
use num_traits::Signed;

fn sure_reward(r: mvmdp_core::Rational) -> Mdp {
    let mut m = Mdp::new(1, ["s0", "end"], "s0");
    m.set_actions("s0", ["go"]);
    m.add_stationary("s0", "go", vec![("end", int(1))], vec![(r, int(1))]);
    m.make_terminal("end");
    m
}

/// Rounding a negative reward down can push `|W''|` past `KT`, so the
/// second-moment gap may exceed `2KT²δ`; it stays within `2K'T²δ` where
/// `K'` also covers the rounded rewards.
#[test]
fn bound_needs_the_rounded_magnitude() {
    let mdp = sure_reward(rat(-7, 12));
    let delta = rat(1, 2);
    let disc = discretize_rewards(&mdp, &delta).unwrap();
    let d = hausdorff_inf(&compute_pmq(&mdp, None).unwrap(), &compute_pmq(&disc, None).unwrap());
    assert_eq!(d, rat(95, 144));
    let k = mdp.reward_bound();
    assert!(d > int(2) * &k * &delta);
    let k_both = k.max(disc.reward_bound());
    assert!(d <= int(2) * k_both * delta);
}

/// Same decision rules on both models: `0 ≤ J − J' ≤ Tδ` and
/// `|Q − Q'| ≤ 2K'T²δ`.
#[test]
fn policy_coupling_on_random_instances() {
    let spec = RandomSpec {
        max_denominator: 6,
        ..RandomSpec::default()
    };
    for seed in 0..40 {
        let mdp = random_mdp(seed, &spec);
        for delta in [rat(1, 2), rat(1, 3)] {
            let disc = discretize_rewards(&mdp, &delta).unwrap();
            let t = int(mdp.horizon() as i64);
            let k = mdp.reward_bound().max(disc.reward_bound());
            let Ok(policies) = enumerate_policies(&mdp, PolicyClass::Ts) else {
                continue;
            };
            for e in policies {
                // TS rules carry over verbatim; reachable (t, s) pairs are
                // the same in both models
                let rules: &PolicySpec = &e.policy;
                let ev = evaluate_policy(&disc, rules).unwrap();
                let dj = &e.mean - &ev.mean;
                assert!(!dj.is_negative() && dj <= &t * &delta, "seed {seed}");
                let dq = (&e.second_moment - &ev.second_moment).abs();
                assert!(dq <= int(2) * &k * &t * &t * &delta, "seed {seed}");
            }
        }
    }
}
