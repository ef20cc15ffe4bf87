//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

mod common;

use std::time::Instant;

use num_traits::Zero;

use mvmdp_core::fixtures::{self, random_mdp, RandomSpec};
use mvmdp_core::frequency::{frequencies_to_policy, FrequencyPolytope, FrequencyVector};
use mvmdp_core::games::{class_separation_report, gen_subset_sum, zero_variance_values, SeparationOptions, Verdict};
use mvmdp_core::geometry::{hausdorff_inf, hausdorff_sq};
use mvmdp_core::model::evaluate_policy;
use mvmdp_core::rational::{int, rat};
use mvmdp_core::setdp::{compute_pmq, exact_frontier, max_variance};
use mvmdp_core::tradeoff::{approximate_v_star, discretize_rewards};
use mvmdp_core::{Mdp, PolicyClass, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn oracle_equivalence() -> Outcome {
    let corpus = common::corpus(200);
    for (seed, mdp) in &corpus {
        let exact = compute_pmq(mdp, None).map_err(|e| e.to_string())?;
        let oracle = common::enumerated_hull(mdp);
        if exact != oracle {
            return Err(format!("seed {seed}: DP {exact} vs enumeration {oracle}"));
        }
    }
    let skipped = corpus.last().unwrap().0 + 1 - corpus.len() as u64;
    Ok(format!(
        "{} instances, vertex sets identical ({skipped} seeds skipped for policy count > {})",
        corpus.len(),
        common::ENUMERATION_LIMIT
    ))
}

fn lower_boundary_lp() -> Outcome {
    let corpus = common::corpus(200);
    let mut checked = 0;
    for (seed, mdp) in &corpus {
        let pmq = compute_pmq(mdp, None).unwrap();
        let mut poly = FrequencyPolytope::new(mdp).unwrap();
        for v in pmq.lower_chain() {
            let got = poly.min_q_over_interval(&v.x, &v.x).qhat;
            if got.as_ref() != Some(&v.y) {
                return Err(format!("seed {seed}: vertex {v}, LP gave {got:?}"));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} lower-boundary vertices on {} instances", corpus.len()))
}

fn approximation_sandwich() -> Outcome {
    let corpus = common::corpus(50);
    let mut points = 0;
    for (seed, mdp) in &corpus {
        let frontier = exact_frontier(&compute_pmq(mdp, None).unwrap()).unwrap();
        for eps in [int(1), rat(1, 2), rat(1, 4)] {
            let curve = approximate_v_star(mdp, &eps, &eps).map_err(|e| e.to_string())?;
            for (l, vhat) in curve.grid_values() {
                let exact = frontier.value(&l);
                let lower = frontier.value(&(&l - &eps)).offset(&-eps.clone());
                if vhat > exact || vhat < lower {
                    return Err(format!(
                        "seed {seed}, ε={eps}, λ={l}: v̂={vhat}, v*(λ)={exact}, v*(λ−ε)−ε={lower}"
                    ));
                }
                points += 1;
            }
        }
    }
    Ok(format!("{points} grid points on {} instances", corpus.len()))
}

fn discretization_bound() -> Outcome {
    let spec = RandomSpec {
        max_denominator: 12,
        ..RandomSpec::default()
    };
    let mut worst_ratio = Rational::zero();
    let mut worst_euclid_sq = Rational::zero();
    let mut instances = 0;
    let mut seed = 10_000u64;
    while instances < 20 {
        let mdp = random_mdp(seed, &spec);
        seed += 1;
        if mdp.reward_bound().is_zero() {
            continue;
        }
        let exact = compute_pmq(&mdp, None).unwrap();
        let k = mdp.reward_bound();
        let t = int(mdp.horizon() as i64);
        for delta in [rat(1, 2), rat(1, 4)] {
            let disc = discretize_rewards(&mdp, &delta).unwrap();
            let approx = compute_pmq(&disc, None).unwrap();
            let bound = int(2) * &k * &t * &t * &delta;
            let dist = hausdorff_inf(&exact, &approx);
            if dist > bound {
                return Err(format!(
                    "seed {}: δ={delta}, max-norm Hausdorff {dist} > 2KT²δ = {bound}",
                    seed - 1
                ));
            }
            worst_ratio = worst_ratio.max(dist / &bound);
            let euclid_sq = hausdorff_sq(&exact, &approx);
            worst_euclid_sq = worst_euclid_sq.max(euclid_sq / (&bound * &bound));
        }
        instances += 1;
    }
    Ok(format!(
        "{instances} instances x 2 δ, max-norm distance/bound ≤ {worst_ratio} (Euclidean (distance/bound)² ≤ {worst_euclid_sq})"
    ))
}

fn balanced_partition_exists(r: &[i64]) -> bool {
    (0u32..1 << r.len()).any(|mask| {
        r.iter()
            .enumerate()
            .map(|(i, &x)| if mask & (1 << i) != 0 { x } else { -x })
            .sum::<i64>()
            == 0
    })
}

fn zero_variance_subset_sum() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut yes = 0;
    for case in 0..30 {
        let n = rng.gen_range(1..=12);
        let r: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=20)).collect();
        let mdp = gen_subset_sum(&r).unwrap();
        let game = zero_variance_values(&mdp).map_err(|e| e.to_string())?;
        let got = game.achievable_values.contains(&int(0));
        let want = balanced_partition_exists(&r);
        if got != want {
            return Err(format!("case {case} r={r:?}: game says {got}, solver says {want}"));
        }
        yes += usize::from(want);
    }
    Ok(format!("30 vectors agree ({yes} with a balancing partition)"))
}

fn class_separations() -> Outcome {
    let opts = SeparationOptions::default();
    let check = |mdp: &Mdp, l: Rational, v: Rational, class: PolicyClass, want: Verdict| -> Result<(), String> {
        let report = class_separation_report(mdp, &l, &v, &opts).map_err(|e| e.to_string())?;
        let got = report.get(class).verdict;
        if got != want {
            return Err(format!("({l}, {v}) {class}: expected {want}, got {got}"));
        }
        Ok(())
    };
    let gap = fixtures::randomization_gap();
    check(&gap, rat(1, 8), rat(1, 2), PolicyClass::Ts, Verdict::No)?;
    check(&gap, rat(1, 8), rat(1, 2), PolicyClass::TsU, Verdict::Yes)?;
    let info = fixtures::information_gap();
    check(&info, int(1), int(0), PolicyClass::TsU, Verdict::NoWitnessAtResolution(16))?;
    check(&info, int(1), int(0), PolicyClass::Tsw, Verdict::Yes)?;
    let hist = fixtures::history_gap(rat(1, 4));
    check(&hist, rat(1, 4), rat(1, 2), PolicyClass::Tsw, Verdict::No)?;
    check(&hist, rat(1, 4), rat(1, 2), PolicyClass::TswU, Verdict::Yes)?;
    Ok("randomization, reward-information, and history gaps reproduced".into())
}

fn max_variance_two_point() -> Outcome {
    let pmq = compute_pmq(&fixtures::two_point_max_variance(), None).unwrap();
    let mv = max_variance(&pmq).unwrap();
    if mv.value == rat(1, 4) && mv.weight == rat(1, 2) {
        Ok(format!("max variance {} at mixture weight {}", mv.value, mv.weight))
    } else {
        Err(format!("max variance {} at weight {}", mv.value, mv.weight))
    }
}

fn pruning_guarantee() -> Outcome {
    let spec = RandomSpec {
        states: 2..=3,
        actions: 2..=2,
        horizon: 5..=5,
        reward_bound: 3,
        max_denominator: 1,
        max_outcomes: 2,
    };
    let mut found = 0;
    let mut seed = 20_000u64;
    let mut sizes = Vec::new();
    while found < 10 {
        let mdp = random_mdp(seed, &spec);
        seed += 1;
        let exact = compute_pmq(&mdp, None).unwrap();
        if exact.len() < 20 {
            continue;
        }
        for eps in [rat(1, 2), rat(1, 4)] {
            let pruned = compute_pmq(&mdp, Some(&eps)).unwrap();
            let d2 = hausdorff_sq(&exact, &pruned);
            if d2 > &eps * &eps || pruned.len() > exact.len() {
                return Err(format!(
                    "seed {}: ε={eps}, Hausdorff² {d2}, {} vs {} vertices",
                    seed - 1,
                    pruned.len(),
                    exact.len()
                ));
            }
            sizes.push((exact.len(), pruned.len()));
        }
        found += 1;
    }
    let exact_total: usize = sizes.iter().map(|s| s.0).sum();
    let pruned_total: usize = sizes.iter().map(|s| s.1).sum();
    Ok(format!(
        "10 instances, vertices {exact_total} exact vs {pruned_total} pruned over both tolerances"
    ))
}

fn check_witness(mdp: &Mdp, z: &FrequencyVector) -> Result<(), String> {
    let (j, q) = z.moments();
    let ev = evaluate_policy(mdp, &frequencies_to_policy(z)).map_err(|e| e.to_string())?;
    if ev.mean != j || ev.second_moment != q {
        return Err(format!("witness claims ({j}, {q}), replay gives ({}, {})", ev.mean, ev.second_moment));
    }
    Ok(())
}

fn equivalence_round_trip() -> Outcome {
    let corpus = common::corpus(200);
    let mut witnesses = 0;
    for (seed, mdp) in &corpus {
        let pmq = compute_pmq(mdp, None).unwrap();
        let mut poly = FrequencyPolytope::new(mdp).unwrap();
        let (lo, hi) = poly.mean_range();
        let mut zs = Vec::new();
        // grouped by query shape so the warm-started solver can reuse bases
        zs.extend(poly.min_q_over_interval(&lo, &hi).witness);
        for v in pmq.vertices() {
            zs.extend(poly.min_q_over_interval(&v.x, &hi).witness);
        }
        for v in pmq.vertices() {
            zs.extend(poly.exact_pair_feasible(&v.x, &v.variance()).witness);
        }
        for v in pmq.vertices() {
            zs.extend(poly.mean_fixed_var_bounded(&v.x, &(v.variance() + int(1))).witness);
        }
        for z in &zs {
            check_witness(mdp, z).map_err(|e| format!("seed {seed}: {e}"))?;
        }
        witnesses += zs.len();
    }
    Ok(format!("{witnesses} LP witnesses replayed exactly on {} instances", corpus.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("oracle equivalence", oracle_equivalence),
        ("frequency/geometry consistency", lower_boundary_lp),
        ("approximation sandwich", approximation_sandwich),
        ("discretization bound", discretization_bound),
        ("zero variance vs subset sum", zero_variance_subset_sum),
        ("policy-class separations", class_separations),
        ("max variance", max_variance_two_point),
        ("pruning guarantee", pruning_guarantee),
        ("equivalence consistency", equivalence_round_trip),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS {}. {name} ({secs:.1}s): {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {}. {name} ({secs:.1}s): {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
