use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::model::{augment, evaluate_kernel, ActionChoice, Kernel, Mdp, PolicyClass, PolicySpec};
use crate::rational::Rational;

pub const DEFAULT_POLICY_CAP: u128 = 1_000_000;

#[derive(Debug, Clone)]
pub struct EnumeratedPolicy {
    pub policy: PolicySpec,
    pub mean: Rational,
    pub second_moment: Rational,
    pub variance: Rational,
}

/// Decision points `(t, s, w?)` reachable under some policy, with their
/// action counts.
fn decision_points(kernel: &Kernel, mdp: &Mdp, class: PolicyClass) -> Result<Vec<(usize, usize, Option<Rational>, usize)>> {
    let aug = augment(mdp)?;
    let mut points = BTreeSet::new();
    for t in 0..kernel.horizon() {
        for x in aug.layer(t) {
            let w = class.uses_reward().then(|| x.w.clone());
            points.insert((t, x.state, w, kernel.num_actions(x.state)));
        }
    }
    Ok(points.into_iter().collect())
}

/// Number of deterministic policies of `class` over reachable decision
/// points, saturating at `u128::MAX`.
pub fn count_policies(mdp: &Mdp, class: PolicyClass) -> Result<u128> {
    let kernel = mdp.kernel()?;
    let points = decision_points(&kernel, mdp, class)?;
    Ok(points
        .iter()
        .fold(1u128, |acc, p| acc.saturating_mul(p.3 as u128)))
}

pub fn enumerate_policies(mdp: &Mdp, class: PolicyClass) -> Result<Vec<EnumeratedPolicy>> {
    enumerate_policies_with_cap(mdp, class, DEFAULT_POLICY_CAP)
}

/// Every deterministic `TS` or `TSW` policy, evaluated exactly, in
/// mixed-radix index order over the sorted decision points.
pub fn enumerate_policies_with_cap(mdp: &Mdp, class: PolicyClass, cap: u128) -> Result<Vec<EnumeratedPolicy>> {
    if class.randomized() {
        return Err(Error::InvalidArgument(format!(
            "enumeration covers deterministic classes only, not {class}"
        )));
    }
    let kernel = mdp.kernel()?;
    let points = decision_points(&kernel, mdp, class)?;
    let count = points
        .iter()
        .fold(1u128, |acc, p| acc.saturating_mul(p.3 as u128));
    if count > cap {
        return Err(Error::Cap {
            what: "deterministic policy",
            count,
            cap,
        });
    }
    let mut digits = vec![0usize; points.len()];
    let mut out = Vec::with_capacity(count as usize);
    loop {
        let mut policy = PolicySpec::new(class);
        for (d, (t, s, w, _)) in digits.iter().zip(&points) {
            policy.set(*t, *s, w.clone(), ActionChoice::pure(*d));
        }
        let ev = evaluate_kernel(&kernel, &policy)?;
        out.push(EnumeratedPolicy {
            policy,
            mean: ev.mean,
            second_moment: ev.second_moment,
            variance: ev.variance,
        });
        // increment, least significant digit last
        let mut i = digits.len();
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < points[i].3 {
                break;
            }
            digits[i] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::int;

    fn moments(list: &[EnumeratedPolicy]) -> Vec<(Rational, Rational, Rational)> {
        list.iter()
            .map(|e| (e.mean.clone(), e.second_moment.clone(), e.variance.clone()))
            .collect()
    }

    #[test]
    fn randomization_gap_has_two_policies() {
        let all = enumerate_policies(&fixtures::randomization_gap(), PolicyClass::Ts).unwrap();
        assert_eq!(
            moments(&all),
            vec![(int(0), int(0), int(0)), (int(1), int(2), int(1))]
        );
    }

    #[test]
    fn information_gap_ts_and_tsw() {
        let mdp = fixtures::information_gap();
        let ts = enumerate_policies(&mdp, PolicyClass::Ts).unwrap();
        assert_eq!(ts.len(), 4);
        let best = ts
            .iter()
            .filter(|e| e.variance == int(0))
            .map(|e| e.mean.clone())
            .max()
            .unwrap();
        assert_eq!(best, int(0));
        let tsw = enumerate_policies(&mdp, PolicyClass::Tsw).unwrap();
        assert!(tsw.iter().any(|e| e.mean == int(1) && e.variance == int(0)));
    }

    #[test]
    fn cap_and_class_errors() {
        let mdp = fixtures::information_gap();
        assert!(matches!(
            enumerate_policies_with_cap(&mdp, PolicyClass::Tsw, 3),
            Err(Error::Cap { .. })
        ));
        assert!(enumerate_policies(&mdp, PolicyClass::TsU).is_err());
        assert_eq!(count_policies(&mdp, PolicyClass::Tsw).unwrap(), 8);
    }
}
