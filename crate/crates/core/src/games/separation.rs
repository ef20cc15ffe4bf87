use std::collections::BTreeSet;
use std::fmt;

use serde_json::json;

use super::enumerate::enumerate_policies_with_cap;
use crate::error::{Error, Result};
use crate::frequency::{frequencies_to_policy, FrequencyPolytope};
use crate::model::{augment, evaluate_kernel, ActionChoice, Mdp, PolicyClass, PolicySpec};
use crate::rational::{to_f64, Rational};

#[derive(Debug, Clone)]
pub struct SeparationOptions {
    /// Probability levels per action for the randomized `(t, s)` search.
    pub ts_u_resolution: u32,
    pub policy_cap: u128,
}

impl Default for SeparationOptions {
    fn default() -> Self {
        SeparationOptions {
            ts_u_resolution: 16,
            policy_cap: super::DEFAULT_POLICY_CAP,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
    /// The grid search over behavioral probabilities found nothing; not a
    /// proof of infeasibility.
    NoWitnessAtResolution(u32),
}

impl Verdict {
    pub fn is_yes(self) -> bool {
        self == Verdict::Yes
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Yes => f.write_str("yes"),
            Verdict::No => f.write_str("no"),
            Verdict::NoWitnessAtResolution(m) => write!(f, "no witness at resolution {m}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ClassVerdict {
    pub class: PolicyClass,
    pub verdict: Verdict,
    pub witness: Option<PolicySpec>,
    /// `(J, V)` of the witness.
    pub moments: Option<(Rational, Rational)>,
}

/// Feasibility of `J ≥ λ, V ≤ v` per policy class.
#[derive(Debug, Clone)]
pub struct SeparationReport {
    pub lambda: Rational,
    pub v: Rational,
    pub rows: Vec<ClassVerdict>,
}

impl SeparationReport {
    pub fn get(&self, class: PolicyClass) -> &ClassVerdict {
        self.rows.iter().find(|r| r.class == class).expect("all classes reported")
    }

    pub fn feasible(&self, class: PolicyClass) -> bool {
        self.get(class).verdict.is_yes()
    }

    pub fn to_json_value(&self, mdp: &Mdp) -> Result<serde_json::Value> {
        let kernel = mdp.kernel()?;
        let rows: Vec<_> = self
            .rows
            .iter()
            .map(|r| {
                json!({
                    "class": r.class.tag(),
                    "verdict": r.verdict.to_string(),
                    "feasible": r.verdict.is_yes(),
                    "mean": r.moments.as_ref().map(|m| m.0.to_string()),
                    "variance": r.moments.as_ref().map(|m| m.1.to_string()),
                    "mean_f64": r.moments.as_ref().map(|m| to_f64(&m.0)),
                    "variance_f64": r.moments.as_ref().map(|m| to_f64(&m.1)),
                    "witness": r.witness.as_ref().map(|w| w.to_json_value(&kernel)),
                })
            })
            .collect();
        Ok(json!({
            "lambda": self.lambda.to_string(),
            "v": self.v.to_string(),
            "classes": rows,
        }))
    }
}

/// Compares the four Markov policy classes at `(λ, v)`.
///
/// Deterministic classes are decided by enumeration, `TSW_U` (equivalent to
/// randomized history-dependent policies) exactly through the frequency
/// polytope, and `TS_U` by a grid search over behavioral probabilities.
pub fn class_separation_report(
    mdp: &Mdp,
    lambda: &Rational,
    v: &Rational,
    opts: &SeparationOptions,
) -> Result<SeparationReport> {
    let ok = |mean: &Rational, var: &Rational| mean >= lambda && var <= v;
    let mut rows = Vec::with_capacity(4);

    for class in [PolicyClass::Ts, PolicyClass::Tsw] {
        let all = enumerate_policies_with_cap(mdp, class, opts.policy_cap)?;
        let hit = all.into_iter().find(|e| ok(&e.mean, &e.variance));
        rows.push(match hit {
            Some(e) => ClassVerdict {
                class,
                verdict: Verdict::Yes,
                moments: Some((e.mean, e.variance)),
                witness: Some(e.policy),
            },
            None => ClassVerdict {
                class,
                verdict: Verdict::No,
                witness: None,
                moments: None,
            },
        });
    }
    rows.insert(1, ts_u_search(mdp, &ok, opts)?);
    rows.push(tsw_u_exact(mdp, lambda, v)?);
    Ok(SeparationReport {
        lambda: lambda.clone(),
        v: v.clone(),
        rows,
    })
}

/// All ways to split `m` units among `k` actions.
fn compositions(m: u32, k: usize) -> Vec<Vec<u32>> {
    if k == 1 {
        return vec![vec![m]];
    }
    (0..=m)
        .rev()
        .flat_map(|first| {
            compositions(m - first, k - 1).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

fn ts_u_search(
    mdp: &Mdp,
    ok: &dyn Fn(&Rational, &Rational) -> bool,
    opts: &SeparationOptions,
) -> Result<ClassVerdict> {
    let m = opts.ts_u_resolution.max(1);
    let kernel = mdp.kernel()?;
    let aug = augment(mdp)?;
    let points: Vec<(usize, usize)> = (0..kernel.horizon())
        .flat_map(|t| aug.layer(t).iter().map(move |x| (t, x.state)))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let options: Vec<Vec<Vec<u32>>> = points
        .iter()
        .map(|&(_, s)| compositions(m, kernel.num_actions(s)))
        .collect();
    let count = options
        .iter()
        .fold(1u128, |acc, o| acc.saturating_mul(o.len() as u128));
    if count > opts.policy_cap {
        return Err(Error::Cap {
            what: "randomized (t, s) grid policy",
            count,
            cap: opts.policy_cap,
        });
    }
    let denom = Rational::from_integer(m.into());
    let mut digits = vec![0usize; points.len()];
    loop {
        let mut policy = PolicySpec::new(PolicyClass::TsU);
        for ((&(t, s), opt), &d) in points.iter().zip(&options).zip(&digits) {
            let weights = opt[d]
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(a, &c)| (a, Rational::from_integer(c.into()) / &denom));
            policy.set(t, s, None, ActionChoice::mixed(weights));
        }
        let ev = evaluate_kernel(&kernel, &policy)?;
        if ok(&ev.mean, &ev.variance) {
            return Ok(ClassVerdict {
                class: PolicyClass::TsU,
                verdict: Verdict::Yes,
                witness: Some(policy),
                moments: Some((ev.mean, ev.variance)),
            });
        }
        let mut i = digits.len();
        loop {
            if i == 0 {
                return Ok(ClassVerdict {
                    class: PolicyClass::TsU,
                    verdict: Verdict::NoWitnessAtResolution(m),
                    witness: None,
                    moments: None,
                });
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < options[i].len() {
                break;
            }
            digits[i] = 0;
        }
    }
}

/// `min { u(λ') : λ' ≥ λ }` over the lower boundary of the achievable
/// moment set, with `u = q − λ'²`. The boundary is piecewise linear in
/// `q`, so `u` is concave between breakpoints and the minimum is at `λ`
/// itself or at a breakpoint to its right.
fn tsw_u_exact(mdp: &Mdp, lambda: &Rational, v: &Rational) -> Result<ClassVerdict> {
    let mut poly = FrequencyPolytope::new(mdp)?;
    let lower = poly.lower_boundary();
    let no = ClassVerdict {
        class: PolicyClass::TswU,
        verdict: Verdict::No,
        witness: None,
        moments: None,
    };
    let (lo, hi) = (&lower[0].0, &lower[lower.len() - 1].0);
    if lambda > hi {
        return Ok(no);
    }
    let start = lambda.max(lo).clone();
    let q_at_start = {
        let k = lower.iter().position(|(x, _)| *x >= start).unwrap();
        if lower[k].0 == start || k == 0 {
            lower[k].1.clone()
        } else {
            let (a, b) = (&lower[k - 1], &lower[k]);
            &a.1 + (&b.1 - &a.1) * (&start - &a.0) / (&b.0 - &a.0)
        }
    };
    let mut best = (&q_at_start - &start * &start, start.clone());
    for (x, q) in lower.iter().filter(|(x, _)| *x >= start) {
        let u = q - x * x;
        if u < best.0 {
            best = (u, x.clone());
        }
    }
    if &best.0 > v {
        return Ok(no);
    }
    let (var, mean) = best;
    let found = poly.mean_fixed_var_bounded(&mean, &var);
    let z = found.witness.expect("boundary point is achievable");
    let (j, q) = z.moments();
    Ok(ClassVerdict {
        class: PolicyClass::TswU,
        verdict: Verdict::Yes,
        witness: Some(frequencies_to_policy(&z)),
        moments: Some((j.clone(), q - &j * &j)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::evaluate_policy;
    use crate::rational::{int, rat};

    fn report(mdp: &Mdp, l: Rational, v: Rational) -> SeparationReport {
        class_separation_report(mdp, &l, &v, &SeparationOptions::default()).unwrap()
    }

    #[test]
    fn compositions_count() {
        assert_eq!(compositions(16, 2).len(), 17);
        assert_eq!(compositions(4, 3).len(), 15);
    }

    #[test]
    fn randomization_helps() {
        let r = report(&fixtures::randomization_gap(), rat(1, 8), rat(1, 2));
        assert_eq!(r.get(PolicyClass::Ts).verdict, Verdict::No);
        assert_eq!(r.get(PolicyClass::TsU).verdict, Verdict::Yes);
        assert!(r.feasible(PolicyClass::TswU));
    }

    #[test]
    fn reward_information_helps() {
        let r = report(&fixtures::information_gap(), int(1), int(0));
        assert_eq!(r.get(PolicyClass::TsU).verdict, Verdict::NoWitnessAtResolution(16));
        assert_eq!(r.get(PolicyClass::Tsw).verdict, Verdict::Yes);
        assert_eq!(r.get(PolicyClass::Tsw).moments, Some((int(1), int(0))));
    }

    #[test]
    fn history_helps() {
        let mdp = fixtures::history_gap(rat(1, 4));
        let r = report(&mdp, rat(1, 4), rat(1, 2));
        assert_eq!(r.get(PolicyClass::Tsw).verdict, Verdict::No);
        let row = r.get(PolicyClass::TswU);
        assert_eq!(row.verdict, Verdict::Yes);
        let ev = evaluate_policy(&mdp, row.witness.as_ref().unwrap()).unwrap();
        assert!(ev.mean >= rat(1, 4) && ev.variance <= rat(1, 2));
        assert_eq!(row.moments, Some((ev.mean, ev.variance)));
    }
}
