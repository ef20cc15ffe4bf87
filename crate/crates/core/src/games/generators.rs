use num_traits::One;

use crate::error::{Error, Result};
use crate::model::Mdp;
use crate::rational::{int, Rational};

fn sure(r: i64) -> Vec<(Rational, Rational)> {
    vec![(int(r), Rational::one())]
}

/// Subset-sum construction with horizon `n + 1`: from `s0` the process
/// stops at `terminal` or walks `s1 … sn` with probability 1/2 each; at
/// `si` action `ai` pays `+r_i` and `bi` pays `−r_i`. The walk ends in a
/// separate absorbing state `end`. Zero variance is achievable iff some
/// subset balances its complement.
pub fn gen_subset_sum(r: &[i64]) -> Result<Mdp> {
    if r.is_empty() {
        return Err(Error::InvalidArgument("subset-sum vector is empty".into()));
    }
    if let Some(bad) = r.iter().find(|&&x| x <= 0) {
        return Err(Error::InvalidArgument(format!(
            "subset-sum entries must be positive, got {bad}"
        )));
    }
    let n = r.len();
    let walk: Vec<String> = (1..=n).map(|i| format!("s{i}")).collect();
    let mut states = vec!["s0".to_string(), "terminal".to_string()];
    states.extend(walk.iter().cloned());
    states.push("end".to_string());
    let mut m = Mdp::new(n + 1, states, "s0");
    m.set_actions("s0", ["start"]);
    let half = Rational::new(1.into(), 2.into());
    m.add_stationary(
        "s0",
        "start",
        vec![("terminal", half.clone()), ("s1", half)],
        sure(0),
    );
    for (i, &ri) in r.iter().enumerate() {
        let here = &walk[i];
        let next = walk.get(i + 1).map_or("end", String::as_str);
        let (a, b) = (format!("a{}", i + 1), format!("b{}", i + 1));
        m.set_actions(here, [a.clone(), b.clone()]);
        m.add_stationary(here, &a, vec![(next, Rational::one())], sure(ri));
        m.add_stationary(here, &b, vec![(next, Rational::one())], sure(-ri));
    }
    m.make_terminal("terminal");
    m.make_terminal("end");
    Ok(m)
}

/// 3SAT construction with horizon 3. Literals are nonzero integers: `i`
/// for `x_i`, `-i` for its negation. Clauses with fewer than three literals
/// are padded by repeating their last literal.
///
/// `s0` moves uniformly to `d0` or one of the clause states `c1 … cm`. At
/// `cj` action `pickk` follows the `k`-th literal to `y_i`, paying `+1` for
/// a positive literal and `−1` for a negated one. At `y_i`, `ai` pays `+1`
/// and `bi` pays `−1` before moving to `d0`, which is absorbing.
pub fn gen_3sat(clauses: &[Vec<i64>]) -> Result<Mdp> {
    for (j, c) in clauses.iter().enumerate() {
        if c.is_empty() || c.len() > 3 {
            return Err(Error::InvalidArgument(format!(
                "clause {} has {} literals (expected 1 to 3)",
                j + 1,
                c.len()
            )));
        }
        if c.contains(&0) {
            return Err(Error::InvalidArgument(format!("clause {} contains literal 0", j + 1)));
        }
    }
    let n = clauses
        .iter()
        .flatten()
        .map(|l| l.unsigned_abs() as usize)
        .max()
        .unwrap_or(0);
    let m_count = clauses.len();
    let mut states = vec!["s0".to_string(), "d0".to_string()];
    states.extend((1..=m_count).map(|j| format!("c{j}")));
    states.extend((1..=n).map(|i| format!("y{i}")));
    let mut m = Mdp::new(3, states, "s0");

    m.set_actions("s0", ["go"]);
    let share = Rational::new(1.into(), ((m_count + 1) as i64).into());
    let mut rows = vec![("d0".to_string(), share.clone())];
    rows.extend((1..=m_count).map(|j| (format!("c{j}"), share.clone())));
    m.add_stationary(
        "s0",
        "go",
        rows.iter().map(|(s, p)| (s.as_str(), p.clone())).collect(),
        sure(0),
    );
    m.make_terminal("d0");

    for (j, clause) in clauses.iter().enumerate() {
        let state = format!("c{}", j + 1);
        let mut lits = clause.clone();
        while lits.len() < 3 {
            lits.push(*lits.last().unwrap());
        }
        m.set_actions(&state, ["pick1", "pick2", "pick3"]);
        for (k, lit) in lits.iter().enumerate() {
            let target = format!("y{}", lit.unsigned_abs());
            m.add_stationary(
                &state,
                &format!("pick{}", k + 1),
                vec![(target.as_str(), Rational::one())],
                sure(lit.signum()),
            );
        }
    }
    for i in 1..=n {
        let state = format!("y{i}");
        let (a, b) = (format!("a{i}"), format!("b{i}"));
        m.set_actions(&state, [a.clone(), b.clone()]);
        m.add_stationary(&state, &a, vec![("d0", Rational::one())], sure(1));
        m.add_stationary(&state, &b, vec![("d0", Rational::one())], sure(-1));
    }
    Ok(m)
}
