use std::fmt::Write;

use num_traits::{Signed, Zero};

use super::LpProblem;

pub(super) fn write_lp(p: &LpProblem) -> String {
    let mut out = String::new();
    out.push_str("\\ exact rationals written as p/q\nMinimize\n obj:");
    let terms: Vec<_> = p
        .objective()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(j, c)| (j, c.clone()))
        .collect();
    write_terms(&mut out, p, &terms);
    out.push_str("\nSubject To\n");
    for (i, row) in p.rows().iter().enumerate() {
        let _ = write!(out, " r{i}:");
        write_terms(&mut out, p, &row.coeffs);
        let _ = writeln!(out, " = {}", row.rhs);
    }
    out.push_str("Bounds\n");
    for j in 0..p.num_vars() {
        let _ = match &p.upper()[j] {
            Some(u) => writeln!(out, " {} <= {} <= {}", p.lower()[j], p.name(j), u),
            None => writeln!(out, " {} >= {}", p.name(j), p.lower()[j]),
        };
    }
    out.push_str("End\n");
    out
}

fn write_terms(out: &mut String, p: &LpProblem, terms: &[(usize, crate::rational::Rational)]) {
    if terms.is_empty() {
        out.push_str(" 0");
        return;
    }
    for (k, (j, c)) in terms.iter().enumerate() {
        let sign = if c.is_negative() { "-" } else if k == 0 { "" } else { "+" };
        let _ = write!(out, " {sign}{} {}", c.abs(), p.name(*j));
    }
}
