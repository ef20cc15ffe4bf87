//! Grid approximation of the mean–variance tradeoff.
//!
//! For integer rewards bounded by `K`, the mean axis `[-KT, KT]` is cut into
//! cells `[λ_i, λ_{i+1}]` of width `δ`. Each cell gets one LP for the least
//! second moment `q̂_i` with mean in the cell; `û_i` subtracts the largest
//! `λ'²` in the cell, and `v̂` on cell `k` is `min_{i ≥ k} û_i`. The result
//! never exceeds `v*` and satisfies `v̂(λ) ≥ v*(λ − ν) − ε`.
//!
//! `λ̂(v) = max { λ_k : v̂(λ_k) ≤ v }` inverts the step function. Because
//! `v̂(λ_k) ≤ v*(λ_k)` and `v̂(λ) ≥ v*(λ − ν) − ε`, it satisfies
//! `λ*(v) − δ < λ̂(v) ≤ λ*(v + ε) + ν`. These constants are derived here,
//! not taken from a published bound.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::frequency::FrequencyPolytope;
use crate::lp::LpStatus;
use crate::model::Mdp;
use crate::rational::{floor_to_multiple, Extended, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TradeoffCurve {
    /// Grid step `δ`.
    pub delta: Rational,
    /// Value tolerance the curve is certified for.
    pub epsilon: Rational,
    /// Argument tolerance the curve is certified for.
    pub nu: Rational,
    /// `KT`.
    pub kt: Rational,
    /// `λ_1 … λ_n`, with `λ_1 = -KT` and `λ_{n-1} ≤ KT < λ_n`.
    pub grid: Vec<Rational>,
    /// `q̂` per cell (`None` when no policy has its mean in the cell).
    pub qhat: Vec<Option<Rational>>,
    /// `û` per cell, `+∞` for empty cells.
    pub uhat: Vec<Extended>,
    /// `v̂` per cell: suffix minima of `û`.
    pub vhat: Vec<Extended>,
    /// Largest achievable mean; `v̂` is `+∞` beyond it.
    pub mean_max: Rational,
}

impl TradeoffCurve {
    pub fn cells(&self) -> usize {
        self.vhat.len()
    }

    /// `v̂(λ)`. A point shared by two cells belongs to the left one; means
    /// below `λ_1` reuse the first cell.
    pub fn value(&self, lambda: &Rational) -> Extended {
        if lambda > &self.mean_max || lambda > self.grid.last().unwrap() {
            return Extended::PosInf;
        }
        let k = self.grid[1..]
            .iter()
            .position(|hi| lambda <= hi)
            .expect("λ is at most λ_n");
        self.vhat[k].clone()
    }

    /// `v̂` at each grid point, left-tie rule applied.
    pub fn grid_values(&self) -> Vec<(Rational, Extended)> {
        self.grid.iter().map(|l| (l.clone(), self.value(l))).collect()
    }

    /// Multiplies the mean axis by `s` and moments/variances by `s²`.
    pub fn rescale(&self, s: &Rational) -> TradeoffCurve {
        let s2 = s * s;
        TradeoffCurve {
            delta: &self.delta * s,
            epsilon: &self.epsilon * &s2,
            nu: &self.nu * s,
            kt: &self.kt * s,
            grid: self.grid.iter().map(|l| l * s).collect(),
            qhat: self.qhat.iter().map(|q| q.as_ref().map(|q| q * &s2)).collect(),
            uhat: self.uhat.iter().map(|u| u.scale(&s2)).collect(),
            vhat: self.vhat.iter().map(|v| v.scale(&s2)).collect(),
            mean_max: &self.mean_max * s,
        }
    }

    /// Rows `lambda_lo, lambda_hi, qhat, uhat, vhat`, exact then as floats.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "lambda_lo,lambda_hi,qhat,uhat,vhat,lambda_lo_f64,lambda_hi_f64,qhat_f64,uhat_f64,vhat_f64\n",
        );
        for k in 0..self.cells() {
            let (lo, hi) = (&self.grid[k], &self.grid[k + 1]);
            let q: Extended = self.qhat[k].clone().map_or(Extended::PosInf, Extended::Finite);
            let _ = writeln!(
                out,
                "{lo},{hi},{q},{},{},{},{},{},{},{}",
                self.uhat[k],
                self.vhat[k],
                crate::rational::to_f64(lo),
                crate::rational::to_f64(hi),
                q.to_f64(),
                self.uhat[k].to_f64(),
                self.vhat[k].to_f64(),
            );
        }
        out
    }
}

fn check_tolerances(epsilon: &Rational, nu: &Rational) -> Result<()> {
    if !epsilon.is_positive() {
        return Err(Error::NonPositiveTolerance("epsilon"));
    }
    if !nu.is_positive() {
        return Err(Error::NonPositiveTolerance("nu"));
    }
    Ok(())
}

/// `δ = min(ε / 3KT, ν, KT)`, reading `KT` as 1 when every reward is 0.
pub fn grid_step(kt: &Rational, epsilon: &Rational, nu: &Rational) -> Rational {
    let base = kt.max(&Rational::one()).clone();
    let three = Rational::from_integer(3.into());
    (epsilon / (three * &base)).min(nu.clone()).min(base)
}

/// `(ε, ν)`-approximation of `v*` for integer rewards.
pub fn approximate_v_star(mdp: &Mdp, epsilon: &Rational, nu: &Rational) -> Result<TradeoffCurve> {
    check_tolerances(epsilon, nu)?;
    if !mdp.has_integer_rewards() {
        return Err(Error::NonIntegerRewards);
    }
    let kt = mdp.reward_bound() * Rational::from_integer(mdp.horizon().into());
    let delta = grid_step(&kt, epsilon, nu);
    let mut poly = FrequencyPolytope::new(mdp)?;
    let (mean_min, mean_max) = poly.mean_range();

    let mut grid = vec![-kt.clone()];
    while grid.last().unwrap() <= &kt {
        let next = grid.last().unwrap() + &delta;
        grid.push(next);
    }
    let cells = grid.len() - 1;
    let mut qhat = Vec::with_capacity(cells);
    let mut uhat = Vec::with_capacity(cells);
    for k in 0..cells {
        let (lo, hi) = (&grid[k], &grid[k + 1]);
        if hi < &mean_min || lo > &mean_max {
            qhat.push(None);
            uhat.push(Extended::PosInf);
            continue;
        }
        let res = poly.min_q_over_interval(lo, hi);
        match (res.status, res.qhat) {
            (LpStatus::Optimal, Some(q)) => {
                // largest λ'² on the cell; variance is never negative
                let top = (lo * lo).max(hi * hi);
                let u = (&q - top).max(Rational::zero());
                qhat.push(Some(q));
                uhat.push(Extended::Finite(u));
            }
            _ => {
                qhat.push(None);
                uhat.push(Extended::PosInf);
            }
        }
    }
    let mut vhat = uhat.clone();
    for k in (0..cells.saturating_sub(1)).rev() {
        if vhat[k + 1] < vhat[k] {
            vhat[k] = vhat[k + 1].clone();
        }
    }
    Ok(TradeoffCurve {
        delta,
        epsilon: epsilon.clone(),
        nu: nu.clone(),
        kt,
        grid,
        qhat,
        uhat,
        vhat,
        mean_max,
    })
}

/// `λ̂(v)` as a step function of the variance budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LambdaCurve {
    pub curve: TradeoffCurve,
    /// `(v̂(λ_k), λ_k)` for grid points with finite `v̂`, by increasing `λ`.
    pub steps: Vec<(Rational, Rational)>,
}

impl LambdaCurve {
    /// `max { λ_k : v̂(λ_k) ≤ v }`, `-∞` if no grid point qualifies.
    pub fn value(&self, v: &Rational) -> Extended {
        if v.is_negative() {
            return Extended::NegInf;
        }
        self.steps
            .iter()
            .filter(|(vk, _)| vk <= v)
            .map(|(_, l)| l.clone())
            .max()
            .map_or(Extended::NegInf, Extended::Finite)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("v_from,lambda,v_from_f64,lambda_f64\n");
        let mut best: Option<&Rational> = None;
        for (v, l) in &self.steps {
            if best.is_none_or(|b| l > b) {
                let _ = writeln!(
                    out,
                    "{v},{l},{},{}",
                    crate::rational::to_f64(v),
                    crate::rational::to_f64(l)
                );
                best = Some(l);
            }
        }
        out
    }
}

/// Mirror of [`approximate_v_star`] for `λ*(v)`.
pub fn approximate_lambda_star(mdp: &Mdp, epsilon: &Rational, nu: &Rational) -> Result<LambdaCurve> {
    let curve = approximate_v_star(mdp, epsilon, nu)?;
    let steps = curve
        .grid_values()
        .into_iter()
        .filter_map(|(l, v)| v.finite().map(|v| (v.clone(), l)))
        .collect();
    Ok(LambdaCurve { curve, steps })
}

/// Rounds every reward down to a multiple of `δ`, merging masses.
pub fn discretize_rewards(mdp: &Mdp, delta: &Rational) -> Result<Mdp> {
    if !delta.is_positive() {
        return Err(Error::NonPositiveTolerance("delta"));
    }
    Ok(mdp.map_rewards(|r| floor_to_multiple(r, delta)))
}

/// `(ε, ν)`-approximation for arbitrary rational rewards: discretize with
/// `δ = ε / 4KT²`, rescale to integers, approximate at `(ε/2, ν/2)`, and map
/// the curve back to the original units.
pub fn general_reward_v_hat(mdp: &Mdp, epsilon: &Rational, nu: &Rational) -> Result<TradeoffCurve> {
    check_tolerances(epsilon, nu)?;
    let k = mdp.reward_bound();
    if k.is_zero() {
        return approximate_v_star(mdp, epsilon, nu);
    }
    let t = Rational::from_integer(BigInt::from(mdp.horizon()));
    let four = Rational::from_integer(4.into());
    let two = Rational::from_integer(2.into());
    let delta = epsilon / (four * &k * &t * &t);
    let scaled = discretize_rewards(mdp, &delta)?.map_rewards(|r| r / &delta);
    let inner = approximate_v_star(
        &scaled,
        &(epsilon / (&two * &delta * &delta)),
        &(nu / (&two * &delta)),
    )?;
    let mut curve = inner.rescale(&delta);
    curve.epsilon = epsilon.clone();
    curve.nu = nu.clone();
    Ok(curve)
}
