//! Set-valued dynamic programming over moment polygons.
//!
//! `C_T(s, w) = {(w, w²)}` and, going backwards,
//! `C_t(s, w) = conv ⋃_a Σ_{s', r} p_t(s'|s,a) g_t(r|s,a) · C_{t+1}(s', w + r)`.
//! `C_0(s₀, 0)` is the set `P_MQ` of achievable `(E[W_T], E[W_T²])` pairs.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::geometry::{MomentPolygon, Point};
use crate::model::{augment, AugState, AugmentedSpace, Kernel, Mdp};
use crate::rational::{Extended, Rational};

/// Polygons for every augmented state of one stage.
pub type Layer = BTreeMap<AugState, MomentPolygon>;

pub fn boundary_set(w: &Rational) -> MomentPolygon {
    MomentPolygon::point(Point::new(w.clone(), w * w))
}

/// One backward step at stage `t` for every reachable augmented state of
/// that stage.
pub fn backward_step(mdp: &Mdp, t: usize, next_layer: &Layer) -> Result<Layer> {
    let kernel = mdp.kernel()?;
    let aug = augment(mdp)?;
    step_layer(&kernel, t, aug.layer(t), next_layer, None)
}

fn step_layer(
    kernel: &Kernel,
    t: usize,
    states: &[AugState],
    next: &Layer,
    prune: Option<&Rational>,
) -> Result<Layer> {
    let mut out = Layer::new();
    for x in states {
        let mut per_action = Vec::with_capacity(kernel.num_actions(x.state));
        for a in 0..kernel.num_actions(x.state) {
            let mut sum = MomentPolygon::point(Point::origin());
            for (s2, w2, prob) in kernel.successors(t, x.state, &x.w, a) {
                if prob.is_zero() {
                    continue;
                }
                let key = AugState::new(s2, w2);
                let child = next.get(&key).ok_or_else(|| Error::MissingChild {
                    t: t + 1,
                    state: kernel.state_name(s2).to_string(),
                    w: key.w.to_string(),
                })?;
                sum = sum.minkowski(&child.scale(&prob));
            }
            per_action.push(sum);
        }
        let mut cell = MomentPolygon::hull_of_union(&per_action);
        if let Some(eps) = prune {
            cell = cell.prune(eps);
        }
        out.insert(x.clone(), cell);
    }
    Ok(out)
}

/// All layers `C_0, …, C_T` of the recursion. With `prune_eps`, every
/// intermediate polygon is thinned to an inner approximation within
/// `prune_eps / (2T)` of its unpruned value, so the accumulated error stays
/// below `prune_eps`.
pub fn compute_layers(mdp: &Mdp, prune_eps: Option<&Rational>) -> Result<Vec<Layer>> {
    if let Some(eps) = prune_eps {
        if !eps.is_positive() {
            return Err(Error::NonPositiveTolerance("prune_eps"));
        }
    }
    let kernel = mdp.kernel()?;
    let aug = augment(mdp)?;
    layers_for(&kernel, &aug, prune_eps)
}

fn layers_for(kernel: &Kernel, aug: &AugmentedSpace, prune_eps: Option<&Rational>) -> Result<Vec<Layer>> {
    let horizon = kernel.horizon();
    let budget = prune_eps.map(|e| e / Rational::from_integer((2 * horizon.max(1)).into()));
    let terminal: Layer = aug
        .layer(horizon)
        .iter()
        .map(|x| (x.clone(), boundary_set(&x.w)))
        .collect();
    let mut layers = vec![terminal];
    for t in (0..horizon).rev() {
        let next = layers.last().unwrap();
        let layer = step_layer(kernel, t, aug.layer(t), next, budget.as_ref())?;
        layers.push(layer);
    }
    layers.reverse();
    Ok(layers)
}

/// `P_MQ`, exactly or (with `prune_eps`) within Hausdorff distance
/// `prune_eps`.
pub fn compute_pmq(mdp: &Mdp, prune_eps: Option<&Rational>) -> Result<MomentPolygon> {
    let mut layers = compute_layers(mdp, prune_eps)?;
    let kernel = mdp.kernel()?;
    let root = AugState::new(kernel.initial(), Rational::zero());
    Ok(layers.swap_remove(0).remove(&root).expect("root cell is computed"))
}

/// `v*(λ) = min { q − λ'² : (λ', q) ∈ P, λ' ≥ λ }` for a fixed polygon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frontier {
    lower: Vec<Point>,
}

/// `q_lower(λ) = intercept + slope·λ` on `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrontierPiece {
    pub lo: Rational,
    pub hi: Rational,
    pub slope: Rational,
    pub intercept: Rational,
}

pub fn exact_frontier(polygon: &MomentPolygon) -> Result<Frontier> {
    if polygon.is_empty() {
        return Err(Error::EmptyPolygon);
    }
    Ok(Frontier {
        lower: polygon.lower_chain(),
    })
}

impl Frontier {
    /// Lower-boundary vertices, left to right.
    pub fn breakpoints(&self) -> &[Point] {
        &self.lower
    }

    pub fn mean_range(&self) -> (&Rational, &Rational) {
        (&self.lower[0].x, &self.lower[self.lower.len() - 1].x)
    }

    pub fn pieces(&self) -> Vec<FrontierPiece> {
        self.lower
            .windows(2)
            .map(|w| {
                let slope = (&w[1].y - &w[0].y) / (&w[1].x - &w[0].x);
                FrontierPiece {
                    lo: w[0].x.clone(),
                    hi: w[1].x.clone(),
                    intercept: &w[0].y - &slope * &w[0].x,
                    slope,
                }
            })
            .collect()
    }

    /// Smallest second moment at mean exactly `λ`, if achievable.
    pub fn q_lower(&self, lambda: &Rational) -> Option<Rational> {
        let (lo, hi) = self.mean_range();
        if lambda < lo || lambda > hi {
            return None;
        }
        if self.lower.len() == 1 {
            return Some(self.lower[0].y.clone());
        }
        let k = self.lower.windows(2).position(|w| lambda <= &w[1].x).unwrap();
        let (a, b) = (&self.lower[k], &self.lower[k + 1]);
        Some(&a.y + (&b.y - &a.y) * (lambda - &a.x) / (&b.x - &a.x))
    }

    /// `v*(λ)`; `+∞` beyond the largest achievable mean.
    pub fn value(&self, lambda: &Rational) -> Extended {
        let (lo, hi) = self.mean_range();
        if lambda > hi {
            return Extended::PosInf;
        }
        let start = lambda.max(lo).clone();
        let at_start = self.q_lower(&start).unwrap() - &start * &start;
        // q_lower − λ² is concave on each edge, so its minimum over
        // [start, hi] sits at `start` or at a breakpoint.
        let best = self
            .lower
            .iter()
            .filter(|p| p.x >= start)
            .map(Point::variance)
            .fold(at_start, |m, v| m.min(v));
        Extended::Finite(best)
    }

    /// Whether some achievable mean `λ' ≥ λ` has variance at most `v`,
    /// i.e. `v*(λ) ≤ v`.
    pub fn admits(&self, lambda: &Rational, v: &Rational) -> bool {
        self.value(lambda) <= Extended::Finite(v.clone())
    }

    /// `λ*(v) = max { λ : v*(λ) ≤ v }`, or `-∞` when no mean qualifies.
    /// Returns `None` when the answer is irrational; see
    /// [`Frontier::lambda_star_bounds`].
    pub fn lambda_star(&self, v: &Rational) -> Option<Extended> {
        let (lo, hi) = self.lambda_star_bounds(v);
        (lo == hi).then_some(lo)
    }

    /// Rational bracket `lo ≤ λ*(v) ≤ hi`, tight (`lo == hi`) whenever
    /// `λ*(v)` is rational. Irrational values come from a boundary edge where
    /// `q − λ²` crosses `v` and are bracketed to within `2⁻⁶⁴`.
    pub fn lambda_star_bounds(&self, v: &Rational) -> (Extended, Extended) {
        let last = self.lower.last().unwrap();
        if &last.variance() <= v {
            let x = Extended::Finite(last.x.clone());
            return (x.clone(), x);
        }
        // Rightmost edge whose left end qualifies: u = q − λ² is concave on
        // the edge, so the qualifying part is [left end, first crossing].
        for w in self.lower.windows(2).rev() {
            let (a, b) = (&w[0], &w[1]);
            if &b.variance() <= v {
                let x = Extended::Finite(b.x.clone());
                return (x.clone(), x);
            }
            if &a.variance() <= v {
                let m = (&b.y - &a.y) / (&b.x - &a.x);
                let c = &a.y - &m * &a.x;
                let disc = &m * &m - Rational::from_integer(4.into()) * (v - c);
                let (s_lo, s_hi) = sqrt_bracket(&disc);
                let two = Rational::from_integer(2.into());
                let lo = Extended::Finite((&m - s_hi) / &two);
                let hi = Extended::Finite((&m - s_lo) / &two);
                return (lo, hi);
            }
        }
        (Extended::NegInf, Extended::NegInf)
    }
}

/// `lo ≤ √x ≤ hi` with `lo == hi` when `x` is a rational square.
fn sqrt_bracket(x: &Rational) -> (Rational, Rational) {
    use num_bigint::BigInt;
    let (p, q) = (x.numer(), x.denom());
    let (rp, rq) = (p.sqrt(), q.sqrt());
    if &(&rp * &rp) == p && &(&rq * &rq) == q {
        let r = Rational::new(rp, rq);
        return (r.clone(), r);
    }
    // √(p/q) = √(p·q·4^k) / (q·2^k)
    let scale = BigInt::from(1u8) << 64usize;
    let root = (p * q * &scale * &scale).sqrt();
    let den = q * &scale;
    (
        Rational::new(root.clone(), den.clone()),
        Rational::new(root + 1, den),
    )
}

/// Minimum of `q − λ²` over the polygon, attained at a vertex.
pub fn min_variance(polygon: &MomentPolygon) -> Result<(Rational, Point)> {
    let mut best: Option<(Rational, Point)> = None;
    for p in polygon.vertices() {
        let v = p.variance();
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, p.clone()));
        }
    }
    best.ok_or(Error::EmptyPolygon)
}

/// Maximizer of `q − λ²`: the point `(1 − weight)·from + weight·to`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxVariance {
    pub value: Rational,
    pub point: Point,
    pub from: Point,
    pub to: Point,
    /// Mixture weight on `to`.
    pub weight: Rational,
}

pub fn max_variance(polygon: &MomentPolygon) -> Result<MaxVariance> {
    let vs = polygon.vertices();
    if vs.is_empty() {
        return Err(Error::EmptyPolygon);
    }
    let mut best = MaxVariance {
        value: vs[0].variance(),
        point: vs[0].clone(),
        from: vs[0].clone(),
        to: vs[0].clone(),
        weight: Rational::zero(),
    };
    let edges = match vs.len() {
        1 => 0,
        2 => 1,
        n => n,
    };
    for i in 0..edges {
        let (a, b) = (&vs[i], &vs[(i + 1) % vs.len()]);
        let dl = &b.x - &a.x;
        let dq = &b.y - &a.y;
        let mut candidates = vec![Rational::zero(), Rational::one()];
        if !dl.is_zero() {
            let s = (&dq - Rational::from_integer(2.into()) * &dl * &a.x)
                / (Rational::from_integer(2.into()) * &dl * &dl);
            if s.is_positive() && s < Rational::one() {
                candidates.push(s);
            }
        }
        for s in candidates {
            let p = Point::new(&a.x + &s * &dl, &a.y + &s * &dq);
            let val = p.variance();
            if val > best.value {
                best = MaxVariance {
                    value: val,
                    point: p,
                    from: a.clone(),
                    to: b.clone(),
                    weight: s,
                };
            }
        }
    }
    Ok(best)
}
