//! Exact convex polygons in the (mean, second moment) plane.
//!
//! Polygons are stored in canonical form: counterclockwise, strictly convex
//! (no collinear triples), starting at the lexicographically smallest vertex.
//! Points and segments are polygons with one and two vertices.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{json::Json, to_f64, Rational};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point {
    /// Mean `λ`.
    pub x: Rational,
    /// Second moment `q`.
    pub y: Rational,
}

impl Point {
    pub fn new(x: Rational, y: Rational) -> Self {
        Point { x, y }
    }

    pub fn origin() -> Self {
        Point::new(Rational::zero(), Rational::zero())
    }

    fn sub(&self, o: &Point) -> Point {
        Point::new(&self.x - &o.x, &self.y - &o.y)
    }

    fn add(&self, o: &Point) -> Point {
        Point::new(&self.x + &o.x, &self.y + &o.y)
    }

    fn scale(&self, a: &Rational) -> Point {
        Point::new(&self.x * a, &self.y * a)
    }

    fn dot(&self, o: &Point) -> Rational {
        &self.x * &o.x + &self.y * &o.y
    }

    /// `q - λ²`, the variance coordinate.
    pub fn variance(&self) -> Rational {
        &self.y - &self.x * &self.x
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

fn cross(o: &Point, a: &Point, b: &Point) -> Rational {
    (&a.x - &o.x) * (&b.y - &o.y) - (&a.y - &o.y) * (&b.x - &o.x)
}

fn cross_vec(u: &Point, v: &Point) -> Rational {
    &u.x * &v.y - &u.y * &v.x
}

/// Orders edge directions by polar angle over `(-90°, 270°]`, the range swept
/// by a counterclockwise walk that starts at the lexicographic minimum.
fn direction_cmp(u: &Point, v: &Point) -> Ordering {
    let half = |d: &Point| -> u8 {
        if d.x.is_positive() || (d.x.is_zero() && d.y.is_positive()) {
            0
        } else {
            1
        }
    };
    half(u).cmp(&half(v)).then_with(|| {
        let c = cross_vec(u, v);
        if c.is_positive() {
            Ordering::Less
        } else if c.is_negative() {
            Ordering::Greater
        } else {
            Ordering::Equal
        }
    })
}

/// Strict convex hull (Andrew's monotone chain) in canonical order.
pub fn convex_hull(points: impl IntoIterator<Item = Point>) -> Vec<Point> {
    let mut pts: Vec<Point> = points.into_iter().collect();
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<Point> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && !cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p).is_positive() {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Point> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && !cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p).is_positive() {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Squared Euclidean distance from `p` to the segment `[a, b]`.
pub fn segment_distance_sq(p: &Point, a: &Point, b: &Point) -> Rational {
    let d = b.sub(a);
    let len = d.dot(&d);
    if len.is_zero() {
        let e = p.sub(a);
        return e.dot(&e);
    }
    let s = p.sub(a).dot(&d) / &len;
    let s = s.max(Rational::zero()).min(Rational::one());
    let e = p.sub(&a.add(&d.scale(&s)));
    e.dot(&e)
}

/// Chebyshev (max-norm) distance from `p` to the segment `[a, b]`.
///
/// The objective `max(|Δx(s)|, |Δy(s)|)` is piecewise linear in the segment
/// parameter, so its minimum sits at an endpoint, a zero of one coordinate,
/// or a crossing of the two absolute values.
pub fn segment_distance_inf(p: &Point, a: &Point, b: &Point) -> Rational {
    let d = b.sub(a);
    let e = a.sub(p);
    let at = |s: &Rational| -> Rational {
        let dx = (&e.x + &d.x * s).abs();
        let dy = (&e.y + &d.y * s).abs();
        dx.max(dy)
    };
    let mut candidates = vec![Rational::zero(), Rational::one()];
    let mut root = |num: Rational, den: Rational| {
        if !den.is_zero() {
            candidates.push(num / den);
        }
    };
    root(-e.x.clone(), d.x.clone());
    root(-e.y.clone(), d.y.clone());
    root(&e.y - &e.x, &d.x - &d.y);
    root(-(&e.x + &e.y), &d.x + &d.y);
    candidates
        .iter()
        .filter(|s| !s.is_negative() && *s <= &Rational::one())
        .map(at)
        .min()
        .expect("endpoints are always candidates")
}

/// A convex polygon of achievable `(λ, q)` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct MomentPolygon {
    vertices: Vec<Point>,
}

impl MomentPolygon {
    pub fn empty() -> Self {
        MomentPolygon::default()
    }

    pub fn point(p: Point) -> Self {
        MomentPolygon { vertices: vec![p] }
    }

    /// Convex hull of arbitrary points.
    pub fn hull(points: impl IntoIterator<Item = Point>) -> Self {
        MomentPolygon {
            vertices: convex_hull(points),
        }
    }

    /// Hull of a union of polygons.
    pub fn hull_of_union<'a>(polys: impl IntoIterator<Item = &'a MomentPolygon>) -> Self {
        Self::hull(polys.into_iter().flat_map(|p| p.vertices.iter().cloned()))
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// `α·P`. Scaling by zero yields the origin.
    pub fn scale(&self, alpha: &Rational) -> Self {
        assert!(!alpha.is_negative(), "negative polygon scale");
        if alpha.is_zero() {
            return MomentPolygon::point(Point::origin());
        }
        MomentPolygon {
            vertices: self.vertices.iter().map(|v| v.scale(alpha)).collect(),
        }
    }

    pub fn translate(&self, by: &Point) -> Self {
        MomentPolygon {
            vertices: self.vertices.iter().map(|v| v.add(by)).collect(),
        }
    }

    fn edges(&self) -> Vec<Point> {
        let n = self.vertices.len();
        if n < 2 {
            return Vec::new();
        }
        (0..n)
            .map(|i| self.vertices[(i + 1) % n].sub(&self.vertices[i]))
            .collect()
    }

    /// Minkowski sum by merging edge sequences in angular order.
    pub fn minkowski(&self, other: &MomentPolygon) -> Self {
        if self.is_empty() || other.is_empty() {
            return MomentPolygon::empty();
        }
        let ea = self.edges();
        let eb = other.edges();
        let mut cur = self.vertices[0].add(&other.vertices[0]);
        let mut out = vec![cur.clone()];
        let (mut i, mut j) = (0, 0);
        while i < ea.len() || j < eb.len() {
            let step = if i == ea.len() {
                j += 1;
                eb[j - 1].clone()
            } else if j == eb.len() {
                i += 1;
                ea[i - 1].clone()
            } else {
                match direction_cmp(&ea[i], &eb[j]) {
                    Ordering::Less => {
                        i += 1;
                        ea[i - 1].clone()
                    }
                    Ordering::Greater => {
                        j += 1;
                        eb[j - 1].clone()
                    }
                    Ordering::Equal => {
                        i += 1;
                        j += 1;
                        ea[i - 1].add(&eb[j - 1])
                    }
                }
            };
            cur = cur.add(&step);
            out.push(cur.clone());
        }
        if out.len() > 1 {
            // the walk closes on its starting vertex
            out.pop();
        }
        MomentPolygon {
            vertices: strip_collinear(out),
        }
    }

    /// Whether `p` lies in the closed polygon.
    pub fn contains(&self, p: &Point) -> bool {
        match self.vertices.len() {
            0 => false,
            1 => self.vertices[0] == *p,
            2 => segment_distance_sq(p, &self.vertices[0], &self.vertices[1]).is_zero(),
            n => (0..n).all(|i| !cross(&self.vertices[i], &self.vertices[(i + 1) % n], p).is_negative()),
        }
    }

    /// Squared Euclidean distance from `p` to the polygon.
    pub fn distance_sq(&self, p: &Point) -> Rational {
        assert!(!self.is_empty(), "distance to an empty polygon");
        if self.contains(p) {
            return Rational::zero();
        }
        self.boundary_min(|a, b| segment_distance_sq(p, a, b))
    }

    /// Chebyshev distance from `p` to the polygon.
    pub fn distance_inf(&self, p: &Point) -> Rational {
        assert!(!self.is_empty(), "distance to an empty polygon");
        if self.contains(p) {
            return Rational::zero();
        }
        self.boundary_min(|a, b| segment_distance_inf(p, a, b))
    }

    fn boundary_min(&self, f: impl Fn(&Point, &Point) -> Rational) -> Rational {
        let n = self.vertices.len();
        if n == 1 {
            return f(&self.vertices[0], &self.vertices[0]);
        }
        (0..n)
            .map(|i| f(&self.vertices[i], &self.vertices[(i + 1) % n]))
            .min()
            .unwrap()
    }

    /// Vertices of the lower boundary, left to right.
    pub fn lower_chain(&self) -> Vec<Point> {
        let n = self.vertices.len();
        if n == 0 {
            return Vec::new();
        }
        let right = self.rightmost_lowest();
        self.vertices[..=right].to_vec()
    }

    /// Vertices of the upper boundary, right to left.
    pub fn upper_chain(&self) -> Vec<Point> {
        let n = self.vertices.len();
        if n == 0 {
            return Vec::new();
        }
        let mut out = self.vertices[self.rightmost_top()..].to_vec();
        out.push(self.vertices[0].clone());
        out
    }

    // Canonical order walks the lower chain first, so the rightmost vertices
    // are contiguous: the lowest of them closes the lower chain.
    fn rightmost_lowest(&self) -> usize {
        let max_x = self.vertices.iter().map(|v| &v.x).max().unwrap();
        (0..self.vertices.len())
            .find(|&i| &self.vertices[i].x == max_x)
            .unwrap()
    }

    fn rightmost_top(&self) -> usize {
        let max_x = self.vertices.iter().map(|v| &v.x).max().unwrap();
        (0..self.vertices.len())
            .rev()
            .find(|&i| &self.vertices[i].x == max_x)
            .unwrap()
    }

    /// Inner approximation: greedily drops vertices while every original
    /// vertex stays within `eps` (Euclidean) of the kept polygon.
    pub fn prune(&self, eps: &Rational) -> Self {
        let n = self.vertices.len();
        if n <= 2 || !eps.is_positive() {
            return self.clone();
        }
        let budget = eps * eps;
        let mut kept = vec![true; n];
        let mut count = n;
        for i in 0..n {
            if count <= 1 {
                break;
            }
            let prev = (1..n).map(|k| (i + n - k) % n).find(|&k| kept[k]).unwrap();
            let next = (1..n).map(|k| (i + k) % n).find(|&k| kept[k]).unwrap();
            let (a, b) = (&self.vertices[prev], &self.vertices[next]);
            // every original vertex strictly between prev and next
            let mut k = (prev + 1) % n;
            let mut ok = true;
            while k != next {
                if segment_distance_sq(&self.vertices[k], a, b) > budget {
                    ok = false;
                    break;
                }
                k = (k + 1) % n;
            }
            if ok {
                kept[i] = false;
                count -= 1;
            }
        }
        Self::hull(
            self.vertices
                .iter()
                .zip(&kept)
                .filter(|(_, &k)| k)
                .map(|(v, _)| v.clone()),
        )
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("polygon serializes")
    }

    pub fn float_vertices(&self) -> Vec<(f64, f64)> {
        self.vertices.iter().map(|v| (to_f64(&v.x), to_f64(&v.y))).collect()
    }
}

fn strip_collinear(pts: Vec<Point>) -> Vec<Point> {
    if pts.len() <= 2 {
        let mut pts = pts;
        pts.dedup();
        if pts.len() == 2 && pts[0] == pts[1] {
            pts.pop();
        }
        return pts;
    }
    let n = pts.len();
    let keep: Vec<bool> = (0..n)
        .map(|i| {
            let (a, b, c) = (&pts[(i + n - 1) % n], &pts[i], &pts[(i + 1) % n]);
            !cross(a, b, c).is_zero() || (a == c && a != b)
        })
        .collect();
    let out: Vec<Point> = pts
        .into_iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|(p, _)| p)
        .collect();
    if out.len() < 3 {
        // fully collinear input: keep the extremes
        return convex_hull(out);
    }
    out
}

/// Squared Euclidean Hausdorff distance between two polygons. For convex
/// sets the farthest point of either set from the other is a vertex.
pub fn hausdorff_sq(a: &MomentPolygon, b: &MomentPolygon) -> Rational {
    let ab = a.vertices.iter().map(|p| b.distance_sq(p)).max();
    let ba = b.vertices.iter().map(|p| a.distance_sq(p)).max();
    ab.into_iter().chain(ba).max().unwrap_or_else(Rational::zero)
}

/// Hausdorff distance in the max norm.
pub fn hausdorff_inf(a: &MomentPolygon, b: &MomentPolygon) -> Rational {
    let ab = a.vertices.iter().map(|p| b.distance_inf(p)).max();
    let ba = b.vertices.iter().map(|p| a.distance_inf(p)).max();
    ab.into_iter().chain(ba).max().unwrap_or_else(Rational::zero)
}

#[derive(Serialize, Deserialize)]
struct PolygonDoc {
    vertices: Vec<(Json, Json)>,
}

impl Serialize for MomentPolygon {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PolygonDoc {
            vertices: self
                .vertices
                .iter()
                .map(|v| (Json(v.x.clone()), Json(v.y.clone())))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MomentPolygon {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let doc = PolygonDoc::deserialize(d)?;
        Ok(MomentPolygon::hull(
            doc.vertices.into_iter().map(|(x, y)| Point::new(x.0, y.0)),
        ))
    }
}

impl fmt::Display for MomentPolygon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use proptest::prelude::*;

    fn p(x: i64, y: i64) -> Point {
        Point::new(int(x), int(y))
    }

    fn poly(pts: &[(i64, i64)]) -> MomentPolygon {
        MomentPolygon::hull(pts.iter().map(|&(x, y)| p(x, y)))
    }

    #[test]
    fn hull_is_canonical() {
        let h = poly(&[(1, 1), (0, 0), (2, 0), (0, 2), (2, 2), (1, 0)]);
        assert_eq!(h.vertices(), &[p(0, 0), p(2, 0), p(2, 2), p(0, 2)]);
        let seg = poly(&[(0, 0), (1, 2), (2, 4)]);
        assert_eq!(seg.vertices(), &[p(0, 0), p(2, 4)]);
        assert_eq!(poly(&[(3, 3), (3, 3)]).vertices(), &[p(3, 3)]);
    }

    #[test]
    fn minkowski_of_degenerate_shapes() {
        let a = poly(&[(0, 0)]);
        let b = poly(&[(1, 2), (3, 1)]);
        assert_eq!(a.minkowski(&b), b);
        let c = poly(&[(0, 0), (0, 1)]);
        assert_eq!(b.minkowski(&c), poly(&[(1, 2), (3, 1), (1, 3), (3, 2)]));
        let parallel = poly(&[(0, 0), (2, 4)]);
        assert_eq!(
            poly(&[(0, 0), (1, 2)]).minkowski(&parallel),
            poly(&[(0, 0), (3, 6)])
        );
    }

    #[test]
    fn weighted_sum_of_singletons() {
        let half = rat(1, 2);
        let a = MomentPolygon::point(p(0, 0)).scale(&half);
        let b = MomentPolygon::point(p(2, 4)).scale(&half);
        assert_eq!(a.minkowski(&b).vertices(), &[p(1, 2)]);
        assert_eq!(b.scale(&int(0)).vertices(), &[p(0, 0)]);
    }

    #[test]
    fn distances() {
        let sq = poly(&[(0, 0), (2, 0), (2, 2), (0, 2)]);
        assert_eq!(sq.distance_sq(&p(1, 1)), int(0));
        assert_eq!(sq.distance_sq(&p(5, 6)), int(25));
        assert_eq!(sq.distance_inf(&p(5, 6)), int(4));
        assert_eq!(sq.distance_sq(&p(1, -3)), int(9));
        let seg = poly(&[(0, 0), (2, 2)]);
        assert_eq!(seg.distance_sq(&p(2, 0)), int(2));
        assert_eq!(seg.distance_inf(&p(2, 0)), int(1));
        assert_eq!(hausdorff_sq(&sq, &seg), int(2));
        assert_eq!(hausdorff_inf(&sq, &seg), int(1));
    }

    #[test]
    fn chains() {
        let h = poly(&[(0, 1), (1, 0), (3, 0), (3, 2), (1, 3)]);
        assert_eq!(h.lower_chain(), vec![p(0, 1), p(1, 0), p(3, 0)]);
        assert_eq!(h.upper_chain(), vec![p(3, 2), p(1, 3), p(0, 1)]);
        let pt = poly(&[(1, 1)]);
        assert_eq!(pt.lower_chain(), vec![p(1, 1)]);
    }

    #[test]
    fn pruning_keeps_far_vertices() {
        let h = poly(&[(0, 0), (10, 0), (10, 10), (0, 10), (5, -1)]);
        let pruned = h.prune(&int(2));
        assert_eq!(pruned, poly(&[(0, 0), (10, 0), (10, 10), (0, 10)]));
        assert_eq!(h.prune(&rat(1, 2)), h);
    }

    #[test]
    fn json_round_trip() {
        let h = MomentPolygon::hull([Point::new(rat(-3, 2), rat(9, 4)), p(0, 0), p(1, 2)]);
        let text = serde_json::to_string(&h).unwrap();
        assert_eq!(text, r#"{"vertices":[[[-3,2],[9,4]],[[0,1],[0,1]],[[1,1],[2,1]]]}"#);
        let back: MomentPolygon = serde_json::from_str(&text).unwrap();
        assert_eq!(back, h);
    }

    fn arb_points(max: usize) -> impl Strategy<Value = Vec<Point>> {
        prop::collection::vec((-6i64..6, -6i64..6, 1i64..4), 1..max)
            .prop_map(|v| v.into_iter().map(|(x, y, d)| Point::new(rat(x, d), rat(y, d))).collect())
    }

    proptest! {
        #[test]
        fn minkowski_matches_pairwise_hull(a in arb_points(7), b in arb_points(7)) {
            let pa = MomentPolygon::hull(a);
            let pb = MomentPolygon::hull(b);
            let brute = MomentPolygon::hull(
                pa.vertices().iter().flat_map(|u| pb.vertices().iter().map(move |v| u.add(v))),
            );
            let merged = pa.minkowski(&pb);
            prop_assert!(merged.len() <= pa.len() + pb.len());
            prop_assert_eq!(merged, brute);
        }

        #[test]
        fn hull_contains_inputs(pts in arb_points(12)) {
            let h = MomentPolygon::hull(pts.clone());
            for q in &pts {
                prop_assert!(h.contains(q));
                prop_assert_eq!(h.distance_sq(q), int(0));
            }
            prop_assert_eq!(MomentPolygon::hull(h.vertices().to_vec()), h);
        }

        #[test]
        fn pruning_is_an_inner_approximation(pts in arb_points(20), k in 1i64..8) {
            let h = MomentPolygon::hull(pts);
            let eps = rat(k, 4);
            let pruned = h.prune(&eps);
            prop_assert!(pruned.len() <= h.len());
            for v in pruned.vertices() {
                prop_assert!(h.vertices().contains(v));
            }
            prop_assert!(hausdorff_sq(&h, &pruned) <= &eps * &eps);
        }

        #[test]
        fn chebyshev_never_exceeds_euclidean(pts in arb_points(6), x in -8i64..8, y in -8i64..8) {
            let h = MomentPolygon::hull(pts);
            let q = p(x, y);
            let inf = h.distance_inf(&q);
            let sq = h.distance_sq(&q);
            prop_assert!(&inf * &inf <= sq);
            prop_assert!(&inf * &inf * int(2) >= sq);
        }
    }
}
