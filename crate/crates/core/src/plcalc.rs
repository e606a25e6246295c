//! Exact piecewise-linear functions on `[0, ∞)`.
//!
//! A [`PLFunction`] is a continuous, strictly increasing function given by its
//! breakpoints and the slope of the unbounded last piece. Values are always
//! kept in canonical form (collinear breakpoints merged), so structural
//! equality is equality of functions.

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{from_pair, to_pair, Q};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PLFunction {
    points: Vec<(Q, Q)>,
    final_slope: Q,
}

impl PLFunction {
    /// Validates and canonicalizes. Repeated abscissae with equal values are
    /// dropped; any other repetition is a discontinuity and is rejected.
    pub fn new(points: Vec<(Q, Q)>, final_slope: Q) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Validation("a PL function needs at least one breakpoint".into()));
        }
        if !points[0].0.is_zero() {
            return Err(Error::Validation(format!(
                "first breakpoint must sit at x = 0, got x = {}",
                points[0].0
            )));
        }
        if points[0].1.is_negative() {
            return Err(Error::Validation("value at 0 must be nonnegative".into()));
        }
        if !final_slope.is_positive() {
            return Err(Error::Validation(format!("final slope must be positive, got {final_slope}")));
        }
        let mut deduped: Vec<(Q, Q)> = Vec::with_capacity(points.len());
        for (x, y) in points {
            if let Some((px, py)) = deduped.last() {
                match x.cmp(px) {
                    Ordering::Less => {
                        return Err(Error::Validation("breakpoint abscissae must increase".into()))
                    }
                    Ordering::Equal => {
                        if &y != py {
                            return Err(Error::Validation(format!("discontinuity at x = {x}")));
                        }
                        continue;
                    }
                    Ordering::Greater => {
                        if y <= *py {
                            return Err(Error::Validation(format!(
                                "function must be strictly increasing (segment ending at x = {x})"
                            )));
                        }
                    }
                }
            }
            deduped.push((x, y));
        }
        let mut f = PLFunction { points: deduped, final_slope };
        f.merge_collinear();
        Ok(f)
    }

    pub fn identity() -> Self {
        Self::linear(Q::one())
    }

    /// `x ↦ slope · x`.
    pub fn linear(slope: Q) -> Self {
        PLFunction::new(vec![(Q::zero(), Q::zero())], slope).expect("positive slope")
    }

    fn merge_collinear(&mut self) {
        if self.points.len() < 2 {
            return;
        }
        let mut out: Vec<(Q, Q)> = vec![self.points[0].clone()];
        for i in 1..self.points.len() {
            let before = seg_slope(out.last().unwrap(), &self.points[i]);
            let after = if i + 1 < self.points.len() {
                seg_slope(&self.points[i], &self.points[i + 1])
            } else {
                self.final_slope.clone()
            };
            if before != after {
                out.push(self.points[i].clone());
            }
        }
        self.points = out;
    }

    /// Returns the canonical form. Values are canonical on construction, so
    /// this is a clone; it exists for callers that want to be explicit.
    pub fn canonicalize(&self) -> Self {
        self.clone()
    }

    pub fn equals(&self, other: &PLFunction) -> bool {
        self == other
    }

    pub fn breakpoints(&self) -> &[(Q, Q)] {
        &self.points
    }

    pub fn final_slope(&self) -> &Q {
        &self.final_slope
    }

    pub fn value_at_zero(&self) -> &Q {
        &self.points[0].1
    }

    /// Slopes of all pieces, the unbounded one last.
    pub fn slopes(&self) -> Vec<Q> {
        let mut s: Vec<Q> = self.points.windows(2).map(|w| seg_slope(&w[0], &w[1])).collect();
        s.push(self.final_slope.clone());
        s
    }

    /// Index of the last breakpoint with abscissa `<= x`.
    fn segment_of(&self, x: &Q) -> usize {
        self.points.partition_point(|(px, _)| px <= x) - 1
    }

    pub fn evaluate(&self, x: &Q) -> Result<Q> {
        if x.is_negative() {
            return Err(Error::Domain(format!("PL functions live on [0, ∞), got x = {x}")));
        }
        Ok(self.eval_nonneg(x))
    }

    fn eval_nonneg(&self, x: &Q) -> Q {
        let i = self.segment_of(x);
        let (px, py) = &self.points[i];
        let slope = self.slope_of_piece(i);
        py + (x - px) * slope
    }

    fn slope_of_piece(&self, i: usize) -> Q {
        if i + 1 < self.points.len() {
            seg_slope(&self.points[i], &self.points[i + 1])
        } else {
            self.final_slope.clone()
        }
    }

    /// Slope of the piece immediately to the right of `x`.
    pub fn slope_after(&self, x: &Q) -> Q {
        let x = if x.is_negative() { Q::zero() } else { x.clone() };
        self.slope_of_piece(self.segment_of(&x))
    }

    /// The unique `x >= 0` with `f(x) = y`, if `y >= f(0)`.
    pub fn preimage(&self, y: &Q) -> Option<Q> {
        if y < &self.points[0].1 {
            return None;
        }
        let i = self.points.partition_point(|(_, py)| py <= y) - 1;
        let (px, py) = &self.points[i];
        Some(px + (y - py) / self.slope_of_piece(i))
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &PLFunction) -> PLFunction {
        let mut xs: Vec<Q> = inner.points.iter().map(|(x, _)| x.clone()).collect();
        xs.extend(self.points.iter().filter_map(|(x, _)| inner.preimage(x)));
        xs.sort();
        xs.dedup();
        let last_inner = inner.eval_nonneg(xs.last().unwrap());
        let final_slope = &inner.final_slope * self.slope_after(&last_inner);
        let points = xs
            .into_iter()
            .map(|x| {
                let y = self.eval_nonneg(&inner.eval_nonneg(&x));
                (x, y)
            })
            .collect();
        PLFunction::new(points, final_slope).expect("composition of increasing PL functions")
    }

    pub fn inverse(&self) -> Result<PLFunction> {
        if !self.points[0].1.is_zero() {
            return Err(Error::Precondition(format!(
                "inverse needs f(0) = 0, got f(0) = {}",
                self.points[0].1
            )));
        }
        let points = self.points.iter().map(|(x, y)| (y.clone(), x.clone())).collect();
        PLFunction::new(points, self.final_slope.recip())
    }

    /// `x ↦ f(e·x)`.
    pub fn precompose_scale(&self, e: i64) -> Result<PLFunction> {
        if e <= 0 {
            return Err(Error::Argument(format!("scale factor must be a positive integer, got {e}")));
        }
        let e = Q::from_integer(e.into());
        let points = self.points.iter().map(|(x, y)| (x / &e, y.clone())).collect();
        PLFunction::new(points, &self.final_slope * e)
    }

    /// Slopes are nonincreasing.
    pub fn is_concave(&self) -> bool {
        self.slopes().windows(2).all(|w| w[0] >= w[1])
    }

    /// True iff `self(x) >= other(x)` for every `x >= 0`.
    pub fn dominates(&self, other: &PLFunction) -> bool {
        let mut xs: Vec<&Q> = self.points.iter().chain(other.points.iter()).map(|(x, _)| x).collect();
        xs.sort();
        xs.dedup();
        xs.iter().all(|x| self.eval_nonneg(x) >= other.eval_nonneg(x))
            && self.slope_after(xs.last().unwrap()) >= other.slope_after(xs.last().unwrap())
    }
}

fn seg_slope(a: &(Q, Q), b: &(Q, Q)) -> Q {
    (&b.1 - &a.1) / (&b.0 - &a.0)
}

/// Pointwise maximum. Breakpoints are the union of the inputs' breakpoints
/// and every pairwise crossing.
pub fn pointwise_max(fs: &[PLFunction]) -> Result<PLFunction> {
    let first = fs
        .first()
        .ok_or_else(|| Error::Argument("pointwise_max of an empty list".into()))?;
    let mut distinct: Vec<&PLFunction> = Vec::with_capacity(fs.len());
    for f in fs {
        if !distinct.contains(&f) {
            distinct.push(f);
        }
    }
    // folding pairwise keeps the crossing search linear in the number of inputs
    let mut acc = first.clone();
    for f in &distinct[1..] {
        acc = if acc.dominates(f) {
            acc
        } else if f.dominates(&acc) {
            (*f).clone()
        } else {
            max_of(&[acc, (*f).clone()])?
        };
    }
    Ok(acc)
}

fn max_of(fs: &[PLFunction]) -> Result<PLFunction> {
    let mut xs: Vec<Q> = fs.iter().flat_map(|f| f.points.iter().map(|(x, _)| x.clone())).collect();
    xs.sort();
    xs.dedup();

    let mut crossings = Vec::new();
    for (k, a) in xs.iter().enumerate() {
        let vals: Vec<Q> = fs.iter().map(|f| f.eval_nonneg(a)).collect();
        match xs.get(k + 1) {
            Some(b) => {
                let next: Vec<Q> = fs.iter().map(|f| f.eval_nonneg(b)).collect();
                for i in 0..fs.len() {
                    for j in i + 1..fs.len() {
                        let da = &vals[i] - &vals[j];
                        let db = &next[i] - &next[j];
                        if (da.is_positive() && db.is_negative()) || (da.is_negative() && db.is_positive()) {
                            crossings.push(a + &da / (&da - &db) * (b - a));
                        }
                    }
                }
            }
            None => {
                let slopes: Vec<Q> = fs.iter().map(|f| f.slope_after(a)).collect();
                for i in 0..fs.len() {
                    for j in i + 1..fs.len() {
                        let da = &vals[i] - &vals[j];
                        let ds = &slopes[i] - &slopes[j];
                        if (da.is_positive() && ds.is_negative()) || (da.is_negative() && ds.is_positive()) {
                            crossings.push(a - &da / &ds);
                        }
                    }
                }
            }
        }
    }
    xs.extend(crossings);
    xs.sort();
    xs.dedup();

    let last = xs.last().unwrap().clone();
    let top = fs.iter().map(|f| f.eval_nonneg(&last)).max().unwrap();
    let final_slope = fs
        .iter()
        .filter(|f| f.eval_nonneg(&last) == top)
        .map(|f| f.slope_after(&last))
        .max()
        .unwrap();
    let points = xs
        .into_iter()
        .map(|x| {
            let y = fs.iter().map(|f| f.eval_nonneg(&x)).max().unwrap();
            (x, y)
        })
        .collect();
    PLFunction::new(points, final_slope)
}

#[derive(Serialize, Deserialize)]
struct PlJson {
    breakpoints: Vec<[i64; 4]>,
    final_slope: [i64; 2],
}

impl PLFunction {
    /// `{"breakpoints": [[x_num, x_den, y_num, y_den], ...], "final_slope": [num, den]}`.
    pub fn to_json(&self) -> Result<serde_json::Value> {
        let mut bps = Vec::with_capacity(self.points.len());
        for (x, y) in &self.points {
            let (xn, xd) = to_pair(x)?;
            let (yn, yd) = to_pair(y)?;
            bps.push([xn, xd, yn, yd]);
        }
        let (sn, sd) = to_pair(&self.final_slope)?;
        Ok(serde_json::to_value(PlJson { breakpoints: bps, final_slope: [sn, sd] }).expect("plain data"))
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let raw: PlJson = serde_json::from_value(v.clone())
            .map_err(|e| Error::Validation(format!("bad PL function JSON: {e}")))?;
        let mut points = Vec::with_capacity(raw.breakpoints.len());
        for [xn, xd, yn, yd] in raw.breakpoints {
            points.push((from_pair(xn, xd)?, from_pair(yn, yd)?));
        }
        PLFunction::new(points, from_pair(raw.final_slope[0], raw.final_slope[1])?)
    }
}

impl Serialize for PLFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().map_err(serde::ser::Error::custom)?.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PLFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        PLFunction::from_json(&v).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};
    use proptest::prelude::*;

    fn pl(points: &[(i64, i64, i64, i64)], s: (i64, i64)) -> PLFunction {
        PLFunction::new(points.iter().map(|&(a, b, c, d)| (q(a, b), q(c, d))).collect(), q(s.0, s.1)).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(PLFunction::identity().evaluate(&q(7, 3)).unwrap(), q(7, 3));
        let f = pl(&[(0, 1, 0, 1), (1, 1, 1, 1)], (1, 2));
        assert_eq!(f.evaluate(&qi(2)).unwrap(), q(3, 2));
        assert_eq!(PLFunction::linear(q(1, 2)).evaluate(&qi(0)).unwrap(), qi(0));
        assert!(matches!(f.evaluate(&q(-1, 2)), Err(Error::Domain(_))));
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(PLFunction::new(vec![(qi(1), qi(0))], qi(1)).is_err());
        assert!(PLFunction::new(vec![(qi(0), qi(0))], qi(0)).is_err());
        assert!(PLFunction::new(vec![(qi(0), qi(1)), (qi(1), qi(1))], qi(1)).is_err());
        assert!(PLFunction::new(vec![(qi(0), qi(0)), (qi(1), qi(1)), (qi(1), qi(2))], qi(1)).is_err());
        assert!(PLFunction::new(vec![(qi(0), qi(0)), (qi(2), qi(1)), (qi(1), qi(2))], qi(1)).is_err());
    }

    #[test]
    fn collinear_midpoint_is_dropped() {
        let f = pl(&[(0, 1, 0, 1), (1, 1, 1, 1), (2, 1, 2, 1)], (1, 2));
        let g = pl(&[(0, 1, 0, 1), (2, 1, 2, 1)], (1, 2));
        assert_eq!(f, g);
        assert_eq!(f.breakpoints().len(), 2);
        assert_ne!(PLFunction::identity(), PLFunction::linear(qi(2)));
        // repeated identical breakpoint is a zero-length segment
        let h = PLFunction::new(vec![(qi(0), qi(0)), (qi(0), qi(0))], qi(1)).unwrap();
        assert_eq!(h, PLFunction::identity());
    }

    #[test]
    fn compose_examples() {
        let f = pl(&[(0, 1, 0, 1), (1, 1, 1, 1)], (1, 2));
        let g = pl(&[(0, 1, 0, 1), (1, 1, 1, 1)], (1, 3));
        assert_eq!(PLFunction::identity().compose(&f), f);
        let fg = f.compose(&g);
        // g(x) = 1 + (x-1)/3 reaches 1 at x = 1; past that f has slope 1/2.
        assert_eq!(fg.final_slope(), &q(1, 6));
        assert_eq!(fg.breakpoints(), &[(qi(0), qi(0)), (qi(1), qi(1))]);
        assert_eq!(f.compose(&f.inverse().unwrap()), PLFunction::identity());
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(PLFunction::identity().inverse().unwrap(), PLFunction::identity());
        assert_eq!(PLFunction::linear(q(1, 2)).inverse().unwrap(), PLFunction::linear(qi(2)));
        let shifted = pl(&[(0, 1, 1, 1)], (1, 1));
        assert!(matches!(shifted.inverse(), Err(Error::Precondition(_))));
    }

    #[test]
    fn max_examples() {
        let f = pl(&[(0, 1, 0, 1), (1, 1, 1, 1)], (1, 2));
        assert_eq!(pointwise_max(std::slice::from_ref(&f)).unwrap(), f);
        assert_eq!(
            pointwise_max(&[PLFunction::identity(), PLFunction::linear(qi(2))]).unwrap(),
            PLFunction::linear(qi(2))
        );
        assert!(pointwise_max(&[]).is_err());
        // x/3 + 1 style crossing: f(x) = 2x on [0,1], then slope 1/4; g(x) = x.
        // f = 2 at 1, f(x) = 2 + (x-1)/4 meets x at 2 + (x-1)/4 = x  => x = 7/3.
        let f = pl(&[(0, 1, 0, 1), (1, 1, 2, 1)], (1, 4));
        let m = pointwise_max(&[f.clone(), PLFunction::identity()]).unwrap();
        assert!(m.breakpoints().iter().any(|(x, _)| *x == q(7, 3)));
        assert_eq!(m.final_slope(), &qi(1));
        assert_eq!(m.evaluate(&qi(1)).unwrap(), qi(2));
        assert_eq!(m.evaluate(&qi(5)).unwrap(), qi(5));
    }

    #[test]
    fn crossing_inside_segment() {
        // f: slope 3 then 1/3; g: slope 2 up to x = 4 then 1/2
        let f = pl(&[(0, 1, 0, 1), (1, 1, 3, 1)], (1, 3));
        let g = pl(&[(0, 1, 0, 1), (4, 1, 8, 1)], (1, 2));
        let m = pointwise_max(&[f.clone(), g.clone()]).unwrap();
        for k in 0..40 {
            let x = q(k, 4);
            let want = std::cmp::max(f.evaluate(&x).unwrap(), g.evaluate(&x).unwrap());
            assert_eq!(m.evaluate(&x).unwrap(), want, "x = {x}");
        }
        // 3 + (x-1)/3 = 2x at x = 8/5, strictly between breakpoints 1 and 4
        assert!(m.breakpoints().iter().any(|(x, _)| *x == q(8, 5)));
    }

    #[test]
    fn precompose_scale_examples() {
        let f = pl(&[(0, 1, 0, 1), (2, 1, 2, 1)], (1, 2));
        assert_eq!(f.precompose_scale(1).unwrap(), f);
        assert_eq!(PLFunction::linear(q(1, 3)).precompose_scale(3).unwrap(), PLFunction::identity());
        let g = f.precompose_scale(2).unwrap();
        assert_eq!(g.breakpoints()[1].0, qi(1));
        assert!(f.precompose_scale(0).is_err());
        assert!(f.precompose_scale(-2).is_err());
    }

    #[test]
    fn json_roundtrip_and_schema() {
        let f = pl(&[(0, 1, 0, 1), (1, 1, 1, 1)], (1, 2));
        let v = f.to_json().unwrap();
        assert_eq!(v.to_string(), r#"{"breakpoints":[[0,1,0,1],[1,1,1,1]],"final_slope":[1,2]}"#);
        assert_eq!(PLFunction::from_json(&v).unwrap(), f);
    }

    pub(crate) fn arb_pl() -> impl Strategy<Value = PLFunction> {
        (
            prop::collection::vec((1i64..6, 1i64..4, 1i64..6, 1i64..4), 0..5),
            (1i64..5, 1i64..5),
        )
            .prop_map(|(segs, (sn, sd))| {
                let mut pts = vec![(qi(0), qi(0))];
                for (dxn, dxd, sln, sld) in segs {
                    let (x, y) = pts.last().unwrap().clone();
                    let dx = q(dxn, dxd);
                    let y2 = &y + &dx * q(sln, sld);
                    pts.push((x + dx, y2));
                }
                PLFunction::new(pts, q(sn, sd)).unwrap()
            })
    }

    proptest! {
        #[test]
        fn strictly_monotone(f in arb_pl(), a in 0i64..50, b in 1i64..50) {
            let x1 = q(a, 3);
            let x2 = &x1 + q(b, 7);
            prop_assert!(f.evaluate(&x1).unwrap() < f.evaluate(&x2).unwrap());
        }

        #[test]
        fn inverse_is_involutive(f in arb_pl()) {
            let g = f.inverse().unwrap();
            prop_assert_eq!(g.inverse().unwrap(), f.clone());
            prop_assert_eq!(f.compose(&g), PLFunction::identity());
            prop_assert_eq!(g.compose(&f), PLFunction::identity());
        }

        #[test]
        fn compose_is_associative(f in arb_pl(), g in arb_pl(), h in arb_pl()) {
            prop_assert_eq!(f.compose(&g.compose(&h)), f.compose(&g).compose(&h));
        }

        #[test]
        fn compose_matches_pointwise(f in arb_pl(), g in arb_pl(), a in 0i64..60) {
            let x = q(a, 5);
            let fg = f.compose(&g);
            prop_assert_eq!(fg.evaluate(&x).unwrap(), f.evaluate(&g.evaluate(&x).unwrap()).unwrap());
        }

        #[test]
        fn max_laws(f in arb_pl(), g in arb_pl(), h in arb_pl(), a in 0i64..80) {
            let fg = pointwise_max(&[f.clone(), g.clone()]).unwrap();
            prop_assert_eq!(&fg, &pointwise_max(&[g.clone(), f.clone()]).unwrap());
            prop_assert_eq!(pointwise_max(&[f.clone(), f.clone()]).unwrap(), f.clone());
            let left = pointwise_max(&[fg.clone(), h.clone()]).unwrap();
            let right = pointwise_max(&[f.clone(), pointwise_max(&[g.clone(), h.clone()]).unwrap()]).unwrap();
            prop_assert_eq!(&left, &right);
            let x = q(a, 6);
            let want = std::cmp::max(f.evaluate(&x).unwrap(), g.evaluate(&x).unwrap());
            prop_assert_eq!(fg.evaluate(&x).unwrap(), want);
            prop_assert!(fg.dominates(&f) && fg.dominates(&g));
        }

        #[test]
        fn json_roundtrip(f in arb_pl()) {
            let v = f.to_json().unwrap();
            prop_assert_eq!(PLFunction::from_json(&v).unwrap(), f);
        }
    }
}
