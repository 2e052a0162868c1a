//! Arithmetic on circles `R/LZ` and finite unions of open intervals.
//!
//! Every interval stored here is open. Endpoints never belong to a set, so two
//! intervals that merely touch stay separate: `(0, 0.5) ∪ (0.5, 1)` is the unit
//! interval with its midpoint removed, not the unit interval.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Representatives within this fraction of the period below `L` snap to 0.
const SNAP_FRACTION: f64 = 1e-15;

/// Fragments shorter than this are dropped during normalization.
const MIN_LENGTH: f64 = 1e-15;

/// A point of `R/LZ`, stored by its representative in `[0, L)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleValue {
    representative: f64,
    period: f64,
}

/// Reduces `x` modulo `period`.
pub fn reduce(x: f64, period: f64) -> Result<CircleValue> {
    if !(period.is_finite() && period > 0.0) {
        return Err(Error::InvalidPeriod(period));
    }
    if !x.is_finite() {
        return Err(Error::InvalidArgument(format!("cannot reduce {x}")));
    }
    Ok(CircleValue {
        representative: reduce_unchecked(x, period),
        period,
    })
}

#[inline]
pub(crate) fn reduce_unchecked(x: f64, period: f64) -> f64 {
    let mut rep = x - period * (x / period).floor();
    if rep >= period * (1.0 - SNAP_FRACTION) || rep < 0.0 {
        rep = 0.0;
    }
    rep
}

impl CircleValue {
    pub fn representative(&self) -> f64 {
        self.representative
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Sum on the circle. Both values must live on the same circle.
    pub fn add(&self, other: &CircleValue) -> Result<CircleValue> {
        self.same_circle(other)?;
        reduce(self.representative + other.representative, self.period)
    }

    pub fn neg(&self) -> CircleValue {
        CircleValue {
            representative: reduce_unchecked(-self.representative, self.period),
            period: self.period,
        }
    }

    /// Length of the shorter arc between the two points.
    pub fn distance(&self, other: &CircleValue) -> Result<f64> {
        self.same_circle(other)?;
        Ok(circle_distance(self.representative, other.representative, self.period))
    }

    fn same_circle(&self, other: &CircleValue) -> Result<()> {
        if (self.period - other.period).abs() > 1e-12 * self.period {
            return Err(Error::InvalidArgument(format!(
                "values live on circles of period {} and {}",
                self.period, other.period
            )));
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn circle_distance(a: f64, b: f64, period: f64) -> f64 {
    let d = reduce_unchecked(a - b, period);
    d.min(period - d)
}

/// An open interval `(start, end)` on the line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub start: f64,
    pub end: f64,
}

impl Interval {
    pub fn new(start: f64, end: f64) -> Self {
        Interval { start, end }
    }

    pub fn length(&self) -> f64 {
        (self.end - self.start).max(0.0)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.start < x && x < self.end
    }
}

/// A finite union of disjoint open intervals on `R`, kept sorted.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LineIntervalSet {
    intervals: Vec<Interval>,
}

impl LineIntervalSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a normalized set: empty pieces dropped, overlaps merged, sorted.
    pub fn new(pieces: impl IntoIterator<Item = Interval>) -> Self {
        let mut v: Vec<Interval> = pieces
            .into_iter()
            .filter(|iv| iv.end - iv.start > MIN_LENGTH)
            .collect();
        v.sort_by(|a, b| a.start.total_cmp(&b.start));
        let mut merged: Vec<Interval> = Vec::with_capacity(v.len());
        for iv in v {
            match merged.last_mut() {
                Some(last) if iv.start < last.end => last.end = last.end.max(iv.end),
                _ => merged.push(iv),
            }
        }
        LineIntervalSet { intervals: merged }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(Interval::length).sum()
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|iv| iv.contains(x))
    }

    /// Intersection with the open interval `(a, b)`.
    pub fn clip(&self, a: f64, b: f64) -> Self {
        LineIntervalSet::new(
            self.intervals
                .iter()
                .map(|iv| Interval::new(iv.start.max(a), iv.end.min(b))),
        )
    }

    /// Distance from `x` to the nearest endpoint of the set.
    pub fn endpoint_distance(&self, x: f64) -> f64 {
        self.intervals
            .iter()
            .flat_map(|iv| [iv.start, iv.end])
            .map(|e| (x - e).abs())
            .fold(f64::INFINITY, f64::min)
    }
}

/// An open arc on `R/LZ`: the image of `(start, start + length)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub start: f64,
    pub length: f64,
}

/// A finite union of disjoint open arcs on `R/LZ`.
///
/// An arc of length `L` is the circle minus its start point. The whole circle
/// has no start point and is flagged separately.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleIntervalSet {
    period: f64,
    arcs: Vec<Arc>,
    full: bool,
}

impl CircleIntervalSet {
    pub fn empty(period: f64) -> Result<Self> {
        check_period(period)?;
        Ok(CircleIntervalSet {
            period,
            arcs: Vec::new(),
            full: false,
        })
    }

    pub fn full(period: f64) -> Result<Self> {
        check_period(period)?;
        Ok(CircleIntervalSet {
            period,
            arcs: Vec::new(),
            full: true,
        })
    }

    /// The circle with one point removed.
    pub fn punctured(point: CircleValue) -> Self {
        CircleIntervalSet {
            period: point.period,
            arcs: vec![Arc {
                start: point.representative,
                length: point.period,
            }],
            full: false,
        }
    }

    /// Builds a normalized set from arbitrary arcs. Overlapping arcs merge;
    /// touching arcs stay apart since their common endpoint is excluded.
    pub fn from_arcs(period: f64, arcs: impl IntoIterator<Item = Arc>) -> Result<Self> {
        check_period(period)?;
        let mut spans: Vec<(f64, f64)> = Vec::new();
        for arc in arcs {
            if !(arc.start.is_finite() && arc.length.is_finite()) {
                return Err(Error::InvalidArgument(format!("non-finite arc {arc:?}")));
            }
            if arc.length <= MIN_LENGTH {
                continue;
            }
            if arc.length > period {
                return Self::full(period);
            }
            let s = reduce_unchecked(arc.start, period);
            spans.push((s, s + arc.length));
        }
        spans.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(spans.len());
        for (s, e) in spans {
            match merged.last_mut() {
                Some(last) if s < last.1 => last.1 = last.1.max(e),
                _ => merged.push((s, e)),
            }
        }
        // The last span may run past L and swallow spans at the front.
        while merged.len() > 1 {
            let first = merged[0];
            let last = merged.last_mut().unwrap();
            if last.1 - period > first.0 {
                last.1 = last.1.max(first.1 + period);
                merged.remove(0);
            } else {
                break;
            }
        }
        if merged.iter().any(|&(s, e)| e - s > period) {
            return Self::full(period);
        }
        Ok(CircleIntervalSet {
            period,
            arcs: merged
                .into_iter()
                .map(|(s, e)| Arc {
                    start: s,
                    length: (e - s).min(period),
                })
                .collect(),
            full: false,
        })
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn is_full(&self) -> bool {
        self.full
    }

    pub fn is_empty(&self) -> bool {
        !self.full && self.arcs.is_empty()
    }

    pub fn total_length(&self) -> f64 {
        if self.full {
            self.period
        } else {
            self.arcs.iter().map(|a| a.length).sum()
        }
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        if self.full {
            return true;
        }
        self.arcs.iter().any(|a| {
            let d = reduce_unchecked(x - a.start, self.period);
            d > 0.0 && d < a.length
        })
    }

    /// Interior of the set-theoretic complement.
    pub fn complement(&self) -> Self {
        if self.full {
            return CircleIntervalSet {
                period: self.period,
                arcs: Vec::new(),
                full: false,
            };
        }
        if self.arcs.is_empty() {
            return CircleIntervalSet {
                period: self.period,
                arcs: Vec::new(),
                full: true,
            };
        }
        let k = self.arcs.len();
        let mut gaps = Vec::with_capacity(k);
        for i in 0..k {
            let end = self.arcs[i].start + self.arcs[i].length;
            let next = if i + 1 < k {
                self.arcs[i + 1].start
            } else {
                self.arcs[0].start + self.period
            };
            let gap = next - end;
            if gap > MIN_LENGTH {
                gaps.push(Arc {
                    start: reduce_unchecked(end, self.period),
                    length: gap,
                });
            }
        }
        gaps.sort_by(|a, b| a.start.total_cmp(&b.start));
        CircleIntervalSet {
            period: self.period,
            arcs: gaps,
            full: false,
        }
    }

    /// The set of `x ∈ (a, b)` whose reduction lies in this set.
    pub fn unroll(&self, a: f64, b: f64) -> LineIntervalSet {
        if self.full {
            return LineIntervalSet::new([Interval::new(a, b)]);
        }
        let mut pieces = Vec::new();
        let k_lo = ((a / self.period).floor() as i64) - 1;
        let k_hi = ((b / self.period).ceil() as i64) + 1;
        for arc in &self.arcs {
            for k in k_lo..=k_hi {
                let s = arc.start + k as f64 * self.period;
                pieces.push(Interval::new(s.max(a), (s + arc.length).min(b)));
            }
        }
        LineIntervalSet::new(pieces)
    }
}

fn check_period(period: f64) -> Result<()> {
    if period.is_finite() && period > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidPeriod(period))
    }
}

/// All `x ∈ clip` for which some `w ∈ offsets` satisfies `scale·x + w ≡ target`
/// modulo `target.period()`.
pub fn preimage_affine_mod(
    target: CircleValue,
    scale: f64,
    offsets: Interval,
    clip: Interval,
) -> Result<LineIntervalSet> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::InvalidArgument(format!("scale {scale} must be positive")));
    }
    let period = target.period;
    let t = target.representative;
    // scale·x + w = t + j·period  ⇔  x ∈ ((t + j·period − w_hi)/scale, (t + j·period − w_lo)/scale)
    let step = period / scale;
    let base_lo = (t - offsets.end) / scale;
    let base_hi = (t - offsets.start) / scale;
    let j_lo = ((clip.start - base_hi) / step).floor() as i64 - 1;
    let j_hi = ((clip.end - base_lo) / step).ceil() as i64 + 1;
    let pieces = (j_lo..=j_hi).map(|j| {
        let shift = j as f64 * step;
        Interval::new(
            (base_lo + shift).max(clip.start),
            (base_hi + shift).min(clip.end),
        )
    });
    Ok(LineIntervalSet::new(pieces))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reduce_examples() {
        assert_eq!(reduce(1.25, 2.0).unwrap().representative(), 1.25);
        assert_eq!(reduce(-0.75, 1.0).unwrap().representative(), 0.25);
        // floor(7.5 / 2) = 3, 7.5 − 6 = 1.5
        assert_eq!(reduce(7.5, 2.0).unwrap().representative(), 1.5);
    }

    #[test]
    fn reduce_rejects_bad_period() {
        assert_eq!(reduce(1.0, 0.0), Err(Error::InvalidPeriod(0.0)));
        assert_eq!(reduce(1.0, -2.0), Err(Error::InvalidPeriod(-2.0)));
        assert!(reduce(1.0, f64::NAN).is_err());
    }

    #[test]
    fn reduce_snaps_near_period() {
        let v = reduce(-1e-17, 1.0).unwrap();
        assert_eq!(v.representative(), 0.0);
        let v = reduce(3.0 - 1e-16, 1.0).unwrap();
        assert_eq!(v.representative(), 0.0);
    }

    #[test]
    fn complement_examples() {
        let punctured = CircleIntervalSet::punctured(reduce(0.3, 1.0).unwrap());
        assert!(punctured.complement().is_empty());

        let quarter = CircleIntervalSet::from_arcs(1.0, [Arc { start: 0.0, length: 0.25 }]).unwrap();
        let c = quarter.complement();
        assert_eq!(c.arcs(), &[Arc { start: 0.25, length: 0.75 }]);

        let two = CircleIntervalSet::from_arcs(
            1.0,
            [
                Arc { start: 0.0, length: 0.25 },
                Arc { start: 0.75, length: 0.25 },
            ],
        )
        .unwrap();
        let c = two.complement();
        assert_eq!(c.arcs().len(), 1);
        assert!((c.arcs()[0].start - 0.25).abs() < 1e-15);
        assert!((c.arcs()[0].length - 0.5).abs() < 1e-15);
    }

    #[test]
    fn full_and_empty_are_dual() {
        let e = CircleIntervalSet::empty(2.0).unwrap();
        assert!(e.complement().is_full());
        assert!(e.complement().complement().is_empty());
        assert_eq!(e.complement().total_length(), 2.0);
    }

    #[test]
    fn wrapping_arcs_merge() {
        let s = CircleIntervalSet::from_arcs(
            1.0,
            [
                Arc { start: 0.9, length: 0.2 },
                Arc { start: 0.05, length: 0.1 },
            ],
        )
        .unwrap();
        assert_eq!(s.arcs().len(), 1);
        assert!((s.total_length() - 0.25).abs() < 1e-15);
        assert!(s.contains(0.0));
        assert!(s.contains(0.14));
        assert!(!s.contains(0.5));
    }

    #[test]
    fn touching_arcs_stay_apart() {
        let s = CircleIntervalSet::from_arcs(
            1.0,
            [
                Arc { start: 0.0, length: 0.5 },
                Arc { start: 0.5, length: 0.5 },
            ],
        )
        .unwrap();
        assert_eq!(s.arcs().len(), 2);
        assert!(!s.contains(0.5));
        assert!(!s.contains(0.0));
        assert!(s.complement().is_empty());
    }

    #[test]
    fn overfull_arc_is_the_circle() {
        let s = CircleIntervalSet::from_arcs(1.0, [Arc { start: 0.2, length: 1.5 }]).unwrap();
        assert!(s.is_full());
    }

    #[test]
    fn unroll_punctured_circle() {
        let s = CircleIntervalSet::punctured(reduce(0.4, 1.0).unwrap());
        let line = s.unroll(0.0, 1.0);
        assert_eq!(line.len(), 2);
        assert!(!line.contains(0.4));
        assert!((line.total_length() - 1.0).abs() < 1e-15);
    }

    fn w(rep: f64, c: f64) -> LineIntervalSet {
        preimage_affine_mod(
            reduce(rep, c).unwrap(),
            c,
            Interval::new(0.0, 1.0),
            Interval::new(0.0, 1.0),
        )
        .unwrap()
    }

    /// Grid verdict for `x`: does some `w` on a `step` grid in (0,1) put
    /// `c·x + w` within half a step of `t` on the circle of period `c`?
    fn congruence_grid(x: f64, t: f64, c: f64, step: f64) -> bool {
        let m = (1.0 / step).round() as usize;
        (1..m).any(|k| {
            let w = k as f64 * step;
            circle_distance(c * x + w, t, c) <= 0.5 * step + 1e-12
        })
    }

    /// Intervals recovered from the grid oracle, as maximal runs.
    fn oracle_runs(t: f64, c: f64, step: f64) -> Vec<(f64, f64)> {
        let m = (1.0 / step).round() as usize;
        let mut runs = Vec::new();
        let mut open: Option<f64> = None;
        for k in 1..m {
            let x = k as f64 * step;
            let hit = congruence_grid(x, t, c, step);
            match (hit, open) {
                (true, None) => open = Some(x),
                (false, Some(s)) => {
                    runs.push((s, x - step));
                    open = None;
                }
                _ => {}
            }
        }
        if let Some(s) = open {
            runs.push((s, 1.0 - step));
        }
        runs
    }

    #[test]
    fn preimage_examples_match_grid_oracle() {
        let step = 1e-3;
        // Oracle runs, frozen from `oracle_runs` with a 1e-3 grid.
        let runs = oracle_runs(0.5, 2.0, step);
        assert_eq!(runs.len(), 2);
        assert!((runs[0].0 - 0.001).abs() < 1.5e-3 && (runs[0].1 - 0.25).abs() < 1.5e-3);
        assert!((runs[1].0 - 0.75).abs() < 1.5e-3 && (runs[1].1 - 0.999).abs() < 1.5e-3);

        let s = w(0.5, 2.0);
        assert_eq!(
            s.intervals(),
            &[Interval::new(0.0, 0.25), Interval::new(0.75, 1.0)]
        );
        assert!((s.total_length() - 0.5).abs() < 1e-15);

        let runs = oracle_runs(1.5, 2.0, step);
        assert_eq!(runs.len(), 1);
        assert!((runs[0].0 - 0.25).abs() < 1.5e-3 && (runs[0].1 - 0.75).abs() < 1.5e-3);
        let s = w(1.5, 2.0);
        assert_eq!(s.intervals(), &[Interval::new(0.25, 0.75)]);

        let s = w(0.5, 1.0);
        assert_eq!(
            s.intervals(),
            &[Interval::new(0.0, 0.5), Interval::new(0.5, 1.0)]
        );
        assert!(!s.contains(0.5));
        assert!((s.total_length() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn preimage_wrap_point_at_zero_is_single_interval() {
        let s = w(0.0, 2.0);
        assert_eq!(s.intervals(), &[Interval::new(0.5, 1.0)]);
        let s = w(0.0, 1.0);
        assert_eq!(s.intervals(), &[Interval::new(0.0, 1.0)]);
        let s = w(1.0, 2.0);
        assert_eq!(s.intervals(), &[Interval::new(0.0, 0.5)]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn reduce_is_idempotent(x in -1e6f64..1e6, period in 1e-3f64..1e3) {
            let once = reduce(x, period).unwrap();
            let twice = reduce(once.representative(), period).unwrap();
            prop_assert_eq!(once, twice);
            prop_assert!(once.representative() >= 0.0 && once.representative() < period);
        }
    }

    proptest! {
        #[test]
        fn sum_reduces_consistently(a in -50f64..50.0, b in -50f64..50.0, period in 0.1f64..10.0) {
            let x = reduce(a, period).unwrap();
            let y = reduce(b, period).unwrap();
            let s = x.add(&y).unwrap();
            let direct = reduce(x.representative() + y.representative(), period).unwrap();
            prop_assert_eq!(s, direct);
        }

        #[test]
        fn complement_is_an_involution(
            period in 0.5f64..5.0,
            offset in 0.0f64..1.0,
            parts in prop::collection::vec((0.05f64..1.0, 0.05f64..1.0), 1..6)
        ) {
            // Alternate arcs and gaps of positive length so no boundary point is isolated.
            let total: f64 = parts.iter().map(|(a, g)| a + g).sum();
            let scale = period / total;
            let mut at = offset * period;
            let mut arcs = Vec::new();
            for (a, g) in &parts {
                arcs.push(Arc { start: at, length: a * scale });
                at += (a + g) * scale;
            }
            let s = CircleIntervalSet::from_arcs(period, arcs).unwrap();
            let c = s.complement();
            prop_assert!((s.total_length() + c.total_length() - period).abs() < 1e-9);
            let cc = c.complement();
            prop_assert_eq!(cc.arcs().len(), s.arcs().len());
            prop_assert!((cc.total_length() - s.total_length()).abs() < 1e-9);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1_000))]
        #[test]
        fn preimage_has_length_one_over_c(u in 0.0f64..1.0, c in 1.0f64..10.0) {
            let target = reduce(u * c, c).unwrap();
            let s = preimage_affine_mod(target, c, Interval::new(0.0, 1.0), Interval::new(0.0, 1.0)).unwrap();
            prop_assert!((s.total_length() - 1.0 / c).abs() < 1e-12);
            prop_assert!(s.len() == 1 || s.len() == 2);
        }
    }
}
