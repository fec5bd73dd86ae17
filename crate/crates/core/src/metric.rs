//! Finite metric spaces, self-maps and admissibility tables.
//!
//! Points carry an exact rational value parsed from their label, so
//! `"1/9"` and `"0.5"` are represented without float-parsing ambiguity.
//! Distances are stored as `f64` once the space is built.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::slack::Slack;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("invalid point label `{label}`: {reason}")]
    BadLabel { label: String, reason: String },
    #[error("duplicate point `{label}` (points must be pairwise distinct)")]
    DuplicatePoint { label: String },
    #[error("a metric space needs at least one point")]
    Empty,
    #[error("distance table has {rows} rows, expected {expected}")]
    TableRows { rows: usize, expected: usize },
    #[error("distance table row {row} has {len} entries, expected {expected}")]
    TableRowLength { row: usize, len: usize, expected: usize },
    #[error("distance table entry ({row}, {col}) is missing")]
    MissingEntry { row: usize, col: usize },
    #[error("distance table entry ({row}, {col}) is not finite")]
    NonFiniteEntry { row: usize, col: usize },
    #[error("point index {index} is out of range for a space of {len} points")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("unknown point `{label}`")]
    UnknownPoint { label: String },
    #[error("self-map table has {len} entries, expected {expected}")]
    MapLength { len: usize, expected: usize },
    #[error("admissibility value for ({x}, {y}) is missing")]
    MissingAlpha { x: usize, y: usize },
    #[error("admissibility value {value} for ({x}, {y}) is negative or not finite")]
    BadAlpha { x: usize, y: usize, value: f64 },
}

/// Parses a decimal or fractional label exactly.
///
/// Accepted forms: `3`, `-0.25`, `1/9`, `1.5/4`.
pub fn parse_exact(label: &str) -> Result<BigRational, MetricError> {
    let bad = |reason: &str| MetricError::BadLabel {
        label: label.to_string(),
        reason: reason.to_string(),
    };
    let trimmed = label.trim();
    if trimmed.is_empty() {
        return Err(bad("empty label"));
    }
    match trimmed.split_once('/') {
        Some((num, den)) => {
            let num = parse_decimal(num.trim()).ok_or_else(|| bad("malformed numerator"))?;
            let den = parse_decimal(den.trim()).ok_or_else(|| bad("malformed denominator"))?;
            if den.is_zero() {
                return Err(bad("zero denominator"));
            }
            Ok(num / den)
        }
        None => parse_decimal(trimmed).ok_or_else(|| bad("not a decimal number")),
    }
}

fn parse_decimal(text: &str) -> Option<BigRational> {
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().ok()?
    };
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    let value = BigRational::new(numer, denom);
    Some(if negative { -value } else { value })
}

fn rational_to_f64(value: &BigRational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// A labelled point with its exact and floating-point values.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub label: String,
    pub exact: BigRational,
    pub value: f64,
}

impl Point {
    pub fn parse(label: &str) -> Result<Point, MetricError> {
        let exact = parse_exact(label)?;
        Ok(Point {
            label: label.trim().to_string(),
            value: rational_to_f64(&exact),
            exact,
        })
    }

    /// A point whose label is the shortest round-trip decimal of `value`.
    pub fn from_f64(value: f64) -> Result<Point, MetricError> {
        let exact = BigRational::from_float(value).ok_or_else(|| MetricError::BadLabel {
            label: value.to_string(),
            reason: "not finite".into(),
        })?;
        Ok(Point {
            label: format!("{value}"),
            exact,
            value,
        })
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

/// A finite set of labelled points with a full distance table.
///
/// Construction only checks the table's structure. Use [`validate_metric`]
/// to check the metric axioms.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    points: Vec<Point>,
    dist: Vec<Vec<f64>>,
}

impl FiniteMetricSpace {
    /// Builds a space from an explicit table. `None` entries are structural
    /// errors, distinct from axiom violations.
    pub fn from_table(points: Vec<Point>, table: Vec<Vec<Option<f64>>>) -> Result<FiniteMetricSpace, MetricError> {
        check_points(&points)?;
        let n = points.len();
        if table.len() != n {
            return Err(MetricError::TableRows {
                rows: table.len(),
                expected: n,
            });
        }
        let mut dist = Vec::with_capacity(n);
        for (row, entries) in table.into_iter().enumerate() {
            if entries.len() != n {
                return Err(MetricError::TableRowLength {
                    row,
                    len: entries.len(),
                    expected: n,
                });
            }
            let mut values = Vec::with_capacity(n);
            for (col, entry) in entries.into_iter().enumerate() {
                let v = entry.ok_or(MetricError::MissingEntry { row, col })?;
                if !v.is_finite() {
                    return Err(MetricError::NonFiniteEntry { row, col });
                }
                values.push(v);
            }
            dist.push(values);
        }
        Ok(FiniteMetricSpace { points, dist })
    }

    /// The absolute-value metric on the given points, with every distance
    /// computed exactly and rounded once.
    pub fn euclidean_points(points: Vec<Point>) -> Result<FiniteMetricSpace, MetricError> {
        check_points(&points)?;
        let dist = points
            .iter()
            .map(|a| {
                points
                    .iter()
                    .map(|b| rational_to_f64(&(&a.exact - &b.exact).abs()))
                    .collect()
            })
            .collect();
        Ok(FiniteMetricSpace { points, dist })
    }

    /// The absolute-value metric on exact labels such as `["0", "1/9", "1/2"]`.
    pub fn euclidean_labels<S: AsRef<str>>(labels: &[S]) -> Result<FiniteMetricSpace, MetricError> {
        let points = labels
            .iter()
            .map(|l| Point::parse(l.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        FiniteMetricSpace::euclidean_points(points)
    }

    /// `dist(i, j) = |values[i] - values[j]|` on the real line.
    pub fn euclidean_line(values: &[f64]) -> Result<FiniteMetricSpace, MetricError> {
        let points = values
            .iter()
            .map(|&v| Point::from_f64(v))
            .collect::<Result<Vec<_>, _>>()?;
        check_points(&points)?;
        let dist = values
            .iter()
            .map(|a| values.iter().map(|b| (a - b).abs()).collect())
            .collect();
        Ok(FiniteMetricSpace { points, dist })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, index: usize) -> &Point {
        &self.points[index]
    }

    pub fn label(&self, index: usize) -> &str {
        &self.points[index].label
    }

    pub fn d(&self, a: usize, b: usize) -> f64 {
        self.dist[a][b]
    }

    /// Index of the point with the same exact value as `label`.
    pub fn index_of(&self, label: &str) -> Result<usize, MetricError> {
        let exact = parse_exact(label)?;
        self.points
            .iter()
            .position(|p| p.exact == exact)
            .ok_or_else(|| MetricError::UnknownPoint {
                label: label.to_string(),
            })
    }

    /// Largest pairwise distance.
    pub fn diameter(&self) -> f64 {
        self.dist.iter().flat_map(|row| row.iter().copied()).fold(0.0, f64::max)
    }
}

fn check_points(points: &[Point]) -> Result<(), MetricError> {
    if points.is_empty() {
        return Err(MetricError::Empty);
    }
    for (i, p) in points.iter().enumerate() {
        if points[..i].iter().any(|q| q.exact == p.exact) {
            return Err(MetricError::DuplicatePoint { label: p.label.clone() });
        }
    }
    Ok(())
}

/// A violated metric axiom with its witness indices.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum MetricViolation {
    SelfDistance {
        x: usize,
        value: f64,
    },
    Positivity {
        x: usize,
        y: usize,
        value: f64,
    },
    Symmetry {
        x: usize,
        y: usize,
        forward: f64,
        backward: f64,
    },
    Triangle {
        x: usize,
        y: usize,
        z: usize,
        direct: f64,
        via: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<MetricViolation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks identity, positivity, symmetry and the triangle inequality by
/// exhaustive enumeration. Violations are listed in index order.
pub fn validate_metric(space: &FiniteMetricSpace, slack: Slack) -> ValidationReport {
    let n = space.len();
    let mut violations = Vec::new();
    for x in 0..n {
        let v = space.d(x, x);
        if !slack.eq(v, 0.0) {
            violations.push(MetricViolation::SelfDistance { x, value: v });
        }
    }
    for x in 0..n {
        for y in 0..n {
            if x == y {
                continue;
            }
            let v = space.d(x, y);
            if !slack.gt(v, 0.0) {
                violations.push(MetricViolation::Positivity { x, y, value: v });
            }
            if x < y && !slack.eq(v, space.d(y, x)) {
                violations.push(MetricViolation::Symmetry {
                    x,
                    y,
                    forward: v,
                    backward: space.d(y, x),
                });
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let direct = space.d(x, z);
                let via = space.d(x, y) + space.d(y, z);
                if !slack.le(direct, via) {
                    violations.push(MetricViolation::Triangle { x, y, z, direct, via });
                }
            }
        }
    }
    ValidationReport { violations }
}

/// A total map from point indices to point indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelfMap {
    table: Vec<usize>,
}

impl SelfMap {
    pub fn new(table: Vec<usize>, len: usize) -> Result<SelfMap, MetricError> {
        if table.len() != len {
            return Err(MetricError::MapLength {
                len: table.len(),
                expected: len,
            });
        }
        if let Some(&index) = table.iter().find(|&&i| i >= len) {
            return Err(MetricError::IndexOutOfRange { index, len });
        }
        Ok(SelfMap { table })
    }

    pub fn identity(len: usize) -> SelfMap {
        SelfMap {
            table: (0..len).collect(),
        }
    }

    pub fn constant(len: usize, value: usize) -> Result<SelfMap, MetricError> {
        SelfMap::new(vec![value; len], len)
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, x: usize) -> Result<usize, MetricError> {
        self.table.get(x).copied().ok_or(MetricError::IndexOutOfRange {
            index: x,
            len: self.table.len(),
        })
    }

    /// Image of an index already known to be in range.
    pub fn at(&self, x: usize) -> usize {
        self.table[x]
    }

    /// `self ∘ inner`, i.e. `x ↦ self(inner(x))`.
    pub fn compose(&self, inner: &SelfMap) -> SelfMap {
        SelfMap {
            table: inner.table.iter().map(|&i| self.table[i]).collect(),
        }
    }
}

/// Ordered-pair weights `α(x, y) >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityMap {
    len: usize,
    values: Vec<f64>,
}

impl AdmissibilityMap {
    pub fn constant(len: usize, value: f64) -> AdmissibilityMap {
        assert!(value >= 0.0 && value.is_finite());
        AdmissibilityMap {
            len,
            values: vec![value; len * len],
        }
    }

    pub fn from_fn(len: usize, f: impl Fn(usize, usize) -> f64) -> Result<AdmissibilityMap, MetricError> {
        let mut values = Vec::with_capacity(len * len);
        for x in 0..len {
            for y in 0..len {
                let v = f(x, y);
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(MetricError::BadAlpha { x, y, value: v });
                }
                values.push(v);
            }
        }
        Ok(AdmissibilityMap { len, values })
    }

    /// Builds the table from sparse entries. Without a default every ordered
    /// pair must be listed.
    pub fn from_entries(
        len: usize,
        default: Option<f64>,
        entries: &[(usize, usize, f64)],
    ) -> Result<AdmissibilityMap, MetricError> {
        let mut values: Vec<Option<f64>> = vec![default; len * len];
        for &(x, y, v) in entries {
            if x >= len || y >= len {
                return Err(MetricError::IndexOutOfRange { index: x.max(y), len });
            }
            values[x * len + y] = Some(v);
        }
        AdmissibilityMap::from_fn(len, |x, y| values[x * len + y].unwrap_or(f64::NAN)).map_err(|err| match err {
            MetricError::BadAlpha { x, y, value } if value.is_nan() && values[x * len + y].is_none() => {
                MetricError::MissingAlpha { x, y }
            }
            other => other,
        })
    }

    /// `1` when both points lie in `members`, `0` otherwise.
    pub fn indicator(len: usize, members: &[usize]) -> AdmissibilityMap {
        let inside = |i: usize| members.contains(&i);
        AdmissibilityMap::from_fn(len, |x, y| if inside(x) && inside(y) { 1.0 } else { 0.0 })
            .expect("indicator values are finite")
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[x * self.len + y]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_points() -> FiniteMetricSpace {
        FiniteMetricSpace::euclidean_labels(&["0", "1/2", "1", "2"]).unwrap()
    }

    #[test]
    fn parses_labels_exactly() {
        assert_eq!(parse_exact("1/9").unwrap(), BigRational::new(1.into(), 9.into()));
        assert_eq!(parse_exact("0.5").unwrap(), parse_exact("1/2").unwrap());
        assert_eq!(parse_exact("-2.25").unwrap(), BigRational::new((-9).into(), 4.into()));
        assert_eq!(parse_exact(".5").unwrap(), parse_exact("1/2").unwrap());
        assert!(parse_exact("1/0").is_err());
        assert!(parse_exact("abc").is_err());
        assert!(parse_exact("").is_err());
        assert!(parse_exact("1e3").is_err());
    }

    #[test]
    fn example_space_is_a_metric() {
        let space = example_points();
        assert!(validate_metric(&space, Slack::default()).is_valid());
        assert_eq!(space.d(0, 3), 2.0);
    }

    #[test]
    fn single_point_space_is_valid() {
        let space = FiniteMetricSpace::euclidean_line(&[7.0]).unwrap();
        assert_eq!(space.len(), 1);
        assert!(validate_metric(&space, Slack::default()).is_valid());
    }

    #[test]
    fn ninth_to_half_distance_is_seven_eighteenths() {
        let space = FiniteMetricSpace::euclidean_labels(&["0", "1/9", "0.5", "1", "2"]).unwrap();
        assert_eq!(space.len(), 5);
        assert_eq!(space.d(1, 2), 7.0 / 18.0);
        let line = FiniteMetricSpace::euclidean_line(&[0.0, 1.0 / 9.0, 0.5, 1.0, 2.0]).unwrap();
        assert!((line.d(1, 2) - 7.0 / 18.0).abs() < 1e-15);
    }

    #[test]
    fn triangle_violation_has_witness() {
        let points = ["a", "b", "c"]
            .iter()
            .enumerate()
            .map(|(i, l)| Point {
                label: l.to_string(),
                exact: BigRational::from_integer(i.into()),
                value: i as f64,
            })
            .collect();
        let table = vec![
            vec![Some(0.0), Some(1.0), Some(10.0)],
            vec![Some(1.0), Some(0.0), Some(1.0)],
            vec![Some(10.0), Some(1.0), Some(0.0)],
        ];
        let space = FiniteMetricSpace::from_table(points, table).unwrap();
        let report = validate_metric(&space, Slack::default());
        assert_eq!(
            report.violations[0],
            MetricViolation::Triangle {
                x: 0,
                y: 1,
                z: 2,
                direct: 10.0,
                via: 2.0
            }
        );
        assert_eq!(report.violations.len(), 2);
    }

    #[test]
    fn missing_entry_is_structural() {
        let points = vec![Point::parse("0").unwrap(), Point::parse("1").unwrap()];
        let err =
            FiniteMetricSpace::from_table(points, vec![vec![Some(0.0), None], vec![Some(1.0), Some(0.0)]]).unwrap_err();
        assert_eq!(err, MetricError::MissingEntry { row: 0, col: 1 });
    }

    #[test]
    fn reports_asymmetry_and_zero_distance() {
        let points = vec![Point::parse("0").unwrap(), Point::parse("1").unwrap()];
        let space = FiniteMetricSpace::from_table(points, vec![vec![Some(0.0), Some(1.0)], vec![Some(0.0), Some(0.5)]])
            .unwrap();
        let report = validate_metric(&space, Slack::default());
        assert!(report
            .violations
            .contains(&MetricViolation::SelfDistance { x: 1, value: 0.5 }));
        assert!(report
            .violations
            .contains(&MetricViolation::Positivity { x: 1, y: 0, value: 0.0 }));
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, MetricViolation::Symmetry { .. })));
    }

    #[test]
    fn duplicate_values_are_rejected() {
        assert!(matches!(
            FiniteMetricSpace::euclidean_line(&[0.0, 1.0, 0.0]),
            Err(MetricError::DuplicatePoint { .. })
        ));
        assert!(matches!(
            FiniteMetricSpace::euclidean_labels(&["1/2", "0.5"]),
            Err(MetricError::DuplicatePoint { .. })
        ));
    }

    #[test]
    fn index_lookup_uses_exact_value() {
        let space = example_points();
        assert_eq!(space.index_of("0.5").unwrap(), 1);
        assert_eq!(space.index_of("2/1").unwrap(), 3);
        assert!(space.index_of("3").is_err());
    }

    #[test]
    fn self_map_checks_indices() {
        assert!(SelfMap::new(vec![0, 3], 2).is_err());
        assert!(SelfMap::new(vec![0], 2).is_err());
        let map = SelfMap::constant(3, 2).unwrap();
        assert_eq!(map.apply(0).unwrap(), 2);
        assert_eq!(map.apply(5), Err(MetricError::IndexOutOfRange { index: 5, len: 3 }));
        let shift = SelfMap::new(vec![1, 2, 0], 3).unwrap();
        assert_eq!(shift.compose(&shift).table(), &[2, 0, 1]);
    }

    #[test]
    fn alpha_entries_need_default_or_totality() {
        let err = AdmissibilityMap::from_entries(2, None, &[(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0)]).unwrap_err();
        assert_eq!(err, MetricError::MissingAlpha { x: 1, y: 1 });
        let alpha = AdmissibilityMap::from_entries(2, Some(0.0), &[(0, 1, 2.0)]).unwrap();
        assert_eq!(alpha.get(0, 1), 2.0);
        assert_eq!(alpha.get(1, 0), 0.0);
        assert!(AdmissibilityMap::from_entries(2, Some(0.0), &[(0, 1, -1.0)]).is_err());
    }
}
