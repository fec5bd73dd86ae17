//! Exhaustive contraction checks over finite metric spaces.
//!
//! Every ordered pair of distinct points is visited in index order. Gated
//! (Suzuki-type) kinds only evaluate their inequality where
//! `½d(x, Tx) < d(x, y)`; the remaining pairs are kept in the report as
//! vacuously satisfied.

use serde::Serialize;
use thiserror::Error;

use crate::functions::{Beta, CClass, FunctionError, Zeta};
use crate::metric::{AdmissibilityMap, FiniteMetricSpace, SelfMap};
use crate::slack::Slack;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("the map has {map} entries but the space has {space} points")]
    MapSize { map: usize, space: usize },
    #[error("contraction kind `{kind}` needs an admissibility function alpha")]
    MissingAlpha { kind: &'static str },
    #[error("alpha covers {alpha} points but the space has {space}")]
    AlphaSize { alpha: usize, space: usize },
    #[error("evaluation failed at pair ({x}, {y}): {source}")]
    Evaluation {
        x: String,
        y: String,
        #[source]
        source: FunctionError,
    },
    #[error("evaluation produced NaN at pair ({x}, {y})")]
    NotANumber { x: String, y: String },
}

/// Which contraction condition to decide.
#[derive(Debug, Clone, PartialEq)]
pub enum ContractionKind {
    /// `d(Tx, Ty) ≤ λ d(x, y)`.
    Banach { lambda: f64 },
    /// `ζ(d(Tx, Ty), d(x, y)) ≥ 0`.
    ZContraction { zeta: Zeta },
    /// `½d(x, Tx) < d(x, y) ⇒ d(Tx, Ty) < d(x, y)`.
    Suzuki,
    /// `½d(x, Tx) < d(x, y) ⇒ ζ(d(Tx, Ty), d(x, y)) ≥ 0`.
    SuzukiZ { zeta: Zeta },
    /// `d(Tx, Ty) ≤ β(d(x, y)) d(x, y)`.
    Geraghty { beta: Beta },
    /// `α(x, y) d(Tx, Ty) ≤ β(d(x, y)) d(x, y)`.
    AlphaGeraghty { beta: Beta },
    /// `½d(x, Tx) < d(x, y) ⇒ ζ(α(x, y) d(Tx, Ty), β(M) M) ≥ C_G`.
    SuzukiZagGeraghty { zeta: Zeta, g: CClass, beta: Beta },
}

pub const KIND_NAMES: [&str; 7] = [
    "banach",
    "z-contraction",
    "suzuki",
    "suzuki-z",
    "geraghty",
    "alpha-geraghty",
    "suzuki-zag-geraghty",
];

impl ContractionKind {
    pub fn name(&self) -> &'static str {
        match self {
            ContractionKind::Banach { .. } => "banach",
            ContractionKind::ZContraction { .. } => "z-contraction",
            ContractionKind::Suzuki => "suzuki",
            ContractionKind::SuzukiZ { .. } => "suzuki-z",
            ContractionKind::Geraghty { .. } => "geraghty",
            ContractionKind::AlphaGeraghty { .. } => "alpha-geraghty",
            ContractionKind::SuzukiZagGeraghty { .. } => "suzuki-zag-geraghty",
        }
    }

    /// Whether the condition only applies where `½d(x, Tx) < d(x, y)`.
    pub fn is_gated(&self) -> bool {
        matches!(
            self,
            ContractionKind::Suzuki | ContractionKind::SuzukiZ { .. } | ContractionKind::SuzukiZagGeraghty { .. }
        )
    }

    pub fn uses_alpha(&self) -> bool {
        matches!(
            self,
            ContractionKind::AlphaGeraghty { .. } | ContractionKind::SuzukiZagGeraghty { .. }
        )
    }
}

/// `M(x, y) = max{d(x, y), d(x, Tx), d(y, Ty)}`.
pub fn big_m(space: &FiniteMetricSpace, map: &SelfMap, x: usize, y: usize) -> f64 {
    space.d(x, y).max(space.d(x, map.at(x))).max(space.d(y, map.at(y)))
}

/// One ordered pair's evaluation.
///
/// `lhs` and `rhs` are the two sides of the kind's inequality (for
/// ζ-based kinds `lhs` is the ζ value and `rhs` the threshold) and
/// `margin` is the raw slack of the inequality: non-negative when it
/// holds exactly.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairRecord {
    pub x: usize,
    pub y: usize,
    pub x_label: String,
    pub y_label: String,
    pub d_xy: f64,
    pub d_txty: f64,
    /// `½d(x, Tx)`.
    pub premise_value: f64,
    pub premise_holds: bool,
    pub alpha: Option<f64>,
    pub big_m: f64,
    /// `None` on vacuous pairs.
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub margin: Option<f64>,
    pub satisfied: bool,
}

impl PairRecord {
    /// The premise failed, so the pair only counts as vacuously satisfied.
    pub fn is_vacuous(&self) -> bool {
        !self.premise_holds
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairRef {
    pub x: usize,
    pub y: usize,
    pub x_label: String,
    pub y_label: String,
}

/// Result of the α-admissibility checks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdmissibilityReport {
    /// `α(x, y) ≥ 1 ⇒ α(Tx, Ty) ≥ 1` for all pairs.
    pub is_alpha_admissible: bool,
    /// `α(x, z) ≥ 1 ∧ α(z, y) ≥ 1 ⇒ α(x, y) ≥ 1` for all triples.
    pub is_triangular: bool,
    /// First pair breaking admissibility.
    pub admissible_witness: Option<(usize, usize)>,
    /// First `(x, z, y)` breaking the triangular condition.
    pub triangular_witness: Option<(usize, usize, usize)>,
    /// Smallest-index `x₁` with `α(x₁, Tx₁) ≥ 1`.
    pub witness_x1: Option<usize>,
}

impl AdmissibilityReport {
    /// Triangular α-admissibility in the usual sense: both conditions.
    pub fn is_triangular_admissible(&self) -> bool {
        self.is_alpha_admissible && self.is_triangular
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractionReport {
    pub kind: &'static str,
    pub holds: bool,
    pub pairs_checked: usize,
    pub vacuous_pairs: usize,
    pub pair_records: Vec<PairRecord>,
    /// Lexicographically first violating ordered pair.
    pub counterexample: Option<PairRef>,
    pub admissibility: Option<AdmissibilityReport>,
    /// Some β value was pulled back inside `[0, 1)`.
    pub beta_clamped: bool,
}

impl ContractionReport {
    pub fn record(&self, x: usize, y: usize) -> Option<&PairRecord> {
        self.pair_records.iter().find(|r| r.x == x && r.y == y)
    }

    pub fn non_vacuous(&self) -> impl Iterator<Item = &PairRecord> {
        self.pair_records.iter().filter(|r| r.premise_holds)
    }
}

fn checked(value: f64, space: &FiniteMetricSpace, x: usize, y: usize) -> Result<f64, VerifyError> {
    if value.is_nan() {
        Err(VerifyError::NotANumber {
            x: space.label(x).into(),
            y: space.label(y).into(),
        })
    } else {
        Ok(value)
    }
}

fn eval_err(space: &FiniteMetricSpace, x: usize, y: usize) -> impl Fn(FunctionError) -> VerifyError + '_ {
    move |source| VerifyError::Evaluation {
        x: space.label(x).into(),
        y: space.label(y).into(),
        source,
    }
}

/// Decides `kind` for `map` on `space` by exhaustive enumeration.
pub fn verify(
    space: &FiniteMetricSpace,
    map: &SelfMap,
    alpha: Option<&AdmissibilityMap>,
    kind: &ContractionKind,
    slack: Slack,
) -> Result<ContractionReport, VerifyError> {
    let n = space.len();
    if map.len() != n {
        return Err(VerifyError::MapSize {
            map: map.len(),
            space: n,
        });
    }
    if let Some(a) = alpha {
        if a.len() != n {
            return Err(VerifyError::AlphaSize {
                alpha: a.len(),
                space: n,
            });
        }
    }
    if kind.uses_alpha() && alpha.is_none() {
        return Err(VerifyError::MissingAlpha { kind: kind.name() });
    }

    let mut records = Vec::with_capacity(n * n.saturating_sub(1));
    let mut counterexample = None;
    let mut vacuous = 0;
    let mut beta_clamped = false;
    for x in 0..n {
        for y in 0..n {
            if x == y {
                continue;
            }
            let tx = map.at(x);
            let ty = map.at(y);
            let d_xy = space.d(x, y);
            let d_txty = space.d(tx, ty);
            let premise_value = 0.5 * space.d(x, tx);
            let premise_holds = !kind.is_gated() || slack.lt(premise_value, d_xy);
            let m = big_m(space, map, x, y);
            let a = alpha.map(|a| a.get(x, y));

            let evaluated = if !premise_holds {
                None
            } else {
                let err = eval_err(space, x, y);
                let evaluated = match kind {
                    ContractionKind::Banach { lambda } => {
                        let rhs = lambda * d_xy;
                        (d_txty, rhs, rhs - d_txty, slack.le(d_txty, rhs))
                    }
                    ContractionKind::ZContraction { zeta } | ContractionKind::SuzukiZ { zeta } => {
                        let v = zeta.eval(d_txty, d_xy).map_err(&err)?;
                        (v, 0.0, v, slack.ge(v, 0.0))
                    }
                    ContractionKind::Suzuki => (d_txty, d_xy, d_xy - d_txty, slack.lt(d_txty, d_xy)),
                    ContractionKind::Geraghty { beta } => {
                        let b = beta.eval(d_xy).map_err(&err)?;
                        beta_clamped |= b.clamped;
                        let rhs = b.value * d_xy;
                        (d_txty, rhs, rhs - d_txty, slack.le(d_txty, rhs))
                    }
                    ContractionKind::AlphaGeraghty { beta } => {
                        let b = beta.eval(d_xy).map_err(&err)?;
                        beta_clamped |= b.clamped;
                        let lhs = a.unwrap_or(1.0) * d_txty;
                        let rhs = b.value * d_xy;
                        (lhs, rhs, rhs - lhs, slack.le(lhs, rhs))
                    }
                    ContractionKind::SuzukiZagGeraghty { zeta, g, beta } => {
                        let b = beta.eval(m).map_err(&err)?;
                        beta_clamped |= b.clamped;
                        let v = zeta.eval(a.unwrap_or(1.0) * d_txty, b.value * m).map_err(&err)?;
                        let cg = g.cg();
                        (v, cg, v - cg, slack.ge(v, cg))
                    }
                };
                Some(evaluated)
            };
            let (lhs, rhs, margin, satisfied) = match evaluated {
                Some((lhs, rhs, margin, satisfied)) => {
                    checked(lhs, space, x, y)?;
                    checked(rhs, space, x, y)?;
                    (Some(lhs), Some(rhs), Some(margin), satisfied)
                }
                None => {
                    vacuous += 1;
                    (None, None, None, true)
                }
            };
            if !satisfied && counterexample.is_none() {
                counterexample = Some(PairRef {
                    x,
                    y,
                    x_label: space.label(x).into(),
                    y_label: space.label(y).into(),
                });
            }
            records.push(PairRecord {
                x,
                y,
                x_label: space.label(x).into(),
                y_label: space.label(y).into(),
                d_xy,
                d_txty,
                premise_value,
                premise_holds,
                alpha: a,
                big_m: m,
                lhs,
                rhs,
                margin,
                satisfied,
            });
        }
    }
    Ok(ContractionReport {
        kind: kind.name(),
        holds: counterexample.is_none(),
        pairs_checked: records.len(),
        vacuous_pairs: vacuous,
        pair_records: records,
        counterexample,
        admissibility: alpha.map(|a| check_alpha_admissible(map, a)),
        beta_clamped,
    })
}

/// Exhaustive α-admissibility and triangularity check.
pub fn check_alpha_admissible(map: &SelfMap, alpha: &AdmissibilityMap) -> AdmissibilityReport {
    let n = alpha.len();
    let admissible_witness = (0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .find(|&(x, y)| alpha.get(x, y) >= 1.0 && alpha.get(map.at(x), map.at(y)) < 1.0);
    let triangular_witness = (0..n)
        .flat_map(|x| (0..n).flat_map(move |z| (0..n).map(move |y| (x, z, y))))
        .find(|&(x, z, y)| alpha.get(x, z) >= 1.0 && alpha.get(z, y) >= 1.0 && alpha.get(x, y) < 1.0);
    AdmissibilityReport {
        is_alpha_admissible: admissible_witness.is_none(),
        is_triangular: triangular_witness.is_none(),
        admissible_witness,
        triangular_witness,
        witness_x1: find_start_point(map, alpha),
    }
}

/// Smallest index `x` with `α(x, Tx) ≥ 1`.
pub fn find_start_point(map: &SelfMap, alpha: &AdmissibilityMap) -> Option<usize> {
    (0..map.len()).find(|&x| alpha.get(x, map.at(x)) >= 1.0)
}

/// For every pair of distinct fixed points some `z` has `α(x, z) ≥ 1` and
/// `α(y, z) ≥ 1`.
pub fn check_uniqueness_hypothesis(alpha: &AdmissibilityMap, fixed_points: &[usize]) -> bool {
    fixed_points.iter().enumerate().all(|(i, &x)| {
        fixed_points[i + 1..]
            .iter()
            .all(|&y| (0..alpha.len()).any(|z| alpha.get(x, z) >= 1.0 && alpha.get(y, z) >= 1.0))
    })
}
