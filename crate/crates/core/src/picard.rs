//! Picard orbits `x_{n+1} = T(x_n)` and trace-level convergence
//! diagnostics.
//!
//! Limit statements (gaps tending to zero, the Cauchy property) are not
//! finitely observable; each diagnostic below names the finite proxy it
//! uses.

use std::collections::HashSet;

use serde::Serialize;
use thiserror::Error;

use crate::metric::{AdmissibilityMap, FiniteMetricSpace, MetricError, SelfMap};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PicardError {
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("max_iter must be at least 1")]
    ZeroMaxIter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceStatus {
    FixedPointReached,
    CycleDetected,
    MaxIter,
    Diverged,
}

/// Finite proxies for the convergence properties, computed on a trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceDiagnostics {
    pub gaps_monotone_nonincreasing: bool,
    /// `gaps[n+1] < gaps[n]` wherever `gaps[n] > 0`.
    pub positive_gaps_strictly_decreasing: bool,
    /// Proxy for `d(x_n, x_{n+1}) → 0`: the final gap is within `tol`.
    pub gaps_tend_to_zero: bool,
    pub final_gap: f64,
    /// Largest pairwise distance along the trace.
    pub trace_diameter: f64,
    pub bounded: bool,
    /// Proxy for the Cauchy property: the second half of the trace has
    /// diameter within `tol`.
    pub cauchy_at_tol: bool,
    pub tail_diameter: f64,
    pub tol: f64,
    /// `α(x_n, x_m) ≥ 1` for all `n < m`, when an α was supplied.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_chain_ok: Option<bool>,
}

impl TraceDiagnostics {
    /// Computes every diagnostic except the α-chain.
    pub fn compute<P>(iterates: &[P], gaps: &[f64], tol: f64, dist: impl Fn(&P, &P) -> f64) -> TraceDiagnostics {
        let gaps_monotone_nonincreasing = gaps.windows(2).all(|w| w[1] <= w[0]);
        let positive_gaps_strictly_decreasing = gaps.windows(2).all(|w| w[0] <= 0.0 || w[1] < w[0]);
        let final_gap = gaps.last().copied().unwrap_or(0.0);
        let diameter = |from: usize| {
            let mut diam: f64 = 0.0;
            for i in from..iterates.len() {
                for j in i + 1..iterates.len() {
                    diam = diam.max(dist(&iterates[i], &iterates[j]));
                }
            }
            diam
        };
        let trace_diameter = diameter(0);
        let tail_diameter = diameter(iterates.len() / 2);
        TraceDiagnostics {
            gaps_monotone_nonincreasing,
            positive_gaps_strictly_decreasing,
            gaps_tend_to_zero: final_gap <= tol,
            final_gap,
            trace_diameter,
            bounded: trace_diameter.is_finite(),
            cauchy_at_tol: tail_diameter <= tol,
            tail_diameter,
            tol,
            alpha_chain_ok: None,
        }
    }
}

/// An orbit together with its gaps `d(x_n, x_{n+1})`.
///
/// `iterates[0]` is the start point and `gaps[n]` is the distance between
/// `iterates[n]` and `iterates[n + 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PicardTrace<P> {
    pub start: P,
    pub iterates: Vec<P>,
    pub gaps: Vec<f64>,
    pub status: TraceStatus,
    pub fixed_point: Option<P>,
    pub diagnostics: TraceDiagnostics,
}

impl<P: PartialEq> PicardTrace<P> {
    /// Number of map applications performed.
    pub fn steps(&self) -> usize {
        self.gaps.len()
    }

    /// Index of the first iterate equal to the fixed point.
    pub fn steps_to_fixed_point(&self) -> Option<usize> {
        let fp = self.fixed_point.as_ref()?;
        self.iterates.iter().position(|p| p == fp)
    }
}

/// Runs the orbit of `start` under `map` for at most `max_iter` steps.
///
/// Stops exactly on a fixed point (gap 0). A revisited non-fixed point is
/// reported as a cycle since the orbit can then never converge.
pub fn iterate(
    space: &FiniteMetricSpace,
    map: &SelfMap,
    start: usize,
    max_iter: usize,
) -> Result<PicardTrace<usize>, PicardError> {
    if max_iter == 0 {
        return Err(PicardError::ZeroMaxIter);
    }
    if start >= space.len() {
        return Err(MetricError::IndexOutOfRange {
            index: start,
            len: space.len(),
        }
        .into());
    }
    let mut iterates = vec![start];
    let mut gaps = Vec::new();
    let mut visited = HashSet::from([start]);
    let mut status = TraceStatus::MaxIter;
    let mut fixed_point = None;
    let mut current = start;
    for _ in 0..max_iter {
        let next = map.apply(current)?;
        iterates.push(next);
        gaps.push(space.d(current, next));
        if next == current {
            status = TraceStatus::FixedPointReached;
            fixed_point = Some(next);
            break;
        }
        if !visited.insert(next) {
            status = TraceStatus::CycleDetected;
            break;
        }
        current = next;
    }
    let diagnostics = TraceDiagnostics::compute(&iterates, &gaps, 0.0, |&a, &b| space.d(a, b));
    Ok(PicardTrace {
        start,
        iterates,
        gaps,
        status,
        fixed_point,
        diagnostics,
    })
}

/// `α(x_n, x_m) ≥ 1` for every `n < m` along the trace.
pub fn check_alpha_chain(trace: &PicardTrace<usize>, alpha: &AdmissibilityMap) -> bool {
    let it = &trace.iterates;
    (0..it.len()).all(|n| (n + 1..it.len()).all(|m| alpha.get(it[n], it[m]) >= 1.0))
}

/// Fills in the α-chain diagnostic.
pub fn with_alpha_chain(mut trace: PicardTrace<usize>, alpha: &AdmissibilityMap) -> PicardTrace<usize> {
    trace.diagnostics.alpha_chain_ok = Some(check_alpha_chain(&trace, alpha));
    trace
}

/// All `x` with `T(x) = x`, in index order.
pub fn fixed_points(map: &SelfMap) -> Vec<usize> {
    (0..map.len()).filter(|&x| map.at(x) == x).collect()
}
