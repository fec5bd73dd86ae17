//! Successive approximation for `x(t) = f(t) + ∫₀ᵗ K(t, s) h(s, x(s)) ds`
//! on `[0, 1]`.
//!
//! Functions live on the uniform grid `t_i = i/(n−1)` and the integral is
//! the composite trapezoid rule over `s_0..s_i` (the same nodes), so the
//! discrete operator maps grid functions to grid functions. Distances are
//! the sup norm over nodes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{Env, Expr, ParseError, Var};
use crate::picard::{PicardTrace, TraceDiagnostics, TraceStatus};
use crate::slack::Slack;

/// Sup norm above which an iterate is declared divergent.
pub const DIVERGENCE_BOUND: f64 = 1e12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HammersteinError {
    #[error("grid_n must be at least 2, got {0}")]
    GridTooSmall(usize),
    #[error("tol must be positive and finite, got {0}")]
    BadTolerance(f64),
    #[error("max_iter must be at least 1")]
    ZeroMaxIter,
    #[error("forcing term has {len} values but the grid has {grid_n} nodes")]
    ForcingLength { len: usize, grid_n: usize },
    #[error("grid function has {len} values but the grid has {grid_n} nodes")]
    Length { len: usize, grid_n: usize },
    #[error("{what} is not finite at t = {t}, s = {s}")]
    NonFinite { what: &'static str, t: f64, s: f64 },
    #[error("in {what}: {source}")]
    Parse {
        what: &'static str,
        #[source]
        source: ParseError,
    },
}

/// Values of a function on the problem grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GridFunction {
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn new(values: Vec<f64>) -> GridFunction {
        GridFunction { values }
    }

    pub fn zeros(n: usize) -> GridFunction {
        GridFunction { values: vec![0.0; n] }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `‖self − other‖∞`.
    pub fn sup_distance(&self, other: &GridFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// `f` given either as an expression in `t` or as node values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Forcing {
    Expr(String),
    Values(Vec<f64>),
}

fn default_tol() -> f64 {
    1e-10
}

fn default_max_iter() -> usize {
    200
}

/// The problem definition, as read from a `ham.json` file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HammersteinSpec {
    pub f: Forcing,
    #[serde(rename = "K")]
    pub kernel: String,
    pub h: String,
    pub grid_n: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
}

/// A validated problem with `f` and `K` tabulated on the grid.
#[derive(Debug, Clone)]
pub struct HammersteinProblem {
    spec: HammersteinSpec,
    nodes: Vec<f64>,
    step: f64,
    forcing: Vec<f64>,
    /// Row `i` holds `K(t_i, s_j)` for `j = 0..=i`.
    kernel_rows: Vec<Vec<f64>>,
    h: Expr,
}

impl HammersteinProblem {
    pub fn new(spec: HammersteinSpec) -> Result<HammersteinProblem, HammersteinError> {
        let n = spec.grid_n;
        if n < 2 {
            return Err(HammersteinError::GridTooSmall(n));
        }
        if !(spec.tol > 0.0 && spec.tol.is_finite()) {
            return Err(HammersteinError::BadTolerance(spec.tol));
        }
        if spec.max_iter == 0 {
            return Err(HammersteinError::ZeroMaxIter);
        }
        let parse = |what, src: &str, vars: &[Var]| {
            Expr::parse(src, vars).map_err(|source| HammersteinError::Parse { what, source })
        };
        let step = 1.0 / (n - 1) as f64;
        let nodes: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let forcing = match &spec.f {
            Forcing::Expr(src) => {
                let f = parse("f", src, &[Var::T])?;
                nodes
                    .iter()
                    .map(|&t| {
                        let v = f.eval(&Env { t, s: t, x: 0.0 });
                        if v.is_finite() {
                            Ok(v)
                        } else {
                            Err(HammersteinError::NonFinite { what: "f", t, s: t })
                        }
                    })
                    .collect::<Result<Vec<_>, _>>()?
            }
            Forcing::Values(values) => {
                if values.len() != n {
                    return Err(HammersteinError::ForcingLength {
                        len: values.len(),
                        grid_n: n,
                    });
                }
                if let Some(i) = values.iter().position(|v| !v.is_finite()) {
                    return Err(HammersteinError::NonFinite {
                        what: "f",
                        t: nodes[i],
                        s: nodes[i],
                    });
                }
                values.clone()
            }
        };
        let kernel = parse("K", &spec.kernel, &[Var::T, Var::S])?;
        let mut kernel_rows = Vec::with_capacity(n);
        for (i, &t) in nodes.iter().enumerate() {
            let row = nodes[..=i]
                .iter()
                .map(|&s| {
                    let v = kernel.eval(&Env::ts(t, s));
                    if v.is_finite() {
                        Ok(v)
                    } else {
                        Err(HammersteinError::NonFinite { what: "K", t, s })
                    }
                })
                .collect::<Result<Vec<_>, _>>()?;
            kernel_rows.push(row);
        }
        let h = parse("h", &spec.h, &[Var::S, Var::T, Var::X])?;
        Ok(HammersteinProblem {
            spec,
            nodes,
            step,
            forcing,
            kernel_rows,
            h,
        })
    }

    pub fn spec(&self) -> &HammersteinSpec {
        &self.spec
    }

    pub fn grid_n(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn tol(&self) -> f64 {
        self.spec.tol
    }

    pub fn forcing(&self) -> GridFunction {
        GridFunction::new(self.forcing.clone())
    }

    /// `h(s, x)` at a node; `t` is bound to the same location.
    pub fn h_at(&self, s: f64, x: f64) -> f64 {
        self.h.eval(&Env { t: s, s, x })
    }

    fn check_len(&self, x: &GridFunction) -> Result<(), HammersteinError> {
        if x.len() == self.grid_n() {
            Ok(())
        } else {
            Err(HammersteinError::Length {
                len: x.len(),
                grid_n: self.grid_n(),
            })
        }
    }

    /// Trapezoid rule for `∫₀^{t_i} row(s) ds` over nodes `0..=i`, summed
    /// left to right.
    fn trapezoid(&self, i: usize, integrand: impl Fn(usize) -> f64) -> f64 {
        if i == 0 {
            return 0.0;
        }
        let mut sum = 0.5 * integrand(0);
        for j in 1..i {
            sum += integrand(j);
        }
        sum += 0.5 * integrand(i);
        self.step * sum
    }

    /// The discrete operator `(Tx)(t_i) = f(t_i) + Q_i`.
    pub fn apply(&self, x: &GridFunction) -> Result<GridFunction, HammersteinError> {
        self.check_len(x)?;
        let g = self
            .nodes
            .iter()
            .zip(&x.values)
            .map(|(&s, &xv)| {
                let v = self.h_at(s, xv);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(HammersteinError::NonFinite { what: "h", t: s, s })
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        let values = (0..self.grid_n())
            .map(|i| {
                let row = &self.kernel_rows[i];
                self.forcing[i] + self.trapezoid(i, |j| row[j] * g[j])
            })
            .collect();
        Ok(GridFunction { values })
    }

    /// Runs `x_{k+1} = T(x_k)` from `x0` (default `f`) until the sup-norm
    /// step is within `tol`, `max_iter` is exhausted, or an iterate exceeds
    /// [`DIVERGENCE_BOUND`].
    pub fn solve(&self, x0: Option<GridFunction>) -> Result<Solution, HammersteinError> {
        let x0 = x0.unwrap_or_else(|| self.forcing());
        self.check_len(&x0)?;
        let tol = self.spec.tol;
        let mut iterates = vec![x0.clone()];
        let mut gaps = Vec::new();
        let mut status = TraceStatus::MaxIter;
        let mut current = x0.clone();
        for _ in 0..self.spec.max_iter {
            let next = self.apply(&current)?;
            let gap = next.sup_distance(&current);
            let norm = next.sup_norm();
            let exploded = norm.is_nan() || norm > DIVERGENCE_BOUND;
            iterates.push(next.clone());
            gaps.push(gap);
            if exploded {
                status = TraceStatus::Diverged;
                break;
            }
            current = next;
            if gap <= tol {
                status = TraceStatus::FixedPointReached;
                break;
            }
        }
        let residual = if status == TraceStatus::Diverged {
            f64::INFINITY
        } else {
            self.apply(&current)?.sup_distance(&current)
        };
        let diagnostics = TraceDiagnostics::compute(&iterates, &gaps, tol, GridFunction::sup_distance);
        let fixed_point = (status == TraceStatus::FixedPointReached).then(|| current.clone());
        Ok(Solution {
            solution: current,
            residual,
            trace: PicardTrace {
                start: x0,
                iterates,
                gaps,
                status,
                fixed_point,
                diagnostics,
            },
        })
    }

    /// `sup_t ∫₀ᵗ |K(t, s)| ds` on the grid against `1/(1 + m_hat)`.
    pub fn check_kernel_condition(&self, m_hat: f64, slack: Slack) -> KernelConditionReport {
        let mut sup_integral = 0.0;
        let mut argmax_t = 0.0;
        for i in 0..self.grid_n() {
            let row = &self.kernel_rows[i];
            let integral = self.trapezoid(i, |j| row[j].abs());
            if integral > sup_integral {
                sup_integral = integral;
                argmax_t = self.nodes[i];
            }
        }
        let bound = 1.0 / (1.0 + m_hat);
        KernelConditionReport {
            sup_integral,
            argmax_t,
            m_hat,
            bound,
            holds: slack.le(sup_integral, bound),
        }
    }

    /// Checks `|h(t_i, x(t_i)) − h(t_i, y(t_i))| < M(x, y)` on every pair
    /// whose premise `½‖x − Tx‖ < ‖x − y‖` holds, and that `h` is
    /// nondecreasing in `x` over all sampled values at each node.
    pub fn check_h_condition(
        &self,
        pairs: &[(GridFunction, GridFunction)],
        slack: Slack,
    ) -> Result<HConditionReport, HammersteinError> {
        let mut report = HConditionReport::default();
        for (index, (x, y)) in pairs.iter().enumerate() {
            let tx = self.apply(x)?;
            let ty = self.apply(y)?;
            let d_xy = x.sup_distance(y);
            let d_xtx = x.sup_distance(&tx);
            let d_yty = y.sup_distance(&ty);
            report.pairs += 1;
            if !slack.lt(0.5 * d_xtx, d_xy) {
                report.vacuous_pairs += 1;
                continue;
            }
            let m = d_xy.max(d_xtx).max(d_yty);
            for (i, &t) in self.nodes.iter().enumerate() {
                let diff = (self.h_at(t, x.values[i]) - self.h_at(t, y.values[i])).abs();
                if !slack.lt(diff, m) {
                    report.bound_violations += 1;
                    if report.first_bound_violation.is_none() {
                        report.first_bound_violation = Some(HBoundViolation {
                            pair: index,
                            node: i,
                            t,
                            h_difference: diff,
                            big_m: m,
                        });
                    }
                }
            }
        }
        for (i, &t) in self.nodes.iter().enumerate() {
            let mut xs: Vec<f64> = pairs.iter().flat_map(|(x, y)| [x.values[i], y.values[i]]).collect();
            xs.sort_by(f64::total_cmp);
            xs.dedup();
            for w in xs.windows(2) {
                let (lo, hi) = (self.h_at(t, w[0]), self.h_at(t, w[1]));
                if slack.gt(lo, hi) {
                    report.monotonicity_violations += 1;
                    if report.first_monotonicity_violation.is_none() {
                        report.first_monotonicity_violation = Some(HMonotonicityViolation {
                            node: i,
                            t,
                            x_low: w[0],
                            x_high: w[1],
                            h_low: lo,
                            h_high: hi,
                        });
                    }
                }
            }
        }
        report.holds = report.bound_violations == 0 && report.monotonicity_violations == 0;
        Ok(report)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Solution {
    pub solution: GridFunction,
    /// `‖x* − T x*‖∞` at exit.
    pub residual: f64,
    pub trace: PicardTrace<GridFunction>,
}

impl Solution {
    pub fn converged(&self) -> bool {
        self.trace.status == TraceStatus::FixedPointReached
    }

    pub fn iterations(&self) -> usize {
        self.trace.steps()
    }

    /// Largest `M(x_k, x_{k+1})` over consecutive iterates. Along an orbit
    /// this is the largest gap, including the exit residual.
    pub fn m_hat(&self) -> f64 {
        self.trace.gaps.iter().copied().fold(self.residual, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelConditionReport {
    pub sup_integral: f64,
    pub argmax_t: f64,
    pub m_hat: f64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HBoundViolation {
    pub pair: usize,
    pub node: usize,
    pub t: f64,
    pub h_difference: f64,
    pub big_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HMonotonicityViolation {
    pub node: usize,
    pub t: f64,
    pub x_low: f64,
    pub x_high: f64,
    pub h_low: f64,
    pub h_high: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct HConditionReport {
    pub pairs: usize,
    pub vacuous_pairs: usize,
    pub bound_violations: usize,
    pub monotonicity_violations: usize,
    pub first_bound_violation: Option<HBoundViolation>,
    pub first_monotonicity_violation: Option<HMonotonicityViolation>,
    pub holds: bool,
}

/// Consecutive iterate pairs `(x_k, x_{k+1})` of a trace, excluding pairs
/// of identical functions.
pub fn trace_pairs(trace: &PicardTrace<GridFunction>) -> Vec<(GridFunction, GridFunction)> {
    trace
        .iterates
        .windows(2)
        .filter(|w| w[0] != w[1])
        .map(|w| (w[0].clone(), w[1].clone()))
        .collect()
}

/// Pairs `(base + p, base + c·p)` with `p` uniform in `[−amplitude,
/// amplitude]` per node and `c` uniform in `[0.2, 0.4]`. For an operator
/// with a small integral term, `‖x − Tx‖` then dominates `‖x − y‖`.
pub fn perturbation_pairs<R: Rng>(
    base: &GridFunction,
    count: usize,
    amplitude: f64,
    rng: &mut R,
) -> Vec<(GridFunction, GridFunction)> {
    (0..count)
        .map(|_| {
            let p: Vec<f64> = base
                .values
                .iter()
                .map(|_| rng.random_range(-amplitude..=amplitude))
                .collect();
            let c = rng.random_range(0.2..=0.4);
            let x = base.values.iter().zip(&p).map(|(b, d)| b + d).collect();
            let y = base.values.iter().zip(&p).map(|(b, d)| b + c * d).collect();
            (GridFunction::new(x), GridFunction::new(y))
        })
        .collect()
}

/// [`perturbation_pairs`] driven by a ChaCha8 stream seeded with `seed`.
pub fn seeded_perturbation_pairs(
    base: &GridFunction,
    count: usize,
    amplitude: f64,
    seed: u64,
) -> Vec<(GridFunction, GridFunction)> {
    perturbation_pairs(base, count, amplitude, &mut ChaCha8Rng::seed_from_u64(seed))
}
