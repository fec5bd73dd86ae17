//! Simulation functions ζ, C-class functions G with their constant C_G,
//! Geraghty functions β, and grid-sampled checks of their axioms.
//!
//! Axioms stated as sequence limits (ζ3, the limit half of a C_G
//! simulation function, the defining property of the Geraghty class) are
//! not finitely checkable. Built-in members carry an
//! [`Attestation::ByConstruction`]; anything user supplied is
//! [`Attestation::Unattested`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{Env, Expr, ParseError, Var};
use crate::slack::Slack;

/// Clamp offset for β values that round to 1.
pub const BETA_CLAMP_ETA: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FunctionError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{function} called with non-finite or negative input ({a}, {b})")]
    BadInput { function: String, a: f64, b: f64 },
    #[error("{function} is not finite at ({a}, {b})")]
    Evaluation { function: String, a: f64, b: f64 },
    #[error("beta({t}) = {value} is outside [0, 1)")]
    BetaRange { t: f64, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Attestation {
    /// Limit axioms hold for this built-in family by construction.
    ByConstruction,
    /// User supplied; limit axioms were not checked.
    Unattested,
}

fn parse_inner(source: &Option<String>, default: &str) -> Result<(Expr, bool), FunctionError> {
    match source {
        Some(src) => Ok((Expr::parse(src, &[Var::T])?, false)),
        None => Ok((Expr::parse(default, &[Var::T]).expect("built-in inner function"), true)),
    }
}

fn eval_inner(expr: &Expr, name: &str, at: f64) -> Result<f64, FunctionError> {
    let v = expr.eval(&Env { t: at, s: 0.0, x: 0.0 });
    if v.is_finite() {
        Ok(v)
    } else {
        Err(FunctionError::Evaluation {
            function: format!("{name}({expr})"),
            a: at,
            b: f64::NAN,
        })
    }
}

fn check_inputs(function: &str, a: f64, b: f64) -> Result<(), FunctionError> {
    if a.is_finite() && b.is_finite() && a >= 0.0 && b >= 0.0 {
        Ok(())
    } else {
        Err(FunctionError::BadInput {
            function: function.to_string(),
            a,
            b,
        })
    }
}

/// Serialized form of a simulation function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ZetaSpec {
    /// `λs − t` with `λ ∈ (0, 1)`.
    Linear { lambda: f64 },
    /// `s·φ(s) − t`.
    GeraghtyModulated {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        phi: Option<String>,
    },
    /// `s − ψ(s) − t`.
    PsiShifted {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        psi: Option<String>,
    },
    /// `s/(s+1) − t`.
    Rational,
    /// `s − φ(s) − t` with φ lower semicontinuous.
    PhiLsc {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        phi: Option<String>,
    },
    /// Expression in `t` and `s`.
    Custom { expr: String },
}

#[derive(Debug, Clone, PartialEq)]
enum ZetaForm {
    Linear(f64),
    Modulated(Expr),
    PsiShifted(Expr),
    Rational,
    PhiLsc(Expr),
    Custom(Expr),
}

const DEFAULT_MODULATION: &str = "1/(2+t)";
const DEFAULT_PSI: &str = "t/(1+t)";
const DEFAULT_LSC_PHI: &str = "t/(1+2*t)";

/// A simulation function ζ(t, s).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ZetaSpec", into = "ZetaSpec")]
pub struct Zeta {
    spec: ZetaSpec,
    form: ZetaForm,
    attestation: Attestation,
}

impl From<Zeta> for ZetaSpec {
    fn from(z: Zeta) -> ZetaSpec {
        z.spec
    }
}

impl TryFrom<ZetaSpec> for Zeta {
    type Error = FunctionError;

    fn try_from(spec: ZetaSpec) -> Result<Zeta, FunctionError> {
        let (form, builtin) = match &spec {
            ZetaSpec::Linear { lambda } => {
                if !(*lambda > 0.0 && *lambda < 1.0) {
                    return Err(FunctionError::InvalidParameter {
                        name: "lambda",
                        reason: format!("{lambda} is not in (0, 1)"),
                    });
                }
                (ZetaForm::Linear(*lambda), true)
            }
            ZetaSpec::GeraghtyModulated { phi } => {
                let (e, b) = parse_inner(phi, DEFAULT_MODULATION)?;
                (ZetaForm::Modulated(e), b)
            }
            ZetaSpec::PsiShifted { psi } => {
                let (e, b) = parse_inner(psi, DEFAULT_PSI)?;
                (ZetaForm::PsiShifted(e), b)
            }
            ZetaSpec::Rational => (ZetaForm::Rational, true),
            ZetaSpec::PhiLsc { phi } => {
                let (e, b) = parse_inner(phi, DEFAULT_LSC_PHI)?;
                (ZetaForm::PhiLsc(e), b)
            }
            ZetaSpec::Custom { expr } => (ZetaForm::Custom(Expr::parse(expr, &[Var::T, Var::S])?), false),
        };
        Ok(Zeta {
            spec,
            form,
            attestation: if builtin {
                Attestation::ByConstruction
            } else {
                Attestation::Unattested
            },
        })
    }
}

impl Zeta {
    pub fn from_spec(spec: ZetaSpec) -> Result<Zeta, FunctionError> {
        Zeta::try_from(spec)
    }

    pub fn linear(lambda: f64) -> Result<Zeta, FunctionError> {
        Zeta::try_from(ZetaSpec::Linear { lambda })
    }

    pub fn rational() -> Zeta {
        Zeta::try_from(ZetaSpec::Rational).expect("built-in")
    }

    pub fn custom(expr: &str) -> Result<Zeta, FunctionError> {
        Zeta::try_from(ZetaSpec::Custom { expr: expr.into() })
    }

    /// One member of each built-in family with default parameters.
    pub fn builtins() -> Vec<Zeta> {
        vec![
            Zeta::linear(0.5).expect("built-in"),
            Zeta::try_from(ZetaSpec::GeraghtyModulated { phi: None }).expect("built-in"),
            Zeta::try_from(ZetaSpec::PsiShifted { psi: None }).expect("built-in"),
            Zeta::rational(),
            Zeta::try_from(ZetaSpec::PhiLsc { phi: None }).expect("built-in"),
        ]
    }

    pub fn spec(&self) -> &ZetaSpec {
        &self.spec
    }

    pub fn attestation(&self) -> Attestation {
        self.attestation
    }

    pub fn describe(&self) -> String {
        match &self.form {
            ZetaForm::Linear(l) => format!("{l}*s - t"),
            ZetaForm::Modulated(phi) => format!("s*phi(s) - t, phi(t) = {phi}"),
            ZetaForm::PsiShifted(psi) => format!("s - psi(s) - t, psi(t) = {psi}"),
            ZetaForm::Rational => "s/(s+1) - t".into(),
            ZetaForm::PhiLsc(phi) => format!("s - phi(s) - t, phi(t) = {phi}"),
            ZetaForm::Custom(e) => e.to_string(),
        }
    }

    /// ζ(t, s).
    pub fn eval(&self, t: f64, s: f64) -> Result<f64, FunctionError> {
        check_inputs("zeta", t, s)?;
        let value = match &self.form {
            ZetaForm::Linear(lambda) => lambda * s - t,
            ZetaForm::Modulated(phi) => s * eval_inner(phi, "phi", s)? - t,
            ZetaForm::PsiShifted(psi) => s - eval_inner(psi, "psi", s)? - t,
            ZetaForm::Rational => s / (s + 1.0) - t,
            ZetaForm::PhiLsc(phi) => s - eval_inner(phi, "phi", s)? - t,
            ZetaForm::Custom(e) => e.eval(&Env::ts(t, s)),
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(FunctionError::Evaluation {
                function: format!("zeta = {}", self.describe()),
                a: t,
                b: s,
            })
        }
    }
}

/// Serialized form of a C-class function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CClassSpec {
    /// `s − t`; C_G defaults to `r`, which defaults to 0.
    Difference {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        r: Option<f64>,
        #[serde(rename = "CG", default, skip_serializing_if = "Option::is_none")]
        cg: Option<f64>,
    },
    /// `s − (2+t)t/(1+t)`; C_G defaults to 0.
    RationalPenalty {
        #[serde(rename = "CG", default, skip_serializing_if = "Option::is_none")]
        cg: Option<f64>,
    },
    /// `s/(1+kt)` with `k >= 1`; C_G defaults to `r/(1+k)` with `r` defaulting to 2.
    Damped {
        k: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        r: Option<f64>,
        #[serde(rename = "CG", default, skip_serializing_if = "Option::is_none")]
        cg: Option<f64>,
    },
    /// Expression in `s` and `t`.
    Custom {
        expr: String,
        #[serde(rename = "CG", default, skip_serializing_if = "Option::is_none")]
        cg: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
enum CClassForm {
    Difference,
    RationalPenalty,
    Damped(f64),
    Custom(Expr),
}

/// A C-class function G(s, t) with its constant C_G.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CClassSpec", into = "CClassSpec")]
pub struct CClass {
    spec: CClassSpec,
    form: CClassForm,
    cg: f64,
}

impl From<CClass> for CClassSpec {
    fn from(g: CClass) -> CClassSpec {
        g.spec
    }
}

fn non_negative(name: &'static str, v: f64) -> Result<f64, FunctionError> {
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(FunctionError::InvalidParameter {
            name,
            reason: format!("{v} is not a finite non-negative number"),
        })
    }
}

impl TryFrom<CClassSpec> for CClass {
    type Error = FunctionError;

    fn try_from(spec: CClassSpec) -> Result<CClass, FunctionError> {
        let (form, cg) = match &spec {
            CClassSpec::Difference { r, cg } => {
                let r = non_negative("r", r.unwrap_or(0.0))?;
                (CClassForm::Difference, cg.unwrap_or(r))
            }
            CClassSpec::RationalPenalty { cg } => (CClassForm::RationalPenalty, cg.unwrap_or(0.0)),
            CClassSpec::Damped { k, r, cg } => {
                if !(*k >= 1.0 && k.is_finite()) {
                    return Err(FunctionError::InvalidParameter {
                        name: "k",
                        reason: format!("{k} is not >= 1"),
                    });
                }
                let r = r.unwrap_or(2.0);
                if !(r >= 2.0 && r.is_finite()) {
                    return Err(FunctionError::InvalidParameter {
                        name: "r",
                        reason: format!("{r} is not >= 2"),
                    });
                }
                (CClassForm::Damped(*k), cg.unwrap_or(r / (1.0 + k)))
            }
            CClassSpec::Custom { expr, cg } => (
                CClassForm::Custom(Expr::parse(expr, &[Var::S, Var::T])?),
                cg.unwrap_or(0.0),
            ),
        };
        Ok(CClass {
            spec,
            form,
            cg: non_negative("CG", cg)?,
        })
    }
}

impl CClass {
    pub fn from_spec(spec: CClassSpec) -> Result<CClass, FunctionError> {
        CClass::try_from(spec)
    }

    pub fn difference(cg: f64) -> Result<CClass, FunctionError> {
        CClass::try_from(CClassSpec::Difference { r: None, cg: Some(cg) })
    }

    pub fn damped(k: f64, r: f64) -> Result<CClass, FunctionError> {
        CClass::try_from(CClassSpec::Damped {
            k,
            r: Some(r),
            cg: None,
        })
    }

    pub fn builtins() -> Vec<CClass> {
        vec![
            CClass::difference(0.0).expect("built-in"),
            CClass::try_from(CClassSpec::RationalPenalty { cg: None }).expect("built-in"),
            CClass::damped(1.0, 2.0).expect("built-in"),
        ]
    }

    pub fn spec(&self) -> &CClassSpec {
        &self.spec
    }

    /// The constant C_G.
    pub fn cg(&self) -> f64 {
        self.cg
    }

    pub fn describe(&self) -> String {
        match &self.form {
            CClassForm::Difference => "s - t".into(),
            CClassForm::RationalPenalty => "s - (2+t)t/(1+t)".into(),
            CClassForm::Damped(k) => format!("s/(1+{k}t)"),
            CClassForm::Custom(e) => e.to_string(),
        }
    }

    /// G(s, t), argument order as in the C-class definition.
    pub fn eval(&self, s: f64, t: f64) -> Result<f64, FunctionError> {
        check_inputs("G", s, t)?;
        let value = match &self.form {
            CClassForm::Difference => s - t,
            CClassForm::RationalPenalty => s - (2.0 + t) * t / (1.0 + t),
            CClassForm::Damped(k) => s / (1.0 + k * t),
            CClassForm::Custom(e) => e.eval(&Env::ts(t, s)),
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(FunctionError::Evaluation {
                function: format!("G = {}", self.describe()),
                a: s,
                b: t,
            })
        }
    }
}

/// Serialized form of a Geraghty function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BetaSpec {
    /// `1/(1+t)`.
    Reciprocal,
    /// `c ∈ [0, 1)`.
    Constant { c: f64 },
    /// Expression in `t`.
    Custom { expr: String },
}

#[derive(Debug, Clone, PartialEq)]
enum BetaForm {
    Reciprocal,
    Constant(f64),
    Custom(Expr),
}

/// A β value, flagged when it had to be pulled back inside `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaValue {
    pub value: f64,
    pub clamped: bool,
}

/// A function β: [0, ∞) → [0, 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BetaSpec", into = "BetaSpec")]
pub struct Beta {
    spec: BetaSpec,
    form: BetaForm,
}

impl From<Beta> for BetaSpec {
    fn from(b: Beta) -> BetaSpec {
        b.spec
    }
}

impl TryFrom<BetaSpec> for Beta {
    type Error = FunctionError;

    fn try_from(spec: BetaSpec) -> Result<Beta, FunctionError> {
        let form = match &spec {
            BetaSpec::Reciprocal => BetaForm::Reciprocal,
            BetaSpec::Constant { c } => {
                if !(*c >= 0.0 && *c < 1.0) {
                    return Err(FunctionError::InvalidParameter {
                        name: "c",
                        reason: format!("{c} is not in [0, 1)"),
                    });
                }
                BetaForm::Constant(*c)
            }
            BetaSpec::Custom { expr } => BetaForm::Custom(Expr::parse(expr, &[Var::T])?),
        };
        Ok(Beta { spec, form })
    }
}

impl Beta {
    pub fn from_spec(spec: BetaSpec) -> Result<Beta, FunctionError> {
        Beta::try_from(spec)
    }

    pub fn reciprocal() -> Beta {
        Beta::try_from(BetaSpec::Reciprocal).expect("built-in")
    }

    pub fn constant(c: f64) -> Result<Beta, FunctionError> {
        Beta::try_from(BetaSpec::Constant { c })
    }

    pub fn spec(&self) -> &BetaSpec {
        &self.spec
    }

    pub fn attestation(&self) -> Attestation {
        match self.form {
            BetaForm::Custom(_) => Attestation::Unattested,
            _ => Attestation::ByConstruction,
        }
    }

    pub fn describe(&self) -> String {
        match &self.form {
            BetaForm::Reciprocal => "1/(1+t)".into(),
            BetaForm::Constant(c) => format!("{c}"),
            BetaForm::Custom(e) => e.to_string(),
        }
    }

    /// β(t). The reciprocal form is clamped to `1 − BETA_CLAMP_ETA` where
    /// `1/(1+t)` rounds to 1, which includes `t = 0`.
    pub fn eval(&self, t: f64) -> Result<BetaValue, FunctionError> {
        check_inputs("beta", t, 0.0)?;
        match &self.form {
            BetaForm::Reciprocal => {
                let v = 1.0 / (1.0 + t);
                Ok(if v >= 1.0 {
                    BetaValue {
                        value: 1.0 - BETA_CLAMP_ETA,
                        clamped: true,
                    }
                } else {
                    BetaValue {
                        value: v,
                        clamped: false,
                    }
                })
            }
            BetaForm::Constant(c) => Ok(BetaValue {
                value: *c,
                clamped: false,
            }),
            BetaForm::Custom(e) => {
                let v = e.eval(&Env { t, s: 0.0, x: 0.0 });
                if (0.0..1.0).contains(&v) {
                    Ok(BetaValue {
                        value: v,
                        clamped: false,
                    })
                } else {
                    Err(FunctionError::BetaRange { t, value: v })
                }
            }
        }
    }

    pub fn value(&self, t: f64) -> Result<f64, FunctionError> {
        self.eval(t).map(|b| b.value)
    }
}

/// Per-axis sample points, shared by both axes of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplingGrid {
    values: Vec<f64>,
}

impl Default for SamplingGrid {
    /// Logarithmic, 128 points per axis over `(1e-6, 1e2]`.
    fn default() -> Self {
        SamplingGrid::logarithmic(1e-6, 1e2, 128)
    }
}

impl SamplingGrid {
    /// `n` points `lo·(hi/lo)^(k/n)`, `k = 1..=n`; `lo` itself is excluded.
    pub fn logarithmic(lo: f64, hi: f64, n: usize) -> SamplingGrid {
        assert!(lo > 0.0 && hi > lo && n > 0);
        let ratio = (hi / lo).ln();
        let mut values: Vec<f64> = (1..=n).map(|k| lo * (ratio * k as f64 / n as f64).exp()).collect();
        values[n - 1] = hi;
        SamplingGrid { values }
    }

    /// `n` points `lo + (hi−lo)·k/n`, `k = 1..=n`.
    pub fn uniform(lo: f64, hi: f64, n: usize) -> SamplingGrid {
        assert!(hi > lo && n > 0);
        let mut values: Vec<f64> = (1..=n).map(|k| lo + (hi - lo) * k as f64 / n as f64).collect();
        values[n - 1] = hi;
        SamplingGrid { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    /// ζ(0, 0) = 0.
    ZetaOrigin,
    /// ζ(t, s) < s − t for t, s > 0.
    ZetaBelowDifference,
    /// G(s, t) ≤ s.
    CClassBound,
    /// G(s, t) = s only if s = 0 or t = 0.
    CClassEquality,
    /// G(s, t) > C_G implies s > t.
    CgThreshold,
    /// G(t, t) ≤ C_G.
    CgDiagonal,
    /// ζ(t, s) < G(s, t) for t, s > 0.
    CgSimulation,
}

/// A sampled point with the two compared quantities. `margin` is the raw
/// `bound − value`; negative or zero margins are violations of strict
/// axioms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AxiomSample {
    pub a: f64,
    pub b: f64,
    pub value: f64,
    pub bound: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    pub samples: usize,
    pub violations: usize,
    pub evaluation_errors: usize,
    /// Samples that pass but sit within the slack of the bound.
    pub near_boundary: usize,
    pub min_margin: f64,
    /// The violation with the lexicographically smallest grid index.
    pub counterexample: Option<AxiomSample>,
}

impl AxiomCheck {
    fn new(axiom: Axiom) -> AxiomCheck {
        AxiomCheck {
            axiom,
            samples: 0,
            violations: 0,
            evaluation_errors: 0,
            near_boundary: 0,
            min_margin: f64::INFINITY,
            counterexample: None,
        }
    }

    fn record(&mut self, sample: AxiomSample, ok: bool, slack: Slack) {
        self.samples += 1;
        if sample.margin < self.min_margin {
            self.min_margin = sample.margin;
        }
        if ok {
            if sample.margin.abs() <= slack.eta {
                self.near_boundary += 1;
            }
        } else {
            self.violations += 1;
            self.counterexample.get_or_insert(sample);
        }
    }

    fn record_error(&mut self, a: f64, b: f64) {
        self.samples += 1;
        self.violations += 1;
        self.evaluation_errors += 1;
        self.counterexample.get_or_insert(AxiomSample {
            a,
            b,
            value: f64::NAN,
            bound: f64::NAN,
            margin: f64::NAN,
        });
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub subject: String,
    pub checks: Vec<AxiomCheck>,
    /// Status of the limit axioms that sampling cannot decide.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit_axioms: Option<Attestation>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(AxiomCheck::passed)
    }

    pub fn check(&self, axiom: Axiom) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.axiom == axiom)
    }
}

/// ζ1 at the origin (exact) and ζ2 on every grid point.
///
/// ζ2 is strict, and catalog margins near the origin are of order `s²`, so
/// it is decided by plain floating-point `<` rather than the slack; samples
/// that pass within the slack are counted in `near_boundary`.
pub fn check_zeta_axioms(zeta: &Zeta, grid: &SamplingGrid, slack: Slack) -> AxiomReport {
    let mut origin = AxiomCheck::new(Axiom::ZetaOrigin);
    match zeta.eval(0.0, 0.0) {
        Ok(v) => origin.record(
            AxiomSample {
                a: 0.0,
                b: 0.0,
                value: v,
                bound: 0.0,
                margin: -v.abs(),
            },
            v == 0.0,
            Slack::exact(),
        ),
        Err(_) => origin.record_error(0.0, 0.0),
    }
    let mut below = AxiomCheck::new(Axiom::ZetaBelowDifference);
    for &t in grid.values() {
        for &s in grid.values() {
            match zeta.eval(t, s) {
                Ok(v) => {
                    let bound = s - t;
                    below.record(
                        AxiomSample {
                            a: t,
                            b: s,
                            value: v,
                            bound,
                            margin: bound - v,
                        },
                        v < bound,
                        slack,
                    );
                }
                Err(_) => below.record_error(t, s),
            }
        }
    }
    AxiomReport {
        subject: format!("zeta(t, s) = {}", zeta.describe()),
        checks: vec![origin, below],
        limit_axioms: Some(zeta.attestation()),
    }
}

/// C-class bound and equality conditions plus both halves of property C_G.
/// The diagonal condition is checked in the form `G(t, t) ≤ C_G`.
pub fn check_cg_axioms(g: &CClass, grid: &SamplingGrid, slack: Slack) -> AxiomReport {
    let cg = g.cg();
    let mut bound = AxiomCheck::new(Axiom::CClassBound);
    let mut equality = AxiomCheck::new(Axiom::CClassEquality);
    let mut threshold = AxiomCheck::new(Axiom::CgThreshold);
    for &s in grid.values() {
        for &t in grid.values() {
            let v = match g.eval(s, t) {
                Ok(v) => v,
                Err(_) => {
                    bound.record_error(s, t);
                    equality.record_error(s, t);
                    threshold.record_error(s, t);
                    continue;
                }
            };
            let sample = AxiomSample {
                a: s,
                b: t,
                value: v,
                bound: s,
                margin: s - v,
            };
            bound.record(sample, slack.le(v, s), slack);
            equality.record(sample, v != s || slack.le(s * t, 0.0), Slack::exact());
            threshold.record(
                AxiomSample {
                    a: s,
                    b: t,
                    value: v,
                    bound: cg,
                    margin: cg - v,
                },
                !slack.gt(v, cg) || s > t,
                Slack::exact(),
            );
        }
    }
    let mut diagonal = AxiomCheck::new(Axiom::CgDiagonal);
    for &t in grid.values() {
        match g.eval(t, t) {
            Ok(v) => diagonal.record(
                AxiomSample {
                    a: t,
                    b: t,
                    value: v,
                    bound: cg,
                    margin: cg - v,
                },
                slack.le(v, cg),
                slack,
            ),
            Err(_) => diagonal.record_error(t, t),
        }
    }
    AxiomReport {
        subject: format!("G(s, t) = {}, C_G = {cg}", g.describe()),
        checks: vec![bound, equality, threshold, diagonal],
        limit_axioms: None,
    }
}

/// Sampled half of the C_G simulation function definition:
/// `ζ(t, s) < G(s, t)` for `t, s > 0`, with plain strict comparison.
pub fn check_cg_simulation(zeta: &Zeta, g: &CClass, grid: &SamplingGrid, slack: Slack) -> AxiomReport {
    let mut check = AxiomCheck::new(Axiom::CgSimulation);
    for &t in grid.values() {
        for &s in grid.values() {
            match (zeta.eval(t, s), g.eval(s, t)) {
                (Ok(z), Ok(gv)) => check.record(
                    AxiomSample {
                        a: t,
                        b: s,
                        value: z,
                        bound: gv,
                        margin: gv - z,
                    },
                    z < gv,
                    slack,
                ),
                _ => check.record_error(t, s),
            }
        }
    }
    AxiomReport {
        subject: format!("zeta = {} against G = {}", zeta.describe(), g.describe()),
        checks: vec![check],
        limit_axioms: Some(zeta.attestation()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zeta_examples() {
        assert_eq!(Zeta::linear(0.5).unwrap().eval(1.0, 2.0).unwrap(), 0.0);
        assert_eq!(Zeta::rational().eval(0.0, 0.0).unwrap(), 0.0);
        assert_eq!(Zeta::rational().eval(0.25, 1.0).unwrap(), 0.25);
    }

    #[test]
    fn zeta_rejects_bad_parameters_and_inputs() {
        assert!(Zeta::linear(1.0).is_err());
        assert!(Zeta::linear(0.0).is_err());
        assert!(Zeta::rational().eval(-1.0, 1.0).is_err());
        assert!(Zeta::rational().eval(f64::NAN, 1.0).is_err());
        assert!(Zeta::custom("s - t + x").is_err());
    }

    #[test]
    fn undefined_inner_function_is_an_evaluation_error() {
        let zeta = Zeta::from_spec(ZetaSpec::PsiShifted {
            psi: Some("1/t".into()),
        })
        .unwrap();
        assert!(matches!(zeta.eval(1.0, 0.0), Err(FunctionError::Evaluation { .. })));
        assert_eq!(zeta.attestation(), Attestation::Unattested);
    }

    #[test]
    fn g_examples() {
        let diff = CClass::difference(0.0).unwrap();
        assert_eq!(diff.eval(3.0, 1.0).unwrap(), 2.0);
        assert_eq!(diff.eval(0.7, 0.0).unwrap(), 0.7);
        assert_eq!(CClass::damped(1.0, 2.0).unwrap().eval(2.0, 1.0).unwrap(), 1.0);
        assert_eq!(CClass::damped(1.0, 2.0).unwrap().cg(), 1.0);
        assert!(CClass::damped(0.5, 2.0).is_err());
    }

    #[test]
    fn beta_examples() {
        let recip = Beta::reciprocal();
        let at_zero = recip.eval(0.0).unwrap();
        assert!(at_zero.clamped);
        assert_eq!(at_zero.value, 1.0 - BETA_CLAMP_ETA);
        assert_eq!(
            recip.eval(1.0).unwrap(),
            BetaValue {
                value: 0.5,
                clamped: false
            }
        );
        assert_eq!(Beta::constant(0.5).unwrap().value(123.0).unwrap(), 0.5);
        assert!(Beta::constant(1.0).is_err());
        let custom = Beta::from_spec(BetaSpec::Custom { expr: "1 + t".into() }).unwrap();
        assert!(matches!(custom.eval(0.5), Err(FunctionError::BetaRange { .. })));
        let negative = Beta::from_spec(BetaSpec::Custom { expr: "0 - t".into() }).unwrap();
        assert!(negative.eval(0.5).is_err());
    }

    #[test]
    fn default_grid_shape() {
        let grid = SamplingGrid::default();
        assert_eq!(grid.len(), 128);
        assert!(grid.values()[0] > 1e-6);
        assert_eq!(grid.values()[127], 100.0);
        assert!(grid.values().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn zeta_axiom_reports() {
        let grid = SamplingGrid::default();
        let slack = Slack::default();
        assert!(check_zeta_axioms(&Zeta::linear(0.5).unwrap(), &grid, slack).passed());
        assert!(check_zeta_axioms(&Zeta::rational(), &grid, slack).passed());
        let boundary = check_zeta_axioms(&Zeta::custom("s - t").unwrap(), &grid, slack);
        let below = boundary.check(Axiom::ZetaBelowDifference).unwrap();
        assert_eq!(below.violations, grid.len() * grid.len());
        assert_eq!(boundary.limit_axioms, Some(Attestation::Unattested));
        assert!(boundary.check(Axiom::ZetaOrigin).unwrap().passed());
    }

    #[test]
    fn cg_axiom_reports() {
        let grid = SamplingGrid::default();
        let slack = Slack::default();
        assert!(check_cg_axioms(&CClass::difference(0.0).unwrap(), &grid, slack).passed());
        assert!(check_cg_axioms(&CClass::difference(1.0).unwrap(), &grid, slack).passed());
        assert!(check_cg_axioms(&CClass::damped(1.0, 2.0).unwrap(), &grid, slack).passed());
        // G = s + t breaks every bound.
        let bad = CClass::from_spec(CClassSpec::Custom {
            expr: "s + t".into(),
            cg: None,
        })
        .unwrap();
        let report = check_cg_axioms(&bad, &grid, slack);
        assert!(!report.check(Axiom::CClassBound).unwrap().passed());
        assert!(!report.check(Axiom::CgDiagonal).unwrap().passed());
    }

    #[test]
    fn diagonal_counterexample_is_first_grid_point() {
        let grid = SamplingGrid::uniform(0.0, 1.0, 4);
        let g = CClass::from_spec(CClassSpec::Custom {
            expr: "s".into(),
            cg: Some(0.3),
        })
        .unwrap();
        let report = check_cg_axioms(&g, &grid, Slack::default());
        let diag = report.check(Axiom::CgDiagonal).unwrap();
        assert_eq!(diag.violations, 3);
        let ce = diag.counterexample.unwrap();
        assert_eq!(ce.a, 0.5);
        assert_relative_eq!(ce.margin, -0.2, epsilon = 1e-15);
    }

    #[test]
    fn cg_simulation_reports() {
        let grid = SamplingGrid::default();
        let slack = Slack::default();
        let diff = CClass::difference(0.0).unwrap();
        assert!(check_cg_simulation(&Zeta::rational(), &diff, &grid, slack).passed());
        let boundary = check_cg_simulation(&Zeta::custom("s - t").unwrap(), &diff, &grid, slack);
        assert_eq!(boundary.checks[0].violations, grid.len() * grid.len());
    }
}
