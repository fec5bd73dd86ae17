//! Problem files: a finite space, a self-map, α, and the functions a
//! contraction kind needs.
//!
//! ```json
//! {
//!   "points": ["0", "1/9", "1/2", "1", "2"],
//!   "metric": "euclidean1d",
//!   "map": {"0": "1/2", "1/9": "1/2", "1/2": "1/2", "1": "1/2", "2": "1/9"},
//!   "alpha": {"default": 0.0, "entries": [["0", "1/2", 1.0]]},
//!   "zeta": {"kind": "rational"},
//!   "G": {"kind": "difference", "CG": 0.0},
//!   "beta": {"kind": "reciprocal"}
//! }
//! ```
//!
//! Labels are matched by exact value, so `"0.5"` and `"1/2"` name the same
//! point.

use serde::Deserialize;
use thiserror::Error;

use crate::functions::{Beta, CClass, FunctionError, Zeta};
use crate::metric::{AdmissibilityMap, FiniteMetricSpace, MetricError, Point, SelfMap};
use crate::slack::{Slack, DEFAULT_ETA};
use crate::verifier::{ContractionKind, KIND_NAMES};

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("malformed problem JSON at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Function(#[from] FunctionError),
    #[error("map has no image for point `{0}`")]
    MapMissing(String),
    #[error("map key `{0}` is listed twice")]
    MapDuplicate(String),
    #[error("unknown metric `{0}`; expected \"euclidean1d\" or {{\"table\": [[...]]}}")]
    UnknownMetric(String),
    #[error("unknown contraction kind `{name}`; valid kinds: {}", KIND_NAMES.join(", "))]
    UnknownKind { name: String },
    #[error("kind `banach` needs a \"lambda\" in [0, 1), got {0:?}")]
    BadLambda(Option<f64>),
    #[error("eta must be finite and non-negative, got {0}")]
    BadEta(f64),
}

impl From<serde_json::Error> for ProblemError {
    fn from(err: serde_json::Error) -> ProblemError {
        ProblemError::Json {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }
}

/// A point label written as a string or a bare JSON number.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Text(String),
    Number(f64),
}

impl Label {
    pub fn text(&self) -> String {
        match self {
            Label::Text(s) => s.clone(),
            Label::Number(v) => v.to_string(),
        }
    }

    fn resolve(&self, space: &FiniteMetricSpace) -> Result<usize, MetricError> {
        match self {
            Label::Text(s) => space.index_of(s),
            Label::Number(v) => space.index_of(&Point::from_f64(*v)?.label),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum MetricSpec {
    Named(String),
    Table { table: Vec<Vec<Option<f64>>> },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphaSpec {
    #[serde(default)]
    pub default: Option<f64>,
    #[serde(default)]
    pub entries: Vec<(Label, Label, f64)>,
}

/// The raw file contents.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub points: Vec<Label>,
    pub metric: MetricSpec,
    pub map: serde_json::Map<String, serde_json::Value>,
    #[serde(default)]
    pub alpha: Option<AlphaSpec>,
    #[serde(default)]
    pub zeta: Option<Zeta>,
    #[serde(default, rename = "G")]
    pub g: Option<CClass>,
    #[serde(default)]
    pub beta: Option<Beta>,
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub eta: Option<f64>,
}

/// A loaded, structurally valid problem.
#[derive(Debug, Clone)]
pub struct Problem {
    pub space: FiniteMetricSpace,
    pub map: SelfMap,
    pub alpha: Option<AdmissibilityMap>,
    pub zeta: Zeta,
    pub g: CClass,
    pub beta: Beta,
    pub lambda: Option<f64>,
    pub slack: Slack,
}

impl Problem {
    pub fn from_json_str(src: &str) -> Result<Problem, ProblemError> {
        let file: ProblemFile = serde_json::from_str(src)?;
        Problem::from_file(file)
    }

    pub fn from_file(file: ProblemFile) -> Result<Problem, ProblemError> {
        let points = file
            .points
            .iter()
            .map(|l| Point::parse(&l.text()))
            .collect::<Result<Vec<_>, _>>()?;
        let space = match file.metric {
            MetricSpec::Named(name) if name == "euclidean1d" => FiniteMetricSpace::euclidean_points(points)?,
            MetricSpec::Named(name) => return Err(ProblemError::UnknownMetric(name)),
            MetricSpec::Table { table } => FiniteMetricSpace::from_table(points, table)?,
        };

        let mut images: Vec<Option<usize>> = vec![None; space.len()];
        for (key, value) in &file.map {
            let x = space.index_of(key)?;
            let label: Label = serde_json::from_value(value.clone())?;
            if images[x].is_some() {
                return Err(ProblemError::MapDuplicate(key.clone()));
            }
            images[x] = Some(label.resolve(&space)?);
        }
        let table = images
            .iter()
            .enumerate()
            .map(|(x, img)| img.ok_or_else(|| ProblemError::MapMissing(space.label(x).to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        let map = SelfMap::new(table, space.len())?;

        let alpha = match file.alpha {
            None => None,
            Some(spec) => {
                let entries = spec
                    .entries
                    .iter()
                    .map(|(x, y, v)| Ok((x.resolve(&space)?, y.resolve(&space)?, *v)))
                    .collect::<Result<Vec<_>, MetricError>>()?;
                Some(AdmissibilityMap::from_entries(space.len(), spec.default, &entries)?)
            }
        };

        let eta = file.eta.unwrap_or(DEFAULT_ETA);
        if !(eta.is_finite() && eta >= 0.0) {
            return Err(ProblemError::BadEta(eta));
        }
        Ok(Problem {
            space,
            map,
            alpha,
            zeta: file.zeta.unwrap_or_else(Zeta::rational),
            g: match file.g {
                Some(g) => g,
                None => CClass::difference(0.0)?,
            },
            beta: file.beta.unwrap_or_else(Beta::reciprocal),
            lambda: file.lambda,
            slack: Slack::new(eta),
        })
    }

    /// The contraction condition called `name`, built from this problem's
    /// functions.
    pub fn kind(&self, name: &str) -> Result<ContractionKind, ProblemError> {
        Ok(match name {
            "banach" => match self.lambda {
                Some(lambda) if (0.0..1.0).contains(&lambda) => ContractionKind::Banach { lambda },
                other => return Err(ProblemError::BadLambda(other)),
            },
            "z-contraction" => ContractionKind::ZContraction {
                zeta: self.zeta.clone(),
            },
            "suzuki" => ContractionKind::Suzuki,
            "suzuki-z" => ContractionKind::SuzukiZ {
                zeta: self.zeta.clone(),
            },
            "geraghty" => ContractionKind::Geraghty {
                beta: self.beta.clone(),
            },
            "alpha-geraghty" => ContractionKind::AlphaGeraghty {
                beta: self.beta.clone(),
            },
            "suzuki-zag-geraghty" => ContractionKind::SuzukiZagGeraghty {
                zeta: self.zeta.clone(),
                g: self.g.clone(),
                beta: self.beta.clone(),
            },
            _ => return Err(ProblemError::UnknownKind { name: name.to_string() }),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verifier::verify;

    const EXAMPLE: &str = r#"{
        "points": ["0", "1/9", "1/2", "1", "2"],
        "metric": "euclidean1d",
        "map": {"0": "1/2", "1/9": "1/2", "0.5": "1/2", "1": "1/2", "2": "1/9"},
        "alpha": {"default": 0.0, "entries": [
            ["0","0",1], ["0","1/2",1], ["0","1",1],
            ["1/2","0",1], ["1/2","1/2",1], ["1/2","1",1],
            ["1","0",1], ["1","1/2",1], ["1","1",1]
        ]}
    }"#;

    #[test]
    fn loads_the_example() {
        let p = Problem::from_json_str(EXAMPLE).unwrap();
        assert_eq!(p.space.len(), 5);
        assert_eq!(p.map.table(), &[2, 2, 2, 2, 1]);
        let alpha = p.alpha.as_ref().unwrap();
        assert_eq!(alpha.get(0, 3), 1.0);
        assert_eq!(alpha.get(4, 2), 0.0);
        assert_eq!(p.g.cg(), 0.0);
        let report = verify(
            &p.space,
            &p.map,
            p.alpha.as_ref(),
            &p.kind("suzuki-zag-geraghty").unwrap(),
            p.slack,
        )
        .unwrap();
        assert!(report.holds);
    }

    #[test]
    fn json_errors_carry_positions() {
        match Problem::from_json_str("{\n  \"points\": [\"0\",\n}").unwrap_err() {
            ProblemError::Json { line, column, .. } => {
                assert_eq!(line, 3);
                assert!(column > 0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_kind_lists_valid_kinds() {
        let p = Problem::from_json_str(EXAMPLE).unwrap();
        let msg = p.kind("contraction").unwrap_err().to_string();
        for name in KIND_NAMES {
            assert!(msg.contains(name), "{msg}");
        }
        assert!(matches!(p.kind("banach"), Err(ProblemError::BadLambda(None))));
    }

    #[test]
    fn structural_errors() {
        let missing = r#"{"points": ["0", "1"], "metric": "euclidean1d", "map": {"0": "1"}}"#;
        assert!(matches!(Problem::from_json_str(missing), Err(ProblemError::MapMissing(l)) if l == "1"));
        let unknown = r#"{"points": ["0", "1"], "metric": "euclidean1d", "map": {"0": "1", "1": "3"}}"#;
        assert!(matches!(
            Problem::from_json_str(unknown),
            Err(ProblemError::Metric(MetricError::UnknownPoint { .. }))
        ));
        let metric = r#"{"points": ["0"], "metric": "taxicab", "map": {"0": "0"}}"#;
        assert!(matches!(
            Problem::from_json_str(metric),
            Err(ProblemError::UnknownMetric(_))
        ));
        let table = r#"{"points": ["a0", "1"], "metric": {"table": [[0, 1], [1, null]]}, "map": {"0": "1", "1": "1"}}"#;
        assert!(Problem::from_json_str(table).is_err());
        let table = r#"{"points": ["0", "1"], "metric": {"table": [[0, 1], [1, null]]}, "map": {"0": "1", "1": "1"}}"#;
        assert!(matches!(
            Problem::from_json_str(table),
            Err(ProblemError::Metric(MetricError::MissingEntry { row: 1, col: 1 }))
        ));
    }

    #[test]
    fn function_fragments_and_numeric_labels() {
        let src = r#"{
            "points": [0, 0.5, 1],
            "metric": {"table": [[0, 1, 2], [1, 0, 1], [2, 1, 0]]},
            "map": {"0": 0.5, "1/2": "0.5", "1": "1/2"},
            "zeta": {"kind": "linear", "lambda": 0.5},
            "G": {"kind": "damped", "k": 1},
            "beta": {"kind": "constant", "c": 0.5},
            "lambda": 0.5
        }"#;
        let p = Problem::from_json_str(src).unwrap();
        assert_eq!(p.map.table(), &[1, 1, 1]);
        assert_eq!(p.g.cg(), 1.0);
        assert!(matches!(p.kind("banach").unwrap(), ContractionKind::Banach { lambda } if lambda == 0.5));
    }
}
