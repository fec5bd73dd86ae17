use serde::{Deserialize, Serialize};

/// Default slack used for every strict and non-strict comparison.
pub const DEFAULT_ETA: f64 = 1e-12;

/// Rounding slack for floating-point comparisons.
///
/// The slack always sides with equality. A strict inequality `a < b` holds
/// only when `a < b - eta`, so a true equality that picked up rounding noise
/// is never mistaken for a strict one. A non-strict `a >= b` holds when
/// `a >= b - eta`. Margins stored in reports are always the raw differences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Slack {
    pub eta: f64,
}

impl Default for Slack {
    fn default() -> Self {
        Slack { eta: DEFAULT_ETA }
    }
}

impl Slack {
    pub fn new(eta: f64) -> Slack {
        assert!(eta >= 0.0 && eta.is_finite(), "slack must be finite and >= 0");
        Slack { eta }
    }

    pub fn exact() -> Slack {
        Slack { eta: 0.0 }
    }

    /// `a < b`, robust against rounding towards equality.
    pub fn lt(&self, a: f64, b: f64) -> bool {
        a < b - self.eta
    }

    /// `a > b`, robust against rounding towards equality.
    pub fn gt(&self, a: f64, b: f64) -> bool {
        a > b + self.eta
    }

    /// `a <= b` up to the slack.
    pub fn le(&self, a: f64, b: f64) -> bool {
        a <= b + self.eta
    }

    /// `a >= b` up to the slack.
    pub fn ge(&self, a: f64, b: f64) -> bool {
        a >= b - self.eta
    }

    /// `a == b` up to the slack.
    pub fn eq(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.eta
    }
}
