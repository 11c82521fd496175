//! Verdicts and counterexample certificates emitted by the property
//! suites. A failing verdict always carries enough data to replay the
//! violation offline: the offending elements, the violated inequality
//! and the measured margin.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::space::Element;

/// Counterexample certificate: named inputs plus the violated inequality
/// and its measured margin (negative means violation depth).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Counterexample {
    pub inequality: String,
    pub margin: f64,
    /// Named element payloads in the shared wire format.
    pub inputs: serde_json::Map<String, Value>,
}

impl Counterexample {
    pub fn new(inequality: impl Into<String>, margin: f64) -> Self {
        Counterexample {
            inequality: inequality.into(),
            margin,
            inputs: serde_json::Map::new(),
        }
    }

    pub fn with_element(mut self, name: &str, element: &Element) -> Self {
        self.inputs.insert(name.to_string(), element.to_json());
        self
    }

    pub fn with_value(mut self, name: &str, value: Value) -> Self {
        self.inputs.insert(name.to_string(), value);
        self
    }
}

/// Outcome of one property suite run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub samples: usize,
    pub skipped: usize,
    pub passed: bool,
    pub seed: u64,
    /// Worst margin observed across samples, when the suite measures one.
    pub margin: Option<f64>,
    pub counterexample: Option<Counterexample>,
    /// Free-form flags a suite wants to surface (e.g. set-equality checks
    /// that are reported without being asserted).
    #[serde(default, skip_serializing_if = "serde_json::Map::is_empty")]
    pub flags: serde_json::Map<String, Value>,
}

impl Verdict {
    pub fn pass(name: impl Into<String>, samples: usize, seed: u64) -> Self {
        Verdict {
            name: name.into(),
            samples,
            skipped: 0,
            passed: true,
            seed,
            margin: None,
            counterexample: None,
            flags: serde_json::Map::new(),
        }
    }

    pub fn fail(name: impl Into<String>, samples: usize, seed: u64, ce: Counterexample) -> Self {
        Verdict {
            name: name.into(),
            samples,
            skipped: 0,
            passed: false,
            seed,
            margin: Some(ce.margin),
            counterexample: Some(ce),
            flags: serde_json::Map::new(),
        }
    }

    pub fn with_margin(mut self, margin: f64) -> Self {
        self.margin = Some(margin);
        self
    }

    pub fn with_skipped(mut self, skipped: usize) -> Self {
        self.skipped = skipped;
        self
    }

    pub fn with_flag(mut self, name: &str, value: Value) -> Self {
        self.flags.insert(name.to_string(), value);
        self
    }
}

/// Tracks the worst (most negative) margin seen so far.
#[derive(Debug, Default, Clone, Copy)]
pub struct MarginTracker {
    worst: Option<f64>,
}

impl MarginTracker {
    pub fn observe(&mut self, margin: f64) {
        self.worst = Some(match self.worst {
            Some(w) => w.min(margin),
            None => margin,
        });
    }

    pub fn worst(&self) -> Option<f64> {
        self.worst
    }
}
