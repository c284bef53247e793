use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Value of a metric: a number, a vector of numbers, or nothing for rows that
/// are documented but not measured.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetricValue {
    Scalar(f64),
    Vector(Vec<f64>),
    Missing,
}

impl From<f64> for MetricValue {
    fn from(v: f64) -> Self {
        MetricValue::Scalar(v)
    }
}

impl From<Vec<f64>> for MetricValue {
    fn from(v: Vec<f64>) -> Self {
        MetricValue::Vector(v)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub value: MetricValue,
    pub oracle: Option<f64>,
    pub tolerance: Option<f64>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Entry {
    /// `pass ⇔ |value − oracle| ≤ tolerance`.
    pub fn against_oracle(value: f64, oracle: f64, tolerance: f64) -> Self {
        Self {
            value: value.into(),
            oracle: Some(oracle),
            tolerance: Some(tolerance),
            pass: (value - oracle).abs() <= tolerance,
            note: None,
        }
    }

    pub fn at_most(value: f64, bound: f64) -> Self {
        Self::bounded(value, value <= bound, format!("requires value <= {bound}"))
    }

    pub fn at_least(value: f64, bound: f64) -> Self {
        Self::bounded(value, value >= bound, format!("requires value >= {bound}"))
    }

    pub fn bounded(value: impl Into<MetricValue>, pass: bool, note: impl Into<String>) -> Self {
        Self {
            value: value.into(),
            oracle: None,
            tolerance: None,
            pass,
            note: Some(note.into()),
        }
    }

    /// Reported physical signal with no pass criterion.
    pub fn reported(value: impl Into<MetricValue>, note: impl Into<String>) -> Self {
        Self::bounded(value, true, note)
    }

    pub fn documented(note: impl Into<String>) -> Self {
        Self {
            value: MetricValue::Missing,
            oracle: None,
            tolerance: None,
            pass: true,
            note: Some(note.into()),
        }
    }

    pub fn failed(reason: impl Into<String>) -> Self {
        Self {
            value: MetricValue::Missing,
            oracle: None,
            tolerance: None,
            pass: false,
            note: Some(reason.into()),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Re-derives `pass` from value, oracle and tolerance where an oracle exists.
    pub fn is_consistent(&self) -> bool {
        match (&self.value, self.oracle, self.tolerance) {
            (MetricValue::Scalar(v), Some(o), Some(t)) => self.pass == ((v - o).abs() <= t),
            _ => true,
        }
    }
}

/// Named metrics with stable (sorted) key order.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DiagnosticReport {
    pub entries: BTreeMap<String, Entry>,
}

impl DiagnosticReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, entry: Entry) {
        self.entries.insert(name.into(), entry);
    }

    /// Inserts the entry, or a failed entry carrying the error message.
    pub fn record<E: std::fmt::Display>(&mut self, name: &str, entry: Result<Entry, E>) {
        let entry = entry.unwrap_or_else(|e| Entry::failed(e.to_string()));
        self.insert(name, entry);
    }

    pub fn merge(&mut self, other: DiagnosticReport) {
        self.entries.extend(other.entries);
    }

    pub fn get(&self, name: &str) -> Option<&Entry> {
        self.entries.get(name)
    }

    pub fn all_pass(&self) -> bool {
        self.entries.values().all(|e| e.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = (&str, &Entry)> {
        self.entries
            .iter()
            .filter(|(_, e)| !e.pass)
            .map(|(k, e)| (k.as_str(), e))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// One `PASS`/`FAIL` line per metric.
    pub fn summary_lines(&self) -> Vec<String> {
        self.entries
            .iter()
            .map(|(name, e)| {
                let value = match &e.value {
                    MetricValue::Scalar(v) => format!("{v:.6}"),
                    MetricValue::Vector(v) => format!("{v:?}"),
                    MetricValue::Missing => "-".to_owned(),
                };
                let mut line = format!("{} {name} = {value}", if e.pass { "PASS" } else { "FAIL" });
                if let (Some(o), Some(t)) = (e.oracle, e.tolerance) {
                    line.push_str(&format!(" (oracle {o:.6} ± {t:e})"));
                }
                if let Some(n) = &e.note {
                    line.push_str(&format!(" [{n}]"));
                }
                line
            })
            .collect()
    }
}
