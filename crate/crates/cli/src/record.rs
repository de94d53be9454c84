use std::fmt::Write as _;

use metageo_core::schema::{FlowJson, TreeJson, WreathElementJson};
use metageo_core::WalkSolution;
use serde::{Deserialize, Serialize};

/// One output line. `length` is set by exact methods, `estimate` by
/// heuristics; `ratio = estimate / exact` appears only when both are known.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub line: usize,
    pub input: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimate: Option<u64>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub method: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub element: Option<WreathElementJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flow: Option<FlowJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kirchhoff: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tree: Option<TreeJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub walk: Option<WalkSolution>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub wall_ms: f64,
}

impl ResultRecord {
    pub fn new(line: usize, input: &str) -> Self {
        ResultRecord {
            line,
            input: input.to_string(),
            ..Default::default()
        }
    }

    pub fn failed(line: usize, input: &str, error: impl ToString) -> Self {
        ResultRecord {
            error: Some(error.to_string()),
            ..ResultRecord::new(line, input)
        }
    }

    pub fn is_error(&self) -> bool {
        self.error.is_some()
    }

    /// Records the main value as exact or as an estimate.
    pub fn set_value(&mut self, value: u64, exact: bool) {
        if exact {
            self.length = Some(value);
        } else {
            self.estimate = Some(value);
        }
    }

    pub fn set_exact(&mut self, exact: u64) {
        self.exact = Some(exact);
        self.ratio = self.estimate.map(|e| ratio(e, exact));
    }

    /// Tab-separated `key=value` fields; structured payloads as compact JSON.
    pub fn to_text(&self) -> String {
        let mut s = format!("{}\t{}", self.line, self.input);
        if let Some(e) = &self.error {
            let _ = write!(s, "\terror={e}");
            return s;
        }
        let mut field = |key: &str, value: Option<String>| {
            if let Some(v) = value {
                let _ = write!(s, "\t{key}={v}");
            }
        };
        field("length", self.length.map(|v| v.to_string()));
        field("estimate", self.estimate.map(|v| v.to_string()));
        field("method", Some(self.method.clone()).filter(|m| !m.is_empty()));
        field("exact", self.exact.map(|v| v.to_string()));
        field("ratio", self.ratio.map(|v| format!("{v:.4}")));
        field("word", self.word.clone());
        field("kirchhoff", self.kirchhoff.map(|v| v.to_string()));
        field("element", self.element.as_ref().map(json));
        field("flow", self.flow.as_ref().map(json));
        field("tree", self.tree.as_ref().map(json));
        field("walk", self.walk.as_ref().map(json));
        s
    }
}

/// `estimate / exact`, with `0 / 0` read as 1.
pub fn ratio(estimate: u64, exact: u64) -> f64 {
    if exact == 0 {
        if estimate == 0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        estimate as f64 / exact as f64
    }
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("plain data serializes")
}
