//! Machine-readable command reports.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::field::Prime;
use crate::poset::Side;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub prime: Prime,
    pub max_degree: usize,
    pub side: Side,
    pub seed: Option<u64>,
    pub verify_steps: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: Vec<String>,
    pub config: Config,
    pub results: Value,
    pub verdict: Option<String>,
    pub timing: Timing,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    /// JSON without the `timing` field, for comparing runs.
    pub fn stable_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("reports serialize");
        if let Value::Object(map) = &mut v {
            map.remove("timing");
        }
        serde_json::to_string_pretty(&v).expect("values serialize")
    }

    /// Indented `key: value` lines.
    pub fn to_text(&self) -> String {
        let mut out = format!("command: {}\n", self.command.join(" "));
        out.push_str(&format!(
            "config: prime={} max_degree={} side={} seed={} verify_steps={}\n",
            self.config.prime,
            self.config.max_degree,
            self.config.side.as_str(),
            self.config.seed.map_or("-".to_string(), |s| s.to_string()),
            self.config.verify_steps
        ));
        write_value(&mut out, "results", &self.results, 0);
        if let Some(v) = &self.verdict {
            out.push_str(&format!("verdict: {v}\n"));
        }
        out.push_str(&format!("elapsed_ms: {:.3}\n", self.timing.elapsed_ms));
        out
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("null".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(items) if items.iter().all(|x| !x.is_object()) => {
            let inner: Vec<String> = items
                .iter()
                .map(|x| scalar(x).unwrap_or_else(|| x.to_string()))
                .collect();
            Some(format!("[{}]", inner.join(", ")))
        }
        _ => None,
    }
}

fn write_value(out: &mut String, key: &str, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    if let Some(s) = scalar(v) {
        out.push_str(&format!("{pad}{key}: {s}\n"));
        return;
    }
    out.push_str(&format!("{pad}{key}:\n"));
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                write_value(out, k, x, depth + 1);
            }
        }
        Value::Array(items) => {
            for (k, x) in items.iter().enumerate() {
                write_value(out, &format!("- {k}"), x, depth + 1);
            }
        }
        _ => unreachable!("scalars handled above"),
    }
}
