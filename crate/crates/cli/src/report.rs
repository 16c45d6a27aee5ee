//! Deterministic JSON reports.

use std::path::Path;

use serde_json::{Map, Number, Value};
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: &str = "1";

/// Formats `x` with 12 significant digits in positional notation.
pub fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return "0.00000000000".to_string();
    }
    let sci = format!("{:.11e}", x.abs());
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let sign = if x < 0.0 { "-" } else { "" };
    let point = exp + 1;
    let body = if point <= 0 {
        format!("0.{}{}", "0".repeat((-point) as usize), digits)
    } else if point as usize >= digits.len() {
        format!("{}{}", digits, "0".repeat(point as usize - digits.len()))
    } else {
        let (a, b) = digits.split_at(point as usize);
        format!("{a}.{b}")
    };
    format!("{sign}{body}")
}

pub fn num(x: f64) -> Value {
    Value::Number(sig12(x).parse::<Number>().expect("valid JSON number"))
}

/// Digest over input names and contents, in the order given.
pub fn inputs_digest(inputs: &[(String, String)]) -> String {
    let mut h = Sha256::new();
    for (name, text) in inputs {
        h.update(name.as_bytes());
        h.update([0]);
        h.update(text.as_bytes());
        h.update([0]);
    }
    hex::encode(h.finalize())
}

#[derive(Debug, Default)]
pub struct Report {
    pub command: Vec<String>,
    pub inputs: Vec<(String, String)>,
    pub results: Map<String, Value>,
    pub flags: Map<String, Value>,
    pub witnesses: Vec<Value>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(command: &[String]) -> Self {
        Report {
            command: command.to_vec(),
            ..Report::default()
        }
    }

    pub fn input(&mut self, path: &Path, text: &str) {
        self.inputs.push((path.display().to_string(), text.to_string()));
    }

    pub fn result(&mut self, key: &str, v: impl Into<Value>) {
        self.results.insert(key.to_string(), v.into());
    }

    pub fn flag(&mut self, key: &str, v: impl Into<Value>) {
        self.flags.insert(key.to_string(), v.into());
    }

    pub fn to_value(&self) -> Value {
        let mut m = Map::new();
        m.insert("schemaVersion".into(), SCHEMA_VERSION.into());
        m.insert("command".into(), self.command.clone().into());
        m.insert("inputsDigest".into(), inputs_digest(&self.inputs).into());
        m.insert("results".into(), Value::Object(self.results.clone()));
        m.insert("flags".into(), Value::Object(self.flags.clone()));
        m.insert("witnesses".into(), Value::Array(self.witnesses.clone()));
        if !self.warnings.is_empty() {
            m.insert("warnings".into(), self.warnings.clone().into());
        }
        Value::Object(m)
    }

    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("serializable");
        s.push('\n');
        s
    }
}
