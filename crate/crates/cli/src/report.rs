use std::fmt::Write as _;

use hassett_core::chamber::{generate_walls, wall_hash};
use hassett_core::marks::MarkSet;
use serde::Serialize;
use serde_json::{Map, Value};

pub const REPORT_SCHEMA: &str = "hassett-report/1";

#[derive(Clone, Debug, Serialize)]
pub struct WallOrder {
    pub n: usize,
    pub hash: String,
    pub subsets: Vec<MarkSet>,
}

impl WallOrder {
    pub fn for_n(n: usize) -> Option<Self> {
        let subsets: Vec<MarkSet> = generate_walls(n).ok()?.iter().map(|w| w.subset).collect();
        Some(WallOrder {
            n,
            hash: wall_hash(&subsets),
            subsets,
        })
    }
}

/// Everything a subcommand prints. Maps are `BTreeMap`-backed, so key order
/// is fixed and serialisation is byte-stable.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub version: &'static str,
    pub command: String,
    pub inputs: Map<String, Value>,
    pub walls: Option<WallOrder>,
    pub results: Value,
    pub passed: bool,
}

impl RunReport {
    pub fn new(command: &str, walls_for: usize) -> Self {
        RunReport {
            schema: REPORT_SCHEMA,
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            inputs: Map::new(),
            walls: WallOrder::for_n(walls_for),
            results: Value::Null,
            passed: true,
        }
    }

    pub fn input(mut self, key: &str, value: impl Serialize) -> Self {
        self.inputs.insert(key.to_string(), to_value(value));
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report values are plain JSON");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {} ({})", self.command, if self.passed { "ok" } else { "FAILED" }, self.schema);
        if !self.inputs.is_empty() {
            out.push_str("inputs:\n");
            render_map(&mut out, &self.inputs, 1);
        }
        if let Some(w) = &self.walls {
            let _ = writeln!(out, "walls: n = {}, {} walls, hash {}", w.n, w.subsets.len(), w.hash);
        }
        out.push_str("results:\n");
        match &self.results {
            Value::Object(m) => render_map(&mut out, m, 1),
            other => {
                let _ = writeln!(out, "  {}", inline(other));
            }
        }
        out
    }
}

pub fn to_value(value: impl Serialize) -> Value {
    serde_json::to_value(value).expect("report values are plain JSON")
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Array(xs) => xs.iter().all(|x| !matches!(x, Value::Object(_)) && (!x.is_array() || is_flat(x))),
        Value::Object(_) => false,
        _ => true,
    }
}

fn inline(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(xs) => format!("[{}]", xs.iter().map(inline).collect::<Vec<_>>().join(", ")),
        other => other.to_string(),
    }
}

fn render_map(out: &mut String, m: &Map<String, Value>, depth: usize) {
    let pad = "  ".repeat(depth);
    for (k, v) in m {
        match v {
            Value::Object(inner) => {
                let _ = writeln!(out, "{pad}{k}:");
                render_map(out, inner, depth + 1);
            }
            Value::Array(xs) if !is_flat(v) => {
                let _ = writeln!(out, "{pad}{k}:");
                for x in xs {
                    match x {
                        Value::Object(inner) => {
                            let _ = writeln!(out, "{pad}  -");
                            render_map(out, inner, depth + 2);
                        }
                        other => {
                            let _ = writeln!(out, "{pad}  - {}", inline(other));
                        }
                    }
                }
            }
            other => {
                let _ = writeln!(out, "{pad}{k}: {}", inline(other));
            }
        }
    }
}
