//! Report assembly: machine-readable JSON with a stable schema plus a
//! human-readable rendering.  Field order is deterministic (sorted keys).

use serde_json::{json, Value};

use crate::special::INSTANTIATION_RULE;

pub struct Report {
    pub command: String,
    pub ok: bool,
    pub json: Value,
}

impl Report {
    pub fn new(command: &str, ok: bool, body: Value) -> Self {
        let json = json!({
            "schema_version": crate::config::SCHEMA_VERSION,
            "command": command,
            "ok": ok,
            "coefficient_surrogate": INSTANTIATION_RULE,
            "result": body,
        });
        Report {
            command: command.into(),
            ok,
            json,
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.json).expect("report serializes")
    }

    /// Plain-text rendering: one line per (key, leaf) pair, stable order.
    pub fn to_human_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "command: {}\nstatus: {}\nnote: {}\n",
            self.command,
            if self.ok { "ok" } else { "FAILED" },
            INSTANTIATION_RULE
        ));
        render(&self.json["result"], "", &mut out);
        out
    }
}

fn render(v: &Value, prefix: &str, out: &mut String) {
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                render(val, &key, out);
            }
        }
        Value::Array(items) => {
            if items.iter().all(|x| !x.is_object() && !x.is_array()) {
                let flat: Vec<String> = items.iter().map(plain).collect();
                out.push_str(&format!("{prefix}: [{}]\n", flat.join(", ")));
            } else {
                for (i, item) in items.iter().enumerate() {
                    render(item, &format!("{prefix}[{i}]"), out);
                }
            }
        }
        other => out.push_str(&format!("{prefix}: {}\n", plain(other))),
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
