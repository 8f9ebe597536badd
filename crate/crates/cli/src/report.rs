//! Reports are built once as JSON values and rendered either verbatim
//! (`--json`) or as an aligned text table, so both outputs carry the same
//! data.

use serde_json::{Map, Value};

pub const SCHEMA_VERSION: u64 = 1;

pub struct Report {
    body: Map<String, Value>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut body = Map::new();
        body.insert("schema".into(), Value::from(SCHEMA_VERSION));
        body.insert("command".into(), Value::from(command));
        Report { body }
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.body.insert(key.to_string(), value.into());
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.body).expect("values are plain JSON");
        s.push('\n');
        s
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        render_object(&self.body, 0, &mut out);
        out
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(items) if items.iter().all(|i| !i.is_object()) => {
            if items.is_empty() {
                return Some("(none)".into());
            }
            let parts: Option<Vec<String>> = items.iter().map(inline).collect();
            parts.map(|p| p.join(", "))
        }
        _ => None,
    }
}

fn inline(v: &Value) -> Option<String> {
    match v {
        Value::Array(items) => {
            let parts: Option<Vec<String>> = items.iter().map(inline).collect();
            parts.map(|p| format!("[{}]", p.join(", ")))
        }
        Value::Object(_) => None,
        other => scalar(other),
    }
}

fn cell(v: &Value) -> String {
    scalar(v).unwrap_or_else(|| v.to_string())
}

fn render_object(obj: &Map<String, Value>, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    let width = obj.keys().map(|k| k.chars().count()).max().unwrap_or(0);
    for (key, value) in obj {
        if let Some(text) = scalar(value) {
            out.push_str(&format!("{pad}{key:<width$}  {text}\n"));
            continue;
        }
        out.push_str(&format!("{pad}{key}\n"));
        match value {
            Value::Object(inner) => render_object(inner, indent + 2, out),
            Value::Array(rows) => render_rows(rows, indent + 2, out),
            _ => unreachable!("scalars handled above"),
        }
    }
}

fn render_rows(rows: &[Value], indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    let mut columns: Vec<&String> = Vec::new();
    for row in rows {
        if let Value::Object(o) = row {
            for k in o.keys() {
                if !columns.contains(&k) {
                    columns.push(k);
                }
            }
        }
    }
    columns.sort();
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|row| {
            columns
                .iter()
                .map(|c| row.get(c.as_str()).map_or_else(|| "-".into(), cell))
                .collect()
        })
        .collect();
    let widths: Vec<usize> = columns
        .iter()
        .enumerate()
        .map(|(i, c)| {
            table
                .iter()
                .map(|r| r[i].chars().count())
                .chain([c.chars().count()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cells: Vec<String>| -> String {
        let joined: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c:<w$}"))
            .collect();
        format!("{pad}{}\n", joined.join("  ").trim_end())
    };
    out.push_str(&line(columns.iter().map(|c| c.to_string()).collect()));
    for r in table {
        out.push_str(&line(r));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn json_has_sorted_keys_and_schema() {
        let mut r = Report::new("demo");
        r.set("zeta", 1).set("alpha", json!([3, 1]));
        let s = r.to_json();
        let a = s.find("\"alpha\"").unwrap();
        let z = s.find("\"zeta\"").unwrap();
        assert!(a < z);
        assert!(s.contains("\"schema\": 1"));
        assert!(s.ends_with("}\n"));
    }

    #[test]
    fn table_renders_rows_and_lists() {
        let mut r = Report::new("demo");
        r.set("h", json!([1, 4]));
        r.set(
            "classes",
            json!([{"rep": 1, "members": [1, 4]}, {"rep": 2, "members": [2, 3]}]),
        );
        let t = r.to_table();
        assert!(t.contains("h        1, 4\n"), "{t}");
        assert!(t.contains("  members  rep\n"), "{t}");
        assert!(t.contains("  2, 3     2\n"), "{t}");
    }

    #[test]
    fn empty_list_and_null() {
        let mut r = Report::new("demo");
        r.set("roots", json!([])).set("n", Value::Null);
        let t = r.to_table();
        assert!(t.contains("(none)"));
        assert!(t.contains("n        -"));
    }
}
