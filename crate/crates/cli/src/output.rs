//! Results of a subcommand and their renderings.

use std::fmt::Write;

use serde_json::Value;

pub struct Table {
    /// File stem; written as `<name>.csv`.
    pub name: String,
    pub csv: String,
}

impl Table {
    pub fn new(name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Self {
        let mut csv = header.join(",");
        csv.push('\n');
        for r in rows {
            csv.push_str(&r.join(","));
            csv.push('\n');
        }
        Table { name: name.into(), csv }
    }

    pub fn raw(name: &str, csv: String) -> Self {
        Table { name: name.into(), csv }
    }
}

pub struct Outcome {
    /// Deterministic for deterministic subcommands; copied into the manifest.
    pub summary: Value,
    pub tables: Vec<Table>,
    pub exit_code: i32,
    pub failure: Option<String>,
    /// Replaces the generic `--pretty` rendering.
    pub text: Option<String>,
}

impl Outcome {
    pub fn new(summary: Value) -> Self {
        Outcome { summary, tables: Vec::new(), exit_code: 0, failure: None, text: None }
    }

    pub fn table(mut self, t: Table) -> Self {
        self.tables.push(t);
        self
    }

    pub fn pretty(&self) -> String {
        if let Some(t) = &self.text {
            return t.clone();
        }
        let mut s = String::new();
        render(&mut s, &self.summary, 0);
        for t in &self.tables {
            let _ = writeln!(s, "\n{}.csv", t.name);
            s.push_str(&aligned(&t.csv, 20));
        }
        s
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(a) if a.iter().all(|x| matches!(x, Value::Number(_) | Value::String(_) | Value::Bool(_))) => {
            Some(format!("[{}]", a.iter().map(|x| scalar(x).unwrap()).collect::<Vec<_>>().join(", ")))
        }
        _ => None,
    }
}

fn render(s: &mut String, v: &Value, indent: usize) {
    let pad = " ".repeat(indent);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                match scalar(x) {
                    Some(t) => {
                        let _ = writeln!(s, "{pad}{k}: {t}");
                    }
                    None => {
                        let _ = writeln!(s, "{pad}{k}:");
                        render(s, x, indent + 2);
                    }
                }
            }
        }
        Value::Array(a) if a.is_empty() => {
            let _ = writeln!(s, "{pad}(none)");
        }
        Value::Array(a) if a.iter().all(|x| x.as_object().is_some_and(|o| o.values().all(|y| scalar(y).is_some()))) => {
            let keys: Vec<&String> = a[0].as_object().unwrap().keys().collect();
            let mut csv = keys.iter().map(|k| k.as_str()).collect::<Vec<_>>().join("\t");
            csv.push('\n');
            for x in a {
                let o = x.as_object().unwrap();
                let row: Vec<String> = keys.iter().map(|k| o.get(*k).and_then(scalar).unwrap_or_default()).collect();
                csv.push_str(&row.join("\t"));
                csv.push('\n');
            }
            for line in aligned_with(&csv, '\t', usize::MAX).lines() {
                let _ = writeln!(s, "{pad}{line}");
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                match scalar(x) {
                    Some(t) => {
                        let _ = writeln!(s, "{pad}- {t}");
                    }
                    None => {
                        let _ = writeln!(s, "{pad}[{i}]");
                        render(s, x, indent + 2);
                    }
                }
            }
        }
        other => {
            let _ = writeln!(s, "{pad}{}", scalar(other).unwrap_or_default());
        }
    }
}

fn aligned(csv: &str, max_rows: usize) -> String {
    aligned_with(csv, ',', max_rows)
}

/// Column-aligned text; rows beyond `max_rows` are elided.
fn aligned_with(csv: &str, sep: char, max_rows: usize) -> String {
    let rows: Vec<Vec<&str>> = csv.lines().map(|l| l.split(sep).collect()).collect();
    let ncol = rows.iter().map(Vec::len).max().unwrap_or(0);
    let mut width = vec![0; ncol];
    for r in &rows {
        for (j, c) in r.iter().enumerate() {
            width[j] = width[j].max(c.chars().count());
        }
    }
    let mut out = String::new();
    let shown = rows.len().min(max_rows.saturating_add(1));
    for r in &rows[..shown] {
        let cells: Vec<String> = r.iter().enumerate().map(|(j, c)| format!("{c:>w$}", w = width[j])).collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    if rows.len() > shown {
        let _ = writeln!(out, "... ({} more rows)", rows.len() - shown);
    }
    out
}

/// `key,value` rows for the scalar top-level fields of a summary.
pub fn summary_csv(v: &Value) -> String {
    let mut s = String::from("key,value\n");
    if let Value::Object(m) = v {
        for (k, x) in m {
            if let Some(t) = scalar(x) {
                let t = if t.contains([',', '"']) { format!("\"{}\"", t.replace('"', "\"\"")) } else { t };
                let _ = writeln!(s, "{k},{t}");
            }
        }
    }
    s
}
