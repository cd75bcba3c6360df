//! Output of flat record lists other than scan rows.

use std::io;

use fbweyl_core::Format;
use serde::Serialize;
use serde_json::Value;

pub fn render<T: Serialize>(records: &[T], format: Format) -> io::Result<Vec<u8>> {
    match format {
        Format::Csv => csv_bytes(records),
        Format::Json => {
            let mut buf = serde_json::to_vec_pretty(records)?;
            buf.push(b'\n');
            Ok(buf)
        }
        Format::Pretty => pretty(records),
    }
}

fn csv_bytes<T: Serialize>(records: &[T]) -> io::Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for r in records {
        w.serialize(r).map_err(io::Error::other)?;
    }
    w.into_inner().map_err(|e| io::Error::other(e.to_string()))
}

fn cell(v: &Value) -> String {
    match v {
        Value::Number(n) => match (n.as_i64(), n.as_u64(), n.as_f64()) {
            (Some(i), _, _) => i.to_string(),
            (_, Some(u), _) => u.to_string(),
            (_, _, Some(x)) if x != 0.0 && x.abs() < 1e-4 => format!("{x:.3e}"),
            (_, _, Some(x)) => format!("{x:.10}"),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

// One "key  value" block per record.
fn pretty<T: Serialize>(records: &[T]) -> io::Result<Vec<u8>> {
    let mut out = String::new();
    for (i, r) in records.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        match serde_json::to_value(r)? {
            Value::Object(map) => {
                let width = map.keys().map(String::len).max().unwrap_or(0);
                for (k, v) in &map {
                    out.push_str(&format!("{k:<width$}  {}\n", cell(v)));
                }
            }
            other => {
                out.push_str(&cell(&other));
                out.push('\n');
            }
        }
    }
    Ok(out.into_bytes())
}
