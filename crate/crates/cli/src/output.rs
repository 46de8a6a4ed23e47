use std::io::Write;
use std::path::Path;

use contactloc_core::{Complex64, Error, Result};
use serde_json::{json, Value};

/// `x` rounded to 15 significant digits.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let rounded: f64 = format!("{x:.14e}").parse().unwrap_or(x);
    json!(rounded)
}

pub fn complex(z: Complex64) -> Value {
    json!({ "re": num(z.re), "im": num(z.im) })
}

/// Pretty JSON to `path` or stdout.
pub fn emit(value: &Value, path: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Internal(e.to_string()))?;
    match path {
        Some(p) => std::fs::write(p, text + "\n").map_err(|e| Error::Config(format!("writing {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            match writeln!(out, "{text}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::Internal(e.to_string())),
                _ => Ok(()),
            }
        }
    }
}

pub fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    let io = |e: csv::Error| Error::Config(format!("writing {}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(row.iter().map(|x| format!("{x:.15e}"))).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Config(format!("writing {}: {e}", path.display())))
}
