//! Artifact writing: 12-significant-digit floats, config hashing and the
//! report envelope.

use std::path::{Path, PathBuf};

use dicke_core::qstate::{Axis, MeasurementSetting, Plane};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::CliError;

/// Significant digits of every printed float.
pub const SIG_DIGITS: usize = 12;

/// `x` rounded to [`SIG_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIG_DIGITS - 1, x).parse().expect("formatted float parses")
}

/// Shortest text of the rounded value.
pub fn fmt_sig(x: f64) -> String {
    let r = round_sig(x);
    if r == 0.0 {
        "0".into()
    } else {
        format!("{r}")
    }
}

/// Rounds every float in a JSON tree in place.
pub fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().map(round_sig).and_then(serde_json::Number::from_f64) {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

/// Lower-case hex SHA-256 of the compact JSON form of `config`.
pub fn config_hash<T: Serialize>(config: &T) -> String {
    let text = serde_json::to_string(config).expect("config serializes");
    hex::encode(Sha256::digest(text.as_bytes()))
}

#[derive(Clone, Debug, Serialize)]
pub struct Versions {
    pub dicke_core: &'static str,
    pub dicke_tool: &'static str,
}

pub fn versions() -> Versions {
    Versions { dicke_core: dicke_core::VERSION, dicke_tool: env!("CARGO_PKG_VERSION") }
}

/// Wrapper stored around every report.
#[derive(Clone, Debug, Serialize)]
pub struct Envelope<'a, R: Serialize> {
    pub command: &'a str,
    pub config_hash: &'a str,
    pub versions: Versions,
    pub report: &'a R,
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Pretty JSON with rounded floats and a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("artifact serializes");
    round_json(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("json value serializes");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    std::fs::write(&path, to_json_string(value)).map_err(|e| io_err(&path, e))?;
    Ok(path)
}

/// Writes a header and rows of preformatted fields.
pub fn write_csv(dir: &Path, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    let mut w = csv::Writer::from_path(&path).map_err(|e| io_err(&path, e))?;
    w.write_record(header).map_err(|e| io_err(&path, e))?;
    for row in rows {
        w.write_record(row).map_err(|e| io_err(&path, e))?;
    }
    w.flush().map_err(|e| io_err(&path, e))?;
    Ok(path)
}

pub fn write_text(dir: &Path, name: &str, text: &str) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|e| io_err(&path, e))?;
    Ok(path)
}

fn axis_label(a: &Axis) -> String {
    match *a {
        Axis::X => "x".into(),
        Axis::Y => "y".into(),
        Axis::Z => "z".into(),
        Axis::InPlane { plane, angle } => {
            let p = match plane {
                Plane::Xz => "xz",
                Plane::Yz => "yz",
                Plane::Xy => "xy",
            };
            format!("{p}({})", fmt_sig(angle))
        }
        Axis::Direction { x, y, z } => format!("({};{};{})", fmt_sig(x), fmt_sig(y), fmt_sig(z)),
    }
}

/// Space-separated axes; Pauli-only settings print as `xyzz`.
pub fn setting_label(s: &MeasurementSetting) -> String {
    if s.axes().iter().all(|a| a.pauli().is_some()) {
        s.axes().iter().map(axis_label).collect()
    } else {
        s.axes().iter().map(axis_label).collect::<Vec<_>>().join(" ")
    }
}
