//! Instance files and canonical JSON output.
//!
//! Instance layout:
//!
//! ```json
//! {"d":3,"dist":[...],"r1":1,"r2":["s0"],"scenarios":{"explicit":[[0]]},"version":1}
//! ```
//!
//! `dist` lists the strict lower triangle of the distance matrix over
//! `R1 ++ R2 ++ D`, row by row; `null` marks a forbidden (infinite) pair.
//! `scenarios` is either `{"explicit": [[r2 indices]]}` or
//! `{"implicit_k": k}`.
//!
//! Output is canonical: object keys sorted, no whitespace, and every float
//! written with 17 significant digits, so identical values always produce
//! identical bytes.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::model::{MetricInstance, ScenarioSet};

pub const FORMAT_VERSION: u64 = 1;

struct CanonicalFormatter;

impl serde_json::ser::Formatter for CanonicalFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

/// Canonical text for any serializable value, newline terminated.
pub fn to_canonical_string<T: Serialize>(value: &T) -> Result<String> {
    // Going through `Value` sorts every object's keys.
    let v = serde_json::to_value(value)?;
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, CanonicalFormatter);
    v.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

pub fn instance_to_json(inst: &MetricInstance) -> Value {
    let nv = inst.n_vertices();
    let mut dist = Vec::with_capacity(nv * nv.saturating_sub(1) / 2);
    for u in 1..nv {
        for v in 0..u {
            let x = inst.d(u, v);
            dist.push(if x.is_finite() { json!(x) } else { Value::Null });
        }
    }
    let scenarios = match inst.scenarios() {
        ScenarioSet::Explicit(list) => json!({ "explicit": list }),
        ScenarioSet::Implicit { k } => json!({ "implicit_k": k }),
    };
    json!({
        "version": FORMAT_VERSION,
        "r1": inst.n_r1(),
        "r2": inst.r2_labels(),
        "d": inst.n_d(),
        "dist": dist,
        "scenarios": scenarios,
    })
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidInstance(msg.into())
}

fn get<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| bad(format!("missing field {key:?}")))
}

fn as_count(v: &Value, what: &str) -> Result<usize> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| bad(format!("{what} must be a nonnegative integer")))
}

pub fn instance_from_json(v: &Value) -> Result<MetricInstance> {
    let obj = v.as_object().ok_or_else(|| bad("instance must be a JSON object"))?;
    let version = get(obj, "version")?.as_u64();
    if version != Some(FORMAT_VERSION) {
        return Err(bad(format!("unsupported version {:?}", get(obj, "version")?)));
    }
    let n_r1 = as_count(get(obj, "r1")?, "r1")?;
    let n_d = as_count(get(obj, "d")?, "d")?;
    let labels = get(obj, "r2")?
        .as_array()
        .ok_or_else(|| bad("r2 must be an array of labels"))?
        .iter()
        .map(|x| x.as_str().map(str::to_string).ok_or_else(|| bad("r2 labels must be strings")))
        .collect::<Result<Vec<_>>>()?;
    let nv = n_r1 + labels.len() + n_d;
    let tri = get(obj, "dist")?.as_array().ok_or_else(|| bad("dist must be an array"))?;
    if tri.len() != nv * nv.saturating_sub(1) / 2 {
        return Err(bad(format!("dist has {} entries, expected {}", tri.len(), nv * nv.saturating_sub(1) / 2)));
    }
    let mut dist = vec![0.0; nv * nv];
    let mut it = tri.iter();
    for u in 1..nv {
        for v in 0..u {
            let x = match it.next().expect("length checked") {
                Value::Null => f64::INFINITY,
                other => other.as_f64().ok_or_else(|| bad("dist entries must be numbers or null"))?,
            };
            dist[u * nv + v] = x;
            dist[v * nv + u] = x;
        }
    }
    let sc = get(obj, "scenarios")?.as_object().ok_or_else(|| bad("scenarios must be an object"))?;
    let scenarios = match (sc.get("explicit"), sc.get("implicit_k")) {
        (Some(list), None) => ScenarioSet::Explicit(
            list.as_array()
                .ok_or_else(|| bad("explicit scenarios must be an array"))?
                .iter()
                .map(|s| {
                    s.as_array()
                        .ok_or_else(|| bad("each scenario must be an array"))?
                        .iter()
                        .map(|r| as_count(r, "scenario rider"))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?,
        ),
        (None, Some(k)) => ScenarioSet::Implicit { k: as_count(k, "implicit_k")? },
        _ => return Err(bad("scenarios needs exactly one of \"explicit\" or \"implicit_k\"")),
    };
    MetricInstance::new(n_r1, labels, n_d, dist, scenarios)
}

pub fn instance_to_string(inst: &MetricInstance) -> Result<String> {
    to_canonical_string(&instance_to_json(inst))
}

pub fn instance_from_str(s: &str) -> Result<MetricInstance> {
    instance_from_json(&serde_json::from_str(s)?)
}

pub fn read_instance(path: &Path) -> Result<MetricInstance> {
    instance_from_str(&fs::read_to_string(path)?)
}

pub fn write_instance(path: &Path, inst: &MetricInstance) -> Result<()> {
    fs::write(path, instance_to_string(inst)?)?;
    Ok(())
}

/// Writes `text` to `path`, or to stdout when `path` is `None`.
pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}
