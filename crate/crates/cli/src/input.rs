use std::path::Path;
use std::sync::Arc;

use cmhodge::algebra::{AlgebraElement, ElementJson, HodgeAlgebra};
use cmhodge::cm::{build_cyclotomic_cm, validate_orientation, FieldSpec, GaloisCMData, Orientation, OrientedCMField};
use cmhodge::{Error, Result};
use serde_json::Value;

use crate::{FieldArgs, OrientedArgs};

fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

/// Inline JSON when the argument starts with `{` or `[`, otherwise a file path.
pub fn json_arg(arg: &str) -> Result<Value> {
    let trimmed = arg.trim_start();
    let text = if trimmed.starts_with('{') || trimmed.starts_with('[') {
        arg.to_string()
    } else {
        read_file(Path::new(arg))?
    };
    serde_json::from_str(&text).map_err(|e| usage(format!("invalid JSON: {e}")))
}

pub fn json_file(path: &Path) -> Result<Value> {
    serde_json::from_str(&read_file(path)?)
        .map_err(|e| usage(format!("invalid JSON in {}: {e}", path.display())))
}

fn decode<T: serde::de::DeserializeOwned>(value: Value, what: &str) -> Result<T> {
    serde_json::from_value(value).map_err(|e| usage(format!("invalid {what}: {e}")))
}

pub fn field(args: &FieldArgs) -> Result<GaloisCMData> {
    match (&args.conductor, &args.field) {
        (Some(m), _) => build_cyclotomic_cm(*m),
        (None, Some(f)) => decode::<FieldSpec>(json_arg(f)?, "field JSON")?.build(),
        (None, None) => Err(usage("either --conductor or --field is required")),
    }
}

/// Orientation JSON with the weight taken from `--weight` when the JSON omits it.
pub fn orientation(arg: &str, weight: Option<u32>) -> Result<Orientation> {
    let mut value = json_arg(arg)?;
    let Value::Object(map) = &mut value else {
        return Err(usage("orientation JSON must be an object"));
    };
    match (map.get("weight").and_then(Value::as_u64), weight) {
        (Some(a), Some(b)) if a != b as u64 => {
            return Err(usage(format!("--weight {b} disagrees with orientation weight {a}")));
        }
        (None, Some(b)) => {
            map.insert("weight".into(), b.into());
        }
        (None, None) => return Err(usage("orientation weight missing; pass --weight")),
        _ => {}
    }
    decode(value, "orientation JSON")
}

pub fn oriented(args: &OrientedArgs) -> Result<OrientedCMField> {
    let galois = field(&args.field)?;
    validate_orientation(&galois, &orientation(&args.orientation, args.weight)?)
}

fn element_values(path: &Path) -> Result<Vec<Value>> {
    match json_file(path)? {
        Value::Array(items) => Ok(items),
        v => Ok(vec![v]),
    }
}

/// Reads one or more element files; all elements must share one field and orientation.
pub fn elements(paths: &[impl AsRef<Path>]) -> Result<(Arc<HodgeAlgebra>, Vec<AlgebraElement>)> {
    let mut alg: Option<Arc<HodgeAlgebra>> = None;
    let mut out = Vec::new();
    for path in paths {
        for value in element_values(path.as_ref())? {
            let json: ElementJson = decode(value, "element JSON")?;
            let v = match &alg {
                Some(a) => AlgebraElement::from_json_in(a, &json)?,
                None => {
                    let v = AlgebraElement::from_json(&json)?;
                    alg = Some(v.algebra().clone());
                    v
                }
            };
            out.push(v);
        }
    }
    let alg = alg.ok_or_else(|| usage("no elements given"))?;
    Ok((alg, out))
}

pub fn element(path: &Path) -> Result<AlgebraElement> {
    let (_, mut vs) = elements(&[path])?;
    if vs.len() != 1 {
        return Err(usage(format!("{} holds {} elements, expected one", path.display(), vs.len())));
    }
    Ok(vs.remove(0))
}
