//! Loading a subcommand's JSON block with `--tol` overrides applied.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

use crate::CliError;

/// Parses `key=value` with a positive finite value.
pub fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got {s:?}"))?;
    let v: f64 = v.trim().parse().map_err(|_| format!("not a number: {v:?}"))?;
    Ok((k.trim().to_string(), v))
}

/// Reads `path`, applies the overrides to the top-level tolerance keys
/// `allowed`, checks every tolerance is positive, and deserializes.
/// Unknown keys anywhere are rejected by the target type.
pub fn load<T: DeserializeOwned>(path: &Path, overrides: &[(String, f64)], allowed: &[&str]) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    from_value(value, overrides, allowed)
}

pub fn from_value<T: DeserializeOwned>(value: Value, overrides: &[(String, f64)], allowed: &[&str]) -> Result<T, CliError> {
    let Value::Object(mut obj) = value else {
        return Err(CliError::Config("config must be a JSON object".into()));
    };
    for (k, v) in overrides {
        if !allowed.contains(&k.as_str()) {
            return Err(CliError::Config(format!(
                "unknown tolerance {k:?} (this command accepts: {})",
                if allowed.is_empty() { "none".to_string() } else { allowed.join(", ") }
            )));
        }
        let n = serde_json::Number::from_f64(*v).ok_or_else(|| CliError::Config(format!("tolerance {k} must be finite")))?;
        obj.insert(k.clone(), Value::Number(n));
    }
    check_tolerances(&obj, allowed)?;
    serde_json::from_value(Value::Object(obj)).map_err(|e| CliError::Config(e.to_string()))
}

fn check_tolerances(obj: &Map<String, Value>, allowed: &[&str]) -> Result<(), CliError> {
    for k in allowed {
        if let Some(v) = obj.get(*k) {
            match v.as_f64() {
                Some(x) if x > 0.0 && x.is_finite() => {}
                _ => return Err(CliError::Config(format!("tolerance {k} must be a positive number, got {v}"))),
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;

    #[derive(Deserialize, Debug)]
    #[serde(deny_unknown_fields)]
    struct Cfg {
        x: f64,
        #[serde(default)]
        tol: Option<f64>,
    }

    #[test]
    fn override_and_reject() {
        let v = serde_json::json!({"x": 1.0});
        let c: Cfg = from_value(v.clone(), &[("tol".into(), 0.5)], &["tol"]).unwrap();
        assert_eq!((c.x, c.tol), (1.0, Some(0.5)));
        assert!(from_value::<Cfg>(v.clone(), &[("other".into(), 0.5)], &["tol"]).is_err());
        assert!(from_value::<Cfg>(v.clone(), &[("tol".into(), -1.0)], &["tol"]).is_err());
        assert!(from_value::<Cfg>(serde_json::json!({"x": 1.0, "y": 2}), &[], &["tol"]).is_err());
        assert!(from_value::<Cfg>(serde_json::json!([1]), &[], &[]).is_err());
    }

    #[test]
    fn tol_syntax() {
        assert_eq!(parse_tol("dbar_tol=1e-6").unwrap(), ("dbar_tol".to_string(), 1e-6));
        assert!(parse_tol("dbar_tol").is_err());
        assert!(parse_tol("a=b").is_err());
    }
}
