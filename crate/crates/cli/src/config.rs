//! `--config <json>` support: a flat JSON object whose keys are flag names
//! without the leading dashes. It is expanded into ordinary arguments placed
//! before the ones typed on the command line, so explicit flags win.

use std::ffi::OsString;

use serde_json::Value;

pub fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let mut rest = Vec::with_capacity(args.len());
    let mut path = None;
    let mut it = args.into_iter();
    while let Some(arg) = it.next() {
        let text = arg.to_string_lossy();
        if text == "--config" {
            path = Some(it.next().ok_or("--config needs a file path")?);
        } else if let Some(p) = text.strip_prefix("--config=") {
            path = Some(OsString::from(p));
        } else {
            rest.push(arg);
        }
    }
    let Some(path) = path else {
        return Ok(rest);
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| format!("cannot read config {}: {e}", path.to_string_lossy()))?;
    let flags = config_flags(&text)?;
    // Insert right after the subcommand, the first argument that is not a flag.
    let at = rest
        .iter()
        .skip(1)
        .position(|a| !a.to_string_lossy().starts_with('-'))
        .map(|p| p + 2)
        .ok_or("--config needs a subcommand")?;
    let tail = rest.split_off(at);
    rest.extend(flags.into_iter().map(OsString::from));
    rest.extend(tail);
    Ok(rest)
}

pub fn config_flags(text: &str) -> Result<Vec<String>, String> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| format!("invalid config JSON: {e}"))?;
    let Value::Object(map) = value else {
        return Err("config must be a JSON object".into());
    };
    let mut out = Vec::new();
    for (key, value) in map {
        let flag = format!("--{key}");
        match value {
            Value::Bool(true) => out.push(flag),
            Value::Bool(false) | Value::Null => {}
            Value::Number(n) => out.extend([flag, n.to_string()]),
            Value::String(s) => out.extend([flag, s]),
            Value::Array(items) => {
                let parts = items
                    .iter()
                    .map(|v| match v {
                        Value::Number(n) => Ok(n.to_string()),
                        Value::String(s) => Ok(s.clone()),
                        _ => Err(format!("config key {key}: list entries must be scalars")),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                out.extend([flag, parts.join(",")]);
            }
            Value::Object(_) => {
                return Err(format!("config key {key}: nested objects are not flags"))
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_become_flags() {
        let flags =
            config_flags(r#"{"g": 1.714, "B": 0.01, "force-kappa-zero": true, "grids": [24, 32]}"#)
                .unwrap();
        assert_eq!(
            flags,
            [
                "--B",
                "0.01",
                "--force-kappa-zero",
                "--g",
                "1.714",
                "--grids",
                "24,32"
            ]
        );
    }

    #[test]
    fn rejects_non_objects() {
        assert!(config_flags("[1, 2]").is_err());
        assert!(config_flags(r#"{"a": {"b": 1}}"#).is_err());
    }
}
