use std::ffi::OsString;

use serde_json::Value;

/// Pulls `--config FILE` out of argv and splices its entries in right after the
/// subcommand, ahead of the user's own flags so that those take precedence.
pub fn expand(argv: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let mut rest = Vec::with_capacity(argv.len());
    let mut path = None;
    let mut it = argv.into_iter();
    let bin = it.next().unwrap_or_else(|| "helicity".into());
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            path = Some(it.next().ok_or("--config needs a file")?);
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(p.into());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else {
        return Ok(std::iter::once(bin).chain(rest).collect());
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| format!("cannot read config {}: {e}", path.to_string_lossy()))?;
    let Value::Object(map) = serde_json::from_str::<Value>(&text).map_err(|e| format!("config is not JSON: {e}"))?
    else {
        return Err("config must be a JSON object".into());
    };
    let mut injected: Vec<OsString> = Vec::new();
    let mut subcommand = None;
    for (key, value) in map {
        if key == "subcommand" {
            subcommand = value.as_str().map(OsString::from);
            continue;
        }
        let flag = format!("--{}", key.replace('_', "-"));
        let values = match value {
            Value::Array(items) => items,
            other => vec![other],
        };
        for v in values {
            match v {
                Value::Bool(true) => injected.push(flag.clone().into()),
                Value::Bool(false) | Value::Null => {}
                Value::String(s) => injected.extend([flag.clone().into(), s.into()]),
                other => injected.extend([flag.clone().into(), other.to_string().into()]),
            }
        }
    }
    let has_subcommand = rest.first().is_some_and(|a| !a.to_string_lossy().starts_with('-'));
    let mut out = vec![bin];
    if has_subcommand {
        out.push(rest.remove(0));
    } else if let Some(s) = subcommand {
        out.push(s);
    }
    out.extend(injected);
    out.extend(rest);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn args(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn config_values_precede_flags() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        write!(f, r#"{{"grid": 16, "cross_check": true, "h": "1"}}"#).unwrap();
        let p = f.path().to_str().unwrap();
        let out = expand(args(&["helicity", "contact", "--config", p, "--grid", "24"])).unwrap();
        let want = args(&["helicity", "contact", "--cross-check", "--grid", "16", "--h", "1", "--grid", "24"]);
        assert_eq!(out, want);
    }

    #[test]
    fn no_config_is_identity() {
        let a = args(&["helicity", "lipschitz", "--nmax", "3"]);
        assert_eq!(expand(a.clone()).unwrap(), a);
    }
}
