//! Flat `key=value` config files. Keys are long flag names without the
//! dashes; `#` starts a comment line. File values are spliced into the
//! argument list ahead of the user's own flags, so explicit flags win.

use std::ffi::OsString;
use std::path::Path;

const GLOBAL_WITH_VALUE: [&str; 4] = ["--seed", "--out", "--config", "--threads"];

pub fn parse(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key=value", no + 1))?;
        let k = k.trim().trim_start_matches("--");
        if k.is_empty() {
            return Err(format!("config line {}: empty key", no + 1));
        }
        if k == "config" {
            return Err(format!("config line {}: nested config files are not supported", no + 1));
        }
        out.push((k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Finds `--config <path>` / `--config=<path>` and the index of the subcommand.
fn scan(args: &[OsString]) -> (Option<OsString>, Option<usize>) {
    let mut config = None;
    let mut sub = None;
    let mut i = 1;
    while i < args.len() {
        let a = args[i].to_string_lossy();
        if let Some(v) = a.strip_prefix("--config=") {
            config = Some(OsString::from(v));
        } else if a == "--config" {
            config = args.get(i + 1).cloned();
            i += 1;
        } else if GLOBAL_WITH_VALUE.contains(&a.as_ref()) {
            i += 1;
        } else if sub.is_none() && !a.starts_with('-') {
            sub = Some(i);
        }
        i += 1;
    }
    (config, sub)
}

/// Returns the argument list with config-file flags spliced in: global keys
/// right after the program name, the rest right after the subcommand.
pub fn expand(args: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let (path, sub) = scan(&args);
    let Some(path) = path else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(Path::new(&path))
        .map_err(|e| format!("cannot read config {}: {e}", path.to_string_lossy()))?;
    // globals go first so a user flag anywhere later overrides them
    let (mut global, mut local) = (Vec::new(), Vec::new());
    for (k, v) in parse(&text)? {
        let flag = match v.as_str() {
            "false" => continue,
            "true" | "" => OsString::from(format!("--{k}")),
            _ => OsString::from(format!("--{k}={v}")),
        };
        if GLOBAL_WITH_VALUE.contains(&format!("--{k}").as_str()) {
            global.push(flag);
        } else {
            local.push(flag);
        }
    }
    let mut out = vec![args[0].clone()];
    out.extend(global);
    match sub {
        Some(s) => {
            out.extend_from_slice(&args[1..=s]);
            out.extend(local);
            out.extend_from_slice(&args[s + 1..]);
        }
        None => {
            out.extend(local);
            out.extend_from_slice(&args[1..]);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn parses_comments_and_pairs() {
        let kv = parse("# run\nseed = 5\n\n--delta=0.2\n").unwrap();
        assert_eq!(kv, vec![("seed".into(), "5".into()), ("delta".into(), "0.2".into())]);
        assert!(parse("novalue\n").is_err());
        assert!(parse("config=x\n").is_err());
    }

    #[test]
    fn file_values_precede_user_flags() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("run.cfg");
        std::fs::write(&p, "n-env=4\nseed=9\n").unwrap();
        let args = os(&["darwinlab", "--config", p.to_str().unwrap(), "pip", "--n-env", "8"]);
        let got = expand(args).unwrap();
        let s: Vec<String> = got.iter().map(|a| a.to_string_lossy().into_owned()).collect();
        assert_eq!(&s[1..], &["--seed=9", "--config", p.to_str().unwrap(), "pip", "--n-env=4", "--n-env", "8"]);
    }

    #[test]
    fn seed_value_is_not_a_subcommand() {
        let (_, sub) = scan(&os(&["x", "--seed", "3", "certify"]));
        assert_eq!(sub, Some(3));
    }
}
