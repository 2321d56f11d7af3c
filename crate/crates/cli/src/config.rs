//! `key = value` config files, merged into argv ahead of the real flags so
//! that the command line wins.

use std::ffi::OsString;
use std::fs;
use std::path::Path;

use clap::CommandFactory;

use crate::cli::Cli;

#[derive(Debug)]
pub enum ConfigError {
    /// Exit 2: bad syntax or an unknown key.
    Invalid(String),
    /// Exit 4: the file could not be read.
    Io(String),
}

/// Removes `--config FILE` / `--config=FILE` from argv and returns the path.
fn take_config(args: &mut Vec<OsString>) -> Result<Option<OsString>, ConfigError> {
    let mut found = None;
    let mut i = 1;
    while i < args.len() {
        let a = args[i].to_string_lossy().into_owned();
        if a == "--" {
            break;
        }
        if a == "--config" {
            if i + 1 >= args.len() {
                return Err(ConfigError::Invalid("--config needs a file path".into()));
            }
            found = Some(args.remove(i + 1));
            args.remove(i);
            continue;
        }
        if let Some(path) = a.strip_prefix("--config=") {
            found = Some(OsString::from(path));
            args.remove(i);
            continue;
        }
        i += 1;
    }
    Ok(found)
}

/// Parses the file into (key, value) pairs, rejecting malformed lines.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(ConfigError::Invalid(format!(
                "config line {}: expected `key = value`, found `{line}`",
                n + 1
            )));
        };
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || k.contains(char::is_whitespace) {
            return Err(ConfigError::Invalid(format!("config line {}: malformed key `{k}`", n + 1)));
        }
        if v.is_empty() {
            return Err(ConfigError::Invalid(format!("config key `{k}` has no value")));
        }
        out.push((k.to_string(), v.to_string()));
    }
    Ok(out)
}

/// argv with the config entries spliced in right after the subcommand name.
pub fn expand_args(mut args: Vec<OsString>) -> Result<Vec<OsString>, ConfigError> {
    let Some(path) = take_config(&mut args)? else {
        return Ok(args);
    };
    let text = fs::read_to_string(Path::new(&path))
        .map_err(|e| ConfigError::Io(format!("cannot read config {}: {e}", Path::new(&path).display())))?;
    let pairs = parse_config(&text)?;

    let Some(pos) = args.iter().skip(1).position(|a| !a.to_string_lossy().starts_with('-')) else {
        // no subcommand: let clap print the usage error
        return Ok(args);
    };
    let pos = pos + 1;
    let name = args[pos].to_string_lossy().into_owned();
    let root = Cli::command();
    let Some(sub) = root.find_subcommand(&name) else {
        return Ok(args);
    };

    let mut injected = Vec::new();
    for (key, value) in pairs {
        let arg = sub
            .get_arguments()
            .find(|a| a.get_long() == Some(key.as_str()) && key != "config")
            .ok_or_else(|| ConfigError::Invalid(format!("unknown config key `{key}` for `{name}`")))?;
        if arg.get_action().takes_values() {
            injected.push(OsString::from(format!("--{key}={value}")));
        } else {
            match value.as_str() {
                "true" => injected.push(OsString::from(format!("--{key}"))),
                "false" => {}
                _ => {
                    return Err(ConfigError::Invalid(format!(
                        "config key `{key}` expects true or false, found `{value}`"
                    )))
                }
            }
        }
    }
    args.splice(pos + 1..pos + 1, injected);
    Ok(args)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn argv(s: &str) -> Vec<OsString> {
        s.split_whitespace().map(OsString::from).collect()
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let pairs = parse_config("# header\n\nk = 2  # trailing\np=5\n").unwrap();
        assert_eq!(pairs, vec![("k".into(), "2".into()), ("p".into(), "5".into())]);
    }

    #[test]
    fn line_without_equals_is_rejected() {
        assert!(matches!(parse_config("k 2\n"), Err(ConfigError::Invalid(_))));
        assert!(matches!(parse_config("k =\n"), Err(ConfigError::Invalid(m)) if m.contains("`k`")));
    }

    #[test]
    fn config_entries_precede_flags() {
        let dir = std::env::temp_dir().join(format!("quasisym-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("c.cfg");
        std::fs::write(&path, "k = 3\np = 7\n").unwrap();
        let mut a = argv("quasisym certify --p 5");
        a.push("--config".into());
        a.push(path.clone().into());
        let out = expand_args(a).unwrap();
        assert_eq!(out, argv("quasisym certify --k=3 --p=7 --p 5"));
        std::fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn unknown_key_is_named() {
        let dir = std::env::temp_dir().join(format!("quasisym-cfg-bad-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("c.cfg");
        std::fs::write(&path, "smax = 3\n").unwrap();
        let mut a = argv("quasisym certify --p 5");
        a.push(OsString::from(format!("--config={}", path.display())));
        match expand_args(a) {
            Err(ConfigError::Invalid(m)) => assert!(m.contains("`smax`"), "{m}"),
            other => panic!("{other:?}"),
        }
        std::fs::remove_dir_all(dir).unwrap();
    }
}
