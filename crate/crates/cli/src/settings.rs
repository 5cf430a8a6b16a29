//! Flat `key = value` configuration with CLI > file > default precedence.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

#[derive(Debug, Default)]
pub struct Settings {
    file: BTreeMap<String, String>,
    resolved: BTreeMap<String, String>,
}

pub fn parse_config(text: &str, source: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("{source}:{}: expected key = value", n + 1)))?;
        out.insert(key.trim().to_owned(), value.trim().to_owned());
    }
    Ok(out)
}

impl Settings {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let file = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", p.display())))?;
                parse_config(&text, &p.display().to_string())?
            }
            None => BTreeMap::new(),
        };
        Ok(Settings {
            file,
            resolved: BTreeMap::new(),
        })
    }

    fn file_value<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.file.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| CliError::Usage(format!("config key {key}: cannot parse {raw:?}"))),
        }
    }

    /// Resolves `key` and records the value for persistence.
    pub fn get<T: FromStr + Display>(&mut self, key: &str, cli: Option<T>, default: T) -> Result<T, CliError> {
        let value = match cli {
            Some(v) => v,
            None => self.file_value(key)?.unwrap_or(default),
        };
        self.resolved.insert(key.to_owned(), value.to_string());
        Ok(value)
    }

    /// Like [`Settings::get`] without a default; absent values are not recorded.
    pub fn get_opt<T: FromStr + Display>(&mut self, key: &str, cli: Option<T>) -> Result<Option<T>, CliError> {
        let value = match cli {
            Some(v) => Some(v),
            None => self.file_value(key)?,
        };
        if let Some(v) = &value {
            self.resolved.insert(key.to_owned(), v.to_string());
        }
        Ok(value)
    }

    pub fn require<T: FromStr + Display>(&mut self, key: &str, cli: Option<T>) -> Result<T, CliError> {
        self.get_opt(key, cli)?
            .ok_or_else(|| CliError::Usage(format!("--{key} is required (flag or config key)")))
    }

    /// Config keys that no resolution asked for.
    pub fn check_unused(&self) -> Result<(), CliError> {
        let unused: Vec<&str> = self
            .file
            .keys()
            .filter(|k| !self.resolved.contains_key(*k) && k.as_str() != "command")
            .map(String::as_str)
            .collect();
        if unused.is_empty() {
            Ok(())
        } else {
            Err(CliError::Usage(format!("unknown config keys: {}", unused.join(", "))))
        }
    }

    pub fn render(&self, command: &str) -> String {
        let mut s = format!("command = {command}\n");
        for (k, v) in &self.resolved {
            s.push_str(&format!("{k} = {v}\n"));
        }
        s
    }

    pub fn persist(&self, command: &str, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.render(command)).map_err(|e| CliError::Data(e.into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let mut s = Settings {
            file: parse_config("# c\nepochs = 5\nlr=0.5\n\n", "t").unwrap(),
            resolved: BTreeMap::new(),
        };
        assert_eq!(s.get("epochs", Some(7usize), 10).unwrap(), 7);
        assert_eq!(s.get("lr", None, 0.1f64).unwrap(), 0.5);
        assert_eq!(s.get("seed", None, 3u64).unwrap(), 3);
        assert_eq!(s.render("train"), "command = train\nepochs = 7\nlr = 0.5\nseed = 3\n");
        s.check_unused().unwrap();
    }

    #[test]
    fn errors() {
        assert!(parse_config("novalue\n", "t").is_err());
        let mut s = Settings {
            file: parse_config("epochs = many\nbogus = 1\n", "t").unwrap(),
            resolved: BTreeMap::new(),
        };
        assert!(s.get("epochs", None, 1usize).is_err());
        assert!(s.check_unused().is_err());
    }
}
