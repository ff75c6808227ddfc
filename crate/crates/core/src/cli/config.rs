//! Flat `key = value` session config for `ringshare run`. Flags override
//! anything set here.

use std::collections::BTreeMap;
use std::path::Path;

use super::CliError;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FileConfig {
    values: BTreeMap<String, String>,
    inputs: Vec<String>,
}

const KEYS: [&str; 12] = [
    "party",
    "listen",
    "successor",
    "circuit",
    "lanes",
    "seed",
    "session",
    "timeout",
    "output_party",
    "providers",
    "input",
    "dealer_shares",
];

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("config line {}: expected key = value", i + 1)))?;
            let (k, v) = (k.trim().replace('-', "_"), v.trim().to_string());
            if !KEYS.contains(&k.as_str()) {
                return Err(CliError::usage(format!("config line {}: unknown key {k:?}", i + 1)));
            }
            // `input` may repeat, one per provided group.
            if k == "input" {
                cfg.inputs.push(v);
            } else {
                cfg.values.insert(k, v);
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::other(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// `flag` if given, otherwise the parsed config value.
    pub fn pick<T: std::str::FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        self.get(key)
            .map(|v| v.parse().map_err(|_| CliError::usage(format!("config value for {key} is invalid: {v:?}"))))
            .transpose()
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win() {
        let cfg = FileConfig::parse("# party 2\nparty = 2\nlanes = 8\ninput = 0=ff\ninput = 1=0\n").unwrap();
        assert_eq!(cfg.pick::<u8>(None, "party").unwrap(), Some(2));
        assert_eq!(cfg.pick(Some(3u8), "party").unwrap(), Some(3));
        assert_eq!(cfg.pick::<u64>(None, "seed").unwrap(), None);
        assert_eq!(cfg.inputs(), ["0=ff", "1=0"]);
        assert!(FileConfig::parse("colour = red").is_err());
        assert!(FileConfig::parse("lanes = many").unwrap().pick::<usize>(None, "lanes").is_err());
    }
}
