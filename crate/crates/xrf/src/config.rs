//! Flat key-value scenario configs.
//!
//! Grammar: `[section]` headers, one `key = value` per line, `#` starts a
//! comment. Numbers accept plain decimals, e-notation, and the `x(y)`
//! shorthand for x times ten to the y, e.g. `5(11)` or `7.2(-2)`. Sections,
//! keys, and values are validated strictly: anything unknown is rejected
//! with its line number so a typo cannot silently fall back to a default.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

/// A config problem, already formatted with line/key context.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Recognized sections and the keys each accepts.
const SCHEMA: &[(&str, &[&str])] = &[
    (
        "scenario",
        &[
            "preset",
            "omega31_eV",
            "omega21_eV",
            "gamma31_eV",
            "gamma32_eV",
            "gamma21_eV",
            "gamma_d_eV",
        ],
    ),
    ("drive.xray", &["g_eV", "intensity_W_cm2", "mu_au", "detuning_eV"]),
    ("drive.optical", &["g_eV", "intensity_W_cm2", "mu_au", "detuning_eV"]),
    ("grid", &["points", "span_eV", "refine_peaks"]),
    ("scan", &["delta_min", "delta_max", "steps"]),
    ("output", &["dir"]),
];

#[derive(Debug, Clone)]
struct Entry {
    line: usize,
    raw: String,
}

/// Parsed config: a flat (section, key) -> value map with line tracking.
#[derive(Debug, Default)]
pub struct Config {
    entries: BTreeMap<(String, String), Entry>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        let mut section = String::new();
        for (idx, full_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match full_line.find('#') {
                Some(pos) => &full_line[..pos],
                None => full_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| {
                        ConfigError(format!("line {line_no}: unterminated section header"))
                    })?
                    .trim();
                if !SCHEMA.iter().any(|(s, _)| *s == name) {
                    return Err(ConfigError(format!(
                        "line {line_no}: unknown section [{name}]"
                    )));
                }
                section = name.to_string();
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError(format!(
                    "line {line_no}: expected `key = value`, got `{line}`"
                )));
            };
            let key = key.trim();
            let value = value.trim();
            if section.is_empty() {
                return Err(ConfigError(format!(
                    "line {line_no}: key `{key}` appears before any [section]"
                )));
            }
            let allowed = SCHEMA
                .iter()
                .find(|(s, _)| *s == section)
                .map(|(_, keys)| *keys)
                .unwrap();
            if !allowed.contains(&key) {
                return Err(ConfigError(format!(
                    "line {line_no}: unknown key `{key}` in section [{section}]"
                )));
            }
            if value.is_empty() {
                return Err(ConfigError(format!("line {line_no}: key `{key}` has no value")));
            }
            let slot = (section.clone(), key.to_string());
            if let Some(prev) = entries.get(&slot) {
                let prev: &Entry = prev;
                return Err(ConfigError(format!(
                    "line {line_no}: key `{key}` in [{section}] already set on line {}",
                    prev.line
                )));
            }
            entries.insert(slot, Entry { line: line_no, raw: value.to_string() });
        }
        Ok(Self { entries })
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            ConfigError(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::parse(&text)
    }

    pub fn string(&self, section: &str, key: &str) -> Option<&str> {
        self.entries
            .get(&(section.to_string(), key.to_string()))
            .map(|e| e.raw.as_str())
    }

    pub fn number(&self, section: &str, key: &str) -> Result<Option<f64>, ConfigError> {
        let Some(entry) = self.entries.get(&(section.to_string(), key.to_string())) else {
            return Ok(None);
        };
        parse_number(&entry.raw).map(Some).ok_or_else(|| {
            ConfigError(format!(
                "line {}: key `{key}` in [{section}]: `{}` is not a number",
                entry.line, entry.raw
            ))
        })
    }

    pub fn integer(&self, section: &str, key: &str) -> Result<Option<usize>, ConfigError> {
        let Some(entry) = self.entries.get(&(section.to_string(), key.to_string())) else {
            return Ok(None);
        };
        entry.raw.parse::<usize>().map(Some).map_err(|_| {
            ConfigError(format!(
                "line {}: key `{key}` in [{section}]: `{}` is not a whole number",
                entry.line, entry.raw
            ))
        })
    }

    pub fn boolean(&self, section: &str, key: &str) -> Result<Option<bool>, ConfigError> {
        let Some(entry) = self.entries.get(&(section.to_string(), key.to_string())) else {
            return Ok(None);
        };
        match entry.raw.as_str() {
            "true" => Ok(Some(true)),
            "false" => Ok(Some(false)),
            other => Err(ConfigError(format!(
                "line {}: key `{key}` in [{section}]: `{other}` is not true/false",
                entry.line
            ))),
        }
    }

}

/// Parse a decimal number, accepting the `x(y)` power-of-ten shorthand.
/// The shorthand is rewritten to e-notation and parsed in one go, so
/// `7.2(-2)` yields bit-for-bit the same float as `7.2e-2`.
pub fn parse_number(raw: &str) -> Option<f64> {
    let raw = raw.trim();
    if let Some((mantissa, rest)) = raw.split_once('(') {
        let exp = rest.strip_suffix(')')?;
        let _: i32 = exp.parse().ok()?;
        if mantissa.contains(['e', 'E']) {
            return None;
        }
        let mantissa = if mantissa.is_empty() { "1" } else { mantissa };
        format!("{mantissa}e{exp}").parse().ok()
    } else {
        raw.parse().ok()
    }
}
