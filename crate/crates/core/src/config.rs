//! Flat key/value configuration files.
//!
//! A config is a single TOML table without nesting. Physical quantities are
//! plain numbers in SI base units or strings carrying a unit, such as
//! `"10 fF"`, `"2.5ns"` or `"19.8 MHz"`; the unit must match the key.

use std::collections::BTreeMap;
use std::path::Path;

use toml::Value;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    Dimensionless,
    Farad,
    Second,
    Hertz,
    Ohm,
    Volt,
}

impl Unit {
    fn symbols(self) -> &'static [&'static str] {
        match self {
            Unit::Dimensionless => &[],
            Unit::Farad => &["F"],
            Unit::Second => &["s"],
            Unit::Hertz => &["Hz"],
            Unit::Ohm => &["ohm", "Ohm", "Ω"],
            Unit::Volt => &["V"],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Unit::Dimensionless => "dimensionless",
            Unit::Farad => "F",
            Unit::Second => "s",
            Unit::Hertz => "Hz",
            Unit::Ohm => "ohm",
            Unit::Volt => "V",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeyKind {
    Quantity(Unit),
    Integer,
    Bool,
    Text,
    /// A single integer or an array of integers.
    IntegerList,
    /// A number, or one of a fixed set of words.
    NumberOrWord(&'static [&'static str]),
}

/// Every key a config file may contain.
pub const KEYS: &[(&str, KeyKind)] = &[
    // preset metadata
    ("name", KeyKind::Text),
    ("description", KeyKind::Text),
    ("preset", KeyKind::Text),
    // converter
    ("n", KeyKind::Integer),
    ("c_u", KeyKind::Quantity(Unit::Farad)),
    ("c_c", KeyKind::Quantity(Unit::Farad)),
    ("c_s", KeyKind::Quantity(Unit::Farad)),
    ("g", KeyKind::Quantity(Unit::Dimensionless)),
    ("a_k", KeyKind::Quantity(Unit::Dimensionless)),
    ("v_e", KeyKind::Quantity(Unit::Volt)),
    ("r_on", KeyKind::Quantity(Unit::Ohm)),
    ("r_q", KeyKind::Quantity(Unit::Ohm)),
    ("alpha_tau", KeyKind::Quantity(Unit::Dimensionless)),
    ("v_ref", KeyKind::Quantity(Unit::Volt)),
    ("k", KeyKind::Quantity(Unit::Dimensionless)),
    ("k2", KeyKind::Quantity(Unit::Dimensionless)),
    ("t_aq", KeyKind::Quantity(Unit::Second)),
    ("dac_form", KeyKind::Text),
    // harvester
    ("r_h", KeyKind::Quantity(Unit::Ohm)),
    ("c_eh", KeyKind::Quantity(Unit::Farad)),
    ("eta", KeyKind::NumberOrWord(&["rc"])),
    ("transfer_period_samples", KeyKind::Integer),
    ("transfer_dead_time", KeyKind::Quantity(Unit::Second)),
    ("diode_ideal", KeyKind::Bool),
    // signal and run
    ("f_m", KeyKind::Quantity(Unit::Hertz)),
    ("f_s", KeyKind::Quantity(Unit::Hertz)),
    ("psd", KeyKind::Text),
    ("psd_table", KeyKind::Text),
    ("psd_sigma", KeyKind::Quantity(Unit::Hertz)),
    ("bits", KeyKind::IntegerList),
    ("fs_grid", KeyKind::Text),
    ("epsilon", KeyKind::Quantity(Unit::Dimensionless)),
    ("delta_db", KeyKind::Quantity(Unit::Dimensionless)),
    ("input", KeyKind::Text),
    ("samples", KeyKind::Integer),
    ("fft", KeyKind::Integer),
    ("window", KeyKind::Text),
    ("hold_substeps", KeyKind::Integer),
    ("seed", KeyKind::Integer),
    ("rel_tol", KeyKind::Quantity(Unit::Dimensionless)),
    ("max_iterations", KeyKind::Integer),
    ("ceiling_factor", KeyKind::Quantity(Unit::Dimensionless)),
    ("output", KeyKind::Text),
    ("format", KeyKind::Text),
];

pub fn key_kind(key: &str) -> Option<KeyKind> {
    KEYS.iter().find(|(k, _)| *k == key).map(|(_, kind)| *kind)
}

/// A validated flat config.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FlatConfig {
    entries: BTreeMap<String, Value>,
}

impl FlatConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let table: toml::Table = text.parse()?;
        let mut entries = BTreeMap::new();
        for (key, value) in table {
            let Some(kind) = key_kind(&key) else {
                return Err(Error::Config(format!("unknown key `{key}`")));
            };
            check_kind(&key, &value, kind)?;
            entries.insert(key, value);
        }
        Ok(Self { entries })
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Insert or replace one entry, with the same checks as parsing.
    pub fn set(&mut self, key: &str, value: Value) -> Result<()> {
        let Some(kind) = key_kind(key) else {
            return Err(Error::Config(format!("unknown key `{key}`")));
        };
        check_kind(key, &value, kind)?;
        self.entries.insert(key.to_string(), value);
        Ok(())
    }

    /// Parse `key=value`; the value is read as a TOML literal, or as a bare
    /// string when it is not one.
    pub fn set_assignment(&mut self, assignment: &str) -> Result<()> {
        let (key, raw) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("expected key=value, got `{assignment}`")))?;
        let raw = raw.trim();
        let value = format!("v = {raw}")
            .parse::<toml::Table>()
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| Value::String(raw.to_string()));
        self.set(key.trim(), value)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn raw(&self, key: &str) -> Option<&Value> {
        self.entries.get(key)
    }

    /// Quantity in SI base units.
    pub fn quantity(&self, key: &str) -> Result<Option<f64>> {
        let Some(v) = self.entries.get(key) else { return Ok(None) };
        let unit = match key_kind(key) {
            Some(KeyKind::Quantity(u)) => u,
            _ => Unit::Dimensionless,
        };
        parse_quantity(key, v, unit).map(Some)
    }

    pub fn integer(&self, key: &str) -> Result<Option<u64>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(Value::Integer(i)) if *i >= 0 => Ok(Some(*i as u64)),
            Some(other) => Err(type_error(key, "a non-negative integer", other)),
        }
    }

    pub fn integer_list(&self, key: &str) -> Result<Option<Vec<u64>>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(Value::Integer(i)) if *i >= 0 => Ok(Some(vec![*i as u64])),
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| match v {
                    Value::Integer(i) if *i >= 0 => Ok(*i as u64),
                    other => Err(type_error(key, "non-negative integers", other)),
                })
                .collect::<Result<Vec<_>>>()
                .map(Some),
            Some(other) => Err(type_error(key, "an integer or an array of integers", other)),
        }
    }

    pub fn boolean(&self, key: &str) -> Result<Option<bool>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(Value::Boolean(b)) => Ok(Some(*b)),
            Some(other) => Err(type_error(key, "a boolean", other)),
        }
    }

    pub fn text(&self, key: &str) -> Result<Option<&str>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(other) => Err(type_error(key, "a string", other)),
        }
    }
}

fn type_error(key: &str, want: &str, got: &Value) -> Error {
    Error::Config(format!("`{key}` must be {want}, got {got}"))
}

fn check_kind(key: &str, value: &Value, kind: KeyKind) -> Result<()> {
    match kind {
        KeyKind::Quantity(unit) => parse_quantity(key, value, unit).map(|_| ()),
        KeyKind::Integer => match value {
            Value::Integer(i) if *i >= 0 => Ok(()),
            other => Err(type_error(key, "a non-negative integer", other)),
        },
        KeyKind::Bool => match value {
            Value::Boolean(_) => Ok(()),
            other => Err(type_error(key, "a boolean", other)),
        },
        KeyKind::Text => match value {
            Value::String(_) => Ok(()),
            other => Err(type_error(key, "a string", other)),
        },
        KeyKind::IntegerList => match value {
            Value::Integer(i) if *i >= 0 => Ok(()),
            Value::Array(items) if items.iter().all(|v| matches!(v, Value::Integer(i) if *i >= 0)) => Ok(()),
            other => Err(type_error(key, "an integer or an array of integers", other)),
        },
        KeyKind::NumberOrWord(words) => match value {
            Value::String(s) if words.contains(&s.as_str()) => Ok(()),
            _ => parse_quantity(key, value, Unit::Dimensionless).map(|_| ()),
        },
    }
}

/// Read a number, or a string with an optional SI prefix and unit.
pub fn parse_quantity(key: &str, value: &Value, unit: Unit) -> Result<f64> {
    let v = match value {
        Value::Float(f) => *f,
        Value::Integer(i) => *i as f64,
        Value::String(s) => parse_with_unit(s, unit).map_err(|msg| Error::Config(format!("`{key}`: {msg}")))?,
        Value::Table(_) => {
            return Err(Error::Config(format!("`{key}`: nested tables are not allowed in a flat config")))
        }
        other => return Err(type_error(key, &format!("a number in {}", unit.name()), other)),
    };
    if !v.is_finite() {
        return Err(Error::Config(format!("`{key}` must be finite")));
    }
    Ok(v)
}

/// Read `"19.8 MHz"`, `"2.5ns"` or a bare number in the given unit.
pub fn parse_quantity_str(text: &str, unit: Unit) -> Result<f64> {
    parse_with_unit(text, unit).map_err(Error::Config)
}

fn parse_with_unit(text: &str, unit: Unit) -> std::result::Result<f64, String> {
    let s = text.trim();
    let split = s
        .char_indices()
        .find(|&(i, c)| {
            !(c.is_ascii_digit()
                || c == '.'
                || c == '+'
                || c == '-'
                || ((c == 'e' || c == 'E')
                    && s[i + 1..].starts_with(|d: char| d.is_ascii_digit() || d == '-' || d == '+')))
        })
        .map(|(i, _)| i)
        .unwrap_or(s.len());
    let (num, suffix) = s.split_at(split);
    let num: f64 = num.parse().map_err(|_| format!("cannot read a number from {text:?}"))?;
    let suffix = suffix.trim();
    if suffix.is_empty() {
        return Ok(num);
    }
    for sym in unit.symbols() {
        if let Some(prefix) = suffix.strip_suffix(sym) {
            return si_prefix(prefix)
                .map(|scale| num * scale)
                .ok_or_else(|| format!("unknown SI prefix {prefix:?} in {text:?}"));
        }
    }
    Err(format!("expected a value in {}, got {text:?}", unit.name()))
}

fn si_prefix(p: &str) -> Option<f64> {
    Some(match p {
        "" => 1.0,
        "f" => 1e-15,
        "p" => 1e-12,
        "n" => 1e-9,
        "u" | "µ" | "μ" => 1e-6,
        "m" => 1e-3,
        "k" => 1e3,
        "M" => 1e6,
        "G" => 1e9,
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn units_and_prefixes() {
        let cfg = FlatConfig::parse(
            r#"
            c_u = "10 fF"
            t_aq = "2.5ns"
            f_m = "19.8 MHz"
            r_h = "23.75 ohm"
            v_ref = 0.8
            g = "0.4"
            c_eh = 4e-8
            "#,
        )
        .unwrap();
        assert_eq!(cfg.quantity("c_u").unwrap(), Some(10.0 * 1e-15));
        assert_eq!(cfg.quantity("t_aq").unwrap(), Some(2.5 * 1e-9));
        assert_eq!(cfg.quantity("f_m").unwrap(), Some(19.8 * 1e6));
        assert_eq!(cfg.quantity("r_h").unwrap(), Some(23.75));
        assert_eq!(cfg.quantity("v_ref").unwrap(), Some(0.8));
        assert_eq!(cfg.quantity("g").unwrap(), Some(0.4));
        assert_eq!(cfg.quantity("c_eh").unwrap(), Some(4e-8));
        assert_eq!(cfg.quantity("r_on").unwrap(), None);
    }

    #[test]
    fn wrong_unit_is_rejected() {
        let err = FlatConfig::parse(r#"c_u = "10 ns""#).unwrap_err();
        assert!(matches!(err, Error::Config(_)), "{err}");
        assert!(FlatConfig::parse(r#"f_m = "19.8 MV""#).is_err());
        assert!(FlatConfig::parse(r#"c_u = "10 xF""#).is_err());
        assert!(FlatConfig::parse(r#"g = "0.4 V""#).is_err());
    }

    #[test]
    fn unknown_and_nested_keys_are_rejected() {
        assert!(FlatConfig::parse("bogus = 1").is_err());
        assert!(FlatConfig::parse("[circuit]\nn = 8").is_err());
        assert!(FlatConfig::parse("n = 8.5").is_err());
        assert!(FlatConfig::parse("n = -1").is_err());
    }

    #[test]
    fn exponent_numbers_in_strings() {
        assert_eq!(parse_with_unit("1e-3 s", Unit::Second).unwrap(), 1e-3);
        assert_eq!(parse_with_unit("2E6Hz", Unit::Hertz).unwrap(), 2e6);
        assert_eq!(parse_with_unit("5", Unit::Ohm).unwrap(), 5.0);
        assert_eq!(parse_with_unit("3 kΩ", Unit::Ohm).unwrap(), 3e3);
    }

    #[test]
    fn assignments() {
        let mut cfg = FlatConfig::default();
        cfg.set_assignment("c_u=20 fF").unwrap();
        cfg.set_assignment("n = 10").unwrap();
        cfg.set_assignment("psd=unimodal").unwrap();
        assert_eq!(cfg.quantity("c_u").unwrap(), Some(20.0 * 1e-15));
        assert_eq!(cfg.integer("n").unwrap(), Some(10));
        assert_eq!(cfg.text("psd").unwrap(), Some("unimodal"));
        assert!(cfg.set_assignment("c_u=2 V").is_err());
        assert!(cfg.set_assignment("nokey").is_err());
    }

    #[test]
    fn lists_and_words() {
        let cfg = FlatConfig::parse("bits = [8, 10]\neta = \"rc\"\ndiode_ideal = true").unwrap();
        assert_eq!(cfg.integer_list("bits").unwrap(), Some(vec![8, 10]));
        assert_eq!(cfg.boolean("diode_ideal").unwrap(), Some(true));
        let one = FlatConfig::parse("bits = 12").unwrap();
        assert_eq!(one.integer_list("bits").unwrap(), Some(vec![12]));
        assert!(FlatConfig::parse("eta = \"fast\"").is_err());
    }
}
