//! Family spec strings: `name?key=value&key=value`, with nested specs
//! wrapped in braces, e.g. `ppath?base={c4dot?base={cycle?n=4}}&n=6`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Param {
    Value(String),
    Spec(Box<FamilySpec>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilySpec {
    pub name: String,
    pub params: BTreeMap<String, Param>,
}

impl FamilySpec {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), params: BTreeMap::new() }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), Param::Value(value.to_string()));
        self
    }

    pub fn with_base(mut self, key: &str, spec: FamilySpec) -> Self {
        self.params.insert(key.to_string(), Param::Spec(Box::new(spec)));
        self
    }

    pub fn parse(s: &str) -> Result<Self> {
        let bad = |reason: &str| Error::InvalidSpec { spec: s.to_string(), reason: reason.to_string() };
        let s = s.trim();
        let (name, rest) = match s.find('?') {
            Some(i) => (&s[..i], Some(&s[i + 1..])),
            None => (s, None),
        };
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            return Err(bad("missing or malformed family name"));
        }
        let mut spec = FamilySpec::new(name);
        let Some(rest) = rest else { return Ok(spec) };
        for part in split_top_level(rest).map_err(|r| bad(&r))? {
            let (key, value) = part.split_once('=').ok_or_else(|| bad("parameter without `=`"))?;
            if key.is_empty() {
                return Err(bad("empty parameter name"));
            }
            let param = if let Some(inner) = value.strip_prefix('{') {
                let inner = inner.strip_suffix('}').ok_or_else(|| bad("unbalanced braces"))?;
                Param::Spec(Box::new(FamilySpec::parse(inner)?))
            } else if value.is_empty() || value.contains(['{', '}']) {
                return Err(bad("malformed parameter value"));
            } else {
                Param::Value(value.to_string())
            };
            if spec.params.insert(key.to_string(), param).is_some() {
                return Err(bad(&format!("parameter `{key}` given twice")));
            }
        }
        Ok(spec)
    }

    fn invalid(&self, reason: impl Into<String>) -> Error {
        Error::InvalidSpec { spec: self.to_string(), reason: reason.into() }
    }

    /// Rejects parameters outside `allowed`.
    pub fn expect_keys(&self, allowed: &[&str]) -> Result<()> {
        match self.params.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(self.invalid(format!("unknown parameter `{k}`"))),
            None => Ok(()),
        }
    }

    pub fn value(&self, key: &str) -> Result<Option<&str>> {
        match self.params.get(key) {
            None => Ok(None),
            Some(Param::Value(v)) => Ok(Some(v)),
            Some(Param::Spec(_)) => Err(self.invalid(format!("`{key}` must be a plain value"))),
        }
    }

    pub fn usize(&self, key: &str) -> Result<Option<usize>> {
        self.value(key)?
            .map(|v| v.parse().map_err(|_| self.invalid(format!("`{key}` must be a non-negative integer"))))
            .transpose()
    }

    pub fn required_usize(&self, key: &str) -> Result<usize> {
        self.usize(key)?.ok_or_else(|| self.invalid(format!("missing `{key}`")))
    }

    pub fn bool(&self, key: &str, default: bool) -> Result<bool> {
        match self.value(key)? {
            None => Ok(default),
            Some("true" | "1" | "yes") => Ok(true),
            Some("false" | "0" | "no") => Ok(false),
            Some(_) => Err(self.invalid(format!("`{key}` must be true or false"))),
        }
    }

    pub fn base(&self, key: &str) -> Result<&FamilySpec> {
        match self.params.get(key) {
            Some(Param::Spec(s)) => Ok(s),
            Some(Param::Value(_)) => Err(self.invalid(format!("`{key}` must be a braced spec"))),
            None => Err(self.invalid(format!("missing `{key}`"))),
        }
    }

    pub fn range_error(&self, reason: impl Into<String>) -> Error {
        self.invalid(reason)
    }
}

fn split_top_level(s: &str) -> std::result::Result<Vec<&str>, String> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '{' => depth += 1,
            '}' => {
                depth -= 1;
                if depth < 0 {
                    return Err("unbalanced braces".into());
                }
            }
            '&' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err("unbalanced braces".into());
    }
    parts.push(&s[start..]);
    Ok(parts)
}

impl fmt::Display for FamilySpec {
    /// Canonical form: parameters in key order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        for (i, (k, v)) in self.params.iter().enumerate() {
            f.write_str(if i == 0 { "?" } else { "&" })?;
            match v {
                Param::Value(v) => write!(f, "{k}={v}")?,
                Param::Spec(s) => write!(f, "{k}={{{s}}}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for FamilySpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_round_trip() {
        let text = "ppath?base={c4dot?base={cycle?n=4}}&n=6";
        let spec = FamilySpec::parse(text).unwrap();
        assert_eq!(spec.to_string(), text);
        assert_eq!(spec.base("base").unwrap().base("base").unwrap().required_usize("n").unwrap(), 4);
    }

    #[test]
    fn canonical_order_and_errors() {
        assert_eq!(FamilySpec::parse("kchain?hub=true&blocks=3").unwrap().to_string(), "kchain?blocks=3&hub=true");
        for bad in ["", "?n=1", "path?n", "path?n=1&n=2", "ppath?base={cycle?n=4&n=6", "a?b=}"] {
            assert!(FamilySpec::parse(bad).is_err(), "{bad}");
        }
    }
}
