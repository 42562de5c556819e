//! Shared tokenizer for the `kind[:param=value,…]` text forms.
//!
//! Two spellings are accepted:
//!
//! ```text
//! quasi_arithmetic:p=0.5,alpha=0.3
//! kind=quasi_arithmetic p=0.5 alpha=0.3
//! ```
//!
//! Parameters may also be positional (`geometric:0.5`); each kind decides how
//! positional values map onto names.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct SpecText {
    pub kind: String,
    pub params: Vec<(Option<String>, String)>,
}

pub(crate) fn tokenize(input: &str) -> Result<SpecText> {
    let s = input.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty specification".into()));
    }
    if let Some(rest) = s.strip_prefix("kind=") {
        let mut words = rest.split_whitespace();
        let kind = words
            .next()
            .ok_or_else(|| Error::Parse("missing kind".into()))?;
        let mut params = Vec::new();
        for w in words {
            let (k, v) = w
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected name=value, found `{w}`")))?;
            params.push((Some(name(k)?), v.trim().to_string()));
        }
        return Ok(SpecText {
            kind: name(kind)?,
            params,
        });
    }
    let (kind, rest) = match s.split_once(':') {
        Some((k, r)) => (k, Some(r)),
        None => (s, None),
    };
    let mut params = Vec::new();
    if let Some(rest) = rest {
        if rest.trim().is_empty() {
            return Err(Error::Parse(format!("empty parameter list in `{s}`")));
        }
        for item in rest.split(',') {
            let item = item.trim();
            if item.is_empty() {
                return Err(Error::Parse(format!("empty parameter in `{s}`")));
            }
            match item.split_once('=') {
                Some((k, v)) => params.push((Some(name(k)?), v.trim().to_string())),
                None => params.push((None, item.to_string())),
            }
        }
    }
    Ok(SpecText {
        kind: name(kind)?,
        params,
    })
}

fn name(raw: &str) -> Result<String> {
    let t = raw.trim();
    if t.is_empty()
        || !t
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
    {
        return Err(Error::Parse(format!("invalid name `{raw}`")));
    }
    Ok(t.to_ascii_lowercase().replace('-', "_"))
}

pub(crate) fn number(raw: &str) -> Result<f64> {
    let v: f64 = raw
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("invalid number `{raw}`")))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!("non-finite number `{raw}`")));
    }
    Ok(v)
}

/// Resolves named and positional parameters against `names`, in order.
/// Returns one slot per name; unknown or duplicated names are errors.
pub(crate) fn bind(
    kind: &str,
    params: &[(Option<String>, String)],
    names: &[&str],
) -> Result<Vec<Option<f64>>> {
    let mut slots: Vec<Option<f64>> = vec![None; names.len()];
    let mut next_positional = 0;
    for (key, raw) in params {
        let idx = match key {
            Some(k) => names
                .iter()
                .position(|n| n == k || (*n == "alpha" && k == "a"))
                .ok_or_else(|| Error::Parse(format!("unknown parameter `{k}` for {kind}")))?,
            None => {
                let i = next_positional;
                next_positional += 1;
                if i >= names.len() {
                    return Err(Error::Parse(format!("too many parameters for {kind}")));
                }
                i
            }
        };
        if slots[idx].is_some() {
            return Err(Error::Parse(format!(
                "parameter `{}` given twice for {kind}",
                names[idx]
            )));
        }
        slots[idx] = Some(number(raw)?);
    }
    Ok(slots)
}
