//! JSON exchange format for Bell expressions.
//!
//! ```json
//! {"settings": [2, 2],
//!  "terms": [{"s": [0, 0], "c": "1/2"}, {"s": [1, 1], "c": "-1/2"}],
//!  "metadata": {"name": "chsh"}}
//! ```
//!
//! `settings[p]` is the number of measurement settings of party `p`. Each
//! term gives a zero-based setting tuple `s` (one index per party, so
//! `s = [0, 1]` is the correlation of the first setting of party 0 with the
//! second setting of party 1) and an exact rational coefficient `c` written
//! as `"p/q"` or `"p"`. Tuples not listed have coefficient zero.

use std::collections::HashSet;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scenario::{BellExpression, Rational, Scenario};

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comment: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub s: Vec<usize>,
    pub c: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpressionDocument {
    pub settings: Vec<usize>,
    pub terms: Vec<Term>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
}

/// Parses `"p/q"` or `"p"` into an exact rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (numer, denom) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let numer = BigInt::from_str(numer).ok()?;
    let denom = BigInt::from_str(denom).ok()?;
    if denom.is_zero() {
        return None;
    }
    Some(Rational::new(numer, denom))
}

/// Canonical `"p/q"` form with a positive denominator.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub(crate) fn serialize_rational<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

impl ExpressionDocument {
    pub fn to_expression(&self) -> Result<BellExpression> {
        let scenario = Scenario::new(self.settings.clone()).map_err(|e| Error::Document(e.to_string()))?;
        let mut seen = HashSet::new();
        let mut expr = BellExpression::zeros(scenario.clone());
        let mut coeffs = expr.coefficients().to_vec();
        for (k, term) in self.terms.iter().enumerate() {
            let flat = scenario.flat_index(&term.s).map_err(|_| {
                Error::Document(format!(
                    "term {k} (s={:?}): index out of bounds for settings {:?}",
                    term.s, self.settings
                ))
            })?;
            if !seen.insert(flat) {
                return Err(Error::Document(format!(
                    "term {k} (s={:?}): duplicate setting tuple",
                    term.s
                )));
            }
            coeffs[flat] = parse_rational(&term.c).ok_or_else(|| {
                Error::Document(format!(
                    "term {k} (s={:?}): malformed rational {:?}",
                    term.s, term.c
                ))
            })?;
        }
        expr = BellExpression::from_coefficients(scenario, coeffs)?;
        Ok(expr)
    }

    /// Nonzero terms only, sorted lexicographically by setting tuple.
    pub fn from_expression(expr: &BellExpression, metadata: Option<Metadata>) -> Self {
        Self {
            settings: expr.scenario().settings().to_vec(),
            terms: expr
                .terms()
                .map(|(s, c)| Term {
                    s,
                    c: format_rational(c),
                })
                .collect(),
            metadata,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }
}

pub fn parse_document(text: &str) -> Result<ExpressionDocument> {
    serde_json::from_str(text).map_err(|e| Error::Document(format!("malformed document: {e}")))
}

pub fn parse_expression(text: &str) -> Result<BellExpression> {
    parse_document(text)?.to_expression()
}

pub fn serialize_expression(expr: &BellExpression) -> ExpressionDocument {
    ExpressionDocument::from_expression(expr, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lifting::mabk;

    const CHSH: &str = r#"{"settings":[2,2],"terms":[{"s":[0,0],"c":"1/2"},{"s":[0,1],"c":"1/2"},{"s":[1,0],"c":"1/2"},{"s":[1,1],"c":"-1/2"}]}"#;

    #[test]
    fn parses_chsh() {
        assert_eq!(parse_expression(CHSH).unwrap(), mabk(2).unwrap());
    }

    #[test]
    fn empty_terms_is_zero() {
        let e = parse_expression(r#"{"settings":[1],"terms":[]}"#).unwrap();
        assert!(e.is_zero());
        assert!(serialize_expression(&e).terms.is_empty());
    }

    #[test]
    fn errors_name_the_term() {
        let oob = parse_expression(r#"{"settings":[2,2],"terms":[{"s":[0,5],"c":"1"}]}"#).unwrap_err();
        assert!(oob.to_string().contains("index out of bounds"), "{oob}");
        assert!(oob.to_string().contains("[0, 5]"));
        let dup = parse_expression(
            r#"{"settings":[2,2],"terms":[{"s":[0,1],"c":"1"},{"s":[0,1],"c":"2"}]}"#,
        )
        .unwrap_err();
        assert!(dup.to_string().contains("duplicate"), "{dup}");
        let bad = parse_expression(r#"{"settings":[2,2],"terms":[{"s":[1,1],"c":"x/2"}]}"#).unwrap_err();
        assert!(bad.to_string().contains("malformed rational"), "{bad}");
        let zero_den = parse_expression(r#"{"settings":[2],"terms":[{"s":[1],"c":"1/0"}]}"#).unwrap_err();
        assert!(zero_den.to_string().contains("malformed rational"));
        let short = parse_expression(r#"{"settings":[2,2],"terms":[{"s":[1],"c":"1"}]}"#).unwrap_err();
        assert!(short.to_string().contains("term 0"));
        assert!(parse_expression(r#"{"settings":[0],"terms":[]}"#).is_err());
        assert!(parse_expression("not json").is_err());
    }

    #[test]
    fn serialize_is_canonical() {
        let doc = serialize_expression(&mabk(2).unwrap());
        assert_eq!(doc.terms.len(), 4);
        assert_eq!(doc.terms[3].c, "-1/2");
        let messy = r#"{"settings":[2,2],"terms":[{"s":[1,1],"c":" -2/4 "},{"s":[0,0],"c":"1/2"},{"s":[1,0],"c":"0"},{"s":[0,1],"c":"1/2"},{"s":[1,0],"c":"1/2"}]}"#;
        assert!(parse_expression(messy).is_err()); // duplicate [1,0]
        let messy = r#"{"settings":[2,2],"terms":[{"s":[1,1],"c":" -2/4 "},{"s":[0,0],"c":"1/2"},{"s":[0,1],"c":"1/2"},{"s":[1,0],"c":"1/2"}],"metadata":{"name":"x"}}"#;
        let reparsed = parse_expression(&serialize_expression(&parse_expression(messy).unwrap()).to_json()).unwrap();
        assert_eq!(reparsed, mabk(2).unwrap());
    }

    #[test]
    fn rational_forms() {
        assert_eq!(parse_rational("3"), Some(Rational::from_integer(3.into())));
        assert_eq!(parse_rational("-6/4"), Some(Rational::new((-3).into(), 2.into())));
        assert_eq!(parse_rational("1.5"), None);
        assert_eq!(format_rational(&Rational::from_integer(2.into())), "2/1");
    }
}
