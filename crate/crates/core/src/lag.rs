//! Lag expressions: nonnegative rational combinations of declared generator
//! labels.
//!
//! A lag such as `3/2` lives on the implicit unit label `1`; an
//! incommensurable lag such as `3/2 * sqrt2` carries its coordinates
//! symbolically so the exact layer never touches floating point. Labels other
//! than `1` are declared rationally independent; under that declaration two
//! lags are equal as real numbers exactly when their coordinates agree, which
//! is what lets measure convolution stay exact.

use std::collections::BTreeMap;
use std::fmt;

use num::{Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::rational::{format_rational, parse_rational, to_f64, Rational};

/// Label of the implicit rational generator.
pub const UNIT_LABEL: &str = "1";

/// A lag: finite map from generator labels to nonnegative rational
/// coordinates. Zero coordinates are never stored.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Lag {
    coords: BTreeMap<String, Rational>,
}

impl Lag {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    /// Purely rational lag on the unit label.
    pub fn from_rational(value: Rational) -> Result<Self, Error> {
        Self::from_terms([(UNIT_LABEL.to_string(), value)])
    }

    /// Single term `coeff * label`.
    pub fn term(label: &str, coeff: Rational) -> Result<Self, Error> {
        Self::from_terms([(label.to_string(), coeff)])
    }

    pub fn from_terms<I>(terms: I) -> Result<Self, Error>
    where
        I: IntoIterator<Item = (String, Rational)>,
    {
        let mut coords = BTreeMap::new();
        for (label, coeff) in terms {
            if coeff.is_negative() {
                return Err(Error::InvalidLag(format!(
                    "negative coefficient {} on label `{label}`",
                    format_rational(&coeff)
                )));
            }
            if coeff.is_zero() {
                continue;
            }
            let entry = coords.entry(label).or_insert_with(Rational::zero);
            *entry += coeff;
        }
        coords.retain(|_, c: &mut Rational| !c.is_zero());
        Ok(Self { coords })
    }

    /// Parse `"3/2"`, `"3/2 * sqrt2"`, or a sum of such terms joined by `+`.
    pub fn parse(text: &str) -> Result<Self, Error> {
        let mut terms = Vec::new();
        for raw in text.split('+') {
            let term = raw.trim();
            if term.is_empty() {
                return Err(Error::InvalidLag(format!("empty term in `{text}`")));
            }
            let (coeff, label) = match term.split_once('*') {
                Some((c, l)) => {
                    let label = l.trim();
                    if !is_label(label) {
                        return Err(Error::InvalidLag(format!("bad label `{label}` in `{text}`")));
                    }
                    (parse_rational(c)?, label.to_string())
                }
                None => {
                    if is_label(term) && term != UNIT_LABEL {
                        (Rational::from_integer(1.into()), term.to_string())
                    } else {
                        (parse_rational(term)?, UNIT_LABEL.to_string())
                    }
                }
            };
            if coeff.is_negative() {
                return Err(Error::InvalidLag(format!(
                    "negative coefficient in `{text}`"
                )));
            }
            let label = if label == UNIT_LABEL {
                UNIT_LABEL.to_string()
            } else {
                label
            };
            terms.push((label, coeff));
        }
        Self::from_terms(terms)
    }

    pub fn coords(&self) -> impl Iterator<Item = (&str, &Rational)> {
        self.coords.iter().map(|(l, c)| (l.as_str(), c))
    }

    pub fn coord(&self, label: &str) -> Rational {
        self.coords.get(label).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.coords.keys().map(String::as_str)
    }

    /// Sum of two lags (convolution adds supports).
    pub fn add(&self, other: &Self) -> Self {
        let mut coords = self.coords.clone();
        for (label, coeff) in &other.coords {
            let entry = coords.entry(label.clone()).or_insert_with(Rational::zero);
            *entry += coeff;
        }
        Self { coords }
    }

    /// Multiply every coordinate by a nonnegative rational.
    pub fn scaled(&self, factor: &Rational) -> Result<Self, Error> {
        if factor.is_negative() {
            return Err(Error::InvalidLag("negative scale factor".into()));
        }
        if factor.is_zero() {
            return Ok(Self::zero());
        }
        Ok(Self {
            coords: self
                .coords
                .iter()
                .map(|(l, c)| (l.clone(), c * factor))
                .collect(),
        })
    }

    /// The exact rational value, if the lag lives on the unit label alone.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.coords.len() {
            0 => Some(Rational::zero()),
            1 => self.coords.get(UNIT_LABEL).cloned(),
            _ => None,
        }
    }

    /// Numeric value against a table of generator label values.
    pub fn value(&self, labels: &LabelValues) -> Result<f64, Error> {
        let mut total = 0.0;
        for (label, coeff) in &self.coords {
            let v = labels.get(label).ok_or_else(|| {
                Error::InvalidLag(format!("undeclared generator label `{label}`"))
            })?;
            total += to_f64(coeff) * v;
        }
        Ok(total)
    }
}

impl fmt::Display for Lag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coords.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (label, coeff) in &self.coords {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if label == UNIT_LABEL {
                write!(f, "{}", format_rational(coeff))?;
            } else {
                write!(f, "{} * {label}", format_rational(coeff))?;
            }
        }
        Ok(())
    }
}

impl Serialize for Lag {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Lag {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Lag::parse(&s).map_err(D::Error::custom)
    }
}

fn is_label(s: &str) -> bool {
    s == UNIT_LABEL
        || (!s.is_empty()
            && s.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_'))
}

/// Numeric values for generator labels. The unit label is always 1.
#[derive(Debug, Clone, Default)]
pub struct LabelValues {
    values: BTreeMap<String, f64>,
}

impl LabelValues {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, label: &str, value: f64) -> Self {
        self.insert(label, value);
        self
    }

    pub fn insert(&mut self, label: &str, value: f64) {
        if label != UNIT_LABEL {
            self.values.insert(label.to_string(), value);
        }
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        if label == UNIT_LABEL {
            Some(1.0)
        } else {
            self.values.get(label).copied()
        }
    }

    pub fn labels(&self) -> impl Iterator<Item = (&str, f64)> {
        self.values.iter().map(|(l, v)| (l.as_str(), *v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn parses_plain_and_labelled_terms() {
        let a = Lag::parse("3/2").unwrap();
        assert_eq!(a.as_rational(), Some(rat("3/2")));
        let b = Lag::parse("3/2 * sqrt2").unwrap();
        assert_eq!(b.coord("sqrt2"), rat("3/2"));
        assert_eq!(b.as_rational(), None);
        let c = Lag::parse("1 + 1/2*sqrt2").unwrap();
        assert_eq!(c.coord(UNIT_LABEL), rat("1"));
        assert_eq!(c.coord("sqrt2"), rat("1/2"));
    }

    #[test]
    fn rejects_negative_coefficients() {
        assert!(Lag::parse("-1").is_err());
        assert!(Lag::parse("-1/2 * sqrt2").is_err());
    }

    #[test]
    fn addition_merges_coordinates() {
        let a = Lag::parse("1 + 1/2*sqrt2").unwrap();
        let b = Lag::parse("1/2 + 1/2*sqrt2").unwrap();
        let sum = a.add(&b);
        assert_eq!(sum.coord(UNIT_LABEL), rat("3/2"));
        assert_eq!(sum.coord("sqrt2"), rat("1"));
    }

    #[test]
    fn value_uses_label_table() {
        let labels = LabelValues::new().with("sqrt2", 2f64.sqrt());
        let lag = Lag::parse("1 + 2*sqrt2").unwrap();
        let v = lag.value(&labels).unwrap();
        assert!((v - (1.0 + 2.0 * 2f64.sqrt())).abs() < 1e-15);
        assert!(Lag::parse("phi").unwrap().value(&labels).is_err());
    }

    #[test]
    fn display_round_trips() {
        for s in ["0", "3/2", "1 + 1/2 * sqrt2", "2 * tau"] {
            let lag = Lag::parse(s).unwrap();
            assert_eq!(Lag::parse(&lag.to_string()).unwrap(), lag);
        }
    }
}
