//! Physical quantities read from config files.
//!
//! A quantity is either a bare number (already SI) or a string holding a
//! number followed by a unit, e.g. `"14 mm"`, `"2 GPa"`, `"90 deg"`.
//! Quantities always serialize back as bare SI numbers, so a resolved config
//! re-reads to exactly the same values.

use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

fn parse_with_units(text: &str, units: &[(&str, f64)], kind: &str) -> Result<f64, String> {
    let text = text.trim();
    let split = text
        .find(|c: char| c.is_ascii_alphabetic() && c != 'e' && c != 'E')
        .unwrap_or(text.len());
    let (number, unit) = text.split_at(split);
    let value: f64 = number
        .trim()
        .parse()
        .map_err(|_| format!("invalid {kind} {text:?}: cannot parse number {:?}", number.trim()))?;
    let unit = unit.trim();
    if unit.is_empty() {
        return Ok(value);
    }
    units
        .iter()
        .find(|(name, _)| *name == unit)
        .map(|(_, scale)| value * scale)
        .ok_or_else(|| {
            let known: Vec<&str> = units.iter().map(|(n, _)| *n).collect();
            format!("invalid {kind} {text:?}: unknown unit {unit:?}, expected one of {known:?}")
        })
}

macro_rules! quantity {
    ($name:ident, $kind:literal, [$(($unit:literal, $scale:expr)),* $(,)?]) => {
        #[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
        pub struct $name(pub f64);

        impl $name {
            const UNITS: &'static [(&'static str, f64)] = &[$(($unit, $scale)),*];

            pub fn parse(text: &str) -> Result<Self, String> {
                parse_with_units(text, Self::UNITS, $kind).map($name)
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_f64(self.0)
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                struct V;
                impl<'de> Visitor<'de> for V {
                    type Value = $name;

                    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                        write!(f, "a {} as a number or a string with a unit", $kind)
                    }

                    fn visit_f64<E: de::Error>(self, v: f64) -> Result<$name, E> {
                        Ok($name(v))
                    }

                    fn visit_i64<E: de::Error>(self, v: i64) -> Result<$name, E> {
                        Ok($name(v as f64))
                    }

                    fn visit_u64<E: de::Error>(self, v: u64) -> Result<$name, E> {
                        Ok($name(v as f64))
                    }

                    fn visit_str<E: de::Error>(self, v: &str) -> Result<$name, E> {
                        $name::parse(v).map_err(E::custom)
                    }
                }
                d.deserialize_any(V)
            }
        }
    };
}

quantity!(Length, "length", [("m", 1.0), ("cm", 1e-2), ("mm", 1e-3), ("um", 1e-6)]);
quantity!(Modulus, "modulus", [("Pa", 1.0), ("kPa", 1e3), ("MPa", 1e6), ("GPa", 1e9)]);
quantity!(Angle, "angle", [("rad", 1.0), ("deg", std::f64::consts::PI / 180.0)]);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn units_convert_to_si() {
        assert_eq!(Length::parse("14 mm").unwrap().0, 14.0 * 1e-3);
        assert_eq!(Length::parse("0.02").unwrap().0, 0.02);
        assert_eq!(Modulus::parse("2 GPa").unwrap().0, 2e9);
        assert_eq!(Modulus::parse("1.5e-1MPa").unwrap().0, 1.5e-1 * 1e6);
        assert_eq!(Angle::parse("180 deg").unwrap().0, std::f64::consts::PI);
    }

    #[test]
    fn bad_units_are_errors() {
        assert!(Length::parse("14 GPa").unwrap_err().contains("unknown unit"));
        assert!(Angle::parse("ninety deg").is_err());
    }

    #[test]
    fn serializes_as_bare_si() {
        let v: Vec<Length> = serde_json::from_str(r#"["3 mm", 0.5, 2]"#).unwrap();
        assert_eq!(serde_json::to_string(&v).unwrap(), "[0.003,0.5,2.0]");
    }
}
