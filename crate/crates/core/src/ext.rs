//! Natural numbers extended by a distinguished infinity.

use std::fmt;
use std::ops::{Add, Mul};

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A natural number or `∞`.
///
/// Ordered with every finite value below `Inf`. Serialized as a JSON number,
/// or as the literal string `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtNat {
    Fin(usize),
    Inf,
}

impl ExtNat {
    pub const ZERO: ExtNat = ExtNat::Fin(0);

    pub fn is_finite(self) -> bool {
        matches!(self, ExtNat::Fin(_))
    }

    pub fn finite(self) -> Option<usize> {
        match self {
            ExtNat::Fin(n) => Some(n),
            ExtNat::Inf => None,
        }
    }
}

impl From<usize> for ExtNat {
    fn from(n: usize) -> Self {
        ExtNat::Fin(n)
    }
}

impl Add for ExtNat {
    type Output = ExtNat;
    fn add(self, rhs: ExtNat) -> ExtNat {
        match (self, rhs) {
            (ExtNat::Fin(a), ExtNat::Fin(b)) => ExtNat::Fin(a + b),
            _ => ExtNat::Inf,
        }
    }
}

/// `0 · ∞ = 0`; a bound multiplied by an empty count is vacuous.
impl Mul for ExtNat {
    type Output = ExtNat;
    fn mul(self, rhs: ExtNat) -> ExtNat {
        match (self, rhs) {
            (ExtNat::Fin(0), _) | (_, ExtNat::Fin(0)) => ExtNat::Fin(0),
            (ExtNat::Fin(a), ExtNat::Fin(b)) => ExtNat::Fin(a * b),
            _ => ExtNat::Inf,
        }
    }
}

impl fmt::Display for ExtNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtNat::Fin(n) => write!(f, "{n}"),
            ExtNat::Inf => f.write_str("inf"),
        }
    }
}

impl Serialize for ExtNat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtNat::Fin(n) => s.serialize_u64(*n as u64),
            ExtNat::Inf => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtNat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct ExtNatVisitor;

        impl Visitor<'_> for ExtNatVisitor {
            type Value = ExtNat;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a natural number or \"inf\"")
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<ExtNat, E> {
                Ok(ExtNat::Fin(v as usize))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<ExtNat, E> {
                usize::try_from(v)
                    .map(ExtNat::Fin)
                    .map_err(|_| E::custom("negative value"))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<ExtNat, E> {
                if v == "inf" {
                    Ok(ExtNat::Inf)
                } else {
                    Err(E::custom(format!("expected \"inf\", found {v:?}")))
                }
            }
        }

        d.deserialize_any(ExtNatVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_puts_infinity_last() {
        assert!(ExtNat::Fin(1_000_000) < ExtNat::Inf);
        assert_eq!(ExtNat::Fin(3).max(ExtNat::Fin(5)), ExtNat::Fin(5));
    }

    #[test]
    fn arithmetic() {
        assert_eq!(ExtNat::Fin(2) * ExtNat::Fin(3), ExtNat::Fin(6));
        assert_eq!(ExtNat::Inf * ExtNat::Fin(0), ExtNat::Fin(0));
        assert_eq!(ExtNat::Inf * ExtNat::Fin(2), ExtNat::Inf);
        assert_eq!(ExtNat::Fin(2) + ExtNat::Inf, ExtNat::Inf);
    }

    #[test]
    fn json_encoding() {
        assert_eq!(serde_json::to_string(&ExtNat::Inf).unwrap(), "\"inf\"");
        assert_eq!(serde_json::to_string(&ExtNat::Fin(4)).unwrap(), "4");
        let v: Vec<ExtNat> = serde_json::from_str("[0, \"inf\", 7]").unwrap();
        assert_eq!(v, vec![ExtNat::Fin(0), ExtNat::Inf, ExtNat::Fin(7)]);
        assert!(serde_json::from_str::<ExtNat>("\"infinity\"").is_err());
    }
}
