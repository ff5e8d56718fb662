//! Certified-knowledge bound for truncated series.

use serde::de;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

/// First order at which a series coefficient is unknown.
///
/// `Finite(w)` certifies every coefficient below order `w`; `Exact` certifies
/// all orders (polynomial data such as constants and monomials). Ordering puts
/// `Exact` above every finite bound, so `min` implements the pessimistic
/// bookkeeping rule directly.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum Window {
    Finite(i64),
    Exact,
}

impl Window {
    /// Shift by a fixed order offset; `Exact` absorbs shifts.
    pub fn shift(self, by: i64) -> Window {
        match self {
            Window::Finite(w) => Window::Finite(w + by),
            Window::Exact => Window::Exact,
        }
    }

    /// Shift by a possibly-exact valuation bound: used for product windows,
    /// where an exactly-zero factor certifies the product to all orders.
    pub fn shift_by(self, by: Window) -> Window {
        match (self, by) {
            (Window::Finite(w), Window::Finite(v)) => Window::Finite(w + v),
            _ => Window::Exact,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Window::Exact)
    }

    /// True when coefficients of every order below `k` are certified.
    pub fn covers(self, k: i64) -> bool {
        match self {
            Window::Finite(w) => k <= w,
            Window::Exact => true,
        }
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Window::Finite(w) => write!(f, "{w}"),
            Window::Exact => write!(f, "exact"),
        }
    }
}

// JSON form: a plain integer for finite windows, the string "exact" otherwise.

impl Serialize for Window {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Window::Finite(w) => serializer.serialize_i64(*w),
            Window::Exact => serializer.serialize_str("exact"),
        }
    }
}

impl<'de> Deserialize<'de> for Window {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Int(w) => Ok(Window::Finite(w)),
            Raw::Text(s) if s == "exact" => Ok(Window::Exact),
            Raw::Text(s) => Err(de::Error::custom(format!("bad window: {s:?}"))),
        }
    }
}
