use std::fmt;

use serde::{Deserialize, Serialize};

/// A half-integer stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HalfInt(pub i32);

impl HalfInt {
    pub const fn from_doubled(twice: i32) -> Self {
        HalfInt(twice)
    }

    pub const fn doubled(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub const fn abs(self) -> Self {
        HalfInt(self.0.abs())
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_rational() {
        assert_eq!(HalfInt(3).to_string(), "3/2");
        assert_eq!(HalfInt(-1).to_string(), "-1/2");
        assert_eq!(HalfInt(4).to_string(), "2");
        assert_eq!(HalfInt(0).to_string(), "0");
    }

    #[test]
    fn value_and_parity() {
        assert_eq!(HalfInt(-3).value(), -1.5);
        assert!(HalfInt(-2).is_integer());
        assert!(!HalfInt(5).is_integer());
    }
}
