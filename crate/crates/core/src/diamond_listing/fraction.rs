use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An exponent `num/den`, kept exact so thresholds like `n^{5/6}` compare
/// without rounding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Fraction {
    pub num: u32,
    pub den: u32,
}

impl Fraction {
    pub const fn new(num: u32, den: u32) -> Self {
        Fraction { num, den }
    }

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn power(self, n: usize) -> f64 {
        (n as f64).powf(self.value())
    }

    /// `x > n^self`, exact when the integers fit.
    pub fn exceeded_by(self, x: usize, n: usize) -> bool {
        match ((x as u128).checked_pow(self.den), (n as u128).checked_pow(self.num)) {
            (Some(a), Some(b)) => a > b,
            _ => x as f64 > self.power(n),
        }
    }

    /// `ceil(n^self / c)`, exact when the integers fit.
    pub fn ceil_power_div(self, n: usize, c: usize) -> usize {
        let guess = (self.power(n) / c as f64).ceil().max(0.0) as usize;
        // smallest t with (c t)^den >= n^num
        let ok = |t: usize| match ((c as u128 * t as u128).checked_pow(self.den), (n as u128).checked_pow(self.num)) {
            (Some(a), Some(b)) => a >= b,
            _ => (c * t) as f64 >= self.power(n),
        };
        let mut t = guess.saturating_sub(1);
        while !ok(t) {
            t += 1;
        }
        while t > 0 && ok(t - 1) {
            t -= 1;
        }
        t
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Fraction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::input(format!("expected a fraction like 5/6, got {s:?}"));
        let (num, den) = match s.trim().split_once('/') {
            Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
            None => (s.trim().parse().map_err(|_| bad())?, 1),
        };
        if den == 0 {
            return Err(bad());
        }
        Ok(Fraction { num, den })
    }
}

impl TryFrom<String> for Fraction {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Fraction> for String {
    fn from(f: Fraction) -> String {
        f.to_string()
    }
}
