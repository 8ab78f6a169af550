//! Bit strings: two-party inputs, message payloads and transcripts all use this type.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An owned sequence of bits. Index 0 is the first bit (`x_1` in one-based notation).
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn new() -> Self {
        BitString::default()
    }

    pub fn zeros(len: usize) -> Self {
        BitString { bits: vec![false; len] }
    }

    pub fn from_bools(bits: Vec<bool>) -> Self {
        BitString { bits }
    }

    /// Length-`len` string with ones exactly at the given zero-based positions.
    pub fn with_ones(len: usize, ones: &[usize]) -> Result<Self> {
        let mut s = BitString::zeros(len);
        for &i in ones {
            if i >= len {
                return Err(Error::input(format!("bit index {i} out of range for length {len}")));
            }
            s.bits[i] = true;
        }
        Ok(s)
    }

    /// Parses a string of `0`/`1` characters (underscores and spaces ignored).
    pub fn parse_binary(s: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                '_' | ' ' => {}
                other => return Err(Error::input(format!("invalid binary digit {other:?}"))),
            }
        }
        Ok(BitString { bits })
    }

    /// Interprets the low `len` bits of `value`, most significant first.
    pub fn from_uint(len: usize, value: u64) -> Self {
        let mut s = BitString::new();
        s.push_uint(value, len);
        s
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn set(&mut self, i: usize, value: bool) {
        self.bits[i] = value;
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    /// Appends `width` bits of `value`, most significant first.
    pub fn push_uint(&mut self, value: u64, width: usize) {
        debug_assert!(width == 64 || value >> width == 0, "{value} does not fit {width} bits");
        for i in (0..width).rev() {
            self.bits.push((value >> i) & 1 == 1);
        }
    }

    pub fn extend(&mut self, other: &BitString) {
        self.bits.extend_from_slice(&other.bits);
    }

    /// Reads `width` bits starting at `pos` as an unsigned integer.
    pub fn read_uint(&self, pos: usize, width: usize) -> Result<u64> {
        if pos + width > self.bits.len() {
            return Err(Error::protocol(format!(
                "truncated payload: need {width} bits at {pos}, have {}",
                self.bits.len()
            )));
        }
        Ok(self.bits[pos..pos + width].iter().fold(0u64, |acc, &b| (acc << 1) | b as u64))
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.bits
    }

    /// Hex encoding, bits packed most-significant first, zero padded at the end.
    pub fn to_hex(&self) -> String {
        self.bits
            .chunks(4)
            .map(|chunk| {
                let v =
                    chunk.iter().chain(std::iter::repeat(&false)).take(4).fold(0u32, |acc, &b| (acc << 1) | b as u32);
                char::from_digit(v, 16).unwrap()
            })
            .collect()
    }

    pub fn from_hex(hex: &str, len: usize) -> Result<Self> {
        let hex = hex.trim_start_matches("0x");
        if hex.len() != len.div_ceil(4) {
            return Err(Error::input(format!("hex string of {} digits cannot hold exactly {len} bits", hex.len())));
        }
        let mut bits = Vec::with_capacity(hex.len() * 4);
        for c in hex.chars() {
            let v = c.to_digit(16).ok_or_else(|| Error::input(format!("invalid hex digit {c:?}")))?;
            for i in (0..4).rev() {
                bits.push((v >> i) & 1 == 1);
            }
        }
        if bits[len..].iter().any(|&b| b) {
            return Err(Error::input("non-zero padding bits in hex string"));
        }
        bits.truncate(len);
        Ok(BitString { bits })
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        BitString::parse_binary(&s).map_err(serde::de::Error::custom)
    }
}

/// Number of bits needed to write any id in `0..n` (at least one).
pub fn id_bits(n: usize) -> usize {
    if n <= 2 {
        1
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}
