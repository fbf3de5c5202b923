use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Most levels a [`LevelVector`] can carry.
pub const MAX_LEVELS: usize = 32;

/// A column of the binary expansion model: `len` bits, most significant
/// level first. Level 0 is the MSB and sits in bit `len - 1` of `bits`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LevelVector {
    bits: u32,
    len: u8,
}

impl LevelVector {
    pub fn new(bits: u32, len: usize) -> Result<Self> {
        if len == 0 || len > MAX_LEVELS {
            return Err(Error::Domain(format!(
                "level count must be in 1..={MAX_LEVELS}, got {len}"
            )));
        }
        if len < 32 && bits >> len != 0 {
            return Err(Error::Domain(format!(
                "{bits:#b} does not fit in {len} levels"
            )));
        }
        Ok(Self {
            bits,
            len: len as u8,
        })
    }

    pub fn zero(len: usize) -> Self {
        Self::new(0, len).expect("valid length")
    }

    /// Parse an MSB-first string of `0`/`1`, e.g. `"101"`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut bits = 0u32;
        for ch in s.chars() {
            bits = match ch {
                '0' => bits << 1,
                '1' => bits << 1 | 1,
                _ => return Err(Error::Domain(format!("not a binary digit: {ch:?}"))),
            };
        }
        Self::new(bits, s.len())
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// The top `n` levels as an `n`-level vector.
    pub fn top(&self, n: usize) -> Self {
        assert!(
            n >= 1 && n <= self.len(),
            "top({n}) of a {}-level vector",
            self.len
        );
        Self {
            bits: self.bits >> (self.len() - n),
            len: n as u8,
        }
    }

    /// The bottom `n` levels as an `n`-level vector (`n` may be 0).
    pub fn bottom_bits(&self, n: usize) -> u32 {
        assert!(n <= self.len());
        if n == 0 {
            0
        } else {
            self.bits & low_mask(n)
        }
    }

    /// Same vector with the bottom `n` levels cleared.
    pub fn clear_bottom(&self, n: usize) -> Self {
        assert!(n <= self.len());
        Self {
            bits: self.bits & !low_mask(n),
            len: self.len,
        }
    }

    pub fn xor(&self, other: &Self) -> Self {
        assert_eq!(
            self.len, other.len,
            "xor of vectors with different level counts"
        );
        Self {
            bits: self.bits ^ other.bits,
            len: self.len,
        }
    }

    /// Place an `n`-level vector on the top `n` levels of a `q`-level one.
    pub fn lift(&self, q: usize) -> Self {
        assert!(q >= self.len() && q <= MAX_LEVELS);
        Self {
            bits: self.bits << (q - self.len()),
            len: q as u8,
        }
    }
}

pub(crate) fn low_mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

impl fmt::Display for LevelVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in (0..self.len()).rev() {
            f.write_str(if self.bits >> i & 1 == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// What receiver `B_i` sees: the top `n` levels when its pair is active,
/// nothing otherwise. The bottom `q - n` levels are below its noise floor.
pub fn be_receive(x: LevelVector, active: bool, n: usize) -> Option<LevelVector> {
    active.then(|| x.top(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lv(s: &str) -> LevelVector {
        LevelVector::parse(s).unwrap()
    }

    #[test]
    fn receive_shift_semantics() {
        assert_eq!(be_receive(lv("101"), true, 2), Some(lv("10")));
        assert_eq!(be_receive(lv("111"), true, 3), Some(lv("111")));
        assert_eq!(be_receive(lv("010"), false, 3), None);
    }

    #[test]
    fn display_and_parse_agree() {
        assert_eq!(lv("0110").to_string(), "0110");
        assert_eq!(lv("0110").bits(), 6);
        assert!(LevelVector::parse("012").is_err());
        assert!(LevelVector::new(8, 3).is_err());
    }

    #[test]
    fn lift_top_and_bottom() {
        let x = lv("10");
        assert_eq!(x.lift(3), lv("100"));
        assert_eq!(lv("1011").bottom_bits(2), 0b11);
        assert_eq!(lv("1011").clear_bottom(1), lv("1010"));
        assert_eq!(lv("1011").xor(&lv("0110")), lv("1101"));
        assert_eq!(lv("1").bottom_bits(0), 0);
    }
}
