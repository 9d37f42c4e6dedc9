//! Binary words and dyadic intervals.
//!
//! A word `z_1 z_2 ... z_m` is identified with the integer
//! `k = z_1 2^0 + z_2 2^1 + ... + z_m 2^(m-1)`, so `z_1` is the least
//! significant bit. Words render left to right starting at `z_1`; the word
//! for `k = 3, m = 3` is `110`.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;

use crate::error::{Error, Result};

/// Longest word the `u64` index can hold.
pub const MAX_WORD_LEN: u32 = 63;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    index: u64,
    len: u32,
}

impl Word {
    pub const EMPTY: Word = Word { index: 0, len: 0 };

    pub fn new(index: u64, len: u32) -> Result<Self> {
        word_of_index(index, len)
    }

    /// The integer `k(w)`.
    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Bit `z_r`, 1-based.
    pub fn bit(&self, r: u32) -> u8 {
        assert!(r >= 1 && r <= self.len, "bit {r} out of range for word of length {}", self.len);
        ((self.index >> (r - 1)) & 1) as u8
    }

    pub fn bits(&self) -> impl Iterator<Item = u8> + '_ {
        (1..=self.len).map(|r| self.bit(r))
    }

    /// `z w`: the word with `z` placed in front as the new least-significant bit.
    pub fn prepend(&self, z: u8) -> Word {
        debug_assert!(z <= 1);
        assert!(self.len < MAX_WORD_LEN);
        Word { index: (self.index << 1) | z as u64, len: self.len + 1 }
    }

    /// Drops the leading `s` bits, keeping `z_{s+1} ... z_m`.
    pub fn drop_front(&self, s: u32) -> Word {
        let s = s.min(self.len);
        Word { index: if s >= 64 { 0 } else { self.index >> s }, len: self.len - s }
    }

    /// Componentwise XOR of two words of equal length.
    pub fn xor(&self, other: &Word) -> Word {
        assert_eq!(self.len, other.len);
        Word { index: self.index ^ other.index, len: self.len }
    }

    /// Number of positions where the words differ.
    pub fn hamming(&self, other: &Word) -> u32 {
        assert_eq!(self.len, other.len);
        (self.index ^ other.index).count_ones()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len == 0 {
            return f.write_str("∅");
        }
        for z in self.bits() {
            f.write_str(if z == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() || s == "∅" || s == "-" {
            return Ok(Word::EMPTY);
        }
        if s.len() > MAX_WORD_LEN as usize {
            return Err(Error::Validation(format!("word '{s}' is too long")));
        }
        let mut index = 0u64;
        for (r, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => index |= 1 << r,
                _ => return Err(Error::Validation(format!("'{s}' is not a binary word"))),
            }
        }
        Ok(Word { index, len: s.len() as u32 })
    }
}

pub fn word_of_index(k: u64, m: u32) -> Result<Word> {
    if m > MAX_WORD_LEN {
        return Err(Error::Range { what: "word length", value: m as u64, lo: 0, hi: MAX_WORD_LEN as u64 });
    }
    if k >> m != 0 {
        return Err(Error::Range { what: "index", value: k, lo: 0, hi: (1u64 << m) - 1 });
    }
    Ok(Word { index: k, len: m })
}

pub fn index_of_word(w: &Word) -> u64 {
    w.index
}

/// `[k(w)/2^m, (k(w)+1)/2^m]`; the empty word maps to `[0, 1]`.
pub fn interval_of_word(w: &Word) -> (Ratio<u64>, Ratio<u64>) {
    let denom = 1u64 << w.len;
    (Ratio::new(w.index, denom), Ratio::new(w.index + 1, denom))
}

/// `z_{s+1} ... z_n` for `b_n(k) = z_1 ... z_n`, computed as `b_{n-s}(floor(k / 2^s))`.
pub fn suffix_of_index(k: u64, s: u32, n: u32) -> Result<Word> {
    if n < 2 || s < 1 || s > n - 1 {
        return Err(Error::Range { what: "shift", value: s as u64, lo: 1, hi: n.saturating_sub(1) as u64 });
    }
    let full = word_of_index(k, n)?;
    word_of_index(full.index >> s, n - s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn word_of_index_examples() {
        assert_eq!(word_of_index(3, 3).unwrap().to_string(), "110");
        assert_eq!(word_of_index(0, 3).unwrap().to_string(), "000");
        assert_eq!(word_of_index(5, 3).unwrap().to_string(), "101");
        assert!(matches!(word_of_index(8, 3), Err(Error::Range { .. })));
    }

    #[test]
    fn index_round_trip_exhaustive_small() {
        for m in 0..=12u32 {
            for k in 0..(1u64 << m) {
                let word = word_of_index(k, m).unwrap();
                assert_eq!(index_of_word(&word), k);
                assert_eq!(word.to_string().parse::<Word>().unwrap(), word);
            }
        }
    }

    #[test]
    fn intervals() {
        let (lo, hi) = interval_of_word(&w("01"));
        assert_eq!((lo, hi), (Ratio::new(1, 2), Ratio::new(3, 4)));
        assert_eq!(interval_of_word(&Word::EMPTY), (Ratio::from_integer(0), Ratio::from_integer(1)));
        let (lo, hi) = interval_of_word(&w("110"));
        assert_eq!((lo, hi), (Ratio::new(3, 8), Ratio::new(4, 8)));
    }

    #[test]
    fn suffix_examples() {
        assert_eq!(suffix_of_index(6, 1, 3).unwrap(), w("11"));
        assert_eq!(suffix_of_index(0, 2, 3).unwrap(), w("0"));
        assert_eq!(suffix_of_index(7, 2, 3).unwrap(), w("1"));
        assert!(suffix_of_index(8, 1, 3).is_err());
        assert!(suffix_of_index(1, 3, 3).is_err());
        assert!(suffix_of_index(1, 0, 3).is_err());
    }

    #[test]
    fn shift_identities() {
        // b_{l+1}(2k) = 0 b_l(k), b_{l+1}(2k+1) = 1 b_l(k)
        for l in 1..8u32 {
            for k in 0..(1u64 << l) {
                let base = word_of_index(k, l).unwrap();
                assert_eq!(word_of_index(2 * k, l + 1).unwrap(), base.prepend(0));
                assert_eq!(word_of_index(2 * k + 1, l + 1).unwrap(), base.prepend(1));
                if k + 1 < (1 << l) {
                    let next = word_of_index(k + 1, l).unwrap();
                    assert_eq!(word_of_index(2 * k + 2, l + 1).unwrap(), next.prepend(0));
                }
            }
        }
    }

    #[test]
    fn dyadic_refinement_of_intervals() {
        for l in 1..6u32 {
            for k in 0..(1u64 << l) {
                let parent = word_of_index(k, l).unwrap();
                let (plo, phi) = interval_of_word(&parent);
                let (llo, lhi) = interval_of_word(&parent.prepend(0));
                let (rlo, rhi) = interval_of_word(&parent.prepend(1));
                assert_eq!(plo, llo);
                assert_eq!(lhi, rlo);
                assert_eq!(rhi, phi);
            }
        }
    }

    #[test]
    fn suffix_agrees_with_drop_front() {
        for n in 2..7u32 {
            for s in 1..n {
                for k in 0..(1u64 << n) {
                    let full = word_of_index(k, n).unwrap();
                    assert_eq!(suffix_of_index(k, s, n).unwrap(), full.drop_front(s));
                }
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn index_round_trip_large(m in 13u32..=20, seed in proptest::prelude::any::<u64>()) {
            let k = seed & ((1u64 << m) - 1);
            let word = word_of_index(k, m).unwrap();
            proptest::prop_assert_eq!(index_of_word(&word), k);
        }
    }
}
