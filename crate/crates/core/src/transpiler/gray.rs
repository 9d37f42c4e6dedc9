use crate::distribution::{index_of_word, Word};
use crate::error::{Error, Result};

pub const MAX_GRAY_BITS: u32 = 24;

/// Binary-reflected Gray walk over `Z_2^m`.
///
/// `words[k] = b_m(k) ⊕ b_m(⌊k/2⌋)` and `gamma[k] = k(words[k])`. For
/// `k ≥ 1`, `masks[k-1] = gamma[k] ^ gamma[k-1] = 2^(flips[k-1] - 1)`;
/// `flips` are 1-based word positions. `closing_flip` is the position that
/// returns the last word to the first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayPlan {
    pub m: u32,
    pub words: Vec<Word>,
    pub gamma: Vec<u64>,
    pub masks: Vec<u64>,
    pub flips: Vec<u32>,
    pub closing_flip: u32,
}

pub fn gray_plan(m: u32) -> Result<GrayPlan> {
    if !(1..=MAX_GRAY_BITS).contains(&m) {
        return Err(Error::Range { what: "control count", value: m as u64, lo: 1, hi: MAX_GRAY_BITS as u64 });
    }
    let size = 1u64 << m;
    let words: Vec<Word> =
        (0..size).map(|k| Ok(Word::new(k, m)?.xor(&Word::new(k >> 1, m)?))).collect::<Result<_>>()?;
    let gamma: Vec<u64> = words.iter().map(index_of_word).collect();
    let masks: Vec<u64> = gamma.windows(2).map(|g| g[0] ^ g[1]).collect();
    let flips = masks.iter().map(|d| d.trailing_zeros() + 1).collect();
    let closing = gamma[gamma.len() - 1] ^ gamma[0];
    Ok(GrayPlan { m, words, gamma, masks, flips, closing_flip: closing.trailing_zeros() + 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m3_words() {
        let plan = gray_plan(3).unwrap();
        let words: Vec<String> = plan.words.iter().map(|w| w.to_string()).collect();
        assert_eq!(words, ["000", "100", "110", "010", "011", "111", "101", "001"]);
        assert_eq!(plan.gamma, [0, 1, 3, 2, 6, 7, 5, 4]);
        // under the LSB-first index every step flips the bit it names
        assert_eq!(plan.masks, [1, 2, 1, 4, 1, 2, 1]);
        assert_eq!(plan.flips, [1, 2, 1, 3, 1, 2, 1]);
        assert_eq!(plan.closing_flip, 3);
    }

    #[test]
    fn m1() {
        let plan = gray_plan(1).unwrap();
        let words: Vec<String> = plan.words.iter().map(|w| w.to_string()).collect();
        assert_eq!(words, ["0", "1"]);
        assert_eq!(plan.flips, [1]);
        assert_eq!(plan.closing_flip, 1);
    }

    #[test]
    fn range() {
        assert!(gray_plan(0).is_err());
        assert!(gray_plan(MAX_GRAY_BITS + 1).is_err());
    }

    #[test]
    fn enumeration_is_a_hamming_one_permutation() {
        for m in 1..=16 {
            let plan = gray_plan(m).unwrap();
            let mut seen = vec![false; 1 << m];
            for g in &plan.gamma {
                assert!(!seen[*g as usize]);
                seen[*g as usize] = true;
            }
            for (pair, flip) in plan.words.windows(2).zip(&plan.flips) {
                assert_eq!(pair[0].hamming(&pair[1]), 1);
                assert_eq!(pair[0].xor(&pair[1]).index(), 1 << (flip - 1));
            }
            assert!(plan.masks.iter().all(|d| d.is_power_of_two()));
            assert_eq!(plan.words.last().unwrap().hamming(&plan.words[0]), 1);
        }
    }
}
