//! Words of minimal, uniquely ergodic, zero-entropy subshifts: the Thue–Morse
//! word and Sturmian rotation words.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shift::{ShiftSpace, Symbol, Word};

/// `1/golden` to 64 digits: the rotation number of the Fibonacci word.
pub const INVERSE_GOLDEN: &str = "0.6180339887498948482045868343656381177203091798057628621354486227";

/// Fixed point of `0 -> 01, 1 -> 10`, truncated: `x_i` is the parity of the
/// binary digit sum of `i`.
pub fn thue_morse_word(n: usize) -> Word {
    Word((0..n).map(|i| (i.count_ones() % 2) as Symbol).collect())
}

fn parse_unit_decimal(s: &str) -> Result<(BigUint, BigUint)> {
    let frac = s
        .strip_prefix("0.")
        .ok_or_else(|| Error::InvalidInput(format!("expected a decimal in [0, 1), got {s:?}")))?;
    if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
        return Err(Error::InvalidInput(format!("expected a decimal in [0, 1), got {s:?}")));
    }
    let num = BigUint::parse_bytes(frac.as_bytes(), 10).expect("digits");
    Ok((num, BigUint::from(10u32).pow(frac.len() as u32)))
}

/// `x_i = ⌊(i+1)α + ρ⌋ - ⌊iα + ρ⌋` for `i = 1 ..= n`, with `α` and `ρ`
/// exact decimals in `[0, 1)`. `α` needs at least 30 digits.
pub fn sturmian_word(alpha: &str, rho: &str, n: usize) -> Result<Word> {
    let (a, da) = parse_unit_decimal(alpha)?;
    if da.to_string().len() - 1 < 30 {
        return Err(Error::InvalidInput("alpha needs at least 30 decimal digits".into()));
    }
    let (r, dr) = parse_unit_decimal(rho)?;
    // common denominator
    let den = &da * &dr;
    let a = &a * &dr;
    let r = &r * &da;
    // fractional part of iα + ρ, starting at i = 1
    let mut frac = (&a + &r) % &den;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let next = &frac + &a;
        if next >= den {
            out.push(1);
            frac = next - &den;
        } else {
            out.push(0);
            frac = next;
        }
    }
    Ok(Word(out))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MinimalKind {
    ThueMorse,
    /// Sturmian word of rotation number `1/golden`.
    Fibonacci,
}

/// A minimal word placed on two symbols of an ambient shift.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimalGenerator {
    pub kind: MinimalKind,
    /// Ambient symbols standing for 0 and 1.
    pub symbols: [Symbol; 2],
}

impl MinimalGenerator {
    /// Thue–Morse on the first pair of symbols carrying a full 2-shift;
    /// otherwise the Fibonacci word on the first pair where it fits.
    pub fn for_shift(shift: &ShiftSpace) -> Result<Self> {
        let k = shift.k();
        let ok = |a: Symbol, b: Symbol, pairs: &[(usize, usize)]| {
            pairs.iter().all(|&(x, y)| shift.allowed([a, b][x], [a, b][y]))
        };
        for a in 0..k {
            for b in 0..k {
                if a != b && ok(a, b, &[(0, 0), (0, 1), (1, 0), (1, 1)]) {
                    return Ok(MinimalGenerator { kind: MinimalKind::ThueMorse, symbols: [a, b] });
                }
            }
        }
        // the Fibonacci word uses 01, 10, 11 but never 00
        for a in 0..k {
            for b in 0..k {
                if a != b && ok(a, b, &[(0, 1), (1, 0), (1, 1)]) {
                    return Ok(MinimalGenerator { kind: MinimalKind::Fibonacci, symbols: [a, b] });
                }
            }
        }
        Err(Error::MinimalWordUnavailable)
    }

    /// Symbols `offset .. offset + n` of the generated word.
    pub fn generate(&self, offset: usize, n: usize) -> Word {
        let raw = match self.kind {
            MinimalKind::ThueMorse => Word((offset..offset + n).map(|i| (i.count_ones() % 2) as Symbol).collect()),
            MinimalKind::Fibonacci => {
                let w = sturmian_word(INVERSE_GOLDEN, "0.0", offset + n).expect("valid constants");
                Word(w.0[offset..].to_vec())
            }
        };
        Word(raw.iter().map(|&s| self.symbols[s]).collect())
    }

    /// First position at which `w` occurs, searching a window of `limit`.
    pub fn find(&self, w: &[Symbol], limit: usize) -> Option<usize> {
        if w.is_empty() {
            return Some(0);
        }
        let text = self.generate(0, limit + w.len());
        (0..limit).find(|&i| &text[i..i + w.len()] == w)
    }
}
