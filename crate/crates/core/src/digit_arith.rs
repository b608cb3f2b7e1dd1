//! Carry-free base-p digit vector arithmetic.
//!
//! A [`DigitVec`] is a fixed-length vector of base-p digits, written most
//! significant digit first (`"0121"` is the index 0·27 + 1·9 + 2·3 + 1).
//! The same value serves as a position index, a syndrome and an element of
//! the group `(Z/p)^r` under digitwise addition ("XOR" for base p).

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{CodeError, Result};

/// Largest base accepted. Textual digits use `0-9a-z`.
pub const MAX_BASE: u32 = 36;

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Validates that `p` is a usable prime base.
pub fn check_base(p: u32) -> Result<u8> {
    if !is_prime(p) || p > MAX_BASE {
        return Err(CodeError::NonPrimeBase(p));
    }
    Ok(p as u8)
}

/// A vector of base-p digits, most significant first.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct DigitVec {
    base: u8,
    digits: Vec<u8>,
}

impl DigitVec {
    pub fn new(base: u32, digits: Vec<u8>) -> Result<Self> {
        let base = check_base(base)?;
        if digits.is_empty() {
            return Err(CodeError::InvalidParameter("digit vector must have length >= 1".into()));
        }
        if let Some(&d) = digits.iter().find(|&&d| d >= base) {
            return Err(CodeError::DigitOutOfRange { digit: d as u32, base });
        }
        Ok(DigitVec { base, digits })
    }

    // Callers guarantee a prime base and in-range digits.
    pub(crate) fn from_raw(base: u8, digits: Vec<u8>) -> Self {
        debug_assert!(digits.iter().all(|&d| d < base));
        DigitVec { base, digits }
    }

    pub fn zero(base: u32, len: usize) -> Result<Self> {
        DigitVec::new(base, vec![0; len])
    }

    /// The vector with a single 1 in the `i`-th least significant digit
    /// (`i` counted from 1).
    pub fn elementary(base: u32, len: usize, i: usize) -> Result<Self> {
        if i == 0 || i > len {
            return Err(CodeError::InvalidParameter(format!(
                "elementary vector e_{i} does not exist for length {len}"
            )));
        }
        let mut digits = vec![0; len];
        digits[len - i] = 1;
        DigitVec::new(base, digits)
    }

    /// Base-p positional expansion of `index` into `len` digits.
    pub fn from_index(index: u64, base: u32, len: usize) -> Result<Self> {
        let b = check_base(base)?;
        if len == 0 {
            return Err(CodeError::InvalidParameter("digit vector must have length >= 1".into()));
        }
        let mut digits = vec![0u8; len];
        let mut rest = index;
        for slot in digits.iter_mut().rev() {
            *slot = (rest % b as u64) as u8;
            rest /= b as u64;
        }
        if rest != 0 {
            return Err(CodeError::IndexOutOfRange { index, base: b, len });
        }
        Ok(DigitVec { base: b, digits })
    }

    /// Parses the textual form: contiguous digit characters, most significant first.
    pub fn parse(base: u32, text: &str) -> Result<Self> {
        let b = check_base(base)?;
        let digits = parse_digits(b, text)?;
        DigitVec::new(base, digits)
    }

    /// Integer value of the vector read as a base-p numeral.
    pub fn index(&self) -> u64 {
        self.digits
            .iter()
            .fold(0u64, |acc, &d| acc * self.base as u64 + d as u64)
    }

    pub fn base(&self) -> u8 {
        self.base
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    /// Digit at place `j`, where place 0 is the least significant.
    pub fn place(&self, j: usize) -> u8 {
        self.digits[self.digits.len() - 1 - j]
    }

    pub fn is_zero(&self) -> bool {
        self.digits.iter().all(|&d| d == 0)
    }

    /// Number of nonzero digits.
    pub fn weight(&self) -> usize {
        self.digits.iter().filter(|&&d| d != 0).count()
    }

    /// The most significant nonzero digit, if any.
    pub fn leading_digit(&self) -> Option<u8> {
        self.digits.iter().copied().find(|&d| d != 0)
    }

    fn check_compatible(&self, other: &DigitVec) -> Result<()> {
        if self.base != other.base || self.digits.len() != other.digits.len() {
            return Err(CodeError::OperandMismatch {
                lhs_base: self.base,
                rhs_base: other.base,
                lhs_len: self.digits.len(),
                rhs_len: other.digits.len(),
            });
        }
        Ok(())
    }

    /// Digitwise sum mod p.
    pub fn xor_add(&self, other: &DigitVec) -> Result<DigitVec> {
        self.check_compatible(other)?;
        let p = self.base as u16;
        let digits = self
            .digits
            .iter()
            .zip(&other.digits)
            .map(|(&a, &b)| ((a as u16 + b as u16) % p) as u8)
            .collect();
        Ok(DigitVec::from_raw(self.base, digits))
    }

    /// Digitwise difference mod p.
    pub fn xor_sub(&self, other: &DigitVec) -> Result<DigitVec> {
        self.xor_add(&other.inverse())
    }

    /// `k·a`: the vector added to itself `k` times.
    pub fn scalar_mul(&self, k: u64) -> DigitVec {
        let p = self.base as u64;
        let k = k % p;
        let digits = self
            .digits
            .iter()
            .map(|&d| ((k * d as u64) % p) as u8)
            .collect();
        DigitVec::from_raw(self.base, digits)
    }

    /// The additive inverse: `a ⊕ inverse(a) = 0`.
    pub fn inverse(&self) -> DigitVec {
        let p = self.base;
        let digits = self.digits.iter().map(|&d| (p - d) % p).collect();
        DigitVec::from_raw(self.base, digits)
    }

    /// In-place `self ⊕= k·other`. Panics on incompatible operands.
    pub fn add_scaled_assign(&mut self, k: u8, other: &DigitVec) {
        assert_eq!(self.base, other.base);
        assert_eq!(self.digits.len(), other.digits.len());
        if k == 0 {
            return;
        }
        let p = self.base as u16;
        for (a, &b) in self.digits.iter_mut().zip(&other.digits) {
            *a = ((*a as u16 + k as u16 * b as u16) % p) as u8;
        }
    }
}

impl fmt::Display for DigitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &d in &self.digits {
            write!(f, "{}", digit_char(d))?;
        }
        Ok(())
    }
}

impl Serialize for DigitVec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

pub(crate) fn digit_char(d: u8) -> char {
    std::char::from_digit(d as u32, MAX_BASE).expect("digit below 36")
}

/// Parses contiguous digit characters into residues, each checked against `base`.
pub fn parse_digits(base: u8, text: &str) -> Result<Vec<u8>> {
    text.chars()
        .map(|c| {
            let d = c.to_digit(MAX_BASE).ok_or(CodeError::InvalidChar(c))?;
            if d >= base as u32 {
                return Err(CodeError::DigitOutOfRange { digit: d, base });
            }
            Ok(d as u8)
        })
        .collect()
}

/// Formats residues as contiguous digit characters.
pub fn format_digits(symbols: &[u8]) -> String {
    symbols.iter().map(|&d| digit_char(d)).collect()
}

/// The unique `l` in `[1, p)` with `l·z ≡ y (mod p)`.
pub fn solve_unique(p: u32, z: u32, y: u32) -> Result<u32> {
    let p8 = check_base(p)?;
    let p = p8 as u32;
    if z.is_multiple_of(p) || y.is_multiple_of(p) {
        return Err(CodeError::ZeroResidue);
    }
    let (z, y) = (z % p, y % p);
    Ok(y * mod_inverse(p, z) % p)
}

/// Multiplicative inverse of a nonzero residue mod a prime, by Fermat.
pub fn mod_inverse(p: u32, a: u32) -> u32 {
    debug_assert!(!a.is_multiple_of(p));
    let mut result = 1u64;
    let mut base = (a % p) as u64;
    let mut exp = p - 2;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        exp >>= 1;
    }
    result as u32
}
