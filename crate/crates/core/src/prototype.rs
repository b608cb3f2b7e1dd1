//! The base-p digit-indexed SEC-DED code `[p^r, p^r - r - 1, 3]_p`.
//!
//! Every index `0..p^r` is a position. Position 0 and the powers `p^j` carry
//! redundancy; the rest carry the message in ascending order. The checks are
//! one digit-weighted sum per index place plus a plain value sum.

use std::sync::Arc;

use crate::code_model::{
    apply_corrections, assert_same_code, Codec, CodeSpec, Codeword, Correction, DecodeOutcome,
    Decoded, Family, Label, Position, Role,
};
use crate::digit_arith::{check_base, mod_inverse, solve_unique, DigitVec};
use crate::error::{CodeError, Result};

/// Upper bound on p^r so a prototype table stays in memory comfortably.
pub const MAX_PROTOTYPE_BLOCK: u64 = 1 << 22;

/// Syndromes of a prototype word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrototypeSyndromes {
    /// `Σ v_i · i` under digitwise addition; place `j` holds `S_j`.
    pub index_sum: DigitVec,
    /// `Σ v_i mod p`.
    pub global: u8,
}

impl PrototypeSyndromes {
    /// Digit syndrome `S_j` (place 0 is least significant).
    pub fn digit(&self, j: usize) -> u8 {
        self.index_sum.place(j)
    }

    pub fn is_zero(&self) -> bool {
        self.global == 0 && self.index_sum.is_zero()
    }
}

pub fn build_prototype_spec(p: u32, r: usize) -> Result<CodeSpec> {
    let base = check_base(p)?;
    if r == 0 {
        return Err(CodeError::InvalidParameter("index length r must be >= 1".into()));
    }
    let n = (p as u64)
        .checked_pow(r as u32)
        .filter(|&n| n <= MAX_PROTOTYPE_BLOCK)
        .ok_or_else(|| CodeError::InvalidParameter(format!("{p}^{r} positions is too many")))?;
    let redundant: Vec<u64> = std::iter::once(0)
        .chain((0..r as u32).map(|j| (p as u64).pow(j)))
        .collect();
    let table = (0..n)
        .map(|i| {
            let role = if redundant.contains(&i) { Role::Redundant } else { Role::Message };
            Ok(Position::new(Label::Index(DigitVec::from_index(i, p, r)?), role))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CodeSpec::new(Family::Prototype, base, r, 3, table))
}

#[derive(Clone, Debug)]
pub struct PrototypeCodec {
    spec: Arc<CodeSpec>,
    indices: Vec<DigitVec>,
}

impl PrototypeCodec {
    pub fn new(p: u32, r: usize) -> Result<Self> {
        let spec = Arc::new(build_prototype_spec(p, r)?);
        let indices = spec
            .positions()
            .map(|pos| pos.label.index().expect("prototype positions are indexed").clone())
            .collect();
        Ok(PrototypeCodec { spec, indices })
    }

    pub fn base(&self) -> u8 {
        self.spec.base()
    }

    pub fn index_len(&self) -> usize {
        self.spec.index_len()
    }

    pub fn compute_syndromes(&self, word: &Codeword) -> PrototypeSyndromes {
        self.compute_syndromes_counted(word).0
    }

    /// Syndromes plus the number of symbol additions performed: one per
    /// position for each of the r digit checks and the global check.
    pub fn compute_syndromes_counted(&self, word: &Codeword) -> (PrototypeSyndromes, u64) {
        assert_same_code(&self.spec, word);
        let p = self.base() as u32;
        let r = self.index_len();
        let mut digit_sums = vec![0u32; r];
        let mut global = 0u32;
        let mut adds = 0u64;
        for (index, &value) in self.indices.iter().zip(word.symbols()) {
            let value = value as u32;
            for (sum, &d) in digit_sums.iter_mut().zip(index.digits()) {
                *sum = (*sum + d as u32 * value) % p;
                adds += 1;
            }
            global = (global + value) % p;
            adds += 1;
        }
        let index_sum =
            DigitVec::from_raw(self.base(), digit_sums.into_iter().map(|s| s as u8).collect());
        (PrototypeSyndromes { index_sum, global: global as u8 }, adds)
    }

    /// The weight-3 codeword with ones at `u`, `u ⊕ 11…1` and `u ⊕ 22…2`.
    pub fn weight3_codeword(&self, u: &DigitVec) -> Result<Codeword> {
        if self.base() != 3 {
            return Err(CodeError::InvalidParameter(
                "weight-3 construction needs base 3".into(),
            ));
        }
        if u.base() != 3 || u.len() != self.index_len() {
            return Err(CodeError::InvalidParameter(format!(
                "anchor {u} must be a base-3 vector of length {}",
                self.index_len()
            )));
        }
        let ones = DigitVec::from_raw(3, vec![1; u.len()]);
        let mut word = Codeword::zero(self.spec.clone());
        for k in 0..3 {
            let pos = u.xor_add(&ones.scalar_mul(k))?;
            word.set(pos.index() as usize, 1);
        }
        Ok(word)
    }
}

impl Codec for PrototypeCodec {
    fn spec(&self) -> &Arc<CodeSpec> {
        &self.spec
    }

    fn encode(&self, message: &[u8]) -> Result<Codeword> {
        self.spec.check_message(message)?;
        let p = self.base() as u32;
        let mut word = Codeword::zero(self.spec.clone());
        for (&slot, &m) in self.spec.message_slots().iter().zip(message) {
            word.set(slot, m);
        }
        let syn = self.compute_syndromes(&word);
        // Position p^j only touches check j and the global sum.
        for j in 0..self.index_len() {
            let slot = (p as usize).pow(j as u32);
            word.set(slot, ((p - syn.digit(j) as u32) % p) as u8);
        }
        let total: u32 = word.symbols().iter().map(|&s| s as u32).sum();
        word.set(0, ((p - total % p) % p) as u8);
        Ok(word)
    }

    fn decode(&self, word: &Codeword) -> Decoded {
        let syn = self.compute_syndromes(word);
        let p = self.base() as u32;
        let outcome = if syn.is_zero() {
            DecodeOutcome::Clean
        } else if syn.global != 0 {
            let delta = syn.global as u32;
            let digits = syn
                .index_sum
                .digits()
                .iter()
                .map(|&s| match s {
                    0 => 0,
                    s => solve_unique(p, delta, s as u32).expect("nonzero residues") as u8,
                })
                .collect();
            let location = DigitVec::from_raw(self.base(), digits);
            debug_assert_eq!(
                location,
                syn.index_sum.scalar_mul(mod_inverse(p, delta) as u64)
            );
            DecodeOutcome::CorrectedSingle(Correction {
                slot: location.index() as usize,
                delta: delta as u8,
            })
        } else {
            DecodeOutcome::DetectedMultiple
        };
        apply_corrections(word, outcome)
    }

    fn syndrome(&self, word: &Codeword) -> Vec<u8> {
        let syn = self.compute_syndromes(word);
        let mut out = syn.index_sum.digits().to_vec();
        out.push(syn.global);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digit_arith::parse_digits;

    const SAMPLE_MESSAGE: &str = "20111020010201200120012";
    const SAMPLE_CODEWORD: &str = "122001110220010201200120012";
    const SAMPLE_CORRUPTED: &str = "122001120220010201200120012";

    fn ternary(r: usize) -> PrototypeCodec {
        PrototypeCodec::new(3, r).unwrap()
    }

    #[test]
    fn spec_layout() {
        let c = ternary(3);
        let red = c.spec().slots_with_role(Role::Redundant);
        assert_eq!(red, vec![0, 1, 3, 9]);
        assert_eq!(c.spec().message_len(), 23);
        assert_eq!(ternary(2).spec().params(), "[9,6,3]_3");
        let bin = PrototypeCodec::new(2, 3).unwrap();
        assert_eq!(bin.spec().slots_with_role(Role::Redundant), vec![0, 1, 2, 4]);
        assert_eq!(bin.spec().message_len(), 4);
        assert_eq!(build_prototype_spec(4, 2), Err(CodeError::NonPrimeBase(4)));
    }

    #[test]
    fn encodes_reference_vector() {
        let c = ternary(3);
        let msg = parse_digits(3, SAMPLE_MESSAGE).unwrap();
        let word = c.encode(&msg).unwrap();
        assert_eq!(word.to_string(), SAMPLE_CODEWORD);
        assert_eq!(c.extract_message(&word), msg);
    }

    #[test]
    fn decodes_reference_vector() {
        let c = ternary(3);
        let received = c.parse_word(SAMPLE_CORRUPTED).unwrap();
        let syn = c.compute_syndromes(&received);
        assert_eq!(syn.global, 1);
        assert_eq!(syn.index_sum.to_string(), "021");
        let decoded = c.decode(&received);
        assert_eq!(
            decoded.outcome,
            DecodeOutcome::CorrectedSingle(Correction { slot: 7, delta: 1 })
        );
        assert_eq!(c.spec().label(7).to_string(), "021");
        assert_eq!(decoded.word.to_string(), SAMPLE_CODEWORD);
        assert_eq!(decoded.word.get(7), 1);
    }

    #[test]
    fn zero_message_and_clean_decode() {
        let c = ternary(2);
        let word = c.encode(&[0; 6]).unwrap();
        assert_eq!(word.to_string(), "000000000");
        assert_eq!(c.decode(&word).outcome, DecodeOutcome::Clean);
    }

    #[test]
    fn base5_parity_completion_matches_brute_force() {
        let c = PrototypeCodec::new(5, 2).unwrap();
        let mut msg = vec![0u8; c.spec().message_len()];
        msg[3] = 4;
        let word = c.encode(&msg).unwrap();
        // Oracle: try every assignment of the three redundant symbols.
        let red = [0usize, 1, 5];
        let mut solutions = Vec::new();
        for a in 0..5u8 {
            for b in 0..5u8 {
                for d in 0..5u8 {
                    let mut w = word.clone();
                    w.set(red[0], a);
                    w.set(red[1], b);
                    w.set(red[2], d);
                    let s = c.compute_syndromes(&w);
                    if s.is_zero() {
                        solutions.push((a, b, d));
                    }
                }
            }
        }
        assert_eq!(solutions, vec![(word.get(0), word.get(1), word.get(5))]);
    }

    #[test]
    fn rejects_bad_messages() {
        let c = ternary(2);
        assert!(matches!(c.encode(&[0; 5]), Err(CodeError::LengthMismatch { .. })));
        assert!(matches!(c.encode(&[3, 0, 0, 0, 0, 0]), Err(CodeError::DigitOutOfRange { .. })));
    }

    #[test]
    fn error_at_position_zero_is_corrected() {
        let c = ternary(3);
        let clean = c.parse_word(SAMPLE_CODEWORD).unwrap();
        let mut bad = clean.clone();
        bad.add_at(0, 2);
        let syn = c.compute_syndromes(&bad);
        assert!(syn.index_sum.is_zero());
        let d = c.decode(&bad);
        assert_eq!(d.outcome, DecodeOutcome::CorrectedSingle(Correction { slot: 0, delta: 2 }));
        assert_eq!(d.word, clean);
    }

    #[test]
    fn double_error_at_0_and_1_is_not_clean() {
        let c = ternary(2);
        let mut w = c.encode(&[1, 2, 0, 1, 1, 2]).unwrap();
        w.add_at(0, 1);
        w.add_at(1, 1);
        assert_ne!(c.decode(&w).outcome, DecodeOutcome::Clean);
    }

    #[test]
    fn add_count_matches_block_times_checks() {
        let c = ternary(5);
        let w = Codeword::zero(c.spec().clone());
        assert_eq!(c.compute_syndromes_counted(&w).1, 243 * 6);
        let c = ternary(2);
        assert_eq!(c.compute_syndromes_counted(&Codeword::zero(c.spec().clone())).1, 27);
    }

    #[test]
    fn weight3_words() {
        let c = ternary(3);
        let w = c.weight3_codeword(&DigitVec::parse(3, "000").unwrap()).unwrap();
        let ones: Vec<String> = (0..27)
            .filter(|&s| w.get(s) != 0)
            .map(|s| c.spec().label(s).to_string())
            .collect();
        assert_eq!(ones, vec!["000", "111", "222"]);
        let w = c.weight3_codeword(&DigitVec::parse(3, "012").unwrap()).unwrap();
        let mut ones: Vec<String> = (0..27)
            .filter(|&s| w.get(s) != 0)
            .map(|s| c.spec().label(s).to_string())
            .collect();
        ones.sort();
        assert_eq!(ones, vec!["012", "120", "201"]);
        assert!(c.compute_syndromes(&w).is_zero());
        for i in 0..27 {
            let u = DigitVec::from_index(i, 3, 3).unwrap();
            let w = c.weight3_codeword(&u).unwrap();
            assert_eq!(w.weight(), 3);
            assert!(c.is_codeword(&w));
        }
        let c5 = PrototypeCodec::new(5, 2).unwrap();
        assert!(c5.weight3_codeword(&DigitVec::parse(5, "00").unwrap()).is_err());
    }
}
