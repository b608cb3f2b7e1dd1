//! Adaptive-length ternary SEC-DED code `[(3^r-1)/2, (3^r-1)/2 - r, 3]_3`.
//!
//! Of every inverse pair `{v, 2v}` only the member whose leading nonzero
//! digit is 1 is kept. The elementary vectors `3^j` carry redundancy; the
//! lowest remaining kept indices carry the message and the highest ones are
//! banished when the message is shorter than the capacity.

use std::sync::Arc;

use crate::code_model::{
    apply_corrections, assert_same_code, Codec, CodeSpec, Codeword, Correction, DecodeOutcome,
    Decoded, Family, Label, Position, Role,
};
use crate::digit_arith::DigitVec;
use crate::error::{CodeError, Result};

/// Largest supported index length.
pub const MAX_A1_INDEX_LEN: usize = 13;

/// Message capacity `g(r) = (3^r - 1)/2 - r`.
pub fn capacity(r: usize) -> usize {
    (3usize.pow(r as u32) - 1) / 2 - r
}

/// Smallest `r` whose capacity holds `m` message symbols.
pub fn choose_r(m: usize) -> Result<usize> {
    if m == 0 {
        return Err(CodeError::InvalidParameter("message length must be >= 1".into()));
    }
    (2..=MAX_A1_INDEX_LEN)
        .find(|&r| capacity(r) >= m)
        .ok_or(CodeError::CapacityExceeded { requested: m, capacity: capacity(MAX_A1_INDEX_LEN) })
}

/// Which indices a given `(r, m)` uses and for what.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct A1Layout {
    pub r: usize,
    /// Nonzero indices with leading digit 1, ascending.
    pub kept: Vec<DigitVec>,
    /// `3^j` for `j < r`, ascending.
    pub redundant: Vec<DigitVec>,
    pub message: Vec<DigitVec>,
    pub banished: Vec<DigitVec>,
}

impl A1Layout {
    pub fn new(r: usize, m: usize) -> Result<Self> {
        if !(2..=MAX_A1_INDEX_LEN).contains(&r) {
            return Err(CodeError::InvalidParameter(format!(
                "A1 index length must be in 2..={MAX_A1_INDEX_LEN}, got {r}"
            )));
        }
        if m == 0 {
            return Err(CodeError::InvalidParameter("message length must be >= 1".into()));
        }
        if m > capacity(r) {
            return Err(CodeError::CapacityExceeded { requested: m, capacity: capacity(r) });
        }
        let kept: Vec<DigitVec> = (1..3u64.pow(r as u32))
            .map(|i| DigitVec::from_index(i, 3, r).expect("index in range"))
            .filter(|v| v.leading_digit() == Some(1))
            .collect();
        let (redundant, others): (Vec<DigitVec>, Vec<DigitVec>) =
            kept.iter().cloned().partition(|v| v.weight() == 1);
        let message = others[..m].to_vec();
        let banished = others[m..].to_vec();
        Ok(A1Layout { r, kept, redundant, message, banished })
    }

    /// Layout with the smallest `r` that fits `m`.
    pub fn for_message_len(m: usize) -> Result<Self> {
        A1Layout::new(choose_r(m)?, m)
    }

    pub fn spec(&self) -> CodeSpec {
        let table = self
            .kept
            .iter()
            .map(|v| {
                let role = if self.redundant.contains(v) {
                    Role::Redundant
                } else if self.banished.contains(v) {
                    Role::Banished
                } else {
                    Role::Message
                };
                Position::new(Label::Index(v.clone()), role)
            })
            .collect();
        CodeSpec::new(Family::A1, 3, self.r, 3, table)
    }
}

#[derive(Clone, Debug)]
pub struct A1Codec {
    layout: A1Layout,
    spec: Arc<CodeSpec>,
    indices: Vec<DigitVec>,
}

impl A1Codec {
    pub fn new(r: usize, m: usize) -> Result<Self> {
        Ok(A1Codec::from_layout(A1Layout::new(r, m)?))
    }

    pub fn for_message_len(m: usize) -> Result<Self> {
        Ok(A1Codec::from_layout(A1Layout::for_message_len(m)?))
    }

    pub fn from_layout(layout: A1Layout) -> Self {
        let spec = Arc::new(layout.spec());
        let indices = spec
            .positions()
            .map(|p| p.label.index().expect("A1 positions are indexed").clone())
            .collect();
        A1Codec { layout, spec, indices }
    }

    pub fn layout(&self) -> &A1Layout {
        &self.layout
    }

    /// `⊕ v_i · i` over the slots selected by `filter`.
    fn index_sum(&self, word: &Codeword, filter: impl Fn(usize) -> bool) -> DigitVec {
        let mut acc = DigitVec::from_raw(3, vec![0; self.layout.r]);
        for (slot, index) in self.indices.iter().enumerate() {
            if filter(slot) {
                acc.add_scaled_assign(word.get(slot), index);
            }
        }
        acc
    }

    /// `P_all`: index-weighted sum over every active position.
    pub fn p_all(&self, word: &Codeword) -> DigitVec {
        assert_same_code(&self.spec, word);
        self.index_sum(word, |_| true)
    }

    /// `P_message`: index-weighted sum over message positions only.
    pub fn p_message(&self, word: &Codeword) -> DigitVec {
        assert_same_code(&self.spec, word);
        self.index_sum(word, |slot| self.spec.role(slot) == Role::Message)
    }
}

impl Codec for A1Codec {
    fn spec(&self) -> &Arc<CodeSpec> {
        &self.spec
    }

    fn encode(&self, message: &[u8]) -> Result<Codeword> {
        self.spec.check_message(message)?;
        let mut word = Codeword::zero(self.spec.clone());
        for (&slot, &m) in self.spec.message_slots().iter().zip(message) {
            word.set(slot, m);
        }
        // Elementary-vector redundancy: the value at 3^j is digit j of -P_message.
        let fix = self.p_message(&word).inverse();
        for e in &self.layout.redundant {
            let j = e.digits().iter().rev().position(|&d| d == 1).expect("elementary");
            let slot = self.spec.slot_of_index(e).expect("redundant index is active");
            word.set(slot, fix.place(j));
        }
        Ok(word)
    }

    fn decode(&self, word: &Codeword) -> Decoded {
        let syndrome = self.p_all(word);
        let outcome = match syndrome.leading_digit() {
            None => DecodeOutcome::Clean,
            Some(lead) => {
                let (candidate, delta) = if lead == 1 {
                    (syndrome, 1)
                } else {
                    (syndrome.scalar_mul(2), 2)
                };
                match self.spec.slot_of_index(&candidate) {
                    Some(slot) => DecodeOutcome::CorrectedSingle(Correction { slot, delta }),
                    None => DecodeOutcome::DetectedMultiple,
                }
            }
        };
        apply_corrections(word, outcome)
    }

    fn syndrome(&self, word: &Codeword) -> Vec<u8> {
        self.p_all(word).digits().to_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digit_arith::parse_digits;

    #[test]
    fn capacity_table() {
        assert_eq!(capacity(2), 2);
        assert_eq!(capacity(3), 10);
        assert_eq!(capacity(4), 36);
        assert_eq!(choose_r(10).unwrap(), 3);
        assert_eq!(choose_r(11).unwrap(), 4);
        assert_eq!(choose_r(2).unwrap(), 2);
        assert_eq!(choose_r(3).unwrap(), 3);
        assert!(choose_r(0).is_err());
    }

    #[test]
    fn kept_set_holds_one_of_each_pair() {
        for r in 1..=6usize {
            let kept: Vec<DigitVec> = (1..3u64.pow(r as u32))
                .map(|i| DigitVec::from_index(i, 3, r).unwrap())
                .filter(|v| v.leading_digit() == Some(1))
                .collect();
            assert_eq!(kept.len(), (3usize.pow(r as u32) - 1) / 2);
            for i in 1..3u64.pow(r as u32) {
                let v = DigitVec::from_index(i, 3, r).unwrap();
                let n = kept.contains(&v) as u8 + kept.contains(&v.inverse()) as u8;
                assert_eq!(n, 1, "r={r} v={v}");
            }
        }
    }

    #[test]
    fn encodes_reference_vector() {
        let c = A1Codec::for_message_len(10).unwrap();
        let msg = parse_digits(3, "0211112102").unwrap();
        let mut word = Codeword::zero(c.spec().clone());
        for (&slot, &m) in c.spec().message_slots().iter().zip(&msg) {
            word.set(slot, m);
        }
        assert_eq!(c.p_message(&word).to_string(), "001");
        let word = c.encode(&msg).unwrap();
        assert_eq!(word.to_string(), "2002011112102");
        let red: Vec<u8> = ["100", "010", "001"]
            .iter()
            .map(|s| word.value_at(&DigitVec::parse(3, s).unwrap()).unwrap())
            .collect();
        assert_eq!(red, vec![0, 0, 2]);
        assert!(c.p_all(&word).is_zero());
        assert_eq!(c.extract_message(&word), msg);
    }

    #[test]
    fn decodes_reference_vector() {
        let c = A1Codec::for_message_len(10).unwrap();
        let bad = c.parse_word("2002011102102").unwrap();
        assert_eq!(c.p_all(&bad).to_string(), "222");
        let d = c.decode(&bad);
        let slot = c.spec().slot_of_index(&DigitVec::parse(3, "111").unwrap()).unwrap();
        assert_eq!(d.outcome, DecodeOutcome::CorrectedSingle(Correction { slot, delta: 2 }));
        assert_eq!(d.word.to_string(), "2002011112102");
        assert_eq!(d.word.get(slot), 1);
    }

    #[test]
    fn longer_message_uses_next_slot() {
        let layout = A1Layout::for_message_len(11).unwrap();
        assert_eq!(layout.r, 4);
        assert_eq!(layout.message.last().unwrap().to_string(), "1001");
        assert!(layout.banished.contains(&DigitVec::parse(3, "1002").unwrap()));
        assert!(layout.banished.contains(&DigitVec::parse(3, "1222").unwrap()));
        let c = A1Codec::from_layout(layout);
        assert_eq!(c.spec().block_len(), 15);
        let msg = parse_digits(3, "02111121020").unwrap();
        let w = c.encode(&msg).unwrap();
        assert!(c.is_codeword(&w));
    }

    #[test]
    fn zero_and_clean() {
        let c = A1Codec::new(3, 10).unwrap();
        let w = c.encode(&[0; 10]).unwrap();
        assert_eq!(w.weight(), 0);
        assert_eq!(c.decode(&w).outcome, DecodeOutcome::Clean);
    }

    #[test]
    fn syndrome_on_banished_index_is_detected() {
        let c = A1Codec::new(3, 3).unwrap();
        let w = c.encode(&[1, 2, 1]).unwrap();
        let n = c.spec().block_len();
        let mut detected = 0;
        for a in 0..n {
            for b in a + 1..n {
                for da in 1..3 {
                    for db in 1..3 {
                        let mut bad = w.clone();
                        bad.add_at(a, da);
                        bad.add_at(b, db);
                        let d = c.decode(&bad);
                        assert_ne!(d.outcome, DecodeOutcome::Clean);
                        if d.outcome == DecodeOutcome::DetectedMultiple {
                            let s = c.p_all(&bad);
                            let cand = if s.leading_digit() == Some(1) { s } else { s.scalar_mul(2) };
                            assert!(c.layout().banished.contains(&cand));
                            detected += 1;
                        }
                    }
                }
            }
        }
        assert!(detected > 0);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(A1Layout::new(3, 11), Err(CodeError::CapacityExceeded { .. })));
        assert!(A1Layout::new(1, 1).is_err());
        let c = A1Codec::new(3, 10).unwrap();
        assert!(c.encode(&[0; 9]).is_err());
    }
}
