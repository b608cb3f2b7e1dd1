//! Ternary distance-4 codes on 3-wise independent index sets.
//!
//! The full code places symbols on `I1 ∪ I2` plus two index-free adjust
//! symbols: O zeroes the value sum over I1 and E the value sum over I2.
//! Parameters are `[2f(r)+2, 2f(r)-r, 4]_3`. The sparse variant keeps only
//! I1 (`[f(r), f(r)-r, 4]_3`), optionally followed by one global value-sum
//! symbol.

use std::sync::Arc;

use crate::code_model::{
    apply_corrections, assert_same_code, Codec, CodeSpec, Codeword, Correction, DecodeOutcome,
    Decoded, Family, Label, Position, Role,
};
use crate::digit_arith::DigitVec;
use crate::error::{CodeError, Result};
use crate::wxli::{build_family, decompose_elementary, WxliFamily};

/// Syndromes of a full A2 word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct A2Syndromes {
    /// Value sum over I1, including O.
    pub p1: u8,
    /// Value sum over I2, including E.
    pub p2: u8,
    /// Index-weighted sum over every indexed position.
    pub p_all: DigitVec,
}

impl A2Syndromes {
    pub fn is_zero(&self) -> bool {
        self.p1 == 0 && self.p2 == 0 && self.p_all.is_zero()
    }
}

/// Syndromes of a sparse word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseSyndromes {
    pub idx_xor: DigitVec,
    /// Present only with the global check enabled.
    pub value: Option<u8>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Group {
    I1,
    I2,
}

/// Redundant values for `R_1..R_r` that add `target` to the index sum.
fn redundant_values(decomposition: &[Vec<u8>], target: &DigitVec) -> Vec<u8> {
    let r = decomposition.len();
    let mut out = vec![0u32; r];
    for (i, coeffs) in decomposition.iter().enumerate() {
        let t = target.place(i) as u32;
        for (o, &c) in out.iter_mut().zip(coeffs) {
            *o = (*o + t * c as u32) % 3;
        }
    }
    out.into_iter().map(|v| v as u8).collect()
}

fn tail_to_banish(
    family: &WxliFamily,
    count: usize,
    include_i2: bool,
) -> Vec<&DigitVec> {
    let i1_message = family.i1.iter().filter(|v| !family.redundant.contains(v));
    let mut order: Vec<&DigitVec> = Vec::new();
    if include_i2 {
        order.extend(family.i2.iter().rev());
    }
    order.extend(i1_message.rev());
    order.truncate(count);
    order
}

pub fn a2_capacity(family: &WxliFamily) -> usize {
    2 * family.f_value() - family.r
}

pub fn build_a2_spec(r: usize, message_len: usize) -> Result<CodeSpec> {
    let family = build_family(r)?;
    a2_spec_from_family(&family, message_len)
}

fn a2_spec_from_family(family: &WxliFamily, message_len: usize) -> Result<CodeSpec> {
    let capacity = a2_capacity(family);
    if message_len > capacity {
        return Err(CodeError::CapacityExceeded { requested: message_len, capacity });
    }
    if message_len == 0 {
        return Err(CodeError::InvalidParameter("message length must be >= 1".into()));
    }
    let banished = tail_to_banish(family, capacity - message_len, true);
    let mut indices: Vec<&DigitVec> = family.i1.iter().chain(&family.i2).collect();
    indices.sort();
    let mut table: Vec<Position> = indices
        .into_iter()
        .map(|v| {
            let role = if family.redundant.contains(v) {
                Role::Redundant
            } else if banished.contains(&v) {
                Role::Banished
            } else {
                Role::Message
            };
            Position::new(Label::Index(v.clone()), role)
        })
        .collect();
    table.push(Position::new(Label::Odd, Role::Special));
    table.push(Position::new(Label::Even, Role::Special));
    Ok(CodeSpec::new(Family::A2, 3, family.r, 4, table))
}

/// Full A2 codec.
#[derive(Clone, Debug)]
pub struct A2Codec {
    family: WxliFamily,
    spec: Arc<CodeSpec>,
    decomposition: Vec<Vec<u8>>,
    /// Per slot: index (None for O and E) and group.
    slots: Vec<(Option<DigitVec>, Group)>,
    redundant_slots: Vec<usize>,
    odd_slot: usize,
    even_slot: usize,
}

impl A2Codec {
    pub fn new(r: usize, message_len: usize) -> Result<Self> {
        let family = build_family(r)?;
        let spec = Arc::new(a2_spec_from_family(&family, message_len)?);
        let slots = spec
            .positions()
            .map(|p| match &p.label {
                Label::Index(v) => {
                    let g = if v.digits().iter().all(|&d| d <= 1) { Group::I1 } else { Group::I2 };
                    (Some(v.clone()), g)
                }
                Label::Odd => (None, Group::I1),
                _ => (None, Group::I2),
            })
            .collect();
        let redundant_slots = family
            .redundant
            .iter()
            .map(|v| spec.slot_of_index(v).expect("redundant index is active"))
            .collect();
        let odd_slot = spec.slot_of(&Label::Odd).expect("O present");
        let even_slot = spec.slot_of(&Label::Even).expect("E present");
        let decomposition = decompose_elementary(&family);
        Ok(A2Codec {
            family,
            spec,
            decomposition,
            slots,
            redundant_slots,
            odd_slot,
            even_slot,
        })
    }

    /// The code at full capacity `2f(r) - r`.
    pub fn full(r: usize) -> Result<Self> {
        let family = build_family(r)?;
        A2Codec::new(r, a2_capacity(&family))
    }

    pub fn family(&self) -> &WxliFamily {
        &self.family
    }

    pub fn compute_syndromes(&self, word: &Codeword) -> A2Syndromes {
        assert_same_code(&self.spec, word);
        let mut p_all = DigitVec::from_raw(3, vec![0; self.family.r]);
        let (mut p1, mut p2) = (0u32, 0u32);
        for ((index, group), &v) in self.slots.iter().zip(word.symbols()) {
            if let Some(index) = index {
                p_all.add_scaled_assign(v, index);
            }
            match group {
                Group::I1 => p1 += v as u32,
                Group::I2 => p2 += v as u32,
            }
        }
        A2Syndromes { p1: (p1 % 3) as u8, p2: (p2 % 3) as u8, p_all }
    }

    fn locate_in(&self, candidate: &DigitVec, group: Group) -> Option<usize> {
        self.spec
            .slot_of_index(candidate)
            .filter(|&slot| self.slots[slot].1 == group)
    }
}

impl Codec for A2Codec {
    fn spec(&self) -> &Arc<CodeSpec> {
        &self.spec
    }

    fn encode(&self, message: &[u8]) -> Result<Codeword> {
        self.spec.check_message(message)?;
        let mut word = Codeword::zero(self.spec.clone());
        for (&slot, &m) in self.spec.message_slots().iter().zip(message) {
            word.set(slot, m);
        }
        let p_message = self.compute_syndromes(&word).p_all;
        let values = redundant_values(&self.decomposition, &p_message.inverse());
        for (&slot, v) in self.redundant_slots.iter().zip(values) {
            word.set(slot, v);
        }
        let syn = self.compute_syndromes(&word);
        debug_assert!(syn.p_all.is_zero());
        word.set(self.odd_slot, (3 - syn.p1) % 3);
        word.set(self.even_slot, (3 - syn.p2) % 3);
        Ok(word)
    }

    fn decode(&self, word: &Codeword) -> Decoded {
        let syn = self.compute_syndromes(word);
        let single = |slot, delta| DecodeOutcome::CorrectedSingle(Correction { slot, delta });
        let outcome = match (syn.p1, syn.p2, syn.p_all.is_zero()) {
            (0, 0, true) => DecodeOutcome::Clean,
            (0, p2, true) => single(self.even_slot, p2),
            (p1, 0, true) => single(self.odd_slot, p1),
            (0, 0, false) => DecodeOutcome::DetectedMultiple,
            (0, p2, false) => match self.locate_in(&syn.p_all.scalar_mul(p2 as u64), Group::I2) {
                Some(slot) => single(slot, p2),
                None => DecodeOutcome::DetectedMultiple,
            },
            (p1, 0, false) => match self.locate_in(&syn.p_all.scalar_mul(p1 as u64), Group::I1) {
                Some(slot) => single(slot, p1),
                None => DecodeOutcome::DetectedMultiple,
            },
            _ => DecodeOutcome::DetectedMultiple,
        };
        let decoded = apply_corrections(word, outcome);
        debug_assert!(
            !decoded.outcome.is_corrected() || self.compute_syndromes(&decoded.word).is_zero()
        );
        decoded
    }

    fn syndrome(&self, word: &Codeword) -> Vec<u8> {
        let syn = self.compute_syndromes(word);
        let mut out = syn.p_all.digits().to_vec();
        out.push(syn.p1);
        out.push(syn.p2);
        out
    }
}

pub fn sparse_capacity(family: &WxliFamily) -> usize {
    family.f_value() - family.r
}

pub fn build_sparse_spec(r: usize, message_len: usize, global_check: bool) -> Result<CodeSpec> {
    let family = build_family(r)?;
    sparse_spec_from_family(&family, message_len, global_check)
}

fn sparse_spec_from_family(
    family: &WxliFamily,
    message_len: usize,
    global_check: bool,
) -> Result<CodeSpec> {
    let capacity = sparse_capacity(family);
    if message_len > capacity {
        return Err(CodeError::CapacityExceeded { requested: message_len, capacity });
    }
    if message_len == 0 {
        return Err(CodeError::InvalidParameter("message length must be >= 1".into()));
    }
    let banished = tail_to_banish(family, capacity - message_len, false);
    let mut table: Vec<Position> = family
        .i1
        .iter()
        .map(|v| {
            let role = if family.redundant.contains(v) {
                Role::Redundant
            } else if banished.contains(&v) {
                Role::Banished
            } else {
                Role::Message
            };
            Position::new(Label::Index(v.clone()), role)
        })
        .collect();
    if global_check {
        table.push(Position::new(Label::Global, Role::Special));
    }
    Ok(CodeSpec::new(Family::A2Sparse, 3, family.r, 4, table))
}

/// Sparse A2 codec on I1 alone.
#[derive(Clone, Debug)]
pub struct A2SparseCodec {
    family: WxliFamily,
    spec: Arc<CodeSpec>,
    decomposition: Vec<Vec<u8>>,
    indices: Vec<Option<DigitVec>>,
    redundant_slots: Vec<usize>,
    global_slot: Option<usize>,
}

impl A2SparseCodec {
    pub fn new(r: usize, message_len: usize, global_check: bool) -> Result<Self> {
        let family = build_family(r)?;
        let spec = Arc::new(sparse_spec_from_family(&family, message_len, global_check)?);
        let indices = spec.positions().map(|p| p.label.index().cloned()).collect();
        let redundant_slots = family
            .redundant
            .iter()
            .map(|v| spec.slot_of_index(v).expect("redundant index is active"))
            .collect();
        let global_slot = spec.slot_of(&Label::Global);
        let decomposition = decompose_elementary(&family);
        Ok(A2SparseCodec { family, spec, decomposition, indices, redundant_slots, global_slot })
    }

    pub fn full(r: usize, global_check: bool) -> Result<Self> {
        let family = build_family(r)?;
        A2SparseCodec::new(r, sparse_capacity(&family), global_check)
    }

    pub fn family(&self) -> &WxliFamily {
        &self.family
    }

    pub fn has_global_check(&self) -> bool {
        self.global_slot.is_some()
    }

    pub fn compute_syndromes(&self, word: &Codeword) -> SparseSyndromes {
        assert_same_code(&self.spec, word);
        let mut idx_xor = DigitVec::from_raw(3, vec![0; self.family.r]);
        for (index, &v) in self.indices.iter().zip(word.symbols()) {
            if let Some(index) = index {
                idx_xor.add_scaled_assign(v, index);
            }
        }
        let value = self
            .global_slot
            .map(|_| (word.symbols().iter().map(|&v| v as u32).sum::<u32>() % 3) as u8);
        SparseSyndromes { idx_xor, value }
    }

    fn locate(&self, candidate: &DigitVec) -> Option<usize> {
        self.spec.slot_of_index(candidate)
    }

    /// Decoding with or without the global value-sum symbol.
    pub fn sparse_decode(&self, word: &Codeword) -> Decoded {
        let syn = self.compute_syndromes(word);
        let single = |slot, delta| DecodeOutcome::CorrectedSingle(Correction { slot, delta });
        let outcome = match syn.value {
            None => {
                if syn.idx_xor.is_zero() {
                    DecodeOutcome::Clean
                } else if let Some(slot) = self.locate(&syn.idx_xor) {
                    single(slot, 1)
                } else if let Some(slot) = self.locate(&syn.idx_xor.scalar_mul(2)) {
                    single(slot, 2)
                } else {
                    DecodeOutcome::DetectedMultiple
                }
            }
            Some(value) => {
                if syn.idx_xor.is_zero() && value == 0 {
                    DecodeOutcome::Clean
                } else if !syn.idx_xor.is_zero() {
                    let located = syn.idx_xor.scalar_mul(value as u64);
                    match (value, self.locate(&located)) {
                        (1..=2, Some(slot)) => single(slot, value),
                        _ => DecodeOutcome::DetectedMultiple,
                    }
                } else {
                    // Zero index sum: only the index-free check symbol can be wrong.
                    single(self.global_slot.expect("global check enabled"), value)
                }
            }
        };
        apply_corrections(word, outcome)
    }
}

impl Codec for A2SparseCodec {
    fn spec(&self) -> &Arc<CodeSpec> {
        &self.spec
    }

    fn encode(&self, message: &[u8]) -> Result<Codeword> {
        self.spec.check_message(message)?;
        let mut word = Codeword::zero(self.spec.clone());
        for (&slot, &m) in self.spec.message_slots().iter().zip(message) {
            word.set(slot, m);
        }
        let p_message = self.compute_syndromes(&word).idx_xor;
        let values = redundant_values(&self.decomposition, &p_message.inverse());
        for (&slot, v) in self.redundant_slots.iter().zip(values) {
            word.set(slot, v);
        }
        if let Some(slot) = self.global_slot {
            let total: u32 = word.symbols().iter().map(|&v| v as u32).sum();
            word.set(slot, ((3 - total % 3) % 3) as u8);
        }
        Ok(word)
    }

    fn decode(&self, word: &Codeword) -> Decoded {
        self.sparse_decode(word)
    }

    fn syndrome(&self, word: &Codeword) -> Vec<u8> {
        let syn = self.compute_syndromes(word);
        let mut out = syn.idx_xor.digits().to_vec();
        out.extend(syn.value);
        out
    }
}
