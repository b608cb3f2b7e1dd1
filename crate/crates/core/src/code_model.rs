//! Code instances, codewords and decode outcomes shared by every family.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::digit_arith::{format_digits, parse_digits, DigitVec};
use crate::error::{CodeError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Prototype,
    A1,
    A2,
    A2Sparse,
    NWxli,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Family::Prototype => "prototype",
            Family::A1 => "a1",
            Family::A2 => "a2",
            Family::A2Sparse => "a2sparse",
            Family::NWxli => "nwxli",
        };
        f.write_str(name)
    }
}

/// What a position is called: a digit-vector index, or one of the
/// index-free check symbols.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    Index(DigitVec),
    /// Odd adjust: zeroes the value sum of the I1 group.
    Odd,
    /// Even adjust: zeroes the value sum of the I2 group.
    Even,
    /// Appended value-sum symbol of the sparse code's global-check variant.
    Global,
}

impl Label {
    pub fn index(&self) -> Option<&DigitVec> {
        match self {
            Label::Index(v) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Index(v) => write!(f, "{v}"),
            Label::Odd => f.write_str("O"),
            Label::Even => f.write_str("E"),
            Label::Global => f.write_str("G"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Message,
    Redundant,
    Special,
    Banished,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Position {
    pub label: Label,
    pub role: Role,
}

impl Position {
    pub fn new(label: Label, role: Role) -> Self {
        Position { label, role }
    }
}

/// Full description of one concrete code.
///
/// The position table is kept in serialization order and includes banished
/// entries; a codeword carries one symbol per non-banished entry, in table
/// order. Message symbols fill message-role slots in that same order.
#[derive(Clone, Debug)]
pub struct CodeSpec {
    family: Family,
    base: u8,
    index_len: usize,
    design_distance: usize,
    table: Vec<Position>,
    active: Vec<usize>,
    message_slots: Vec<usize>,
    slot_by_label: HashMap<Label, usize>,
}

impl PartialEq for CodeSpec {
    fn eq(&self, other: &Self) -> bool {
        self.family == other.family
            && self.base == other.base
            && self.index_len == other.index_len
            && self.design_distance == other.design_distance
            && self.table == other.table
    }
}

impl Eq for CodeSpec {}

impl CodeSpec {
    pub fn new(
        family: Family,
        base: u8,
        index_len: usize,
        design_distance: usize,
        table: Vec<Position>,
    ) -> Self {
        let active: Vec<usize> = (0..table.len())
            .filter(|&i| table[i].role != Role::Banished)
            .collect();
        let message_slots = active
            .iter()
            .enumerate()
            .filter(|(_, &t)| table[t].role == Role::Message)
            .map(|(slot, _)| slot)
            .collect();
        let slot_by_label = active
            .iter()
            .enumerate()
            .map(|(slot, &t)| (table[t].label.clone(), slot))
            .collect();
        CodeSpec {
            family,
            base,
            index_len,
            design_distance,
            table,
            active,
            message_slots,
            slot_by_label,
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn base(&self) -> u8 {
        self.base
    }

    /// Length r of the digit-vector indices.
    pub fn index_len(&self) -> usize {
        self.index_len
    }

    pub fn design_distance(&self) -> usize {
        self.design_distance
    }

    /// Number of symbols in a codeword (n_block).
    pub fn block_len(&self) -> usize {
        self.active.len()
    }

    /// Number of message symbols (k_msg).
    pub fn message_len(&self) -> usize {
        self.message_slots.len()
    }

    /// The whole table, banished entries included.
    pub fn table(&self) -> &[Position] {
        &self.table
    }

    /// Position occupying codeword slot `slot`.
    pub fn position(&self, slot: usize) -> &Position {
        &self.table[self.active[slot]]
    }

    pub fn positions(&self) -> impl Iterator<Item = &Position> + '_ {
        self.active.iter().map(move |&t| &self.table[t])
    }

    pub fn label(&self, slot: usize) -> &Label {
        &self.position(slot).label
    }

    pub fn role(&self, slot: usize) -> Role {
        self.position(slot).role
    }

    pub fn slot_of(&self, label: &Label) -> Option<usize> {
        self.slot_by_label.get(label).copied()
    }

    pub fn slot_of_index(&self, index: &DigitVec) -> Option<usize> {
        self.slot_of(&Label::Index(index.clone()))
    }

    pub fn message_slots(&self) -> &[usize] {
        &self.message_slots
    }

    pub fn slots_with_role(&self, role: Role) -> Vec<usize> {
        (0..self.block_len()).filter(|&s| self.role(s) == role).collect()
    }

    pub fn banished(&self) -> impl Iterator<Item = &Position> + '_ {
        self.table.iter().filter(|p| p.role == Role::Banished)
    }

    pub fn is_banished(&self, label: &Label) -> bool {
        self.banished().any(|p| &p.label == label)
    }

    /// `[n,k,d]_q`.
    pub fn params(&self) -> String {
        format!(
            "[{},{},{}]_{}",
            self.block_len(),
            self.message_len(),
            self.design_distance,
            self.base
        )
    }

    /// Parses a message line of exactly `message_len` digits.
    pub fn parse_message(&self, line: &str) -> Result<Vec<u8>> {
        let digits = parse_digits(self.base, line.trim())?;
        if digits.len() != self.message_len() {
            return Err(CodeError::LengthMismatch {
                expected: self.message_len(),
                found: digits.len(),
            });
        }
        Ok(digits)
    }

    pub fn check_message(&self, message: &[u8]) -> Result<()> {
        if message.len() != self.message_len() {
            return Err(CodeError::LengthMismatch {
                expected: self.message_len(),
                found: message.len(),
            });
        }
        if let Some(&d) = message.iter().find(|&&d| d >= self.base) {
            return Err(CodeError::DigitOutOfRange { digit: d as u32, base: self.base });
        }
        Ok(())
    }
}

/// Symbols of one word, bound to the code it belongs to.
#[derive(Clone, Debug)]
pub struct Codeword {
    spec: Arc<CodeSpec>,
    symbols: Vec<u8>,
}

impl PartialEq for Codeword {
    fn eq(&self, other: &Self) -> bool {
        self.symbols == other.symbols
            && (Arc::ptr_eq(&self.spec, &other.spec) || self.spec == other.spec)
    }
}

impl Eq for Codeword {}

impl Codeword {
    pub fn new(spec: Arc<CodeSpec>, symbols: Vec<u8>) -> Result<Self> {
        if symbols.len() != spec.block_len() {
            return Err(CodeError::LengthMismatch {
                expected: spec.block_len(),
                found: symbols.len(),
            });
        }
        if let Some(&d) = symbols.iter().find(|&&d| d >= spec.base()) {
            return Err(CodeError::DigitOutOfRange { digit: d as u32, base: spec.base() });
        }
        Ok(Codeword { spec, symbols })
    }

    pub fn zero(spec: Arc<CodeSpec>) -> Self {
        let n = spec.block_len();
        Codeword { spec, symbols: vec![0; n] }
    }

    /// Parses one serialized line: exactly `block_len` digits, each below the base.
    pub fn parse(spec: Arc<CodeSpec>, line: &str) -> Result<Self> {
        let symbols = parse_digits(spec.base(), line.trim())?;
        Codeword::new(spec, symbols)
    }

    pub fn spec(&self) -> &Arc<CodeSpec> {
        &self.spec
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn get(&self, slot: usize) -> u8 {
        self.symbols[slot]
    }

    pub fn set(&mut self, slot: usize, value: u8) {
        assert!(value < self.spec.base());
        self.symbols[slot] = value;
    }

    /// Adds `delta` (mod p) to the symbol in `slot`.
    pub fn add_at(&mut self, slot: usize, delta: u8) {
        let p = self.spec.base() as u16;
        self.symbols[slot] = ((self.symbols[slot] as u16 + delta as u16) % p) as u8;
    }

    /// Subtracts `delta` (mod p) from the symbol in `slot`.
    pub fn sub_at(&mut self, slot: usize, delta: u8) {
        let p = self.spec.base();
        self.add_at(slot, (p - delta % p) % p);
    }

    pub fn weight(&self) -> usize {
        self.symbols.iter().filter(|&&s| s != 0).count()
    }

    pub fn distance(&self, other: &Codeword) -> usize {
        self.symbols
            .iter()
            .zip(&other.symbols)
            .filter(|(a, b)| a != b)
            .count()
    }

    /// Message symbols in fill order.
    pub fn message(&self) -> Vec<u8> {
        self.spec
            .message_slots()
            .iter()
            .map(|&s| self.symbols[s])
            .collect()
    }

    /// Value at the position labelled by `index`, if it is active.
    pub fn value_at(&self, index: &DigitVec) -> Option<u8> {
        self.spec.slot_of_index(index).map(|s| self.symbols[s])
    }
}

impl fmt::Display for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_digits(&self.symbols))
    }
}

/// One repaired symbol: `delta` was subtracted from `slot`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Correction {
    pub slot: usize,
    pub delta: u8,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecodeOutcome {
    Clean,
    CorrectedSingle(Correction),
    CorrectedMulti(Vec<Correction>),
    DetectedMultiple,
}

impl DecodeOutcome {
    pub fn corrections(&self) -> &[Correction] {
        match self {
            DecodeOutcome::CorrectedSingle(c) => std::slice::from_ref(c),
            DecodeOutcome::CorrectedMulti(cs) => cs,
            _ => &[],
        }
    }

    pub fn is_corrected(&self) -> bool {
        matches!(
            self,
            DecodeOutcome::CorrectedSingle(_) | DecodeOutcome::CorrectedMulti(_)
        )
    }
}

/// Decoder verdict plus the (possibly repaired) word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decoded {
    pub outcome: DecodeOutcome,
    pub word: Codeword,
}

/// Common surface of every codec in the crate.
pub trait Codec: Send + Sync {
    fn spec(&self) -> &Arc<CodeSpec>;

    /// Systematic encoding of `message` (length `message_len`).
    fn encode(&self, message: &[u8]) -> Result<Codeword>;

    /// Classifies the syndrome of `word` and repairs it where the family allows.
    ///
    /// Panics if `word` belongs to a different code.
    fn decode(&self, word: &Codeword) -> Decoded;

    /// Every check value of `word`, flattened in check-matrix row order.
    fn syndrome(&self, word: &Codeword) -> Vec<u8>;

    fn extract_message(&self, word: &Codeword) -> Vec<u8> {
        word.message()
    }

    fn parse_word(&self, line: &str) -> Result<Codeword> {
        Codeword::parse(self.spec().clone(), line)
    }

    fn is_codeword(&self, word: &Codeword) -> bool {
        self.syndrome(word).iter().all(|&s| s == 0)
    }
}

pub(crate) fn assert_same_code(spec: &Arc<CodeSpec>, word: &Codeword) {
    assert!(
        Arc::ptr_eq(spec, word.spec()) || **spec == **word.spec(),
        "codeword belongs to a different code"
    );
}

/// Builds a `Decoded` by subtracting each correction from a copy of `word`.
pub(crate) fn apply_corrections(word: &Codeword, outcome: DecodeOutcome) -> Decoded {
    let mut repaired = word.clone();
    for c in outcome.corrections() {
        repaired.sub_at(c.slot, c.delta);
    }
    Decoded { outcome, word: repaired }
}
