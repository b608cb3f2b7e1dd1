//! Codes built from any certified n-wise independent ternary index set.
//!
//! A set that is n-wise independent gives distance `n + 1`; the decoder
//! searches error patterns of weight `1..=t` with `t = ⌊n/2⌋`. The shipped
//! instance is the ternary Golay code `[11,6,5]_3`.

use std::sync::Arc;

use crate::code_model::{
    apply_corrections, assert_same_code, Codec, CodeSpec, Codeword, Correction, DecodeOutcome,
    Decoded, Family, Label, Position, Role,
};
use crate::digit_arith::DigitVec;
use crate::error::{CodeError, Result};
use crate::wxli::{is_kwise_independent, solve_ternary, WxliFamily};

/// The Golay index set, in serialization order.
pub const GOLAY_SET: [&str; 11] = [
    "00001", "00010", "00100", "01000", "10000", "01122", "10212", "12021", "12102", "22110",
    "22222",
];

/// Parses an index set file: one ternary vector per line, blank lines and
/// `#` comments ignored. The first `r` vectors must be the elementary ones.
pub fn parse_set(text: &str) -> Result<Vec<DigitVec>> {
    let set = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| DigitVec::parse(3, l))
        .collect::<Result<Vec<_>>>()?;
    let Some(first) = set.first() else {
        return Err(CodeError::InvalidParameter("index set file is empty".into()));
    };
    let r = first.len();
    if set.len() < r {
        return Err(CodeError::InvalidParameter(format!(
            "index set has {} vectors, fewer than the length {r}",
            set.len()
        )));
    }
    if let Some(bad) = set[..r].iter().find(|v| v.len() != r || v.weight() != 1 || v.leading_digit() != Some(1)) {
        return Err(CodeError::InvalidParameter(format!(
            "leading vector {bad} is not elementary"
        )));
    }
    Ok(set)
}

/// Largest `k <= cap` for which `set` is k-wise independent (0 if none).
pub fn certified_order(set: &[DigitVec], cap: usize) -> Result<usize> {
    let mut order = 0;
    for k in 1..=cap.min(set.len()) {
        if !is_kwise_independent(set, k)?.independent {
            break;
        }
        order = k;
    }
    Ok(order)
}

#[derive(Clone, Debug)]
pub struct NwxliCodec {
    spec: Arc<CodeSpec>,
    r: usize,
    n_cert: usize,
    indices: Vec<DigitVec>,
    redundant_slots: Vec<usize>,
    /// `decomposition[i][j]`: coefficient of the j-th redundant index in `e_{i+1}`.
    decomposition: Vec<Vec<u8>>,
}

impl NwxliCodec {
    /// Builds the code on `set`, certifying `n_cert`-wise independence.
    /// The redundant positions are the elementary vectors, which must all
    /// be present.
    pub fn from_set(set: Vec<DigitVec>, n_cert: usize) -> Result<Self> {
        let r = set.first().map(DigitVec::len).unwrap_or(0);
        let elementary = (1..=r)
            .map(|i| DigitVec::elementary(3, r, i))
            .collect::<Result<Vec<_>>>()?;
        if let Some(missing) = elementary.iter().find(|e| !set.contains(e)) {
            return Err(CodeError::InvalidParameter(format!(
                "elementary vector {missing} missing from index set"
            )));
        }
        NwxliCodec::with_redundant(set, elementary, n_cert)
    }

    /// The I1 family of a 3-wise independent construction, with its own
    /// redundant indices.
    pub fn from_family(family: &WxliFamily) -> Result<Self> {
        // I1 is 3-wise independent by construction; certification re-checks it.
        NwxliCodec::with_redundant(family.i1.clone(), family.redundant.clone(), 3)
    }

    pub fn golay() -> Self {
        let set = GOLAY_SET.iter().map(|s| DigitVec::parse(3, s).expect("valid literal")).collect();
        NwxliCodec::from_set(set, 4).expect("Golay set is 4-wise independent")
    }

    fn with_redundant(set: Vec<DigitVec>, redundant: Vec<DigitVec>, n_cert: usize) -> Result<Self> {
        let Some(first) = set.first() else {
            return Err(CodeError::InvalidParameter("empty index set".into()));
        };
        let r = first.len();
        if first.base() != 3 {
            return Err(CodeError::InvalidParameter("index sets must be ternary".into()));
        }
        if n_cert == 0 {
            return Err(CodeError::InvalidParameter("independence order must be >= 1".into()));
        }
        let mut sorted = set.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != set.len() {
            return Err(CodeError::InvalidParameter("index set has duplicates".into()));
        }
        let report = is_kwise_independent(&set, n_cert)?;
        if !report.independent {
            return Err(CodeError::NotIndependent { order: n_cert });
        }
        let decomposition = (1..=r)
            .map(|i| {
                let e = DigitVec::elementary(3, r, i)?;
                solve_ternary(&redundant, &e).ok_or_else(|| {
                    CodeError::InvalidParameter("redundant indices do not span the space".into())
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if set.len() <= r {
            return Err(CodeError::InvalidParameter("index set leaves no message positions".into()));
        }
        let table = set
            .iter()
            .map(|v| {
                let role = if redundant.contains(v) { Role::Redundant } else { Role::Message };
                Position::new(Label::Index(v.clone()), role)
            })
            .collect();
        let spec = Arc::new(CodeSpec::new(Family::NWxli, 3, r, n_cert + 1, table));
        let redundant_slots = redundant
            .iter()
            .map(|v| {
                spec.slot_of_index(v).ok_or_else(|| {
                    CodeError::InvalidParameter(format!("redundant index {v} not in set"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(NwxliCodec { spec, r, n_cert, indices: set, redundant_slots, decomposition })
    }

    pub fn certified_order(&self) -> usize {
        self.n_cert
    }

    /// Correction radius `⌊n/2⌋`.
    pub fn radius(&self) -> usize {
        self.n_cert / 2
    }

    pub fn indices(&self) -> &[DigitVec] {
        &self.indices
    }

    pub fn p_all(&self, word: &Codeword) -> DigitVec {
        assert_same_code(&self.spec, word);
        let mut acc = DigitVec::from_raw(3, vec![0; self.r]);
        for (index, &v) in self.indices.iter().zip(word.symbols()) {
            acc.add_scaled_assign(v, index);
        }
        acc
    }

    /// Error patterns of exactly weight `w` whose weighted index sum equals
    /// `syndrome`, up to `limit` of them, in slot order.
    pub fn explanations(&self, syndrome: &DigitVec, w: usize, limit: usize) -> Vec<Vec<Correction>> {
        let mut out = Vec::new();
        if w > 0 && limit > 0 {
            self.search(syndrome.clone(), 0, w, &mut Vec::new(), &mut out, limit);
        }
        out
    }

    fn search(
        &self,
        residual: DigitVec,
        start: usize,
        remaining: usize,
        chosen: &mut Vec<Correction>,
        out: &mut Vec<Vec<Correction>>,
        limit: usize,
    ) {
        if remaining == 1 {
            // residual = c·v  ⇔  v = c·residual, since c² = 1 mod 3.
            for delta in 1..3u8 {
                let v = residual.scalar_mul(delta as u64);
                if let Some(slot) = self.spec.slot_of_index(&v).filter(|&s| s >= start) {
                    let mut pattern = chosen.clone();
                    pattern.push(Correction { slot, delta });
                    out.push(pattern);
                    if out.len() >= limit {
                        return;
                    }
                }
            }
            return;
        }
        for slot in start..self.indices.len() {
            for delta in 1..3u8 {
                let mut next = residual.clone();
                next.add_scaled_assign(3 - delta, &self.indices[slot]);
                chosen.push(Correction { slot, delta });
                self.search(next, slot + 1, remaining - 1, chosen, out, limit);
                chosen.pop();
                if out.len() >= limit {
                    return;
                }
            }
        }
    }
}

impl Codec for NwxliCodec {
    fn spec(&self) -> &Arc<CodeSpec> {
        &self.spec
    }

    fn encode(&self, message: &[u8]) -> Result<Codeword> {
        self.spec.check_message(message)?;
        let mut word = Codeword::zero(self.spec.clone());
        for (&slot, &m) in self.spec.message_slots().iter().zip(message) {
            word.set(slot, m);
        }
        let target = self.p_all(&word).inverse();
        let mut values = vec![0u32; self.redundant_slots.len()];
        for (i, coeffs) in self.decomposition.iter().enumerate() {
            let t = target.place(i) as u32;
            for (v, &c) in values.iter_mut().zip(coeffs) {
                *v = (*v + t * c as u32) % 3;
            }
        }
        for (&slot, v) in self.redundant_slots.iter().zip(values) {
            word.set(slot, v as u8);
        }
        debug_assert!(self.p_all(&word).is_zero());
        Ok(word)
    }

    fn decode(&self, word: &Codeword) -> Decoded {
        let syndrome = self.p_all(word);
        if syndrome.is_zero() {
            return apply_corrections(word, DecodeOutcome::Clean);
        }
        let limit = if cfg!(debug_assertions) { 2 } else { 1 };
        for w in 1..=self.radius() {
            let found = self.explanations(&syndrome, w, limit);
            if let Some(pattern) = found.first() {
                assert!(found.len() == 1, "two weight-{w} patterns explain syndrome {syndrome}");
                let outcome = if w == 1 {
                    DecodeOutcome::CorrectedSingle(pattern[0])
                } else {
                    DecodeOutcome::CorrectedMulti(pattern.clone())
                };
                return apply_corrections(word, outcome);
            }
        }
        apply_corrections(word, DecodeOutcome::DetectedMultiple)
    }

    fn syndrome(&self, word: &Codeword) -> Vec<u8> {
        self.p_all(word).digits().to_vec()
    }
}
