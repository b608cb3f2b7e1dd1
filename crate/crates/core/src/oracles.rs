//! Brute-force certification: check matrices, minimum distance by column
//! dependency search and by codeword enumeration, and error-injection sweeps.

use std::collections::HashMap;
use std::fmt;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::code_model::{Codec, CodeSpec, Codeword, DecodeOutcome, Family, Label};
use crate::error::{CodeError, Result};

/// Largest message space `min_weight_enumeration` will walk.
pub const ENUMERATION_BUDGET: u64 = 10_000_000;

/// Parity-check matrix over the active positions of a code.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckMatrix {
    pub base: u8,
    pub rows: Vec<Vec<u8>>,
}

impl CheckMatrix {
    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn col_count(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn column(&self, j: usize) -> Vec<u8> {
        self.rows.iter().map(|row| row[j]).collect()
    }

    /// `H · word` mod p.
    pub fn syndrome(&self, symbols: &[u8]) -> Vec<u8> {
        let p = self.base as u32;
        self.rows
            .iter()
            .map(|row| {
                let s: u32 = row.iter().zip(symbols).map(|(&h, &v)| h as u32 * v as u32).sum();
                (s % p) as u8
            })
            .collect()
    }

    pub fn annihilates(&self, symbols: &[u8]) -> bool {
        self.syndrome(symbols).iter().all(|&s| s == 0)
    }
}

/// The check matrix whose rows reproduce `Codec::syndrome` for the family.
pub fn check_matrix_of(spec: &CodeSpec) -> CheckMatrix {
    let r = spec.index_len();
    let mut rows: Vec<Vec<u8>> = (0..r)
        .map(|i| {
            spec.positions()
                .map(|p| p.label.index().map_or(0, |v| v.digits()[i]))
                .collect()
        })
        .collect();
    let ones = || spec.positions().map(|_| 1u8).collect::<Vec<_>>();
    match spec.family() {
        Family::Prototype => rows.push(ones()),
        Family::A2 => {
            let in_i1 = |label: &Label| match label {
                Label::Index(v) => v.digits().iter().all(|&d| d <= 1),
                Label::Odd => true,
                _ => false,
            };
            rows.push(spec.positions().map(|p| in_i1(&p.label) as u8).collect());
            rows.push(spec.positions().map(|p| (!in_i1(&p.label)) as u8).collect());
        }
        Family::A2Sparse if spec.slot_of(&Label::Global).is_some() => rows.push(ones()),
        _ => {}
    }
    CheckMatrix { base: spec.base(), rows }
}

/// A set of columns with nonzero coefficients summing to zero, written as
/// a codeword of the code.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DependencyWitness {
    pub weight: usize,
    pub terms: Vec<(usize, u8)>,
    pub codeword: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ColumnSearchReport {
    pub w_max: usize,
    /// `verdicts[w-1]` holds the first dependency of exactly weight `w`.
    pub verdicts: Vec<Option<DependencyWitness>>,
}

impl ColumnSearchReport {
    /// Smallest weight with a dependency, if any was found within `w_max`.
    pub fn min_distance(&self) -> Option<usize> {
        self.verdicts.iter().position(Option::is_some).map(|i| i + 1)
    }

    pub fn witness(&self) -> Option<&DependencyWitness> {
        self.verdicts.iter().flatten().next()
    }

    /// `d >= lower_bound`.
    pub fn lower_bound(&self) -> usize {
        self.min_distance().unwrap_or(self.w_max + 1)
    }
}

/// Largest weight the column search accepts.
pub const COLUMN_SEARCH_MAX_WEIGHT: usize = 4;

/// For each `w <= w_max`, searches for `w` distinct columns and coefficients
/// in `[1, p)` combining to zero. The search is exhaustive and the reported
/// witness is the lexicographically first one, independent of worker count.
pub fn min_distance_column_search(h: &CheckMatrix, w_max: usize) -> Result<ColumnSearchReport> {
    if w_max == 0 || w_max > COLUMN_SEARCH_MAX_WEIGHT {
        return Err(CodeError::InvalidParameter(format!(
            "w_max must lie in 1..={COLUMN_SEARCH_MAX_WEIGHT}"
        )));
    }
    let n = h.col_count();
    let columns: Vec<Vec<u8>> = (0..n).map(|j| h.column(j)).collect();
    let p = h.base;
    // c·column -> every (column, c) producing it.
    let mut scaled: HashMap<Vec<u8>, Vec<(usize, u8)>> = HashMap::new();
    for (j, col) in columns.iter().enumerate() {
        for c in 1..p {
            let v = col.iter().map(|&x| ((x as u32 * c as u32) % p as u32) as u8).collect();
            scaled.entry(v).or_default().push((j, c));
        }
    }
    let search = ColumnSearch { p, columns: &columns, scaled: &scaled };
    let verdicts = (1..=w_max)
        .map(|w| {
            (0..n).into_par_iter().find_map_first(|first| search.starting_at(first, w)).map(
                |terms| {
                    let mut codeword = vec![0u8; n];
                    for &(j, c) in &terms {
                        codeword[j] = c;
                    }
                    debug_assert!(h.annihilates(&codeword));
                    DependencyWitness { weight: w, terms, codeword }
                },
            )
        })
        .collect();
    Ok(ColumnSearchReport { w_max, verdicts })
}

struct ColumnSearch<'a> {
    p: u8,
    columns: &'a [Vec<u8>],
    scaled: &'a HashMap<Vec<u8>, Vec<(usize, u8)>>,
}

impl ColumnSearch<'_> {
    fn starting_at(&self, first: usize, w: usize) -> Option<Vec<(usize, u8)>> {
        let zero = vec![0u8; self.columns[first].len()];
        if w == 1 {
            return (self.columns[first] == zero).then(|| vec![(first, 1)]);
        }
        let mut terms = Vec::with_capacity(w);
        (1..self.p).find_map(|c| {
            terms.clear();
            terms.push((first, c));
            let acc = self.add(&zero, first, c);
            self.extend(acc, first, w - 1, &mut terms)
        })
    }

    fn add(&self, acc: &[u8], col: usize, c: u8) -> Vec<u8> {
        let p = self.p as u32;
        acc.iter()
            .zip(&self.columns[col])
            .map(|(&a, &x)| ((a as u32 + c as u32 * x as u32) % p) as u8)
            .collect()
    }

    fn extend(
        &self,
        acc: Vec<u8>,
        last: usize,
        remaining: usize,
        terms: &mut Vec<(usize, u8)>,
    ) -> Option<Vec<(usize, u8)>> {
        if remaining == 1 {
            let p = self.p as u32;
            let target: Vec<u8> = acc.iter().map(|&a| ((p - a as u32) % p) as u8).collect();
            let (j, c) = *self.scaled.get(&target)?.iter().filter(|(j, _)| *j > last).min()?;
            let mut found = terms.clone();
            found.push((j, c));
            return Some(found);
        }
        for next in last + 1..self.columns.len() {
            for c in 1..self.p {
                terms.push((next, c));
                let found = self.extend(self.add(&acc, next, c), next, remaining - 1, terms);
                terms.pop();
                if found.is_some() {
                    return found;
                }
            }
        }
        None
    }
}

/// Digits of `value` in base `p`, least significant first, padded to `k`.
fn counter_digits(mut value: u64, p: u64, k: usize) -> Vec<u8> {
    (0..k)
        .map(|_| {
            let d = (value % p) as u8;
            value /= p;
            d
        })
        .collect()
}

/// Minimum weight over all nonzero codewords, encoding every message.
pub fn min_weight_enumeration<C: Codec + ?Sized>(codec: &C) -> Result<usize> {
    let spec = codec.spec();
    let p = spec.base() as u64;
    let k = spec.message_len();
    let total = (0..k).try_fold(1u64, |acc, _| acc.checked_mul(p).filter(|&t| t <= ENUMERATION_BUDGET));
    let Some(total) = total else {
        return Err(CodeError::BudgetExceeded(format!(
            "{p}^{k} messages exceed the enumeration budget of {ENUMERATION_BUDGET}"
        )));
    };
    (1..total)
        .into_par_iter()
        .map(|i| codec.encode(&counter_digits(i, p, k)).map(|w| w.weight()))
        .try_reduce(|| usize::MAX, |a, b| Ok(a.min(b)))
}

/// Decoder behavior counts. Every trial lands in exactly one category.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SweepStats {
    pub trials: u64,
    /// No corruption and the decoder reported Clean.
    pub clean: u64,
    pub corrected_ok: u64,
    /// The decoder repaired the word into something other than what was sent.
    pub miscorrected: u64,
    pub detected: u64,
    /// Corrupted, yet the decoder reported Clean.
    pub silent: u64,
}

impl SweepStats {
    pub fn record(&mut self, transmitted: &Codeword, received: &Codeword, outcome: &DecodeOutcome, repaired: &Codeword) {
        self.trials += 1;
        match outcome {
            DecodeOutcome::Clean if received == transmitted => self.clean += 1,
            DecodeOutcome::Clean => self.silent += 1,
            DecodeOutcome::DetectedMultiple => self.detected += 1,
            _ if repaired == transmitted => self.corrected_ok += 1,
            _ => self.miscorrected += 1,
        }
    }

    pub fn merge(mut self, other: SweepStats) -> SweepStats {
        self.trials += other.trials;
        self.clean += other.clean;
        self.corrected_ok += other.corrected_ok;
        self.miscorrected += other.miscorrected;
        self.detected += other.detected;
        self.silent += other.silent;
        self
    }

    pub fn is_partition(&self) -> bool {
        self.clean + self.corrected_ok + self.miscorrected + self.detected + self.silent
            == self.trials
    }

    fn rate(&self, count: u64) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            count as f64 / self.trials as f64
        }
    }

    pub fn rates(&self) -> SweepRates {
        SweepRates {
            clean: self.rate(self.clean),
            corrected_ok: self.rate(self.corrected_ok),
            miscorrected: self.rate(self.miscorrected),
            detected: self.rate(self.detected),
            silent: self.rate(self.silent),
        }
    }
}

impl fmt::Display for SweepStats {
    /// Line-oriented `key=value` form.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "trials={} clean={} corrected_ok={} miscorrected={} detected={} silent={}",
            self.trials, self.clean, self.corrected_ok, self.miscorrected, self.detected, self.silent
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRates {
    pub clean: f64,
    pub corrected_ok: f64,
    pub miscorrected: f64,
    pub detected: f64,
    pub silent: f64,
}

/// One sweep result as emitted to reports.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRecord {
    pub spec: String,
    pub weight: usize,
    pub codewords: usize,
    pub stats: SweepStats,
}

impl fmt::Display for SweepRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "spec={} weight={} codewords={} {}", self.spec, self.weight, self.codewords, self.stats)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepMode {
    Exhaustive,
    Sampled { patterns: u64, seed: u64 },
}

/// An error pattern: `(slot, delta)` with distinct slots.
pub type ErrorPattern = Vec<(usize, u8)>;

/// All weight-`w` patterns over `n` slots with deltas in `[1, p)`.
pub fn all_patterns(n: usize, p: u8, w: usize) -> Vec<ErrorPattern> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(w);
    fn walk(n: usize, p: u8, w: usize, start: usize, current: &mut ErrorPattern, out: &mut Vec<ErrorPattern>) {
        if current.len() == w {
            out.push(current.clone());
            return;
        }
        for slot in start..n {
            for delta in 1..p {
                current.push((slot, delta));
                walk(n, p, w, slot + 1, current, out);
                current.pop();
            }
        }
    }
    walk(n, p, w, 0, &mut current, &mut out);
    out
}

/// A uniformly random weight-`w` pattern.
pub fn random_pattern<R: Rng>(rng: &mut R, n: usize, p: u8, w: usize) -> ErrorPattern {
    let mut slots = sample(rng, n, w).into_vec();
    slots.sort_unstable();
    slots.into_iter().map(|s| (s, rng.gen_range(1..p))).collect()
}

pub fn random_message<R: Rng>(rng: &mut R, spec: &CodeSpec) -> Vec<u8> {
    (0..spec.message_len()).map(|_| rng.gen_range(0..spec.base())).collect()
}

pub fn apply_pattern(word: &Codeword, pattern: &[(usize, u8)]) -> Codeword {
    let mut out = word.clone();
    for &(slot, delta) in pattern {
        out.add_at(slot, delta);
    }
    out
}

fn classify<C: Codec + ?Sized>(codec: &C, transmitted: &Codeword, pattern: &[(usize, u8)]) -> SweepStats {
    let received = apply_pattern(transmitted, pattern);
    let decoded = codec.decode(&received);
    let mut stats = SweepStats::default();
    stats.record(transmitted, &received, &decoded.outcome, &decoded.word);
    stats
}

/// Injects weight-`w` errors into `codeword` and classifies each decode.
pub fn error_sweep<C: Codec + ?Sized>(
    codec: &C,
    codeword: &Codeword,
    w: usize,
    mode: SweepMode,
) -> Result<SweepStats> {
    let n = codeword.len();
    if w == 0 || w > n {
        return Err(CodeError::InvalidParameter(format!("error weight must lie in 1..={n}")));
    }
    let p = codec.spec().base();
    let stats = match mode {
        SweepMode::Exhaustive => all_patterns(n, p, w)
            .par_iter()
            .map(|pattern| classify(codec, codeword, pattern))
            .reduce(SweepStats::default, SweepStats::merge),
        SweepMode::Sampled { patterns, seed } => (0..patterns)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i);
                classify(codec, codeword, &random_pattern(&mut rng, n, p, w))
            })
            .reduce(SweepStats::default, SweepStats::merge),
    };
    debug_assert!(stats.is_partition());
    Ok(stats)
}

/// Exhaustive sweep over the zero codeword plus `extra` seeded random ones.
pub fn sweep_codewords<C: Codec + ?Sized>(
    codec: &C,
    w: usize,
    extra: usize,
    seed: u64,
) -> Result<SweepRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut words = vec![codec.encode(&vec![0; codec.spec().message_len()])?];
    for _ in 0..extra {
        words.push(codec.encode(&random_message(&mut rng, codec.spec()))?);
    }
    let mut stats = SweepStats::default();
    for word in &words {
        stats = stats.merge(error_sweep(codec, word, w, SweepMode::Exhaustive)?);
    }
    Ok(SweepRecord {
        spec: format!("{}:{}", codec.spec().family(), codec.spec().params()),
        weight: w,
        codewords: words.len(),
        stats,
    })
}

/// Rechecks a witness from scratch: nonzero coefficients, matching weight,
/// and `H · codeword = 0`.
pub fn verify_witness(h: &CheckMatrix, witness: &DependencyWitness) -> bool {
    let nonzero = witness.codeword.iter().filter(|&&v| v != 0).count();
    nonzero == witness.weight
        && witness.terms.iter().all(|&(_, c)| c % h.base != 0)
        && h.annihilates(&witness.codeword)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::a1::A1Codec;
    use crate::a2::{A2Codec, A2SparseCodec};
    use crate::nwxli::NwxliCodec;
    use crate::prototype::PrototypeCodec;
    use std::sync::Arc;

    fn codecs() -> Vec<Box<dyn Codec>> {
        vec![
            Box::new(PrototypeCodec::new(3, 3).unwrap()),
            Box::new(PrototypeCodec::new(5, 2).unwrap()),
            Box::new(A1Codec::new(3, 10).unwrap()),
            Box::new(A1Codec::new(4, 20).unwrap()),
            Box::new(A2Codec::full(4).unwrap()),
            Box::new(A2Codec::new(5, 30).unwrap()),
            Box::new(A2SparseCodec::full(4, false).unwrap()),
            Box::new(A2SparseCodec::new(5, 9, true).unwrap()),
            Box::new(NwxliCodec::golay()),
        ]
    }

    #[test]
    fn matrix_shapes() {
        let shape = |spec: &Arc<CodeSpec>| {
            let h = check_matrix_of(spec);
            (h.row_count(), h.col_count())
        };
        assert_eq!(shape(PrototypeCodec::new(3, 3).unwrap().spec()), (4, 27));
        assert_eq!(shape(A2Codec::full(4).unwrap().spec()), (6, 22));
        assert_eq!(shape(NwxliCodec::golay().spec()), (5, 11));
    }

    #[test]
    fn matrix_matches_codec_syndromes() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for codec in codecs() {
            let spec = codec.spec();
            let h = check_matrix_of(spec);
            for _ in 0..1000 {
                let symbols = (0..spec.block_len()).map(|_| rng.gen_range(0..spec.base())).collect();
                let word = Codeword::new(spec.clone(), symbols).unwrap();
                assert_eq!(h.syndrome(word.symbols()), codec.syndrome(&word), "{}", spec.params());
            }
        }
    }

    #[test]
    fn column_search_small_cases() {
        let proto = PrototypeCodec::new(3, 3).unwrap();
        let h = check_matrix_of(proto.spec());
        let report = min_distance_column_search(&h, 2).unwrap();
        assert_eq!(report.min_distance(), None);
        assert_eq!(report.lower_bound(), 3);
        let report = min_distance_column_search(&h, 3).unwrap();
        assert_eq!(report.min_distance(), Some(3));
        assert!(verify_witness(&h, report.witness().unwrap()));

        let a2 = A2Codec::full(4).unwrap();
        let h = check_matrix_of(a2.spec());
        let report = min_distance_column_search(&h, 4).unwrap();
        assert_eq!(report.lower_bound(), 4);
        let w = report.witness().unwrap();
        assert!(verify_witness(&h, w));
        assert!(a2.is_codeword(&Codeword::new(a2.spec().clone(), w.codeword.clone()).unwrap()));
        assert!(min_distance_column_search(&h, 5).is_err());
    }

    #[test]
    fn enumeration_small_cases() {
        assert_eq!(min_weight_enumeration(&NwxliCodec::golay()).unwrap(), 5);
        assert_eq!(min_weight_enumeration(&PrototypeCodec::new(3, 2).unwrap()).unwrap(), 3);
        assert_eq!(min_weight_enumeration(&A2SparseCodec::full(4, false).unwrap()).unwrap(), 4);
        assert!(matches!(
            min_weight_enumeration(&A2Codec::full(4).unwrap()),
            Err(CodeError::BudgetExceeded(_))
        ));
    }

    #[test]
    fn oracles_agree() {
        let cases: Vec<Box<dyn Codec>> = vec![
            Box::new(PrototypeCodec::new(3, 2).unwrap()),
            Box::new(A2SparseCodec::full(4, false).unwrap()),
            Box::new(A2Codec::full(3).unwrap()),
            Box::new(NwxliCodec::golay()),
            Box::new(A1Codec::new(3, 10).unwrap()),
        ];
        for codec in cases {
            let h = check_matrix_of(codec.spec());
            let by_matrix = min_distance_column_search(&h, 4).unwrap();
            let by_weight = min_weight_enumeration(codec.as_ref()).unwrap();
            assert_eq!(by_matrix.lower_bound().min(5), by_weight.min(5), "{}", codec.spec().params());
        }
    }

    #[test]
    fn a2_sweeps() {
        let a2 = A2Codec::full(4).unwrap();
        let w = a2.encode(&[1; 16]).unwrap();
        let single = error_sweep(&a2, &w, 1, SweepMode::Exhaustive).unwrap();
        assert_eq!((single.trials, single.corrected_ok), (44, 44));
        let double = error_sweep(&a2, &w, 2, SweepMode::Exhaustive).unwrap();
        assert_eq!((double.trials, double.detected), (924, 924));
        assert!(double.is_partition());
    }

    #[test]
    fn prototype_double_errors_may_miscorrect() {
        let proto = PrototypeCodec::new(3, 2).unwrap();
        let rec = sweep_codewords(&proto, 2, 10, 1).unwrap();
        assert_eq!(rec.stats.silent, 0);
        assert!(rec.stats.miscorrected > 0);
        assert_eq!(rec.stats.trials, 11 * 144);
    }

    #[test]
    fn sampled_sweep_is_reproducible() {
        let g = NwxliCodec::golay();
        let w = g.encode(&[2, 0, 1, 1, 0, 2]).unwrap();
        let mode = SweepMode::Sampled { patterns: 500, seed: 3 };
        let a = error_sweep(&g, &w, 2, mode).unwrap();
        assert_eq!(a, error_sweep(&g, &w, 2, mode).unwrap());
        assert_eq!(a.corrected_ok, 500);
    }

    #[test]
    fn stats_text_and_json() {
        let s = SweepStats { trials: 3, clean: 1, corrected_ok: 1, miscorrected: 0, detected: 1, silent: 0 };
        assert_eq!(s.to_string(), "trials=3 clean=1 corrected_ok=1 miscorrected=0 detected=1 silent=0");
        let json = serde_json::to_value(s).unwrap();
        assert_eq!(json["detected"], 1);
        assert!(s.is_partition());
    }

    #[test]
    fn pattern_counts() {
        assert_eq!(all_patterns(22, 3, 2).len(), 924);
        assert_eq!(all_patterns(11, 3, 1).len() + all_patterns(11, 3, 2).len(), 242);
    }
}
