//! k-wise XOR-linearly-independent index sets.
//!
//! A set S of digit vectors is k-wise independent when no combination of at
//! most k distinct members with nonzero coefficients sums to the zero vector.
//! Used as code positions, such a set yields minimum distance k + 1.
//!
//! The ternary family built here takes `I1` = all {0,1}-vectors whose number
//! of ones lies in `[n, 2n-1]` and `I2 = 2·I1`; both are 3-wise independent.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::digit_arith::{mod_inverse, DigitVec};
use crate::error::{CodeError, Result};

/// Band parameter `n` of the popcount window `[n, 2n-1]`.
pub fn band_parameter(r: usize) -> Result<usize> {
    match r {
        0..=2 => Err(CodeError::InvalidParameter(format!(
            "WXLI families need r >= 3, got {r}"
        ))),
        3 => Ok(2),
        4..=7 => Ok(r / 2),
        _ => Ok(r.div_ceil(2) - 1),
    }
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// `f(r) = Σ_{i=n}^{2n-1} C(r, i)`.
pub fn family_size(r: usize) -> Result<usize> {
    let n = band_parameter(r)?;
    Ok((n..2 * n).map(|i| binomial(r, i)).sum())
}

/// One column of the family size table: sizes of the full code on `I1 ∪ I2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FamilyRow {
    pub r: usize,
    pub f: usize,
    pub block_len: usize,
    pub message_len: usize,
    pub rate: f64,
}

/// Rows for each `r` in `rs`, from the closed-form family size.
pub fn family_table(rs: impl IntoIterator<Item = usize>) -> Result<Vec<FamilyRow>> {
    rs.into_iter()
        .map(|r| {
            let f = family_size(r)?;
            let (block_len, message_len) = (2 * f + 2, 2 * f - r);
            Ok(FamilyRow { r, f, block_len, message_len, rate: message_len as f64 / block_len as f64 })
        })
        .collect()
}

/// Largest index length for which a family is materialized.
pub const MAX_FAMILY_INDEX_LEN: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WxliFamily {
    pub r: usize,
    pub n: usize,
    /// {0,1}-vectors with popcount in `[n, 2n-1]`, ascending.
    pub i1: Vec<DigitVec>,
    /// `2·v` for every `v` in `i1`, ascending.
    pub i2: Vec<DigitVec>,
    /// Ordered regular redundant indices `R_1..R_r`, all in `i1`.
    pub redundant: Vec<DigitVec>,
}

impl WxliFamily {
    pub fn f_value(&self) -> usize {
        self.i1.len()
    }
}

pub fn build_family(r: usize) -> Result<WxliFamily> {
    let n = band_parameter(r)?;
    if r > MAX_FAMILY_INDEX_LEN {
        return Err(CodeError::InvalidParameter(format!(
            "r = {r} exceeds the supported maximum {MAX_FAMILY_INDEX_LEN}"
        )));
    }
    let i1 = band_vectors(r, n);
    let mut i2: Vec<DigitVec> = i1.iter().map(|v| v.scalar_mul(2)).collect();
    i2.sort();
    let redundant = select_redundant(r, n, &i1)?;
    Ok(WxliFamily { r, n, i1, i2, redundant })
}

fn band_vectors(r: usize, n: usize) -> Vec<DigitVec> {
    // Ascending numeric order of the ternary value equals ascending order of
    // the bit pattern read as binary.
    (0u32..1 << r)
        .filter(|bits| (n..2 * n).contains(&(bits.count_ones() as usize)))
        .map(|bits| {
            let digits = (0..r).rev().map(|i| ((bits >> i) & 1) as u8).collect();
            DigitVec::from_raw(3, digits)
        })
        .collect()
}

/// Sum of `e_lo..=e_hi` (1-based, counted from the least significant digit),
/// or `None` if the range leaves the digit space.
fn elementary_run(r: usize, lo: usize, hi: usize) -> Option<DigitVec> {
    if lo == 0 || hi > r || lo > hi {
        return None;
    }
    let mut digits = vec![0u8; r];
    for i in lo..=hi {
        digits[r - i] = 1;
    }
    Some(DigitVec::from_raw(3, digits))
}

/// The closed-form `R_j` candidates, `None` where a formula leaves the digit space.
pub fn formula_redundant(r: usize) -> Result<Vec<Option<DigitVec>>> {
    let n = band_parameter(r)?;
    let standard = r > 7 || r % 2 == 1;
    Ok((1..=r)
        .map(|j| {
            let (lo, hi) = if standard {
                (1 + j / 2, n + j.div_ceil(2))
            } else {
                (j.div_ceil(2), n + j / 2)
            };
            elementary_run(r, lo, hi)
        })
        .collect())
}

fn select_redundant(r: usize, n: usize, i1: &[DigitVec]) -> Result<Vec<DigitVec>> {
    if r == 3 {
        // The standard-case formula needs e_4 here.
        return ["011", "110", "111"]
            .iter()
            .map(|s| DigitVec::parse(3, s))
            .collect();
    }
    debug_assert_eq!(band_parameter(r)?, n);
    let mut chosen: Vec<DigitVec> = Vec::with_capacity(r);
    for v in formula_redundant(r)?.into_iter().flatten() {
        if i1.contains(&v) && rank_ternary(chosen.iter().chain([&v])) > chosen.len() {
            chosen.push(v);
        }
    }
    // Even r >= 8: the formula never reaches e_r, so complete the basis from I1.
    for v in i1 {
        if chosen.len() == r {
            break;
        }
        if !chosen.contains(v) && rank_ternary(chosen.iter().chain([v])) > chosen.len() {
            chosen.push(v.clone());
        }
    }
    if chosen.len() != r {
        return Err(CodeError::InvalidParameter(format!(
            "I1 for r = {r} does not span the digit space"
        )));
    }
    Ok(chosen)
}

pub fn redundant_indices(r: usize) -> Result<Vec<DigitVec>> {
    Ok(build_family(r)?.redundant)
}

/// Rank of a set of equal-length ternary vectors over GF(3).
pub fn rank_ternary<'a>(vectors: impl IntoIterator<Item = &'a DigitVec>) -> usize {
    let rows: Vec<Vec<u8>> = vectors.into_iter().map(|v| v.digits().to_vec()).collect();
    row_reduce(rows).len()
}

fn row_reduce(mut rows: Vec<Vec<u8>>) -> Vec<Vec<u8>> {
    const P: u32 = 3;
    let width = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..width {
        let Some(pivot) = (rank..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = mod_inverse(P, rows[rank][col] as u32);
        for x in rows[rank].iter_mut() {
            *x = (*x as u32 * inv % P) as u8;
        }
        for i in 0..rows.len() {
            if i != rank && rows[i][col] != 0 {
                let factor = rows[i][col] as u32;
                for c in 0..width {
                    let sub = factor * rows[rank][c] as u32 % P;
                    rows[i][c] = ((rows[i][c] as u32 + P - sub) % P) as u8;
                }
            }
        }
        rank += 1;
    }
    rows.truncate(rank);
    rows
}

/// Solves `Σ c_j · columns[j] = target` over GF(3); `None` if no solution.
pub fn solve_ternary(columns: &[DigitVec], target: &DigitVec) -> Option<Vec<u8>> {
    const P: u32 = 3;
    let len = target.len();
    let k = columns.len();
    // Augmented matrix: one row per digit place, k coefficient columns + target.
    let mut m: Vec<Vec<u8>> = (0..len)
        .map(|row| {
            columns
                .iter()
                .map(|c| c.digits()[row])
                .chain([target.digits()[row]])
                .collect()
        })
        .collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..k {
        let Some(pivot) = (rank..len).find(|&i| m[i][col] != 0) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = mod_inverse(P, m[rank][col] as u32);
        for x in m[rank].iter_mut() {
            *x = (*x as u32 * inv % P) as u8;
        }
        for i in 0..len {
            if i != rank && m[i][col] != 0 {
                let factor = m[i][col] as u32;
                for c in 0..=k {
                    let sub = factor * m[rank][c] as u32 % P;
                    m[i][c] = ((m[i][c] as u32 + P - sub) % P) as u8;
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    if m[rank..].iter().any(|row| row[k] != 0) {
        return None;
    }
    let mut solution = vec![0u8; k];
    for (row, &col) in pivots.iter().enumerate() {
        solution[col] = m[row][k];
    }
    Some(solution)
}

/// Coefficients over `R_1..R_r` for each elementary vector `e_1..e_r`:
/// `result[i-1][j-1]` is the coefficient of `R_j` in `e_i`.
pub fn decompose_elementary(family: &WxliFamily) -> Vec<Vec<u8>> {
    (1..=family.r)
        .map(|i| {
            let e = DigitVec::elementary(3, family.r, i).expect("i within r");
            solve_ternary(&family.redundant, &e).expect("R spans the digit space")
        })
        .collect()
}

/// A nonzero combination summing to zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub terms: Vec<(DigitVec, u8)>,
}

impl Witness {
    /// Recomputes the weighted sum from scratch.
    pub fn sums_to_zero(&self) -> bool {
        let Some((first, _)) = self.terms.first() else { return false };
        let mut acc = DigitVec::from_raw(first.base(), vec![0; first.len()]);
        for (v, c) in &self.terms {
            if *c % v.base() == 0 {
                return false;
            }
            acc.add_scaled_assign(*c, v);
        }
        acc.is_zero()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndependenceReport {
    pub order: usize,
    pub independent: bool,
    pub witness: Option<Witness>,
}

/// Exhaustive check that no combination of at most `k` distinct members
/// of `set` with coefficients in `[1, p)` sums to zero.
///
/// Every (k-1)-prefix with coefficients is enumerated; the last member is
/// found by lookup, so the cost is `O(C(|S|, k-1) · (p-1)^k)`. Work is split
/// over the first member and the lowest witness (by member positions) wins,
/// so the answer does not depend on the number of workers.
pub fn is_kwise_independent(set: &[DigitVec], k: usize) -> Result<IndependenceReport> {
    let Some(first) = set.first() else {
        return Err(CodeError::InvalidParameter("empty index set".into()));
    };
    if k == 0 || k > set.len() {
        return Err(CodeError::InvalidParameter(format!(
            "order {k} must lie in 1..={}",
            set.len()
        )));
    }
    let base = first.base();
    let len = first.len();
    if set.iter().any(|v| v.base() != base || v.len() != len) {
        return Err(CodeError::InvalidParameter("index set mixes bases or lengths".into()));
    }
    let mut lookup: HashMap<&DigitVec, usize> = HashMap::new();
    for (i, v) in set.iter().enumerate() {
        if lookup.insert(v, i).is_some() {
            return Err(CodeError::InvalidParameter(format!("duplicate member {v}")));
        }
    }
    let searcher = Searcher { set, lookup: &lookup, base };
    for size in 1..=k {
        let witness = (0..set.len()).into_par_iter().find_map_first(|start| {
            let mut acc = DigitVec::from_raw(base, vec![0; len]);
            let mut terms = Vec::with_capacity(size);
            searcher.extend(start, size, &mut acc, &mut terms)
        });
        if let Some(terms) = witness {
            let terms = terms.into_iter().map(|(i, c)| (set[i].clone(), c)).collect();
            return Ok(IndependenceReport {
                order: k,
                independent: false,
                witness: Some(Witness { terms }),
            });
        }
    }
    Ok(IndependenceReport { order: k, independent: true, witness: None })
}

struct Searcher<'a> {
    set: &'a [DigitVec],
    lookup: &'a HashMap<&'a DigitVec, usize>,
    base: u8,
}

impl Searcher<'_> {
    /// Places member `idx` with every coefficient, then recurses until one
    /// member remains to be chosen, which is completed by lookup.
    fn extend(
        &self,
        idx: usize,
        remaining: usize,
        acc: &mut DigitVec,
        terms: &mut Vec<(usize, u8)>,
    ) -> Option<Vec<(usize, u8)>> {
        let p = self.base;
        if remaining == 1 {
            // Need coeff·set[m] = -acc for some m >= idx.
            let target = acc.inverse();
            for c in 1..p {
                let inv = mod_inverse(p as u32, c as u32) as u64;
                if let Some(&m) = self.lookup.get(&target.scalar_mul(inv)) {
                    if m >= idx {
                        let mut found = terms.clone();
                        found.push((m, c));
                        return Some(found);
                    }
                }
            }
            return None;
        }
        for c in 1..p {
            acc.add_scaled_assign(c, &self.set[idx]);
            terms.push((idx, c));
            for next in idx + 1..self.set.len() {
                if let Some(w) = self.extend(next, remaining - 1, acc, terms) {
                    return Some(w);
                }
            }
            terms.pop();
            acc.add_scaled_assign(p - c, &self.set[idx]);
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vecs(items: &[&str]) -> Vec<DigitVec> {
        items.iter().map(|s| DigitVec::parse(3, s).unwrap()).collect()
    }

    #[test]
    fn band_parameters() {
        assert_eq!(band_parameter(3).unwrap(), 2);
        assert_eq!(band_parameter(4).unwrap(), 2);
        assert_eq!(band_parameter(7).unwrap(), 3);
        assert_eq!(band_parameter(8).unwrap(), 3);
        assert_eq!(band_parameter(9).unwrap(), 4);
        assert!(band_parameter(2).is_err());
    }

    #[test]
    fn family_sizes() {
        let sizes: Vec<usize> = (3..=9).map(|r| family_size(r).unwrap()).collect();
        assert_eq!(sizes, vec![4, 10, 20, 41, 91, 182, 372]);
        for r in 3..=9 {
            assert_eq!(build_family(r).unwrap().f_value(), family_size(r).unwrap());
        }
    }

    #[test]
    fn r4_family_listing() {
        let fam = build_family(4).unwrap();
        let mut expected = vecs(&[
            "0011", "0101", "0110", "1001", "1010", "1100", "0111", "1011", "1101", "1110",
        ]);
        expected.sort();
        assert_eq!(fam.i1, expected);
        assert_eq!(fam.redundant, vecs(&["0011", "0111", "0110", "1110"]));
        for v in &fam.i1 {
            assert!(v.digits().iter().all(|&d| d <= 1));
            assert!(!fam.i2.contains(v));
            assert!(fam.i2.contains(&v.scalar_mul(2)));
        }
    }

    #[test]
    fn redundant_sets() {
        assert_eq!(redundant_indices(3).unwrap(), vecs(&["011", "110", "111"]));
        assert_eq!(
            redundant_indices(5).unwrap(),
            vecs(&["00111", "00110", "01110", "01100", "11100"])
        );
        for r in [4, 5, 6, 7, 9] {
            let formula: Vec<DigitVec> =
                formula_redundant(r).unwrap().into_iter().map(Option::unwrap).collect();
            assert_eq!(redundant_indices(r).unwrap(), formula, "r={r}");
        }
        // The formula never reaches e_8 at r = 8.
        assert!(formula_redundant(8).unwrap().iter().flatten().all(|v| v.place(7) == 0));
        for r in 3..=10 {
            let fam = build_family(r).unwrap();
            assert_eq!(fam.redundant.len(), r);
            assert_eq!(rank_ternary(&fam.redundant), r);
            for (i, v) in fam.redundant.iter().enumerate() {
                assert!(fam.i1.contains(v));
                assert!(!fam.redundant[..i].contains(v));
            }
        }
    }

    /// Closed-form elementary decompositions as coefficient vectors over R.
    fn closed_form(r: usize) -> Vec<Vec<u8>> {
        let n = band_parameter(r).unwrap();
        let unit = |j: usize| {
            let mut v = vec![0i32; r];
            v[j - 1] = 1;
            v
        };
        let sub = |a: &Vec<i32>, b: &Vec<i32>| a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<_>>();
        let mut e: Vec<Option<Vec<i32>>> = vec![None; r + 1];
        if r > 7 || r % 2 == 1 {
            for i in 1..=n {
                e[i] = Some(sub(&unit(2 * i - 1), &unit(2 * i)));
            }
            for j in n + 2..=r {
                let a = 2 * (j - (n + 1));
                e[j] = Some(sub(&unit(a + 1), &unit(a)));
            }
            let mut rest = unit(1);
            for i in 1..=n {
                rest = sub(&rest, e[i].as_ref().unwrap());
            }
            e[n + 1] = Some(rest);
        } else {
            for i in 1..n {
                e[i] = Some(sub(&unit(2 * i), &unit(2 * i + 1)));
            }
            for j in n + 1..=r {
                let a = 2 * (j - n);
                e[j] = Some(sub(&unit(a), &unit(a - 1)));
            }
            let mut rest = unit(1);
            for i in 1..n {
                rest = sub(&rest, e[i].as_ref().unwrap());
            }
            e[n] = Some(rest);
        }
        e.into_iter()
            .skip(1)
            .map(|c| c.unwrap().into_iter().map(|x| x.rem_euclid(3) as u8).collect())
            .collect()
    }

    #[test]
    fn decomposition_matches_closed_forms() {
        for r in [4, 5, 6, 7, 9] {
            let fam = build_family(r).unwrap();
            assert_eq!(decompose_elementary(&fam), closed_form(r), "r={r}");
        }
        let fam = build_family(4).unwrap();
        let dec = decompose_elementary(&fam);
        assert_eq!(dec[0], vec![0, 1, 2, 0]); // e_1 = R_2 - R_3
        assert_eq!(dec[3], vec![0, 0, 2, 1]); // e_4 = R_4 - R_3
    }

    #[test]
    fn decomposition_reconstructs_elementary_vectors() {
        for r in 3..=10 {
            let fam = build_family(r).unwrap();
            for (i, coeffs) in decompose_elementary(&fam).iter().enumerate() {
                let mut acc = DigitVec::zero(3, r).unwrap();
                for (c, v) in coeffs.iter().zip(&fam.redundant) {
                    acc.add_scaled_assign(*c, v);
                }
                assert_eq!(acc, DigitVec::elementary(3, r, i + 1).unwrap());
            }
        }
    }

    #[test]
    fn negative_witness() {
        let report = is_kwise_independent(&vecs(&["001", "010", "011"]), 3).unwrap();
        assert!(!report.independent);
        let w = report.witness.unwrap();
        assert!(w.sums_to_zero());
        assert_eq!(w.terms, vec![
            (DigitVec::parse(3, "001").unwrap(), 1),
            (DigitVec::parse(3, "010").unwrap(), 1),
            (DigitVec::parse(3, "011").unwrap(), 2),
        ]);
    }

    #[test]
    fn small_orders() {
        let with_zero = vecs(&["000", "011"]);
        let w = is_kwise_independent(&with_zero, 1).unwrap();
        assert!(!w.independent);
        let pair = vecs(&["012", "021"]);
        let w = is_kwise_independent(&pair, 2).unwrap();
        assert!(!w.independent);
        assert!(w.witness.unwrap().sums_to_zero());
        assert!(is_kwise_independent(&pair, 1).unwrap().independent);
        assert!(is_kwise_independent(&pair, 3).is_err());
    }

    #[test]
    fn families_are_three_wise_independent() {
        for r in 3..=6 {
            let fam = build_family(r).unwrap();
            assert!(is_kwise_independent(&fam.i1, 3).unwrap().independent, "I1 r={r}");
            assert!(is_kwise_independent(&fam.i2, 3).unwrap().independent, "I2 r={r}");
        }
        // The union is not: v and 2v cancel.
        let fam = build_family(4).unwrap();
        let union: Vec<DigitVec> = fam.i1.iter().chain(&fam.i2).cloned().collect();
        let rep = is_kwise_independent(&union, 2).unwrap();
        assert!(!rep.independent);
        assert!(rep.witness.unwrap().sums_to_zero());
    }

    #[test]
    fn brute_force_agrees_on_random_small_sets() {
        // Independent oracle: enumerate every coefficient vector in {0,1,2}^|S|
        // with support size <= k.
        fn oracle(set: &[DigitVec], k: usize) -> bool {
            let n = set.len();
            let total = 3usize.pow(n as u32);
            for code in 1..total {
                let mut c = code;
                let mut acc = DigitVec::zero(3, set[0].len()).unwrap();
                let mut support = 0;
                for v in set {
                    let coef = (c % 3) as u8;
                    c /= 3;
                    if coef != 0 {
                        support += 1;
                        acc.add_scaled_assign(coef, v);
                    }
                }
                if support <= k && acc.is_zero() {
                    return false;
                }
            }
            true
        }
        let mut seed = 12345u64;
        for _ in 0..60 {
            let mut set = Vec::new();
            while set.len() < 6 {
                seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let v = DigitVec::from_index((seed >> 33) % 81, 3, 4).unwrap();
                if !set.contains(&v) {
                    set.push(v);
                }
            }
            for k in 1..=4 {
                let got = is_kwise_independent(&set, k).unwrap();
                assert_eq!(got.independent, oracle(&set, k));
                if let Some(w) = got.witness {
                    assert!(w.sums_to_zero());
                    assert!(w.terms.len() <= k);
                }
            }
        }
    }
}
