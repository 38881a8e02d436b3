//! Reed–Muller codes RM(r, n) in the monomial basis.
//!
//! Codewords are enumerated in binary-reflected Gray order over message
//! words: the message at rank `s` is `s ^ (s >> 1)` and stepping to rank `s`
//! toggles basis element `trailing_zeros(s)`. Basis element 0 is always the
//! constant function, so ranks `2j` and `2j + 1` are complements of each
//! other. The scanners below exploit this by walking only even ranks and
//! tracking a complement flag.

use std::collections::BTreeMap;

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::truth_table::{TruthTable, MAX_TABLE_VARS};

/// Default cap on the code dimension `k` for full enumeration.
pub const MAX_ENUMERATION_K: u32 = 30;

/// Binomial coefficient; exact for the ranges used here (n <= 63).
pub fn binomial(n: u32, r: u32) -> u64 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r) as u64;
    let n = n as u64;
    let mut acc: u64 = 1;
    for i in 0..r {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Message length of RM(r, n): `sum_{i <= r} C(n, i)`.
pub fn code_dimension(n: u32, r: u32) -> u64 {
    (0..=r.min(n)).map(|i| binomial(n, i)).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct RmCodeSpec {
    n: u32,
    r: u32,
    k: u32,
}

impl RmCodeSpec {
    pub fn new(r: u32, n: u32) -> Result<Self> {
        if n == 0 || n > MAX_TABLE_VARS {
            return Err(Error::VariableCount { n, max: MAX_TABLE_VARS });
        }
        if r > n {
            return Err(Error::Order { r, n, min: 0 });
        }
        Ok(RmCodeSpec {
            n,
            r,
            k: code_dimension(n, r) as u32,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn contains(&self, f: &TruthTable) -> Result<bool> {
        if f.n() != self.n {
            return Err(Error::DimensionMismatch {
                left: f.n(),
                right: self.n,
            });
        }
        Ok(f.degree() <= self.r as i32)
    }

    pub(crate) fn check_enumerable(&self, max_k: u32) -> Result<()> {
        if self.k > max_k {
            Err(Error::EnumerationCap { k: self.k, max: max_k })
        } else {
            Ok(())
        }
    }
}

/// Ordered monomial basis of RM(r, n), sorted by (degree, mask).
#[derive(Clone, Debug)]
pub struct MonomialBasis {
    spec: RmCodeSpec,
    masks: Vec<u32>,
    tables: Vec<TruthTable>,
}

pub fn build_basis(spec: &RmCodeSpec) -> MonomialBasis {
    let n = spec.n;
    let mut masks: Vec<u32> = Vec::with_capacity(spec.k as usize);
    for d in 0..=spec.r {
        let mut by_degree: Vec<u32> = subsets_of_size(n, d).collect();
        by_degree.sort_unstable();
        masks.extend(by_degree);
    }
    let tables = masks
        .iter()
        .map(|&m| TruthTable::monomial(n, m).expect("mask within n"))
        .collect();
    MonomialBasis {
        spec: *spec,
        masks,
        tables,
    }
}

// Gosper's hack over n-bit masks of popcount d.
fn subsets_of_size(n: u32, d: u32) -> impl Iterator<Item = u32> {
    let limit = 1u64 << n;
    let mut cur: Option<u64> = Some((1u64 << d) - 1);
    std::iter::from_fn(move || {
        let v = cur?;
        if v >= limit {
            return None;
        }
        cur = if v == 0 {
            None
        } else {
            let c = v & v.wrapping_neg();
            let r = v + c;
            Some((((r ^ v) >> 2) / c) | r)
        };
        Some(v as u32)
    })
}

impl MonomialBasis {
    pub fn spec(&self) -> &RmCodeSpec {
        &self.spec
    }

    pub fn masks(&self) -> &[u32] {
        &self.masks
    }

    pub fn tables(&self) -> &[TruthTable] {
        &self.tables
    }

    /// XOR of the basis tables selected by the message bits.
    pub fn encode(&self, message: u64) -> Result<TruthTable> {
        let k = self.spec.k;
        if k < 64 && message >> k != 0 {
            return Err(Error::MessageRange { message, k });
        }
        Ok(self.encode_unchecked(message))
    }

    fn encode_unchecked(&self, message: u64) -> TruthTable {
        let mut t = TruthTable::zero(self.spec.n).expect("valid n");
        let mut rest = message;
        while rest != 0 {
            let j = rest.trailing_zeros() as usize;
            t.xor_assign_unchecked(&self.tables[j]);
            rest &= rest - 1;
        }
        t
    }
}

pub fn encode(spec: &RmCodeSpec, message: u64) -> Result<TruthTable> {
    build_basis(spec).encode(message)
}

/// Binary-reflected Gray code of `rank`.
pub fn gray(rank: u64) -> u64 {
    rank ^ (rank >> 1)
}

/// One visit of the Gray enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GrayStep {
    pub rank: u64,
    pub message: u64,
    /// Basis index toggled to reach this message; `None` on the first visit.
    pub toggled: Option<usize>,
}

/// Visits all 2^k messages in Gray order with the default cap.
pub fn enumerate_gray(spec: &RmCodeSpec, visitor: impl FnMut(GrayStep)) -> Result<()> {
    enumerate_gray_capped(spec, MAX_ENUMERATION_K, visitor)
}

pub fn enumerate_gray_capped(spec: &RmCodeSpec, max_k: u32, mut visitor: impl FnMut(GrayStep)) -> Result<()> {
    spec.check_enumerable(max_k)?;
    let total = 1u64 << spec.k;
    visitor(GrayStep {
        rank: 0,
        message: 0,
        toggled: None,
    });
    let mut message = 0u64;
    for rank in 1..total {
        let j = rank.trailing_zeros() as usize;
        message ^= 1 << j;
        visitor(GrayStep {
            rank,
            message,
            toggled: Some(j),
        });
    }
    Ok(())
}

/// A contiguous range of pair indices `j` (covering ranks `2j`, `2j + 1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairBlock {
    pub start: u64,
    pub end: u64,
}

/// Splits the `2^(k-1)` rank pairs into at most `2^parts_log2` equal blocks,
/// i.e. fixes the top message bits of the Gray walk per block.
pub fn pair_blocks(spec: &RmCodeSpec, parts_log2: u32) -> Vec<PairBlock> {
    let pairs_log2 = spec.k - 1;
    let p = parts_log2.min(pairs_log2);
    let size = 1u64 << (pairs_log2 - p);
    (0..1u64 << p)
        .map(|b| PairBlock {
            start: b * size,
            end: (b + 1) * size,
        })
        .collect()
}

/// Incremental Gray walker over even ranks. For the current pair index `j`
/// it holds `x = f ^ base` where the codeword at rank `2j` is
/// `base ^ (j & 1 ? 1 : 0)`, and `pc = weight(x)`.
pub(crate) struct PairScanner<'a> {
    toggles: Vec<Toggle>,
    basis: &'a MonomialBasis,
    len: u64,
    #[cfg(target_arch = "x86_64")]
    avx2: bool,
}

/// Words of a basis table: all of them when most are nonzero, otherwise the
/// nonzero ones with their indices.
enum Toggle {
    Dense(Vec<u64>),
    Sparse(Vec<usize>, Vec<u64>),
}

impl<'a> PairScanner<'a> {
    pub(crate) fn new(basis: &'a MonomialBasis) -> Self {
        let toggles = basis
            .tables
            .iter()
            .map(|t| {
                let words = t.words();
                let (idx, vals): (Vec<usize>, Vec<u64>) = words
                    .iter()
                    .enumerate()
                    .filter(|(_, &w)| w != 0)
                    .map(|(i, &w)| (i, w))
                    .unzip();
                if 4 * idx.len() >= 3 * words.len() {
                    Toggle::Dense(words.to_vec())
                } else {
                    Toggle::Sparse(idx, vals)
                }
            })
            .collect();
        PairScanner {
            toggles,
            basis,
            len: 1u64 << basis.spec.n,
            #[cfg(target_arch = "x86_64")]
            avx2: std::is_x86_feature_detected!("avx2") && std::is_x86_feature_detected!("popcnt"),
        }
    }

    /// Calls `visit(j, d_even)` for every pair index in `block`, where
    /// `d_even` is the distance from `f` to the codeword at rank `2j`; the
    /// codeword at rank `2j + 1` is at distance `2^n - d_even`.
    pub(crate) fn scan(&self, f: &TruthTable, block: PairBlock, visit: impl FnMut(u64, u64)) {
        #[cfg(target_arch = "x86_64")]
        if self.avx2 {
            // SAFETY: both features were detected at construction.
            return unsafe { self.scan_avx2(f, block, visit) };
        }
        self.scan_impl(f, block, visit)
    }

    #[cfg(target_arch = "x86_64")]
    #[target_feature(enable = "avx2,popcnt")]
    unsafe fn scan_avx2(&self, f: &TruthTable, block: PairBlock, visit: impl FnMut(u64, u64)) {
        self.scan_impl(f, block, visit)
    }

    #[inline(always)]
    fn scan_impl(&self, f: &TruthTable, block: PairBlock, mut visit: impl FnMut(u64, u64)) {
        if block.start >= block.end {
            return;
        }
        let start_message = gray(2 * block.start) & !1;
        let base = self.basis.encode_unchecked(start_message);
        let mut x: Vec<u64> = f.words().iter().zip(base.words()).map(|(a, b)| a ^ b).collect();
        let len = self.len as i64;
        match x.len() {
            1 => {
                let mut x0 = x[0];
                let words: Vec<u64> = self.basis.tables.iter().map(|t| t.words()[0]).collect();
                let mut j = block.start;
                loop {
                    let pc = x0.count_ones() as i64;
                    let d = if j & 1 == 0 { pc } else { len - pc };
                    visit(j, d as u64);
                    j += 1;
                    if j == block.end {
                        break;
                    }
                    x0 ^= words[1 + j.trailing_zeros() as usize];
                }
            }
            2 => {
                let (mut x0, mut x1) = (x[0], x[1]);
                let words: Vec<[u64; 2]> = self.basis.tables.iter().map(|t| [t.words()[0], t.words()[1]]).collect();
                let mut j = block.start;
                loop {
                    let pc = (x0.count_ones() + x1.count_ones()) as i64;
                    let d = if j & 1 == 0 { pc } else { len - pc };
                    visit(j, d as u64);
                    j += 1;
                    if j == block.end {
                        break;
                    }
                    let t = &words[1 + j.trailing_zeros() as usize];
                    x0 ^= t[0];
                    x1 ^= t[1];
                }
            }
            _ => {
                let mut pc: i64 = x.iter().map(|w| w.count_ones() as i64).sum();
                let mut j = block.start;
                loop {
                    let d = if j & 1 == 0 { pc } else { len - pc };
                    visit(j, d as u64);
                    j += 1;
                    if j == block.end {
                        break;
                    }
                    match &self.toggles[1 + j.trailing_zeros() as usize] {
                        Toggle::Dense(t) => {
                            let mut acc = 0u64;
                            for (xw, tw) in x.iter_mut().zip(t) {
                                *xw ^= tw;
                                acc += xw.count_ones() as u64;
                            }
                            pc = acc as i64;
                        }
                        Toggle::Sparse(idx, t) => {
                            for (&i, &tw) in idx.iter().zip(t) {
                                let old = x[i];
                                pc += (old ^ tw).count_ones() as i64 - old.count_ones() as i64;
                                x[i] = old ^ tw;
                            }
                        }
                    }
                }
            }
        }
    }
}

/// Weight histogram of RM(r, n).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightCensus {
    n: u32,
    r: u32,
    k: u32,
    entries: BTreeMap<u64, u64>,
}

/// Exact weight histogram over all 2^k codewords.
pub fn weight_census(spec: &RmCodeSpec) -> Result<WeightCensus> {
    weight_census_par(spec, 1)
}

/// Census with the pair range split across `jobs` workers; counts are merged
/// by addition so the result does not depend on `jobs`.
pub fn weight_census_par(spec: &RmCodeSpec, jobs: usize) -> Result<WeightCensus> {
    use rayon::prelude::*;

    spec.check_enumerable(MAX_ENUMERATION_K)?;
    let basis = build_basis(spec);
    let scanner = PairScanner::new(&basis);
    let zero = TruthTable::zero(spec.n)?;
    let len = 1u64 << spec.n;
    let blocks = pair_blocks(spec, jobs_log2(jobs));
    let dense = spec.n <= 20;

    let count_block = |block: PairBlock| -> BTreeMap<u64, u64> {
        if dense {
            let mut hist = vec![0u64; len as usize + 1];
            scanner.scan(&zero, block, |_, w| {
                hist[w as usize] += 1;
                hist[(len - w) as usize] += 1;
            });
            hist.into_iter()
                .enumerate()
                .filter(|(_, c)| *c != 0)
                .map(|(w, c)| (w as u64, c))
                .collect()
        } else {
            let mut hist = BTreeMap::new();
            scanner.scan(&zero, block, |_, w| {
                *hist.entry(w).or_insert(0) += 1;
                *hist.entry(len - w).or_insert(0) += 1;
            });
            hist
        }
    };

    let parts: Vec<BTreeMap<u64, u64>> = if jobs > 1 {
        with_pool(jobs, || blocks.par_iter().map(|&b| count_block(b)).collect())
    } else {
        blocks.iter().map(|&b| count_block(b)).collect()
    };
    let mut entries = BTreeMap::new();
    for part in parts {
        for (w, c) in part {
            *entries.entry(w).or_insert(0) += c;
        }
    }
    Ok(WeightCensus {
        n: spec.n,
        r: spec.r,
        k: spec.k,
        entries,
    })
}

pub(crate) fn jobs_log2(jobs: usize) -> u32 {
    if jobs <= 1 {
        0
    } else {
        // Four blocks per worker for load balance.
        (jobs * 4).next_power_of_two().trailing_zeros()
    }
}

pub(crate) fn with_pool<T: Send>(jobs: usize, op: impl FnOnce() -> T + Send) -> T {
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(op),
        Err(_) => op(),
    }
}

impl WeightCensus {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn entries(&self) -> &BTreeMap<u64, u64> {
        &self.entries
    }

    pub fn count(&self, weight: u64) -> u64 {
        self.entries.get(&weight).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.entries.values().sum()
    }

    /// `count(w) == count(2^n - w)` for every weight.
    pub fn is_symmetric(&self) -> bool {
        let len = 1u64 << self.n;
        self.entries.iter().all(|(&w, &c)| self.count(len - w) == c)
    }

    /// `A_{r,n}(x)`: number of codewords of weight at most `2^n x`.
    pub fn query_a(&self, x: Ratio<u64>) -> Result<u64> {
        if *x.numer() > *x.denom() {
            return Err(Error::param("x", x, "must lie in [0, 1]"));
        }
        let len = 1u128 << self.n;
        let (num, den) = (*x.numer() as u128, *x.denom() as u128);
        Ok(self
            .entries
            .iter()
            .take_while(|(&w, _)| w as u128 * den <= len * num)
            .map(|(_, &c)| c)
            .sum())
    }

    /// `B_{r,n}`: codewords with `|wt - 2^(n-1)| >= 2^(n-1) / C(n, r)`.
    pub fn count_b(&self) -> u64 {
        let half = 1u64 << (self.n - 1);
        let c = binomial(self.n, self.r);
        self.entries
            .iter()
            .filter(|(&w, _)| deviates_at_least(w, half, c))
            .map(|(_, &c)| c)
            .sum()
    }

    /// Codewords whose deviation from 2^(n-1) is exactly the threshold.
    pub fn boundary_count(&self) -> u64 {
        let half = 1u64 << (self.n - 1);
        let c = binomial(self.n, self.r) as u128;
        self.entries
            .iter()
            .filter(|(&w, _)| w.abs_diff(half) as u128 * c == half as u128)
            .map(|(_, &c)| c)
            .sum()
    }

    /// `log(A) / (n^(r-1) log(1/delta))` at `x = (1 - delta)/2`, the empirical
    /// exponent that a census-size bound `(1/delta)^(K n^(r-1))` would need.
    /// Logarithms are base 2; returns `None` for degenerate inputs.
    pub fn census_exponent(&self, delta: f64) -> Option<f64> {
        if !(delta > 0.0 && delta <= 0.5) || self.r == 0 {
            return None;
        }
        let len = (1u64 << self.n) as f64;
        let limit = len * (1.0 - delta) / 2.0;
        let a: u64 = self
            .entries
            .iter()
            .take_while(|(&w, _)| w as f64 <= limit)
            .map(|(_, &c)| c)
            .sum();
        let denom = (self.n as f64).powi(self.r as i32 - 1) * (1.0 / delta).log2();
        Some((a as f64).log2() / denom)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("weight,count\n");
        for (w, c) in &self.entries {
            s.push_str(&format!("{w},{c}\n"));
        }
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "r": self.r,
            "n": self.n,
            "k": self.k,
            "rows": self.entries.iter().map(|(w, c)| serde_json::json!({"weight": w, "count": c})).collect::<Vec<_>>(),
        })
    }
}

// |w - half| * c >= half, exactly.
fn deviates_at_least(w: u64, half: u64, c: u64) -> bool {
    w.abs_diff(half) as u128 * c as u128 >= half as u128
}

// |d - half| * c <= half, exactly.
fn deviates_at_most(d: u64, half: u64, c: u64) -> bool {
    d.abs_diff(half) as u128 * c as u128 <= half as u128
}

/// Subset of RM(r, n) whose pairwise distances stay within `tau` of 2^(n-1).
#[derive(Clone, Debug, Serialize)]
pub struct SeparatedSet {
    code: RmCodeSpec,
    tau: (u64, u64),
    alpha: f64,
    members: Vec<u64>,
    #[serde(skip)]
    tables: Vec<TruthTable>,
}

impl SeparatedSet {
    pub fn code(&self) -> &RmCodeSpec {
        &self.code
    }

    /// Tolerance `2^(n-1) / C(n, r)` in lowest terms.
    pub fn tau(&self) -> Ratio<u64> {
        Ratio::new(self.tau.0, self.tau.1)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `2^((1 - alpha) C(n, r))`.
    pub fn target_size(&self) -> f64 {
        ((1.0 - self.alpha) * binomial(self.code.n, self.code.r) as f64).exp2()
    }

    /// Checks the pairwise deviation bound on every pair of members.
    pub fn audit(&self) -> bool {
        let half = 1u64 << (self.code.n - 1);
        let c = binomial(self.code.n, self.code.r);
        self.tables.iter().enumerate().all(|(i, g)| {
            self.tables[i + 1..]
                .iter()
                .all(|h| deviates_at_most(g.distance_unchecked(h), half, c))
        })
    }

    pub fn message_hex(&self, message: u64) -> String {
        message_hex(message, self.code.k)
    }

    pub fn members_csv(&self) -> String {
        let mut s = String::from("member_index,message_hex\n");
        for (i, &m) in self.members.iter().enumerate() {
            s.push_str(&format!("{i},{}\n", self.message_hex(m)));
        }
        s
    }

    pub fn summary_json(&self) -> serde_json::Value {
        let tau = self.tau();
        serde_json::json!({
            "r": self.code.r,
            "n": self.code.n,
            "alpha": self.alpha,
            "tau_num": tau.numer(),
            "tau_den": tau.denom(),
            "size": self.members.len(),
            "target_size": self.target_size(),
        })
    }
}

/// Hex form of a k-bit message word, ceil(k/4) digits.
pub fn message_hex(message: u64, k: u32) -> String {
    let width = (k as usize).div_ceil(4).max(1);
    format!("{message:0width$x}")
}

/// Greedy construction: scan codewords in Gray order and keep a candidate
/// when it is within `tau` of 2^(n-1) from every member kept so far.
pub fn greedy_separated_set(spec: &RmCodeSpec, alpha: f64) -> Result<SeparatedSet> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::param("alpha", alpha, "must lie in (0, 1)"));
    }
    spec.check_enumerable(MAX_ENUMERATION_K)?;
    let basis = build_basis(spec);
    let half = 1u64 << (spec.n - 1);
    let c = binomial(spec.n, spec.r);
    let tau = Ratio::new(half, c);

    let mut members = Vec::new();
    let mut tables: Vec<TruthTable> = Vec::new();
    let mut current = TruthTable::zero(spec.n)?;
    enumerate_gray(spec, |step| {
        if let Some(j) = step.toggled {
            current.xor_assign_unchecked(&basis.tables[j]);
        }
        let ok = tables
            .iter()
            .all(|h| deviates_at_most(current.distance_unchecked(h), half, c));
        if ok {
            members.push(step.message);
            tables.push(current.clone());
        }
    })?;
    Ok(SeparatedSet {
        code: *spec,
        tau: (*tau.numer(), *tau.denom()),
        alpha,
        members,
        tables,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{sample_uniform, SeedSpec};

    fn spec(r: u32, n: u32) -> RmCodeSpec {
        RmCodeSpec::new(r, n).unwrap()
    }

    fn census_by_encoding(s: &RmCodeSpec) -> BTreeMap<u64, u64> {
        let basis = build_basis(s);
        let mut m = BTreeMap::new();
        for msg in 0..1u64 << s.k() {
            *m.entry(basis.encode(msg).unwrap().weight()).or_insert(0) += 1;
        }
        m
    }

    #[test]
    fn basis_examples() {
        assert_eq!(build_basis(&spec(1, 3)).masks(), [0, 1, 2, 4]);
        assert_eq!(spec(2, 3).k(), 7);
        assert_eq!(build_basis(&spec(2, 3)).masks(), [0, 1, 2, 4, 3, 5, 6]);
        assert_eq!(build_basis(&spec(0, 5)).masks(), [0]);
        assert!(matches!(RmCodeSpec::new(4, 3), Err(Error::Order { r: 4, n: 3, .. })));
    }

    #[test]
    fn basis_sizes_and_weights() {
        for n in 1..=8 {
            for r in 0..=n {
                let b = build_basis(&spec(r, n));
                assert_eq!(b.masks().len() as u64, code_dimension(n, r));
                let mut sorted = b.masks().to_vec();
                sorted.dedup();
                assert_eq!(sorted.len(), b.masks().len());
                for (m, t) in b.masks().iter().zip(b.tables()) {
                    assert_eq!(t.weight(), 1 << (n - m.count_ones()));
                }
            }
        }
    }

    #[test]
    fn encode_examples() {
        let s = spec(1, 2);
        assert_eq!(encode(&s, 0).unwrap(), TruthTable::zero(2).unwrap());
        assert_eq!(encode(&s, 1).unwrap(), TruthTable::one(2).unwrap());
        let x1_xor_x2 = encode(&s, 0b110).unwrap();
        assert_eq!(x1_xor_x2.to_hex(), "6");
        assert_eq!(x1_xor_x2.weight(), 2);
        assert!(matches!(encode(&s, 8), Err(Error::MessageRange { message: 8, k: 3 })));
    }

    #[test]
    fn contains_examples() {
        assert!(spec(0, 3).contains(&TruthTable::zero(3).unwrap()).unwrap());
        assert!(!spec(2, 3).contains(&TruthTable::monomial(3, 7).unwrap()).unwrap());
        let x1c = TruthTable::coordinate(4, 1).unwrap().complement();
        assert!(spec(1, 4).contains(&x1c).unwrap());
        assert!(spec(1, 4).contains(&TruthTable::zero(3).unwrap()).is_err());
    }

    #[test]
    fn gray_examples() {
        let mut visits = Vec::new();
        enumerate_gray(&spec(0, 2), |s| visits.push(s)).unwrap();
        assert_eq!(visits.len(), 2);
        assert_eq!((visits[0].message, visits[0].toggled), (0, None));
        assert_eq!((visits[1].message, visits[1].toggled), (1, Some(0)));

        let mut count = 0;
        let mut toggles = 0;
        enumerate_gray(&spec(1, 2), |s| {
            count += 1;
            toggles += s.toggled.is_some() as u32;
        })
        .unwrap();
        assert_eq!((count, toggles), (8, 7));

        let mut count = 0u64;
        enumerate_gray(&spec(2, 4), |_| count += 1).unwrap();
        assert_eq!(count, 2048);

        assert!(matches!(
            enumerate_gray_capped(&spec(2, 4), 10, |_| {}),
            Err(Error::EnumerationCap { k: 11, max: 10 })
        ));
    }

    #[test]
    fn gray_deltas_rebuild_codewords() {
        for (r, n) in [(1, 5), (2, 4), (2, 5), (3, 5), (1, 8)] {
            let s = spec(r, n);
            let b = build_basis(&s);
            let mut cur = TruthTable::zero(n).unwrap();
            let mut seen = vec![false; 1 << s.k()];
            enumerate_gray(&s, |step| {
                if let Some(j) = step.toggled {
                    cur.xor_assign_unchecked(&b.tables()[j]);
                }
                assert_eq!(step.message, gray(step.rank));
                assert!(!seen[step.message as usize]);
                seen[step.message as usize] = true;
                assert_eq!(cur, b.encode(step.message).unwrap());
            })
            .unwrap();
            assert!(seen.iter().all(|&v| v));
        }
    }

    #[test]
    fn scanner_matches_direct_distances() {
        for (r, n, seed) in [(1, 3, 1), (2, 5, 2), (1, 7, 3), (1, 9, 4), (0, 4, 5), (3, 4, 6)] {
            let s = spec(r, n);
            let b = build_basis(&s);
            let f = sample_uniform(&SeedSpec::new(99, seed), n).unwrap();
            let scanner = PairScanner::new(&b);
            let len = 1u64 << n;
            for parts in [0, 2] {
                let mut seen = 0u64;
                for block in pair_blocks(&s, parts) {
                    scanner.scan(&f, block, |j, d| {
                        let even = b.encode(gray(2 * j)).unwrap();
                        let odd = b.encode(gray(2 * j + 1)).unwrap();
                        assert_eq!(f.distance(&even).unwrap(), d);
                        assert_eq!(f.distance(&odd).unwrap(), len - d);
                        seen += 1;
                    });
                }
                assert_eq!(seen, 1 << (s.k() - 1));
            }
        }
    }

    #[test]
    fn census_examples() {
        let c = weight_census(&spec(1, 3)).unwrap();
        assert_eq!(c.entries().clone(), BTreeMap::from([(0, 1), (4, 14), (8, 1)]));
        let c = weight_census(&spec(0, 4)).unwrap();
        assert_eq!(c.entries().clone(), BTreeMap::from([(0, 1), (16, 1)]));
        let c = weight_census(&spec(2, 4)).unwrap();
        assert_eq!(c.total(), 2048);
        assert!(c.is_symmetric());
        assert_eq!(c.entries().clone(), census_by_encoding(&spec(2, 4)));
    }

    #[test]
    fn census_parallel_equals_serial() {
        let s = spec(2, 6);
        assert_eq!(weight_census(&s).unwrap(), weight_census_par(&s, 4).unwrap());
    }

    #[test]
    fn census_matches_per_codeword_weights() {
        for (r, n) in [(1, 6), (2, 5), (2, 4), (3, 4), (1, 10), (0, 7)] {
            let s = spec(r, n);
            assert_eq!(
                weight_census(&s).unwrap().entries().clone(),
                census_by_encoding(&s),
                "RM({r},{n})"
            );
        }
    }

    #[test]
    fn query_a_examples() {
        let c = weight_census(&spec(1, 3)).unwrap();
        assert_eq!(c.query_a(Ratio::new(1, 4)).unwrap(), 1);
        assert_eq!(c.query_a(Ratio::new(1, 1)).unwrap(), 16);
        assert_eq!(c.query_a(Ratio::new(1, 3)).unwrap(), 1);
        assert_eq!(c.query_a(Ratio::new(1, 2)).unwrap(), 15);
        assert!(c.query_a(Ratio::new(3, 2)).is_err());
    }

    #[test]
    fn count_b_examples() {
        assert_eq!(weight_census(&spec(1, 3)).unwrap().count_b(), 2);
        for n in 1..6 {
            assert_eq!(weight_census(&spec(0, n)).unwrap().count_b(), 2);
        }
    }

    #[test]
    fn count_b_dual_path() {
        let s = spec(2, 4);
        let c = weight_census(&s).unwrap();
        // Direct filter over codewords.
        let b = build_basis(&s);
        let direct = (0..1u64 << s.k())
            .filter(|&m| {
                let w = b.encode(m).unwrap().weight() as i64;
                (w - 8).abs() * 6 >= 8
            })
            .count() as u64;
        assert_eq!(c.count_b(), direct);
        // Bijection route: weights at or below 2^(n-1) - tau mirror those at
        // or above 2^(n-1) + tau, and A uses an inclusive threshold.
        assert_eq!(c.count_b(), 2 * c.query_a(Ratio::new(5, 12)).unwrap());
        assert_eq!(c.boundary_count(), 0);
    }

    #[test]
    fn separated_set_examples() {
        let s = greedy_separated_set(&spec(1, 4), 0.5).unwrap();
        assert_eq!(s.len(), 16);
        assert!(s.len() as f64 >= s.target_size());
        assert_eq!(s.tau(), Ratio::new(2, 1));
        assert!(s.audit());

        let s = greedy_separated_set(&spec(0, 3), 0.5).unwrap();
        assert_eq!(s.len(), 2);
        assert!(s.audit());

        assert!(greedy_separated_set(&spec(1, 4), 1.0).is_err());
        assert!(greedy_separated_set(&spec(1, 4), 0.0).is_err());
    }

    #[test]
    fn separated_set_audit_rm25() {
        let s = greedy_separated_set(&spec(2, 5), 0.5).unwrap();
        assert!(s.audit());
        assert!(s.len() > 1);
    }

    #[test]
    fn message_hex_width() {
        assert_eq!(message_hex(0x1f, 5), "1f");
        assert_eq!(message_hex(3, 3), "3");
        assert_eq!(message_hex(0, 29), "00000000");
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(7, 2), 21);
        assert_eq!(binomial(31, 15), 300540195);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(code_dimension(7, 2), 29);
    }
}
