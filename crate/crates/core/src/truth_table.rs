//! Bit-packed truth tables and the transforms defined on them.
//!
//! Index convention: bit `i` of a table is `f(x)` where `x_j` is bit `j - 1`
//! of `i`, so `x1` is the least significant index bit. The same convention
//! is used for ANF monomial masks and Walsh spectrum masks.

use std::fmt;
use std::io::{Read, Write};

use crate::error::{Error, Result};

/// Largest variable count accepted for a truth table.
pub const MAX_TABLE_VARS: u32 = 31;
/// Default largest variable count for a full Walsh spectrum (2^27 `i32`s).
pub const MAX_SPECTRUM_VARS: u32 = 27;

/// Magic prefix of the binary table file format.
pub const TABLE_FILE_MAGIC: &[u8; 8] = b"BFTT0001";

// Bits of a word whose in-word index has bit j clear, for j = 0..6.
const LOW_HALF: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0F0F_0F0F_0F0F_0F0F,
    0x00FF_00FF_00FF_00FF,
    0x0000_FFFF_0000_FFFF,
    0x0000_0000_FFFF_FFFF,
];

pub(crate) fn word_count(n: u32) -> usize {
    if n <= 6 {
        1
    } else {
        1usize << (n - 6)
    }
}

pub(crate) fn tail_mask(n: u32) -> u64 {
    if n >= 6 {
        u64::MAX
    } else {
        (1u64 << (1u32 << n)) - 1
    }
}

fn check_vars(n: u32) -> Result<()> {
    if (1..=MAX_TABLE_VARS).contains(&n) {
        Ok(())
    } else {
        Err(Error::VariableCount { n, max: MAX_TABLE_VARS })
    }
}

/// A Boolean function on `n` variables stored as its 2^n-bit truth table.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    n: u32,
    words: Vec<u64>,
}

impl TruthTable {
    pub fn zero(n: u32) -> Result<Self> {
        check_vars(n)?;
        Ok(TruthTable {
            n,
            words: vec![0; word_count(n)],
        })
    }

    pub fn one(n: u32) -> Result<Self> {
        let mut t = Self::zero(n)?;
        t.words.fill(u64::MAX);
        t.clear_tail();
        Ok(t)
    }

    /// Builds a table by evaluating `f` at every index.
    pub fn from_fn(n: u32, mut f: impl FnMut(u64) -> bool) -> Result<Self> {
        let mut t = Self::zero(n)?;
        for i in 0..t.len() {
            if f(i) {
                t.words[(i >> 6) as usize] |= 1 << (i & 63);
            }
        }
        Ok(t)
    }

    /// Wraps raw words, rejecting a wrong word count or set bits past 2^n.
    pub fn from_words(n: u32, words: Vec<u64>) -> Result<Self> {
        check_vars(n)?;
        if words.len() != word_count(n) {
            return Err(Error::Format(format!(
                "expected {} words for n={n}, got {}",
                word_count(n),
                words.len()
            )));
        }
        if words[0] & !tail_mask(n) != 0 {
            return Err(Error::TrailingBits { n });
        }
        Ok(TruthTable { n, words })
    }

    pub(crate) fn from_words_unchecked(n: u32, words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), word_count(n));
        TruthTable { n, words }
    }

    /// The monomial `prod x_j` over the variables selected by `mask`.
    pub fn monomial(n: u32, mask: u32) -> Result<Self> {
        check_vars(n)?;
        if n < 32 && (mask as u64) >> n != 0 {
            return Err(Error::param("mask", mask, "selects a variable beyond n"));
        }
        let low = (mask & 63) as u64;
        let high = (mask >> 6) as usize;
        // Pattern inside one word: bits b with b & low == low.
        let mut pattern = 0u64;
        for b in 0..64u64 {
            if b & low == low {
                pattern |= 1 << b;
            }
        }
        let mut words = vec![0u64; word_count(n)];
        for (w, word) in words.iter_mut().enumerate() {
            if w & high == high {
                *word = pattern;
            }
        }
        words[0] &= tail_mask(n);
        Ok(TruthTable { n, words })
    }

    /// The coordinate function `x_j`, 1-based.
    pub fn coordinate(n: u32, j: u32) -> Result<Self> {
        if j == 0 || j > n {
            return Err(Error::param("j", j, "coordinate index must be in 1..=n"));
        }
        Self::monomial(n, 1 << (j - 1))
    }

    /// The linear function `<a, x>`.
    pub fn linear(n: u32, a: u64) -> Result<Self> {
        Self::from_fn(n, |i| (a & i).count_ones() & 1 == 1)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Number of entries, 2^n.
    pub fn len(&self) -> u64 {
        1u64 << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn get(&self, i: u64) -> bool {
        assert!(i < self.len(), "index {i} out of range for n={}", self.n);
        self.words[(i >> 6) as usize] >> (i & 63) & 1 == 1
    }

    pub fn set(&mut self, i: u64, value: bool) {
        assert!(i < self.len(), "index {i} out of range for n={}", self.n);
        let w = &mut self.words[(i >> 6) as usize];
        if value {
            *w |= 1 << (i & 63);
        } else {
            *w &= !(1 << (i & 63));
        }
    }

    fn clear_tail(&mut self) {
        self.words[0] &= tail_mask(self.n);
    }

    fn check_same(&self, other: &TruthTable) -> Result<()> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            })
        }
    }

    pub fn complement(&self) -> TruthTable {
        let mut t = TruthTable {
            n: self.n,
            words: self.words.iter().map(|w| !w).collect(),
        };
        t.clear_tail();
        t
    }

    pub fn xor(&self, other: &TruthTable) -> Result<TruthTable> {
        self.check_same(other)?;
        Ok(TruthTable {
            n: self.n,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a ^ b).collect(),
        })
    }

    pub(crate) fn xor_assign_unchecked(&mut self, other: &TruthTable) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Number of ones.
    pub fn weight(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn distance(&self, other: &TruthTable) -> Result<u64> {
        self.check_same(other)?;
        Ok(self.distance_unchecked(other))
    }

    pub(crate) fn distance_unchecked(&self, other: &TruthTable) -> u64 {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as u64)
            .sum()
    }

    /// `<(-1)^g, (-1)^h> = 2^n - 2 d(g, h)`.
    pub fn scalar_product_signs(&self, other: &TruthTable) -> Result<i64> {
        let d = self.distance(other)?;
        Ok(self.len() as i64 - 2 * d as i64)
    }

    /// Correlation `Y = sum_x (-1)^(f(x) + g(x))` of `self` with `g`.
    pub fn correlation_y(&self, g: &TruthTable) -> Result<i64> {
        self.scalar_product_signs(g)
    }

    /// Canonical hex form: ceil(2^n / 4) digits, most significant first.
    pub fn to_hex(&self) -> String {
        let digits = hex_digits(self.n);
        let mut s = String::with_capacity(digits);
        for p in (0..digits).rev() {
            let word = self.words[p / 16];
            let nibble = (word >> ((p % 16) * 4)) & 0xF;
            s.push(char::from_digit(nibble as u32, 16).unwrap());
        }
        s
    }

    pub fn parse_hex(text: &str, n: u32) -> Result<Self> {
        check_vars(n)?;
        let expected = hex_digits(n);
        let text = text.trim();
        let got = text.chars().count();
        if got != expected {
            return Err(Error::HexLength { n, expected, got });
        }
        let mut words = vec![0u64; word_count(n)];
        for (p, c) in text.chars().rev().enumerate() {
            let d = c.to_digit(16).ok_or(Error::HexDigit(c))? as u64;
            words[p / 16] |= d << ((p % 16) * 4);
        }
        if words[0] & !tail_mask(n) != 0 {
            return Err(Error::TrailingBits { n });
        }
        Ok(TruthTable { n, words })
    }

    /// Writes the binary table format: magic, one byte `n`, then the bits
    /// LSB-first in ceil(2^n / 8) bytes.
    pub fn write_binary<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(TABLE_FILE_MAGIC)?;
        out.write_all(&[self.n as u8])?;
        let nbytes = byte_count(self.n);
        let mut bytes = Vec::with_capacity(nbytes);
        for w in &self.words {
            bytes.extend_from_slice(&w.to_le_bytes());
        }
        bytes.truncate(nbytes);
        out.write_all(&bytes)?;
        Ok(())
    }

    pub fn read_binary<R: Read>(mut input: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        input.read_exact(&mut magic)?;
        if &magic != TABLE_FILE_MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let mut nb = [0u8; 1];
        input.read_exact(&mut nb)?;
        let n = nb[0] as u32;
        check_vars(n)?;
        let mut bytes = vec![0u8; byte_count(n)];
        input.read_exact(&mut bytes)?;
        let mut rest = Vec::new();
        input.read_to_end(&mut rest)?;
        if !rest.is_empty() {
            return Err(Error::Format(format!("{} trailing bytes", rest.len())));
        }
        let mut words = vec![0u64; word_count(n)];
        for (i, b) in bytes.iter().enumerate() {
            words[i / 8] |= (*b as u64) << ((i % 8) * 8);
        }
        if words[0] & !tail_mask(n) != 0 {
            return Err(Error::TrailingBits { n });
        }
        Ok(TruthTable { n, words })
    }

    /// Binary Möbius transform: truth table to ANF coefficients.
    pub fn mobius_transform(&self) -> AnfCoefficients {
        AnfCoefficients {
            bits: mobius_words(self),
        }
    }

    /// Algebraic degree; -1 for the zero function.
    pub fn degree(&self) -> i32 {
        self.mobius_transform().degree()
    }

    pub fn walsh_hadamard(&self) -> Result<WalshSpectrum> {
        self.walsh_hadamard_capped(MAX_SPECTRUM_VARS)
    }

    /// Full Walsh spectrum with an explicit variable cap.
    pub fn walsh_hadamard_capped(&self, max_n: u32) -> Result<WalshSpectrum> {
        if self.n > max_n {
            return Err(Error::SpectrumCap { n: self.n, max: max_n });
        }
        let len = self.len() as usize;
        let mut v: Vec<i32> = Vec::with_capacity(len);
        for i in 0..len {
            let bit = self.words[i >> 6] >> (i & 63) & 1;
            v.push(1 - 2 * bit as i32);
        }
        let mut h = 1;
        while h < len {
            for chunk in v.chunks_exact_mut(2 * h) {
                let (lo, hi) = chunk.split_at_mut(h);
                for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                    let (x, y) = (*a, *b);
                    *a = x + y;
                    *b = x - y;
                }
            }
            h *= 2;
        }
        Ok(WalshSpectrum { n: self.n, values: v })
    }
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n <= 8 {
            write!(f, "TruthTable(n={}, {})", self.n, self.to_hex())
        } else {
            write!(f, "TruthTable(n={}, weight={})", self.n, self.weight())
        }
    }
}

impl fmt::Display for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

fn hex_digits(n: u32) -> usize {
    (1usize << n).div_ceil(4)
}

fn byte_count(n: u32) -> usize {
    (1usize << n).div_ceil(8)
}

fn mobius_words(t: &TruthTable) -> TruthTable {
    let mut words = t.words.clone();
    for (j, mask) in LOW_HALF.iter().enumerate().take(t.n.min(6) as usize) {
        let shift = 1u32 << j;
        for w in words.iter_mut() {
            *w ^= (*w & mask) << shift;
        }
    }
    let mut stride = 1;
    while stride < words.len() {
        for chunk in words.chunks_exact_mut(2 * stride) {
            let (lo, hi) = chunk.split_at_mut(stride);
            for (a, b) in lo.iter().zip(hi.iter_mut()) {
                *b ^= a;
            }
        }
        stride *= 2;
    }
    TruthTable { n: t.n, words }
}

/// ANF coefficient vector: bit at mask `m` is the coefficient of the
/// monomial selected by `m`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct AnfCoefficients {
    bits: TruthTable,
}

impl AnfCoefficients {
    pub fn n(&self) -> u32 {
        self.bits.n
    }

    pub fn coefficient(&self, mask: u64) -> bool {
        self.bits.get(mask)
    }

    /// Masks of the monomials with a nonzero coefficient, ascending.
    pub fn monomials(&self) -> impl Iterator<Item = u64> + '_ {
        self.bits.words.iter().enumerate().flat_map(|(w, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as u64;
                rest &= rest - 1;
                Some(((w as u64) << 6) | b)
            })
        })
    }

    /// Max popcount over set masks, -1 when every coefficient is zero.
    pub fn degree(&self) -> i32 {
        self.monomials().map(|m| m.count_ones() as i32).max().unwrap_or(-1)
    }

    /// The coefficients as a packed bit table (same layout as a truth table).
    pub fn as_bits(&self) -> &TruthTable {
        &self.bits
    }

    /// Inverse transform; the Möbius transform is an involution.
    pub fn to_truth_table(&self) -> TruthTable {
        mobius_words(&self.bits)
    }
}

/// Walsh–Hadamard spectrum `W_f(a) = sum_x (-1)^(f(x) + <a, x>)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WalshSpectrum {
    n: u32,
    values: Vec<i32>,
}

impl WalshSpectrum {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn values(&self) -> &[i32] {
        &self.values
    }

    /// Mask and value of the first entry of maximal absolute value.
    pub fn max_abs(&self) -> (u64, i32) {
        let mut best = (0u64, self.values[0]);
        for (a, &v) in self.values.iter().enumerate() {
            if v.unsigned_abs() > best.1.unsigned_abs() {
                best = (a as u64, v);
            }
        }
        best
    }

    /// Sum of squares; 4^n for every Boolean function.
    pub fn parseval_sum(&self) -> u128 {
        self.values.iter().map(|&v| (v as i128 * v as i128) as u128).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_mobius(t: &TruthTable) -> Vec<bool> {
        (0..t.len())
            .map(|m| {
                (0..t.len())
                    .filter(|&i| i & m == i)
                    .fold(false, |acc, i| acc ^ t.get(i))
            })
            .collect()
    }

    #[test]
    fn hex_examples() {
        let t = TruthTable::parse_hex("8", 2).unwrap();
        assert_eq!(
            (0..4).map(|i| t.get(i)).collect::<Vec<_>>(),
            [false, false, false, true]
        );
        assert_eq!(TruthTable::parse_hex("F", 2).unwrap(), TruthTable::one(2).unwrap());
        let x1 = TruthTable::parse_hex("A", 2).unwrap();
        assert_eq!(x1, TruthTable::coordinate(2, 1).unwrap());
        assert!(x1.get(1) && x1.get(3) && !x1.get(0) && !x1.get(2));
    }

    #[test]
    fn hex_errors() {
        assert!(matches!(TruthTable::parse_hex("g", 2), Err(Error::HexDigit('g'))));
        assert!(matches!(
            TruthTable::parse_hex("88", 2),
            Err(Error::HexLength {
                expected: 1,
                got: 2,
                ..
            })
        ));
        assert!(matches!(
            TruthTable::parse_hex("8", 0),
            Err(Error::VariableCount { .. })
        ));
        assert!(matches!(
            TruthTable::parse_hex("8", 32),
            Err(Error::VariableCount { .. })
        ));
        // n = 1 has two bits; digit 4 sets index 2.
        assert!(matches!(
            TruthTable::parse_hex("4", 1),
            Err(Error::TrailingBits { n: 1 })
        ));
        assert_eq!(TruthTable::parse_hex("2", 1).unwrap().weight(), 1);
    }

    #[test]
    fn hex_round_trip_wide() {
        let s = "0123456789abcdeffedcba98765432100f1e2d3c4b5a69788796a5b4c3d2e1f0";
        let t = TruthTable::parse_hex(s, 8).unwrap();
        assert_eq!(t.to_hex(), s);
        assert_eq!(TruthTable::parse_hex(&s.to_uppercase(), 8).unwrap(), t);
    }

    #[test]
    fn weight_and_distance() {
        assert_eq!(TruthTable::zero(3).unwrap().weight(), 0);
        assert_eq!(TruthTable::one(3).unwrap().weight(), 8);
        let and = TruthTable::parse_hex("8", 2).unwrap();
        assert_eq!(and.weight(), 1);
        assert_eq!(and.distance(&and).unwrap(), 0);
        assert_eq!(and.distance(&and.complement()).unwrap(), 4);
        assert_eq!(and.distance(&TruthTable::zero(2).unwrap()).unwrap(), 1);
        assert!(matches!(
            and.distance(&TruthTable::zero(3).unwrap()),
            Err(Error::DimensionMismatch { left: 2, right: 3 })
        ));
    }

    #[test]
    fn signed_products() {
        let g = TruthTable::parse_hex("6", 2).unwrap();
        assert_eq!(g.scalar_product_signs(&g).unwrap(), 4);
        assert_eq!(g.scalar_product_signs(&g.complement()).unwrap(), -4);
        let x1 = TruthTable::coordinate(2, 1).unwrap();
        let x2 = TruthTable::coordinate(2, 2).unwrap();
        assert_eq!(x1.scalar_product_signs(&x2).unwrap(), 0);
        let and = TruthTable::parse_hex("8", 2).unwrap();
        assert_eq!(and.correlation_y(&TruthTable::zero(2).unwrap()).unwrap(), 2);
        assert_eq!(and.correlation_y(&and.complement()).unwrap(), -4);
    }

    #[test]
    fn mobius_examples() {
        let and = TruthTable::parse_hex("8", 2).unwrap();
        assert_eq!(and.mobius_transform().monomials().collect::<Vec<_>>(), [3]);
        assert_eq!(
            TruthTable::one(2)
                .unwrap()
                .mobius_transform()
                .monomials()
                .collect::<Vec<_>>(),
            [0]
        );
        let x1 = TruthTable::parse_hex("A", 2).unwrap();
        assert_eq!(x1.mobius_transform().monomials().collect::<Vec<_>>(), [1]);
    }

    #[test]
    fn mobius_matches_subset_sum_across_word_boundary() {
        let t = TruthTable::from_fn(8, |i| (i * 2654435761) >> 7 & 1 == 1).unwrap();
        let fast = t.mobius_transform();
        let slow = naive_mobius(&t);
        for m in 0..t.len() {
            assert_eq!(fast.coefficient(m), slow[m as usize], "mask {m}");
        }
    }

    #[test]
    fn degree_examples() {
        assert_eq!(TruthTable::parse_hex("8", 2).unwrap().degree(), 2);
        assert_eq!(TruthTable::one(4).unwrap().degree(), 0);
        assert_eq!(TruthTable::zero(4).unwrap().degree(), -1);
        assert_eq!(TruthTable::monomial(9, 0b1_0100_0011).unwrap().degree(), 4);
    }

    #[test]
    fn monomial_weight() {
        for n in 1..=9 {
            for mask in 0..(1u32 << n) {
                let t = TruthTable::monomial(n, mask).unwrap();
                assert_eq!(t.weight(), 1 << (n - mask.count_ones()));
            }
        }
    }

    #[test]
    fn walsh_examples() {
        let spec = |hex: &str| TruthTable::parse_hex(hex, 2).unwrap().walsh_hadamard().unwrap();
        assert_eq!(spec("0").values(), [4, 0, 0, 0]);
        assert_eq!(spec("A").values(), [0, 4, 0, 0]);
        assert_eq!(spec("8").values(), [2, 2, 2, -2]);
    }

    #[test]
    fn walsh_cap() {
        let t = TruthTable::zero(5).unwrap();
        assert!(matches!(
            t.walsh_hadamard_capped(4),
            Err(Error::SpectrumCap { n: 5, max: 4 })
        ));
    }

    #[test]
    fn binary_format() {
        let t = TruthTable::parse_hex("8ff0", 4).unwrap();
        let mut buf = Vec::new();
        t.write_binary(&mut buf).unwrap();
        assert_eq!(&buf[..8], b"BFTT0001");
        assert_eq!(buf[8], 4);
        assert_eq!(&buf[9..], [0xf0, 0x8f]);
        assert_eq!(TruthTable::read_binary(&buf[..]).unwrap(), t);

        let small = TruthTable::parse_hex("2", 1).unwrap();
        let mut buf = Vec::new();
        small.write_binary(&mut buf).unwrap();
        assert_eq!(buf.len(), 10);
        assert_eq!(TruthTable::read_binary(&buf[..]).unwrap(), small);

        buf[9] = 0x06;
        assert!(matches!(
            TruthTable::read_binary(&buf[..]),
            Err(Error::TrailingBits { n: 1 })
        ));
        buf[0] = b'X';
        assert!(matches!(TruthTable::read_binary(&buf[..]), Err(Error::Format(_))));
    }
}
