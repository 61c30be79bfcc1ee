//! Truth tables of Boolean functions with up to eight variables.
//!
//! Bit `x` of a table holds `f(b_1, ..., b_n)` where `x = (b_n ... b_1)_2`, so
//! `b_1` is the least significant bit of the assignment index. Hex strings are
//! written most significant digit first: the last digit covers assignments
//! `0..4`.

use std::fmt;
use std::ops::{BitAnd, BitOr, BitXor, Not};

use crate::error::{Error, Result};

pub const MAX_VARS: usize = 8;

/// A set of positive indices (variables or steps), stored as a bitmask.
///
/// Index `j` is bit `j`; bit 0 is never set. The empty set denotes `L_∅ = 0`.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexSet(u64);

impl IndexSet {
    pub const MAX_INDEX: usize = 63;

    pub const fn empty() -> Self {
        IndexSet(0)
    }

    pub fn singleton(index: usize) -> Self {
        let mut s = IndexSet::empty();
        s.insert(index);
        s
    }

    /// Builds a set from raw bits; bit 0 is cleared.
    pub const fn from_bits(bits: u64) -> Self {
        IndexSet(bits & !1)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    /// All indices `1..=n`.
    pub fn range(n: usize) -> Self {
        assert!(n <= Self::MAX_INDEX);
        IndexSet(((1u128 << (n + 1)) - 2) as u64)
    }

    pub fn insert(&mut self, index: usize) {
        assert!(
            (1..=Self::MAX_INDEX).contains(&index),
            "index {index} outside 1..=63"
        );
        self.0 |= 1 << index;
    }

    pub fn remove(&mut self, index: usize) {
        if index <= Self::MAX_INDEX {
            self.0 &= !(1u64 << index);
        }
    }

    pub fn toggle(&mut self, index: usize) {
        assert!((1..=Self::MAX_INDEX).contains(&index));
        self.0 ^= 1 << index;
    }

    pub fn contains(self, index: usize) -> bool {
        index <= Self::MAX_INDEX && self.0 >> index & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn max(self) -> Option<usize> {
        (self.0 != 0).then(|| 63 - self.0.leading_zeros() as usize)
    }

    pub fn min(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn union(self, other: Self) -> Self {
        IndexSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        IndexSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        IndexSet(self.0 & !other.0)
    }

    pub fn symmetric_difference(self, other: Self) -> Self {
        IndexSet(self.0 ^ other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }
}

impl FromIterator<usize> for IndexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = IndexSet::empty();
        for i in iter {
            s.insert(i);
        }
        s
    }
}

impl<const N: usize> From<[usize; N]> for IndexSet {
    fn from(items: [usize; N]) -> Self {
        items.into_iter().collect()
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("}")
    }
}

/// Evaluates `L_S` on an assignment where `assignment[0]` is `x_1`.
pub fn eval_linear(set: IndexSet, assignment: &[bool]) -> Result<bool> {
    set.iter().try_fold(false, |acc, i| {
        assignment
            .get(i - 1)
            .map(|&b| acc ^ b)
            .ok_or(Error::IndexOutOfRange {
                index: i,
                limit: assignment.len(),
            })
    })
}

/// Evaluates the quadratic form `Q_ST = L_S ∧ L_T` for disjoint `S`, `T`.
pub fn eval_quadratic(s: IndexSet, t: IndexSet, assignment: &[bool]) -> Result<bool> {
    if !s.is_disjoint(t) {
        return Err(Error::Overlap(s.to_string(), t.to_string()));
    }
    Ok(eval_linear(s, assignment)? & eval_linear(t, assignment)?)
}

/// Truth table of an `n`-variable Boolean function, `1 <= n <= 8`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TruthTable {
    num_vars: u8,
    words: [u64; 4],
}

impl TruthTable {
    /// The constant-0 function over `num_vars` variables.
    pub fn zero(num_vars: usize) -> Result<Self> {
        if !(1..=MAX_VARS).contains(&num_vars) {
            return Err(Error::VariableCount(num_vars));
        }
        Ok(TruthTable {
            num_vars: num_vars as u8,
            words: [0; 4],
        })
    }

    pub fn from_fn(num_vars: usize, mut f: impl FnMut(u32) -> bool) -> Result<Self> {
        let mut t = Self::zero(num_vars)?;
        for x in 0..t.len() as u32 {
            t.set(x, f(x));
        }
        Ok(t)
    }

    /// The projection `x_i` (1-based).
    pub fn projection(num_vars: usize, i: usize) -> Result<Self> {
        if i == 0 || i > num_vars {
            return Err(Error::IndexOutOfRange {
                index: i,
                limit: num_vars,
            });
        }
        Self::from_fn(num_vars, |x| x >> (i - 1) & 1 == 1)
    }

    /// The table of `L_S` for `S ⊆ [num_vars]`.
    pub fn linear(num_vars: usize, set: IndexSet) -> Result<Self> {
        if let Some(m) = set.max() {
            if m > num_vars {
                return Err(Error::IndexOutOfRange {
                    index: m,
                    limit: num_vars,
                });
            }
        }
        let mask = set.bits() >> 1;
        Self::from_fn(num_vars, |x| (x as u64 & mask).count_ones() & 1 == 1)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars as usize
    }

    /// Number of assignments, `2^n`.
    pub fn len(&self) -> usize {
        1 << self.num_vars
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn bit(&self, x: u32) -> bool {
        debug_assert!((x as usize) < self.len());
        self.words[(x >> 6) as usize] >> (x & 63) & 1 == 1
    }

    pub fn set(&mut self, x: u32, value: bool) {
        debug_assert!((x as usize) < self.len());
        let w = &mut self.words[(x >> 6) as usize];
        if value {
            *w |= 1 << (x & 63);
        } else {
            *w &= !(1 << (x & 63));
        }
    }

    fn word_mask(&self, w: usize) -> u64 {
        let len = self.len();
        if w * 64 >= len {
            0
        } else if len - w * 64 >= 64 {
            u64::MAX
        } else {
            (1u64 << (len - w * 64)) - 1
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Parses a hex truth table. For `n >= 2` exactly `2^n / 4` digits are
    /// required; for `n = 1` a single digit whose high bits are zero.
    pub fn from_hex(hex: &str, num_vars: usize) -> Result<Self> {
        let mut t = Self::zero(num_vars)?;
        let digits = hex
            .strip_prefix("0x")
            .or_else(|| hex.strip_prefix("0X"))
            .unwrap_or(hex);
        let expected = Self::hex_digits(num_vars);
        let found = digits.chars().count();
        if found != expected {
            return Err(Error::HexLength {
                expected,
                found,
                num_vars,
            });
        }
        for (k, c) in digits.chars().rev().enumerate() {
            let v = c.to_digit(16).ok_or(Error::HexDigit(c))?;
            for b in 0..4 {
                if v >> b & 1 == 1 {
                    let x = 4 * k + b;
                    if x >= t.len() {
                        return Err(Error::HexOverflow(num_vars));
                    }
                    t.set(x as u32, true);
                }
            }
        }
        Ok(t)
    }

    /// Number of hex digits used for `num_vars` variables.
    pub fn hex_digits(num_vars: usize) -> usize {
        ((1usize << num_vars) / 4).max(1)
    }

    /// Infers the variable count from a digit count, if unambiguous (`n >= 2`).
    pub fn vars_for_digits(digits: usize) -> Option<usize> {
        (2..=MAX_VARS).find(|&n| Self::hex_digits(n) == digits)
    }

    pub fn to_hex(&self) -> String {
        let digits = Self::hex_digits(self.num_vars());
        (0..digits)
            .rev()
            .map(|k| {
                let v = (0..4).fold(0u32, |acc, b| {
                    let x = 4 * k + b;
                    if x < self.len() && self.bit(x as u32) {
                        acc | 1 << b
                    } else {
                        acc
                    }
                });
                char::from_digit(v, 16).unwrap()
            })
            .collect()
    }

    pub fn is_normal(&self) -> bool {
        !self.bit(0)
    }

    /// Returns the normal representative and whether it was complemented.
    pub fn normalize(&self) -> (TruthTable, bool) {
        if self.is_normal() {
            (*self, false)
        } else {
            (!*self, true)
        }
    }

    /// ANF coefficients via the in-place Möbius (butterfly) transform: bit `m`
    /// of the result is the coefficient of the monomial whose variables are
    /// the set bits of `m`.
    pub fn mobius(&self) -> TruthTable {
        let mut t = *self;
        let len = self.len() as u32;
        for i in 0..self.num_vars() {
            let step = 1u32 << i;
            for x in 0..len {
                if x & step != 0 && t.bit(x ^ step) {
                    let v = t.bit(x);
                    t.set(x, !v);
                }
            }
        }
        t
    }

    /// Algebraic degree; the constant-0 function has degree 0.
    pub fn anf_degree(&self) -> usize {
        let anf = self.mobius();
        (0..self.len() as u32)
            .filter(|&m| anf.bit(m))
            .map(|m| m.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    /// `f(x)` restricted by fixing `x_i = value` (result still has `n` vars).
    pub fn cofactor(&self, i: usize, value: bool) -> TruthTable {
        let bit = 1u32 << (i - 1);
        let mut t = *self;
        for x in 0..self.len() as u32 {
            let y = if value { x | bit } else { x & !bit };
            t.set(x, self.bit(y));
        }
        t
    }

    /// Indices `i` with `f|x_i=0 != f|x_i=1`.
    pub fn essential_variables(&self) -> Vec<usize> {
        (1..=self.num_vars())
            .filter(|&i| self.cofactor(i, false) != self.cofactor(i, true))
            .collect()
    }

    pub fn swap_variables(&self, j: usize, k: usize) -> TruthTable {
        let (bj, bk) = (j - 1, k - 1);
        let mut t = *self;
        for x in 0..self.len() as u32 {
            let (vj, vk) = (x >> bj & 1, x >> bk & 1);
            let y = (x & !(1 << bj) & !(1 << bk)) | vj << bk | vk << bj;
            t.set(x, self.bit(y));
        }
        t
    }

    /// All pairs `j < k` such that exchanging `x_j` and `x_k` leaves `f` unchanged.
    pub fn symmetric_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.num_vars();
        let mut pairs = Vec::new();
        for j in 1..=n {
            for k in j + 1..=n {
                if self.swap_variables(j, k) == *self {
                    pairs.push((j, k));
                }
            }
        }
        pairs
    }

    /// The same function viewed over `num_vars >= self.num_vars()` variables.
    pub fn extend(&self, num_vars: usize) -> Result<TruthTable> {
        if num_vars < self.num_vars() {
            return Err(Error::VariableCount(num_vars));
        }
        let mask = self.len() as u32 - 1;
        Self::from_fn(num_vars, |x| self.bit(x & mask))
    }

    /// Smallest assignment where the two tables differ.
    pub fn first_difference(&self, other: &TruthTable) -> Option<u32> {
        (0..self.len() as u32).find(|&x| self.bit(x) != other.bit(x))
    }

    fn zip_with(self, rhs: TruthTable, op: impl Fn(u64, u64) -> u64) -> TruthTable {
        assert_eq!(self.num_vars, rhs.num_vars, "variable count mismatch");
        let mut out = self;
        for w in 0..4 {
            out.words[w] = op(self.words[w], rhs.words[w]) & self.word_mask(w);
        }
        out
    }
}

impl Not for TruthTable {
    type Output = TruthTable;

    fn not(self) -> TruthTable {
        let mut out = self;
        for w in 0..4 {
            out.words[w] = !self.words[w] & self.word_mask(w);
        }
        out
    }
}

impl BitAnd for TruthTable {
    type Output = TruthTable;

    fn bitand(self, rhs: TruthTable) -> TruthTable {
        self.zip_with(rhs, |a, b| a & b)
    }
}

impl BitOr for TruthTable {
    type Output = TruthTable;

    fn bitor(self, rhs: TruthTable) -> TruthTable {
        self.zip_with(rhs, |a, b| a | b)
    }
}

impl BitXor for TruthTable {
    type Output = TruthTable;

    fn bitxor(self, rhs: TruthTable) -> TruthTable {
        self.zip_with(rhs, |a, b| a ^ b)
    }
}

impl fmt::Display for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruthTable({}, {})", self.num_vars, self.to_hex())
    }
}
