//! Truth tables, partial assignments, projections and essentiality.
//!
//! A Boolean function of `n` variables is stored as a packed bit vector of
//! length `2^n`: position `v` holds `f(v)` where `v` is read as an `n`-bit
//! input with bit `i` carrying the value of variable `x_{i+1}`. Variable
//! `x1` therefore toggles fastest in index order.
//!
//! Text format: a line `n=<k>` followed by `2^k` characters `0`/`1` in index
//! order. Partial assignments are written as strings over `{0,1,*}` of length
//! `n`, position `i` giving the value of `x_{i+1}`.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Default ceiling on table arity; override with the `ROQL_ARITY_CAP`
/// environment variable. Tables take `2^n` bits, so the hard limit is 32.
pub const DEFAULT_ARITY_CAP: usize = 16;
const HARD_ARITY_LIMIT: usize = 32;

/// Maximum arity accepted when materializing truth tables.
pub fn arity_cap() -> usize {
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var("ROQL_ARITY_CAP")
            .ok()
            .and_then(|s| s.parse::<usize>().ok())
            .map(|c| c.min(HARD_ARITY_LIMIT))
            .unwrap_or(DEFAULT_ARITY_CAP)
    })
}

fn check_arity(n: usize) -> Result<()> {
    let cap = arity_cap();
    if n > cap {
        return Err(Error::ArityTooLarge { n, cap });
    }
    Ok(())
}

/// Index of a variable, 0-based; variable `x_{k}` of the surrounding text
/// formats has index `k - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarIndex(pub usize);

impl VarIndex {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VarIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0 + 1)
    }
}

/// A set of variable indices, stored as a bitmask (so arities stay below 64).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct VarSet(pub u64);

impl VarSet {
    pub const EMPTY: VarSet = VarSet(0);

    pub fn singleton(v: VarIndex) -> Self {
        VarSet(1u64 << v.0)
    }

    pub fn full(n: usize) -> Self {
        if n == 0 {
            VarSet(0)
        } else {
            VarSet(u64::MAX >> (64 - n))
        }
    }

    pub fn contains(self, v: VarIndex) -> bool {
        self.0 >> v.0 & 1 == 1
    }

    pub fn insert(&mut self, v: VarIndex) {
        self.0 |= 1 << v.0;
    }

    pub fn remove(&mut self, v: VarIndex) {
        self.0 &= !(1 << v.0);
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: VarSet) -> VarSet {
        VarSet(self.0 | other.0)
    }

    pub fn intersection(self, other: VarSet) -> VarSet {
        VarSet(self.0 & other.0)
    }

    pub fn is_subset(self, other: VarSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Ascending iteration over members.
    pub fn iter(self) -> impl Iterator<Item = VarIndex> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(VarIndex(i))
            }
        })
    }

    /// All subsets of `{x1..xn}` of size `k`, ascending by bitmask.
    pub fn subsets_of_size(n: usize, k: usize) -> Vec<VarSet> {
        let mut out = Vec::new();
        let mut pick = |mask: u64| out.push(VarSet(mask));
        fn rec(start: usize, n: usize, left: usize, acc: u64, pick: &mut impl FnMut(u64)) {
            if left == 0 {
                pick(acc);
                return;
            }
            for i in start..=n - left {
                rec(i + 1, n, left - 1, acc | (1 << i), pick);
            }
        }
        if k <= n {
            rec(0, n, k, 0, &mut pick);
            out.sort();
        }
        out
    }
}

impl FromIterator<VarIndex> for VarSet {
    fn from_iter<T: IntoIterator<Item = VarIndex>>(iter: T) -> Self {
        let mut s = VarSet::EMPTY;
        for v in iter {
            s.insert(v);
        }
        s
    }
}

impl fmt::Display for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, v) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// A total assignment to `n` variables: bit `i` is the value of `x_{i+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TotalAssignment {
    n: usize,
    bits: u64,
}

impl TotalAssignment {
    pub fn new(n: usize, bits: u64) -> Self {
        debug_assert!(n <= HARD_ARITY_LIMIT);
        let mask = if n == 0 { 0 } else { u64::MAX >> (64 - n) };
        TotalAssignment { n, bits: bits & mask }
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn get(&self, v: VarIndex) -> bool {
        debug_assert!(v.0 < self.n);
        self.bits >> v.0 & 1 == 1
    }

    pub fn with_bit(&self, v: VarIndex, value: bool) -> Self {
        let mut bits = self.bits;
        if value {
            bits |= 1 << v.0;
        } else {
            bits &= !(1 << v.0);
        }
        TotalAssignment { n: self.n, bits }
    }

    /// Indices assigned 1.
    pub fn support(&self) -> VarSet {
        VarSet(self.bits)
    }

    pub fn weight(&self) -> usize {
        self.bits.count_ones() as usize
    }
}

impl fmt::Display for TotalAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            write!(f, "{}", (self.bits >> i) & 1)?;
        }
        Ok(())
    }
}

impl FromStr for TotalAssignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut bits = 0u64;
        let mut n = 0usize;
        for ch in s.trim().chars() {
            match ch {
                '0' => {}
                '1' => bits |= 1 << n,
                _ => return Err(Error::Parse(format!("bad assignment character `{ch}`"))),
            }
            n += 1;
            if n > HARD_ARITY_LIMIT {
                return Err(Error::Parse("assignment too long".into()));
            }
        }
        Ok(TotalAssignment { n, bits })
    }
}

/// A partial assignment: a mapping from the variables to `{0, 1, *}`.
///
/// The starred variables are the complement of `fixed`; total extensions
/// range over them. The set of total extensions of `p` forms a subcube of
/// the Boolean hypercube.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PartialAssignment {
    n: usize,
    fixed: u64,
    values: u64, // subset of `fixed`
}

impl PartialAssignment {
    pub fn new(n: usize, fixed: VarSet, values: u64) -> Self {
        debug_assert!(n <= HARD_ARITY_LIMIT);
        let mask = if n == 0 { 0 } else { u64::MAX >> (64 - n) };
        let fixed = fixed.0 & mask;
        PartialAssignment { n, fixed, values: values & fixed }
    }

    /// The all-stars assignment.
    pub fn all_stars(n: usize) -> Self {
        PartialAssignment { n, fixed: 0, values: 0 }
    }

    pub fn from_total(a: &TotalAssignment) -> Self {
        PartialAssignment {
            n: a.arity(),
            fixed: if a.arity() == 0 { 0 } else { u64::MAX >> (64 - a.arity()) },
            values: a.bits(),
        }
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn fixed_vars(&self) -> VarSet {
        VarSet(self.fixed)
    }

    /// Starred variables, ascending.
    pub fn stars(&self) -> VarSet {
        VarSet(!self.fixed & if self.n == 0 { 0 } else { u64::MAX >> (64 - self.n) })
    }

    pub fn star_count(&self) -> usize {
        self.stars().len()
    }

    pub fn is_total(&self) -> bool {
        self.star_count() == 0
    }

    /// Value of a fixed variable; `None` when starred.
    pub fn value(&self, v: VarIndex) -> Option<bool> {
        debug_assert!(v.0 < self.n);
        if self.fixed >> v.0 & 1 == 1 {
            Some(self.values >> v.0 & 1 == 1)
        } else {
            None
        }
    }

    /// Fix one more variable, returning the refined assignment.
    pub fn with_fixed(&self, v: VarIndex, value: bool) -> Self {
        debug_assert!(v.0 < self.n);
        let fixed = self.fixed | 1 << v.0;
        let values = if value { self.values | 1 << v.0 } else { self.values & !(1 << v.0) };
        PartialAssignment { n: self.n, fixed, values: values & fixed }
    }

    /// Extend the assignment by a bit pattern over the stars: star bit `k`
    /// (ascending original index) takes bit `k` of `pattern`.
    pub fn extend(&self, pattern: u64) -> TotalAssignment {
        let mut bits = self.values;
        for (k, v) in self.stars().iter().enumerate() {
            if pattern >> k & 1 == 1 {
                bits |= 1 << v.0;
            }
        }
        TotalAssignment::new(self.n, bits)
    }

    /// All total extensions, ascending by star-bit pattern.
    pub fn total_extensions(&self) -> Vec<TotalAssignment> {
        let k = self.star_count();
        (0..1u64 << k).map(|pat| self.extend(pat)).collect()
    }

    /// True when `a` agrees with every fixed variable.
    pub fn is_extended_by(&self, a: &TotalAssignment) -> bool {
        a.arity() == self.n && (a.bits() ^ self.values) & self.fixed == 0
    }
}

impl fmt::Display for PartialAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            match self.value(VarIndex(i)) {
                Some(false) => write!(f, "0")?,
                Some(true) => write!(f, "1")?,
                None => write!(f, "*")?,
            }
        }
        Ok(())
    }
}

impl FromStr for PartialAssignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut fixed = 0u64;
        let mut values = 0u64;
        let mut n = 0usize;
        for ch in s.trim().chars() {
            match ch {
                '0' => fixed |= 1 << n,
                '1' => {
                    fixed |= 1 << n;
                    values |= 1 << n;
                }
                '*' => {}
                _ => return Err(Error::Parse(format!("bad assignment character `{ch}`"))),
            }
            n += 1;
            if n > HARD_ARITY_LIMIT {
                return Err(Error::Parse("assignment too long".into()));
            }
        }
        Ok(PartialAssignment { n, fixed, values })
    }
}

/// The complete value vector of a Boolean function of `n` variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TruthTable {
    n: usize,
    blocks: Vec<u64>,
}

fn block_count(n: usize) -> usize {
    if n >= 6 {
        1 << (n - 6)
    } else {
        1
    }
}

impl TruthTable {
    /// Mask for the valid bits of the last (only) block when `n < 6`.
    fn tail_mask(n: usize) -> u64 {
        if n >= 6 {
            u64::MAX
        } else {
            (1u64 << (1 << n)) - 1
        }
    }

    pub fn constant(n: usize, value: bool) -> Result<Self> {
        check_arity(n)?;
        let blocks = vec![if value { Self::tail_mask(n) } else { 0 }; block_count(n)];
        Ok(TruthTable { n, blocks })
    }

    /// Table of the projection function `x_{i+1}`.
    pub fn var(n: usize, v: VarIndex) -> Result<Self> {
        check_arity(n)?;
        if v.0 >= n {
            return Err(Error::Precondition(format!("{v} out of range for arity {n}")));
        }
        let mut t = TruthTable::constant(n, false)?;
        for idx in 0..1usize << n {
            if idx >> v.0 & 1 == 1 {
                t.set(idx as u64, true);
            }
        }
        Ok(t)
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(TotalAssignment) -> bool) -> Result<Self> {
        check_arity(n)?;
        let mut t = TruthTable::constant(n, false)?;
        for idx in 0..1u64 << n {
            if f(TotalAssignment::new(n, idx)) {
                t.set(idx, true);
            }
        }
        Ok(t)
    }

    /// Build from the low `2^n` bits of a word (`n <= 6`).
    pub fn from_bits_u64(n: usize, bits: u64) -> Result<Self> {
        check_arity(n)?;
        if n > 6 {
            return Err(Error::Precondition("from_bits_u64 supports arity <= 6".into()));
        }
        Ok(TruthTable { n, blocks: vec![bits & Self::tail_mask(n)] })
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn get(&self, idx: u64) -> bool {
        debug_assert!(idx < 1u64 << self.n);
        self.blocks[(idx >> 6) as usize] >> (idx & 63) & 1 == 1
    }

    pub fn set(&mut self, idx: u64, value: bool) {
        debug_assert!(idx < 1u64 << self.n);
        let b = (idx >> 6) as usize;
        let m = 1u64 << (idx & 63);
        if value {
            self.blocks[b] |= m;
        } else {
            self.blocks[b] &= !m;
        }
    }

    pub fn value(&self, a: &TotalAssignment) -> Result<bool> {
        if a.arity() != self.n {
            return Err(Error::ArityMismatch { expected: self.n, got: a.arity() });
        }
        Ok(self.get(a.bits()))
    }

    /// Number of inputs mapped to 1.
    pub fn count_ones(&self) -> u64 {
        self.blocks.iter().map(|b| b.count_ones() as u64).sum()
    }

    /// XOR of all values; the answer to a subcube parity query on all stars.
    pub fn parity(&self) -> bool {
        self.count_ones() % 2 == 1
    }

    /// `Some(b)` when the table is identically `b`.
    pub fn is_constant(&self) -> Option<bool> {
        let ones = self.count_ones();
        if ones == 0 {
            Some(false)
        } else if ones == 1u64 << self.n {
            Some(true)
        } else {
            None
        }
    }

    pub fn not(&self) -> TruthTable {
        let mut blocks: Vec<u64> = self.blocks.iter().map(|b| !b).collect();
        if let Some(last) = blocks.last_mut() {
            *last &= Self::tail_mask(self.n);
        }
        TruthTable { n: self.n, blocks }
    }

    pub fn xor(&self, other: &TruthTable) -> Result<TruthTable> {
        if other.n != self.n {
            return Err(Error::ArityMismatch { expected: self.n, got: other.n });
        }
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a ^ b).collect();
        Ok(TruthTable { n: self.n, blocks })
    }

    pub fn and(&self, other: &TruthTable) -> Result<TruthTable> {
        if other.n != self.n {
            return Err(Error::ArityMismatch { expected: self.n, got: other.n });
        }
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a & b).collect();
        Ok(TruthTable { n: self.n, blocks })
    }

    pub fn or(&self, other: &TruthTable) -> Result<TruthTable> {
        if other.n != self.n {
            return Err(Error::ArityMismatch { expected: self.n, got: other.n });
        }
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a | b).collect();
        Ok(TruthTable { n: self.n, blocks })
    }

    /// Apply a small gate table to child tables of a common ambient arity.
    pub fn compose_gate(gate: &TruthTable, children: &[TruthTable], ambient: usize) -> Result<TruthTable> {
        debug_assert_eq!(gate.arity(), children.len());
        let n = ambient;
        let mut out = TruthTable::constant(n, false)?;
        for combo in 0..1u64 << children.len() {
            if !gate.get(combo) {
                continue;
            }
            let mut acc = TruthTable::constant(n, true)?;
            for (k, t) in children.iter().enumerate() {
                let t = if combo >> k & 1 == 1 { t.clone() } else { t.not() };
                acc = acc.and(&t)?;
            }
            out = out.or(&acc)?;
        }
        Ok(out)
    }

    /// Inputs on which the two tables disagree, ascending.
    pub fn disagreements(&self, other: &TruthTable) -> Result<Vec<TotalAssignment>> {
        let diff = self.xor(other)?;
        Ok((0..1u64 << self.n).filter(|&i| diff.get(i)).map(|i| TotalAssignment::new(self.n, i)).collect())
    }

    /// Lowest-index input where the tables differ.
    pub fn first_disagreement(&self, other: &TruthTable) -> Result<Option<TotalAssignment>> {
        if other.n != self.n {
            return Err(Error::ArityMismatch { expected: self.n, got: other.n });
        }
        for (b, (x, y)) in self.blocks.iter().zip(&other.blocks).enumerate() {
            let d = x ^ y;
            if d != 0 {
                let idx = (b as u64) * 64 + d.trailing_zeros() as u64;
                return Ok(Some(TotalAssignment::new(self.n, idx)));
            }
        }
        Ok(None)
    }

    /// The projection `f_p`: star variables keep their relative order and are
    /// renumbered ascending by original index.
    pub fn project(&self, p: &PartialAssignment) -> Result<TruthTable> {
        if p.arity() != self.n {
            return Err(Error::ArityMismatch { expected: self.n, got: p.arity() });
        }
        let stars = p.star_count();
        let mut out = TruthTable::constant(stars, false)?;
        for pat in 0..1u64 << stars {
            if self.get(p.extend(pat).bits()) {
                out.set(pat, true);
            }
        }
        Ok(out)
    }

    /// Whether `x_{i+1}` is essential: some pair of inputs differing only
    /// there gets different values.
    pub fn is_essential(&self, v: VarIndex) -> bool {
        debug_assert!(v.0 < self.n);
        let step = 1u64 << v.0;
        for idx in 0..1u64 << self.n {
            if idx & step == 0 && self.get(idx) != self.get(idx | step) {
                return true;
            }
        }
        false
    }

    pub fn essential_vars(&self) -> VarSet {
        (0..self.n).map(VarIndex).filter(|&v| self.is_essential(v)).collect()
    }

    /// Projection of the table onto its essential variables (fictitious
    /// variables hardwired to 0; the result doesn't depend on the choice).
    pub fn essential_projection(&self) -> TruthTable {
        let ess = self.essential_vars();
        let fict = VarSet(VarSet::full(self.n).0 & !ess.0);
        let p = PartialAssignment::new(self.n, fict, 0);
        self.project(&p).expect("same arity")
    }

    /// Monotone: raising any input bit never lowers the value.
    pub fn is_monotone(&self) -> bool {
        for v in 0..self.n {
            let step = 1u64 << v;
            for idx in 0..1u64 << self.n {
                if idx & step == 0 && self.get(idx) && !self.get(idx | step) {
                    return false;
                }
            }
        }
        true
    }

    /// Serialize as `n=<k>` plus the bit string in index order.
    pub fn to_text(&self) -> String {
        let mut s = format!("n={}\n", self.n);
        for idx in 0..1u64 << self.n {
            s.push(if self.get(idx) { '1' } else { '0' });
        }
        s.push('\n');
        s
    }
}

impl FromStr for TruthTable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty table text".into()))?;
        let n: usize = header
            .trim()
            .strip_prefix("n=")
            .ok_or_else(|| Error::Parse("table text must start with `n=<k>`".into()))?
            .parse()
            .map_err(|_| Error::Parse("bad arity in table header".into()))?;
        check_arity(n)?;
        let bits: String = lines.collect::<Vec<_>>().concat();
        let bits = bits.trim();
        if bits.len() != 1usize << n {
            return Err(Error::Parse(format!(
                "expected {} bits, got {}",
                1usize << n,
                bits.len()
            )));
        }
        let mut t = TruthTable::constant(n, false)?;
        for (idx, ch) in bits.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => t.set(idx as u64, true),
                _ => return Err(Error::Parse(format!("bad table character `{ch}`"))),
            }
        }
        Ok(t)
    }
}

impl fmt::Display for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tt(n: usize, bits: u64) -> TruthTable {
        TruthTable::from_bits_u64(n, bits).unwrap()
    }

    fn pa(s: &str) -> PartialAssignment {
        s.parse().unwrap()
    }

    #[test]
    fn project_hardwires_values() {
        // f = x1 & x2
        let and2 = tt(2, 0b1000);
        // x2 = 1 leaves the identity on x1
        let p = pa("*1");
        assert_eq!(and2.project(&p).unwrap(), tt(1, 0b10));
        // x1 = 1, x2 = 0 collapses to the 0-ary constant 0
        let q = pa("10");
        let c = and2.project(&q).unwrap();
        assert_eq!(c.arity(), 0);
        assert_eq!(c.is_constant(), Some(false));
        // all stars is the identity projection
        assert_eq!(and2.project(&pa("**")).unwrap(), and2);
    }

    #[test]
    fn project_arity_mismatch() {
        let and2 = tt(2, 0b1000);
        assert!(matches!(and2.project(&pa("1**")), Err(Error::ArityMismatch { .. })));
    }

    #[test]
    fn total_extensions_enumerate_stars() {
        let p = pa("1*");
        let ext = p.total_extensions();
        assert_eq!(ext, vec![TotalAssignment::new(2, 0b01), TotalAssignment::new(2, 0b11)]);

        let total = pa("10");
        assert_eq!(total.total_extensions(), vec![TotalAssignment::new(2, 0b01)]);

        let all = PartialAssignment::all_stars(3);
        let ext = all.total_extensions();
        assert_eq!(ext.len(), 8);
        for (i, a) in ext.iter().enumerate() {
            assert_eq!(a.bits(), i as u64);
            assert!(all.is_extended_by(a));
        }
    }

    #[test]
    fn essential_vars_examples() {
        assert_eq!(tt(2, 0b1000).essential_vars(), VarSet::full(2));
        assert_eq!(TruthTable::constant(2, true).unwrap().essential_vars(), VarSet::EMPTY);
        // f(x1, x2) = x1
        let f = TruthTable::var(2, VarIndex(0)).unwrap();
        assert_eq!(f.essential_vars(), VarSet::singleton(VarIndex(0)));
    }

    #[test]
    fn is_constant_examples() {
        assert_eq!(TruthTable::constant(3, false).unwrap().is_constant(), Some(false));
        assert_eq!(TruthTable::constant(3, true).unwrap().is_constant(), Some(true));
        assert_eq!(TruthTable::var(1, VarIndex(0)).unwrap().is_constant(), None);
    }

    #[test]
    fn var_table_index_order() {
        // table of x1 at ambient arity 2: index order 00,10,01,11 reads 0,1,0,1
        let f = TruthTable::var(2, VarIndex(0)).unwrap();
        let bits: Vec<bool> = (0..4).map(|i| f.get(i)).collect();
        assert_eq!(bits, vec![false, true, false, true]);
    }

    #[test]
    fn text_round_trip() {
        let f = tt(2, 0b0110);
        let s = f.to_text();
        assert_eq!(s, "n=2\n0110\n");
        assert_eq!(s.parse::<TruthTable>().unwrap(), f);
    }

    #[test]
    fn assignment_text_round_trip() {
        let p = pa("01*1*");
        assert_eq!(p.to_string(), "01*1*");
        assert_eq!(p.arity(), 5);
        assert_eq!(p.star_count(), 2);
    }

    #[test]
    fn arity_cap_enforced() {
        let cap = arity_cap();
        assert!(cap >= 16);
        assert!(matches!(
            TruthTable::constant(cap + 1, false),
            Err(Error::ArityTooLarge { .. })
        ));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_table(n: usize) -> impl Strategy<Value = TruthTable> {
            prop::collection::vec(prop::num::u64::ANY, 1 << n.saturating_sub(6).min(8))
                .prop_map(move |words| {
                    TruthTable::from_fn(n, |a| {
                        let idx = a.bits();
                        words[(idx >> 6) as usize % words.len()] >> (idx & 63) & 1 == 1
                    })
                    .unwrap()
                })
        }

        fn arb_partial(n: usize) -> impl Strategy<Value = PartialAssignment> {
            let mask = if n == 0 { 0 } else { u64::MAX >> (64 - n) };
            (prop::bits::u64::masked(mask), prop::bits::u64::masked(mask))
                .prop_map(move |(fixed, values)| PartialAssignment::new(n, VarSet(fixed), values))
        }

        proptest! {
            // project(project(f, p), q) equals a single combined projection
            // where q is re-mapped onto the original star positions of p.
            #[test]
            fn projection_composes(
                f in (0usize..=8).prop_flat_map(|n| (Just(n), arb_table(n))),
                pat in prop::bits::u64::masked(u64::MAX),
                qpat in prop::bits::u64::masked(u64::MAX),
            ) {
                let (n, f) = f;
                let p = PartialAssignment::new(n, VarSet(pat), pat >> 32);
                let fp = f.project(&p).unwrap();
                let stars: Vec<VarIndex> = p.stars().iter().collect();
                let q = PartialAssignment::new(stars.len(), VarSet(qpat & VarSet::full(stars.len()).0), qpat >> 32);
                let fpq = fp.project(&q).unwrap();

                // combine: fix p's variables, plus q's values routed back to
                // the original indices of p's stars
                let mut combined = p;
                for (k, v) in stars.iter().enumerate() {
                    if let Some(b) = q.value(VarIndex(k)) {
                        combined = combined.with_fixed(*v, b);
                    }
                }
                let direct = f.project(&combined).unwrap();
                prop_assert_eq!(fpq, direct);
            }

            #[test]
            fn essential_vars_of_projection_within_stars(
                f in (0usize..=6).prop_flat_map(|n| (Just(n), arb_table(n))),
                pat in prop::bits::u64::masked(u64::MAX),
            ) {
                let (n, f) = f;
                let p = PartialAssignment::new(n, VarSet(pat), pat >> 32);
                let fp = f.project(&p).unwrap();
                prop_assert!(fp.essential_vars().is_subset(VarSet::full(p.star_count())));
            }

            #[test]
            fn fictitious_var_projections_agree(
                f in (1usize..=6).prop_flat_map(|n| (Just(n), arb_table(n))),
                v in 0usize..6,
            ) {
                let (n, f) = f;
                let v = VarIndex(v % n);
                if !f.is_essential(v) {
                    let p0 = PartialAssignment::new(n, VarSet::singleton(v), 0);
                    let p1 = PartialAssignment::new(n, VarSet::singleton(v), 1 << v.0);
                    prop_assert_eq!(f.project(&p0).unwrap(), f.project(&p1).unwrap());
                }
            }

            #[test]
            fn extensions_extend(
                n in 0usize..=6,
                pat in prop::bits::u64::masked(u64::MAX),
            ) {
                let p = PartialAssignment::new(n, VarSet(pat), pat >> 32);
                let ext = p.total_extensions();
                prop_assert_eq!(ext.len(), 1 << p.star_count());
                for a in &ext {
                    prop_assert!(p.is_extended_by(a));
                }
            }
        }
    }
}
