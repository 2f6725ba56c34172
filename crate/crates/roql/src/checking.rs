//! Checking tests, essentiality hypercube sets, l-satisfiability, and
//! discriminatory-function detection.
//!
//! A checking test for `f` within a class is a table of inputs and values
//! consistent with `f` and with no other member of the class. For read-once
//! functions over a basis of fan-in at most `l`, the values of `f` on an
//! l-essentiality hypercube set form such a test whenever the function is
//! l-satisfiable (proved for `l <= 5`; this module exercises `l = 2`
//! constructively and searches for non-satisfiable witnesses at `l = 3`).

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::formula::Basis;
use crate::learner::CandidateSet;
use crate::truth::{PartialAssignment, TotalAssignment, TruthTable, VarIndex, VarSet};

/// The subcube of all total extensions of `base`, whose projection depends
/// essentially on every variable of `vars`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypercube {
    vars: VarSet,
    base: PartialAssignment,
}

impl Hypercube {
    pub fn vars(&self) -> VarSet {
        self.vars
    }

    pub fn base(&self) -> &PartialAssignment {
        &self.base
    }

    pub fn extensions(&self) -> Vec<TotalAssignment> {
        self.base.total_extensions()
    }
}

/// Hypercubes indexed by their starred variable set, one per l-subset that
/// admits any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypercubeSet {
    n: usize,
    l: usize,
    cubes: BTreeMap<VarSet, Hypercube>,
}

impl HypercubeSet {
    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }

    pub fn get(&self, vars: VarSet) -> Option<&Hypercube> {
        self.cubes.get(&vars)
    }

    pub fn cubes(&self) -> impl Iterator<Item = &Hypercube> {
        self.cubes.values()
    }

    /// Distinct input vectors covered by the set.
    pub fn vectors(&self) -> Vec<TotalAssignment> {
        let mut out: Vec<TotalAssignment> =
            self.cubes.values().flat_map(|c| c.extensions()).collect();
        out.sort();
        out.dedup();
        out
    }

    /// The derived test: the values of `f` on every covered vector.
    pub fn checking_test(&self, f: &TruthTable) -> Result<CheckingTest> {
        let mut test = CheckingTest::new(f.arity());
        for x in self.vectors() {
            test.insert(x, f.value(&x)?);
        }
        Ok(test)
    }
}

fn hypercube_for(f: &TruthTable, vars: VarSet, base_order: &[u64]) -> Option<Hypercube> {
    let n = f.arity();
    for &pattern in base_order {
        let mut values = 0u64;
        let others: Vec<VarIndex> =
            VarSet(VarSet::full(n).0 & !vars.0).iter().collect();
        for (k, v) in others.iter().enumerate() {
            if pattern >> k & 1 == 1 {
                values |= 1 << v.index();
            }
        }
        let base = PartialAssignment::new(n, VarSet(VarSet::full(n).0 & !vars.0), values);
        let proj = f.project(&base).expect("same arity");
        if proj.essential_vars() == VarSet::full(vars.len()) {
            return Some(Hypercube { vars, base });
        }
    }
    None
}

/// Exhaustive ascending search for one essentiality hypercube per l-subset.
/// Subsets without one are simply absent from the result.
pub fn build_hypercube_set(f: &TruthTable, l: usize) -> HypercubeSet {
    let n = f.arity();
    let order: Vec<u64> = (0..1u64 << n.saturating_sub(l)).collect();
    build_hypercube_set_ordered(f, l, |_| order.clone())
}

/// Same search with a caller-chosen base order per subset; used to exercise
/// the strong form of the hypercube conjecture, which quantifies over all
/// hypercube sets.
pub fn build_hypercube_set_shuffled(f: &TruthTable, l: usize, rng: &mut impl Rng) -> HypercubeSet {
    let n = f.arity();
    build_hypercube_set_ordered(f, l, |_| {
        let mut order: Vec<u64> = (0..1u64 << n.saturating_sub(l)).collect();
        order.shuffle(rng);
        order
    })
}

fn build_hypercube_set_ordered(
    f: &TruthTable,
    l: usize,
    mut order_for: impl FnMut(VarSet) -> Vec<u64>,
) -> HypercubeSet {
    let n = f.arity();
    let mut cubes = BTreeMap::new();
    for vars in VarSet::subsets_of_size(n, l) {
        if let Some(cube) = hypercube_for(f, vars, &order_for(vars)) {
            cubes.insert(vars, cube);
        }
    }
    HypercubeSet { n, l, cubes }
}

/// Whether every l-subset of variables admits an essentiality hypercube.
/// Meaningful when all variables of `f` are essential.
pub fn is_l_satisfiable(f: &TruthTable, l: usize) -> bool {
    let n = f.arity();
    build_hypercube_set(f, l).len() == binomial(n, l)
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut r = 1usize;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// A set of input/value pairs, ordered by input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckingTest {
    n: usize,
    pairs: BTreeMap<TotalAssignment, bool>,
}

impl CheckingTest {
    pub fn new(n: usize) -> Self {
        CheckingTest { n, pairs: BTreeMap::new() }
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn insert(&mut self, x: TotalAssignment, value: bool) {
        debug_assert_eq!(x.arity(), self.n);
        self.pairs.insert(x, value);
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&TotalAssignment, &bool)> {
        self.pairs.iter()
    }

    /// The full value table of `f` as a (trivial) checking test.
    pub fn full_table(f: &TruthTable) -> Self {
        let mut test = CheckingTest::new(f.arity());
        for idx in 0..1u64 << f.arity() {
            test.insert(TotalAssignment::new(f.arity(), idx), f.get(idx));
        }
        test
    }

    pub fn is_consistent_with(&self, table: &TruthTable) -> bool {
        table.arity() == self.n
            && self.pairs.iter().all(|(x, &v)| table.get(x.bits()) == v)
    }

    /// Serialize with header `n=<k> basis=<name>` and one `<vector> <bit>`
    /// line per pair.
    pub fn to_text(&self, basis_name: &str) -> String {
        let mut s = format!("n={} basis={}\n", self.n, basis_name);
        for (x, v) in &self.pairs {
            let _ = writeln!(s, "{} {}", x, *v as u8);
        }
        s
    }

    /// Parse the text format; returns the test and the basis name.
    pub fn from_text(text: &str) -> Result<(Self, String)> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty checking test".into()))?;
        let mut n = None;
        let mut basis = None;
        for field in header.split_whitespace() {
            if let Some(v) = field.strip_prefix("n=") {
                n = Some(v.parse::<usize>().map_err(|_| Error::Parse("bad arity".into()))?);
            } else if let Some(v) = field.strip_prefix("basis=") {
                basis = Some(v.to_string());
            }
        }
        let n = n.ok_or_else(|| Error::Parse("missing n= in checking-test header".into()))?;
        let basis = basis.ok_or_else(|| Error::Parse("missing basis= in header".into()))?;
        let mut test = CheckingTest::new(n);
        for line in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (vec, bit) = line
                .split_once(' ')
                .ok_or_else(|| Error::Parse(format!("bad checking-test line `{line}`")))?;
            let x: TotalAssignment = vec.parse()?;
            if x.arity() != n {
                return Err(Error::Parse(format!("vector `{vec}` does not match n={n}")));
            }
            let value = match bit.trim() {
                "0" => false,
                "1" => true,
                other => return Err(Error::Parse(format!("bad bit `{other}`"))),
            };
            test.insert(x, value);
        }
        Ok((test, basis))
    }
}

/// The checking test used when modeling equivalence queries: the hypercube
/// test at fan-in `l` for functions of two or more variables, the full value
/// table below that. Requires every variable of `f` to be essential.
pub fn checking_test_for(f: &TruthTable, l: usize) -> Result<CheckingTest> {
    let n = f.arity();
    debug_assert_eq!(f.essential_vars(), VarSet::full(n));
    if n <= 1 {
        return Ok(CheckingTest::full_table(f));
    }
    let set = build_hypercube_set(f, l);
    if set.len() != binomial(n, l) {
        return Err(Error::NoCheckingTest { l });
    }
    set.checking_test(f)
}

/// Verification outcome mapped by the command-line verifier to exit codes
/// 0 / 1 / 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestVerdict {
    Unique,
    Ambiguous,
}

/// Whether `f_ref` is the unique read-once function over `basis` (ambient
/// arity `n`) consistent with every pair of `test`. Errors when `f_ref`
/// itself fails the test.
pub fn verify_checking_test(
    test: &CheckingTest,
    basis: &Basis,
    n: usize,
    f_ref: &TruthTable,
) -> Result<bool> {
    if !test.is_consistent_with(f_ref) {
        return Err(Error::InconsistentTest);
    }
    let candidates = CandidateSet::enumerate(basis, n)?;
    let consistent: Vec<&TruthTable> = candidates
        .tables()
        .filter(|t| test.is_consistent_with(t))
        .collect();
    Ok(consistent.len() == 1 && consistent[0] == f_ref)
}

/// Search for a nonempty proper variable subset whose every total assignment
/// leaves some outside variable fictitious in the projection. Subsets are
/// tried by increasing size, then ascending; the first witness is returned.
/// Requires all variables of `f` essential.
pub fn is_discriminatory(f: &TruthTable) -> Result<Option<VarSet>> {
    let n = f.arity();
    if f.essential_vars() != VarSet::full(n) {
        return Err(Error::Precondition(
            "discriminatory search requires all variables essential".into(),
        ));
    }
    for size in 1..n {
        for subset in VarSet::subsets_of_size(n, size) {
            if subset_discriminates(f, subset) {
                return Ok(Some(subset));
            }
        }
    }
    Ok(None)
}

fn subset_discriminates(f: &TruthTable, subset: VarSet) -> bool {
    let n = f.arity();
    let members: Vec<VarIndex> = subset.iter().collect();
    let outside = VarSet(VarSet::full(n).0 & !subset.0);
    for pattern in 0..1u64 << members.len() {
        let mut values = 0u64;
        for (k, v) in members.iter().enumerate() {
            if pattern >> k & 1 == 1 {
                values |= 1 << v.index();
            }
        }
        let p = PartialAssignment::new(n, subset, values);
        let proj = f.project(&p).expect("same arity");
        // outside variables keep their relative order in the projection
        let all_outside_essential = (0..outside.len()).all(|k| proj.is_essential(VarIndex(k)));
        if all_outside_essential {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tt(n: usize, bits: u64) -> TruthTable {
        TruthTable::from_bits_u64(n, bits).unwrap()
    }

    const AND2: u64 = 0b1000;
    const XOR2: u64 = 0b0110;

    #[test]
    fn hypercube_set_for_and3() {
        // f = x1 & x2 & x3: three squares of four extensions each (the
        // all-ones corner is shared, leaving seven distinct vectors)
        let f = tt(3, 0x80);
        let set = build_hypercube_set(&f, 2);
        assert_eq!(set.len(), 3);
        assert_eq!(set.cubes().map(|c| c.extensions().len()).sum::<usize>(), 12);
        assert_eq!(set.vectors().len(), 7);
        let test = set.checking_test(&f).unwrap();
        assert!(test.len() <= 4 * binomial(3, 2));
    }

    #[test]
    fn xor2_square_is_whole_cube() {
        let f = tt(2, XOR2);
        let set = build_hypercube_set(&f, 2);
        assert_eq!(set.len(), 1);
        assert_eq!(set.vectors().len(), 4);
    }

    #[test]
    fn l_equals_n_needs_all_vars_essential() {
        let f = tt(3, 0x80);
        let set = build_hypercube_set(&f, 3);
        assert_eq!(set.len(), 1);
        assert_eq!(set.vectors().len(), 8);

        // a function with a fictitious third variable admits no 3-cube
        let g = tt(3, 0x88);
        assert_eq!(build_hypercube_set(&g, 3).len(), 0);
    }

    #[test]
    fn and2_is_2_satisfiable() {
        assert!(is_l_satisfiable(&tt(2, AND2), 2));
    }

    #[test]
    fn verify_full_square_unique_over_b2() {
        let f = tt(2, AND2);
        let test = checking_test_for(&f, 2).unwrap();
        assert!(verify_checking_test(&test, &Basis::b2(), 2, &f).unwrap());
    }

    #[test]
    fn single_pair_is_ambiguous() {
        let f = tt(2, AND2);
        let mut test = CheckingTest::new(2);
        test.insert(TotalAssignment::new(2, 0b11), true);
        // x1 | x2 is also consistent
        assert!(!verify_checking_test(&test, &Basis::b2(), 2, &f).unwrap());
    }

    #[test]
    fn inconsistent_reference_errors() {
        let f = tt(2, AND2);
        let mut test = CheckingTest::new(2);
        test.insert(TotalAssignment::new(2, 0b01), true);
        assert!(matches!(
            verify_checking_test(&test, &Basis::b2(), 2, &f),
            Err(Error::InconsistentTest)
        ));
    }

    #[test]
    fn and2_is_not_discriminatory() {
        assert_eq!(is_discriminatory(&tt(2, AND2)).unwrap(), None);
    }

    #[test]
    fn multiplexer_is_discriminatory() {
        // x1 ? x2 : x3: either branch leaves the other selector input
        // fictitious
        let mux = tt(3, 0xd8);
        assert_eq!(mux.essential_vars(), VarSet::full(3));
        let witness = is_discriminatory(&mux).unwrap();
        assert_eq!(witness, Some(VarSet::singleton(VarIndex(0))));
    }

    #[test]
    fn discriminatory_needs_all_essential() {
        let g = tt(3, 0x88);
        assert!(matches!(is_discriminatory(&g), Err(Error::Precondition(_))));
    }

    #[test]
    fn test_text_round_trip() {
        let f = tt(2, AND2);
        let test = CheckingTest::full_table(&f);
        let text = test.to_text("b2");
        let (parsed, basis) = CheckingTest::from_text(&text).unwrap();
        assert_eq!(parsed, test);
        assert_eq!(basis, "b2");
    }
}
