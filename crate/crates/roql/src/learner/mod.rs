//! Identification algorithms: square-set reconstruction over the two-input
//! basis, the subcube-identity-only learner for monotone targets, and a
//! candidate-elimination driver over (real or simulated) equivalence queries.

mod candidates;
mod equivalence;
mod monotone;
mod reconstruct;

pub use candidates::{random_canonical_tree, random_read_once_formula, CandidateSet};
pub use equivalence::{learn_via_equivalence, learn_via_equivalence_traced};
pub use monotone::{learn_monotone_si, simulate_membership_monotone};
pub use reconstruct::{
    reconstruct_b2, reconstruct_fragment, reconstruct_glueing, reconstruct_with, FragmentContext,
};

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::oracle::OracleSession;
use crate::truth::{PartialAssignment, TotalAssignment, TruthTable, VarIndex, VarSet};

/// Anything that can answer membership queries; learners are written against
/// this so the same reconstruction runs on a plain oracle session, on a
/// simulated-membership source, or on a substituted working function.
pub trait MembershipSource {
    fn arity(&self) -> usize;
    fn query(&mut self, a: &TotalAssignment) -> Result<bool>;
}

impl MembershipSource for OracleSession {
    fn arity(&self) -> usize {
        OracleSession::arity(self)
    }

    fn query(&mut self, a: &TotalAssignment) -> Result<bool> {
        self.membership(a)
    }
}

/// Four target values on the total extensions of a two-star assignment,
/// both starred variables essential in the induced projection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EssentialitySquare {
    i: VarIndex,
    j: VarIndex,
    base: PartialAssignment,
    values: [bool; 4],
}

impl EssentialitySquare {
    pub fn vars(&self) -> (VarIndex, VarIndex) {
        (self.i, self.j)
    }

    pub fn base(&self) -> &PartialAssignment {
        &self.base
    }

    /// Values in ascending star-pattern order: bit 0 of the pattern is the
    /// lower-index variable.
    pub fn values(&self) -> [bool; 4] {
        self.values
    }

    /// The induced two-variable projection (`x1` = lower-index variable).
    pub fn projection(&self) -> TruthTable {
        let bits = self.values.iter().enumerate().fold(0u64, |acc, (k, &v)| {
            acc | (v as u64) << k
        });
        TruthTable::from_bits_u64(2, bits).expect("arity two")
    }

    /// A linear projection is XOR or its negation.
    pub fn is_linear(&self) -> bool {
        let bits = self.values.iter().enumerate().fold(0u64, |acc, (k, &v)| {
            acc | (v as u64) << k
        });
        bits == 0b0110 || bits == 0b1001
    }

    /// The total extensions carrying the four values, ascending.
    pub fn extensions(&self) -> Vec<TotalAssignment> {
        self.base.total_extensions()
    }
}

/// Search base assignments in ascending order for an essentiality square on
/// `(i, j)`, spending four membership queries per base.
pub fn find_square<M: MembershipSource>(
    source: &mut M,
    i: VarIndex,
    j: VarIndex,
) -> Result<EssentialitySquare> {
    let n = source.arity();
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    if i == j || j.index() >= n {
        return Err(Error::Precondition(format!("bad variable pair ({i}, {j})")));
    }
    let stars = VarSet::singleton(i).union(VarSet::singleton(j));
    let others: Vec<VarIndex> = VarSet(VarSet::full(n).0 & !stars.0).iter().collect();
    for pattern in 0..1u64 << others.len() {
        let mut values = 0u64;
        for (k, v) in others.iter().enumerate() {
            if pattern >> k & 1 == 1 {
                values |= 1 << v.index();
            }
        }
        let base = PartialAssignment::new(n, VarSet(VarSet::full(n).0 & !stars.0), values);
        let mut vals = [false; 4];
        for (k, ext) in base.total_extensions().iter().enumerate() {
            vals[k] = source.query(ext)?;
        }
        let i_essential = vals[0] != vals[1] || vals[2] != vals[3];
        let j_essential = vals[0] != vals[2] || vals[1] != vals[3];
        if i_essential && j_essential {
            return Ok(EssentialitySquare { i, j, base, values: vals });
        }
    }
    Err(Error::NoSquare { i, j })
}

/// One essentiality square per variable pair.
#[derive(Debug, Clone)]
pub struct SquareSet {
    n: usize,
    squares: BTreeMap<(VarIndex, VarIndex), EssentialitySquare>,
}

impl SquareSet {
    /// Collect squares for all pairs through membership queries.
    pub fn collect<M: MembershipSource>(source: &mut M) -> Result<SquareSet> {
        let n = source.arity();
        let mut squares = BTreeMap::new();
        for i in 0..n {
            for j in i + 1..n {
                let sq = find_square(source, VarIndex(i), VarIndex(j))?;
                squares.insert((VarIndex(i), VarIndex(j)), sq);
            }
        }
        Ok(SquareSet { n, squares })
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: VarIndex, j: VarIndex) -> Option<&EssentialitySquare> {
        let key = if i < j { (i, j) } else { (j, i) };
        self.squares.get(&key)
    }

    pub fn squares(&self) -> impl Iterator<Item = &EssentialitySquare> {
        self.squares.values()
    }

    /// Distinct input vectors covered by the squares.
    pub fn vectors(&self) -> Vec<TotalAssignment> {
        let mut out: Vec<TotalAssignment> =
            self.squares.values().flat_map(|s| s.extensions()).collect();
        out.sort();
        out.dedup();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn session(n: usize, bits: u64) -> OracleSession {
        OracleSession::new(TruthTable::from_bits_u64(n, bits).unwrap())
    }

    #[test]
    fn find_square_and3() {
        // f = x1 & x2 & x3: the first base making both x1, x2 essential is
        // x3 = 1, and the values there are those of a conjunction
        let mut s = session(3, 0x80);
        let sq = find_square(&mut s, VarIndex(0), VarIndex(1)).unwrap();
        assert_eq!(sq.base().to_string(), "**1");
        assert_eq!(sq.values(), [false, false, false, true]);
        // oracle: the projection really does depend on both variables
        assert_eq!(sq.projection().essential_vars(), VarSet::full(2));
    }

    #[test]
    fn find_square_xor2_has_single_base() {
        let mut s = session(2, 0b0110);
        let sq = find_square(&mut s, VarIndex(0), VarIndex(1)).unwrap();
        assert_eq!(sq.base().star_count(), 2);
        assert_eq!(sq.values(), [false, true, true, false]);
        assert!(sq.is_linear());
    }

    #[test]
    fn find_square_fails_on_fictitious_variable() {
        // f = x1 at arity 2: x2 is fictitious, no square exists
        let f = TruthTable::var(2, VarIndex(0)).unwrap();
        let mut s = OracleSession::new(f);
        assert!(matches!(
            find_square(&mut s, VarIndex(0), VarIndex(1)),
            Err(Error::NoSquare { .. })
        ));
    }

    #[test]
    fn square_set_complete() {
        let mut s = session(3, 0x80);
        let set = SquareSet::collect(&mut s).unwrap();
        assert_eq!(set.squares().count(), 3);
        assert!(set.get(VarIndex(2), VarIndex(0)).is_some());
    }
}
