//! The threshold-function family whose exact identification needs
//! exponentially many membership and subcube identity queries, with an
//! adversary harness that verifies the bound empirically.
//!
//! The family at arity `n` consists of the symmetric threshold function
//! "at least k+1 ones" (`k = n/2` rounded down) plus one variant per
//! k-subset: raising the subset's weights by `1/(2k)` and lowering the
//! threshold to `k + 1/2` flips the value on exactly the subset's indicator
//! vector. A single proper equivalence query tells the members apart, but
//! each membership or subcube identity query can eliminate at most one
//! variant, so any strategy under `C(n, k)` queries leaves two candidates
//! alive.

use num_rational::Ratio;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::oracle::{Answer, Query, QueryCounters, QueryKind};
use crate::truth::{TotalAssignment, TruthTable, VarIndex, VarSet};

pub type Weight = Ratio<i64>;

/// `f(x) = 1  iff  sum of weights over the support of x >= threshold`,
/// compared exactly in rational arithmetic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdFunction {
    weights: Vec<Weight>,
    threshold: Weight,
}

impl ThresholdFunction {
    pub fn new(weights: Vec<Weight>, threshold: Weight) -> Self {
        ThresholdFunction { weights, threshold }
    }

    pub fn arity(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    pub fn threshold(&self) -> Weight {
        self.threshold
    }

    pub fn is_monotone(&self) -> bool {
        self.weights.iter().all(|w| *w >= Weight::zero())
    }

    pub fn eval(&self, a: &TotalAssignment) -> bool {
        let sum: Weight = self
            .weights
            .iter()
            .enumerate()
            .filter(|(i, _)| a.bits() >> i & 1 == 1)
            .map(|(_, w)| *w)
            .sum();
        sum >= self.threshold
    }

    pub fn truth_table(&self) -> Result<TruthTable> {
        TruthTable::from_fn(self.arity(), |a| self.eval(&a))
    }
}

/// The base threshold function plus one variant per k-subset, each
/// disagreeing with the base on that subset's indicator vector alone.
#[derive(Debug, Clone)]
pub struct KnFamily {
    n: usize,
    k: usize,
    base: ThresholdFunction,
    variants: Vec<(VarSet, ThresholdFunction)>,
}

impl KnFamily {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn base(&self) -> &ThresholdFunction {
        &self.base
    }

    pub fn variants(&self) -> &[(VarSet, ThresholdFunction)] {
        &self.variants
    }

    /// Base plus variants.
    pub fn len(&self) -> usize {
        1 + self.variants.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Member tables in family order (base first, variants by subset mask).
    pub fn tables(&self) -> Result<Vec<TruthTable>> {
        let mut out = vec![self.base.truth_table()?];
        for (_, t) in &self.variants {
            out.push(t.truth_table()?);
        }
        Ok(out)
    }
}

/// Construct the family at arity `n >= 2`.
pub fn kn_family(n: usize) -> Result<KnFamily> {
    if n < 2 {
        return Err(Error::Precondition("the family needs at least two variables".into()));
    }
    let k = n / 2;
    let one = Weight::from_integer(1);
    let base = ThresholdFunction::new(
        vec![one; n],
        Weight::from_integer(k as i64 + 1),
    );
    let bump = Ratio::new(1, 2 * k as i64);
    let half = Ratio::new(1, 2);
    let mut variants = Vec::new();
    for subset in VarSet::subsets_of_size(n, k) {
        let weights: Vec<Weight> = (0..n)
            .map(|i| if subset.contains(VarIndex(i)) { one + bump } else { one })
            .collect();
        variants.push((
            subset,
            ThresholdFunction::new(weights, Weight::from_integer(k as i64) + half),
        ));
    }
    Ok(KnFamily { n, k, base, variants })
}

/// Adversary bookkeeping: answers every query as the base function and
/// tracks which members remain consistent with the transcript.
pub struct AdversaryState {
    family: KnFamily,
    tables: Vec<TruthTable>,
    alive: Vec<bool>,
    transcript: Vec<(Query, Answer)>,
}

impl AdversaryState {
    pub fn new(family: KnFamily) -> Result<Self> {
        let tables = family.tables()?;
        let alive = vec![true; tables.len()];
        Ok(AdversaryState { family, tables, alive, transcript: Vec::new() })
    }

    pub fn family(&self) -> &KnFamily {
        &self.family
    }

    pub fn surviving(&self) -> usize {
        self.alive.iter().filter(|&&a| a).count()
    }

    pub fn transcript(&self) -> &[(Query, Answer)] {
        &self.transcript
    }

    /// Member index alive check (0 = base, 1.. = variants in order).
    pub fn is_alive(&self, member: usize) -> bool {
        self.alive[member]
    }

    fn member_answer(&self, member: usize, q: &Query) -> Result<Answer> {
        let t = &self.tables[member];
        Ok(match q {
            Query::Membership(a) => Answer::Bit(t.value(a)?),
            Query::SubcubeIdentity(p) => Answer::YesNo(t.project(p)?.is_constant().is_some()),
            _ => unreachable!("checked by the caller"),
        })
    }

    /// Answer as the base function, eliminating members that disagree.
    /// At most one member ever disagrees (asserted).
    pub fn answer(&mut self, q: &Query) -> Result<Answer> {
        match q.kind() {
            QueryKind::Membership | QueryKind::SubcubeIdentity => {}
            kind => return Err(Error::DisallowedQuery(kind)),
        }
        let reply = self.member_answer(0, q)?;
        let mut eliminated = 0usize;
        for member in 0..self.tables.len() {
            if self.alive[member] && self.member_answer(member, q)? != reply {
                self.alive[member] = false;
                eliminated += 1;
            }
        }
        assert!(eliminated <= 1, "one query can reveal at most one input value on this family");
        self.transcript.push((q.clone(), reply.clone()));
        Ok(reply)
    }
}

/// A query-emitting strategy for the adversary experiment; sees the
/// transcript so far.
pub trait Strategy {
    fn name(&self) -> &'static str;
    fn next_query(&mut self, state: &AdversaryState) -> Query;
}

/// Membership queries on the weight-k vectors in ascending order.
pub struct ExhaustiveKWeight {
    queue: Vec<TotalAssignment>,
    pos: usize,
}

impl ExhaustiveKWeight {
    pub fn new(n: usize) -> Self {
        let k = n / 2;
        let queue = (0..1u64 << n)
            .filter(|b| b.count_ones() as usize == k)
            .map(|b| TotalAssignment::new(n, b))
            .collect();
        ExhaustiveKWeight { queue, pos: 0 }
    }
}

impl Strategy for ExhaustiveKWeight {
    fn name(&self) -> &'static str {
        "k-weight"
    }

    fn next_query(&mut self, _state: &AdversaryState) -> Query {
        let q = Query::Membership(self.queue[self.pos % self.queue.len()]);
        self.pos += 1;
        q
    }
}

/// Picks the first weight-k vector whose variant is still alive: the
/// maximum-elimination greedy (no query eliminates more than one member).
pub struct GreedyElimination;

impl Strategy for GreedyElimination {
    fn name(&self) -> &'static str {
        "greedy"
    }

    fn next_query(&mut self, state: &AdversaryState) -> Query {
        let n = state.family.n();
        for (idx, (subset, _)) in state.family.variants().iter().enumerate() {
            if state.is_alive(idx + 1) {
                return Query::Membership(TotalAssignment::new(n, subset.0));
            }
        }
        Query::Membership(TotalAssignment::new(n, 0))
    }
}

/// A seeded mix of weight-k memberships, pivotal subcube identity queries
/// (a unique weight-k extension), and arbitrary subcube identity noise.
pub struct RandomStrategy<R> {
    rng: R,
}

impl<R: rand::Rng> RandomStrategy<R> {
    pub fn new(rng: R) -> Self {
        RandomStrategy { rng }
    }
}

impl<R: rand::Rng> Strategy for RandomStrategy<R> {
    fn name(&self) -> &'static str {
        "random"
    }

    fn next_query(&mut self, state: &AdversaryState) -> Query {
        let n = state.family.n();
        let k = state.family.k();
        let roll = self.rng.gen_range(0..4u8);
        if roll < 2 {
            // random weight-k membership
            let mut picks: Vec<usize> = (0..n).collect();
            let mut bits = 0u64;
            for _ in 0..k {
                let at = self.rng.gen_range(0..picks.len());
                bits |= 1 << picks.remove(at);
            }
            Query::Membership(TotalAssignment::new(n, bits))
        } else if roll == 2 {
            // pivotal identity query: fix all variables except one starred
            // zero and one starred one around a weight-k pattern
            let mut picks: Vec<usize> = (0..n).collect();
            let mut ones = VarSet::EMPTY;
            for _ in 0..k.saturating_sub(1) {
                let at = self.rng.gen_range(0..picks.len());
                ones.insert(VarIndex(picks.remove(at)));
            }
            let star_one = picks.remove(self.rng.gen_range(0..picks.len()));
            let star_zero = picks.remove(self.rng.gen_range(0..picks.len()));
            let mut fixed = VarSet::full(n);
            fixed.remove(VarIndex(star_one));
            fixed.remove(VarIndex(star_zero));
            Query::SubcubeIdentity(crate::truth::PartialAssignment::new(n, fixed, ones.0))
        } else {
            // arbitrary identity query
            let fixed = self.rng.gen_range(0..1u64 << n);
            let values = self.rng.gen_range(0..1u64 << n);
            Query::SubcubeIdentity(crate::truth::PartialAssignment::new(
                n,
                VarSet(fixed),
                values,
            ))
        }
    }
}

/// One experiment row: run `budget` queries of the strategy against the
/// adversary and report the surviving member count with per-kind tallies.
pub struct ExperimentResult {
    pub n: usize,
    pub k: usize,
    pub family_size: usize,
    pub strategy: &'static str,
    pub budget: usize,
    pub survivors: usize,
    pub counters: QueryCounters,
}

pub fn run_adversary_experiment(
    strategy: &mut dyn Strategy,
    n: usize,
    budget: usize,
) -> Result<ExperimentResult> {
    let family = kn_family(n)?;
    let k = family.k();
    let family_size = family.len();
    let mut state = AdversaryState::new(family)?;
    let mut counters = QueryCounters::default();
    for _ in 0..budget {
        let q = strategy.next_query(&state);
        match q.kind() {
            QueryKind::Membership => counters.membership += 1,
            QueryKind::SubcubeIdentity => counters.si += 1,
            kind => return Err(Error::DisallowedQuery(kind)),
        }
        state.answer(&q)?;
    }
    Ok(ExperimentResult {
        n,
        k,
        family_size,
        strategy: strategy.name(),
        budget,
        survivors: state.surviving(),
        counters,
    })
}

/// Every member of the family is identified by one equivalence query on the
/// base function: "yes" names the base, a counterexample's support names the
/// variant. Returns the query count (always one).
pub fn eq_identifies_kn(n: usize) -> Result<u64> {
    let family = kn_family(n)?;
    let base_table = family.base().truth_table()?;
    for (idx, table) in family.tables()?.iter().enumerate() {
        let identified = match table.first_disagreement(&base_table)? {
            None => 0usize,
            Some(y) => {
                let subset = y.support();
                1 + family
                    .variants()
                    .iter()
                    .position(|(s, _)| *s == subset)
                    .ok_or_else(|| {
                        Error::Precondition("counterexample names no variant".into())
                    })?
            }
        };
        if identified != idx {
            return Err(Error::Precondition(format!(
                "equivalence query misidentified member {idx}"
            )));
        }
    }
    Ok(1)
}
