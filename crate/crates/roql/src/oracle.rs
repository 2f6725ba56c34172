//! Query oracles over a hidden truth table, query accounting, and the
//! adapters that model one query type with another.
//!
//! Query kinds:
//! - membership: the value `f(x)` at a total assignment;
//! - subcube identity: whether the projection `f_p` is constant (either
//!   constant), answered yes/no;
//! - necessity / possibility: whether `f_p ≡ 1` / `f_p ≢ 0`;
//! - subcube parity: the XOR of all values of `f_p`;
//! - equivalence (proper): a read-once hypothesis over the session basis is
//!   either confirmed or refuted by a counterexample.
//!
//! Sessions track per-kind counters and an optional query log, one line per
//! query: `<kind> <payload> -> <answer>`.

use serde::Serialize;

use crate::checking::CheckingTest;
use crate::error::{Error, Result};
use crate::formula::{Basis, ReadOnceFormula};
use crate::truth::{PartialAssignment, TotalAssignment, TruthTable, VarSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QueryKind {
    Membership,
    SubcubeIdentity,
    Necessity,
    Possibility,
    SubcubeParity,
    Equivalence,
}

impl QueryKind {
    pub const ALL: [QueryKind; 6] = [
        QueryKind::Membership,
        QueryKind::SubcubeIdentity,
        QueryKind::Necessity,
        QueryKind::Possibility,
        QueryKind::SubcubeParity,
        QueryKind::Equivalence,
    ];

    fn token(self) -> &'static str {
        match self {
            QueryKind::Membership => "membership",
            QueryKind::SubcubeIdentity => "si",
            QueryKind::Necessity => "necessity",
            QueryKind::Possibility => "possibility",
            QueryKind::SubcubeParity => "parity",
            QueryKind::Equivalence => "equivalence",
        }
    }
}

#[derive(Debug, Clone)]
pub enum Query {
    Membership(TotalAssignment),
    SubcubeIdentity(PartialAssignment),
    Necessity(PartialAssignment),
    Possibility(PartialAssignment),
    SubcubeParity(PartialAssignment),
    Equivalence(ReadOnceFormula),
}

impl Query {
    pub fn kind(&self) -> QueryKind {
        match self {
            Query::Membership(_) => QueryKind::Membership,
            Query::SubcubeIdentity(_) => QueryKind::SubcubeIdentity,
            Query::Necessity(_) => QueryKind::Necessity,
            Query::Possibility(_) => QueryKind::Possibility,
            Query::SubcubeParity(_) => QueryKind::SubcubeParity,
            Query::Equivalence(_) => QueryKind::Equivalence,
        }
    }

    fn payload(&self) -> String {
        match self {
            Query::Membership(a) => a.to_string(),
            Query::SubcubeIdentity(p)
            | Query::Necessity(p)
            | Query::Possibility(p)
            | Query::SubcubeParity(p) => p.to_string(),
            Query::Equivalence(g) => g.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Answer {
    Bit(bool),
    YesNo(bool),
    EquivalenceYes,
    Counterexample(TotalAssignment),
}

impl Answer {
    pub fn as_bit(&self) -> Option<bool> {
        match self {
            Answer::Bit(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_yes_no(&self) -> Option<bool> {
        match self {
            Answer::YesNo(b) => Some(*b),
            _ => None,
        }
    }

    fn render(&self) -> String {
        match self {
            Answer::Bit(b) => (*b as u8).to_string(),
            Answer::YesNo(true) => "yes".into(),
            Answer::YesNo(false) => "no".into(),
            Answer::EquivalenceYes => "yes".into(),
            Answer::Counterexample(a) => format!("counterexample {a}"),
        }
    }
}

/// Per-kind query tallies; `to_json` emits `{"membership": k, "si": k, ...}`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct QueryCounters {
    pub membership: u64,
    pub si: u64,
    pub necessity: u64,
    pub possibility: u64,
    pub parity: u64,
    pub equivalence: u64,
}

impl QueryCounters {
    pub fn total(&self) -> u64 {
        self.membership + self.si + self.necessity + self.possibility + self.parity + self.equivalence
    }

    pub fn get(&self, kind: QueryKind) -> u64 {
        match kind {
            QueryKind::Membership => self.membership,
            QueryKind::SubcubeIdentity => self.si,
            QueryKind::Necessity => self.necessity,
            QueryKind::Possibility => self.possibility,
            QueryKind::SubcubeParity => self.parity,
            QueryKind::Equivalence => self.equivalence,
        }
    }

    fn bump(&mut self, kind: QueryKind) {
        match kind {
            QueryKind::Membership => self.membership += 1,
            QueryKind::SubcubeIdentity => self.si += 1,
            QueryKind::Necessity => self.necessity += 1,
            QueryKind::Possibility => self.possibility += 1,
            QueryKind::SubcubeParity => self.parity += 1,
            QueryKind::Equivalence => self.equivalence += 1,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("counters serialize")
    }
}

/// An oracle session over a hidden target.
///
/// Queries of kinds outside `allowed` are rejected without being counted.
/// The session owns its counters; the target is immutable.
pub struct OracleSession {
    target: TruthTable,
    basis: Option<Basis>,
    allowed: Vec<QueryKind>,
    counters: QueryCounters,
    generalized_si: bool,
    log: Option<Vec<String>>,
}

impl OracleSession {
    /// A session allowing every query kind.
    pub fn new(target: TruthTable) -> Self {
        OracleSession {
            target,
            basis: None,
            allowed: QueryKind::ALL.to_vec(),
            counters: QueryCounters::default(),
            generalized_si: false,
            log: None,
        }
    }

    pub fn with_allowed(target: TruthTable, allowed: &[QueryKind]) -> Self {
        OracleSession { allowed: allowed.to_vec(), ..OracleSession::new(target) }
    }

    /// Attach the basis against which equivalence hypotheses are checked for
    /// properness.
    pub fn with_basis(mut self, basis: Basis) -> Self {
        self.basis = Some(basis);
        self
    }

    /// Switch subcube identity queries on total assignments to return the
    /// function value instead of a plain "yes" (the generalized variant).
    pub fn with_generalized_si(mut self, on: bool) -> Self {
        self.generalized_si = on;
        self
    }

    pub fn enable_log(&mut self) {
        if self.log.is_none() {
            self.log = Some(Vec::new());
        }
    }

    pub fn log(&self) -> &[String] {
        self.log.as_deref().unwrap_or(&[])
    }

    pub fn arity(&self) -> usize {
        self.target.arity()
    }

    pub fn counters(&self) -> QueryCounters {
        self.counters
    }

    /// Answer one query, incrementing the matching counter. Disallowed kinds
    /// and malformed payloads are rejected uncounted.
    pub fn answer(&mut self, query: &Query) -> Result<Answer> {
        let kind = query.kind();
        if !self.allowed.contains(&kind) {
            return Err(Error::DisallowedQuery(kind));
        }
        let n = self.target.arity();
        let answer = match query {
            Query::Membership(a) => Answer::Bit(self.target.value(a)?),
            Query::SubcubeIdentity(p) => {
                let proj = self.target.project(p)?;
                match proj.is_constant() {
                    Some(b) if self.generalized_si && p.is_total() => Answer::Bit(b),
                    Some(_) => Answer::YesNo(true),
                    None => Answer::YesNo(false),
                }
            }
            Query::Necessity(p) => {
                Answer::YesNo(self.target.project(p)?.is_constant() == Some(true))
            }
            Query::Possibility(p) => {
                Answer::YesNo(self.target.project(p)?.is_constant() != Some(false))
            }
            Query::SubcubeParity(p) => Answer::Bit(self.target.project(p)?.parity()),
            Query::Equivalence(g) => {
                if g.arity() != n {
                    return Err(Error::ArityMismatch { expected: n, got: g.arity() });
                }
                let basis = self.basis.as_ref().ok_or(Error::ImproperEquivalence)?;
                if !g.is_over_basis(basis) {
                    return Err(Error::ImproperEquivalence);
                }
                match self.target.first_disagreement(&g.truth_table()?)? {
                    None => Answer::EquivalenceYes,
                    Some(y) => Answer::Counterexample(y),
                }
            }
        };
        self.counters.bump(kind);
        if let Some(log) = &mut self.log {
            log.push(format!("{} {} -> {}", kind.token(), query.payload(), answer.render()));
        }
        Ok(answer)
    }

    pub fn membership(&mut self, a: &TotalAssignment) -> Result<bool> {
        Ok(self.answer(&Query::Membership(*a))?.as_bit().expect("membership answers a bit"))
    }

    pub fn subcube_identity(&mut self, p: &PartialAssignment) -> Result<bool> {
        match self.answer(&Query::SubcubeIdentity(*p))? {
            Answer::YesNo(b) => Ok(b),
            // generalized answers on total assignments still mean "constant"
            Answer::Bit(_) => Ok(true),
            _ => unreachable!("subcube identity answers yes/no"),
        }
    }
}

/// Model a subcube identity query with one necessity and at most one
/// possibility query: necessity "yes" or possibility "no" both mean the
/// projection is constant.
pub fn si_from_np(session: &mut OracleSession, p: &PartialAssignment) -> Result<Answer> {
    if session.answer(&Query::Necessity(*p))?.as_yes_no() == Some(true) {
        return Ok(Answer::YesNo(true));
    }
    if session.answer(&Query::Possibility(*p))?.as_yes_no() == Some(false) {
        return Ok(Answer::YesNo(true));
    }
    Ok(Answer::YesNo(false))
}

/// Model a necessity query with at most one subcube identity and one
/// membership query. Total assignments need a single membership query; for
/// the rest, a "no" identity answer refutes necessity outright, and a "yes"
/// lets one extension's value decide.
pub fn necessity_from_si_m(session: &mut OracleSession, p: &PartialAssignment) -> Result<Answer> {
    if p.is_total() {
        let bit = session.membership(&p.extend(0))?;
        return Ok(Answer::YesNo(bit));
    }
    if !session.subcube_identity(p)? {
        return Ok(Answer::YesNo(false));
    }
    let bit = session.membership(&p.extend(0))?;
    Ok(Answer::YesNo(bit))
}

/// Model a possibility query with at most one subcube identity and one
/// membership query. A non-constant projection cannot be identically zero,
/// so a "no" identity answer means possibility holds.
pub fn possibility_from_si_m(session: &mut OracleSession, p: &PartialAssignment) -> Result<Answer> {
    if p.is_total() {
        let bit = session.membership(&p.extend(0))?;
        return Ok(Answer::YesNo(bit));
    }
    if !session.subcube_identity(p)? {
        return Ok(Answer::YesNo(true));
    }
    let bit = session.membership(&p.extend(0))?;
    Ok(Answer::YesNo(bit))
}

/// Walk down from a subcube on which the target is non-constant to a total
/// assignment whose value differs from `hypothesis_value` (the hypothesis's
/// constant value there). Fixes the lowest-index starred variable at each
/// step; at most `2s` subcube identity and `s + 1` membership queries for `s`
/// stars.
pub fn bisect(
    session: &mut OracleSession,
    p: &PartialAssignment,
    hypothesis_value: bool,
) -> Result<TotalAssignment> {
    if session.target.project(p)?.is_constant().is_some() {
        return Err(Error::BisectConstant);
    }
    let mut p = *p;
    loop {
        let star = p.stars().iter().next().expect("non-constant projection has stars");
        if p.star_count() == 1 {
            // the two extensions take both values; one membership picks the
            // disagreeing side
            let e0 = p.with_fixed(star, false).extend(0);
            let bit = session.membership(&e0)?;
            return Ok(if bit != hypothesis_value { e0 } else { p.with_fixed(star, true).extend(0) });
        }
        let p0 = p.with_fixed(star, false);
        if !session.subcube_identity(&p0)? {
            p = p0;
            continue;
        }
        let p1 = p.with_fixed(star, true);
        if !session.subcube_identity(&p1)? {
            p = p1;
            continue;
        }
        // both halves constant but the whole subcube is not: the halves
        // disagree on all inputs, so one membership query picks a side
        let e0 = p0.extend(0);
        let bit = session.membership(&e0)?;
        return Ok(if bit != hypothesis_value { e0 } else { p1.extend(0) });
    }
}

/// Model an equivalence query with membership and subcube identity queries.
///
/// `test_builder` must supply a checking test for the hypothesis restricted
/// to its essential variables. Phase one replays the test through membership
/// queries (fictitious variables of the hypothesis pinned to zero); phase two
/// runs one subcube identity query per test row with the fictitious variables
/// starred, bisecting to a counterexample on the first "no".
pub fn equivalence_from_m_si(
    session: &mut OracleSession,
    hypothesis: &ReadOnceFormula,
    test_builder: impl Fn(&TruthTable) -> Result<CheckingTest>,
) -> Result<Answer> {
    let n = hypothesis.arity();
    let g = hypothesis.truth_table()?;
    let essential = g.essential_vars();
    let fictitious = VarSet(VarSet::full(n).0 & !essential.0);
    let g_core = g.essential_projection();
    let test = test_builder(&g_core)?;

    // essential variables ascending: position k of a test row is essential
    // variable number k
    let essential_vars: Vec<_> = essential.iter().collect();

    let embed = |row: &TotalAssignment| -> TotalAssignment {
        let mut bits = 0u64;
        for (k, v) in essential_vars.iter().enumerate() {
            if row.bits() >> k & 1 == 1 {
                bits |= 1 << v.index();
            }
        }
        TotalAssignment::new(n, bits)
    };

    for (row, expected) in test.pairs() {
        let x = embed(row);
        if session.membership(&x)? != *expected {
            return Ok(Answer::Counterexample(x));
        }
    }

    for (row, expected) in test.pairs() {
        let x = embed(row);
        let p = PartialAssignment::new(n, essential, x.bits());
        // with no fictitious variables the assignment is total and the
        // identity query would answer yes vacuously
        if p.is_total() {
            continue;
        }
        if !session.subcube_identity(&p)? {
            let y = bisect(session, &p, *expected)?;
            return Ok(Answer::Counterexample(y));
        }
        debug_assert!(fictitious.0 & p.fixed_vars().0 == 0);
    }
    Ok(Answer::EquivalenceYes)
}
