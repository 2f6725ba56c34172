//! Candidate elimination driven by equivalence queries, real or simulated.
//!
//! The driver enumerates every read-once function over the basis at the
//! declared arity, proposes the first surviving candidate, and prunes all
//! candidates inconsistent with each counterexample (a counterexample reveals
//! the target's value at one input). With simulation on, each equivalence
//! query is modeled by membership and subcube identity queries through a
//! checking test, so the real equivalence counter stays at zero.

use crate::checking::checking_test_for;
use crate::error::{Error, Result};
use crate::formula::{Basis, ReadOnceFormula};
use crate::oracle::{equivalence_from_m_si, Answer, OracleSession, Query};

use super::candidates::CandidateSet;

/// Identify the target exactly; see [`learn_via_equivalence_traced`] for the
/// round count.
pub fn learn_via_equivalence(
    session: &mut OracleSession,
    basis: &Basis,
    n: usize,
    simulate: bool,
) -> Result<ReadOnceFormula> {
    learn_via_equivalence_traced(session, basis, n, simulate).map(|(f, _)| f)
}

/// Returns the identified formula and the number of equivalence rounds
/// (queries issued, real or simulated).
pub fn learn_via_equivalence_traced(
    session: &mut OracleSession,
    basis: &Basis,
    n: usize,
    simulate: bool,
) -> Result<(ReadOnceFormula, u64)> {
    if session.arity() != n {
        return Err(Error::ArityMismatch { expected: session.arity(), got: n });
    }
    let candidates = CandidateSet::enumerate(basis, n)?;
    if candidates.is_empty() {
        return Err(Error::PromiseViolation("basis admits no read-once functions".into()));
    }
    let fan_in = basis.max_fan_in();
    let mut alive = vec![true; candidates.len()];
    let mut rounds = 0u64;
    loop {
        let Some(idx) = alive.iter().position(|&a| a) else {
            return Err(Error::PromiseViolation(
                "target is not read-once over the basis".into(),
            ));
        };
        let (_, hypothesis) = &candidates.items()[idx];
        rounds += 1;
        let answer = if simulate {
            equivalence_from_m_si(session, hypothesis, |t| checking_test_for(t, fan_in))?
        } else {
            session.answer(&Query::Equivalence(hypothesis.clone()))?
        };
        match answer {
            Answer::EquivalenceYes => return Ok((hypothesis.clone(), rounds)),
            Answer::Counterexample(y) => {
                let target_value = !candidates.items()[idx].0.get(y.bits());
                for (k, flag) in alive.iter_mut().enumerate() {
                    if *flag && candidates.items()[k].0.get(y.bits()) != target_value {
                        *flag = false;
                    }
                }
            }
            other => {
                return Err(Error::Precondition(format!(
                    "unexpected equivalence answer {other:?}"
                )))
            }
        }
    }
}
