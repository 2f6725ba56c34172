//! Exact identification of non-constant monotone read-once targets with
//! subcube identity queries only.
//!
//! For a monotone function, `f(a) = 1` exactly when `f` is 1 on the whole
//! up-set of `a`, so one subcube identity query on the assignment that pins
//! the 1-positions of `a` and stars the rest simulates a membership query.
//! Every membership-based routine then runs unchanged; this learner detects
//! the essential variables, collects essentiality squares, and reconstructs
//! the conjunction/disjunction tree, spending one identity query per
//! simulated membership.

use crate::error::{Error, Result};
use crate::formula::{CanonicalNode, CanonicalTree};
use crate::oracle::OracleSession;
use crate::truth::{PartialAssignment, TotalAssignment, VarIndex};

use super::reconstruct::reconstruct_with;
use super::MembershipSource;

/// One subcube identity query standing in for `f(a)` on a monotone target:
/// ones pinned, zeros starred; a constant projection means the up-set of `a`
/// is all ones.
pub fn simulate_membership_monotone(
    session: &mut OracleSession,
    a: &TotalAssignment,
) -> Result<bool> {
    let p = PartialAssignment::new(a.arity(), a.support(), a.bits());
    session.subcube_identity(&p)
}

/// Simulated membership that records every answer so the learned tree can be
/// validated against the transcript afterwards.
struct MonotoneSim<'a> {
    session: &'a mut OracleSession,
    answers: &'a mut Vec<(TotalAssignment, bool)>,
}

impl MonotoneSim<'_> {
    fn query_full(&mut self, a: &TotalAssignment) -> Result<bool> {
        let bit = simulate_membership_monotone(self.session, a)?;
        self.answers.push((*a, bit));
        Ok(bit)
    }
}

impl MembershipSource for MonotoneSim<'_> {
    fn arity(&self) -> usize {
        self.session.arity()
    }

    fn query(&mut self, a: &TotalAssignment) -> Result<bool> {
        self.query_full(a)
    }
}

/// Simulated membership over the essential variables only; fictitious
/// variables are pinned to zero.
struct RemappedSim<'a> {
    inner: MonotoneSim<'a>,
    essential: Vec<VarIndex>,
}

impl MembershipSource for RemappedSim<'_> {
    fn arity(&self) -> usize {
        self.essential.len()
    }

    fn query(&mut self, a: &TotalAssignment) -> Result<bool> {
        let mut bits = 0u64;
        for (k, v) in self.essential.iter().enumerate() {
            if a.bits() >> k & 1 == 1 {
                bits |= 1 << v.index();
            }
        }
        let full = TotalAssignment::new(self.inner.session.arity(), bits);
        self.inner.query_full(&full)
    }
}

/// Identify a non-constant read-once target over conjunction and disjunction
/// using subcube identity queries only. Fictitious variables are detected and
/// excluded (the returned tree's leaves are exactly the essential variables);
/// detectable promise violations are reported as errors.
pub fn learn_monotone_si(session: &mut OracleSession, n: usize) -> Result<CanonicalTree> {
    if session.arity() != n {
        return Err(Error::ArityMismatch { expected: session.arity(), got: n });
    }
    // constants are outside the promise: the all-stars query exposes them
    if session.subcube_identity(&PartialAssignment::all_stars(n))? {
        return Err(Error::PromiseViolation("target is constant".into()));
    }

    // essential-variable detection: scan bases ascending until some slice
    // shows a value swing across the variable
    let mut answers: Vec<(TotalAssignment, bool)> = Vec::new();
    let mut essential = Vec::new();
    for i in 0..n {
        let mut sim = MonotoneSim { session: &mut *session, answers: &mut answers };
        'bases: for pattern in 0..1u64 << (n - 1) {
            let mut bits = 0u64;
            let mut k = 0;
            for pos in 0..n {
                if pos == i {
                    continue;
                }
                if pattern >> k & 1 == 1 {
                    bits |= 1 << pos;
                }
                k += 1;
            }
            let low = sim.query_full(&TotalAssignment::new(n, bits))?;
            let high = sim.query_full(&TotalAssignment::new(n, bits | 1 << i))?;
            if low != high {
                if low && !high {
                    return Err(Error::PromiseViolation("target is not monotone".into()));
                }
                essential.push(VarIndex(i));
                break 'bases;
            }
        }
    }

    if essential.is_empty() {
        return Err(Error::PromiseViolation(
            "non-constant target has no detectable essential variable".into(),
        ));
    }
    let tree = if essential.len() == 1 {
        CanonicalTree::Node(CanonicalNode::Literal { var: VarIndex(0), positive: true })
    } else {
        let mut sim = RemappedSim {
            inner: MonotoneSim { session: &mut *session, answers: &mut answers },
            essential: essential.clone(),
        };
        reconstruct_with(&mut sim)?
    };

    // a tree outside {AND, OR} with positive literals breaks the promise
    fn check_monotone(node: &CanonicalNode) -> Result<()> {
        match node {
            CanonicalNode::Literal { positive: true, .. } => Ok(()),
            CanonicalNode::Literal { positive: false, .. } => {
                Err(Error::PromiseViolation("target is not monotone".into()))
            }
            CanonicalNode::Gate { op, children } => {
                if op.is_linear() {
                    return Err(Error::PromiseViolation(
                        "target is not read-once over conjunction and disjunction".into(),
                    ));
                }
                children.iter().try_for_each(check_monotone)
            }
        }
    }

    match tree {
        CanonicalTree::Constant(_) => {
            Err(Error::PromiseViolation("target is constant".into()))
        }
        CanonicalTree::Node(node) => {
            check_monotone(&node)?;
            let remapped = remap(node, &essential);
            // replay the transcript against the learned tree: a mismatch
            // proves the target was outside the promised class
            for (a, bit) in &answers {
                if remapped.eval_with(&|v| a.get(v)) != *bit {
                    return Err(Error::PromiseViolation(
                        "learned tree contradicts a recorded answer".into(),
                    ));
                }
            }
            Ok(CanonicalTree::Node(remapped))
        }
    }
}

fn remap(node: CanonicalNode, essential: &[VarIndex]) -> CanonicalNode {
    match node {
        CanonicalNode::Literal { var, positive } => {
            CanonicalNode::Literal { var: essential[var.index()], positive }
        }
        CanonicalNode::Gate { op, children } => CanonicalNode::Gate {
            op,
            children: children.into_iter().map(|c| remap(c, essential)).collect(),
        },
    }
}
