//! Exact identification of read-once Boolean functions with membership and
//! subcube identity queries.
//!
//! The crate is organized around a single semantic substrate ([`TruthTable`],
//! [`PartialAssignment`] and projections, module [`truth`]) on top of which sit:
//!
//! - [`formula`]: read-once formulas over arbitrary finite bases, canonical
//!   trees over the two-input basis, glueings, and the cotree/cograph bijection;
//! - [`oracle`]: the six query oracles over a hidden truth table, query
//!   accounting, and the adapters that model one query type with another;
//! - [`learner`]: the identification algorithms: square-set reconstruction for
//!   the two-input basis, the subcube-identity-only learner for monotone
//!   targets, and a candidate-elimination driver over simulated equivalence
//!   queries;
//! - [`checking`]: checking tests, essentiality hypercube sets,
//!   l-satisfiability and discriminatory-function detection;
//! - [`lowerbound`]: the threshold-function family whose exact identification
//!   needs exponentially many membership and subcube identity queries, with an
//!   adversary harness that demonstrates the bound empirically.

pub mod checking;
pub mod error;
pub mod formula;
pub mod learner;
pub mod lowerbound;
pub mod oracle;
pub mod truth;

pub use error::{Error, Result};
pub use truth::{PartialAssignment, TotalAssignment, TruthTable, VarIndex, VarSet};
