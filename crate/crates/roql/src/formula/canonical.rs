//! Canonical trees for read-once functions over the two-input basis.
//!
//! A canonical tree is a rooted tree whose internal vertices carry `AND`,
//! `OR`, `XOR` or `NXOR`, whose leaves carry distinct literals, and which
//! satisfies:
//!
//! 1. a vertex labeled 0 or 1 is the only vertex of its tree;
//! 2. leaves carry distinct literals;
//! 3. internal vertices have fan-in at least two;
//! 4. adjacent vertices never carry identical labels, nor two (possibly
//!    different) linear labels;
//! 5. a child of a linear vertex is never an `AND` vertex or a negated
//!    literal.
//!
//! Every read-once function over the two-input basis has exactly one such
//! tree (children here are normalized by sorting on the smallest leaf index,
//! making tree equality plain structural equality). `canonicalize_b2` computes
//! it from any read-once formula with fan-in at most two.

use std::fmt;

use crate::error::{Error, Result};
use crate::truth::{TotalAssignment, TruthTable, VarIndex, VarSet};

use super::cograph::GlueTree;
use super::{Basis, FormulaNode, ReadOnceFormula};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateOp {
    And,
    Or,
    Xor,
    Nxor,
}

impl GateOp {
    pub fn is_linear(self) -> bool {
        matches!(self, GateOp::Xor | GateOp::Nxor)
    }

    fn name(self) -> &'static str {
        match self {
            GateOp::And => "AND",
            GateOp::Or => "OR",
            GateOp::Xor => "XOR",
            GateOp::Nxor => "NXOR",
        }
    }
}

/// A non-constant canonical tree: a literal or an internal gate.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CanonicalNode {
    Literal { var: VarIndex, positive: bool },
    Gate { op: GateOp, children: Vec<CanonicalNode> },
}

/// A canonical tree; constants are a single 0/1 vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CanonicalTree {
    Constant(bool),
    Node(CanonicalNode),
}

impl CanonicalNode {
    pub fn literal(var: VarIndex, positive: bool) -> Self {
        CanonicalNode::Literal { var, positive }
    }

    /// Smallest leaf index in the subtree; the sort key for children.
    pub fn min_var(&self) -> VarIndex {
        match self {
            CanonicalNode::Literal { var, .. } => *var,
            CanonicalNode::Gate { children, .. } => {
                children.iter().map(|c| c.min_var()).min().expect("gate has children")
            }
        }
    }

    pub fn leaf_vars(&self) -> VarSet {
        match self {
            CanonicalNode::Literal { var, .. } => VarSet::singleton(*var),
            CanonicalNode::Gate { children, .. } => children
                .iter()
                .fold(VarSet::EMPTY, |acc, c| acc.union(c.leaf_vars())),
        }
    }

    pub fn eval(&self, a: &TotalAssignment) -> bool {
        self.eval_with(&|v| a.get(v))
    }

    /// Evaluate with an arbitrary leaf lookup; used when leaves address a
    /// different variable space than the assignment at hand.
    pub fn eval_with(&self, lookup: &dyn Fn(VarIndex) -> bool) -> bool {
        match self {
            CanonicalNode::Literal { var, positive } => lookup(*var) == *positive,
            CanonicalNode::Gate { op, children } => {
                let mut vals = children.iter().map(|c| c.eval_with(lookup));
                match op {
                    GateOp::And => vals.all(|v| v),
                    GateOp::Or => vals.any(|v| v),
                    GateOp::Xor => vals.fold(false, |x, y| x ^ y),
                    GateOp::Nxor => !vals.fold(false, |x, y| x ^ y),
                }
            }
        }
    }

    /// The dual tree: negates the represented function in place.
    pub fn negate(&self) -> CanonicalNode {
        match self {
            CanonicalNode::Literal { var, positive } => {
                CanonicalNode::Literal { var: *var, positive: !positive }
            }
            CanonicalNode::Gate { op, children } => match op {
                GateOp::And => CanonicalNode::Gate {
                    op: GateOp::Or,
                    children: children.iter().map(|c| c.negate()).collect(),
                },
                GateOp::Or => CanonicalNode::Gate {
                    op: GateOp::And,
                    children: children.iter().map(|c| c.negate()).collect(),
                },
                GateOp::Xor => CanonicalNode::Gate { op: GateOp::Nxor, children: children.clone() },
                GateOp::Nxor => CanonicalNode::Gate { op: GateOp::Xor, children: children.clone() },
            },
        }
    }

    fn fmt_rec(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CanonicalNode::Literal { var, positive } => {
                if !positive {
                    write!(f, "~")?;
                }
                write!(f, "{var}")
            }
            CanonicalNode::Gate { op, children } => {
                write!(f, "{}(", op.name())?;
                for (k, c) in children.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    c.fmt_rec(f)?;
                }
                write!(f, ")")
            }
        }
    }
}

impl CanonicalTree {
    pub fn eval(&self, a: &TotalAssignment) -> bool {
        match self {
            CanonicalTree::Constant(b) => *b,
            CanonicalTree::Node(node) => node.eval(a),
        }
    }

    pub fn truth_table(&self, n: usize) -> Result<TruthTable> {
        TruthTable::from_fn(n, |a| self.eval(&a))
    }

    pub fn leaf_vars(&self) -> VarSet {
        match self {
            CanonicalTree::Constant(_) => VarSet::EMPTY,
            CanonicalTree::Node(node) => node.leaf_vars(),
        }
    }

    /// Machine check of the five canonicality conditions plus the child-order
    /// normalization used for structural equality.
    pub fn check_conditions(&self) -> std::result::Result<(), String> {
        fn rec(
            node: &CanonicalNode,
            parent: Option<GateOp>,
            seen: &mut VarSet,
        ) -> std::result::Result<(), String> {
            match node {
                CanonicalNode::Literal { var, positive } => {
                    if seen.contains(*var) {
                        return Err(format!("leaf {var} repeated"));
                    }
                    seen.insert(*var);
                    if let Some(p) = parent {
                        if p.is_linear() && !positive {
                            return Err(format!("negated literal {var} under a linear vertex"));
                        }
                    }
                    Ok(())
                }
                CanonicalNode::Gate { op, children } => {
                    if children.len() < 2 {
                        return Err(format!("{} vertex with fewer than two children", op.name()));
                    }
                    if let Some(p) = parent {
                        if p == *op {
                            return Err(format!("adjacent vertices both labeled {}", op.name()));
                        }
                        if p.is_linear() && op.is_linear() {
                            return Err("adjacent linear vertices".into());
                        }
                        if p.is_linear() && *op == GateOp::And {
                            return Err("AND vertex under a linear vertex".into());
                        }
                    }
                    let mut last: Option<VarIndex> = None;
                    for c in children {
                        let mv = c.min_var();
                        if let Some(prev) = last {
                            if mv <= prev {
                                return Err("children not sorted by smallest leaf".into());
                            }
                        }
                        last = Some(mv);
                        rec(c, Some(*op), seen)?;
                    }
                    Ok(())
                }
            }
        }
        match self {
            CanonicalTree::Constant(_) => Ok(()),
            CanonicalTree::Node(node) => {
                let mut seen = VarSet::EMPTY;
                rec(node, None, &mut seen)
            }
        }
    }

    /// Re-express the tree as a read-once formula over the two-input basis
    /// (n-ary gates become right-nested binary chains; NXOR becomes a negated
    /// XOR chain).
    pub fn to_formula(&self, n: usize, basis: &Basis) -> Result<ReadOnceFormula> {
        let gate = |table: u64, arity: usize| -> Result<super::BasisFunction> {
            let t = TruthTable::from_bits_u64(arity, table)?;
            basis
                .lookup(&t)
                .cloned()
                .ok_or_else(|| Error::GateNotInBasis(format!("g{{{table:x},{arity}}}")))
        };
        fn rec(
            node: &CanonicalNode,
            gate: &dyn Fn(u64, usize) -> Result<super::BasisFunction>,
        ) -> Result<FormulaNode> {
            Ok(match node {
                CanonicalNode::Literal { var, positive } => {
                    if *positive {
                        FormulaNode::Var(*var)
                    } else {
                        FormulaNode::Gate {
                            func: gate(0b01, 1)?,
                            children: vec![FormulaNode::Var(*var)],
                        }
                    }
                }
                CanonicalNode::Gate { op, children } => {
                    let (table, wrap_not) = match op {
                        GateOp::And => (0b1000u64, false),
                        GateOp::Or => (0b1110, false),
                        GateOp::Xor => (0b0110, false),
                        GateOp::Nxor => (0b0110, true),
                    };
                    let mut nodes: Vec<FormulaNode> =
                        children.iter().map(|c| rec(c, gate)).collect::<Result<_>>()?;
                    let mut acc = nodes.pop().expect("gate has children");
                    while let Some(prev) = nodes.pop() {
                        acc = FormulaNode::Gate { func: gate(table, 2)?, children: vec![prev, acc] };
                    }
                    if wrap_not {
                        acc = FormulaNode::Gate { func: gate(0b01, 1)?, children: vec![acc] };
                    }
                    acc
                }
            })
        }
        let root = match self {
            CanonicalTree::Constant(b) => FormulaNode::Gate {
                func: basis
                    .lookup(&TruthTable::constant(0, *b)?)
                    .cloned()
                    .ok_or_else(|| Error::GateNotInBasis(if *b { "1" } else { "0" }.into()))?,
                children: vec![],
            },
            CanonicalTree::Node(node) => rec(node, &gate)?,
        };
        ReadOnceFormula::new(n, root)
    }
}

impl fmt::Display for CanonicalTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CanonicalTree::Constant(b) => write!(f, "{}", *b as u8),
            CanonicalTree::Node(node) => node.fmt_rec(f),
        }
    }
}

fn sort_children(mut children: Vec<CanonicalNode>) -> Vec<CanonicalNode> {
    children.sort_by_key(|c| c.min_var());
    children
}

fn combine_and(a: CanonicalTree, b: CanonicalTree) -> CanonicalTree {
    match (a, b) {
        (CanonicalTree::Constant(false), _) | (_, CanonicalTree::Constant(false)) => {
            CanonicalTree::Constant(false)
        }
        (CanonicalTree::Constant(true), x) | (x, CanonicalTree::Constant(true)) => x,
        (CanonicalTree::Node(x), CanonicalTree::Node(y)) => {
            let mut children = Vec::new();
            for node in [x, y] {
                match node {
                    CanonicalNode::Gate { op: GateOp::And, children: cs } => children.extend(cs),
                    other => children.push(other),
                }
            }
            CanonicalTree::Node(CanonicalNode::Gate {
                op: GateOp::And,
                children: sort_children(children),
            })
        }
    }
}

fn combine_or(a: CanonicalTree, b: CanonicalTree) -> CanonicalTree {
    match (a, b) {
        (CanonicalTree::Constant(true), _) | (_, CanonicalTree::Constant(true)) => {
            CanonicalTree::Constant(true)
        }
        (CanonicalTree::Constant(false), x) | (x, CanonicalTree::Constant(false)) => x,
        (CanonicalTree::Node(x), CanonicalTree::Node(y)) => {
            let mut children = Vec::new();
            for node in [x, y] {
                match node {
                    CanonicalNode::Gate { op: GateOp::Or, children: cs } => children.extend(cs),
                    other => children.push(other),
                }
            }
            CanonicalTree::Node(CanonicalNode::Gate {
                op: GateOp::Or,
                children: sort_children(children),
            })
        }
    }
}

fn negate_tree(t: CanonicalTree) -> CanonicalTree {
    match t {
        CanonicalTree::Constant(b) => CanonicalTree::Constant(!b),
        CanonicalTree::Node(node) => CanonicalTree::Node(node.negate()),
    }
}

/// Absorb a subtree into the child list of a linear vertex: negations fold
/// into the running parity, AND children flip into OR by De Morgan (also a
/// parity flip), and nested linear vertices splice their children in.
fn linear_parts(node: CanonicalNode, children: &mut Vec<CanonicalNode>, parity: &mut bool) {
    match node {
        CanonicalNode::Literal { var, positive } => {
            if !positive {
                *parity = !*parity;
            }
            children.push(CanonicalNode::Literal { var, positive: true });
        }
        CanonicalNode::Gate { op: GateOp::Xor, children: cs } => children.extend(cs),
        CanonicalNode::Gate { op: GateOp::Nxor, children: cs } => {
            *parity = !*parity;
            children.extend(cs);
        }
        CanonicalNode::Gate { op: GateOp::And, children: cs } => {
            *parity = !*parity;
            let negated: Vec<CanonicalNode> = cs.into_iter().map(|c| c.negate()).collect();
            children.push(CanonicalNode::Gate { op: GateOp::Or, children: negated });
        }
        or @ CanonicalNode::Gate { op: GateOp::Or, .. } => children.push(or),
    }
}

fn combine_xor(a: CanonicalTree, b: CanonicalTree, mut parity: bool) -> CanonicalTree {
    let (a, b) = match (a, b) {
        (CanonicalTree::Constant(ca), CanonicalTree::Constant(cb)) => {
            return CanonicalTree::Constant(ca ^ cb ^ parity);
        }
        (CanonicalTree::Constant(c), CanonicalTree::Node(x))
        | (CanonicalTree::Node(x), CanonicalTree::Constant(c)) => {
            let t = CanonicalTree::Node(x);
            return if c ^ parity { negate_tree(t) } else { t };
        }
        (CanonicalTree::Node(x), CanonicalTree::Node(y)) => (x, y),
    };
    let mut children = Vec::new();
    linear_parts(a, &mut children, &mut parity);
    linear_parts(b, &mut children, &mut parity);
    let op = if parity { GateOp::Nxor } else { GateOp::Xor };
    CanonicalTree::Node(CanonicalNode::Gate { op, children: sort_children(children) })
}

/// Transform a read-once formula with fan-in at most two into the canonical
/// tree of the same function (over the formula's essential variables).
pub fn canonicalize_b2(formula: &ReadOnceFormula) -> Result<CanonicalTree> {
    if formula.max_fan_in() > 2 {
        return Err(Error::Precondition(
            "canonical form is defined for fan-in at most two".into(),
        ));
    }

    fn rec(node: &FormulaNode) -> CanonicalTree {
        match node {
            FormulaNode::Var(v) => {
                CanonicalTree::Node(CanonicalNode::Literal { var: *v, positive: true })
            }
            FormulaNode::Gate { func, children } => {
                let table = func.table();
                let subs: Vec<CanonicalTree> = children.iter().map(rec).collect();
                let ess: Vec<usize> =
                    table.essential_vars().iter().map(|v| v.index()).collect();
                match ess.len() {
                    0 => CanonicalTree::Constant(table.get(0)),
                    1 => {
                        let pos = ess[0];
                        let sub = subs[pos].clone();
                        // identity on that argument iff the value at "only
                        // this argument set" is 1
                        if table.get(1 << pos) {
                            sub
                        } else {
                            negate_tree(sub)
                        }
                    }
                    _ => {
                        let [a, b] = <[CanonicalTree; 2]>::try_from(subs).expect("fan-in two");
                        let bits: u64 = (0..4).map(|i| (table.get(i) as u64) << i).sum();
                        match bits {
                            0b0110 => combine_xor(a, b, false),
                            0b1001 => combine_xor(a, b, true),
                            _ => {
                                // AND-type: a single odd one out at (da, db)
                                let ones = bits.count_ones();
                                let odd =
                                    if ones == 1 { bits.trailing_zeros() } else { (!bits & 0xF).trailing_zeros() };
                                let (da, db) = (odd & 1 == 1, odd >> 1 & 1 == 1);
                                if ones == 1 {
                                    // (a ^ da) AND (b ^ db)
                                    let a = if da { a } else { negate_tree(a) };
                                    let b = if db { b } else { negate_tree(b) };
                                    combine_and(a, b)
                                } else {
                                    // zero at (da, db): (a ^ !da) OR (b ^ !db)
                                    let a = if da { negate_tree(a) } else { a };
                                    let b = if db { negate_tree(b) } else { b };
                                    combine_or(a, b)
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    Ok(rec(formula.root()))
}

/// The glueing of a canonical tree: linear labels become 0, non-linear labels
/// become 1, adjacent 1-vertices are contracted, and literal signs are
/// dropped. Constants and single literals have no glueing.
pub fn glueing(tree: &CanonicalTree) -> Result<GlueTree> {
    fn rec(node: &CanonicalNode) -> GlueTree {
        match node {
            CanonicalNode::Literal { var, .. } => GlueTree::Leaf(*var),
            CanonicalNode::Gate { op, children } => {
                let label = !op.is_linear();
                let mut out = Vec::new();
                for c in children {
                    let g = rec(c);
                    match g {
                        // contract adjacent 1-vertices
                        GlueTree::Node { label: cl, children: cs } if label && cl => {
                            out.extend(cs)
                        }
                        other => out.push(other),
                    }
                }
                GlueTree::node(label, out)
            }
        }
    }
    match tree {
        CanonicalTree::Constant(_) | CanonicalTree::Node(CanonicalNode::Literal { .. }) => {
            Err(Error::NoGlueing)
        }
        CanonicalTree::Node(node) => Ok(rec(node)),
    }
}
