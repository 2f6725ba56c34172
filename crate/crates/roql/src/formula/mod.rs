//! Read-once formulas over arbitrary finite bases, canonical trees over the
//! two-input basis, glueings, and the cotree/cograph bijection.

mod canonical;
mod cograph;
mod parse;

pub use canonical::{canonicalize_b2, glueing, CanonicalNode, CanonicalTree, GateOp};
pub use cograph::{cograph_reduce, cograph_to_cotree, cotree_to_cograph, Cograph, GlueTree};
pub use parse::parse_formula;

use std::fmt;

use crate::error::{Error, Result};
use crate::truth::{TotalAssignment, TruthTable, VarIndex, VarSet};

/// One gate of a basis: a named Boolean function given by its truth table.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasisFunction {
    name: String,
    table: TruthTable,
}

impl BasisFunction {
    pub fn new(name: impl Into<String>, table: TruthTable) -> Self {
        BasisFunction { name: name.into(), table }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.table.arity()
    }

    pub fn table(&self) -> &TruthTable {
        &self.table
    }
}

/// A finite set of gates; `max_fan_in` is the bound `l` used by checking
/// tests and the equivalence-modeling adapter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Basis {
    name: String,
    functions: Vec<BasisFunction>,
}

impl Basis {
    pub fn new(name: impl Into<String>, functions: Vec<BasisFunction>) -> Self {
        Basis { name: name.into(), functions }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn functions(&self) -> &[BasisFunction] {
        &self.functions
    }

    pub fn max_fan_in(&self) -> usize {
        self.functions.iter().map(|f| f.arity()).max().unwrap_or(0)
    }

    /// Find a member with this exact truth table.
    pub fn lookup(&self, table: &TruthTable) -> Option<&BasisFunction> {
        self.functions.iter().find(|f| f.table() == table)
    }

    pub fn contains_table(&self, table: &TruthTable) -> bool {
        self.lookup(table).is_some()
    }

    /// A stable fingerprint used as a memoization key.
    pub fn fingerprint(&self) -> u64 {
        use std::collections::hash_map::DefaultHasher;
        use std::hash::{Hash, Hasher};
        let mut tables: Vec<&TruthTable> = self.functions.iter().map(|f| f.table()).collect();
        tables.sort();
        let mut h = DefaultHasher::new();
        tables.hash(&mut h);
        h.finish()
    }

    /// All functions of fan-in at most `l` (including the nullary constants).
    pub fn b_l(l: usize) -> Self {
        let mut functions = Vec::new();
        for arity in 0..=l {
            for bits in 0..1u64 << (1 << arity) {
                let table = TruthTable::from_bits_u64(arity, bits).unwrap();
                functions.push(BasisFunction::new(builtin_gate_name(arity, bits), table));
            }
        }
        Basis::new(format!("b{l}"), functions)
    }

    /// The basis of all functions of fan-in two or less.
    pub fn b2() -> Self {
        Basis::b_l(2)
    }

    /// Just binary conjunction and disjunction.
    pub fn and_or() -> Self {
        Basis::new(
            "and-or",
            vec![
                BasisFunction::new("and", TruthTable::from_bits_u64(2, 0b1000).unwrap()),
                BasisFunction::new("or", TruthTable::from_bits_u64(2, 0b1110).unwrap()),
            ],
        )
    }
}

fn builtin_gate_name(arity: usize, bits: u64) -> String {
    match (arity, bits) {
        (0, 0) => "0".into(),
        (0, 1) => "1".into(),
        (1, 0b01) => "not".into(),
        (1, 0b10) => "id".into(),
        (2, 0b1000) => "and".into(),
        (2, 0b1110) => "or".into(),
        (2, 0b0110) => "xor".into(),
        (2, 0b1001) => "nxor".into(),
        _ => format!("g{arity}_{bits:x}"),
    }
}

/// A node of a read-once formula tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FormulaNode {
    Var(VarIndex),
    Gate { func: BasisFunction, children: Vec<FormulaNode> },
}

impl FormulaNode {
    fn collect_vars(&self, out: &mut Vec<VarIndex>) {
        match self {
            FormulaNode::Var(v) => out.push(*v),
            FormulaNode::Gate { children, .. } => {
                for c in children {
                    c.collect_vars(out);
                }
            }
        }
    }

    fn eval(&self, a: &TotalAssignment) -> bool {
        match self {
            FormulaNode::Var(v) => a.get(*v),
            FormulaNode::Gate { func, children } => {
                let mut idx = 0u64;
                for (k, c) in children.iter().enumerate() {
                    if c.eval(a) {
                        idx |= 1 << k;
                    }
                }
                func.table().get(idx)
            }
        }
    }

    fn max_fan_in(&self) -> usize {
        match self {
            FormulaNode::Var(_) => 0,
            FormulaNode::Gate { func, children } => children
                .iter()
                .map(|c| c.max_fan_in())
                .max()
                .unwrap_or(0)
                .max(func.arity()),
        }
    }

    fn fmt_rec(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormulaNode::Var(v) => write!(f, "{v}"),
            FormulaNode::Gate { func, children } => {
                write!(f, "{}(", func.name())?;
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

/// A read-once formula with a declared ambient arity: every variable appears
/// at most once among the leaves, and variables that never appear are
/// fictitious for the represented function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReadOnceFormula {
    n: usize,
    root: FormulaNode,
}

impl ReadOnceFormula {
    pub fn new(n: usize, root: FormulaNode) -> Result<Self> {
        let mut vars = Vec::new();
        root.collect_vars(&mut vars);
        let mut seen = VarSet::EMPTY;
        for v in vars {
            if v.0 >= n {
                return Err(Error::Precondition(format!("{v} out of range for arity {n}")));
            }
            if seen.contains(v) {
                return Err(Error::RepeatedVariable(v));
            }
            seen.insert(v);
        }
        Ok(ReadOnceFormula { n, root })
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn root(&self) -> &FormulaNode {
        &self.root
    }

    /// Variables appearing among the leaves.
    pub fn leaf_vars(&self) -> VarSet {
        let mut vars = Vec::new();
        self.root.collect_vars(&mut vars);
        vars.into_iter().collect()
    }

    pub fn max_fan_in(&self) -> usize {
        self.root.max_fan_in()
    }

    /// True when every gate's truth table appears in `basis`.
    pub fn is_over_basis(&self, basis: &Basis) -> bool {
        fn rec(node: &FormulaNode, basis: &Basis) -> bool {
            match node {
                FormulaNode::Var(_) => true,
                FormulaNode::Gate { func, children } => {
                    basis.contains_table(func.table()) && children.iter().all(|c| rec(c, basis))
                }
            }
        }
        rec(&self.root, basis)
    }

    pub fn eval(&self, a: &TotalAssignment) -> Result<bool> {
        if a.arity() != self.n {
            return Err(Error::ArityMismatch { expected: self.n, got: a.arity() });
        }
        Ok(self.root.eval(a))
    }

    /// Tabulate the formula over all `2^n` inputs.
    pub fn truth_table(&self) -> Result<TruthTable> {
        fn rec(node: &FormulaNode, n: usize) -> Result<TruthTable> {
            match node {
                FormulaNode::Var(v) => TruthTable::var(n, *v),
                FormulaNode::Gate { func, children } => {
                    let tables: Vec<TruthTable> =
                        children.iter().map(|c| rec(c, n)).collect::<Result<_>>()?;
                    TruthTable::compose_gate(func.table(), &tables, n)
                }
            }
        }
        rec(&self.root, self.n)
    }
}

impl fmt::Display for ReadOnceFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.fmt_rec(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_examples() {
        let b2 = Basis::b2();
        let f = parse_formula("(x1 & x2)", 2, &b2).unwrap();
        assert!(f.eval(&TotalAssignment::new(2, 0b11)).unwrap());
        assert!(!f.eval(&TotalAssignment::new(2, 0b01)).unwrap());

        let g = parse_formula("(x1 ^ x2)", 2, &b2).unwrap();
        assert!(!g.eval(&TotalAssignment::new(2, 0b11)).unwrap());
    }

    #[test]
    fn truth_table_of_lone_variable() {
        let b2 = Basis::b2();
        let f = parse_formula("x1", 2, &b2).unwrap();
        let t = f.truth_table().unwrap();
        // index order 00,10,01,11 -> 0,1,0,1
        assert_eq!(t, TruthTable::from_bits_u64(2, 0b1010).unwrap());
        assert_eq!(f.leaf_vars(), VarSet::singleton(VarIndex(0)));
    }

    #[test]
    fn truth_table_matches_eval() {
        let b2 = Basis::b2();
        let f = parse_formula("((x1 | ~x2) ^ (x3 & x4))", 4, &b2).unwrap();
        let t = f.truth_table().unwrap();
        for idx in 0..16u64 {
            let a = TotalAssignment::new(4, idx);
            assert_eq!(t.get(idx), f.eval(&a).unwrap());
        }
    }

    #[test]
    fn basis_fan_in() {
        assert_eq!(Basis::b2().max_fan_in(), 2);
        assert_eq!(Basis::and_or().max_fan_in(), 2);
        assert_eq!(Basis::b_l(3).functions().len(), 2 + 4 + 16 + 256);
    }
}
