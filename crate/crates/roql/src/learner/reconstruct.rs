//! Reconstruction of the canonical tree of a read-once function over the
//! two-input basis from the values on an essentiality square set.
//!
//! The pipeline: squares determine a glueing (linearity of pairwise
//! projections gives a cograph, hence a cotree); each 1-vertex whose children
//! are leaves is a conjunction/disjunction fragment recovered from the
//! squares' sign and odd-one-out structure; each fully resolved 0-vertex is
//! replaced by a fresh variable standing for the XOR of its parts, which
//! turns the square set for the current function into one for a smaller
//! function, and reconstruction continues. Literal signs on fresh variables
//! decide XOR vs NXOR; the label at the root is fixed by a single stored
//! function value.

use crate::error::{Error, Result};
use crate::formula::{
    cograph_to_cotree, CanonicalNode, CanonicalTree, Cograph, GateOp, GlueTree,
};
use crate::oracle::OracleSession;
use crate::truth::{TotalAssignment, TruthTable, VarIndex};

use super::{EssentialitySquare, MembershipSource, SquareSet};

/// Whether unambiguously restoring a fragment may use the canonical-tree
/// constraint (no AND directly under a linear vertex) or must spend a stored
/// function value (at the root there is no such constraint).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FragmentContext {
    Root,
    UnderLinear,
}

/// Build the glueing of the target's canonical tree from a complete square
/// set: pairs with non-linear projections become edges, and the resulting
/// cograph converts to its cotree.
pub fn reconstruct_glueing(squares: &SquareSet) -> Result<GlueTree> {
    let n = squares.arity();
    let verts: Vec<VarIndex> = (0..n).map(VarIndex).collect();
    let mut edges = Vec::new();
    for sq in squares.squares() {
        if !sq.is_linear() {
            edges.push(sq.vars());
        }
    }
    let graph = Cograph::new(verts, edges);
    cograph_to_cotree(&graph).map_err(|e| match e {
        Error::NotCograph => {
            Error::PromiseViolation("target is not read-once over the two-input basis".into())
        }
        other => other,
    })
}

fn monotone_in(t: &TruthTable, var: usize) -> bool {
    let step = 1u64 << var;
    (0..4u64).all(|idx| idx & step != 0 || t.get(idx) <= t.get(idx | step))
}

fn antimonotone_in(t: &TruthTable, var: usize) -> bool {
    let step = 1u64 << var;
    (0..4u64).all(|idx| idx & step != 0 || t.get(idx) >= t.get(idx | step))
}

/// The unique input of an AND-type two-variable function whose value differs
/// from the other three.
fn odd_one_out(t: &TruthTable) -> Result<(bool, bool)> {
    let bits: u64 = (0..4).map(|k| (t.get(k) as u64) << k).sum();
    let idx = match bits.count_ones() {
        1 => bits.trailing_zeros(),
        3 => (!bits & 0xF).trailing_zeros(),
        _ => {
            return Err(Error::InconsistentSquares(format!(
                "projection {bits:04b} is not of conjunction type"
            )))
        }
    };
    Ok((idx & 1 == 1, idx >> 1 & 1 == 1))
}

fn square_for(
    squares: &SquareSet,
    a: VarIndex,
    b: VarIndex,
) -> Result<&EssentialitySquare> {
    squares.get(a, b).ok_or_else(|| {
        Error::InconsistentSquares(format!("missing square for ({a}, {b})"))
    })
}

/// Reconstruct the conjunction/disjunction fragment over `leaves` (the
/// children of a 1-labeled glueing vertex, all of them leaves).
///
/// Step one recovers the two antipodal literal-sign vectors from the
/// monotonicity pattern of each pair's projection; step two reads each
/// pair's gate label off the projection's odd value and assembles the tree
/// through the cotree bijection; the final sign choice falls to the
/// canonical-tree constraint or, at the root, to one stored value.
pub fn reconstruct_fragment(
    squares: &SquareSet,
    leaves: &[VarIndex],
    context: FragmentContext,
) -> Result<CanonicalNode> {
    if leaves.len() < 2 {
        return Err(Error::Precondition("a fragment has at least two leaves".into()));
    }
    let mut leaves = leaves.to_vec();
    leaves.sort();

    // same_sign(a, b): projection monotone in both variables or antimonotone
    // in both
    let same_sign = |a: VarIndex, b: VarIndex| -> Result<bool> {
        let t = square_for(squares, a, b)?.projection();
        let mono = monotone_in(&t, 0) && monotone_in(&t, 1);
        let anti = antimonotone_in(&t, 0) && antimonotone_in(&t, 1);
        Ok(mono || anti)
    };

    // one of the two antipodal sign vectors, anchored at the first leaf
    let mut sign = std::collections::BTreeMap::new();
    sign.insert(leaves[0], true);
    for &l in &leaves[1..] {
        sign.insert(l, same_sign(leaves[0], l)?);
    }
    for (k, &a) in leaves.iter().enumerate() {
        for &b in &leaves[k + 1..] {
            if same_sign(a, b)? != (sign[&a] == sign[&b]) {
                return Err(Error::InconsistentSquares(format!(
                    "sign pattern of ({a}, {b}) contradicts the anchor"
                )));
            }
        }
    }

    // pairwise gate labels: odd value at the sign vector means AND, at its
    // negation OR
    let mut edges = Vec::new();
    for (k, &a) in leaves.iter().enumerate() {
        for &b in &leaves[k + 1..] {
            let sq = square_for(squares, a, b)?;
            let (d_lo, d_hi) = odd_one_out(&sq.projection())?;
            let (lo, hi) = sq.vars();
            let is_and = if (d_lo, d_hi) == (sign[&lo], sign[&hi]) {
                true
            } else if (d_lo, d_hi) == (!sign[&lo], !sign[&hi]) {
                false
            } else {
                return Err(Error::InconsistentSquares(format!(
                    "odd value of ({a}, {b}) matches neither sign variant"
                )));
            };
            if is_and {
                edges.push((a, b));
            }
        }
    }

    let graph = Cograph::new(leaves.clone(), edges);
    let cotree = cograph_to_cotree(&graph).map_err(|e| match e {
        Error::NotCograph => Error::InconsistentSquares(
            "pairwise gate labels do not form a tree".into(),
        ),
        other => other,
    })?;

    fn to_canonical(
        t: &GlueTree,
        sign: &std::collections::BTreeMap<VarIndex, bool>,
    ) -> CanonicalNode {
        match t {
            GlueTree::Leaf(v) => CanonicalNode::Literal { var: *v, positive: sign[v] },
            GlueTree::Node { label, children } => CanonicalNode::Gate {
                op: if *label { GateOp::And } else { GateOp::Or },
                children: children.iter().map(|c| to_canonical(c, sign)).collect(),
            },
        }
    }
    let variant = to_canonical(&cotree, &sign);
    let dual = variant.negate();

    match context {
        FragmentContext::UnderLinear => {
            // a child of a linear vertex cannot be an AND vertex
            let root_op = |n: &CanonicalNode| match n {
                CanonicalNode::Gate { op, .. } => *op,
                CanonicalNode::Literal { .. } => unreachable!("fragments have gates at the root"),
            };
            Ok(if root_op(&variant) == GateOp::Or { variant } else { dual })
        }
        FragmentContext::Root => {
            // spend one stored value: both variants are each other's
            // negation, so exactly one matches
            if squares.arity() != leaves.len() {
                return Err(Error::Precondition(
                    "root fragments must cover every variable".into(),
                ));
            }
            let sq = square_for(squares, leaves[0], leaves[1])?;
            let point = sq.extensions()[0];
            let expected = sq.values()[0];
            Ok(if variant.eval(&point) == expected { variant } else { dual })
        }
    }
}

type SymId = usize;

enum SymInfo {
    Orig(VarIndex),
    Fresh { selector: [Vec<(SymId, bool)>; 2], parts: Vec<Part> },
}

/// One argument of a XOR substitution: a plain variable or a resolved
/// conjunction/disjunction fragment (leaves address symbols).
enum Part {
    Leaf(SymId),
    Fragment(CanonicalNode),
}

enum Work {
    Leaf(SymId),
    Node { nonlinear: bool, children: Vec<Work>, resolved: Option<CanonicalNode> },
}

struct Driver<'a, M> {
    source: &'a mut M,
    original_arity: usize,
    syms: Vec<SymInfo>,
    /// Current variable symbols, ascending; position `k` of the working
    /// function is symbol `current[k]`.
    current: Vec<SymId>,
}

impl<M: MembershipSource> MembershipSource for Driver<'_, M> {
    fn arity(&self) -> usize {
        self.current.len()
    }

    fn query(&mut self, a: &TotalAssignment) -> Result<bool> {
        let grounded = self.ground(a);
        self.source.query(&grounded)
    }
}

impl<M: MembershipSource> Driver<'_, M> {
    fn position(&self, sym: SymId) -> usize {
        self.current.binary_search(&sym).expect("symbol is current")
    }

    /// Translate an assignment over current positions into one over the
    /// original variables, expanding fresh symbols through their selectors.
    fn ground(&self, a: &TotalAssignment) -> TotalAssignment {
        let mut bits = 0u64;
        let mut stack: Vec<(SymId, bool)> = self
            .current
            .iter()
            .enumerate()
            .map(|(k, &s)| (s, a.bits() >> k & 1 == 1))
            .collect();
        while let Some((sym, value)) = stack.pop() {
            match &self.syms[sym] {
                SymInfo::Orig(v) => {
                    if value {
                        bits |= 1 << v.index();
                    }
                }
                SymInfo::Fresh { selector, .. } => {
                    stack.extend(selector[value as usize].iter().copied());
                }
            }
        }
        TotalAssignment::new(self.original_arity, bits)
    }

    /// Truth table of a symbol-space fragment over its own (sorted) leaf
    /// symbols.
    fn fragment_table(frag: &CanonicalNode) -> (Vec<SymId>, TruthTable) {
        let leaf_syms: Vec<SymId> = frag.leaf_vars().iter().map(|v| v.index()).collect();
        let table = TruthTable::from_fn(leaf_syms.len(), |a| {
            frag.eval_with(&|v: VarIndex| {
                let k = leaf_syms.binary_search(&v.index()).expect("leaf symbol");
                a.get(VarIndex(k))
            })
        })
        .expect("fragment arity within cap");
        (leaf_syms, table)
    }

    /// Selector entries driving one part to `target`.
    fn part_selector(part: &Part, target: bool) -> Vec<(SymId, bool)> {
        match part {
            Part::Leaf(s) => vec![(*s, target)],
            Part::Fragment(frag) => {
                let (leaf_syms, table) = Self::fragment_table(frag);
                let idx = (0..1u64 << leaf_syms.len())
                    .find(|&i| table.get(i) == target)
                    .expect("fragments are non-constant");
                leaf_syms
                    .iter()
                    .enumerate()
                    .map(|(k, &s)| (s, idx >> k & 1 == 1))
                    .collect()
            }
        }
    }

    /// Replace a fully resolved 0-vertex by a fresh variable standing for
    /// the XOR of its parts, and return the fresh symbol.
    fn substitute(&mut self, children: Vec<Work>) -> SymId {
        let parts: Vec<Part> = children
            .into_iter()
            .map(|c| match c {
                Work::Leaf(s) => Part::Leaf(s),
                Work::Node { resolved: Some(frag), .. } => Part::Fragment(frag),
                Work::Node { resolved: None, .. } => unreachable!("children are resolved"),
            })
            .collect();

        let mut sel0 = Vec::new();
        let mut sel1 = Vec::new();
        for (k, part) in parts.iter().enumerate() {
            sel0.extend(Self::part_selector(part, false));
            // flipping the first part flips the XOR
            sel1.extend(Self::part_selector(part, k == 0));
        }

        let consumed: Vec<SymId> = sel0.iter().map(|&(s, _)| s).collect();
        let fresh = self.syms.len();
        self.syms.push(SymInfo::Fresh { selector: [sel0, sel1], parts });
        self.current.retain(|s| !consumed.contains(s));
        self.current.push(fresh);
        debug_assert!(self.current.windows(2).all(|w| w[0] < w[1]));
        fresh
    }

    /// Expand a symbol-space tree into original variables: fresh symbols
    /// unfold to XOR (positive) or NXOR (negated) vertices over their parts.
    fn expand(&self, node: &CanonicalNode) -> CanonicalNode {
        match node {
            CanonicalNode::Literal { var, positive } => match &self.syms[var.index()] {
                SymInfo::Orig(v) => CanonicalNode::Literal { var: *v, positive: *positive },
                SymInfo::Fresh { parts, .. } => {
                    let children: Vec<CanonicalNode> = parts
                        .iter()
                        .map(|p| match p {
                            Part::Leaf(s) => {
                                self.expand(&CanonicalNode::Literal {
                                    var: VarIndex(*s),
                                    positive: true,
                                })
                            }
                            Part::Fragment(frag) => self.expand(frag),
                        })
                        .collect();
                    CanonicalNode::Gate {
                        op: if *positive { GateOp::Xor } else { GateOp::Nxor },
                        children,
                    }
                }
            },
            CanonicalNode::Gate { op, children } => CanonicalNode::Gate {
                op: *op,
                children: children.iter().map(|c| self.expand(c)).collect(),
            },
        }
    }
}

fn normalize(node: CanonicalNode) -> CanonicalNode {
    match node {
        lit @ CanonicalNode::Literal { .. } => lit,
        CanonicalNode::Gate { op, children } => {
            let mut children: Vec<CanonicalNode> = children.into_iter().map(normalize).collect();
            children.sort_by_key(|c| c.min_var());
            CanonicalNode::Gate { op, children }
        }
    }
}

fn glue_to_work(t: &GlueTree, current: &[SymId]) -> Work {
    match t {
        GlueTree::Leaf(v) => Work::Leaf(current[v.index()]),
        GlueTree::Node { label, children } => Work::Node {
            nonlinear: *label,
            children: children.iter().map(|c| glue_to_work(c, current)).collect(),
            resolved: None,
        },
    }
}

/// Reconstruct the canonical tree of a read-once target over the two-input
/// basis through membership queries, assuming every variable essential.
pub fn reconstruct_b2(session: &mut OracleSession, n: usize) -> Result<CanonicalTree> {
    if session.arity() != n {
        return Err(Error::ArityMismatch { expected: session.arity(), got: n });
    }
    reconstruct_with(session)
}

/// Generic form of [`reconstruct_b2`] over any membership source.
pub fn reconstruct_with<M: MembershipSource>(source: &mut M) -> Result<CanonicalTree> {
    let n = source.arity();
    if n == 0 {
        let value = source.query(&TotalAssignment::new(0, 0))?;
        return Ok(CanonicalTree::Constant(value));
    }
    if n == 1 {
        let v0 = source.query(&TotalAssignment::new(1, 0))?;
        let v1 = source.query(&TotalAssignment::new(1, 1))?;
        if v0 == v1 {
            return Err(Error::PromiseViolation("declared essential variable is not".into()));
        }
        return Ok(CanonicalTree::Node(CanonicalNode::Literal {
            var: VarIndex(0),
            positive: v1,
        }));
    }

    let mut driver = Driver {
        source,
        original_arity: n,
        syms: (0..n).map(|i| SymInfo::Orig(VarIndex(i))).collect(),
        current: (0..n).collect(),
    };

    let mut squares = SquareSet::collect(&mut driver)?;
    let glue = reconstruct_glueing(&squares)?;
    let mut work = glue_to_work(&glue, &driver.current);

    loop {
        resolve_ripe_fragments(&mut work, &squares, &driver, true)?;

        // root handling
        match &mut work {
            Work::Leaf(_) => {
                return Err(Error::InconsistentSquares(
                    "glueing degenerated to a single leaf".into(),
                ));
            }
            Work::Node { nonlinear: true, resolved, .. } => {
                if let Some(frag) = resolved.take() {
                    let tree = normalize(driver.expand(&frag));
                    return Ok(CanonicalTree::Node(tree));
                }
            }
            Work::Node { nonlinear: false, children, .. } => {
                if children.iter().all(work_ripe) {
                    let node = finish_linear_root(std::mem::take(children), &squares, &driver)?;
                    let tree = normalize(driver.expand(&node));
                    return Ok(CanonicalTree::Node(tree));
                }
            }
        }

        // substitute the first fully resolved non-root 0-vertex
        if substitute_one(&mut work, &mut driver, false)? {
            squares = SquareSet::collect(&mut driver)?;
        } else {
            return Err(Error::InconsistentSquares("reconstruction made no progress".into()));
        }
    }
}

fn work_ripe(w: &Work) -> bool {
    match w {
        Work::Leaf(_) => true,
        Work::Node { resolved, .. } => resolved.is_some(),
    }
}

/// Resolve every 1-vertex whose children are all leaves.
fn resolve_ripe_fragments<M: MembershipSource>(
    work: &mut Work,
    squares: &SquareSet,
    driver: &Driver<'_, M>,
    is_root: bool,
) -> Result<()> {
    if let Work::Node { nonlinear, children, resolved } = work {
        for c in children.iter_mut() {
            resolve_ripe_fragments(c, squares, driver, false)?;
        }
        if *nonlinear && resolved.is_none() {
            let mut leaf_positions = Vec::new();
            for c in children.iter() {
                match c {
                    Work::Leaf(s) => leaf_positions.push(VarIndex(driver.position(*s))),
                    Work::Node { .. } => return Ok(()),
                }
            }
            let context =
                if is_root { FragmentContext::Root } else { FragmentContext::UnderLinear };
            let frag = reconstruct_fragment(squares, &leaf_positions, context)?;
            // rewrite leaves from positions back to stable symbols
            let frag = rewrite_leaves(frag, &|v| VarIndex(driver.current[v.index()]));
            *resolved = Some(frag);
        }
    }
    Ok(())
}

fn rewrite_leaves(node: CanonicalNode, map: &impl Fn(VarIndex) -> VarIndex) -> CanonicalNode {
    match node {
        CanonicalNode::Literal { var, positive } => {
            CanonicalNode::Literal { var: map(var), positive }
        }
        CanonicalNode::Gate { op, children } => CanonicalNode::Gate {
            op,
            children: children.into_iter().map(|c| rewrite_leaves(c, map)).collect(),
        },
    }
}

/// Depth-first search for a non-root 0-vertex whose children are all
/// resolved, replacing it by a fresh leaf. Returns whether one was found.
fn substitute_one<M: MembershipSource>(
    work: &mut Work,
    driver: &mut Driver<'_, M>,
    parent_can_substitute: bool,
) -> Result<bool> {
    if let Work::Node { nonlinear, children, .. } = work {
        let here_substitutable =
            parent_can_substitute && !*nonlinear && children.iter().all(work_ripe);
        if here_substitutable {
            let fresh = driver.substitute(std::mem::take(children));
            *work = Work::Leaf(fresh);
            return Ok(true);
        }
        for c in children.iter_mut() {
            if substitute_one(c, driver, true)? {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Final step for a linear glueing root: the label is XOR or NXOR depending
/// on whether the plain XOR of the parts matches a stored value.
fn finish_linear_root<M: MembershipSource>(
    children: Vec<Work>,
    squares: &SquareSet,
    driver: &Driver<'_, M>,
) -> Result<CanonicalNode> {
    let m = driver.current.len();
    debug_assert!(m >= 2);
    let sq = squares
        .get(VarIndex(0), VarIndex(1))
        .ok_or_else(|| Error::InconsistentSquares("missing square at the root".into()))?;
    let point = sq.extensions()[0];
    let expected = sq.values()[0];

    // value of the plain XOR of the parts at the stored point (positions)
    let mut parity = false;
    let mut parts = Vec::new();
    for c in children {
        match c {
            Work::Leaf(s) => {
                parity ^= point.get(VarIndex(driver.position(s)));
                parts.push(CanonicalNode::Literal { var: VarIndex(s), positive: true });
            }
            Work::Node { resolved: Some(frag), .. } => {
                parity ^= frag.eval_with(&|v: VarIndex| {
                    point.get(VarIndex(driver.position(v.index())))
                });
                parts.push(frag);
            }
            Work::Node { resolved: None, .. } => unreachable!("children are resolved"),
        }
    }
    let op = if parity == expected { GateOp::Xor } else { GateOp::Nxor };
    Ok(CanonicalNode::Gate { op, children: parts })
}
