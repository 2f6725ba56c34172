//! Enumeration of read-once functions over a basis, and random generation of
//! canonical trees for sampled experiments.
//!
//! Enumeration works by exact essential-support: for every variable subset,
//! the distinct tables of read-once formulas depending essentially on exactly
//! that subset are built bottom-up from smaller subsets. Basis gates are
//! pre-expanded into "effective gates" (gates with some inputs fed constant
//! subformulas and projected away), keeping only those that depend on every
//! remaining slot; every read-once function then has a witness of this shape,
//! so the final union over subsets is the whole class, deduplicated by table.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rand::Rng;

use crate::error::Result;
use crate::formula::{Basis, BasisFunction, CanonicalNode, FormulaNode, GateOp, ReadOnceFormula};
use crate::truth::{PartialAssignment, TruthTable, VarIndex, VarSet};

/// All read-once functions over a basis at a declared ambient arity,
/// deduplicated by truth table and sorted for determinism.
#[derive(Debug)]
pub struct CandidateSet {
    n: usize,
    items: Vec<(TruthTable, ReadOnceFormula)>,
    second_witness: HashMap<TruthTable, ReadOnceFormula>,
}

/// A basis gate with a subset of inputs pinned to constant subformulas,
/// projected to its open slots. Only gates essential in every open slot are
/// kept.
struct EffectiveGate {
    table: TruthTable,
    original: BasisFunction,
    /// Per original position: the constant child to splice in, or `None`
    /// for an open slot.
    slots: Vec<Option<FormulaNode>>,
}

type EnumerationCache = Mutex<HashMap<(u64, usize), Arc<CandidateSet>>>;

impl CandidateSet {
    /// Enumerate (memoized per basis fingerprint and arity).
    pub fn enumerate(basis: &Basis, n: usize) -> Result<Arc<CandidateSet>> {
        static CACHE: OnceLock<EnumerationCache> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let key = (basis.fingerprint(), n);
        if let Some(hit) = cache.lock().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let built = Arc::new(Self::build(basis, n)?);
        cache.lock().unwrap().insert(key, built.clone());
        Ok(built)
    }

    fn build(basis: &Basis, n: usize) -> Result<CandidateSet> {
        let constants = constant_pool(basis, n)?;
        let gates = effective_gates(basis, &constants, n)?;

        // pools of (table, witness) with exact essential support, by mask;
        // the second vector holds structurally distinct duplicate witnesses
        type PoolItems = (Vec<(TruthTable, FormulaNode)>, Vec<(TruthTable, FormulaNode)>);
        let mut pools: HashMap<u64, PoolItems> = HashMap::new();
        let mut masks: Vec<u64> = (1..1u64 << n).collect();
        masks.sort_by_key(|m| (m.count_ones(), *m));

        for mask in masks {
            let mut pool = Pool::default();
            if mask.count_ones() == 1 {
                let v = VarIndex(mask.trailing_zeros() as usize);
                pool.insert(TruthTable::var(n, v)?, FormulaNode::Var(v));
            }
            // gates of arity two and more draw children from strictly
            // smaller finished pools
            for gate in gates.iter().filter(|g| g.table.arity() >= 2) {
                let arity = gate.table.arity();
                for blocks in ordered_nonempty_partitions(mask, arity) {
                    let child_pools: Vec<&[(TruthTable, FormulaNode)]> = blocks
                        .iter()
                        .map(|b| pools.get(b).map_or(&[][..], |p| p.0.as_slice()))
                        .collect();
                    let mut picked = vec![0usize; arity];
                    combine_rec(gate, &child_pools, &mut picked, 0, n, &mut pool)?;
                }
            }
            // unary closure over the pool itself (negation-like gates)
            let unary: Vec<&EffectiveGate> =
                gates.iter().filter(|g| g.table.arity() == 1).collect();
            let mut start = 0;
            loop {
                let end = pool.items.len();
                if start == end {
                    break;
                }
                for idx in start..end {
                    for gate in &unary {
                        let (t, node) = &pool.items[idx];
                        let out =
                            TruthTable::compose_gate(&gate.table, std::slice::from_ref(t), n)?;
                        let witness = gate.instantiate(vec![node.clone()]);
                        pool.insert(out, witness);
                    }
                }
                start = end;
            }
            pools.insert(mask, (pool.items, pool.duplicates));
        }

        // union over all supports, constants included
        let mut items: Vec<(TruthTable, ReadOnceFormula)> = Vec::new();
        let mut second_witness: HashMap<TruthTable, ReadOnceFormula> = HashMap::new();
        let mut seen: HashMap<TruthTable, usize> = HashMap::new();
        let mut record = |table: &TruthTable,
                          node: &FormulaNode,
                          items: &mut Vec<(TruthTable, ReadOnceFormula)>|
         -> Result<()> {
            let formula = ReadOnceFormula::new(n, node.clone())?;
            match seen.get(table) {
                None => {
                    seen.insert(table.clone(), items.len());
                    items.push((table.clone(), formula));
                }
                Some(&idx) => {
                    if items[idx].1 != formula {
                        second_witness.entry(table.clone()).or_insert(formula);
                    }
                }
            }
            Ok(())
        };
        for (table, node) in &constants {
            record(table, node, &mut items)?;
        }
        let mut all_masks: Vec<u64> = pools.keys().copied().collect();
        all_masks.sort_by_key(|m| (m.count_ones(), *m));
        for mask in &all_masks {
            for (table, node) in &pools[mask].0 {
                record(table, node, &mut items)?;
            }
        }
        // duplicate witnesses from the subset pools feed the uniqueness map
        for mask in &all_masks {
            for (table, node) in &pools[mask].1 {
                record(table, node, &mut items)?;
            }
        }
        items.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(CandidateSet { n, items, second_witness })
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[(TruthTable, ReadOnceFormula)] {
        &self.items
    }

    pub fn tables(&self) -> impl Iterator<Item = &TruthTable> {
        self.items.iter().map(|(t, _)| t)
    }

    pub fn contains_table(&self, table: &TruthTable) -> bool {
        self.items.binary_search_by(|(t, _)| t.cmp(table)).is_ok()
    }

    /// A structurally distinct second formula with the same table, where the
    /// enumeration encountered one.
    pub fn second_witness(&self, table: &TruthTable) -> Option<&ReadOnceFormula> {
        self.second_witness.get(table)
    }
}

#[derive(Default)]
struct Pool {
    items: Vec<(TruthTable, FormulaNode)>,
    index: HashMap<TruthTable, usize>,
    duplicates: Vec<(TruthTable, FormulaNode)>,
    dup_seen: std::collections::HashSet<TruthTable>,
}

impl Pool {
    fn insert(&mut self, table: TruthTable, node: FormulaNode) -> bool {
        self.insert_with(table, || node)
    }

    /// Witness construction is deferred: duplicates beyond the first per
    /// table never build their formula.
    fn insert_with(&mut self, table: TruthTable, node: impl FnOnce() -> FormulaNode) -> bool {
        match self.index.get(&table) {
            None => {
                self.index.insert(table.clone(), self.items.len());
                self.items.push((table, node()));
                true
            }
            Some(&idx) => {
                if !self.dup_seen.contains(&table) {
                    let node = node();
                    if self.items[idx].1 != node {
                        self.dup_seen.insert(table.clone());
                        self.duplicates.push((table, node));
                    }
                }
                false
            }
        }
    }
}

impl EffectiveGate {
    fn instantiate(&self, mut open_children: Vec<FormulaNode>) -> FormulaNode {
        open_children.reverse();
        let children = self
            .slots
            .iter()
            .map(|slot| match slot {
                Some(c) => c.clone(),
                None => open_children.pop().expect("one child per open slot"),
            })
            .collect();
        FormulaNode::Gate { func: self.original.clone(), children }
    }
}

/// The constant functions expressible over the basis, as ambient-arity
/// tables with witness formulas (nullary gates closed under all-constant
/// gate application).
fn constant_pool(basis: &Basis, n: usize) -> Result<Vec<(TruthTable, FormulaNode)>> {
    let mut pool: Vec<(TruthTable, FormulaNode)> = Vec::new();
    for gate in basis.functions().iter().filter(|g| g.arity() == 0) {
        let table = TruthTable::constant(n, gate.table().get(0))?;
        if !pool.iter().any(|(t, _)| *t == table) {
            pool.push((table, FormulaNode::Gate { func: gate.clone(), children: vec![] }));
        }
    }
    loop {
        let mut added = false;
        for gate in basis.functions() {
            let arity = gate.arity();
            if arity == 0 || pool.is_empty() {
                continue;
            }
            let mut combo = vec![0usize; arity];
            loop {
                let mut idx = 0u64;
                for (k, &c) in combo.iter().enumerate() {
                    if pool[c].0.get(0) {
                        idx |= 1 << k;
                    }
                }
                let value = gate.table().get(idx);
                let table = TruthTable::constant(n, value)?;
                if !pool.iter().any(|(t, _)| *t == table) {
                    let children = combo.iter().map(|&c| pool[c].1.clone()).collect();
                    pool.push((table, FormulaNode::Gate { func: gate.clone(), children }));
                    added = true;
                    break; // pool changed; restart combos
                }
                // advance the odometer
                let mut k = 0;
                loop {
                    if k == arity {
                        break;
                    }
                    combo[k] += 1;
                    if combo[k] < pool.len() {
                        break;
                    }
                    combo[k] = 0;
                    k += 1;
                }
                if k == arity {
                    break;
                }
            }
        }
        if !added {
            break;
        }
    }
    Ok(pool)
}

/// Expand each basis gate over all ways of pinning input subsets to
/// expressible constants, keeping projections essential in every open slot
/// (plain identities excluded: they create no new functions).
fn effective_gates(
    basis: &Basis,
    constants: &[(TruthTable, FormulaNode)],
    _n: usize,
) -> Result<Vec<EffectiveGate>> {
    let mut out: Vec<EffectiveGate> = Vec::new();
    let mut seen: std::collections::HashSet<(usize, TruthTable)> = std::collections::HashSet::new();
    let identity = TruthTable::from_bits_u64(1, 0b10)?;

    for gate in basis.functions() {
        let arity = gate.arity();
        if arity == 0 {
            continue;
        }
        // per position: 0 = open, 1 + c = pinned to constants[c]
        let choices = 1 + constants.len();
        let mut combo = vec![0usize; arity];
        loop {
            let open: Vec<usize> =
                (0..arity).filter(|&k| combo[k] == 0).collect();
            if !open.is_empty() {
                let mut fixed = VarSet::EMPTY;
                let mut values = 0u64;
                for (k, &c) in combo.iter().enumerate() {
                    if c > 0 {
                        fixed.insert(VarIndex(k));
                        if constants[c - 1].0.get(0) {
                            values |= 1 << k;
                        }
                    }
                }
                let p = PartialAssignment::new(arity, fixed, values);
                let projected = gate.table().project(&p)?;
                let all_essential =
                    projected.essential_vars() == VarSet::full(open.len());
                if all_essential && projected != identity {
                    let key = (open.len(), projected.clone());
                    if seen.insert(key) {
                        let slots = combo
                            .iter()
                            .map(|&c| if c == 0 { None } else { Some(constants[c - 1].1.clone()) })
                            .collect();
                        out.push(EffectiveGate {
                            table: projected,
                            original: gate.clone(),
                            slots,
                        });
                    }
                }
            }
            // odometer
            let mut k = 0;
            loop {
                if k == arity {
                    break;
                }
                combo[k] += 1;
                if combo[k] < choices {
                    break;
                }
                combo[k] = 0;
                k += 1;
            }
            if k == arity {
                break;
            }
        }
    }
    Ok(out)
}

/// Ordered partitions of `mask` into exactly `arity` nonempty blocks.
fn ordered_nonempty_partitions(mask: u64, arity: usize) -> Vec<Vec<u64>> {
    if arity == 0 {
        return if mask == 0 { vec![vec![]] } else { vec![] };
    }
    if (mask.count_ones() as usize) < arity {
        return vec![];
    }
    if arity == 1 {
        return vec![vec![mask]];
    }
    let mut out = Vec::new();
    // proper nonempty submasks
    let mut sub = (mask - 1) & mask;
    while sub != 0 {
        for mut rest in ordered_nonempty_partitions(mask & !sub, arity - 1) {
            let mut blocks = vec![sub];
            blocks.append(&mut rest);
            out.push(blocks);
        }
        sub = (sub - 1) & mask;
    }
    out
}

fn combine_rec(
    gate: &EffectiveGate,
    child_pools: &[&[(TruthTable, FormulaNode)]],
    picked: &mut Vec<usize>,
    depth: usize,
    n: usize,
    pool: &mut Pool,
) -> Result<()> {
    if depth == child_pools.len() {
        let tables: Vec<TruthTable> = picked
            .iter()
            .enumerate()
            .map(|(k, &i)| child_pools[k][i].0.clone())
            .collect();
        let out = TruthTable::compose_gate(&gate.table, &tables, n)?;
        pool.insert_with(out, || {
            let children: Vec<FormulaNode> = picked
                .iter()
                .enumerate()
                .map(|(k, &i)| child_pools[k][i].1.clone())
                .collect();
            gate.instantiate(children)
        });
        return Ok(());
    }
    for i in 0..child_pools[depth].len() {
        picked[depth] = i;
        combine_rec(gate, child_pools, picked, depth + 1, n, pool)?;
    }
    Ok(())
}

/// A uniform-ish random canonical tree over exactly `vars`, honoring all
/// canonicality constraints (`parent` restricts the admissible root labels).
pub fn random_canonical_tree(
    rng: &mut impl Rng,
    vars: &[VarIndex],
    parent: Option<GateOp>,
) -> CanonicalNode {
    assert!(!vars.is_empty());
    if vars.len() == 1 {
        let positive = match parent {
            Some(op) if op.is_linear() => true,
            _ => rng.gen_bool(0.5),
        };
        return CanonicalNode::Literal { var: vars[0], positive };
    }
    let ops: Vec<GateOp> = match parent {
        None => vec![GateOp::And, GateOp::Or, GateOp::Xor, GateOp::Nxor],
        Some(GateOp::And) => vec![GateOp::Or, GateOp::Xor, GateOp::Nxor],
        Some(GateOp::Or) => vec![GateOp::And, GateOp::Xor, GateOp::Nxor],
        Some(op) if op.is_linear() => vec![GateOp::Or],
        Some(_) => unreachable!(),
    };
    let op = ops[rng.gen_range(0..ops.len())];

    // split vars into 2..=len nonempty blocks
    let block_count = 2 + rng.gen_range(0..vars.len() - 1);
    let mut blocks: Vec<Vec<VarIndex>> = vec![Vec::new(); block_count];
    let mut order: Vec<VarIndex> = vars.to_vec();
    // each block gets one seed variable, the rest scatter
    for (k, slot) in blocks.iter_mut().enumerate() {
        let pick = rng.gen_range(0..order.len() - (block_count - k - 1));
        slot.push(order.remove(pick));
    }
    for v in order {
        blocks[rng.gen_range(0..block_count)].push(v);
    }

    let mut children: Vec<CanonicalNode> = blocks
        .iter()
        .map(|b| random_canonical_tree(rng, b, Some(op)))
        .collect();
    children.sort_by_key(|c| c.min_var());
    CanonicalNode::Gate { op, children }
}

/// A random read-once formula over the two-input basis: a random canonical
/// tree over a random nonempty leaf subset (or, rarely, a constant).
pub fn random_read_once_formula(
    rng: &mut impl Rng,
    n: usize,
    basis: &Basis,
) -> Result<ReadOnceFormula> {
    use crate::formula::CanonicalTree;
    if n == 0 || rng.gen_ratio(1, 50) {
        let tree = CanonicalTree::Constant(rng.gen_bool(0.5));
        return tree.to_formula(n, basis);
    }
    let size = 1 + rng.gen_range(0..n);
    let mut pool: Vec<VarIndex> = (0..n).map(VarIndex).collect();
    let mut vars = Vec::new();
    for _ in 0..size {
        vars.push(pool.remove(rng.gen_range(0..pool.len())));
    }
    vars.sort();
    let node = random_canonical_tree(rng, &vars, None);
    CanonicalTree::Node(node).to_formula(n, basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn and_or_counts() {
        // monotone read-once functions with exactly k essential variables:
        // 1, 2, 8 for k = 1, 2, 3 (two gate labelings per hierarchy shape)
        let basis = Basis::and_or();
        let c1 = CandidateSet::enumerate(&basis, 1).unwrap();
        assert_eq!(c1.len(), 1);
        let c2 = CandidateSet::enumerate(&basis, 2).unwrap();
        assert_eq!(c2.len(), 2 + 2); // x1, x2, and, or
        let c3 = CandidateSet::enumerate(&basis, 3).unwrap();
        assert_eq!(c3.len(), 3 + 3 * 2 + 8);
    }

    #[test]
    fn b2_small_counts() {
        let basis = Basis::b2();
        // arity 1: constants, x1, ~x1
        let c1 = CandidateSet::enumerate(&basis, 1).unwrap();
        assert_eq!(c1.len(), 4);
        // arity 2: constants + 4 single-variable functions + all 10
        // two-variable functions with both variables essential
        let c2 = CandidateSet::enumerate(&basis, 2).unwrap();
        assert_eq!(c2.len(), 16);
    }

    #[test]
    fn all_candidates_are_read_once_over_basis() {
        let basis = Basis::b2();
        let c = CandidateSet::enumerate(&basis, 3).unwrap();
        for (table, formula) in c.items() {
            assert!(formula.is_over_basis(&basis));
            assert_eq!(&formula.truth_table().unwrap(), table);
        }
    }

    #[test]
    fn second_witnesses_share_tables() {
        let basis = Basis::b2();
        let c = CandidateSet::enumerate(&basis, 2).unwrap();
        let mut found = 0;
        for (table, first) in c.items() {
            if let Some(second) = c.second_witness(table) {
                assert_ne!(first, second);
                assert_eq!(&second.truth_table().unwrap(), table);
                found += 1;
            }
        }
        assert!(found > 0);
    }

    #[test]
    fn random_trees_are_canonical() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let vars: Vec<VarIndex> = (0..5).map(VarIndex).collect();
            let node = random_canonical_tree(&mut rng, &vars, None);
            let tree = crate::formula::CanonicalTree::Node(node);
            tree.check_conditions().unwrap();
            // trees over an exact leaf set keep every leaf essential
            let t = tree.truth_table(5).unwrap();
            assert_eq!(t.essential_vars(), VarSet::full(5));
        }
    }
}
