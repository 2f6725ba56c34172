//! Cotrees (glueings) and cographs, related by the lowest-common-ancestor
//! bijection: `{x_i, x_j}` is an edge exactly when the LCA of the two leaves
//! carries label 1.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::truth::VarIndex;

/// A cotree: internal vertices carry 0/1 labels, no two adjacent vertices
/// share a label, no internal vertex has exactly one child, and leaves carry
/// distinct variables. The label `true` stands for 1 (non-linear in tree
/// glueings), `false` for 0 (linear).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GlueTree {
    Leaf(VarIndex),
    Node { label: bool, children: Vec<GlueTree> },
}

impl GlueTree {
    /// Build an internal vertex with children normalized by smallest leaf.
    pub fn node(label: bool, mut children: Vec<GlueTree>) -> GlueTree {
        debug_assert!(children.len() >= 2);
        children.sort_by_key(|c| c.min_leaf());
        GlueTree::Node { label, children }
    }

    pub fn min_leaf(&self) -> VarIndex {
        match self {
            GlueTree::Leaf(v) => *v,
            GlueTree::Node { children, .. } => {
                children.iter().map(|c| c.min_leaf()).min().expect("node has children")
            }
        }
    }

    pub fn leaves(&self) -> Vec<VarIndex> {
        let mut out = Vec::new();
        fn rec(t: &GlueTree, out: &mut Vec<VarIndex>) {
            match t {
                GlueTree::Leaf(v) => out.push(*v),
                GlueTree::Node { children, .. } => {
                    for c in children {
                        rec(c, out);
                    }
                }
            }
        }
        rec(self, &mut out);
        out.sort();
        out
    }

    /// Structural validity: proper 0/1 alternation, fan-in at least two,
    /// distinct leaves.
    pub fn validate(&self) -> std::result::Result<(), String> {
        fn rec(
            t: &GlueTree,
            parent: Option<bool>,
            seen: &mut BTreeSet<VarIndex>,
        ) -> std::result::Result<(), String> {
            match t {
                GlueTree::Leaf(v) => {
                    if !seen.insert(*v) {
                        return Err(format!("leaf {v} repeated"));
                    }
                    Ok(())
                }
                GlueTree::Node { label, children } => {
                    if children.len() < 2 {
                        return Err("internal vertex with fewer than two children".into());
                    }
                    if parent == Some(*label) {
                        return Err("adjacent vertices share a label".into());
                    }
                    for c in children {
                        rec(c, Some(*label), seen)?;
                    }
                    Ok(())
                }
            }
        }
        rec(self, None, &mut BTreeSet::new())
    }
}

impl fmt::Display for GlueTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GlueTree::Leaf(v) => write!(f, "{v}"),
            GlueTree::Node { label, children } => {
                write!(f, "{}(", *label as u8)?;
                for (k, c) in children.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// An undirected graph on a set of variables, edges normalized `(lo, hi)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cograph {
    verts: Vec<VarIndex>,
    edges: BTreeSet<(VarIndex, VarIndex)>,
}

impl Cograph {
    pub fn new(mut verts: Vec<VarIndex>, edges: impl IntoIterator<Item = (VarIndex, VarIndex)>) -> Self {
        verts.sort();
        verts.dedup();
        let edges = edges
            .into_iter()
            .map(|(a, b)| if a < b { (a, b) } else { (b, a) })
            .filter(|(a, b)| a != b)
            .collect();
        Cograph { verts, edges }
    }

    pub fn vertices(&self) -> &[VarIndex] {
        &self.verts
    }

    pub fn edges(&self) -> &BTreeSet<(VarIndex, VarIndex)> {
        &self.edges
    }

    pub fn has_edge(&self, a: VarIndex, b: VarIndex) -> bool {
        let e = if a < b { (a, b) } else { (b, a) };
        self.edges.contains(&e)
    }

    fn induced(&self, verts: &[VarIndex]) -> Cograph {
        let keep: BTreeSet<VarIndex> = verts.iter().copied().collect();
        Cograph {
            verts: verts.to_vec(),
            edges: self
                .edges
                .iter()
                .filter(|(a, b)| keep.contains(a) && keep.contains(b))
                .copied()
                .collect(),
        }
    }

    fn complement(&self) -> Cograph {
        let mut edges = BTreeSet::new();
        for i in 0..self.verts.len() {
            for j in i + 1..self.verts.len() {
                let e = (self.verts[i], self.verts[j]);
                if !self.edges.contains(&e) {
                    edges.insert(e);
                }
            }
        }
        Cograph { verts: self.verts.clone(), edges }
    }

    /// Connected components, each sorted, in order of smallest vertex.
    fn components(&self) -> Vec<Vec<VarIndex>> {
        let mut comp: Vec<Vec<VarIndex>> = Vec::new();
        let mut unvisited: BTreeSet<VarIndex> = self.verts.iter().copied().collect();
        while let Some(&start) = unvisited.iter().next() {
            let mut stack = vec![start];
            let mut cur = Vec::new();
            unvisited.remove(&start);
            while let Some(v) = stack.pop() {
                cur.push(v);
                let nbrs: Vec<VarIndex> = unvisited
                    .iter()
                    .copied()
                    .filter(|&u| self.has_edge(u, v))
                    .collect();
                for u in nbrs {
                    unvisited.remove(&u);
                    stack.push(u);
                }
            }
            cur.sort();
            comp.push(cur);
        }
        comp.sort();
        comp
    }
}

/// Edges are exactly the leaf pairs whose lowest common ancestor carries 1.
pub fn cotree_to_cograph(tree: &GlueTree) -> Cograph {
    let mut edges = Vec::new();
    // returns this subtree's leaves; cross-child pairs meet at this vertex
    fn rec(t: &GlueTree, edges: &mut Vec<(VarIndex, VarIndex)>) -> Vec<VarIndex> {
        match t {
            GlueTree::Leaf(v) => vec![*v],
            GlueTree::Node { label, children } => {
                let blocks: Vec<Vec<VarIndex>> = children.iter().map(|c| rec(c, edges)).collect();
                if *label {
                    for i in 0..blocks.len() {
                        for j in i + 1..blocks.len() {
                            for &a in &blocks[i] {
                                for &b in &blocks[j] {
                                    edges.push((a, b));
                                }
                            }
                        }
                    }
                }
                blocks.into_iter().flatten().collect()
            }
        }
    }
    let verts = rec(tree, &mut edges);
    Cograph::new(verts, edges)
}

/// Inverse of [`cotree_to_cograph`]; fails when the graph is not a cograph.
pub fn cograph_to_cotree(graph: &Cograph) -> Result<GlueTree> {
    if graph.verts.is_empty() {
        return Err(Error::Precondition("empty vertex set has no cotree".into()));
    }
    if graph.verts.len() == 1 {
        return Ok(GlueTree::Leaf(graph.verts[0]));
    }
    let comps = graph.components();
    if comps.len() >= 2 {
        let children = comps
            .iter()
            .map(|c| cograph_to_cotree(&graph.induced(c)))
            .collect::<Result<Vec<_>>>()?;
        return Ok(GlueTree::node(false, children));
    }
    let co = graph.complement();
    let co_comps = co.components();
    if co_comps.len() >= 2 {
        let children = co_comps
            .iter()
            .map(|c| cograph_to_cotree(&graph.induced(c)))
            .collect::<Result<Vec<_>>>()?;
        return Ok(GlueTree::node(true, children));
    }
    Err(Error::NotCograph)
}

/// Whether repeatedly complementing connected components reaches the empty
/// graph. A connected component whose complement is also connected can never
/// split again (complementing twice restores it), so the reduction stalls.
pub fn cograph_reduce(graph: &Cograph) -> bool {
    if graph.edges.is_empty() {
        return true;
    }
    for comp in graph.components() {
        if comp.len() == 1 {
            continue;
        }
        let complemented = graph.induced(&comp).complement();
        if complemented.components().len() == 1 {
            return false;
        }
        if !cograph_reduce(&complemented) {
            return false;
        }
    }
    true
}
