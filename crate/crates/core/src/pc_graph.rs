//! Pointer-component graphs and the snr decision procedures built on them.
//!
//! Vertices are the connected components of the reduction graph; each label
//! of the string is an edge joining the component(s) holding its vertices.
//! Which label sets can be the snr steps of a successful reduction, and in
//! which orders, is read off the spanning trees of this multigraph rooted at
//! the linear component.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use itertools::Itertools;
use serde::Serialize;
use thiserror::Error;

use crate::legal_string::{Label, LegalString, LegalStringError, Pointer};
use crate::reduction::{
    apply_reduction, apply_rule, find_successful_reduction_using, rule_applicable, Reduction,
    ReductionRule, RuleKind,
};
use crate::reduction_graph::{build_reduction_graph, components};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PcGraphError {
    #[error("edge {0} is not in the graph")]
    UnknownEdge(Label),
    #[error("edge {0} cannot be merged: it is a loop or unknown")]
    NotMergeable(Label),
    #[error("the edge set is not a spanning tree")]
    NotATree,
    #[error("the graph has no root")]
    NoRoot,
    #[error(transparent)]
    Label(#[from] LegalStringError),
}

/// A pointer-component graph vertex: the set of reduction-graph components
/// it stands for. Component 0 is the linear component. Merging takes the
/// union, so merged ids are deterministic and merges commute exactly.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PcVertex(BTreeSet<usize>);

impl PcVertex {
    pub fn component(id: usize) -> Self {
        PcVertex(BTreeSet::from([id]))
    }

    pub fn components(&self) -> &BTreeSet<usize> {
        &self.0
    }

    /// `R` for the linear component, `C<i>` for cyclic ones, joined with `+`
    /// once merged.
    pub fn name(&self) -> String {
        if self.0.is_empty() {
            return "V".to_string();
        }
        self.0
            .iter()
            .map(|&c| {
                if c == 0 {
                    "R".to_string()
                } else {
                    format!("C{c}")
                }
            })
            .join("+")
    }
}

impl fmt::Display for PcVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PcGraph {
    vertices: BTreeSet<PcVertex>,
    endpoints: BTreeMap<Label, BTreeSet<PcVertex>>,
    root: Option<PcVertex>,
}

/// Isomorphism-invariant encoding of a [`PcGraph`] whose edges keep their
/// labels: the sorted multiset of vertex signatures (root flag, incident
/// edges with a loop marker). Two vertices with identical signatures are
/// interchangeable, so equal encodings mean isomorphic graphs.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PcCanonicalForm(Vec<(bool, Vec<(Label, bool)>)>);

impl PcGraph {
    pub fn vertices(&self) -> &BTreeSet<PcVertex> {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = Label> + '_ {
        self.endpoints.keys().copied()
    }

    pub fn edge_set(&self) -> BTreeSet<Label> {
        self.endpoints.keys().copied().collect()
    }

    pub fn endpoints(&self, e: Label) -> Option<&BTreeSet<PcVertex>> {
        self.endpoints.get(&e)
    }

    pub fn endpoint_map(&self) -> &BTreeMap<Label, BTreeSet<PcVertex>> {
        &self.endpoints
    }

    pub fn root(&self) -> Option<&PcVertex> {
        self.root.as_ref()
    }

    /// Vertex count.
    pub fn order(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_loop(&self, e: Label) -> bool {
        self.endpoints.get(&e).is_some_and(|s| s.len() == 1)
    }

    fn check_edges(&self, d: &BTreeSet<Label>) -> Result<(), PcGraphError> {
        match d.iter().find(|e| !self.endpoints.contains_key(e)) {
            Some(&e) => Err(PcGraphError::UnknownEdge(e)),
            None => Ok(()),
        }
    }

    pub fn canonical_form(&self) -> PcCanonicalForm {
        let mut sig: BTreeMap<&PcVertex, Vec<(Label, bool)>> =
            self.vertices.iter().map(|v| (v, Vec::new())).collect();
        for (&e, ends) in &self.endpoints {
            let is_loop = ends.len() == 1;
            for v in ends {
                sig.entry(v).or_default().push((e, is_loop));
            }
        }
        let mut out: Vec<_> = sig
            .into_iter()
            .map(|(v, edges)| (self.root.as_ref() == Some(v), edges))
            .collect();
        out.sort();
        PcCanonicalForm(out)
    }

    /// Isomorphism preserving edge labels and the root mark.
    pub fn is_isomorphic(&self, other: &PcGraph) -> bool {
        self.canonical_form() == other.canonical_form()
    }

    /// 1 ≤ |ε(e)| ≤ 2 and every endpoint is a vertex.
    pub fn is_well_formed(&self) -> bool {
        self.endpoints
            .values()
            .all(|s| (1..=2).contains(&s.len()) && s.iter().all(|v| self.vertices.contains(v)))
            && self.root.as_ref().is_none_or(|r| self.vertices.contains(r))
    }
}

pub fn build_pc_graph(u: &LegalString) -> PcGraph {
    let g = build_reduction_graph(u);
    let report = components(&g).expect("reduction graphs of legal strings are well formed");
    let mut endpoints: BTreeMap<Label, BTreeSet<PcVertex>> = BTreeMap::new();
    for (v, &c) in &report.membership {
        if let Some(l) = g.label(*v) {
            endpoints
                .entry(l)
                .or_default()
                .insert(PcVertex::component(c));
        }
    }
    PcGraph {
        vertices: (0..report.component_count())
            .map(PcVertex::component)
            .collect(),
        endpoints,
        root: Some(PcVertex::component(report.linear)),
    }
}

/// Labels whose vertices lie in two different components (non-loop edges).
pub fn snrdom(u: &LegalString) -> BTreeSet<Label> {
    let g = build_pc_graph(u);
    g.edges().filter(|&e| !g.is_loop(e)).collect()
}

/// Same vertex set, edges restricted to `d`.
pub fn restrict(g: &PcGraph, d: &BTreeSet<Label>) -> Result<PcGraph, PcGraphError> {
    g.check_edges(d)?;
    Ok(PcGraph {
        vertices: g.vertices.clone(),
        endpoints: d.iter().map(|e| (*e, g.endpoints[e].clone())).collect(),
        root: g.root.clone(),
    })
}

/// Removes edge `label` and every vertex left without edges. With no edges
/// left the result is a single root vertex.
pub fn pc_reduction_function(g: &PcGraph, label: Label) -> Result<PcGraph, PcGraphError> {
    if !g.endpoints.contains_key(&label) {
        return Err(PcGraphError::UnknownEdge(label));
    }
    let mut endpoints = g.endpoints.clone();
    endpoints.remove(&label);
    if endpoints.is_empty() {
        let only = g.root.clone().unwrap_or(PcVertex(BTreeSet::new()));
        return Ok(PcGraph {
            vertices: BTreeSet::from([only.clone()]),
            endpoints,
            root: Some(only),
        });
    }
    let vertices: BTreeSet<PcVertex> = endpoints.values().flatten().cloned().collect();
    let root = g.root.clone().filter(|r| vertices.contains(r));
    Ok(PcGraph {
        vertices,
        endpoints,
        root,
    })
}

/// Contracts edge `label`, fusing its two endpoints into one vertex.
pub fn merge(g: &PcGraph, label: Label) -> Result<PcGraph, PcGraphError> {
    let ends = g
        .endpoints
        .get(&label)
        .filter(|s| s.len() == 2)
        .ok_or(PcGraphError::NotMergeable(label))?;
    let fused = PcVertex(ends.iter().flat_map(|v| v.0.iter().copied()).collect());
    let h = |v: &PcVertex| {
        if ends.contains(v) {
            fused.clone()
        } else {
            v.clone()
        }
    };
    let vertices = g.vertices.iter().map(h).collect();
    let endpoints = g
        .endpoints
        .iter()
        .filter(|(&e, _)| e != label)
        .map(|(&e, s)| (e, s.iter().map(h).collect()))
        .collect();
    Ok(PcGraph {
        vertices,
        endpoints,
        root: g.root.as_ref().map(h),
    })
}

/// Merges along `labels` in the given order.
pub fn merge_all<I>(g: &PcGraph, labels: I) -> Result<PcGraph, PcGraphError>
where
    I: IntoIterator<Item = Label>,
{
    labels
        .into_iter()
        .try_fold(g.clone(), |acc, l| merge(&acc, l))
}

struct UnionFind(BTreeMap<PcVertex, PcVertex>);

impl UnionFind {
    fn new(vs: &BTreeSet<PcVertex>) -> Self {
        UnionFind(vs.iter().map(|v| (v.clone(), v.clone())).collect())
    }

    fn find(&mut self, v: &PcVertex) -> PcVertex {
        let mut cur = v.clone();
        loop {
            let parent = self.0[&cur].clone();
            if parent == cur {
                return cur;
            }
            cur = parent;
        }
    }

    /// False when `a` and `b` were already joined.
    fn union(&mut self, a: &PcVertex, b: &PcVertex) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0.insert(ra, rb);
        true
    }
}

/// No cycle among the edges `d`; a loop is a cycle, and so are two parallel
/// edges.
pub fn is_acyclic_restriction(g: &PcGraph, d: &BTreeSet<Label>) -> Result<bool, PcGraphError> {
    g.check_edges(d)?;
    let mut uf = UnionFind::new(&g.vertices);
    for e in d {
        let ends: Vec<_> = g.endpoints[e].iter().collect();
        let ok = match ends.as_slice() {
            [a, b] => uf.union(a, b),
            _ => false,
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether merging along every label of `d` is possible, in any order.
pub fn merge_sequence_applicable(g: &PcGraph, d: &BTreeSet<Label>) -> Result<bool, PcGraphError> {
    is_acyclic_restriction(g, d)
}

/// `g` restricted to `d` is connected over all of `g`'s vertices and acyclic.
pub fn is_spanning_tree(g: &PcGraph, d: &BTreeSet<Label>) -> Result<bool, PcGraphError> {
    Ok(is_acyclic_restriction(g, d)? && d.len() + 1 == g.order())
}

/// Every edge set forming a spanning tree, in sorted order.
pub fn enumerate_snr_domains(g: &PcGraph) -> Vec<BTreeSet<Label>> {
    let size = g.order() - 1;
    g.edges()
        .combinations(size)
        .map(|c| c.into_iter().collect::<BTreeSet<_>>())
        .filter(|d| is_spanning_tree(g, d).expect("edges come from g"))
        .collect()
}

pub fn is_connected(g: &PcGraph) -> bool {
    let mut uf = UnionFind::new(&g.vertices);
    for ends in g.endpoints.values() {
        if let [a, b] = ends.iter().collect::<Vec<_>>().as_slice() {
            uf.union(a, b);
        }
    }
    g.vertices
        .iter()
        .map(|v| uf.find(v))
        .collect::<BTreeSet<_>>()
        .len()
        <= 1
}

/// Number of snr rules every successful reduction of `u` uses.
pub fn required_snr_count(u: &LegalString) -> usize {
    build_pc_graph(u).order() - 1
}

/// A spanning tree rooted at the graph's root: for each edge, the edge on
/// the father side of it (if any).
struct RootedTree {
    father_edge: BTreeMap<Label, Option<Label>>,
}

impl RootedTree {
    fn new(g: &PcGraph, d: &BTreeSet<Label>) -> Result<Self, PcGraphError> {
        if !is_spanning_tree(g, d)? {
            return Err(PcGraphError::NotATree);
        }
        let root = g.root.clone().ok_or(PcGraphError::NoRoot)?;
        // edge leading up from each non-root vertex
        let mut up: BTreeMap<PcVertex, Label> = BTreeMap::new();
        let mut child_of: BTreeMap<Label, PcVertex> = BTreeMap::new();
        let mut frontier = vec![root];
        while let Some(v) = frontier.pop() {
            for e in d {
                if child_of.contains_key(e) || up.get(&v) == Some(e) {
                    continue;
                }
                let ends = &g.endpoints[e];
                if ends.contains(&v) {
                    let w = ends
                        .iter()
                        .find(|w| **w != v)
                        .expect("tree edges are not loops")
                        .clone();
                    up.insert(w.clone(), *e);
                    child_of.insert(*e, w.clone());
                    frontier.push(w);
                }
            }
        }
        let father_edge = d
            .iter()
            .map(|e| {
                let child = &child_of[e];
                let parent = g.endpoints[e]
                    .iter()
                    .find(|w| *w != child)
                    .expect("two ends");
                (*e, up.get(parent).copied())
            })
            .collect();
        Ok(RootedTree { father_edge })
    }

    fn is_ancestor(&self, anc: Label, e: Label) -> bool {
        let mut cur = self.father_edge[&e];
        while let Some(f) = cur {
            if f == anc {
                return true;
            }
            cur = self.father_edge[&f];
        }
        false
    }

    /// Edges whose child vertex is a leaf.
    fn leaf_edges(&self) -> BTreeSet<Label> {
        let fathers: BTreeSet<Label> = self.father_edge.values().flatten().copied().collect();
        self.father_edge
            .keys()
            .copied()
            .filter(|e| !fathers.contains(e))
            .collect()
    }

    fn is_ordering(&self, order: &[Label]) -> bool {
        let pos: BTreeMap<Label, usize> = order.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        pos.len() == order.len()
            && pos.len() == self.father_edge.len()
            && self.father_edge.iter().all(|(e, f)| match (pos.get(e), f) {
                (None, _) => false,
                (Some(_), None) => true,
                (Some(i), Some(f)) => pos.get(f).is_some_and(|j| i < j),
            })
    }

    fn orderings(&self) -> Vec<Vec<Label>> {
        fn go(tree: &RootedTree, placed: &mut Vec<Label>, out: &mut Vec<Vec<Label>>) {
            if placed.len() == tree.father_edge.len() {
                out.push(placed.clone());
                return;
            }
            let ready: Vec<Label> = tree
                .father_edge
                .keys()
                .copied()
                .filter(|e| !placed.contains(e))
                .filter(|&e| {
                    // all child edges already placed
                    tree.father_edge
                        .iter()
                        .filter(|(_, f)| **f == Some(e))
                        .all(|(c, _)| placed.contains(c))
                })
                .collect();
            for e in ready {
                placed.push(e);
                go(tree, placed, out);
                placed.pop();
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }
}

/// Every order of `d` in which each edge precedes the edge above it on the
/// way to the root.
pub fn edge_topological_orderings(
    g: &PcGraph,
    d: &BTreeSet<Label>,
) -> Result<Vec<Vec<Label>>, PcGraphError> {
    Ok(RootedTree::new(g, d)?.orderings())
}

/// Why a proposed snr order was rejected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderRejection {
    #[error("label {0} is listed twice")]
    Repeated(Label),
    #[error("label {0} does not occur in the string")]
    Absent(Label),
    #[error("the labels do not form a spanning tree of the pointer-component graph")]
    NotSpanningTree,
    #[error("the order puts an edge before one of its descendants")]
    NotEdgeTopological,
}

pub fn check_snr_order(u: &LegalString, order: &[Label]) -> Result<(), OrderRejection> {
    let mut d = BTreeSet::new();
    for &l in order {
        if !u.contains_label(l) {
            return Err(OrderRejection::Absent(l));
        }
        if !d.insert(l) {
            return Err(OrderRejection::Repeated(l));
        }
    }
    let g = build_pc_graph(u);
    let tree = RootedTree::new(&g, &d).map_err(|_| OrderRejection::NotSpanningTree)?;
    if tree.is_ordering(order) {
        Ok(())
    } else {
        Err(OrderRejection::NotEdgeTopological)
    }
}

/// True iff some successful reduction applies snr rules on exactly these
/// labels, in this order.
pub fn is_valid_snr_order(u: &LegalString, order: &[Label]) -> bool {
    check_snr_order(u, order).is_ok()
}

/// Builds a successful reduction whose snr rules follow `order`: first a
/// {spr, sdr}-reduction leaving exactly the labels of `order`, then the snr
/// rules one by one with whichever polarity applies.
pub fn realize_snr_order(u: &LegalString, order: &[Label]) -> Result<Reduction, OrderRejection> {
    check_snr_order(u, order)?;
    let d: BTreeSet<Label> = order.iter().copied().collect();
    let prefix =
        find_successful_reduction_using(&u.remove_pointers(&d), &[RuleKind::Spr, RuleKind::Sdr])
            .ok_or(OrderRejection::NotSpanningTree)?;
    let mut cur = apply_reduction(u, &prefix).map_err(|_| OrderRejection::NotSpanningTree)?;
    let mut phi = prefix;
    for &l in order {
        let rule = [Pointer::plain(l), Pointer::inverted(l)]
            .into_iter()
            .map(ReductionRule::snr)
            .find(|r| rule_applicable(&cur, r))
            .ok_or(OrderRejection::NotEdgeTopological)?;
        cur = apply_rule(&cur, &rule).expect("checked applicable");
        phi.push(rule);
    }
    debug_assert!(cur.is_empty());
    Ok(phi)
}

fn distinct(p: Label, q: Label) -> Result<(), PcGraphError> {
    if p == q {
        return Err(LegalStringError::SameLabel(p).into());
    }
    Ok(())
}

fn present(u: &LegalString, labels: &[Label]) -> Result<(), PcGraphError> {
    match labels.iter().find(|l| !u.contains_label(**l)) {
        Some(&l) => Err(LegalStringError::LabelAbsent(l).into()),
        None => Ok(()),
    }
}

/// Operational parallelism: some polarity choice lets the two snr rules
/// apply in both orders.
pub fn parallel_now(u: &LegalString, p: Label, q: Label) -> Result<bool, PcGraphError> {
    distinct(p, q)?;
    let variants = |l: Label| [Pointer::plain(l), Pointer::inverted(l)].map(ReductionRule::snr);
    Ok(variants(p)
        .into_iter()
        .cartesian_product(variants(q))
        .any(|(a, b)| {
            apply_reduction(u, &Reduction::new(vec![a, b])).is_ok()
                && apply_reduction(u, &Reduction::new(vec![b, a])).is_ok()
        }))
}

fn spanning_trees_with(
    u: &LegalString,
    p: Label,
    q: Label,
) -> Result<Vec<RootedTree>, PcGraphError> {
    distinct(p, q)?;
    present(u, &[p, q])?;
    let g = build_pc_graph(u);
    enumerate_snr_domains(&g)
        .into_iter()
        .filter(|d| d.contains(&p) && d.contains(&q))
        .map(|d| RootedTree::new(&g, &d))
        .collect()
}

/// Some spanning tree has both `p` and `q` ending at leaves.
pub fn parallel_tree_condition(u: &LegalString, p: Label, q: Label) -> Result<bool, PcGraphError> {
    Ok(spanning_trees_with(u, p, q)?.iter().any(|t| {
        let leaves = t.leaf_edges();
        leaves.contains(&p) && leaves.contains(&q)
    }))
}

/// Some spanning tree contains `p` and `q` with neither above the other.
pub fn eventually_parallel_condition(
    u: &LegalString,
    p: Label,
    q: Label,
) -> Result<bool, PcGraphError> {
    Ok(spanning_trees_with(u, p, q)?
        .iter()
        .any(|t| !t.is_ancestor(p, q) && !t.is_ancestor(q, p)))
}
