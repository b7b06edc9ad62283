//! Reduction graphs: 2-edge-coloured graphs with reality edges (adjacency in
//! the string) and desire edges (pointer identity), plus a source and a
//! target.
//!
//! Every vertex other than the source and target carries exactly one reality
//! and one desire edge, so each component is either the source–target path
//! (the linear component) or an alternating cycle. Canonical forms and
//! component analysis rely on that shape.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::legal_string::{Label, LegalString};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("malformed reduction graph: {0}")]
    Malformed(String),
}

fn malformed(msg: impl Into<String>) -> GraphError {
    GraphError::Malformed(msg.into())
}

/// Vertex identity is positional: `Left(i)` / `Right(i)` are the two ends of
/// the `i`-th pointer (1-based). Ordering follows the string: `s`, `I1`,
/// `Ip1`, `I2`, ..., `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RgVertex {
    Source,
    Left(usize),
    Right(usize),
    Target,
}

impl RgVertex {
    /// DOT identifier: `s`, `t`, `I<i>`, `Ip<i>`.
    pub fn name(self) -> String {
        match self {
            RgVertex::Source => "s".to_string(),
            RgVertex::Target => "t".to_string(),
            RgVertex::Left(i) => format!("I{i}"),
            RgVertex::Right(i) => format!("Ip{i}"),
        }
    }

    fn position(self) -> (usize, usize) {
        match self {
            RgVertex::Source => (0, 0),
            RgVertex::Left(i) => (i, 1),
            RgVertex::Right(i) => (i, 2),
            RgVertex::Target => (usize::MAX, 0),
        }
    }

    fn is_terminal(self) -> bool {
        matches!(self, RgVertex::Source | RgVertex::Target)
    }
}

impl Ord for RgVertex {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.position().cmp(&other.position())
    }
}

impl PartialOrd for RgVertex {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for RgVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Colour {
    Reality,
    Desire,
}

impl Colour {
    fn other(self) -> Colour {
        match self {
            Colour::Reality => Colour::Desire,
            Colour::Desire => Colour::Reality,
        }
    }
}

/// Unordered vertex pair stored smaller-first; `(x, x)` is a loop.
pub type Edge = (RgVertex, RgVertex);

fn edge(a: RgVertex, b: RgVertex) -> Edge {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn other_end(e: Edge, v: RgVertex) -> RgVertex {
    if e.0 == v {
        e.1
    } else {
        e.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionGraph {
    vertices: BTreeSet<RgVertex>,
    reality: BTreeSet<Edge>,
    desire: BTreeSet<Edge>,
    labels: BTreeMap<RgVertex, Label>,
}

impl ReductionGraph {
    pub fn vertices(&self) -> &BTreeSet<RgVertex> {
        &self.vertices
    }

    pub fn reality_edges(&self) -> &BTreeSet<Edge> {
        &self.reality
    }

    pub fn desire_edges(&self) -> &BTreeSet<Edge> {
        &self.desire
    }

    pub fn label(&self, v: RgVertex) -> Option<Label> {
        self.labels.get(&v).copied()
    }

    pub fn labels(&self) -> &BTreeMap<RgVertex, Label> {
        &self.labels
    }

    fn edges(&self, colour: Colour) -> &BTreeSet<Edge> {
        match colour {
            Colour::Reality => &self.reality,
            Colour::Desire => &self.desire,
        }
    }

    /// Edges of `colour` at `v`, a loop counted once.
    fn incident(&self, v: RgVertex, colour: Colour) -> impl Iterator<Item = Edge> + '_ {
        self.edges(colour)
            .iter()
            .copied()
            .filter(move |e| e.0 == v || e.1 == v)
    }

    fn neighbour(&self, v: RgVertex, colour: Colour) -> Option<RgVertex> {
        let mut it = self.incident(v, colour);
        let e = it.next()?;
        it.next().is_none().then(|| other_end(e, v))
    }

    /// Checks the degree, label and shape invariants.
    pub fn validate(&self) -> Result<(), GraphError> {
        for t in [RgVertex::Source, RgVertex::Target] {
            if !self.vertices.contains(&t) {
                return Err(malformed(format!("missing {t}")));
            }
        }
        for e in self.reality.iter().chain(&self.desire) {
            if !self.vertices.contains(&e.0) || !self.vertices.contains(&e.1) {
                return Err(malformed(format!(
                    "edge {{{}, {}}} leaves the vertex set",
                    e.0, e.1
                )));
            }
        }
        for &v in &self.vertices {
            let r = self.incident(v, Colour::Reality).count();
            let d = self.incident(v, Colour::Desire).count();
            let (want_d, labelled) = if v.is_terminal() {
                (0, false)
            } else {
                (1, true)
            };
            if r != 1 || d != want_d {
                return Err(malformed(format!(
                    "{v} has {r} reality and {d} desire edges"
                )));
            }
            if self.labels.contains_key(&v) != labelled {
                return Err(malformed(format!("label function is wrong at {v}")));
            }
        }
        let mut desire_per_label: BTreeMap<Label, usize> = BTreeMap::new();
        for e in &self.desire {
            let (a, b) = (self.labels[&e.0], self.labels[&e.1]);
            if a != b {
                return Err(malformed(format!(
                    "desire edge {}–{} joins labels {a} and {b}",
                    e.0, e.1
                )));
            }
            *desire_per_label.entry(a).or_default() += 1;
        }
        if let Some((l, n)) = desire_per_label.iter().find(|(_, &n)| n != 2) {
            return Err(malformed(format!("label {l} has {n} desire edges")));
        }
        let linear = self.walk_linear()?;
        if linear.last() != Some(&RgVertex::Target) {
            return Err(malformed("source does not reach target"));
        }
        Ok(())
    }

    /// Vertices of the linear component from source to target.
    fn walk_linear(&self) -> Result<Vec<RgVertex>, GraphError> {
        let mut path = vec![RgVertex::Source];
        let mut cur = RgVertex::Source;
        let mut colour = Colour::Reality;
        loop {
            let next = self
                .neighbour(cur, colour)
                .ok_or_else(|| malformed(format!("alternating path breaks at {cur}")))?;
            path.push(next);
            if next == RgVertex::Target {
                return Ok(path);
            }
            if next == RgVertex::Source || path.len() > self.vertices.len() {
                return Err(malformed("linear component does not end at target"));
            }
            cur = next;
            colour = colour.other();
        }
    }

    /// Vertices of the cycle through `start`, starting with its reality edge.
    fn walk_cycle(&self, start: RgVertex) -> Result<Vec<RgVertex>, GraphError> {
        let mut cycle = vec![start];
        let mut cur = start;
        let mut colour = Colour::Reality;
        loop {
            let next = self
                .neighbour(cur, colour)
                .ok_or_else(|| malformed(format!("alternating cycle breaks at {cur}")))?;
            colour = colour.other();
            if next == start && colour == Colour::Reality {
                return Ok(cycle);
            }
            if next.is_terminal() || cycle.len() > self.vertices.len() {
                return Err(malformed(format!(
                    "component of {start} is not an alternating cycle"
                )));
            }
            cycle.push(next);
            cur = next;
        }
    }
}

/// Builds the reduction graph of `u`. For λ this is `{s, t}` with the single
/// reality edge `{s, t}`.
pub fn build_reduction_graph(u: &LegalString) -> ReductionGraph {
    let x = u.as_slice();
    let n = x.len();
    let mut vertices = BTreeSet::from([RgVertex::Source, RgVertex::Target]);
    let mut labels = BTreeMap::new();
    for (i, p) in x.iter().enumerate() {
        for v in [RgVertex::Left(i + 1), RgVertex::Right(i + 1)] {
            vertices.insert(v);
            labels.insert(v, p.label());
        }
    }
    let mut reality = BTreeSet::new();
    if n == 0 {
        reality.insert(edge(RgVertex::Source, RgVertex::Target));
    } else {
        reality.insert(edge(RgVertex::Source, RgVertex::Left(1)));
        for i in 1..n {
            reality.insert(edge(RgVertex::Right(i), RgVertex::Left(i + 1)));
        }
        reality.insert(edge(RgVertex::Right(n), RgVertex::Target));
    }
    let mut desire = BTreeSet::new();
    for label in u.domain() {
        let (i, j) = u.occurrences(label).expect("legal string");
        let (a, b) = (i + 1, j + 1);
        if x[i] == x[j] {
            desire.insert(edge(RgVertex::Right(a), RgVertex::Left(b)));
            desire.insert(edge(RgVertex::Left(a), RgVertex::Right(b)));
        } else {
            desire.insert(edge(RgVertex::Left(a), RgVertex::Left(b)));
            desire.insert(edge(RgVertex::Right(a), RgVertex::Right(b)));
        }
    }
    ReductionGraph {
        vertices,
        reality,
        desire,
        labels,
    }
}

/// Partition into the linear component (id 0) and cyclic components
/// (ids `1..=N`). Cyclic ids follow the sorted label sets of the
/// components, ties broken by their smallest vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentReport {
    pub linear: usize,
    pub cyclic: Vec<usize>,
    pub membership: BTreeMap<RgVertex, usize>,
}

impl ComponentReport {
    pub fn cyclic_count(&self) -> usize {
        self.cyclic.len()
    }

    pub fn component_count(&self) -> usize {
        self.cyclic.len() + 1
    }

    /// Vertices of component `id`.
    pub fn members(&self, id: usize) -> impl Iterator<Item = RgVertex> + '_ {
        self.membership
            .iter()
            .filter(move |(_, &c)| c == id)
            .map(|(&v, _)| v)
    }
}

pub fn components(g: &ReductionGraph) -> Result<ComponentReport, GraphError> {
    g.validate()?;
    let mut membership = BTreeMap::new();
    for v in g.walk_linear()? {
        membership.insert(v, 0);
    }
    let mut cycles: Vec<(Vec<Label>, RgVertex, Vec<RgVertex>)> = Vec::new();
    for &v in &g.vertices {
        if membership.contains_key(&v) {
            continue;
        }
        let cycle = g.walk_cycle(v)?;
        for &w in &cycle {
            membership.insert(w, usize::MAX);
        }
        let labels: BTreeSet<Label> = cycle.iter().map(|w| g.labels[w]).collect();
        cycles.push((labels.into_iter().collect(), v, cycle));
    }
    cycles.sort();
    let mut cyclic = Vec::with_capacity(cycles.len());
    for (k, (_, _, cycle)) in cycles.into_iter().enumerate() {
        let id = k + 1;
        cyclic.push(id);
        for w in cycle {
            membership.insert(w, id);
        }
    }
    Ok(ComponentReport {
        linear: 0,
        cyclic,
        membership,
    })
}

/// The reduction function for `label`: drops the vertices carrying `label`
/// and contracts every alternating walk running through them into one
/// reality edge between its outer endpoints.
pub fn reduction_function(g: &ReductionGraph, label: Label) -> ReductionGraph {
    let hit = |v: &RgVertex| g.labels.get(v) == Some(&label);
    if !g.vertices.iter().any(hit) {
        return g.clone();
    }
    let mut added = BTreeSet::new();
    for &y in g.vertices.iter().filter(|v| !hit(v)) {
        for colour in [Colour::Reality, Colour::Desire] {
            for e in g.incident(y, colour).collect::<Vec<_>>() {
                let first = other_end(e, y);
                if !hit(&first) {
                    continue;
                }
                // follow the alternating walk until it leaves the label
                let mut cur = first;
                let mut c = colour.other();
                let mut steps = 1;
                let end = loop {
                    let Some(next) = g.neighbour(cur, c) else {
                        break None;
                    };
                    steps += 1;
                    if !hit(&next) {
                        break Some(next);
                    }
                    if steps > g.vertices.len() + 1 {
                        break None;
                    }
                    cur = next;
                    c = c.other();
                };
                if let Some(y2) = end {
                    if steps > 2 {
                        added.insert(edge(y, y2));
                    }
                }
            }
        }
    }
    let keep = |e: &&Edge| !hit(&e.0) && !hit(&e.1);
    ReductionGraph {
        vertices: g.vertices.iter().copied().filter(|v| !hit(v)).collect(),
        reality: g
            .reality
            .iter()
            .filter(keep)
            .copied()
            .chain(added)
            .collect(),
        desire: g.desire.iter().filter(keep).copied().collect(),
        labels: g
            .labels
            .iter()
            .filter(|(v, _)| !hit(v))
            .map(|(&v, &l)| (v, l))
            .collect(),
    }
}

/// Applies [`reduction_function`] for each label in turn.
pub fn reduction_functions<I>(g: &ReductionGraph, labels: I) -> ReductionGraph
where
    I: IntoIterator<Item = Label>,
{
    labels
        .into_iter()
        .fold(g.clone(), |acc, l| reduction_function(&acc, l))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Token {
    Source,
    Label(Label),
    Reality,
    Desire,
    Target,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Source => f.write_str("s"),
            Token::Target => f.write_str("t"),
            Token::Label(l) => write!(f, "{l}"),
            Token::Reality => f.write_str("="),
            Token::Desire => f.write_str("-"),
        }
    }
}

/// Isomorphism-invariant encoding of a reduction graph.
///
/// The linear component is read from source to target; each cycle is the
/// lexicographically least token sequence over all rotations and both
/// directions; cycles are sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CanonicalForm {
    pub linear: Vec<Token>,
    pub cycles: Vec<Vec<Token>>,
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.linear {
            write!(f, "{t}")?;
        }
        for c in &self.cycles {
            f.write_str(" (")?;
            for t in c {
                write!(f, "{t}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

fn colour_token(c: Colour) -> Token {
    match c {
        Colour::Reality => Token::Reality,
        Colour::Desire => Token::Desire,
    }
}

fn least_rotation(cycle: &[Token]) -> Vec<Token> {
    let n = cycle.len();
    let forward = cycle.to_vec();
    // reversed traversal from the same vertex: v, e_last, v_last, ...
    let mut backward = Vec::with_capacity(n);
    backward.push(cycle[0]);
    backward.extend(cycle[1..].iter().rev());
    [forward, backward]
        .iter()
        .flat_map(|seq| {
            (0..n).step_by(2).map(move |k| {
                seq[k..]
                    .iter()
                    .chain(&seq[..k])
                    .copied()
                    .collect::<Vec<_>>()
            })
        })
        .min()
        .unwrap_or_default()
}

pub fn canonical_form(g: &ReductionGraph) -> Result<CanonicalForm, GraphError> {
    let report = components(g)?;
    let path = g.walk_linear()?;
    let mut linear = Vec::with_capacity(2 * path.len());
    let mut colour = Colour::Reality;
    for (k, v) in path.iter().enumerate() {
        linear.push(match v {
            RgVertex::Source => Token::Source,
            RgVertex::Target => Token::Target,
            _ => Token::Label(g.labels[v]),
        });
        if k + 1 < path.len() {
            linear.push(colour_token(colour));
            colour = colour.other();
        }
    }
    let mut cycles = Vec::with_capacity(report.cyclic_count());
    for &id in &report.cyclic {
        let start = report.members(id).next().expect("non-empty component");
        let walk = g.walk_cycle(start)?;
        let mut tokens = Vec::with_capacity(2 * walk.len());
        let mut colour = Colour::Reality;
        for v in walk {
            tokens.push(Token::Label(g.labels[&v]));
            tokens.push(colour_token(colour));
            colour = colour.other();
        }
        cycles.push(least_rotation(&tokens));
    }
    cycles.sort();
    Ok(CanonicalForm { linear, cycles })
}

pub fn is_isomorphic(a: &ReductionGraph, b: &ReductionGraph) -> Result<bool, GraphError> {
    Ok(canonical_form(a)? == canonical_form(b)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduction::apply_reduction;

    fn rg(s: &str) -> ReductionGraph {
        build_reduction_graph(&s.parse().unwrap())
    }

    fn cyclic(s: &str) -> usize {
        components(&rg(s)).unwrap().cyclic_count()
    }

    const RUNNING: &str = "5 4 3 7 2 5 6 2 -7 3 4 6";

    #[test]
    fn running_example_shape() {
        let g = rg(RUNNING);
        assert_eq!(g.vertices().len(), 26);
        assert_eq!(g.reality_edges().len(), 13);
        assert_eq!(g.desire_edges().len(), 12);
        let c = components(&g).unwrap();
        assert_eq!(c.cyclic_count(), 3);
        let labels_of =
            |id: usize| -> BTreeSet<Label> { c.members(id).filter_map(|v| g.label(v)).collect() };
        assert_eq!(labels_of(0), BTreeSet::from([5, 6]));
        assert_eq!(labels_of(1), BTreeSet::from([2, 3, 7]));
        assert_eq!(labels_of(2), BTreeSet::from([2, 4, 5, 6]));
        assert_eq!(labels_of(3), BTreeSet::from([3, 4]));
        assert_eq!(
            canonical_form(&g).unwrap().linear,
            vec![
                Token::Source,
                Token::Reality,
                Token::Label(5),
                Token::Desire,
                Token::Label(5),
                Token::Reality,
                Token::Label(6),
                Token::Desire,
                Token::Label(6),
                Token::Reality,
                Token::Target
            ]
        );
    }

    #[test]
    fn empty_string_graph() {
        let g = rg("");
        assert_eq!(g.vertices().len(), 2);
        assert_eq!(
            g.reality_edges().iter().copied().collect::<Vec<_>>(),
            vec![(RgVertex::Source, RgVertex::Target)]
        );
        assert!(g.desire_edges().is_empty());
        assert_eq!(cyclic(""), 0);
    }

    #[test]
    fn double_pointer_graph() {
        let g = rg("2 2");
        let c = components(&g).unwrap();
        assert_eq!(c.cyclic_count(), 1);
        let cyc: Vec<_> = c.members(1).collect();
        assert_eq!(cyc, vec![RgVertex::Right(1), RgVertex::Left(2)]);
        let pair = (RgVertex::Right(1), RgVertex::Left(2));
        assert!(g.reality_edges().contains(&pair));
        assert!(g.desire_edges().contains(&pair));
        let lin: Vec<_> = c.members(0).collect();
        assert_eq!(
            lin,
            vec![
                RgVertex::Source,
                RgVertex::Left(1),
                RgVertex::Right(2),
                RgVertex::Target
            ]
        );
    }

    #[test]
    fn component_counts() {
        assert_eq!(cyclic("5 4 3 5 6 3 4 6"), 2);
        assert_eq!(cyclic("2 3 2 3"), 0);
        assert_eq!(cyclic("2 -2"), 0);
    }

    #[test]
    fn canonical_form_examples() {
        let iso = |a: &str, b: &str| is_isomorphic(&rg(a), &rg(b)).unwrap();
        assert!(iso("2 3 2 3", "2 3 -2 3"));
        assert!(iso("2 3 2 -4 3 4", "2 3 4 -2 3 4"));
        assert!(!iso("2 2", "2 -2"));
        assert_eq!(
            canonical_form(&rg("2 2")).unwrap().to_string(),
            "s=2-2=t (2=2-)"
        );
        assert_eq!(canonical_form(&rg("")).unwrap().to_string(), "s=t");
    }

    #[test]
    fn linear_direction_matters() {
        // s=2-2=3-3=t vs its mirror s=3-3=2-2=t differ once s and t are pinned
        assert!(!is_isomorphic(&rg("2 -2 3 -3"), &rg("3 -3 2 -2")).unwrap());
    }

    #[test]
    fn rf_absent_label_is_identity() {
        let g = rg(RUNNING);
        assert_eq!(reduction_function(&g, 9), g);
    }

    #[test]
    fn rf_simulates_running_reduction() {
        let u = RUNNING.parse().unwrap();
        let v = apply_reduction(&u, &"sdr(5,3); snr(4)".parse().unwrap()).unwrap();
        assert_eq!(v.to_string(), "6 2 -7 7 2 6");
        let image = reduction_functions(&build_reduction_graph(&u), [3, 4, 5]);
        image.validate().unwrap();
        assert!(is_isomorphic(&image, &build_reduction_graph(&v)).unwrap());
    }

    #[test]
    fn rf_commutes_on_running_example() {
        let g = rg(RUNNING);
        for p in 2..=7 {
            for q in 2..=7 {
                let a = reduction_function(&reduction_function(&g, p), q);
                let b = reduction_function(&reduction_function(&g, q), p);
                assert_eq!(a, b, "rf_{p} and rf_{q}");
            }
        }
    }

    #[test]
    fn malformed_graph_is_rejected() {
        let mut g = rg("2 2");
        g.desire.clear();
        assert!(matches!(components(&g), Err(GraphError::Malformed(_))));
    }
}
