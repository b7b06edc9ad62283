//! The rewrite engine: snr / spr / sdr rules, reductions and the exhaustive
//! strategy enumerator.
//!
//! A [`Reduction`] stores its rules in application order: `rules[0]` is
//! applied first. The conventional right-to-left composition
//! `snr_6 snr_4 sdr_{5,3}` is therefore written `sdr(5,3); snr(4); snr(6)`.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::legal_string::{inverse_of, Label, LegalString, Pointer};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("rule {index} ({rule}) is not applicable to \"{string}\"")]
    NotApplicable {
        index: usize,
        rule: ReductionRule,
        string: LegalString,
    },
    #[error("sdr needs two distinct labels, got {0} twice")]
    SameLabel(Label),
    #[error("malformed rule {0:?}: expected snr(p), spr(p) or sdr(p,q)")]
    MalformedRule(String),
}

/// Kind rank doubles as the tie-breaking order: snr < spr < sdr.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleKind {
    Snr,
    Spr,
    Sdr,
}

impl RuleKind {
    fn name(self) -> &'static str {
        match self {
            RuleKind::Snr => "snr",
            RuleKind::Spr => "spr",
            RuleKind::Sdr => "sdr",
        }
    }
}

/// One rule instance. Equality is structural: `snr(2)` and `snr(-2)` are
/// different rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ReductionRule {
    kind: RuleKind,
    first: Pointer,
    second: Option<Pointer>,
}

impl ReductionRule {
    pub fn snr(p: Pointer) -> Self {
        ReductionRule {
            kind: RuleKind::Snr,
            first: p,
            second: None,
        }
    }

    pub fn spr(p: Pointer) -> Self {
        ReductionRule {
            kind: RuleKind::Spr,
            first: p,
            second: None,
        }
    }

    pub fn sdr(p: Pointer, q: Pointer) -> Result<Self, ReductionError> {
        if p.label() == q.label() {
            return Err(ReductionError::SameLabel(p.label()));
        }
        Ok(ReductionRule {
            kind: RuleKind::Sdr,
            first: p,
            second: Some(q),
        })
    }

    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    pub fn first(&self) -> Pointer {
        self.first
    }

    pub fn second(&self) -> Option<Pointer> {
        self.second
    }

    pub fn is_snr(&self) -> bool {
        self.kind == RuleKind::Snr
    }

    pub fn domain(&self) -> BTreeSet<Label> {
        let mut d = BTreeSet::from([self.first.label()]);
        if let Some(q) = self.second {
            d.insert(q.label());
        }
        d
    }

    /// Matches the rule template against `u`; returns the cut positions.
    fn locate(&self, u: &LegalString) -> Option<Match> {
        let items = u.as_slice();
        match self.kind {
            RuleKind::Snr => {
                let p = self.first;
                items
                    .windows(2)
                    .position(|w| w[0] == p && w[1] == p)
                    .map(Match::Snr)
            }
            RuleKind::Spr => {
                let p = self.first;
                let (i, j) = u.occurrences(p.label())?;
                (items[i] == p && items[j] == p.bar()).then_some(Match::Spr(i, j))
            }
            RuleKind::Sdr => {
                let (p, q) = (self.first, self.second?);
                let (pi, pj) = u.occurrences(p.label())?;
                let (qi, qj) = u.occurrences(q.label())?;
                let polarities =
                    items[pi] == p && items[pj] == p && items[qi] == q && items[qj] == q;
                (polarities && pi < qi && qi < pj && pj < qj)
                    .then_some(Match::Sdr([pi, qi, pj, qj]))
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Match {
    Snr(usize),
    Spr(usize, usize),
    Sdr([usize; 4]),
}

impl fmt::Display for ReductionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.second {
            Some(q) => write!(f, "{}({},{})", self.kind.name(), self.first, q),
            None => write!(f, "{}({})", self.kind.name(), self.first),
        }
    }
}

impl FromStr for ReductionRule {
    type Err = ReductionError;

    fn from_str(token: &str) -> Result<Self, Self::Err> {
        let malformed = || ReductionError::MalformedRule(token.to_string());
        let token = token.trim();
        let open = token.find('(').ok_or_else(malformed)?;
        let args = token[open + 1..].strip_suffix(')').ok_or_else(malformed)?;
        let args: Vec<Pointer> = args
            .split(',')
            .map(|a| a.trim().parse::<Pointer>())
            .collect::<Result<_, _>>()
            .map_err(|_| malformed())?;
        match (token[..open].trim(), args.as_slice()) {
            ("snr", [p]) => Ok(ReductionRule::snr(*p)),
            ("spr", [p]) => Ok(ReductionRule::spr(*p)),
            ("sdr", [p, q]) => ReductionRule::sdr(*p, *q),
            _ => Err(malformed()),
        }
    }
}

/// A sequence of rules in application order.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Reduction(Vec<ReductionRule>);

impl Reduction {
    pub fn new(rules: Vec<ReductionRule>) -> Self {
        Reduction(rules)
    }

    pub fn rules(&self) -> &[ReductionRule] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, rule: ReductionRule) {
        self.0.push(rule);
    }

    /// Labels of the snr rules, in application order.
    pub fn snr_labels(&self) -> Vec<Label> {
        self.0
            .iter()
            .filter(|r| r.is_snr())
            .map(|r| r.first.label())
            .collect()
    }

    pub fn snr_count(&self) -> usize {
        self.0.iter().filter(|r| r.is_snr()).count()
    }

    /// All prefixes, shortest (empty) first.
    pub fn prefixes(&self) -> impl Iterator<Item = Reduction> + '_ {
        (0..=self.0.len()).map(|k| Reduction(self.0[..k].to_vec()))
    }
}

impl From<Vec<ReductionRule>> for Reduction {
    fn from(rules: Vec<ReductionRule>) -> Self {
        Reduction(rules)
    }
}

impl fmt::Display for Reduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

impl FromStr for Reduction {
    type Err = ReductionError;

    /// `"sdr(5,3); spr(-7); snr(2)"`; blank text is the empty reduction.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        text.split(';')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect::<Result<Vec<_>, _>>()
            .map(Reduction)
    }
}

pub fn rule_applicable(u: &LegalString, r: &ReductionRule) -> bool {
    r.locate(u).is_some()
}

pub fn apply_rule(u: &LegalString, r: &ReductionRule) -> Result<LegalString, ReductionError> {
    let m = r.locate(u).ok_or_else(|| ReductionError::NotApplicable {
        index: 0,
        rule: *r,
        string: u.clone(),
    })?;
    let x = u.as_slice();
    let out = match m {
        // u1 p p u2 -> u1 u2
        Match::Snr(i) => [&x[..i], &x[i + 2..]].concat(),
        // u1 p u2 p̄ u3 -> u1 ū2 u3
        Match::Spr(i, j) => [&x[..i], &inverse_of(&x[i + 1..j])[..], &x[j + 1..]].concat(),
        // u1 p u2 q u3 p u4 q u5 -> u1 u4 u3 u2 u5
        Match::Sdr([a, b, c, d]) => [
            &x[..a],
            &x[c + 1..d],
            &x[b + 1..c],
            &x[a + 1..b],
            &x[d + 1..],
        ]
        .concat(),
    };
    Ok(LegalString::from_vec_unchecked(out))
}

/// Left-to-right fold of [`apply_rule`]; errors carry the failing index.
pub fn apply_reduction(u: &LegalString, phi: &Reduction) -> Result<LegalString, ReductionError> {
    let mut cur = u.clone();
    for (index, rule) in phi.0.iter().enumerate() {
        cur = apply_rule(&cur, rule).map_err(|_| ReductionError::NotApplicable {
            index,
            rule: *rule,
            string: cur.clone(),
        })?;
    }
    Ok(cur)
}

pub fn reduction_domain(phi: &Reduction) -> BTreeSet<Label> {
    phi.0.iter().flat_map(|r| r.domain()).collect()
}

/// Every rule instance applicable to `u`, sorted by the tie-breaking order.
pub fn applicable_rules(u: &LegalString) -> Vec<ReductionRule> {
    let x = u.as_slice();
    let mut rules = BTreeSet::new();
    for w in x.windows(2) {
        if w[0] == w[1] {
            rules.insert(ReductionRule::snr(w[0]));
        }
    }
    let labels: Vec<(Label, (usize, usize))> = u
        .domain()
        .into_iter()
        .filter_map(|l| u.occurrences(l).map(|o| (l, o)))
        .collect();
    for &(_, (i, j)) in &labels {
        if x[j] == x[i].bar() {
            rules.insert(ReductionRule::spr(x[i]));
        }
    }
    for &(_, (pi, pj)) in &labels {
        if x[pi] != x[pj] {
            continue;
        }
        for &(_, (qi, qj)) in &labels {
            if x[qi] == x[qj] && pi < qi && qi < pj && pj < qj {
                rules.insert(ReductionRule {
                    kind: RuleKind::Sdr,
                    first: x[pi],
                    second: Some(x[qi]),
                });
            }
        }
    }
    rules.into_iter().collect()
}

/// Greedy successful reduction: always applies the smallest applicable rule
/// (snr < spr < sdr, then by label, unbarred first). Any rule keeps the string
/// legal and every non-empty legal string admits a rule, so greed cannot get
/// stuck.
pub fn find_successful_reduction(u: &LegalString) -> Reduction {
    let mut cur = u.clone();
    let mut phi = Reduction::default();
    while let Some(rule) = applicable_rules(&cur).into_iter().next() {
        cur = apply_rule(&cur, &rule).expect("rule was reported applicable");
        phi.push(rule);
    }
    debug_assert!(cur.is_empty());
    phi
}

/// Depth-first search for a successful reduction using only rules of the
/// given kinds. Returns the lexicographically smallest such reduction.
pub fn find_successful_reduction_using(u: &LegalString, kinds: &[RuleKind]) -> Option<Reduction> {
    fn go(
        u: &LegalString,
        kinds: &[RuleKind],
        dead: &mut HashSet<LegalString>,
        path: &mut Vec<ReductionRule>,
    ) -> bool {
        if u.is_empty() {
            return true;
        }
        if dead.contains(u) {
            return false;
        }
        for rule in applicable_rules(u) {
            if !kinds.contains(&rule.kind) {
                continue;
            }
            let next = apply_rule(u, &rule).expect("applicable");
            path.push(rule);
            if go(&next, kinds, dead, path) {
                return true;
            }
            path.pop();
        }
        dead.insert(u.clone());
        false
    }
    let mut path = Vec::new();
    go(u, kinds, &mut HashSet::new(), &mut path).then_some(Reduction(path))
}

/// Output of the exhaustive strategy enumerator.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Enumeration {
    pub reductions: Vec<Reduction>,
    /// Set when `limit` cut the search short.
    pub truncated: bool,
}

/// Every successful reduction of `u`, found by exhaustive DFS over
/// [`applicable_rules`]. Exponential; meant for small strings.
pub fn enumerate_successful_reductions(u: &LegalString, limit: Option<usize>) -> Enumeration {
    fn go(
        u: &LegalString,
        path: &mut Vec<ReductionRule>,
        out: &mut Enumeration,
        limit: Option<usize>,
    ) {
        if out.truncated {
            return;
        }
        if u.is_empty() {
            if limit.is_some_and(|l| out.reductions.len() >= l) {
                out.truncated = true;
                return;
            }
            out.reductions.push(Reduction(path.clone()));
            return;
        }
        for rule in applicable_rules(u) {
            let next = apply_rule(u, &rule).expect("applicable");
            path.push(rule);
            go(&next, path, out, limit);
            path.pop();
        }
    }
    let mut out = Enumeration::default();
    go(u, &mut Vec::new(), &mut out, limit);
    out
}

/// Moves every snr rule to the end, keeping the relative order inside each
/// class. An spr rule can invert a pair before its snr runs, so each snr is
/// re-emitted with whichever polarity the postponed string offers.
pub fn postpone_snr(u: &LegalString, phi: &Reduction) -> Result<Reduction, ReductionError> {
    apply_reduction(u, phi)?;
    let (snr, other): (Vec<_>, Vec<_>) = phi.0.iter().copied().partition(|r| r.is_snr());
    let mut cur = apply_reduction(u, &Reduction(other.clone()))?;
    let mut rules = other;
    for (offset, r) in snr.iter().enumerate() {
        let p = r.first();
        let rule = [ReductionRule::snr(p), ReductionRule::snr(p.bar())]
            .into_iter()
            .find(|c| rule_applicable(&cur, c))
            .ok_or_else(|| ReductionError::NotApplicable {
                index: rules.len() + offset,
                rule: *r,
                string: cur.clone(),
            })?;
        cur = apply_rule(&cur, &rule)?;
        rules.push(rule);
    }
    Ok(Reduction(rules))
}

/// Every string reachable from `u` by some reduction, `u` included.
pub fn reachable_strings(u: &LegalString) -> BTreeSet<LegalString> {
    let mut seen = BTreeSet::from([u.clone()]);
    let mut stack = vec![u.clone()];
    while let Some(cur) = stack.pop() {
        for rule in applicable_rules(&cur) {
            let next = apply_rule(&cur, &rule).expect("applicable");
            if seen.insert(next.clone()) {
                stack.push(next);
            }
        }
    }
    seen
}
