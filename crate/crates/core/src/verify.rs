//! Exhaustive verification harness.
//!
//! Every legal string up to a label bound is run through the invariants of
//! all modules and through the graph characterizations, each compared with
//! the brute-force strategy enumerator. Asserted checks produce
//! counterexamples; open-question probes only produce agreement tables.
//!
//! Strings are independent, so the work is spread over a rayon pool when the
//! `parallel` feature is on. Per-string outcomes are merged in input order,
//! making the report identical for both execution modes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use itertools::Itertools;
use serde::Serialize;

use crate::enumerate::enumerate_legal_strings;
use crate::legal_string::{bar, parse_legal_string, render, Label, LegalString, Pointer};
use crate::pc_graph::{
    build_pc_graph, edge_topological_orderings, enumerate_snr_domains,
    eventually_parallel_condition, is_acyclic_restriction, is_connected, is_spanning_tree,
    is_valid_snr_order, merge, merge_all, merge_sequence_applicable, parallel_now,
    parallel_tree_condition, pc_reduction_function, realize_snr_order, required_snr_count,
    restrict, snrdom, PcGraph,
};
use crate::reduction::{
    applicable_rules, apply_reduction, apply_rule, enumerate_successful_reductions,
    find_successful_reduction, postpone_snr, reachable_strings, reduction_domain, rule_applicable,
    Reduction, ReductionRule,
};
use crate::reduction_graph::{
    build_reduction_graph, canonical_form, components, is_isomorphic, reduction_function,
    reduction_functions, ReductionGraph,
};
use crate::RUNNING_EXAMPLE;

/// Every public operation the harness must exercise.
pub const OPERATIONS: &[&str] = &[
    "parse_legal_string",
    "render",
    "bar",
    "inverse",
    "domain",
    "p_interval",
    "overlap",
    "is_positive",
    "remove_pointers",
    "rule_applicable",
    "apply_rule",
    "apply_reduction",
    "reduction_domain",
    "applicable_rules",
    "find_successful_reduction",
    "enumerate_successful_reductions",
    "postpone_snr",
    "build_reduction_graph",
    "components",
    "reduction_function",
    "canonical_form",
    "is_isomorphic",
    "build_pc_graph",
    "snrdom",
    "restrict",
    "pc_reduction_function",
    "merge",
    "merge_sequence_applicable",
    "is_acyclic_restriction",
    "is_spanning_tree",
    "enumerate_snr_domains",
    "is_connected",
    "required_snr_count",
    "edge_topological_orderings",
    "is_valid_snr_order",
    "parallel_now",
    "parallel_tree_condition",
    "eventually_parallel_condition",
];

/// Asserted checks, in report order, with the statement each one replays.
pub const CHECKS: &[(&str, &str)] = &[
    ("legal.text_roundtrip", "parse(render(u)) = u"),
    (
        "legal.inverse_involution",
        "inverse is an involution; bar is an involution",
    ),
    (
        "legal.remove_legality",
        "rem_D(u) is legal with domain dom(u) \\ D",
    ),
    ("legal.remove_composition", "rem_D rem_E = rem_(D u E)"),
    (
        "legal.overlap",
        "overlap is symmetric and matches interval membership",
    ),
    (
        "legal.positivity",
        "p positive iff an spr rule on p applies",
    ),
    ("reduction.progress", "non-empty legal strings admit a rule"),
    (
        "reduction.rule_legality",
        "rules preserve legality and remove exactly their domain",
    ),
    (
        "reduction.greedy_success",
        "the greedy reduction reaches the empty string",
    ),
    (
        "reduction.oracle_nonempty",
        "the enumerator finds a successful reduction",
    ),
    (
        "reduction.oracle_closure",
        "every prefix of an enumerated reduction applies step by step",
    ),
    (
        "reduction.dom_bookkeeping",
        "dom(phi) = dom(u) \\ dom(phi(u))",
    ),
    (
        "reduction.postponement",
        "postponing snr rules keeps a reduction successful",
    ),
    (
        "removal.snr_free_lift",
        "snr-free reductions of rem_D(u) apply to u",
    ),
    (
        "removal.applicable",
        "reductions avoiding D apply to rem_D(u)",
    ),
    ("removal.commute", "phi(rem_D(u)) = rem_D(phi(u))"),
    (
        "rg.invariants",
        "reduction graphs stay well formed under rf",
    ),
    ("rg.rf_commutation", "rf_q rf_p = rf_p rf_q"),
    (
        "rg.rf_simulation_rule",
        "rf over dom(rho) of R_u ~ R_rho(u) for single rules",
    ),
    ("rg.rf_simulation", "rf over dom(phi) of R_u ~ R_phi(u)"),
    (
        "rg.two_vertex_cycles",
        "a cycle labelled only p exists iff pp or -p-p occurs; it has 2 vertices",
    ),
    ("snr_count", "snr rules = cyclic components = o(PC_u) - 1"),
    ("pc.well_formed", "1 <= |eps(e)| <= 2"),
    ("pc.connected", "PC_u is connected"),
    (
        "pc.snrdom_preservation",
        "snrdom(phi(u)) = dom(phi(u)) n snrdom(u)",
    ),
    (
        "pc.rf_simulation_rule",
        "rf over dom(rho) of PC_u ~ PC_rho(u) for single rules",
    ),
    ("pc.rf_simulation", "rf over dom(phi) of PC_u ~ PC_phi(u)"),
    (
        "pc.merge_removal",
        "PC_rem_p(u) ~ merge_p(PC_u) on snrdom, else order grows by 0 or 1",
    ),
    (
        "pc.merge_sequences",
        "merges over D apply (in every order) iff PC_u|D is acyclic",
    ),
    (
        "pc.iterated_merges",
        "PC_rem_D(u) ~ merges over D when acyclic",
    ),
    (
        "pc.counting_form",
        "PC_u|D tree iff R_rem_D(u) has 0 and R_u has |D| cycles",
    ),
    (
        "pc.tree_sanity",
        "spanning tree iff connected restriction, and then acyclic with o-1 edges",
    ),
    (
        "pc.snr_domains",
        "spanning trees = snr domains of snr-last successful reductions",
    ),
    (
        "pc.acyclic_subdomains",
        "D within the snr set of some reduction iff PC_u|D acyclic",
    ),
    (
        "pc.snrdom_characterization",
        "p used by some snr iff p in snrdom(u)",
    ),
    (
        "pc.snr_orders",
        "realized snr orders = edge-topological orderings of spanning trees",
    ),
    (
        "pc.order_witness",
        "every valid order is realized by the constructed witness",
    ),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Falls back to sequential without the `parallel` feature.
    Parallel,
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub max_labels: usize,
    /// Cap on enumerated reductions per string.
    pub limit: Option<usize>,
    pub execution: Execution,
    /// Kept counterexamples (the tallies always count all of them).
    pub max_counterexamples: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            max_labels: 3,
            limit: None,
            execution: Execution::Parallel,
            max_counterexamples: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub passed: u64,
    pub failed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub check: String,
    pub input: String,
    pub detail: String,
}

/// Cross-tabulation of a graph condition against an operational test.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct AgreementTable {
    pub both_true: u64,
    pub both_false: u64,
    pub condition_only: u64,
    pub operational_only: u64,
    /// A few disagreeing cases as `string [p,q]`.
    pub examples: Vec<String>,
}

impl AgreementTable {
    fn record(&mut self, condition: bool, operational: bool, example: impl FnOnce() -> String) {
        match (condition, operational) {
            (true, true) => self.both_true += 1,
            (false, false) => self.both_false += 1,
            (true, false) => self.condition_only += 1,
            (false, true) => self.operational_only += 1,
        }
        if condition != operational && self.examples.len() < 5 {
            self.examples.push(example());
        }
    }

    fn absorb(&mut self, other: AgreementTable) {
        self.both_true += other.both_true;
        self.both_false += other.both_false;
        self.condition_only += other.condition_only;
        self.operational_only += other.operational_only;
        for e in other.examples {
            if self.examples.len() < 5 {
                self.examples.push(e);
            }
        }
    }

    pub fn disagreements(&self) -> u64 {
        self.condition_only + self.operational_only
    }
}

/// The parallelism question for labels 2 and 4 of the running example.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunningPairProbe {
    pub string: String,
    pub pair: (Label, Label),
    pub parallel_now: bool,
    pub leaf_tree_condition: bool,
    pub eventually_parallel_condition: bool,
    pub eventually_parallel_oracle: bool,
}

pub const PROBE_PARALLEL_NOW: &str = "parallel_now vs leaf spanning-tree condition";
pub const PROBE_EVENTUAL: &str =
    "eventual parallelism oracle vs no-common-root-path tree condition";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub max_labels: usize,
    pub polarity_coverage: String,
    /// Number of strings with exactly `k` labels, for `k = 0..=max_labels`.
    pub strings_per_size: Vec<usize>,
    pub total_strings: usize,
    pub truncated_strings: usize,
    pub checks: BTreeMap<String, Tally>,
    pub counterexamples: Vec<Counterexample>,
    pub probes: BTreeMap<String, AgreementTable>,
    /// Reality loops produced by reduction functions on graphs of legal strings.
    pub rf_loops_observed: u64,
    pub running_pair: RunningPairProbe,
    pub missing_coverage: Vec<String>,
}

impl VerificationReport {
    pub fn failures(&self) -> u64 {
        self.checks.values().map(|t| t.failed).sum()
    }

    /// No asserted check failed and every operation was exercised.
    pub fn is_success(&self) -> bool {
        self.failures() == 0 && self.missing_coverage.is_empty()
    }

    pub fn tally(&self, check: &str) -> Tally {
        self.checks.get(check).copied().unwrap_or_default()
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "verified {} legal strings with up to {} labels (per size: {}; polarities: {})",
            self.total_strings,
            self.max_labels,
            self.strings_per_size.iter().join(", "),
            self.polarity_coverage
        )?;
        if self.truncated_strings > 0 {
            writeln!(
                f,
                "{} strings hit the enumeration limit; their oracle comparisons were skipped",
                self.truncated_strings
            )?;
        }
        for (name, statement) in CHECKS {
            let t = self.tally(name);
            let verdict = if t.failed == 0 { "PASS" } else { "FAIL" };
            writeln!(
                f,
                "{verdict} {name:<28} {:>9} passed {:>5} failed  {statement}",
                t.passed, t.failed
            )?;
        }
        if self.missing_coverage.is_empty() {
            writeln!(f, "coverage: all {} operations exercised", OPERATIONS.len())?;
        } else {
            writeln!(f, "coverage: MISSING {}", self.missing_coverage.join(", "))?;
        }
        writeln!(f, "open-question probes (reported, not asserted):")?;
        for (name, t) in &self.probes {
            writeln!(
                f,
                "  {name}: both true {}, both false {}, condition only {}, operational only {}",
                t.both_true, t.both_false, t.condition_only, t.operational_only
            )?;
            for e in &t.examples {
                writeln!(f, "    e.g. {e}")?;
            }
        }
        writeln!(
            f,
            "  loops created by reduction functions: {}",
            self.rf_loops_observed
        )?;
        let p = &self.running_pair;
        writeln!(
            f,
            "  running example {} pair ({},{}): parallel now {}, leaf-tree condition {}, \
             eventual condition {}, eventual oracle {}{}",
            p.string,
            p.pair.0,
            p.pair.1,
            p.parallel_now,
            p.leaf_tree_condition,
            p.eventually_parallel_condition,
            p.eventually_parallel_oracle,
            if p.parallel_now != p.leaf_tree_condition {
                "  <- leaf-tree condition disagrees with operational parallelism"
            } else {
                ""
            }
        )?;
        for c in &self.counterexamples {
            writeln!(
                f,
                "counterexample [{}] {:?}: {}",
                c.check, c.input, c.detail
            )?;
        }
        let verdict = if self.is_success() { "OK" } else { "FAILED" };
        writeln!(f, "result: {verdict} ({} failed checks)", self.failures())
    }
}

/// Collected results for one string.
#[derive(Default)]
struct Outcome {
    input: String,
    tallies: BTreeMap<&'static str, Tally>,
    counterexamples: Vec<Counterexample>,
    coverage: BTreeSet<&'static str>,
    probes: BTreeMap<&'static str, AgreementTable>,
    rf_loops: u64,
    truncated: bool,
}

impl Outcome {
    fn check(&mut self, name: &'static str, ok: bool, detail: impl FnOnce() -> String) {
        let t = self.tallies.entry(name).or_default();
        if ok {
            t.passed += 1;
        } else {
            t.failed += 1;
            if self.counterexamples.len() < 20 {
                self.counterexamples.push(Counterexample {
                    check: name.to_string(),
                    input: self.input.clone(),
                    detail: detail(),
                });
            }
        }
    }

    fn cover(&mut self, ops: &[&'static str]) {
        self.coverage.extend(ops);
    }
}

fn subsets(d: &BTreeSet<Label>) -> Vec<BTreeSet<Label>> {
    d.iter()
        .copied()
        .powerset()
        .map(|s| s.into_iter().collect())
        .collect()
}

fn cyclic_count(u: &LegalString) -> usize {
    components(&build_reduction_graph(u))
        .expect("well-formed")
        .cyclic_count()
}

fn reality_loops(g: &ReductionGraph) -> u64 {
    g.reality_edges().iter().filter(|(a, b)| a == b).count() as u64
}

fn pc_rf_all(g: &PcGraph, labels: impl IntoIterator<Item = Label>) -> Option<PcGraph> {
    labels
        .into_iter()
        .try_fold(g.clone(), |acc, l| pc_reduction_function(&acc, l).ok())
}

fn check_legal_string(o: &mut Outcome, u: &LegalString) {
    o.cover(&[
        "parse_legal_string",
        "render",
        "bar",
        "inverse",
        "domain",
        "p_interval",
        "overlap",
        "is_positive",
        "remove_pointers",
    ]);
    let text = render(&u.to_pointer_string());
    o.check(
        "legal.text_roundtrip",
        parse_legal_string(&text).as_ref() == Ok(u),
        || text.clone(),
    );

    let s = u.to_pointer_string();
    let bars_ok = u
        .as_slice()
        .iter()
        .all(|&p| bar(bar(p)) == p && bar(p) != p);
    o.check(
        "legal.inverse_involution",
        s.inverse().inverse() == s && bars_ok,
        || format!("inverse {}", s.inverse()),
    );

    let dom = u.domain();
    let subs = subsets(&dom);
    for d in &subs {
        let r = u.remove_pointers(d);
        let legal = LegalString::new(r.as_slice().to_vec()).is_ok();
        let want: BTreeSet<Label> = dom.difference(d).copied().collect();
        o.check("legal.remove_legality", legal && r.domain() == want, || {
            format!("rem_{d:?} = {r}")
        });
        for e in &subs {
            let lhs = r.remove_pointers(e);
            let rhs = u.remove_pointers(&d.union(e).copied().collect());
            o.check("legal.remove_composition", lhs == rhs, || {
                format!("D={d:?} E={e:?}: {lhs} vs {rhs}")
            });
        }
    }

    for (&p, &q) in dom.iter().tuple_combinations() {
        let pq = u.overlap(p, q).expect("labels present");
        let qp = u.overlap(q, p).expect("labels present");
        let inside = |a: Label, b: Label| {
            let iv = u.p_interval(a).expect("present");
            iv.as_slice().iter().filter(|x| x.label() == b).count() == 1
        };
        o.check("legal.overlap", pq == qp && pq == inside(p, q), || {
            format!("overlap({p},{q})")
        });
    }
    for &p in &dom {
        let positive = u.is_positive(p).expect("present");
        let spr = [Pointer::plain(p), Pointer::inverted(p)]
            .iter()
            .any(|&x| rule_applicable(u, &ReductionRule::spr(x)));
        o.check("legal.positivity", positive == spr, || format!("label {p}"));
    }
}

/// Oracle data shared by the reduction and graph checks.
struct Oracle {
    successful: Vec<Reduction>,
    /// All prefixes of successful reductions, i.e. every reduction of `u`.
    prefixes: BTreeSet<Reduction>,
    complete: bool,
}

fn check_reduction(o: &mut Outcome, u: &LegalString, limit: Option<usize>) -> Oracle {
    o.cover(&[
        "rule_applicable",
        "apply_rule",
        "apply_reduction",
        "reduction_domain",
        "applicable_rules",
        "find_successful_reduction",
        "enumerate_successful_reductions",
        "postpone_snr",
    ]);
    let rules = applicable_rules(u);
    o.check(
        "reduction.progress",
        u.is_empty() == rules.is_empty(),
        || format!("{} applicable rules", rules.len()),
    );
    for r in &rules {
        let ok = rule_applicable(u, r)
            && apply_rule(u, r).is_ok_and(|v| {
                LegalString::new(v.as_slice().to_vec()).is_ok()
                    && v.domain() == u.domain().difference(&r.domain()).copied().collect()
            });
        o.check("reduction.rule_legality", ok, || r.to_string());
    }
    let greedy = find_successful_reduction(u);
    o.check(
        "reduction.greedy_success",
        apply_reduction(u, &greedy).is_ok_and(|v| v.is_empty()),
        || greedy.to_string(),
    );

    let en = enumerate_successful_reductions(u, limit);
    if en.truncated {
        o.truncated = true;
    }
    o.check(
        "reduction.oracle_nonempty",
        !en.reductions.is_empty(),
        String::new,
    );
    let mut prefixes = BTreeSet::new();
    for phi in &en.reductions {
        let mut cur = u.clone();
        let mut closed = true;
        for r in phi.rules() {
            match apply_rule(&cur, r) {
                Ok(v) => cur = v,
                Err(_) => {
                    closed = false;
                    break;
                }
            }
        }
        o.check("reduction.oracle_closure", closed && cur.is_empty(), || {
            phi.to_string()
        });
        let post = postpone_snr(u, phi);
        let ok = post.as_ref().is_ok_and(|p| {
            apply_reduction(u, p).is_ok_and(|v| v.is_empty())
                && p.rules()
                    .iter()
                    .skip_while(|r| !r.is_snr())
                    .all(|r| r.is_snr())
        });
        o.check("reduction.postponement", ok, || phi.to_string());
        prefixes.extend(phi.prefixes());
    }
    for phi in &prefixes {
        let ok = apply_reduction(u, phi).is_ok_and(|v| {
            reduction_domain(phi) == u.domain().difference(&v.domain()).copied().collect()
        });
        o.check("reduction.dom_bookkeeping", ok, || phi.to_string());
    }
    Oracle {
        successful: en.reductions,
        prefixes,
        complete: !en.truncated,
    }
}

fn check_removal(o: &mut Outcome, u: &LegalString, oracle: &Oracle, limit: Option<usize>) {
    let dom = u.domain();
    for d in subsets(&dom) {
        let removed = u.remove_pointers(&d);
        for phi in &oracle.prefixes {
            let on_u = apply_reduction(u, phi);
            let on_removed = apply_reduction(&removed, phi);
            if let (Ok(a), Ok(b)) = (&on_u, &on_removed) {
                let lhs = a.remove_pointers(&d);
                o.check("removal.commute", *b == lhs, || {
                    format!("D={d:?} phi={phi}: {b} vs {lhs}")
                });
            }
            if reduction_domain(phi).is_disjoint(&d) {
                o.check("removal.applicable", on_removed.is_ok(), || {
                    format!("D={d:?} phi={phi}")
                });
            }
        }
        let sub = enumerate_successful_reductions(&removed, limit);
        let snr_free: BTreeSet<Reduction> = sub
            .reductions
            .iter()
            .flat_map(|phi| phi.prefixes().collect::<Vec<_>>())
            .filter(|phi| phi.snr_count() == 0)
            .collect();
        for phi in snr_free {
            o.check(
                "removal.snr_free_lift",
                apply_reduction(u, &phi).is_ok(),
                || format!("D={d:?} phi={phi}"),
            );
        }
    }
}

fn check_reduction_graph(o: &mut Outcome, u: &LegalString, oracle: &Oracle) {
    o.cover(&[
        "build_reduction_graph",
        "components",
        "reduction_function",
        "canonical_form",
        "is_isomorphic",
    ]);
    let g = build_reduction_graph(u);
    let report = components(&g);
    o.check("rg.invariants", report.is_ok(), || format!("{report:?}"));
    let Ok(report) = report else { return };
    let dom = u.domain();
    let absent = dom.last().map_or(2, |l| l + 1);
    let mut labels: Vec<Label> = dom.iter().copied().collect();
    labels.push(absent);

    for &p in &labels {
        let gp = reduction_function(&g, p);
        o.rf_loops += reality_loops(&gp);
        o.check("rg.invariants", gp.validate().is_ok(), || {
            format!("after rf_{p}")
        });
        for &q in &labels {
            let a = reduction_function(&gp, q);
            let b = reduction_function(&reduction_function(&g, q), p);
            o.check("rg.rf_commutation", a == b, || format!("rf_{p} rf_{q}"));
        }
    }

    for r in applicable_rules(u) {
        let image = reduction_functions(&g, r.domain());
        let target = build_reduction_graph(&apply_rule(u, &r).expect("applicable"));
        let ok = is_isomorphic(&image, &target).unwrap_or(false)
            && canonical_form(&image).ok() == canonical_form(&target).ok();
        o.check("rg.rf_simulation_rule", ok, || r.to_string());
    }
    for phi in &oracle.prefixes {
        let v = apply_reduction(u, phi).expect("oracle reduction");
        let image = reduction_functions(&g, reduction_domain(phi));
        o.rf_loops += reality_loops(&image);
        o.check("rg.invariants", image.validate().is_ok(), || {
            format!("after rf over {phi}")
        });
        let ok = is_isomorphic(&image, &build_reduction_graph(&v)).unwrap_or(false);
        o.check("rg.rf_simulation", ok, || phi.to_string());
    }

    for &p in &dom {
        let only_p: Vec<usize> = report
            .cyclic
            .iter()
            .copied()
            .filter(|&c| report.members(c).all(|v| g.label(v) == Some(p)))
            .collect();
        let substring =
            u.has_adjacent_pair(Pointer::plain(p)) || u.has_adjacent_pair(Pointer::inverted(p));
        let sizes_ok = only_p.iter().all(|&c| report.members(c).count() == 2);
        o.check(
            "rg.two_vertex_cycles",
            (!only_p.is_empty()) == substring && sizes_ok,
            || format!("label {p}"),
        );
    }

    let cyclic = report.cyclic_count();
    let order_minus_one = required_snr_count(u);
    for phi in &oracle.successful {
        let n = phi.snr_count();
        o.check("snr_count", n == cyclic && n == order_minus_one, || {
            format!("{phi}: {n} snr, {cyclic} cyclic, o-1 = {order_minus_one}")
        });
    }
}

fn check_pc_graph(o: &mut Outcome, u: &LegalString, oracle: &Oracle) {
    o.cover(&[
        "build_pc_graph",
        "snrdom",
        "restrict",
        "pc_reduction_function",
        "merge",
        "merge_sequence_applicable",
        "is_acyclic_restriction",
        "is_spanning_tree",
        "enumerate_snr_domains",
        "is_connected",
        "required_snr_count",
        "edge_topological_orderings",
        "is_valid_snr_order",
    ]);
    let g = build_pc_graph(u);
    let dom = u.domain();
    let sd = snrdom(u);
    o.check(
        "pc.well_formed",
        g.is_well_formed() && g.edge_set() == dom,
        || format!("{g:?}"),
    );
    o.check("pc.connected", is_connected(&g), String::new);

    for phi in &oracle.prefixes {
        let v = apply_reduction(u, phi).expect("oracle reduction");
        let want: BTreeSet<Label> = v.domain().intersection(&sd).copied().collect();
        o.check("pc.snrdom_preservation", snrdom(&v) == want, || {
            phi.to_string()
        });
        let target = build_pc_graph(&v);
        let d = reduction_domain(phi);
        let forward = pc_rf_all(&g, d.iter().copied());
        let backward = pc_rf_all(&g, d.iter().rev().copied());
        let ok = [forward, backward]
            .iter()
            .all(|img| img.as_ref().is_some_and(|img| img.is_isomorphic(&target)));
        let name = if phi.len() == 1 {
            "pc.rf_simulation_rule"
        } else {
            "pc.rf_simulation"
        };
        o.check(name, ok, || phi.to_string());
    }

    for &p in &dom {
        let single = BTreeSet::from([p]);
        let removed = build_pc_graph(&u.remove_pointers(&single));
        if sd.contains(&p) {
            let ok = merge(&g, p).is_ok_and(|m| m.is_isomorphic(&removed))
                && removed.order() + 1 == g.order();
            o.check("pc.merge_removal", ok, || format!("merge_{p}"));
        } else {
            let ok =
                merge(&g, p).is_err() && (g.order()..=g.order() + 1).contains(&removed.order());
            o.check("pc.merge_removal", ok, || {
                format!("loop {p}: order {} -> {}", g.order(), removed.order())
            });
        }
    }

    let domains: BTreeSet<BTreeSet<Label>> = enumerate_snr_domains(&g).into_iter().collect();
    for d in subsets(&dom) {
        let acyclic = is_acyclic_restriction(&g, &d).expect("subset of edges");
        let via_merges = merge_sequence_applicable(&g, &d).expect("subset of edges");
        let every = d
            .iter()
            .copied()
            .permutations(d.len())
            .all(|p| merge_all(&g, p).is_ok());
        let some = d
            .iter()
            .copied()
            .permutations(d.len())
            .any(|p| merge_all(&g, p).is_ok());
        o.check(
            "pc.merge_sequences",
            acyclic == via_merges && acyclic == every && acyclic == some,
            || format!("D={d:?}"),
        );
        if acyclic {
            let merged = merge_all(&g, d.iter().copied()).expect("acyclic");
            let removed = build_pc_graph(&u.remove_pointers(&d));
            o.check("pc.iterated_merges", merged.is_isomorphic(&removed), || {
                format!("D={d:?}")
            });
        }
        let tree = is_spanning_tree(&g, &d).expect("subset of edges");
        let counting = cyclic_count(&u.remove_pointers(&d)) == 0 && cyclic_count(u) == d.len();
        o.check("pc.counting_form", tree == counting, || format!("D={d:?}"));
        let restricted = restrict(&g, &d).expect("subset of edges");
        let sane = tree == (is_connected(&restricted) && acyclic)
            && (!tree || d.len() + 1 == g.order())
            && tree == domains.contains(&d);
        o.check("pc.tree_sanity", sane, || format!("D={d:?}"));
    }

    if !oracle.complete {
        return;
    }
    let snr_sets: BTreeSet<BTreeSet<Label>> = oracle
        .successful
        .iter()
        .map(|phi| {
            let post = postpone_snr(u, phi).expect("oracle reduction");
            post.rules()
                .iter()
                .skip_while(|r| !r.is_snr())
                .map(|r| r.first().label())
                .collect()
        })
        .collect();
    o.check("pc.snr_domains", snr_sets == domains, || {
        format!("oracle {snr_sets:?} vs trees {domains:?}")
    });
    for d in subsets(&dom) {
        let acyclic = is_acyclic_restriction(&g, &d).expect("subset");
        let realized = snr_sets.iter().any(|s| d.is_subset(s));
        o.check("pc.acyclic_subdomains", acyclic == realized, || {
            format!("D={d:?}")
        });
    }
    for &p in &dom {
        let used = snr_sets.iter().any(|s| s.contains(&p));
        o.check(
            "pc.snrdom_characterization",
            used == sd.contains(&p),
            || format!("label {p}"),
        );
    }

    let realized: BTreeSet<Vec<Label>> = oracle
        .successful
        .iter()
        .map(Reduction::snr_labels)
        .collect();
    let mut predicted = BTreeSet::new();
    for d in &domains {
        predicted.extend(edge_topological_orderings(&g, d).expect("tree"));
    }
    o.check("pc.snr_orders", realized == predicted, || {
        format!("oracle {realized:?} vs trees {predicted:?}")
    });
    for d in &domains {
        for perm in d.iter().copied().permutations(d.len()) {
            let valid = is_valid_snr_order(u, &perm);
            o.check("pc.snr_orders", valid == realized.contains(&perm), || {
                format!("order {perm:?}")
            });
        }
    }
    for order in &predicted {
        let ok = realize_snr_order(u, order).is_ok_and(|w| {
            w.snr_labels() == *order && apply_reduction(u, &w).is_ok_and(|v| v.is_empty())
        });
        o.check("pc.order_witness", ok, || format!("order {order:?}"));
    }
}

/// Some reduction leads to a string where the two snr rules commute.
pub fn eventually_parallel_oracle(u: &LegalString, p: Label, q: Label) -> bool {
    reachable_strings(u).iter().any(|v| {
        v.contains_label(p) && v.contains_label(q) && parallel_now(v, p, q).unwrap_or(false)
    })
}

fn probe_parallelism(o: &mut Outcome, u: &LegalString) {
    o.cover(&[
        "parallel_now",
        "parallel_tree_condition",
        "eventually_parallel_condition",
    ]);
    let dom = u.domain();
    if dom.len() < 2 {
        return;
    }
    let reachable = reachable_strings(u);
    for (&p, &q) in dom.iter().tuple_combinations() {
        let now = parallel_now(u, p, q).expect("distinct");
        let leaves = parallel_tree_condition(u, p, q).expect("present");
        let text = u.to_string();
        o.probes
            .entry(PROBE_PARALLEL_NOW)
            .or_default()
            .record(leaves, now, || format!("{text} [{p},{q}]"));
        let eventual = reachable.iter().any(|v| {
            v.contains_label(p) && v.contains_label(q) && parallel_now(v, p, q).unwrap_or(false)
        });
        let condition = eventually_parallel_condition(u, p, q).expect("present");
        o.probes
            .entry(PROBE_EVENTUAL)
            .or_default()
            .record(condition, eventual, || format!("{text} [{p},{q}]"));
    }
}

fn verify_string(u: &LegalString, limit: Option<usize>) -> Outcome {
    let mut o = Outcome {
        input: u.to_string(),
        ..Outcome::default()
    };
    check_legal_string(&mut o, u);
    let oracle = check_reduction(&mut o, u, limit);
    check_removal(&mut o, u, &oracle, limit);
    check_reduction_graph(&mut o, u, &oracle);
    check_pc_graph(&mut o, u, &oracle);
    probe_parallelism(&mut o, u);
    o
}

fn run_all(strings: &[LegalString], limit: Option<usize>, execution: Execution) -> Vec<Outcome> {
    match execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            strings
                .par_iter()
                .map(|u| verify_string(u, limit))
                .collect()
        }
        _ => strings.iter().map(|u| verify_string(u, limit)).collect(),
    }
}

pub fn running_pair_probe() -> RunningPairProbe {
    let u: LegalString = RUNNING_EXAMPLE.parse().expect("valid");
    let (p, q) = (2, 4);
    RunningPairProbe {
        string: u.to_string(),
        pair: (p, q),
        parallel_now: parallel_now(&u, p, q).expect("distinct"),
        leaf_tree_condition: parallel_tree_condition(&u, p, q).expect("present"),
        eventually_parallel_condition: eventually_parallel_condition(&u, p, q).expect("present"),
        eventually_parallel_oracle: eventually_parallel_oracle(&u, p, q),
    }
}

pub fn run_verification(opts: &VerifyOptions) -> VerificationReport {
    let mut strings_per_size = Vec::with_capacity(opts.max_labels + 1);
    let mut strings = Vec::new();
    for n in 0..=opts.max_labels {
        let before = strings.len();
        strings.extend(enumerate_legal_strings(n));
        strings_per_size.push(strings.len() - before);
    }
    let outcomes = run_all(&strings, opts.limit, opts.execution);

    let mut checks: BTreeMap<String, Tally> = CHECKS
        .iter()
        .map(|(name, _)| (name.to_string(), Tally::default()))
        .collect();
    let mut counterexamples = Vec::new();
    let mut probes: BTreeMap<String, AgreementTable> = BTreeMap::new();
    let mut coverage = BTreeSet::new();
    let mut rf_loops = 0;
    let mut truncated = 0;
    for o in outcomes {
        for (name, t) in o.tallies {
            let e = checks.entry(name.to_string()).or_default();
            e.passed += t.passed;
            e.failed += t.failed;
        }
        for c in o.counterexamples {
            if counterexamples.len() < opts.max_counterexamples {
                counterexamples.push(c);
            }
        }
        for (name, t) in o.probes {
            probes.entry(name.to_string()).or_default().absorb(t);
        }
        coverage.extend(o.coverage);
        rf_loops += o.rf_loops;
        truncated += usize::from(o.truncated);
    }
    let missing_coverage = OPERATIONS
        .iter()
        .filter(|op| !coverage.contains(*op))
        .map(|op| op.to_string())
        .collect();
    VerificationReport {
        max_labels: opts.max_labels,
        polarity_coverage: "all 4 per label".to_string(),
        total_strings: strings.len(),
        strings_per_size,
        truncated_strings: truncated,
        checks,
        counterexamples,
        probes,
        rf_loops_observed: rf_loops,
        running_pair: running_pair_probe(),
        missing_coverage,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_universe_passes() {
        let report = run_verification(&VerifyOptions {
            max_labels: 2,
            execution: Execution::Sequential,
            ..VerifyOptions::default()
        });
        assert_eq!(report.strings_per_size, vec![1, 4, 96]);
        assert!(report.is_success(), "{report}");
        for (name, _) in CHECKS {
            assert!(report.tally(name).passed > 0, "{name} never ran");
        }
    }

    #[test]
    fn execution_modes_agree() {
        let opts = VerifyOptions {
            max_labels: 2,
            ..VerifyOptions::default()
        };
        let par = run_verification(&opts);
        let seq = run_verification(&VerifyOptions {
            execution: Execution::Sequential,
            ..opts
        });
        assert_eq!(par, seq);
    }

    #[test]
    fn limit_marks_truncation() {
        let report = run_verification(&VerifyOptions {
            max_labels: 2,
            limit: Some(1),
            execution: Execution::Sequential,
            ..VerifyOptions::default()
        });
        assert!(report.truncated_strings > 0);
        assert!(report.is_success(), "{report}");
    }
}
