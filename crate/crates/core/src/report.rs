//! Per-string analysis summary, rendered as text or serialized as JSON.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use itertools::Itertools;
use serde::Serialize;

use crate::legal_string::{Label, LegalString};
use crate::pc_graph::{
    build_pc_graph, edge_topological_orderings, enumerate_snr_domains, PcVertex,
};
use crate::reduction_graph::{build_reduction_graph, components};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DomainOrderings {
    pub domain: Vec<Label>,
    pub orders: Vec<Vec<Label>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnalysisReport {
    pub input: String,
    pub domain: Vec<Label>,
    pub snrdom: Vec<Label>,
    pub cyclic_components: usize,
    pub required_snr_count: usize,
    /// Edge label to endpoint component names.
    pub pc_edges: BTreeMap<Label, Vec<String>>,
    pub snr_domains: Vec<Vec<Label>>,
    pub orderings: Vec<DomainOrderings>,
}

pub fn analyze(u: &LegalString) -> AnalysisReport {
    let rg = build_reduction_graph(u);
    let cyclic = components(&rg)
        .expect("reduction graphs of legal strings are well formed")
        .cyclic_count();
    let pc = build_pc_graph(u);
    let required = pc.order() - 1;
    assert_eq!(
        required, cyclic,
        "snr count disagrees between the two graphs"
    );
    let domains = enumerate_snr_domains(&pc);
    let orderings = domains
        .iter()
        .map(|d| DomainOrderings {
            domain: d.iter().copied().collect(),
            orders: edge_topological_orderings(&pc, d).expect("enumerated domains are trees"),
        })
        .collect();
    AnalysisReport {
        input: u.to_string(),
        domain: u.domain().into_iter().collect(),
        snrdom: pc.edges().filter(|&e| !pc.is_loop(e)).collect(),
        cyclic_components: cyclic,
        required_snr_count: required,
        pc_edges: pc
            .endpoint_map()
            .iter()
            .map(|(&e, ends)| (e, ends.iter().map(PcVertex::name).collect()))
            .collect(),
        snr_domains: domains
            .iter()
            .map(|d| d.iter().copied().collect())
            .collect(),
        orderings,
    }
}

/// `{2,3,5}` style set rendering.
pub fn format_set<'a, I: IntoIterator<Item = &'a Label>>(labels: I) -> String {
    format!("{{{}}}", labels.into_iter().join(","))
}

pub fn format_sets(sets: &[BTreeSet<Label>]) -> String {
    sets.iter().map(format_set).join(" ")
}

impl fmt::Display for AnalysisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let input = if self.input.is_empty() {
            "(empty)"
        } else {
            &self.input
        };
        writeln!(f, "string:             {input}")?;
        writeln!(f, "domain:             {}", format_set(&self.domain))?;
        writeln!(f, "snrdom:             {}", format_set(&self.snrdom))?;
        writeln!(f, "cyclic components:  {}", self.cyclic_components)?;
        writeln!(f, "required snr count: {}", self.required_snr_count)?;
        writeln!(f, "pointer-component edges:")?;
        for (e, ends) in &self.pc_edges {
            writeln!(f, "  {e}: {}", ends.join(" -- "))?;
        }
        writeln!(f, "snr domains and orders (application order):")?;
        for d in &self.orderings {
            let orders = d
                .orders
                .iter()
                .map(|o| format!("({})", o.iter().join(",")))
                .join(" ");
            writeln!(f, "  {}: {orders}", format_set(&d.domain))?;
        }
        Ok(())
    }
}
