//! Reduction to a minimal feasible region graph, the minimality check, and
//! structural audits of minimal graphs.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::labeling::{classify, feasibility, LabeledRegionGraph, RegionKind};
use crate::network::Session;
use crate::region::{RegionGraph, RegionState};

/// Something whose region graph can be edited: a bare graph, or a graph
/// paired with the decomposition it came from.
pub trait Editable: Clone {
    fn graph(&self) -> &RegionGraph;
    fn combine(&self, parent: usize, child: usize) -> Result<Self>;
    fn delete_edge(&self, parent: usize, child: usize) -> Result<Self>;
    fn normalized(&self) -> Self;
}

impl Editable for RegionGraph {
    fn graph(&self) -> &RegionGraph {
        self
    }

    fn combine(&self, parent: usize, child: usize) -> Result<Self> {
        RegionGraph::combine(self, parent, child)
    }

    fn delete_edge(&self, parent: usize, child: usize) -> Result<Self> {
        RegionGraph::delete_edge(self, parent, child)
    }

    fn normalized(&self) -> Self {
        RegionGraph::normalized(self)
    }
}

impl Editable for RegionState {
    fn graph(&self) -> &RegionGraph {
        &self.graph
    }

    fn combine(&self, parent: usize, child: usize) -> Result<Self> {
        RegionState::combine(self, parent, child)
    }

    fn delete_edge(&self, parent: usize, child: usize) -> Result<Self> {
        RegionState::delete_edge(self, parent, child)
    }

    fn normalized(&self) -> Self {
        RegionState::normalized(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EditKind {
    DeleteEdge,
    Combine,
}

/// A single edit; indices refer to the graph the edit was applied to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Edit {
    pub kind: EditKind,
    pub parent: usize,
    pub child: usize,
}

impl Edit {
    pub fn apply<T: Editable>(&self, x: &T) -> Result<T> {
        match self.kind {
            EditKind::DeleteEdge => x.delete_edge(self.parent, self.child),
            EditKind::Combine => x.combine(self.parent, self.child),
        }
    }
}

/// All single edits in canonical order: non-source regions ascending; for
/// each, in-edge deletions by ascending parent, then combinations with each
/// parent.
pub fn candidate_edits(graph: &RegionGraph) -> Vec<Edit> {
    let mut edits = Vec::new();
    for child in 0..graph.len() {
        if graph.is_source(child) {
            continue;
        }
        for kind in [EditKind::DeleteEdge, EditKind::Combine] {
            for &parent in graph.parents(child) {
                edits.push(Edit { kind, parent, child });
            }
        }
    }
    edits
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EditOrder {
    #[default]
    Canonical,
    /// Candidate edits reshuffled before every pass.
    Shuffled(u64),
}

#[derive(Clone, Debug)]
pub struct Minimized<T> {
    pub result: T,
    pub labeled: LabeledRegionGraph,
    /// Accepted edits, in order.
    pub edits: Vec<Edit>,
}

/// Applies feasibility-preserving edits until none is left. Every candidate
/// is judged after unique-parent normalization.
pub fn minimize<T: Editable>(input: &T) -> Result<Minimized<T>> {
    minimize_with(input, EditOrder::Canonical)
}

pub fn minimize_with<T: Editable>(input: &T, order: EditOrder) -> Result<Minimized<T>> {
    if !feasibility(input.graph()) {
        return Err(Error::InfeasibleInput);
    }
    let mut rng = match order {
        EditOrder::Shuffled(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        EditOrder::Canonical => None,
    };
    let mut current = input.normalized();
    let mut edits = Vec::new();
    'passes: loop {
        let mut candidates = candidate_edits(current.graph());
        if let Some(rng) = rng.as_mut() {
            candidates.shuffle(rng);
        }
        for edit in candidates {
            let next = edit.apply(&current)?;
            if feasibility(next.graph()) {
                current = next.normalized();
                edits.push(edit);
                continue 'passes;
            }
        }
        break;
    }
    let labeled = classify(current.graph());
    Ok(Minimized {
        result: current,
        labeled,
        edits,
    })
}

/// The first single edit that keeps the graph feasible, or `None` if the
/// graph is minimal. The input is assumed feasible.
pub fn check_minimal<T: Editable>(x: &T) -> Option<Edit> {
    candidate_edits(x.graph())
        .into_iter()
        .find(|e| e.apply(x).map(|y| feasibility(y.graph())).unwrap_or(false))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Audit {
    pub name: &'static str,
    pub passed: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinimalityReport {
    pub regions: usize,
    pub n_coding: usize,
    pub n_sink_regions: usize,
    pub sinks: usize,
    pub bound_coding: usize,
    pub bound_encoding: usize,
    pub encoding_link_count: Option<usize>,
    pub field_order: Option<u32>,
    pub field_bound: u32,
    /// Smallest supported order at least `field_bound`.
    pub supported_field_bound: u32,
    pub chromatic_number: Option<usize>,
    pub audits: Vec<Audit>,
}

impl MinimalityReport {
    /// Records a code built on the minimal graph and audits it against the
    /// encoding-link and field-size bounds. The field-order audit is skipped
    /// when the order was chosen by the caller.
    pub fn record_solution(
        &mut self,
        encoding_links: usize,
        field_order: u32,
        chi: Option<usize>,
        field_requested: bool,
    ) {
        self.encoding_link_count = Some(encoding_links);
        self.field_order = Some(field_order);
        self.chromatic_number = chi;
        self.audits.push(audit(
            "encoding_link_bound",
            (encoding_links > self.bound_encoding)
                .then(|| format!("{encoding_links} encoding links exceed {}", self.bound_encoding)),
        ));
        if let Some(chi) = chi {
            self.audits.push(audit(
                "chromatic_bound",
                (chi.saturating_sub(1) > self.field_bound as usize)
                    .then(|| format!("chromatic number {chi} minus one exceeds {}", self.field_bound)),
            ));
        }
        if !field_requested {
            self.audits.push(audit(
                "field_order_bound",
                (field_order > self.supported_field_bound)
                    .then(|| format!("GF({field_order}) exceeds GF({})", self.supported_field_bound)),
            ));
        }
    }

    pub fn all_passed(&self) -> bool {
        self.audits.iter().all(|a| a.passed)
    }

    pub fn failures(&self) -> Vec<&Audit> {
        self.audits.iter().filter(|a| !a.passed).collect()
    }
}

pub fn bound_coding(sinks: usize) -> usize {
    sinks.saturating_sub(2).max(1)
}

pub fn bound_encoding(sinks: usize) -> usize {
    (2 * sinks).saturating_sub(2).max(3)
}

fn name(r: usize) -> String {
    format!("R{}", r + 1)
}

fn audit(name: &'static str, witness: Option<String>) -> Audit {
    Audit {
        name,
        passed: witness.is_none(),
        witness,
    }
}

/// Checks the structure every minimal feasible region graph must have.
/// `sinks` is the number of sink links `N`.
pub fn structural_audit(labeled: &LabeledRegionGraph, sinks: usize) -> MinimalityReport {
    let g = &labeled.graph;
    let kind = |r: usize| labeled.kind(r);
    let is_x = |r: usize, s: Session| kind(r) == RegionKind::of(s);
    let coding = labeled.coding();
    let n = g.len();
    let mut audits = Vec::new();

    audits.push(audit(
        "non_source_regions_have_two_parents",
        (0..n)
            .find(|&r| !g.is_source(r) && g.parents(r).len() != 2)
            .map(|r| format!("{} has {} parents", name(r), g.parents(r).len())),
    ));

    let mut same_label = None;
    'outer: for s in Session::BOTH {
        for a in (0..n).filter(|&r| is_x(r, s)) {
            for b in (a + 1..n).filter(|&r| is_x(r, s)) {
                if g.adjacent(a, b) || g.share_child(a, b) {
                    same_label = Some(format!("{} and {} are both {s} regions", name(a), name(b)));
                    break 'outer;
                }
            }
        }
    }
    audits.push(audit("same_label_regions_separated", same_label));

    let mut coding_pair = None;
    for &a in &coding {
        for &b in &coding {
            if g.is_parent(a, b) && !g.share_child(a, b) {
                coding_pair = Some(format!("{} -> {} share no child", name(a), name(b)));
                break;
            }
        }
        if coding_pair.is_some() {
            break;
        }
    }
    audits.push(audit("adjacent_coding_regions_share_child", coding_pair));

    let mut coding_x = None;
    'cx: for &q in &coding {
        for s in Session::BOTH {
            let adjacent = (0..n).any(|r| is_x(r, s) && g.adjacent(q, r));
            if adjacent && !(0..n).any(|r| is_x(r, s) && g.share_child(q, r)) {
                coding_x = Some(format!(
                    "{} is next to an {s} region but shares no child with one",
                    name(q)
                ));
                break 'cx;
            }
        }
    }
    audits.push(audit("coding_next_to_x_shares_child", coding_x));

    audits.push(audit(
        "x_regions_are_sources_or_sinks",
        (0..n)
            .find(|&r| kind(r).session().is_some_and(|s| !g.roles(r).has(s)))
            .map(|r| format!("{} is {:?} without a source or sink of its own", name(r), kind(r))),
    ));

    let sink_children = |q: usize| g.children(q).iter().filter(|&&c| g.roles(c).is_sink()).count();
    audits.push(audit(
        "coding_regions_have_two_sink_children",
        coding
            .iter()
            .find(|&&q| sink_children(q) < 2)
            .map(|&q| format!("{} has {} sink children", name(q), sink_children(q))),
    ));

    let has_cross_sink_child = |q: usize, s: Session| {
        g.children(q)
            .iter()
            .any(|&c| g.roles(c).is_sink_of(s) && g.parents(c).iter().any(|&p| is_x(p, s.other())))
    };
    audits.push(audit(
        "last_coding_regions_feed_both_sessions",
        coding
            .iter()
            .filter(|&&q| !g.children(q).iter().any(|&c| kind(c) == RegionKind::Coding))
            .find(|&&q| !Session::BOTH.iter().all(|&s| has_cross_sink_child(q, s)))
            .map(|&q| format!("{} lacks a sink child fed across sessions", name(q))),
    ));

    let sources_witness = if coding.is_empty() {
        None
    } else if n < 3 || g.parents(2) != [0, 1] {
        Some("third region is not a common child of the source regions".into())
    } else {
        None
    };
    audits.push(audit("source_regions_have_common_child", sources_witness));

    let bound = bound_coding(sinks);
    audits.push(audit(
        "coding_region_bound",
        (coding.len() > bound).then(|| format!("{} coding regions exceed {bound}", coding.len())),
    ));

    let field_bound = crate::gf::field_size_bound(sinks.max(2)).expect("sink count is at least 2");
    MinimalityReport {
        regions: n,
        n_coding: coding.len(),
        n_sink_regions: (0..n).filter(|&r| g.roles(r).is_sink()).count(),
        sinks,
        bound_coding: bound,
        bound_encoding: bound_encoding(sinks),
        encoding_link_count: None,
        field_order: None,
        field_bound,
        supported_field_bound: crate::gf::smallest_supported_order(field_bound as u64).expect("bound is small"),
        chromatic_number: None,
        audits,
    }
}
