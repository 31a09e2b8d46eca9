//! X1/X2 labeling, region classification and the feasibility decision.

use serde::Serialize;

use crate::network::{Network, Session};
use crate::region::{RegionGraph, RegionState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RegionKind {
    X1,
    X2,
    Coding,
    Singular,
}

impl RegionKind {
    pub fn of(session: Session) -> RegionKind {
        match session {
            Session::X1 => RegionKind::X1,
            Session::X2 => RegionKind::X2,
        }
    }

    pub fn session(self) -> Option<Session> {
        match self {
            RegionKind::X1 => Some(Session::X1),
            RegionKind::X2 => Some(Session::X2),
            _ => None,
        }
    }
}

/// The least fixed point of the `X_i` labeling: regions containing an `X_i`
/// link, closed under "all parents labeled". One pass in region order
/// suffices because parents precede children.
///
/// Source regions are only ever seeds. A non-source region without parents
/// is labeled vacuously.
pub fn label(graph: &RegionGraph, session: Session) -> Vec<bool> {
    let mut labeled = vec![false; graph.len()];
    for r in 0..graph.len() {
        let roles = graph.roles(r);
        labeled[r] = roles.has(session) || (!roles.is_source() && graph.parents(r).iter().all(|&p| labeled[p]));
    }
    labeled
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledRegionGraph {
    pub graph: RegionGraph,
    pub x1: Vec<bool>,
    pub x2: Vec<bool>,
    pub kinds: Vec<RegionKind>,
}

impl LabeledRegionGraph {
    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn kind(&self, region: usize) -> RegionKind {
        self.kinds[region]
    }

    pub fn labeled(&self, region: usize, session: Session) -> bool {
        match session {
            Session::X1 => self.x1[region],
            Session::X2 => self.x2[region],
        }
    }

    fn indices(&self, kind: RegionKind) -> Vec<usize> {
        (0..self.len()).filter(|&r| self.kinds[r] == kind).collect()
    }

    /// Coding regions in region (head) order.
    pub fn coding(&self) -> Vec<usize> {
        self.indices(RegionKind::Coding)
    }

    pub fn singular(&self) -> Vec<usize> {
        self.indices(RegionKind::Singular)
    }

    pub fn regions_of(&self, session: Session) -> Vec<usize> {
        self.indices(RegionKind::of(session))
    }

    /// No singular region. Meaningful only when every non-source region has
    /// at least two parents; see [`feasibility`] otherwise.
    pub fn has_no_singular(&self) -> bool {
        !self.kinds.contains(&RegionKind::Singular)
    }

    pub fn satisfies_two_parent_condition(&self) -> bool {
        (0..self.len()).all(|r| self.graph.is_source(r) || self.graph.parents(r).len() >= 2)
    }
}

pub fn classify(graph: &RegionGraph) -> LabeledRegionGraph {
    let x1 = label(graph, Session::X1);
    let x2 = label(graph, Session::X2);
    let kinds = x1
        .iter()
        .zip(&x2)
        .map(|(&a, &b)| match (a, b) {
            (true, true) => RegionKind::Singular,
            (true, false) => RegionKind::X1,
            (false, true) => RegionKind::X2,
            (false, false) => RegionKind::Coding,
        })
        .collect();
    LabeledRegionGraph {
        graph: graph.clone(),
        x1,
        x2,
        kinds,
    }
}

/// Feasibility of an arbitrary region graph: normalize away unique-parent
/// regions, relabel, and look for singular regions.
pub fn feasibility(graph: &RegionGraph) -> bool {
    classify(&graph.normalized()).has_no_singular()
}

/// Same decision for a decomposition-backed state; returns the normalized
/// state and its labeling.
pub fn feasibility_of_state(state: &RegionState) -> (bool, RegionState, LabeledRegionGraph) {
    let normalized = state.normalized();
    let labeled = classify(&normalized.graph);
    (labeled.has_no_singular(), normalized, labeled)
}

#[derive(Clone, Debug)]
pub struct Solvability {
    pub solvable: bool,
    pub state: RegionState,
    pub labeled: LabeledRegionGraph,
}

/// Basic decomposition, region graph, labeling, and the singular-region test.
pub fn solvable(network: &Network) -> Solvability {
    let state = RegionState::basic(network);
    let labeled = classify(&state.graph);
    Solvability {
        solvable: labeled.has_no_singular(),
        state,
        labeled,
    }
}
