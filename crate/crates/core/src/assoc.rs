//! The associated graph of a minimal feasible region graph, exact vertex
//! coloring, and codes read off a coloring.

use serde::Serialize;

use crate::codes::RegionCode;
use crate::error::{Error, Result};
use crate::gf::{Elem, Field, Kernel};
use crate::labeling::{LabeledRegionGraph, RegionKind};
use crate::network::Session;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeColor {
    Red,
    Blue,
    Green,
}

/// Vertices `0` and `1` stand for X1 and X2; vertex `2 + j` is the `j`-th
/// coding region (see `coding`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AssociatedGraph {
    pub coding: Vec<usize>,
    pub edges: Vec<(usize, usize, EdgeColor)>,
}

impl AssociatedGraph {
    pub fn build(labeled: &LabeledRegionGraph) -> AssociatedGraph {
        let g = &labeled.graph;
        let coding = labeled.coding();
        let mut edges = vec![(0, 1, EdgeColor::Red)];
        for (i, &q) in coding.iter().enumerate() {
            for s in Session::BOTH {
                let shares = (0..g.len()).any(|r| labeled.kind(r) == RegionKind::of(s) && g.share_child(q, r));
                if shares {
                    edges.push((s.index(), 2 + i, EdgeColor::Green));
                }
            }
            for (j, &p) in coding.iter().enumerate().skip(i + 1) {
                if g.share_child(q, p) {
                    edges.push((2 + i, 2 + j, EdgeColor::Blue));
                }
            }
        }
        edges.sort_unstable_by_key(|&(a, b, _)| (a, b));
        AssociatedGraph { coding, edges }
    }

    pub fn vertex_count(&self) -> usize {
        self.coding.len() + 2
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.vertex_count()];
        for &(a, b, _) in &self.edges {
            d[a] += 1;
            d[b] += 1;
        }
        d
    }

    pub fn adjacency(&self) -> Vec<Vec<bool>> {
        let n = self.vertex_count();
        let mut adj = vec![vec![false; n]; n];
        for &(a, b, _) in &self.edges {
            adj[a][b] = true;
            adj[b][a] = true;
        }
        adj
    }

    pub fn vertex_name(&self, v: usize) -> String {
        match v {
            0 => "X1".into(),
            1 => "X2".into(),
            _ => format!("Q{}", v - 1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Coloring {
    pub colors: Vec<usize>,
    pub chi: usize,
    /// False when `chi` is only a greedy upper bound.
    pub exact: bool,
}

pub const EXACT_COLORING_LIMIT: usize = 64;

/// Proper coloring with the fewest colors, by branch and bound seeded with
/// a greedy upper bound and a greedy clique lower bound.
pub fn chromatic_number(adj: &[Vec<bool>]) -> Result<Coloring> {
    let n = adj.len();
    if n > EXACT_COLORING_LIMIT {
        return Err(Error::TooLarge(n));
    }
    let mut best = greedy_coloring(adj);
    let lower = greedy_clique(adj);
    if best.chi > lower {
        let mut order: Vec<usize> = (0..n).collect();
        let degree = |v: usize| adj[v].iter().filter(|&&b| b).count();
        order.sort_by_key(|&v| std::cmp::Reverse(degree(v)));
        let mut colors = vec![usize::MAX; n];
        branch(adj, &order, 0, 0, lower, &mut colors, &mut best);
    }
    best.exact = true;
    Ok(best)
}

fn branch(
    adj: &[Vec<bool>],
    order: &[usize],
    depth: usize,
    used: usize,
    lower: usize,
    colors: &mut [usize],
    best: &mut Coloring,
) {
    if best.chi == lower {
        return;
    }
    if depth == order.len() {
        if used < best.chi {
            best.chi = used;
            best.colors = colors.to_vec();
        }
        return;
    }
    let v = order[depth];
    // a new color is only worth opening if it still beats the incumbent
    let limit = (used + 1).min(best.chi - 1);
    for c in 0..limit {
        if (0..adj.len()).any(|u| adj[v][u] && colors[u] == c) {
            continue;
        }
        colors[v] = c;
        branch(adj, order, depth + 1, used.max(c + 1), lower, colors, best);
        colors[v] = usize::MAX;
    }
}

/// Welsh-Powell: vertices by descending degree, each takes the smallest
/// color free among its neighbours.
pub fn greedy_coloring(adj: &[Vec<bool>]) -> Coloring {
    let n = adj.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(adj[v].iter().filter(|&&b| b).count()));
    let mut colors = vec![usize::MAX; n];
    for &v in &order {
        let c = (0..)
            .find(|&c| !(0..n).any(|u| adj[v][u] && colors[u] == c))
            .expect("some color is free");
        colors[v] = c;
    }
    let chi = colors.iter().map(|&c| c + 1).max().unwrap_or(0);
    Coloring {
        colors,
        chi,
        exact: false,
    }
}

fn greedy_clique(adj: &[Vec<bool>]) -> usize {
    let n = adj.len();
    let mut best = usize::from(n > 0);
    for start in 0..n {
        let mut clique = vec![start];
        let mut candidates: Vec<usize> = (0..n).filter(|&u| adj[start][u]).collect();
        candidates.sort_by_key(|&v| std::cmp::Reverse(adj[v].iter().filter(|&&b| b).count()));
        for v in candidates {
            if clique.iter().all(|&u| adj[u][v]) {
                clique.push(v);
            }
        }
        best = best.max(clique.len());
    }
    best
}

/// Reads a code off a coloring of the associated graph: the colors of X1
/// and X2 become `α_1` and `α_2`, every other color a distinct `(1, c)`
/// with `c ≠ 0`. Needs `q ≥ χ - 1`.
pub fn code_from_coloring(
    labeled: &LabeledRegionGraph,
    omega: &AssociatedGraph,
    coloring: &Coloring,
    field: Field,
) -> Result<RegionCode> {
    let needed = coloring.chi.saturating_sub(1) as u64;
    if (field.order() as u64) < needed {
        return Err(Error::FieldTooSmall {
            order: field.order(),
            needed,
        });
    }
    let c1 = coloring.colors[0];
    let c2 = coloring.colors[1];
    if c1 == c2 {
        return Err(Error::InfeasibleInput);
    }
    let mut palette = vec![None; coloring.chi];
    palette[c1] = Some(Kernel::ALPHA1);
    palette[c2] = Some(Kernel::ALPHA2);
    for (c, slot) in (1u32..).zip(palette.iter_mut().filter(|s| s.is_none())) {
        *slot = Some(Kernel::beta(Elem(c)));
    }
    let mut kernels = vec![Kernel::ZERO; labeled.len()];
    for (r, kernel) in kernels.iter_mut().enumerate() {
        *kernel = match labeled.kind(r) {
            RegionKind::X1 => Kernel::ALPHA1,
            RegionKind::X2 => Kernel::ALPHA2,
            RegionKind::Singular => return Err(Error::InfeasibleInput),
            RegionKind::Coding => {
                let v = 2 + omega
                    .coding
                    .iter()
                    .position(|&q| q == r)
                    .expect("coding region has a vertex");
                palette[coloring.colors[v]].expect("every color is mapped")
            }
        };
    }
    RegionCode::from_kernels(&labeled.graph, field, kernels)
}
