//! Regions, region decompositions and region graphs.
//!
//! A region is a set of links with a head such that every other member has
//! an incoming link inside the set. Since links are topologically indexed,
//! the head of a region is always its smallest link id, so ordering regions
//! by head id is a topological order of every region graph. All types here
//! keep regions in that order; region index `0` is the X1 source region and
//! index `1` the X2 source region.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::network::{LinkId, LinkKind, Network, Session};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Region {
    head: LinkId,
    links: Vec<LinkId>,
}

impl Region {
    /// `links` must be non-empty; the head is the smallest id.
    pub fn from_links(mut links: Vec<LinkId>) -> Region {
        links.sort_unstable();
        links.dedup();
        Region { head: links[0], links }
    }

    pub fn head(&self) -> LinkId {
        self.head
    }

    pub fn links(&self) -> &[LinkId] {
        &self.links
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn contains(&self, id: LinkId) -> bool {
        self.links.binary_search(&id).is_ok()
    }

    fn merged(&self, other: &Region) -> Region {
        let mut links = Vec::with_capacity(self.len() + other.len());
        links.extend_from_slice(&self.links);
        links.extend_from_slice(&other.links);
        links.sort_unstable();
        Region { head: self.head, links }
    }
}

/// Which imaginary links a region contains.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Roles {
    pub x1_source: bool,
    pub x2_source: bool,
    pub x1_sink: bool,
    pub x2_sink: bool,
}

impl Roles {
    pub fn source(session: Session) -> Roles {
        let mut r = Roles::default();
        r.set_source(session);
        r
    }

    pub fn sink(session: Session) -> Roles {
        let mut r = Roles::default();
        r.set_sink(session);
        r
    }

    pub fn set_source(&mut self, session: Session) {
        match session {
            Session::X1 => self.x1_source = true,
            Session::X2 => self.x2_source = true,
        }
    }

    pub fn set_sink(&mut self, session: Session) {
        match session {
            Session::X1 => self.x1_sink = true,
            Session::X2 => self.x2_sink = true,
        }
    }

    pub fn is_source_of(&self, session: Session) -> bool {
        match session {
            Session::X1 => self.x1_source,
            Session::X2 => self.x2_source,
        }
    }

    pub fn is_sink_of(&self, session: Session) -> bool {
        match session {
            Session::X1 => self.x1_sink,
            Session::X2 => self.x2_sink,
        }
    }

    /// Contains an `X_i` link.
    pub fn has(&self, session: Session) -> bool {
        self.is_source_of(session) || self.is_sink_of(session)
    }

    pub fn is_source(&self) -> bool {
        self.x1_source || self.x2_source
    }

    pub fn is_sink(&self) -> bool {
        self.x1_sink || self.x2_sink
    }

    pub fn union(self, other: Roles) -> Roles {
        Roles {
            x1_source: self.x1_source || other.x1_source,
            x2_source: self.x2_source || other.x2_source,
            x1_sink: self.x1_sink || other.x1_sink,
            x2_sink: self.x2_sink || other.x2_sink,
        }
    }

    /// Required kernel session for a source or sink region; `None` for
    /// unconstrained regions. Panics never; conflicting roles yield X1.
    pub fn demanded(&self) -> Option<Session> {
        Session::BOTH.into_iter().find(|&s| self.has(s))
    }
}

/// A partition of the link set into regions, ordered by head id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionDecomposition {
    regions: Vec<Region>,
    owner: Vec<u32>,
}

impl RegionDecomposition {
    /// Builds a decomposition from arbitrary link groups, checking that they
    /// partition the link set and that each group is a region.
    pub fn from_groups(network: &Network, groups: Vec<Vec<LinkId>>) -> Result<RegionDecomposition> {
        let mut regions = Vec::with_capacity(groups.len());
        for g in groups {
            if g.is_empty() {
                return Err(Error::NotAPartition("empty region".into()));
            }
            regions.push(Region::from_links(g));
        }
        let decomposition = Self::from_regions_unchecked(network.num_links(), regions)?;
        for r in &decomposition.regions {
            if !is_region(network, r) {
                return Err(Error::InvalidRegion(r.head));
            }
        }
        Ok(decomposition)
    }

    fn from_regions_unchecked(num_links: usize, mut regions: Vec<Region>) -> Result<RegionDecomposition> {
        regions.sort_unstable_by_key(|r| r.head);
        let mut owner = vec![u32::MAX; num_links];
        for (i, r) in regions.iter().enumerate() {
            for &l in &r.links {
                let slot = owner
                    .get_mut(l.slot())
                    .ok_or_else(|| Error::NotAPartition(format!("{l} is not a link of the network")))?;
                if *slot != u32::MAX {
                    return Err(Error::NotAPartition(format!("{l} appears in two regions")));
                }
                *slot = i as u32;
            }
        }
        if let Some(missing) = owner.iter().position(|&o| o == u32::MAX) {
            return Err(Error::NotAPartition(format!(
                "{} is not covered",
                LinkId::from_slot(missing)
            )));
        }
        Ok(RegionDecomposition { regions, owner })
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn region(&self, index: usize) -> &Region {
        &self.regions[index]
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    /// Index of the region containing `link`.
    pub fn owner(&self, link: LinkId) -> usize {
        self.owner[link.slot()] as usize
    }

    pub fn source_region(&self, session: Session) -> usize {
        self.owner(Network::source_link(session))
    }

    /// Index of the region whose head is `head`.
    pub fn by_head(&self, head: LinkId) -> Option<usize> {
        self.regions.binary_search_by_key(&head, |r| r.head).ok()
    }

    pub fn roles(&self, network: &Network, index: usize) -> Roles {
        region_roles(network, &self.regions[index])
    }

    /// One line per region: `head: sorted link ids`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for r in &self.regions {
            out.push_str(&r.head.get().to_string());
            out.push(':');
            for l in &r.links {
                out.push(' ');
                out.push_str(&l.get().to_string());
            }
            out.push('\n');
        }
        out
    }

    /// The partition as sorted link-id groups; handy for comparisons.
    pub fn partition(&self) -> Vec<Vec<usize>> {
        self.regions
            .iter()
            .map(|r| r.links.iter().map(|l| l.get()).collect())
            .collect()
    }

    /// Merges each region into `root[region]` (which must not be larger than
    /// the region's own index, and must be a fixed point for roots).
    pub(crate) fn quotient(&self, root: &[usize]) -> RegionDecomposition {
        let mut merged: Vec<Option<Region>> = self.regions.iter().cloned().map(Some).collect();
        for i in (0..self.regions.len()).rev() {
            let r = root[i];
            if r != i {
                let child = merged[i].take().expect("merged once");
                let parent = merged[r].take().expect("root present");
                merged[r] = Some(parent.merged(&child));
            }
        }
        let regions: Vec<Region> = merged.into_iter().flatten().collect();
        Self::from_regions_unchecked(self.owner.len(), regions).expect("quotient of a partition is a partition")
    }
}

fn region_roles(network: &Network, region: &Region) -> Roles {
    let mut roles = Roles::default();
    for &l in &region.links {
        match network.link(l).kind {
            LinkKind::Source(s) => roles.set_source(s),
            LinkKind::Sink(s) => roles.set_sink(s),
            LinkKind::Real => {}
        }
    }
    roles
}

fn is_region(network: &Network, region: &Region) -> bool {
    region
        .links
        .iter()
        .skip(1)
        .all(|&l| network.in_links(l).iter().any(|&p| region.contains(p)))
}

/// A directed acyclic graph on regions with parents preceding children.
///
/// Built from a decomposition it is `RG(D)`; after edge deletions during
/// minimization it is a subgraph of one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionGraph {
    parents: Adjacency,
    children: Adjacency,
    roles: Vec<Roles>,
}

/// Sorted adjacency lists packed into one buffer; list `i` is
/// `items[start[i]..start[i + 1]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Adjacency {
    start: Vec<usize>,
    items: Vec<usize>,
}

impl Adjacency {
    fn with_capacity(lists: usize, items: usize) -> Adjacency {
        let mut start = Vec::with_capacity(lists + 1);
        start.push(0);
        Adjacency {
            start,
            items: Vec::with_capacity(items),
        }
    }

    /// Appends the next list; `buf` is sorted, deduplicated and cleared.
    fn push_sorted(&mut self, buf: &mut Vec<usize>) {
        buf.sort_unstable();
        buf.dedup();
        self.items.extend_from_slice(buf);
        self.start.push(self.items.len());
        buf.clear();
    }

    fn len(&self) -> usize {
        self.start.len() - 1
    }

    fn get(&self, i: usize) -> &[usize] {
        &self.items[self.start[i]..self.start[i + 1]]
    }

    fn lists(&self) -> impl Iterator<Item = &[usize]> + '_ {
        self.start.windows(2).map(|w| &self.items[w[0]..w[1]])
    }

    /// Reverses every edge by counting sort, so the lists come out sorted.
    fn transpose(&self) -> Adjacency {
        let n = self.len();
        let mut start = vec![0usize; n + 1];
        for &x in &self.items {
            start[x + 1] += 1;
        }
        for i in 0..n {
            start[i + 1] += start[i];
        }
        let mut fill = start.clone();
        let mut items = vec![0usize; self.items.len()];
        for (i, list) in self.lists().enumerate() {
            for &x in list {
                items[fill[x]] = i;
                fill[x] += 1;
            }
        }
        Adjacency { start, items }
    }
}

impl RegionGraph {
    /// Builds a graph from parent lists. Every parent index must be smaller
    /// than its child's index.
    pub fn from_parents(parents: Vec<Vec<usize>>, roles: Vec<Roles>) -> Result<RegionGraph> {
        if parents.len() != roles.len() {
            return Err(Error::InvalidSpec("parents and roles differ in length".into()));
        }
        let mut adj = Adjacency::with_capacity(parents.len(), parents.iter().map(Vec::len).sum());
        for (i, mut ps) in parents.into_iter().enumerate() {
            if ps.iter().any(|&p| p >= i) {
                return Err(Error::InvalidSpec(format!(
                    "vertex {i} has a parent that does not precede it"
                )));
            }
            adj.push_sorted(&mut ps);
        }
        Ok(Self::assemble(adj, roles))
    }

    fn assemble(parents: Adjacency, roles: Vec<Roles>) -> RegionGraph {
        let children = parents.transpose();
        RegionGraph {
            parents,
            children,
            roles,
        }
    }

    pub fn len(&self) -> usize {
        self.parents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parents.len() == 0
    }

    pub fn parents(&self, region: usize) -> &[usize] {
        self.parents.get(region)
    }

    pub fn children(&self, region: usize) -> &[usize] {
        self.children.get(region)
    }

    pub fn roles(&self, region: usize) -> Roles {
        self.roles[region]
    }

    pub fn roles_vec(&self) -> Vec<Roles> {
        self.roles.clone()
    }

    pub fn is_parent(&self, parent: usize, child: usize) -> bool {
        self.parents(child).binary_search(&parent).is_ok()
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.is_parent(a, b) || self.is_parent(b, a)
    }

    pub fn share_child(&self, a: usize, b: usize) -> bool {
        self.children(a).iter().any(|c| self.is_parent(b, *c))
    }

    pub fn edge_count(&self) -> usize {
        self.parents.items.len()
    }

    /// Edges `(parent, child)` ordered by child, then parent.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parents
            .lists()
            .enumerate()
            .flat_map(|(c, ps)| ps.iter().map(move |&p| (p, c)))
    }

    pub fn is_source(&self, region: usize) -> bool {
        self.roles[region].is_source()
    }

    /// Acyclicity check by Kahn's algorithm (independent of the index order).
    pub fn is_acyclic(&self) -> bool {
        let mut indegree: Vec<usize> = self.parents.lists().map(<[usize]>::len).collect();
        let mut stack: Vec<usize> = (0..self.len()).filter(|&v| indegree[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = stack.pop() {
            seen += 1;
            for &c in self.children(v) {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    stack.push(c);
                }
            }
        }
        seen == self.len()
    }

    /// Contracts along the mapping `root` (see [`RegionDecomposition::quotient`]).
    ///
    /// A merged region keeps the parents of its root only: the head of the
    /// union is the root's head, so absorbed heads stop contributing edges.
    pub(crate) fn quotient(&self, root: &[usize]) -> RegionGraph {
        let mut new_index = vec![usize::MAX; self.len()];
        let mut next = 0;
        for i in 0..self.len() {
            if root[i] == i {
                new_index[i] = next;
                next += 1;
            }
        }
        let mut roles = vec![Roles::default(); next];
        for i in 0..self.len() {
            let target = new_index[root[i]];
            roles[target] = roles[target].union(self.roles[i]);
        }
        // roots are visited in increasing order, matching their new indices
        let mut parents = Adjacency::with_capacity(next, self.edge_count());
        let mut buf = Vec::new();
        for i in (0..self.len()).filter(|&i| root[i] == i) {
            buf.extend(self.parents(i).iter().map(|&p| new_index[root[p]]));
            parents.push_sorted(&mut buf);
        }
        Self::assemble(parents, roles)
    }

    /// Contracts a child into one of its parents.
    pub fn combine(&self, parent: usize, child: usize) -> Result<RegionGraph> {
        if !self.is_parent(parent, child) {
            return Err(Error::NotAdjacent { parent, child });
        }
        let mut root: Vec<usize> = (0..self.len()).collect();
        root[child] = parent;
        Ok(self.quotient(&root))
    }

    /// Removes the edge `(parent, child)`.
    pub fn delete_edge(&self, parent: usize, child: usize) -> Result<RegionGraph> {
        if !self.is_parent(parent, child) {
            return Err(Error::NotAdjacent { parent, child });
        }
        let mut parents = Adjacency::with_capacity(self.len(), self.edge_count());
        let mut buf = Vec::new();
        for (c, ps) in self.parents.lists().enumerate() {
            buf.extend(ps.iter().copied().filter(|&p| c != child || p != parent));
            parents.push_sorted(&mut buf);
        }
        Ok(Self::assemble(parents, self.roles.clone()))
    }

    /// For each region, the region it ends up in after repeatedly merging
    /// non-source regions that have exactly one parent into that parent.
    pub(crate) fn unique_parent_roots(&self) -> Vec<usize> {
        let mut root: Vec<usize> = (0..self.len()).collect();
        for i in 0..self.len() {
            if self.roles[i].is_source() {
                continue;
            }
            // Parents precede `i`, so their roots are final.
            let mut first = None;
            let mut unique = true;
            for &p in self.parents(i) {
                let r = root[p];
                match first {
                    None => first = Some(r),
                    Some(f) if f != r => {
                        unique = false;
                        break;
                    }
                    Some(_) => {}
                }
            }
            if let (Some(r), true) = (first, unique) {
                root[i] = r;
            }
        }
        root
    }

    /// True iff some non-source region has exactly one parent.
    pub fn has_unique_parent_region(&self) -> bool {
        (0..self.len()).any(|i| !self.roles[i].is_source() && self.parents(i).len() == 1)
    }

    /// The graph after unique-parent normalization.
    pub fn normalized(&self) -> RegionGraph {
        if !self.has_unique_parent_region() {
            return self.clone();
        }
        self.quotient(&self.unique_parent_roots())
    }
}

/// `RG(D)`: `(P, Q)` is an edge iff `head(Q)` has an incoming link in `P`.
pub fn region_graph(network: &Network, decomposition: &RegionDecomposition) -> RegionGraph {
    let mut parents = Adjacency::with_capacity(decomposition.len(), decomposition.len() * 2);
    let mut roles = Vec::with_capacity(decomposition.len());
    let mut buf = Vec::new();
    for r in decomposition.regions() {
        buf.extend(network.in_links(r.head).iter().map(|&l| decomposition.owner(l)));
        parents.push_sorted(&mut buf);
        roles.push(region_roles(network, r));
    }
    RegionGraph::assemble(parents, roles)
}

/// One singleton region per link.
pub fn trivial_decomposition(network: &Network) -> RegionDecomposition {
    let regions = network
        .link_ids()
        .map(|l| Region {
            head: l,
            links: vec![l],
        })
        .collect();
    RegionDecomposition {
        regions,
        owner: (0..network.num_links() as u32).collect(),
    }
}

/// The line graph `L(G)`, i.e. the region graph of the trivial decomposition.
pub fn line_graph(network: &Network) -> RegionGraph {
    region_graph(network, &trivial_decomposition(network))
}

/// Contracts `child` into `parent`, which must be a parent of `child` in `RG(D)`.
pub fn contract(
    network: &Network,
    decomposition: &RegionDecomposition,
    parent: usize,
    child: usize,
) -> Result<RegionDecomposition> {
    let is_parent = parent < decomposition.len()
        && child < decomposition.len()
        && network
            .in_links(decomposition.region(child).head)
            .iter()
            .any(|&l| decomposition.owner(l) == parent);
    if !is_parent {
        return Err(Error::NotAdjacent { parent, child });
    }
    let mut root: Vec<usize> = (0..decomposition.len()).collect();
    root[child] = parent;
    Ok(decomposition.quotient(&root))
}

/// Result of the basic decomposition scan together with its work counter.
#[derive(Clone, Debug)]
pub struct BasicDecomposition {
    pub decomposition: RegionDecomposition,
    /// Number of region-membership checks performed.
    pub membership_checks: usize,
}

/// The unique basic region decomposition, scanning links in canonical order.
pub fn basic_decomposition(network: &Network) -> RegionDecomposition {
    let order: Vec<LinkId> = network.link_ids().collect();
    scan_basic(network, &order).decomposition
}

/// Basic decomposition using a caller-supplied topological order.
pub fn basic_decomposition_in_order(network: &Network, order: &[LinkId]) -> Result<BasicDecomposition> {
    crate::network::check_link_order(network, order)?;
    Ok(scan_basic(network, order))
}

/// Links join the region holding all of their incoming links, or start a new
/// region when the incoming links span more than one region.
fn scan_basic(network: &Network, order: &[LinkId]) -> BasicDecomposition {
    const NONE: u32 = u32::MAX;
    let mut owner = vec![NONE; network.num_links()];
    let mut groups: Vec<Vec<LinkId>> = Vec::new();
    let mut checks = 0usize;
    for &e in order {
        let ins = network.in_links(e);
        let mut target = NONE;
        if let Some((&first, rest)) = ins.split_first() {
            checks += 1;
            target = owner[first.slot()];
            for &p in rest {
                checks += 1;
                if owner[p.slot()] != target {
                    target = NONE;
                    break;
                }
            }
        }
        if target == NONE {
            target = groups.len() as u32;
            groups.push(Vec::new());
        }
        owner[e.slot()] = target;
        groups[target as usize].push(e);
    }
    let regions = groups.into_iter().map(Region::from_links).collect();
    let decomposition = RegionDecomposition::from_regions_unchecked(network.num_links(), regions)
        .expect("scan assigns every link exactly once");
    BasicDecomposition {
        decomposition,
        membership_checks: checks,
    }
}

/// Checks both basic-decomposition conditions: every non-head member has all
/// incoming links inside its region, and every non-source region has at
/// least two parents.
pub fn validate_basic(network: &Network, decomposition: &RegionDecomposition) -> Result<bool> {
    // re-validate the partition
    let groups: Vec<Vec<LinkId>> = decomposition.regions().iter().map(|r| r.links.clone()).collect();
    RegionDecomposition::from_regions_unchecked(
        network.num_links(),
        groups.into_iter().map(Region::from_links).collect(),
    )?;
    for r in decomposition.regions() {
        for &e in &r.links[1..] {
            let ins = network.in_links(e);
            if ins.is_empty() || ins.iter().any(|&p| !r.contains(p)) {
                return Ok(false);
            }
        }
    }
    let graph = region_graph(network, decomposition);
    Ok((0..graph.len()).all(|i| graph.is_source(i) || graph.parents(i).len() >= 2))
}

/// A decomposition paired with a region graph over its regions (equal to
/// `RG(D)` or an edge-pruned subgraph of it). Both are kept index-aligned.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionState {
    pub decomposition: RegionDecomposition,
    pub graph: RegionGraph,
}

impl RegionState {
    pub fn new(network: &Network, decomposition: RegionDecomposition) -> RegionState {
        let graph = region_graph(network, &decomposition);
        RegionState { decomposition, graph }
    }

    pub fn basic(network: &Network) -> RegionState {
        Self::new(network, basic_decomposition(network))
    }

    pub fn len(&self) -> usize {
        self.graph.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graph.is_empty()
    }

    fn quotient(&self, root: &[usize]) -> RegionState {
        RegionState {
            decomposition: self.decomposition.quotient(root),
            graph: self.graph.quotient(root),
        }
    }

    pub fn combine(&self, parent: usize, child: usize) -> Result<RegionState> {
        if !self.graph.is_parent(parent, child) {
            return Err(Error::NotAdjacent { parent, child });
        }
        let mut root: Vec<usize> = (0..self.len()).collect();
        root[child] = parent;
        Ok(self.quotient(&root))
    }

    pub fn delete_edge(&self, parent: usize, child: usize) -> Result<RegionState> {
        Ok(RegionState {
            decomposition: self.decomposition.clone(),
            graph: self.graph.delete_edge(parent, child)?,
        })
    }

    /// Repeatedly merges unique-parent non-source regions into their parent.
    pub fn normalized(&self) -> RegionState {
        if !self.graph.has_unique_parent_region() {
            return self.clone();
        }
        self.quotient(&self.graph.unique_parent_roots())
    }

    /// Region heads, in region order.
    pub fn heads(&self) -> Vec<LinkId> {
        self.decomposition.regions().iter().map(Region::head).collect()
    }
}

/// Sorted set of edges as head-id pairs; independent of region indexing.
pub fn edge_set_by_head(state: &RegionState) -> BTreeSet<(usize, usize)> {
    let heads = state.heads();
    state
        .graph
        .edges()
        .map(|(p, c)| (heads[p].get(), heads[c].get()))
        .collect()
}
