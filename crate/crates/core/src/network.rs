//! Network instances: loading, validation, canonical link indexing and sink
//! normalization.
//!
//! Every network carries two imaginary source links (ids 1 and 2, entering
//! the two source nodes) and one imaginary sink link per declared sink
//! (leaving the sink node). Link ids are assigned in a canonical topological
//! order: whenever `e` is an incoming link of `f`, `e < f`.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// 1-based position of a link in the canonical order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LinkId(u32);

impl LinkId {
    /// The X1 source link.
    pub const SOURCE1: LinkId = LinkId(1);
    /// The X2 source link.
    pub const SOURCE2: LinkId = LinkId(2);

    /// Panics if `index` is zero.
    pub fn new(index: usize) -> Self {
        assert!(index > 0, "link ids are 1-based");
        LinkId(index as u32)
    }

    pub fn get(self) -> usize {
        self.0 as usize
    }

    /// 0-based slot, for indexing per-link vectors.
    pub fn slot(self) -> usize {
        self.0 as usize - 1
    }

    pub fn from_slot(slot: usize) -> Self {
        LinkId(slot as u32 + 1)
    }
}

impl fmt::Display for LinkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// One of the two multicast sessions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Session {
    X1,
    X2,
}

impl Session {
    pub const BOTH: [Session; 2] = [Session::X1, Session::X2];

    pub fn index(self) -> usize {
        match self {
            Session::X1 => 0,
            Session::X2 => 1,
        }
    }

    pub fn other(self) -> Session {
        match self {
            Session::X1 => Session::X2,
            Session::X2 => Session::X1,
        }
    }

    pub fn number(self) -> u8 {
        self.index() as u8 + 1
    }
}

impl fmt::Display for Session {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X{}", self.number())
    }
}

pub type NodeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LinkKind {
    Source(Session),
    Sink(Session),
    Real,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Link {
    /// `None` for source links.
    pub tail: Option<NodeId>,
    /// `None` for sink links.
    pub head: Option<NodeId>,
    pub kind: LinkKind,
}

impl Link {
    /// The session this link is an `X_i` link of, if it is a source or sink link.
    pub fn session(&self) -> Option<Session> {
        match self.kind {
            LinkKind::Source(s) | LinkKind::Sink(s) => Some(s),
            LinkKind::Real => None,
        }
    }

    pub fn is_source(&self) -> bool {
        matches!(self.kind, LinkKind::Source(_))
    }

    pub fn is_sink(&self) -> bool {
        matches!(self.kind, LinkKind::Sink(_))
    }
}

/// JSON instance document. Fields are declared in lexicographic order so
/// that serialization is canonical.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    #[serde(default)]
    pub links: Vec<LinkDoc>,
    #[serde(default)]
    pub nodes: Vec<String>,
    #[serde(default)]
    pub sinks1: Vec<String>,
    #[serde(default)]
    pub sinks2: Vec<String>,
    #[serde(default)]
    pub source1: String,
    #[serde(default)]
    pub source2: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkDoc {
    pub head: String,
    pub tail: String,
}

impl LinkDoc {
    pub fn new(tail: impl Into<String>, head: impl Into<String>) -> Self {
        LinkDoc {
            head: head.into(),
            tail: tail.into(),
        }
    }
}

impl InstanceDoc {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::MalformedInput(e.to_string()))
    }

    pub fn to_canonical_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("instance serializes");
        out.push('\n');
        out
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct NetworkConfig {
    /// Upper bound on `|In(e)|`. `None` places no restriction.
    pub max_fan_in: Option<usize>,
}

/// A validated two-session network with canonically indexed links.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Network {
    nodes: Vec<String>,
    links: Vec<Link>,
    /// Links whose head is the node, ascending.
    node_in: Vec<Vec<LinkId>>,
    /// Links whose tail is the node, ascending.
    node_out: Vec<Vec<LinkId>>,
    sources: [NodeId; 2],
    sinks: [Vec<NodeId>; 2],
    config: NetworkConfig,
}

/// Parses and validates an instance document.
pub fn load_network(document: &str) -> Result<Network> {
    Network::from_doc(&InstanceDoc::from_json(document)?, NetworkConfig::default())
}

impl Network {
    pub fn from_doc(doc: &InstanceDoc, config: NetworkConfig) -> Result<Network> {
        let mut index: HashMap<&str, NodeId> = HashMap::with_capacity(doc.nodes.len());
        for (i, name) in doc.nodes.iter().enumerate() {
            if index.insert(name.as_str(), i).is_some() {
                return Err(Error::MalformedInput(format!("duplicate node {name:?}")));
            }
        }
        let lookup_source = |name: &str, which: u8| -> Result<NodeId> {
            if name.is_empty() {
                return Err(Error::MissingSource(format!("source{which} not declared")));
            }
            index
                .get(name)
                .copied()
                .ok_or_else(|| Error::MissingSource(format!("source{which} {name:?} is not a node")))
        };
        let s1 = lookup_source(&doc.source1, 1)?;
        let s2 = lookup_source(&doc.source2, 2)?;
        if doc.sinks1.is_empty() {
            return Err(Error::NoSinks(1));
        }
        if doc.sinks2.is_empty() {
            return Err(Error::NoSinks(2));
        }
        let node = |name: &str| -> Result<NodeId> {
            index
                .get(name)
                .copied()
                .ok_or_else(|| Error::MalformedInput(format!("unknown node {name:?}")))
        };

        // Declaration order: sources, real links, sinks1, sinks2.
        let mut declared = Vec::with_capacity(doc.links.len() + doc.sinks1.len() + doc.sinks2.len() + 2);
        declared.push(Link {
            tail: None,
            head: Some(s1),
            kind: LinkKind::Source(Session::X1),
        });
        declared.push(Link {
            tail: None,
            head: Some(s2),
            kind: LinkKind::Source(Session::X2),
        });
        for l in &doc.links {
            declared.push(Link {
                tail: Some(node(&l.tail)?),
                head: Some(node(&l.head)?),
                kind: LinkKind::Real,
            });
        }
        let mut sinks = [Vec::new(), Vec::new()];
        for (session, names) in [(Session::X1, &doc.sinks1), (Session::X2, &doc.sinks2)] {
            for name in names {
                let t = node(name)?;
                sinks[session.index()].push(t);
                declared.push(Link {
                    tail: Some(t),
                    head: None,
                    kind: LinkKind::Sink(session),
                });
            }
        }

        let n = doc.nodes.len();
        let mut node_in = vec![Vec::new(); n];
        let mut node_out = vec![Vec::new(); n];
        for (slot, l) in declared.iter().enumerate() {
            if let Some(h) = l.head {
                node_in[h].push(slot);
            }
            if let Some(t) = l.tail {
                node_out[t].push(slot);
            }
        }
        for l in &declared {
            if let Some(t) = l.tail {
                let fan_in = node_in[t].len();
                if fan_in == 0 {
                    return Err(Error::DanglingLink(describe(&doc.nodes, l)));
                }
                if let Some(bound) = config.max_fan_in {
                    if fan_in > bound {
                        return Err(Error::FanInExceeded {
                            link: describe(&doc.nodes, l),
                            fan_in,
                            bound,
                        });
                    }
                }
            }
        }

        let order = kahn_order(
            declared.len(),
            |slot| declared[slot].tail.map_or(0, |t| node_in[t].len()),
            |slot| declared[slot].head.map(|h| node_out[h].as_slice()).unwrap_or(&[]),
        )?;
        let mut new_id = vec![0usize; declared.len()];
        for (pos, &slot) in order.iter().enumerate() {
            new_id[slot] = pos;
        }
        let links: Vec<Link> = order.iter().map(|&slot| declared[slot]).collect();
        let remap = |v: Vec<Vec<usize>>| -> Vec<Vec<LinkId>> {
            v.into_iter()
                .map(|slots| {
                    let mut ids: Vec<LinkId> = slots.into_iter().map(|s| LinkId::from_slot(new_id[s])).collect();
                    ids.sort_unstable();
                    ids
                })
                .collect()
        };
        Ok(Network {
            nodes: doc.nodes.clone(),
            links,
            node_in: remap(node_in),
            node_out: remap(node_out),
            sources: [s1, s2],
            sinks,
            config,
        })
    }

    /// Reconstructs an instance document with real links in canonical order.
    pub fn to_doc(&self) -> InstanceDoc {
        let name = |n: NodeId| self.nodes[n].clone();
        InstanceDoc {
            links: self
                .links
                .iter()
                .filter(|l| l.kind == LinkKind::Real)
                .map(|l| LinkDoc::new(name(l.tail.unwrap()), name(l.head.unwrap())))
                .collect(),
            nodes: self.nodes.clone(),
            sinks1: self.sinks[0].iter().map(|&t| name(t)).collect(),
            sinks2: self.sinks[1].iter().map(|&t| name(t)).collect(),
            source1: name(self.sources[0]),
            source2: name(self.sources[1]),
        }
    }

    pub fn to_canonical_json(&self) -> String {
        self.to_doc().to_canonical_json()
    }

    pub fn config(&self) -> NetworkConfig {
        self.config
    }

    pub fn num_links(&self) -> usize {
        self.links.len()
    }

    pub fn num_real_links(&self) -> usize {
        self.links.iter().filter(|l| l.kind == LinkKind::Real).count()
    }

    /// Number of sinks `N`, equal to the number of sink links.
    pub fn num_sinks(&self) -> usize {
        self.sinks[0].len() + self.sinks[1].len()
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_name(&self, node: NodeId) -> &str {
        &self.nodes[node]
    }

    pub fn source_node(&self, session: Session) -> NodeId {
        self.sources[session.index()]
    }

    pub fn sink_nodes(&self, session: Session) -> &[NodeId] {
        &self.sinks[session.index()]
    }

    pub fn link(&self, id: LinkId) -> &Link {
        &self.links[id.slot()]
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn link_ids(&self) -> impl Iterator<Item = LinkId> + '_ {
        (0..self.links.len()).map(LinkId::from_slot)
    }

    pub fn source_link(session: Session) -> LinkId {
        match session {
            Session::X1 => LinkId::SOURCE1,
            Session::X2 => LinkId::SOURCE2,
        }
    }

    /// `In(e)`: the links whose head is the tail of `e`, ascending.
    pub fn in_links(&self, id: LinkId) -> &[LinkId] {
        match self.link(id).tail {
            Some(t) => &self.node_in[t],
            None => &[],
        }
    }

    /// Links having `id` as an incoming link, ascending.
    pub fn out_links(&self, id: LinkId) -> &[LinkId] {
        match self.link(id).head {
            Some(h) => &self.node_out[h],
            None => &[],
        }
    }

    pub fn sink_links(&self) -> impl Iterator<Item = LinkId> + '_ {
        self.link_ids().filter(|&id| self.link(id).is_sink())
    }

    /// Short human-readable description, e.g. `a->b` or `sink(X1)@t`.
    pub fn describe_link(&self, id: LinkId) -> String {
        describe(&self.nodes, self.link(id))
    }
}

fn describe(nodes: &[String], l: &Link) -> String {
    match l.kind {
        LinkKind::Source(s) => format!("source({s})@{}", nodes[l.head.unwrap()]),
        LinkKind::Sink(s) => format!("sink({s})@{}", nodes[l.tail.unwrap()]),
        LinkKind::Real => format!("{}->{}", nodes[l.tail.unwrap()], nodes[l.head.unwrap()]),
    }
}

/// Kahn's algorithm picking the smallest available slot first.
fn kahn_order<'a, D, S>(count: usize, in_degree: D, successors: S) -> Result<Vec<usize>>
where
    D: Fn(usize) -> usize,
    S: Fn(usize) -> &'a [usize],
{
    let mut remaining: Vec<usize> = (0..count).map(&in_degree).collect();
    let mut ready: BinaryHeap<Reverse<usize>> = (0..count).filter(|&s| remaining[s] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(count);
    while let Some(Reverse(slot)) = ready.pop() {
        order.push(slot);
        for &next in successors(slot) {
            remaining[next] -= 1;
            if remaining[next] == 0 {
                ready.push(Reverse(next));
            }
        }
    }
    if order.len() != count {
        return Err(Error::CycleDetected);
    }
    Ok(order)
}

/// Canonical link order: sources first, then every link after all of its
/// incoming links, ties broken by current id. For a loaded network this is
/// the identity.
pub fn index_links(network: &Network) -> Result<Vec<LinkId>> {
    let slots = network
        .node_out
        .iter()
        .map(|v| v.iter().map(|l| l.slot()).collect::<Vec<_>>())
        .collect::<Vec<_>>();
    let order = kahn_order(
        network.num_links(),
        |slot| network.in_links(LinkId::from_slot(slot)).len(),
        |slot| match network.links[slot].head {
            Some(h) => slots[h].as_slice(),
            None => &[],
        },
    )?;
    Ok(order.into_iter().map(LinkId::from_slot).collect())
}

/// Checks that `order` is a permutation of all links that starts with the
/// two source links and places every link after its incoming links.
pub fn check_link_order(network: &Network, order: &[LinkId]) -> Result<()> {
    if order.len() != network.num_links() {
        return Err(Error::InvalidOrder(format!(
            "expected {} links, got {}",
            network.num_links(),
            order.len()
        )));
    }
    if order.len() < 2 || order[0] != LinkId::SOURCE1 || order[1] != LinkId::SOURCE2 {
        return Err(Error::InvalidOrder("order must start with the two source links".into()));
    }
    let mut position = vec![usize::MAX; network.num_links()];
    for (pos, id) in order.iter().enumerate() {
        if id.slot() >= position.len() || position[id.slot()] != usize::MAX {
            return Err(Error::InvalidOrder(format!("{id} is repeated or out of range")));
        }
        position[id.slot()] = pos;
    }
    for &id in order {
        for &p in network.in_links(id) {
            if position[p.slot()] > position[id.slot()] {
                return Err(Error::InvalidOrder(format!("{p} must precede {id}")));
            }
        }
    }
    Ok(())
}

/// Splits every node demanded by both sessions into two private sink nodes.
///
/// A node `t` in `T1 ∩ T2` gains links `t -> t'` and `t -> t''`; `t'` replaces
/// `t` in `T1` and `t''` replaces it in `T2`.
pub fn normalize_sinks(network: &Network) -> Network {
    let shared: BTreeSet<NodeId> = network.sinks[0]
        .iter()
        .copied()
        .filter(|t| network.sinks[1].contains(t))
        .collect();
    if shared.is_empty() {
        return network.clone();
    }
    let mut doc = network.to_doc();
    let mut taken: BTreeSet<String> = doc.nodes.iter().cloned().collect();
    let mut fresh = |base: &str| {
        let mut name = base.to_string();
        while taken.contains(&name) {
            name.push('#');
        }
        taken.insert(name.clone());
        name
    };
    let mut replacement: HashMap<String, (String, String)> = HashMap::new();
    for &t in &shared {
        let name = network.nodes[t].clone();
        let first = fresh(&format!("{name}'"));
        let second = fresh(&format!("{name}''"));
        doc.nodes.push(first.clone());
        doc.nodes.push(second.clone());
        doc.links.push(LinkDoc::new(name.clone(), first.clone()));
        doc.links.push(LinkDoc::new(name.clone(), second.clone()));
        replacement.insert(name, (first, second));
    }
    for s in doc.sinks1.iter_mut() {
        if let Some((first, _)) = replacement.get(s) {
            *s = first.clone();
        }
    }
    for s in doc.sinks2.iter_mut() {
        if let Some((_, second)) = replacement.get(s) {
            *s = second.clone();
        }
    }
    Network::from_doc(&doc, network.config).expect("splitting sinks keeps the network valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn butterfly_has_eleven_links() {
        let net = fixtures::butterfly();
        assert_eq!(net.num_links(), 11);
        assert_eq!(net.num_real_links(), 7);
        assert_eq!(net.num_sinks(), 2);
        // declaration order is already topological
        let order: Vec<usize> = index_links(&net).unwrap().iter().map(|l| l.get()).collect();
        assert_eq!(order, (1..=11).collect::<Vec<_>>());
        assert_eq!(net.describe_link(LinkId::new(10)), "sink(X1)@t2");
        assert_eq!(net.describe_link(LinkId::new(11)), "sink(X2)@t1");
        assert_eq!(net.in_links(LinkId::new(7)), &[LinkId::new(3), LinkId::new(5)]);
    }

    #[test]
    fn empty_document_is_missing_source() {
        let err = load_network(r#"{"nodes": [], "links": []}"#).unwrap_err();
        assert!(matches!(err, Error::MissingSource(_)), "{err:?}");
        let err =
            load_network(r#"{"nodes": ["s1", "s2"], "links": [], "source1": "s1", "source2": "s2"}"#).unwrap_err();
        assert_eq!(err, Error::NoSinks(1));
    }

    #[test]
    fn two_cycle_is_rejected() {
        let doc = r#"{"nodes": ["s1", "s2", "a", "b"],
            "links": [{"tail": "s1", "head": "a"}, {"tail": "a", "head": "b"}, {"tail": "b", "head": "a"}],
            "source1": "s1", "source2": "s2", "sinks1": ["b"], "sinks2": ["a"]}"#;
        assert_eq!(load_network(doc).unwrap_err(), Error::CycleDetected);
    }

    #[test]
    fn dangling_and_malformed() {
        let doc = r#"{"nodes": ["s1", "s2", "x", "t"],
            "links": [{"tail": "x", "head": "t"}, {"tail": "s1", "head": "t"}],
            "source1": "s1", "source2": "s2", "sinks1": ["t"], "sinks2": ["t"]}"#;
        assert!(matches!(load_network(doc), Err(Error::DanglingLink(_))));
        assert!(matches!(load_network("{"), Err(Error::MalformedInput(_))));
        let doc = r#"{"nodes": ["s1", "s2"], "links": [{"tail": "s1", "head": "zz"}],
            "source1": "s1", "source2": "s2", "sinks1": ["s2"], "sinks2": ["s1"]}"#;
        assert!(matches!(load_network(doc), Err(Error::MalformedInput(_))));
    }

    #[test]
    fn fan_in_bound_is_enforced() {
        let doc = fixtures::butterfly().to_doc();
        let config = NetworkConfig { max_fan_in: Some(1) };
        assert!(matches!(
            Network::from_doc(&doc, config),
            Err(Error::FanInExceeded {
                fan_in: 2,
                bound: 1,
                ..
            })
        ));
        assert!(Network::from_doc(&doc, NetworkConfig { max_fan_in: Some(2) }).is_ok());
    }

    #[test]
    fn out_of_order_declaration_is_reindexed() {
        let doc = r#"{"nodes": ["s1", "s2", "a", "t", "u"],
            "links": [{"tail": "a", "head": "t"}, {"tail": "s1", "head": "a"}, {"tail": "s2", "head": "u"}],
            "source1": "s1", "source2": "s2", "sinks1": ["t"], "sinks2": ["u"]}"#;
        let net = load_network(doc).unwrap();
        for id in net.link_ids() {
            for &p in net.in_links(id) {
                assert!(p < id);
            }
        }
        assert_eq!(net.describe_link(LinkId::new(3)), "s1->a");
        // reindexing a loaded network is the identity
        let order = index_links(&net).unwrap();
        assert!(order.iter().enumerate().all(|(i, l)| l.get() == i + 1));
        let again = load_network(&net.to_canonical_json()).unwrap();
        assert_eq!(again, net);
    }

    #[test]
    fn two_chains_keep_path_order() {
        let net = fixtures::two_chains();
        let kinds: Vec<String> = net.link_ids().map(|l| net.describe_link(l)).collect();
        assert_eq!(
            kinds,
            [
                "source(X1)@s1",
                "source(X2)@s2",
                "s1->t",
                "s2->u",
                "sink(X1)@t",
                "sink(X2)@u"
            ]
        );
    }

    #[test]
    fn normalize_splits_shared_sink() {
        let doc = r#"{"nodes": ["s1", "s2", "v", "t"],
            "links": [{"tail": "s1", "head": "v"}, {"tail": "s2", "head": "v"}, {"tail": "v", "head": "t"},
                      {"tail": "s1", "head": "t"}, {"tail": "s2", "head": "t"}],
            "source1": "s1", "source2": "s2", "sinks1": ["t"], "sinks2": ["t"]}"#;
        let net = load_network(doc).unwrap();
        let norm = normalize_sinks(&net);
        assert_eq!(norm.nodes().len(), net.nodes().len() + 2);
        assert_eq!(norm.num_real_links(), net.num_real_links() + 2);
        assert_eq!(norm.node_name(norm.sink_nodes(Session::X1)[0]), "t'");
        assert_eq!(norm.node_name(norm.sink_nodes(Session::X2)[0]), "t''");
        assert_eq!(norm.num_sinks(), 2);
    }

    #[test]
    fn normalize_is_identity_on_disjoint_sinks() {
        let net = fixtures::butterfly();
        assert_eq!(normalize_sinks(&net), net);
    }

    #[test]
    fn both_demands_butterfly_normalizes_to_four_sinks() {
        let net = fixtures::both_demands_butterfly();
        let norm = normalize_sinks(&net);
        assert_eq!(norm.num_sinks(), 4);
        assert_eq!(norm.sink_links().count(), 4);
        assert_eq!(norm.num_real_links(), net.num_real_links() + 4);
        let t1: BTreeSet<_> = norm.sink_nodes(Session::X1).iter().collect();
        assert!(norm.sink_nodes(Session::X2).iter().all(|t| !t1.contains(t)));
    }

    #[test]
    fn check_link_order_rejects_bad_orders() {
        let net = fixtures::butterfly();
        let mut order: Vec<LinkId> = net.link_ids().collect();
        assert!(check_link_order(&net, &order).is_ok());
        order.swap(4, 6); // a->b before s2->a
        assert!(matches!(check_link_order(&net, &order), Err(Error::InvalidOrder(_))));
        let mut order: Vec<LinkId> = net.link_ids().collect();
        order.swap(0, 1);
        assert!(check_link_order(&net, &order).is_err());
    }
}
