//! Instance generators: seeded random networks, the two tight region-graph
//! families, and realization of a region graph as a concrete network.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{InstanceDoc, LinkDoc, LinkId, Network, NetworkConfig, Session};
use crate::region::{RegionGraph, Roles};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenParams {
    pub nodes: usize,
    pub links: usize,
    pub sinks1: usize,
    pub sinks2: usize,
    pub seed: u64,
}

/// A seeded layered DAG. Layer 0 holds the two sources; every other node
/// gets one in-link from an earlier layer, and the remaining links join
/// random earlier/later layer pairs. Sinks are distinct nodes from the
/// later half of the layering.
pub fn gen_random(params: &GenParams) -> Result<Network> {
    Network::from_doc(&gen_random_doc(params)?, NetworkConfig::default())
}

pub fn gen_random_doc(params: &GenParams) -> Result<InstanceDoc> {
    let &GenParams {
        nodes,
        links,
        sinks1,
        sinks2,
        seed,
    } = params;
    if nodes < 3 {
        return Err(Error::ParamsInfeasible(format!("need at least 3 nodes, got {nodes}")));
    }
    let inner = nodes - 2;
    // one in-link per non-source node plus a second source link
    if links <= inner {
        return Err(Error::ParamsInfeasible(format!(
            "{links} links cannot feed {inner} non-source nodes from both sources"
        )));
    }
    if sinks1 == 0 || sinks2 == 0 {
        return Err(Error::ParamsInfeasible("each session needs at least one sink".into()));
    }
    if sinks1.max(sinks2) > inner {
        return Err(Error::ParamsInfeasible(format!(
            "{} sinks requested but only {inner} non-source nodes",
            sinks1.max(sinks2)
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let max_layers = ((inner as f64).sqrt().ceil() as usize).max(1);
    let layer_count = rng.gen_range(1..=max_layers);
    // every layer gets one node, the rest are spread at random
    let mut sizes = vec![1usize; layer_count];
    for _ in layer_count..inner {
        sizes[rng.gen_range(0..layer_count)] += 1;
    }
    let names: Vec<String> = ["s1".to_string(), "s2".to_string()]
        .into_iter()
        .chain((0..inner).map(|i| format!("v{i}")))
        .collect();
    // layer of each node index; inner nodes are numbered layer by layer
    let mut layer = vec![0usize, 0];
    for (l, &size) in sizes.iter().enumerate() {
        layer.extend(std::iter::repeat_n(l + 1, size));
    }
    let first_of_layer: Vec<usize> = std::iter::once(0)
        .chain(sizes.iter().scan(2, |acc, &s| {
            let start = *acc;
            *acc += s;
            Some(start)
        }))
        .collect();

    let s2_target = 2 + 1.min(sizes[0] - 1);
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(links);
    edges.push((0, 2));
    edges.push((1, s2_target));
    for v in 3..nodes {
        if v != s2_target {
            edges.push((rng.gen_range(0..first_of_layer[layer[v]]), v));
        }
    }
    while edges.len() < links {
        let v = rng.gen_range(2..nodes);
        edges.push((rng.gen_range(0..first_of_layer[layer[v]]), v));
    }

    // sinks from the later half of the (layer-sorted) inner nodes
    let pick = |rng: &mut ChaCha8Rng, count: usize| -> Vec<String> {
        let mut pool: Vec<usize> = (nodes - count.max(inner.div_ceil(2))..nodes).collect();
        pool.shuffle(rng);
        let mut chosen: Vec<usize> = pool.into_iter().take(count).collect();
        chosen.sort_unstable();
        chosen.into_iter().map(|i| names[i].clone()).collect()
    };
    let sinks1 = pick(&mut rng, sinks1);
    let sinks2 = pick(&mut rng, sinks2);
    Ok(InstanceDoc {
        links: edges
            .iter()
            .map(|&(u, v)| LinkDoc::new(names[u].clone(), names[v].clone()))
            .collect(),
        nodes: names.clone(),
        sinks1,
        sinks2,
        source1: names[0].clone(),
        source2: names[1].clone(),
    })
}

/// A random topological order of the links that starts with both source
/// links, for exercising order independence.
pub fn random_topological_order(network: &Network, seed: u64) -> Vec<LinkId> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = network.num_links();
    let mut remaining: Vec<usize> = network.link_ids().map(|e| network.in_links(e).len()).collect();
    let mut order = vec![LinkId::SOURCE1, LinkId::SOURCE2];
    let mut ready: Vec<LinkId> = Vec::new();
    let release = |e: LinkId, remaining: &mut Vec<usize>, ready: &mut Vec<LinkId>| {
        for &o in network.out_links(e) {
            remaining[o.slot()] -= 1;
            if remaining[o.slot()] == 0 {
                ready.push(o);
            }
        }
    };
    release(LinkId::SOURCE1, &mut remaining, &mut ready);
    release(LinkId::SOURCE2, &mut remaining, &mut ready);
    while !ready.is_empty() {
        let i = rng.gen_range(0..ready.len());
        let e = ready.swap_remove(i);
        order.push(e);
        release(e, &mut remaining, &mut ready);
    }
    debug_assert_eq!(order.len(), n);
    order
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpecRole {
    X1Source,
    X2Source,
    X1Sink,
    X2Sink,
    Coding,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecVertex {
    pub name: String,
    pub parents: Vec<usize>,
    pub roles: Vec<SpecRole>,
}

/// An abstract region graph: vertex `i`'s parents all precede it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionGraphSpec {
    pub vertices: Vec<SpecVertex>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecDoc {
    region_spec: u32,
    vertices: Vec<SpecVertex>,
}

const SPEC_VERSION: u32 = 1;

fn roles_of(tags: &[SpecRole]) -> Roles {
    let mut r = Roles::default();
    for t in tags {
        match t {
            SpecRole::X1Source => r.set_source(Session::X1),
            SpecRole::X2Source => r.set_source(Session::X2),
            SpecRole::X1Sink => r.set_sink(Session::X1),
            SpecRole::X2Sink => r.set_sink(Session::X2),
            SpecRole::Coding => {}
        }
    }
    r
}

fn tags_of(roles: Roles) -> Vec<SpecRole> {
    let mut tags = Vec::new();
    if roles.x1_source {
        tags.push(SpecRole::X1Source);
    }
    if roles.x2_source {
        tags.push(SpecRole::X2Source);
    }
    if roles.x1_sink {
        tags.push(SpecRole::X1Sink);
    }
    if roles.x2_sink {
        tags.push(SpecRole::X2Sink);
    }
    if tags.is_empty() {
        tags.push(SpecRole::Coding);
    }
    tags
}

impl RegionGraphSpec {
    fn push(&mut self, name: impl Into<String>, parents: &[usize], roles: &[SpecRole]) -> usize {
        self.vertices.push(SpecVertex {
            name: name.into(),
            parents: parents.to_vec(),
            roles: roles.to_vec(),
        });
        self.vertices.len() - 1
    }

    fn with_sources() -> RegionGraphSpec {
        let mut spec = RegionGraphSpec { vertices: Vec::new() };
        spec.push("X1", &[], &[SpecRole::X1Source]);
        spec.push("X2", &[], &[SpecRole::X2Source]);
        spec
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn roles(&self, v: usize) -> Roles {
        roles_of(&self.vertices[v].roles)
    }

    pub fn sink_count(&self) -> usize {
        (0..self.len())
            .map(|v| {
                let r = self.roles(v);
                r.x1_sink as usize + r.x2_sink as usize
            })
            .sum()
    }

    /// Checks the spec invariants: unique names, parents precede children,
    /// exactly one source vertex per session with no parents, two distinct
    /// parents on every other vertex, and at least one sink per session.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        let mut names = std::collections::HashSet::new();
        let mut sources = [0usize; 2];
        let mut sinks = [0usize; 2];
        for (i, v) in self.vertices.iter().enumerate() {
            if !names.insert(v.name.as_str()) {
                return bad(format!("duplicate vertex name {:?}", v.name));
            }
            if v.roles.contains(&SpecRole::Coding) && v.roles.len() > 1 {
                return bad(format!("vertex {:?} is tagged coding and something else", v.name));
            }
            let roles = roles_of(&v.roles);
            for s in Session::BOTH {
                sources[s.index()] += roles.is_source_of(s) as usize;
                sinks[s.index()] += roles.is_sink_of(s) as usize;
            }
            if roles.x1_source && roles.x2_source {
                return bad(format!("vertex {:?} is a source of both sessions", v.name));
            }
            if let Some(&p) = v.parents.iter().find(|&&p| p >= i) {
                return bad(format!("vertex {:?} has parent {p} that does not precede it", v.name));
            }
            if roles.is_source() {
                if !v.parents.is_empty() {
                    return bad(format!("source vertex {:?} has parents", v.name));
                }
            } else if v.parents.len() != 2 || v.parents[0] == v.parents[1] {
                return bad(format!("vertex {:?} must have exactly two distinct parents", v.name));
            }
        }
        if sources != [1, 1] {
            return bad("exactly one source vertex per session is required".into());
        }
        if sinks[0] == 0 || sinks[1] == 0 {
            return bad("each session needs a sink vertex".into());
        }
        Ok(())
    }

    /// The spec as a region graph with the same vertex indices.
    pub fn to_region_graph(&self) -> Result<RegionGraph> {
        let parents = self.vertices.iter().map(|v| v.parents.clone()).collect();
        let roles = (0..self.len()).map(|v| self.roles(v)).collect();
        RegionGraph::from_parents(parents, roles)
    }

    /// Describes an existing region graph; vertices are named `R1`, `R2`, ...
    pub fn from_region_graph(graph: &RegionGraph) -> RegionGraphSpec {
        RegionGraphSpec {
            vertices: (0..graph.len())
                .map(|r| SpecVertex {
                    name: format!("R{}", r + 1),
                    parents: graph.parents(r).to_vec(),
                    roles: tags_of(graph.roles(r)),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let doc = SpecDoc {
            region_spec: SPEC_VERSION,
            vertices: self.vertices.clone(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("spec serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<RegionGraphSpec> {
        let doc: SpecDoc = serde_json::from_str(text).map_err(|e| Error::MalformedInput(e.to_string()))?;
        if doc.region_spec != SPEC_VERSION {
            return Err(Error::MalformedInput(format!(
                "unknown region_spec version {}",
                doc.region_spec
            )));
        }
        let spec = RegionGraphSpec { vertices: doc.vertices };
        spec.validate()?;
        Ok(spec)
    }
}

/// A family whose minimal region graph has `n` coding regions and
/// `max{3, 2N - 2}` encoding links.
///
/// For `n >= 2` the coding regions form a chain `Q1 .. Qn`; consecutive
/// ones share an X2 sink child `Zj`, `Z(j-1)` feeds `Q(j+1)`, and the last
/// coding region feeds one sink of each session.
pub fn gen_tight_encoding(n: usize) -> Result<RegionGraphSpec> {
    use SpecRole::{Coding, X1Sink, X2Sink};
    if n == 0 {
        return Err(Error::InvalidSpec("need at least one coding region".into()));
    }
    let mut spec = RegionGraphSpec::with_sources();
    let (a, b) = (0, 1);
    let q1 = spec.push("Q1", &[a, b], &[Coding]);
    if n == 1 {
        spec.push("T1", &[b, q1], &[X1Sink]);
        spec.push("T2", &[a, q1], &[X2Sink]);
        return Ok(spec);
    }
    let mut z = spec.push("Z0", &[a, q1], &[X2Sink]);
    let mut q = q1;
    for j in 1..n {
        let next = spec.push(format!("Q{}", j + 1), &[q, z], &[Coding]);
        z = spec.push(format!("Z{j}"), &[q, next], &[X2Sink]);
        q = next;
    }
    spec.push("W2", &[a, q], &[X2Sink]);
    spec.push("W1", &[b, q], &[X1Sink]);
    Ok(spec)
}

/// Extends the tight-encoding family so that every pair of coding regions
/// shares a child, forcing pairwise independent coding kernels.
pub fn gen_tight_field(n: usize) -> Result<RegionGraphSpec> {
    if n < 2 {
        return Err(Error::InvalidSpec(format!("tight-field family needs n >= 2, got {n}")));
    }
    let mut spec = gen_tight_encoding(n)?;
    let coding: Vec<usize> = (0..spec.len())
        .filter(|&v| spec.vertices[v].roles == [SpecRole::Coding])
        .collect();
    for j in 2..n {
        spec.push(format!("Y{j}"), &[0, coding[j - 1]], &[SpecRole::X2Sink]);
    }
    for i in 0..n {
        for j in i + 2..n {
            let name = format!("V{}_{}", i + 1, j + 1);
            spec.push(name, &[coding[i], coding[j]], &[SpecRole::X2Sink]);
        }
    }
    Ok(spec)
}

/// A random valid spec with `interior` non-source vertices.
pub fn random_spec(interior: usize, seed: u64) -> RegionGraphSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spec = RegionGraphSpec::with_sources();
    let interior = interior.max(2);
    for i in 0..interior {
        let n = spec.len();
        let p = rng.gen_range(0..n);
        let mut q = rng.gen_range(0..n - 1);
        if q >= p {
            q += 1;
        }
        let mut parents = [p, q];
        parents.sort_unstable();
        let roles = if i + 2 == interior {
            vec![SpecRole::X1Sink]
        } else if i + 1 == interior {
            vec![SpecRole::X2Sink]
        } else {
            match rng.gen_range(0..8) {
                0 => vec![SpecRole::X1Sink],
                1 => vec![SpecRole::X2Sink],
                2 if rng.gen_bool(0.25) => vec![SpecRole::X1Sink, SpecRole::X2Sink],
                _ => vec![SpecRole::Coding],
            }
        };
        spec.push(format!("R{}", n + 1), &parents, &roles);
    }
    spec
}

/// Builds a network whose basic region graph is the spec.
///
/// Vertex `R` becomes nodes `v_R -> w_R` joined by a hub link; each parent
/// edge `(P, R)` becomes a relay link `w_P -> v_R`. Source vertices host
/// their source at `v_R`; sink roles put a sink at `w_R`.
pub fn realize_network(spec: &RegionGraphSpec) -> Result<Network> {
    Network::from_doc(&realize_doc(spec)?, NetworkConfig::default())
}

pub fn realize_doc(spec: &RegionGraphSpec) -> Result<InstanceDoc> {
    spec.validate()?;
    let v = |i: usize| format!("v_{}", spec.vertices[i].name);
    let w = |i: usize| format!("w_{}", spec.vertices[i].name);
    let mut doc = InstanceDoc::default();
    for i in 0..spec.len() {
        doc.nodes.push(v(i));
        doc.nodes.push(w(i));
    }
    for i in 0..spec.len() {
        doc.links.push(LinkDoc::new(v(i), w(i)));
        for &p in &spec.vertices[i].parents {
            doc.links.push(LinkDoc::new(w(p), v(i)));
        }
        let roles = spec.roles(i);
        if roles.x1_source {
            doc.source1 = v(i);
        }
        if roles.x2_source {
            doc.source2 = v(i);
        }
        if roles.x1_sink {
            doc.sinks1.push(w(i));
        }
        if roles.x2_sink {
            doc.sinks2.push(w(i));
        }
    }
    Ok(doc)
}

/// Loads either an instance document or a region-graph spec (recognized by
/// its `region_spec` key), realizing the latter.
pub fn load_any(text: &str) -> Result<Network> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::MalformedInput(e.to_string()))?;
    if value.get("region_spec").is_some() {
        realize_network(&RegionGraphSpec::from_json(text)?)
    } else {
        crate::network::load_network(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::basic_decomposition;

    fn params(nodes: usize, links: usize, s1: usize, s2: usize, seed: u64) -> GenParams {
        GenParams {
            nodes,
            links,
            sinks1: s1,
            sinks2: s2,
            seed,
        }
    }

    #[test]
    fn gen_random_is_deterministic() {
        let p = params(10, 15, 1, 1, 1);
        let a = gen_random(&p).unwrap();
        let b = gen_random(&p).unwrap();
        assert_eq!(a.to_canonical_json(), b.to_canonical_json());
        assert_eq!(a.num_real_links(), 15);
        assert_ne!(
            a.to_canonical_json(),
            gen_random(&params(10, 15, 1, 1, 2)).unwrap().to_canonical_json()
        );
    }

    #[test]
    fn gen_random_rejects_impossible_parameters() {
        assert!(matches!(
            gen_random(&params(5, 10, 6, 1, 0)),
            Err(Error::ParamsInfeasible(_))
        ));
        assert!(matches!(
            gen_random(&params(2, 10, 1, 1, 0)),
            Err(Error::ParamsInfeasible(_))
        ));
        assert!(matches!(
            gen_random(&params(10, 5, 1, 1, 0)),
            Err(Error::ParamsInfeasible(_))
        ));
        assert!(matches!(
            gen_random(&params(10, 12, 0, 1, 0)),
            Err(Error::ParamsInfeasible(_))
        ));
    }

    #[test]
    fn gen_random_many_seeds_load() {
        for seed in 0..300 {
            let nodes = 3 + (seed as usize % 9);
            let links = nodes - 1 + (seed as usize % 7);
            let s1 = 1 + seed as usize % 2;
            let s2 = 1 + (seed as usize / 2) % 2;
            match gen_random(&params(nodes, links, s1.min(nodes - 2), s2.min(nodes - 2), seed)) {
                Ok(net) => assert_eq!(net.num_real_links(), links),
                Err(e) => panic!("seed {seed}: {e}"),
            }
        }
    }

    #[test]
    fn random_orders_are_valid() {
        let net = gen_random(&params(12, 25, 2, 2, 5)).unwrap();
        for seed in 0..20 {
            let order = random_topological_order(&net, seed);
            crate::network::check_link_order(&net, &order).unwrap();
        }
    }

    #[test]
    fn tight_encoding_shapes() {
        let s1 = gen_tight_encoding(1).unwrap();
        assert_eq!((s1.len(), s1.sink_count()), (5, 2));
        for n in 2..6 {
            let s = gen_tight_encoding(n).unwrap();
            s.validate().unwrap();
            assert_eq!(s.sink_count(), n + 2);
            assert_eq!(s.len() - 2, 2 * (n + 2) - 2);
        }
        assert!(gen_tight_encoding(0).is_err());
    }

    #[test]
    fn tight_field_sink_counts() {
        assert_eq!(gen_tight_field(4).unwrap().sink_count(), 11);
        assert_eq!(gen_tight_field(2).unwrap().sink_count(), 4);
        for n in 2..8 {
            assert_eq!(gen_tight_field(n).unwrap().sink_count(), (n * n + n + 2) / 2);
        }
        assert!(gen_tight_field(1).is_err());
    }

    #[test]
    fn spec_validation() {
        let mut s = gen_tight_encoding(1).unwrap();
        s.vertices[2].parents = vec![0];
        assert!(matches!(realize_network(&s), Err(Error::InvalidSpec(_))));
        let mut s = gen_tight_encoding(1).unwrap();
        s.vertices[2].parents = vec![0, 3];
        assert!(matches!(s.validate(), Err(Error::InvalidSpec(_))));
        let mut s = gen_tight_encoding(1).unwrap();
        s.vertices[4].roles = vec![SpecRole::Coding];
        assert!(matches!(s.validate(), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn spec_json_round_trip() {
        let s = gen_tight_field(3).unwrap();
        let text = s.to_json();
        assert!(text.contains("\"region_spec\": 1"));
        assert_eq!(RegionGraphSpec::from_json(&text).unwrap(), s);
        let net = load_any(&text).unwrap();
        assert_eq!(net.num_sinks(), s.sink_count());
        let plain = crate::fixtures::butterfly().to_canonical_json();
        assert_eq!(load_any(&plain).unwrap().num_links(), 11);
    }

    #[test]
    fn realized_single_coding_vertex() {
        let net = realize_network(&gen_tight_encoding(1).unwrap()).unwrap();
        let d = basic_decomposition(&net);
        assert_eq!(d.len(), 5);
        // hub link of the coding vertex heads its own region
        let hub = net.link_ids().find(|&e| net.describe_link(e) == "v_Q1->w_Q1").unwrap();
        assert_eq!(d.region(d.owner(hub)).head(), hub);
    }
}
