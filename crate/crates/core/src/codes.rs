//! Linear codes on region graphs, their expansion to per-link solutions,
//! verification by message simulation, and a brute-force solvability oracle.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{field_size_bound, in_span, projective_points, smallest_supported_order, Elem, Field, Kernel};
use crate::labeling::{LabeledRegionGraph, RegionKind};
use crate::network::{LinkId, LinkKind, Network, Session};
use crate::region::{RegionGraph, RegionState};

/// Kernels per region plus, for every non-source region, one coefficient
/// per parent (in the graph's parent order).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionCode {
    pub field: Field,
    pub kernels: Vec<Kernel>,
    pub local: Vec<Vec<Elem>>,
}

impl RegionCode {
    /// Checks a kernel assignment against the graph and derives local
    /// coefficients. Fails with `InfeasibleInput` if a source or sink region
    /// does not carry its `α_i`, or a kernel is outside its parents' span.
    pub fn from_kernels(graph: &RegionGraph, field: Field, kernels: Vec<Kernel>) -> Result<RegionCode> {
        if kernels.len() != graph.len() {
            return Err(Error::InfeasibleInput);
        }
        let mut local = Vec::with_capacity(graph.len());
        for r in 0..graph.len() {
            let roles = graph.roles(r);
            for s in Session::BOTH {
                if roles.has(s) && kernels[r] != Kernel::alpha(s) {
                    return Err(Error::InfeasibleInput);
                }
            }
            if roles.is_source() {
                local.push(Vec::new());
                continue;
            }
            let gens: Vec<Kernel> = graph.parents(r).iter().map(|&p| kernels[p]).collect();
            local.push(in_span(&field, kernels[r], &gens).ok_or(Error::InfeasibleInput)?);
        }
        Ok(RegionCode { field, kernels, local })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
}

/// Direct construction: `α_i` on `X_i` regions and `(1, j)` on the `j`-th
/// coding region in head order. Needs `q ≥ J + 1`.
pub fn construct_code(labeled: &LabeledRegionGraph, field: Field) -> Result<RegionCode> {
    if !labeled.has_no_singular() || !labeled.satisfies_two_parent_condition() {
        return Err(Error::InfeasibleInput);
    }
    let coding = labeled.coding();
    let needed = coding.len() as u64 + 1;
    if (field.order() as u64) < needed {
        return Err(Error::FieldTooSmall {
            order: field.order(),
            needed,
        });
    }
    let mut next = 1;
    let kernels = labeled
        .kinds
        .iter()
        .map(|kind| match kind {
            RegionKind::X1 => Kernel::ALPHA1,
            RegionKind::X2 => Kernel::ALPHA2,
            _ => {
                next += 1;
                Kernel::beta(Elem(next - 1))
            }
        })
        .collect();
    RegionCode::from_kernels(&labeled.graph, field, kernels)
}

/// The smallest supported field for the direct construction.
pub fn direct_field(labeled: &LabeledRegionGraph) -> Field {
    let needed = (labeled.coding().len() as u64 + 1).max(2);
    Field::new(smallest_supported_order(needed).expect("coding region count fits a supported order") as u64)
        .expect("supported order")
}

/// Exhaustive search for any code of `graph` over `field`, trying projective
/// points of each region's parent span. `None` means no linear code exists.
pub fn search_region_code(graph: &RegionGraph, field: &Field) -> Option<RegionCode> {
    let points = projective_points(field);
    let mut kernels = vec![Kernel::ZERO; graph.len()];
    if search_regions(graph, field, &points, &mut kernels, 0) {
        RegionCode::from_kernels(graph, *field, kernels).ok()
    } else {
        None
    }
}

fn search_regions(graph: &RegionGraph, field: &Field, points: &[Kernel], kernels: &mut [Kernel], r: usize) -> bool {
    if r == graph.len() {
        return true;
    }
    let gens: Vec<Kernel> = graph.parents(r).iter().map(|&p| kernels[p]).collect();
    let roles = graph.roles(r);
    if let Some(s) = roles.demanded() {
        let k = Kernel::alpha(s);
        if roles.has(s.other()) || (!roles.is_source() && in_span(field, k, &gens).is_none()) {
            return false;
        }
        kernels[r] = k;
        return search_regions(graph, field, points, kernels, r + 1);
    }
    for k in span_options(field, points, &gens) {
        kernels[r] = k;
        if search_regions(graph, field, points, kernels, r + 1) {
            return true;
        }
    }
    false
}

/// Projective points inside `span(gens)`, or just zero if the span is `{0}`.
fn span_options(field: &Field, points: &[Kernel], gens: &[Kernel]) -> Vec<Kernel> {
    match Span::of(field, gens) {
        Span::Zero => vec![Kernel::ZERO],
        Span::Line(k) => vec![k],
        Span::Full => points.to_vec(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Span {
    Zero,
    Line(Kernel),
    Full,
}

impl Span {
    fn of(field: &Field, gens: &[Kernel]) -> Span {
        gens.iter()
            .fold(Span::Zero, |s, &g| s.join(field, Span::point(field, g)))
    }

    fn point(field: &Field, k: Kernel) -> Span {
        if k.is_zero() {
            Span::Zero
        } else {
            Span::Line(field.normalize(k))
        }
    }

    fn join(self, field: &Field, other: Span) -> Span {
        match (self, other) {
            (Span::Zero, s) | (s, Span::Zero) => s,
            (Span::Line(a), Span::Line(b)) if !field.independent(a, b) => Span::Line(a),
            _ => Span::Full,
        }
    }

    fn contains(self, field: &Field, k: Kernel) -> bool {
        match self {
            Span::Zero => k.is_zero(),
            Span::Line(a) => !field.independent(a, k),
            Span::Full => true,
        }
    }
}

/// Kernels and local coefficients for every link.
///
/// `local[e]` holds one coefficient per entry of `network.in_links(e)`;
/// it is empty for source links.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetworkSolution {
    pub field: Field,
    pub kernels: Vec<Kernel>,
    pub local: Vec<Vec<Elem>>,
    pub encoding_links: Vec<LinkId>,
}

impl NetworkSolution {
    pub fn kernel(&self, link: LinkId) -> Kernel {
        self.kernels[link.slot()]
    }

    /// Derives local coefficients from a bare kernel assignment. Links whose
    /// kernel is outside their in-links' span get no coefficients, which
    /// verification then reports.
    pub fn from_kernels(network: &Network, field: Field, kernels: Vec<Kernel>) -> NetworkSolution {
        let local = network
            .link_ids()
            .map(|e| {
                if network.link(e).is_source() {
                    return Vec::new();
                }
                let gens: Vec<Kernel> = network.in_links(e).iter().map(|u| kernels[u.slot()]).collect();
                in_span(&field, kernels[e.slot()], &gens).unwrap_or_default()
            })
            .collect();
        let encoding_links = encoding_links(network, &kernels);
        NetworkSolution {
            field,
            kernels,
            local,
            encoding_links,
        }
    }

    pub fn to_doc(&self) -> SolutionDoc {
        SolutionDoc {
            field: self.field.order(),
            kernels: self
                .kernels
                .iter()
                .enumerate()
                .map(|(slot, k)| (LinkId::from_slot(slot).get() as u32, k.to_string()))
                .collect(),
        }
    }
}

/// On-disk form of a solution: field order and a kernel per link id.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionDoc {
    pub field: u32,
    pub kernels: BTreeMap<u32, String>,
}

impl SolutionDoc {
    pub fn to_canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("solution serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<SolutionDoc> {
        serde_json::from_str(text).map_err(|e| Error::MalformedInput(e.to_string()))
    }

    pub fn to_solution(&self, network: &Network) -> Result<NetworkSolution> {
        let field = Field::new(self.field as u64)?;
        let mut kernels = vec![Kernel::ZERO; network.num_links()];
        let mut seen = vec![false; network.num_links()];
        for (&id, text) in &self.kernels {
            let slot = (id as usize).wrapping_sub(1);
            if slot >= kernels.len() {
                return Err(Error::MalformedInput(format!("unknown link id {id}")));
            }
            let k: Kernel = text.parse()?;
            if !field.contains(k.c1) || !field.contains(k.c2) {
                return Err(Error::MalformedInput(format!(
                    "kernel {text} of link {id} is not over GF({})",
                    self.field
                )));
            }
            kernels[slot] = k;
            seen[slot] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::MalformedInput(format!("no kernel for link {}", missing + 1)));
        }
        Ok(NetworkSolution::from_kernels(network, field, kernels))
    }
}

/// Non-source links whose kernel differs from the kernel of every in-link.
pub fn encoding_links(network: &Network, kernels: &[Kernel]) -> Vec<LinkId> {
    network
        .link_ids()
        .filter(|&e| !network.link(e).is_source())
        .filter(|&e| {
            network
                .in_links(e)
                .iter()
                .all(|u| kernels[u.slot()] != kernels[e.slot()])
        })
        .collect()
}

/// Spreads a region code over the links of each region.
///
/// A head takes the region's parent coefficients on its lowest-id in-link
/// from each parent; other members forward their lowest-id in-link inside
/// the region. Every remaining coefficient is zero.
pub fn expand_solution(network: &Network, state: &RegionState, code: &RegionCode) -> NetworkSolution {
    let d = &state.decomposition;
    let kernels: Vec<Kernel> = network.link_ids().map(|e| code.kernels[d.owner(e)]).collect();
    let mut local = Vec::with_capacity(network.num_links());
    for e in network.link_ids() {
        let ins = network.in_links(e);
        let mut coeffs = vec![Elem(0); ins.len()];
        if !network.link(e).is_source() {
            let r = d.owner(e);
            if d.region(r).head() == e {
                for (&p, &c) in state.graph.parents(r).iter().zip(&code.local[r]) {
                    if let Some(i) = ins.iter().position(|&u| d.owner(u) == p) {
                        coeffs[i] = c;
                    }
                }
            } else if let Some(i) = ins.iter().position(|&u| d.owner(u) == r) {
                coeffs[i] = code.field.one();
            }
        }
        local.push(if network.link(e).is_source() {
            Vec::new()
        } else {
            coeffs
        });
    }
    let encoding_links = encoding_links(network, &kernels);
    NetworkSolution {
        field: code.field,
        kernels,
        local,
        encoding_links,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Condition {
    /// An `X_i` link does not carry `α_i`.
    DemandKernel,
    /// A kernel is not the stated combination of the in-link kernels.
    LocalCombination,
    /// Simulation delivered the wrong value to a sink link.
    Decoding { x1: u32, x2: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub link: LinkId,
    pub condition: Condition,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Simulation {
    /// All `q²` message pairs.
    Exhaustive,
    /// `pairs` random message pairs drawn from a seeded stream.
    Sampled { pairs: usize, seed: u64 },
}

/// Full check: kernel conditions link by link, then message simulation.
pub fn verify_solution(network: &Network, solution: &NetworkSolution) -> Result<(), Violation> {
    verify_solution_with(network, solution, Simulation::Exhaustive)
}

pub fn verify_solution_with(
    network: &Network,
    solution: &NetworkSolution,
    simulation: Simulation,
) -> Result<(), Violation> {
    let f = &solution.field;
    for e in network.link_ids() {
        if let Some(s) = network.link(e).session() {
            if solution.kernel(e) != Kernel::alpha(s) {
                return Err(Violation {
                    link: e,
                    condition: Condition::DemandKernel,
                });
            }
        }
    }
    for e in network.link_ids() {
        if network.link(e).is_source() {
            continue;
        }
        let k = solution.kernel(e);
        let gens: Vec<Kernel> = network.in_links(e).iter().map(|&u| solution.kernel(u)).collect();
        let coeffs = &solution.local[e.slot()];
        if coeffs.len() != gens.len() || f.combine(coeffs, &gens) != k {
            return Err(Violation {
                link: e,
                condition: Condition::LocalCombination,
            });
        }
    }
    let check = |x1: Elem, x2: Elem| -> Result<(), Violation> {
        let values = simulate(network, solution, x1, x2);
        for e in network.sink_links() {
            let want = match network.link(e).kind {
                LinkKind::Sink(Session::X1) => x1,
                _ => x2,
            };
            if values[e.slot()] != want {
                return Err(Violation {
                    link: e,
                    condition: Condition::Decoding { x1: x1.0, x2: x2.0 },
                });
            }
        }
        Ok(())
    };
    match simulation {
        Simulation::Exhaustive => {
            for x1 in f.elements() {
                for x2 in f.elements() {
                    check(x1, x2)?;
                }
            }
        }
        Simulation::Sampled { pairs, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let q = f.order();
            for _ in 0..pairs {
                check(Elem(rng.gen_range(0..q)), Elem(rng.gen_range(0..q)))?;
            }
        }
    }
    Ok(())
}

/// Value carried by every link when the sources emit `x1` and `x2`,
/// propagated through the local coefficients in link order.
pub fn simulate(network: &Network, solution: &NetworkSolution, x1: Elem, x2: Elem) -> Vec<Elem> {
    let f = &solution.field;
    let mut values = vec![Elem(0); network.num_links()];
    for e in network.link_ids() {
        values[e.slot()] = match network.link(e).kind {
            LinkKind::Source(Session::X1) => x1,
            LinkKind::Source(Session::X2) => x2,
            _ => network
                .in_links(e)
                .iter()
                .zip(&solution.local[e.slot()])
                .fold(Elem(0), |acc, (u, &c)| f.add(acc, f.mul(c, values[u.slot()]))),
        };
    }
    values
}

/// Checks that every listed `X_i` link's simulated value never changes with
/// the other message. Returns the first offending link.
pub fn message_dependence(
    network: &Network,
    solution: &NetworkSolution,
    links: &[(LinkId, Session)],
) -> Result<(), LinkId> {
    let f = &solution.field;
    for x in f.elements() {
        let mut reference: Option<Vec<Elem>> = None;
        for y in f.elements() {
            let mut per_session = [Vec::new(), Vec::new()];
            for s in Session::BOTH {
                let (x1, x2) = match s {
                    Session::X1 => (x, y),
                    Session::X2 => (y, x),
                };
                per_session[s.index()] = simulate(network, solution, x1, x2);
            }
            let observed: Vec<Elem> = links.iter().map(|&(l, s)| per_session[s.index()][l.slot()]).collect();
            match &reference {
                None => reference = Some(observed),
                Some(r) => {
                    if let Some(i) = r.iter().zip(&observed).position(|(a, b)| a != b) {
                        return Err(links[i].0);
                    }
                }
            }
        }
    }
    Ok(())
}

/// Heads of the regions labeled `X_i`, for [`message_dependence`].
pub fn labeled_heads(state: &RegionState, labeled: &LabeledRegionGraph) -> Vec<(LinkId, Session)> {
    (0..labeled.len())
        .filter_map(|r| {
            labeled
                .kind(r)
                .session()
                .map(|s| (state.decomposition.region(r).head(), s))
        })
        .collect()
}

pub const BRUTE_FORCE_LINK_LIMIT: usize = 25;

/// The field the brute-force oracle searches: the smallest supported order
/// not below the field-size bound for this sink count.
pub fn oracle_field(network: &Network) -> Result<Field> {
    let bound = field_size_bound(network.num_sinks())?;
    let q = smallest_supported_order(bound as u64).ok_or(Error::UnsupportedOrder(bound as u64))?;
    Field::new(q as u64)
}

/// Exhaustive search over linear solutions, independent of the region
/// machinery. Returns a verified solution, or `None` if none exists.
pub fn brute_force_solve(network: &Network) -> Result<Option<NetworkSolution>> {
    brute_force_solve_over(network, oracle_field(network)?)
}

pub fn brute_force_solve_over(network: &Network, field: Field) -> Result<Option<NetworkSolution>> {
    let real = network.num_real_links();
    if real > BRUTE_FORCE_LINK_LIMIT {
        return Err(Error::InstanceTooLarge {
            links: real,
            limit: BRUTE_FORCE_LINK_LIMIT,
        });
    }
    let mut search = BruteForce::new(network, field);
    if !search.run(0) {
        return Ok(None);
    }
    let solution = NetworkSolution::from_kernels(network, field, search.kernels);
    verify_solution(network, &solution).expect("brute-force assignment verifies");
    Ok(Some(solution))
}

struct BruteForce<'a> {
    network: &'a Network,
    field: Field,
    points: Vec<Kernel>,
    kernels: Vec<Kernel>,
    reaches_sink: Vec<bool>,
    /// Sink links in index order, with their demanded kernel.
    sinks: Vec<(LinkId, Kernel)>,
}

impl<'a> BruteForce<'a> {
    fn new(network: &'a Network, field: Field) -> Self {
        let n = network.num_links();
        let mut reaches_sink = vec![false; n];
        for slot in (0..n).rev() {
            let e = LinkId::from_slot(slot);
            reaches_sink[slot] =
                network.link(e).is_sink() || network.out_links(e).iter().any(|o| reaches_sink[o.slot()]);
        }
        let sinks = network
            .sink_links()
            .map(|e| {
                (
                    e,
                    Kernel::alpha(network.link(e).session().expect("sink link has a session")),
                )
            })
            .collect();
        BruteForce {
            network,
            points: projective_points(&field),
            field,
            kernels: vec![Kernel::ZERO; n],
            reaches_sink,
            sinks,
        }
    }

    /// `slot` is the next link to assign; all earlier links are fixed.
    fn run(&mut self, slot: usize) -> bool {
        if slot == self.kernels.len() {
            return true;
        }
        let e = LinkId::from_slot(slot);
        let link = self.network.link(e);
        if let LinkKind::Source(s) = link.kind {
            self.kernels[slot] = Kernel::alpha(s);
            return self.run(slot + 1);
        }
        let gens: Vec<Kernel> = self
            .network
            .in_links(e)
            .iter()
            .map(|u| self.kernels[u.slot()])
            .collect();
        let span = Span::of(&self.field, &gens);
        if let LinkKind::Sink(s) = link.kind {
            let k = Kernel::alpha(s);
            if !span.contains(&self.field, k) {
                return false;
            }
            self.kernels[slot] = k;
            return self.run(slot + 1);
        }
        let options = span_options(&self.field, &self.points, &gens);
        if !self.reaches_sink[slot] {
            self.kernels[slot] = options[0];
            return self.run(slot + 1);
        }
        for k in options {
            self.kernels[slot] = k;
            if self.sinks_still_reachable(slot) && self.run(slot + 1) {
                return true;
            }
        }
        false
    }

    /// Over-approximates the span every later link could still reach and
    /// checks that each sink's demand remains inside it.
    fn sinks_still_reachable(&self, assigned: usize) -> bool {
        let n = self.kernels.len();
        let mut reach = vec![Span::Zero; n];
        for slot in 0..n {
            let e = LinkId::from_slot(slot);
            reach[slot] = if slot <= assigned {
                Span::point(&self.field, self.kernels[slot])
            } else {
                self.network
                    .in_links(e)
                    .iter()
                    .fold(Span::Zero, |s, u| s.join(&self.field, reach[u.slot()]))
            };
        }
        self.sinks
            .iter()
            .all(|&(e, k)| e.slot() <= assigned || reach[e.slot()].contains(&self.field, k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::labeling::solvable;

    fn f(q: u64) -> Field {
        Field::new(q).unwrap()
    }

    fn butterfly_code() -> (Network, RegionState, LabeledRegionGraph, RegionCode) {
        let net = fixtures::butterfly();
        let s = solvable(&net);
        let code = construct_code(&s.labeled, f(2)).unwrap();
        (net, s.state, s.labeled, code)
    }

    #[test]
    fn butterfly_code_over_gf2() {
        let (_, _, _, code) = butterfly_code();
        let k = |a, b| Kernel::from_ints(a, b);
        assert_eq!(code.kernels, vec![k(1, 0), k(0, 1), k(1, 1), k(1, 0), k(0, 1)]);
        // R4 (index 3) has parents R2, R3: (1,0) = (0,1) + (1,1)
        assert_eq!(code.local[3], vec![Elem(1), Elem(1)]);
    }

    #[test]
    fn field_too_small_for_the_coding_regions() {
        let net = crate::instances::realize_network(&crate::instances::gen_tight_encoding(3).unwrap()).unwrap();
        let s = solvable(&net);
        assert_eq!(s.labeled.coding().len(), 3);
        assert_eq!(
            construct_code(&s.labeled, f(2)),
            Err(Error::FieldTooSmall { order: 2, needed: 4 })
        );
        assert!(construct_code(&s.labeled, f(4)).is_ok());
    }

    #[test]
    fn construct_rejects_singular_graphs() {
        let s = solvable(&fixtures::bottleneck());
        assert_eq!(construct_code(&s.labeled, f(7)), Err(Error::InfeasibleInput));
    }

    #[test]
    fn two_chains_code_is_pure_routing() {
        let net = fixtures::two_chains();
        let s = solvable(&net);
        let code = construct_code(&s.labeled, f(2)).unwrap();
        assert_eq!(code.kernels, vec![Kernel::ALPHA1, Kernel::ALPHA2]);
        let sol = expand_solution(&net, &s.state, &code);
        assert!(sol.encoding_links.is_empty());
        assert_eq!(verify_solution(&net, &sol), Ok(()));
    }

    #[test]
    fn butterfly_expansion_verifies() {
        let (net, state, labeled, code) = butterfly_code();
        let sol = expand_solution(&net, &state, &code);
        assert_eq!(
            sol.encoding_links,
            vec![LinkId::new(7), LinkId::new(10), LinkId::new(11)]
        );
        assert_eq!(verify_solution(&net, &sol), Ok(()));
        assert_eq!(message_dependence(&net, &sol, &labeled_heads(&state, &labeled)), Ok(()));
        // local coefficients of a->b: one per in-link
        assert_eq!(sol.local[6], vec![Elem(1), Elem(1)]);
        // b->t1 forwards a->b
        assert_eq!(sol.local[7], vec![Elem(1)]);
    }

    #[test]
    fn corrupted_coding_region_fails_at_the_x2_sink() {
        let (net, state, _, code) = butterfly_code();
        let mut kernels: Vec<Kernel> = net
            .link_ids()
            .map(|e| code.kernels[state.decomposition.owner(e)])
            .collect();
        // region R3 holds links 7..=9
        kernels[6..9].fill(Kernel::ALPHA1);
        let sol = NetworkSolution::from_kernels(&net, f(2), kernels);
        let v = verify_solution(&net, &sol).unwrap_err();
        assert_eq!(v.link, LinkId::new(11));
        assert_eq!(net.describe_link(v.link), "sink(X2)@t1");
        assert_eq!(v.condition, Condition::LocalCombination);
    }

    #[test]
    fn corrupted_coefficient_is_caught_by_kernels_then_simulation() {
        let (net, state, _, code) = butterfly_code();
        let mut sol = expand_solution(&net, &state, &code);
        sol.local[6] = vec![Elem(1), Elem(0)];
        let v = verify_solution(&net, &sol).unwrap_err();
        assert_eq!((v.link, v.condition), (LinkId::new(7), Condition::LocalCombination));
    }

    #[test]
    fn all_alpha1_on_two_chains_fails_at_the_x2_sink() {
        let net = fixtures::two_chains();
        let mut kernels = vec![Kernel::ALPHA1; net.num_links()];
        kernels[1] = Kernel::ALPHA2;
        let sol = NetworkSolution::from_kernels(&net, f(2), kernels);
        let v = verify_solution(&net, &sol).unwrap_err();
        assert_eq!(net.describe_link(v.link), "sink(X2)@u");
        assert_eq!(v.condition, Condition::DemandKernel);
    }

    #[test]
    fn forwarding_head_is_not_an_encoding_link() {
        let net = fixtures::butterfly();
        let k = |a, b| Kernel::from_ints(a, b);
        // route X1 through a->b; the sink at t1 then has nothing new to decode
        let kernels = vec![
            k(1, 0),
            k(0, 1),
            k(1, 0),
            k(1, 0),
            k(0, 1),
            k(0, 1),
            k(1, 0),
            k(1, 0),
            k(1, 0),
            k(1, 0),
            k(0, 1),
        ];
        let enc = encoding_links(&net, &kernels);
        assert!(!enc.contains(&LinkId::new(7)));
        assert!(!enc.contains(&LinkId::new(10)));
    }

    #[test]
    fn brute_force_agrees_on_fixtures() {
        let sol = brute_force_solve(&fixtures::butterfly()).unwrap().unwrap();
        assert_eq!(sol.field.order(), 2);
        assert_eq!(brute_force_solve(&fixtures::bottleneck()).unwrap(), None);
        let chains = fixtures::two_chains();
        let sol = brute_force_solve(&chains).unwrap().unwrap();
        assert_eq!(
            sol.kernels,
            vec![
                Kernel::ALPHA1,
                Kernel::ALPHA2,
                Kernel::ALPHA1,
                Kernel::ALPHA2,
                Kernel::ALPHA1,
                Kernel::ALPHA2
            ]
        );
    }

    #[test]
    fn brute_force_refuses_large_instances() {
        let params = crate::instances::GenParams {
            nodes: 20,
            links: 30,
            sinks1: 1,
            sinks2: 1,
            seed: 3,
        };
        let net = crate::instances::gen_random(&params).unwrap();
        assert!(matches!(brute_force_solve(&net), Err(Error::InstanceTooLarge { .. })));
    }

    #[test]
    fn region_search_matches_direct_construction() {
        let (_, state, _, _) = butterfly_code();
        let code = search_region_code(&state.graph, &f(2)).unwrap();
        assert_eq!(code.kernels[2], Kernel::from_ints(1, 1));
        assert!(search_region_code(&solvable(&fixtures::bottleneck()).state.graph, &f(16)).is_none());
    }

    #[test]
    fn sampled_simulation_agrees() {
        let (net, state, _, code) = butterfly_code();
        let sol = expand_solution(&net, &state, &code);
        assert_eq!(
            verify_solution_with(&net, &sol, Simulation::Sampled { pairs: 16, seed: 9 }),
            Ok(())
        );
    }

    #[test]
    fn solution_doc_round_trip() {
        let (net, state, _, code) = butterfly_code();
        let sol = expand_solution(&net, &state, &code);
        let doc = sol.to_doc();
        let text = doc.to_canonical_json();
        assert!(text.contains("\"7\": \"(1,1)\""));
        let back = SolutionDoc::from_json(&text).unwrap().to_solution(&net).unwrap();
        assert_eq!(back.kernels, sol.kernels);
        assert_eq!(verify_solution(&net, &back), Ok(()));
        let mut partial = doc.clone();
        partial.kernels.remove(&3);
        assert!(partial.to_solution(&net).is_err());
    }
}
