//! Small hand-built networks used throughout tests, docs and the CLI.

use crate::network::{InstanceDoc, LinkDoc, Network, NetworkConfig};

fn build(
    nodes: &[&str],
    links: &[(&str, &str)],
    source1: &str,
    source2: &str,
    sinks1: &[&str],
    sinks2: &[&str],
) -> InstanceDoc {
    let owned = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    InstanceDoc {
        links: links.iter().map(|&(t, h)| LinkDoc::new(t, h)).collect(),
        nodes: owned(nodes),
        sinks1: owned(sinks1),
        sinks2: owned(sinks2),
        source1: source1.into(),
        source2: source2.into(),
    }
}

fn load(doc: InstanceDoc) -> Network {
    Network::from_doc(&doc, NetworkConfig::default()).expect("fixture is valid")
}

/// The butterfly: `t2` wants X1 and `t1` wants X2; `a -> b` is the shared bottleneck.
pub fn butterfly_doc() -> InstanceDoc {
    build(
        &["s1", "s2", "a", "b", "t1", "t2"],
        &[
            ("s1", "a"),
            ("s1", "t1"),
            ("s2", "a"),
            ("s2", "t2"),
            ("a", "b"),
            ("b", "t1"),
            ("b", "t2"),
        ],
        "s1",
        "s2",
        &["t2"],
        &["t1"],
    )
}

pub fn butterfly() -> Network {
    load(butterfly_doc())
}

/// Both sources meet at `v`; a single path `v -> w` must serve an X1 sink and
/// an X2 sink. Unsolvable.
pub fn bottleneck_doc() -> InstanceDoc {
    build(
        &["s1", "s2", "v", "w", "t1", "t2"],
        &[("s1", "v"), ("s2", "v"), ("v", "w"), ("w", "t1"), ("w", "t2")],
        "s1",
        "s2",
        &["t1"],
        &["t2"],
    )
}

pub fn bottleneck() -> Network {
    load(bottleneck_doc())
}

/// Two independent paths `s1 -> t` and `s2 -> u`.
pub fn two_chains() -> Network {
    load(build(
        &["s1", "s2", "t", "u"],
        &[("s1", "t"), ("s2", "u")],
        "s1",
        "s2",
        &["t"],
        &["u"],
    ))
}

/// Both sources feed `v`, which feeds an X1 sink and an X2 sink directly.
pub fn single_coding_point() -> Network {
    load(build(
        &["s1", "s2", "v", "t1", "t2"],
        &[("s1", "v"), ("s2", "v"), ("v", "t1"), ("v", "t2")],
        "s1",
        "s2",
        &["t1"],
        &["t2"],
    ))
}

/// The classic butterfly in which both `t1` and `t2` demand both messages.
pub fn both_demands_butterfly() -> Network {
    let mut doc = butterfly_doc();
    doc.sinks1 = vec!["t1".into(), "t2".into()];
    doc.sinks2 = vec!["t1".into(), "t2".into()];
    load(doc)
}
