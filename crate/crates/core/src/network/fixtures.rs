//! Small reference networks used by tests, benches and the CLI examples.

use super::{Network, SizeSpec};

/// The butterfly network: a source `s` holding two binary messages, two
/// sinks `t1`, `t2` each demanding both, and a single bottleneck `c -> d`.
/// All nine edges have the default size.
pub fn butterfly() -> Network {
    let mut net = Network::new();
    let m1 = net.add_message(SizeSpec::Fixed(2));
    let m2 = net.add_message(SizeSpec::Fixed(2));
    for n in ["s", "a", "b", "c", "d", "t1", "t2"] {
        net.add_node(n);
    }
    for (id, t, h) in [
        ("s-a", "s", "a"),
        ("s-b", "s", "b"),
        ("a-c", "a", "c"),
        ("b-c", "b", "c"),
        ("c-d", "c", "d"),
        ("a-t1", "a", "t1"),
        ("b-t2", "b", "t2"),
        ("d-t1", "d", "t1"),
        ("d-t2", "d", "t2"),
    ] {
        net.add_edge(id, t, h, SizeSpec::Default);
    }
    net.add_source("s", m1).add_source("s", m2);
    for t in ["t1", "t2"] {
        net.add_demand(t, m1).add_demand(t, m2);
    }
    net
}

/// A size-3 message relayed over a single size-2 edge. Unsolvable at every k.
pub fn pigeonhole() -> Network {
    let mut net = Network::new();
    let m = net.add_message(SizeSpec::Fixed(3));
    net.add_node("src").add_node("dst");
    net.add_edge("e", "src", "dst", SizeSpec::Fixed(2));
    net.add_source("src", m).add_demand("dst", m);
    net
}
