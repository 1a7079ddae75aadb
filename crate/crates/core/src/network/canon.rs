use std::collections::{BTreeMap, HashSet};

use super::{validate, Edge, Network, NetworkError, Node, SizeSpec};

/// Rewrites `net` into a simple DAG with every edge sized.
///
/// An unlimited edge becomes a bundle able to carry every message tuple: one
/// fixed edge whose size is the product of the fixed message sizes, plus one
/// default-size edge per default-size message. Each bundle member, and each
/// member of a group of parallel edges, is routed through its own relay node.
/// Solvability is unchanged at every `k`. A broadcast node fed by a bundle of
/// several members loses its flag, since it no longer has in-degree one.
pub fn canonicalize(net: &Network) -> Result<Network, NetworkError> {
    let report = validate(net);
    if !report.ok {
        return Err(NetworkError::Invalid(report));
    }
    if net.is_simple() {
        return Ok(net.clone());
    }

    let mut ids = Ids::new(net);
    let mut out = Network {
        nodes: net.nodes.clone(),
        edges: Vec::with_capacity(net.edges.len()),
        messages: net.messages.clone(),
        sources: net.sources.clone(),
        demands: net.demands.clone(),
    };

    let fixed_product: usize = net
        .messages
        .iter()
        .filter_map(|m| match m {
            SizeSpec::Fixed(s) => Some(*s),
            SizeSpec::Default => None,
        })
        .product();
    let defaults = net.messages.iter().filter(|m| m.is_default()).count();

    // Step 1: materialize unlimited edges as relayed bundles.
    let mut stage = Vec::with_capacity(net.edges.len());
    for e in &net.edges {
        if !e.unlimited {
            stage.push((e.clone(), false));
            continue;
        }
        if defaults > 0 {
            if let Some(n) = out.nodes.iter_mut().find(|n| n.id == e.head) {
                n.broadcast = false;
            }
        }
        let members = std::iter::once(SizeSpec::Fixed(fixed_product))
            .chain(std::iter::repeat_n(SizeSpec::Default, defaults));
        for (j, size) in members.enumerate() {
            let relay = ids.node(&format!("{}#{j}", e.id));
            out.nodes.push(Node { id: relay.clone(), broadcast: false });
            let a = Edge {
                id: ids.edge(&format!("{}#{j}a", e.id)),
                tail: e.tail.clone(),
                head: relay.clone(),
                size,
                unlimited: false,
            };
            let b = Edge {
                id: ids.edge(&format!("{}#{j}b", e.id)),
                tail: relay,
                head: e.head.clone(),
                size,
                unlimited: false,
            };
            // Relay halves are never parallel to anything.
            stage.push((a, true));
            stage.push((b, true));
        }
    }

    // Step 2: split parallel edges.
    let mut multiplicity: BTreeMap<(&str, &str), usize> = BTreeMap::new();
    for (e, _) in &stage {
        *multiplicity.entry((e.tail.as_str(), e.head.as_str())).or_default() += 1;
    }
    let parallel: HashSet<(String, String)> = multiplicity
        .into_iter()
        .filter(|&(_, c)| c > 1)
        .map(|((t, h), _)| (t.to_string(), h.to_string()))
        .collect();

    for (e, relayed) in stage {
        if relayed || !parallel.contains(&(e.tail.clone(), e.head.clone())) {
            out.edges.push(e);
            continue;
        }
        let relay = ids.node(&format!("{}#r", e.id));
        out.nodes.push(Node { id: relay.clone(), broadcast: false });
        out.edges.push(Edge {
            id: ids.edge(&format!("{}#a", e.id)),
            tail: e.tail.clone(),
            head: relay.clone(),
            size: e.size,
            unlimited: false,
        });
        out.edges.push(Edge {
            id: ids.edge(&format!("{}#b", e.id)),
            tail: relay,
            head: e.head,
            size: e.size,
            unlimited: false,
        });
    }

    debug_assert!(out.is_simple());
    Ok(out)
}

/// Fresh-id allocator that never collides with existing ids.
struct Ids {
    nodes: HashSet<String>,
    edges: HashSet<String>,
}

impl Ids {
    fn new(net: &Network) -> Self {
        Ids {
            nodes: net.nodes.iter().map(|n| n.id.clone()).collect(),
            edges: net.edges.iter().map(|e| e.id.clone()).collect(),
        }
    }

    fn node(&mut self, want: &str) -> String {
        fresh(&mut self.nodes, want)
    }

    fn edge(&mut self, want: &str) -> String {
        fresh(&mut self.edges, want)
    }
}

fn fresh(taken: &mut HashSet<String>, want: &str) -> String {
    let mut id = want.to_string();
    while taken.contains(&id) {
        id.push('\'');
    }
    taken.insert(id.clone());
    id
}
