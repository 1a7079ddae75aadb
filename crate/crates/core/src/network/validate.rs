use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use super::{kahn, Network, SizeSpec};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub rule: String,
    pub element: String,
}

impl Violation {
    pub fn new(rule: &str, element: impl Into<String>) -> Self {
        Violation { rule: rule.to_string(), element: element.into() }
    }
}

/// Outcome of a structural or semantic check. `ok` iff `violations` is empty.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn from_violations(violations: Vec<Violation>) -> Self {
        ValidationReport { ok: violations.is_empty(), violations }
    }

    pub fn has_rule(&self, rule: &str) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok {
            return f.write_str("ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{} at {}", v.rule, v.element)?;
        }
        Ok(())
    }
}

/// Structural checks: ids, endpoints, message indices, sizes, acyclicity,
/// broadcast-node shape and demand reachability.
pub fn validate(net: &Network) -> ValidationReport {
    let mut out = Vec::new();
    let l = net.messages.len();

    let mut node_ids = BTreeSet::new();
    for n in &net.nodes {
        if !node_ids.insert(n.id.as_str()) {
            out.push(Violation::new("duplicate_node", &n.id));
        }
    }
    let mut edge_ids = BTreeSet::new();
    let mut endpoints_ok = true;
    for e in &net.edges {
        if !edge_ids.insert(e.id.as_str()) {
            out.push(Violation::new("duplicate_edge", &e.id));
        }
        for end in [&e.tail, &e.head] {
            if !node_ids.contains(end.as_str()) {
                out.push(Violation::new("unknown_endpoint", format!("{} ({end})", e.id)));
                endpoints_ok = false;
            }
        }
        if !e.unlimited && e.size == SizeSpec::Fixed(0) {
            out.push(Violation::new("zero_size", &e.id));
        }
    }
    for (i, m) in net.messages.iter().enumerate() {
        if *m == SizeSpec::Fixed(0) {
            out.push(Violation::new("zero_size", format!("message {}", i + 1)));
        }
    }
    for (kind, map) in [("sources", &net.sources), ("demands", &net.demands)] {
        for (node, set) in map {
            if !node_ids.contains(node.as_str()) {
                out.push(Violation::new("unknown_node", format!("{kind}[{node}]")));
            }
            for &m in set {
                if m == 0 || m > l {
                    out.push(Violation::new("message_index", format!("{kind}[{node}] = {m}")));
                }
            }
        }
    }

    if endpoints_ok && kahn(net).is_none() {
        out.push(Violation::new("cycle", cycle_witness(net)));
    }

    let mut indeg: HashMap<&str, usize> = HashMap::new();
    for e in &net.edges {
        *indeg.entry(e.head.as_str()).or_default() += 1;
    }
    for n in &net.nodes {
        let d = indeg.get(n.id.as_str()).copied().unwrap_or(0);
        if n.broadcast
            && (d != 1 || net.sources_of(&n.id).next().is_some() || net.demands_of(&n.id).next().is_some())
        {
            out.push(Violation::new("broadcast_shape", &n.id));
        }
        if d == 0 {
            let sources: BTreeSet<usize> = net.sources_of(&n.id).collect();
            if net.demands_of(&n.id).any(|m| !sources.contains(&m)) {
                out.push(Violation::new("undecodable_demand", &n.id));
            }
        }
    }

    ValidationReport::from_violations(out)
}

/// Names the nodes left over after peeling every acyclic part.
fn cycle_witness(net: &Network) -> String {
    let mut alive: BTreeSet<&str> = net.nodes.iter().map(|n| n.id.as_str()).collect();
    loop {
        let has_in: BTreeSet<&str> = net
            .edges
            .iter()
            .filter(|e| alive.contains(e.tail.as_str()) && alive.contains(e.head.as_str()))
            .map(|e| e.head.as_str())
            .collect();
        let before = alive.len();
        alive.retain(|n| has_in.contains(n));
        if alive.len() == before {
            break;
        }
    }
    alive.into_iter().collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_network_is_valid() {
        assert!(validate(&Network::new()).ok);
    }

    #[test]
    fn single_edge_relay_is_valid() {
        let mut net = Network::new();
        let m = net.add_message(SizeSpec::Fixed(2));
        net.add_node("u").add_node("v");
        net.add_edge("e", "u", "v", SizeSpec::Fixed(2));
        net.add_source("u", m).add_demand("v", m);
        let r = validate(&net);
        assert!(r.ok, "{r}");
    }

    #[test]
    fn two_cycle_reported() {
        let mut net = Network::new();
        net.add_node("u").add_node("v");
        net.add_edge("a", "u", "v", SizeSpec::Default).add_edge("b", "v", "u", SizeSpec::Default);
        let r = validate(&net);
        assert!(!r.ok);
        assert!(r.has_rule("cycle"));
        assert_eq!(r.violations[0].element, "u,v");
    }

    #[test]
    fn broadcast_and_index_rules() {
        let mut net = Network::new();
        net.add_message(SizeSpec::Fixed(2));
        net.add_broadcast("b").add_node("v");
        net.add_demand("v", 1).add_source("v", 3);
        let r = validate(&net);
        assert!(r.has_rule("broadcast_shape"));
        assert!(r.has_rule("message_index"));
        assert!(r.has_rule("undecodable_demand"));
        assert_eq!(r.ok, r.violations.is_empty());
    }

    #[test]
    fn unknown_endpoint_and_duplicates() {
        let mut net = Network::new();
        net.add_node("a").add_node("a");
        net.add_edge("e", "a", "zz", SizeSpec::Fixed(0));
        let r = validate(&net);
        for rule in ["duplicate_node", "unknown_endpoint", "zero_size"] {
            assert!(r.has_rule(rule), "missing {rule}: {r}");
        }
    }
}
