use std::fmt::Write;

use super::{Network, SizeSpec};

/// Graphviz rendering. Edge labels are the size (`k` for default size,
/// empty for unlimited edges); broadcast nodes are drawn filled; nodes with
/// sources or demands list them in the label.
pub fn to_dot(net: &Network) -> String {
    let mut s = String::from("digraph network {\n  rankdir=TB;\n");
    for n in &net.nodes {
        let mut label = n.id.clone();
        let a: Vec<String> = net.sources_of(&n.id).map(|m| format!("M{m}")).collect();
        let b: Vec<String> = net.demands_of(&n.id).map(|m| format!("M{m}")).collect();
        if !a.is_empty() {
            let _ = write!(label, "\\nhas {}", a.join(","));
        }
        if !b.is_empty() {
            let _ = write!(label, "\\nwants {}", b.join(","));
        }
        if n.broadcast {
            let _ = writeln!(
                s,
                "  \"{}\" [label=\"\", shape=point, style=filled, xlabel=\"{}\"];",
                esc(&n.id),
                esc(&n.id)
            );
        } else {
            let _ = writeln!(s, "  \"{}\" [label=\"{}\", shape=circle];", esc(&n.id), esc(&label));
        }
    }
    for e in &net.edges {
        let label = match (e.unlimited, e.size) {
            (true, _) => String::new(),
            (false, SizeSpec::Default) => "k".to_string(),
            (false, SizeSpec::Fixed(v)) => v.to_string(),
        };
        let _ = writeln!(s, "  \"{}\" -> \"{}\" [label=\"{}\"];", esc(&e.tail), esc(&e.head), label);
    }
    s.push_str("}\n");
    s
}

fn esc(s: &str) -> String {
    s.replace('"', "\\\"")
}
