use std::fmt::Write;

use super::{History, Unit};

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering: EDUs as ellipses, CDUs as boxes with dashed membership
/// edges, relations as labeled edges.
pub fn to_dot(h: &History, name: &str) -> String {
    let mut out = String::new();
    writeln!(out, "digraph \"{}\" {{", escape(name)).unwrap();
    for unit in &h.units {
        match unit {
            Unit::Edu(e) => {
                let label = if e.label.is_empty() { e.id.clone() } else { format!("{}: {}", e.id, e.label) };
                writeln!(out, "  \"{}\" [shape=ellipse, label=\"{}\"];", escape(&e.id), escape(&label)).unwrap();
            }
            Unit::Cdu(c) => {
                writeln!(out, "  \"{}\" [shape=box];", escape(&c.id)).unwrap();
                for m in &c.members {
                    writeln!(out, "  \"{}\" -> \"{}\" [style=dashed, arrowhead=none];", escape(&c.id), escape(m))
                        .unwrap();
                }
            }
        }
    }
    for rel in &h.relations {
        writeln!(
            out,
            "  \"{}\" -> \"{}\" [label=\"{}\"];",
            escape(&rel.source),
            escape(&rel.target),
            rel.relation
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discourse::{Edu, RelationInstance, RelationName};
    use crate::Player;

    #[test]
    fn renders_nodes_and_labeled_edges() {
        let h = History::new(
            vec![Edu::new("a", Player::Zero, &[]).into(), Edu::new("b", Player::One, &[]).into()],
            vec![RelationInstance::new(RelationName::Iqap, "a", "b")],
        );
        let dot = to_dot(&h, "h");
        assert!(dot.starts_with("digraph \"h\" {"));
        assert!(dot.contains("\"a\" -> \"b\" [label=\"iqap\"];"));
        assert!(dot.trim_end().ends_with('}'));
    }
}
