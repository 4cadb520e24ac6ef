//! DOT export of the incidence poset.

use std::fmt::Write;

use crate::space::PresentedSpace;
use crate::unbend::DesingMap;

/// Renders the incidence poset as a DOT digraph: one node per stratum,
/// one edge per cover relation, edges pointing from lower to higher
/// strata. With a projection record, nodes are annotated with their
/// provenance tags.
pub fn export_dot(space: &PresentedSpace, desing: Option<&DesingMap>) -> String {
    let mut out = String::new();
    out.push_str("digraph incidence {\n");
    out.push_str("  rankdir = BT;\n");
    out.push_str("  node [shape = box];\n");
    let quote = |text: &str| text.replace('\\', "\\\\").replace('"', "\\\"");
    let ids: Vec<_> = space.poset.ids().collect();
    for (k, id) in ids.iter().enumerate() {
        let stratum = space.poset.stratum(id).unwrap();
        let mut label = format!("{} (dim {})\\n{}", quote(&stratum.label), stratum.dim, id);
        if let Some(desing) = desing {
            if let Some(pieces) = desing.provenance.get(id) {
                for (target, tag) in pieces {
                    let tag = match tag {
                        crate::unbend::ProvTag::Copy(sign) => format!("copy{sign}"),
                        crate::unbend::ProvTag::Fiber(r) => format!("fiber({r})"),
                        crate::unbend::ProvTag::Iso => "iso".to_string(),
                    };
                    write!(label, "\\nover {target} [{tag}]").expect("writes to string");
                }
            }
        }
        writeln!(out, "  n{k} [label=\"{label}\"];").expect("writes to string");
    }
    let index = |needle: &crate::id::StratumId| ids.iter().position(|i| *i == needle).unwrap();
    let mut covers = space.poset.covers();
    covers.sort();
    for (a, b) in covers {
        writeln!(out, "  n{} -> n{};", index(&a), index(&b)).expect("writes to string");
    }
    out.push_str("}\n");
    out
}
