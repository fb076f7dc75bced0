use std::collections::BTreeMap;
use std::fmt::Write;

use super::Lattice;

/// Graphviz Hasse diagram, bottom at rank 0, one edge per covering pair.
pub fn to_dot(lat: &Lattice) -> String {
    let heights = lat.heights();
    let mut out = String::from(
        "digraph lattice {\n  rankdir=BT;\n  node [shape=box, fontname=\"Helvetica\"];\n",
    );
    for (i, x) in lat.elements().iter().enumerate() {
        let _ = writeln!(out, "  n{i} [label=\"{x}\"];");
    }
    let mut ranks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &h) in heights.iter().enumerate() {
        ranks.entry(h).or_default().push(i);
    }
    for (h, ids) in &ranks {
        let names: Vec<String> = ids.iter().map(|i| format!("n{i}")).collect();
        let _ = writeln!(out, "  {{ rank=same; {}; }} // rank {h}", names.join("; "));
    }
    for (lo, hi) in lat.covers() {
        let _ = writeln!(out, "  n{lo} -> n{hi};");
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::super::Relation;
    use super::*;

    #[test]
    fn square_diagram() {
        let lat = Lattice::enumerate(&Relation::diagonal(2).unwrap()).unwrap();
        let dot = to_dot(&lat);
        assert!(dot.starts_with("digraph lattice {"));
        assert!(dot.contains("n0 [label=\"{}\"]"));
        assert!(dot.contains("n3 [label=\"{A1,A2}\"]"));
        assert_eq!(dot.matches("->").count(), 4);
        assert!(dot.contains("rank=same; n1; n2; } // rank 1"));
    }
}
