use proptest::prelude::*;

use opencomp::lattice::{law_report, Lattice, Relation, Subset};

fn relation_strategy() -> impl Strategy<Value = Relation> {
    (1usize..=8, 1usize..=8)
        .prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(any::<bool>(), c), r))
        .prop_map(|mut cells| {
            // Force every row and column to be non-empty by adding a diagonal.
            let (r, c) = (cells.len(), cells[0].len());
            for k in 0..r.max(c) {
                cells[k % r][k % c] = true;
            }
            Relation::from_cells(&cells).unwrap()
        })
}

/// Fixed points found by scanning every subset of rows.
fn scan_closed(rel: &Relation) -> Vec<Subset> {
    (0..1u64 << rel.n_rows())
        .map(Subset)
        .filter(|&x| rel.closure(x) == x)
        .collect()
}

proptest! {
    #[test]
    fn closure_is_a_closure_operator(rel in relation_strategy(), a in any::<u64>(), b in any::<u64>()) {
        let mask = rel.all_rows().0;
        let x = Subset(a & mask);
        let y = Subset((a | b) & mask);
        let cx = rel.closure(x);
        prop_assert!(x.is_subset_of(cx));
        prop_assert_eq!(rel.closure(cx), cx);
        prop_assert!(cx.is_subset_of(rel.closure(y)));
    }

    #[test]
    fn approximations_form_a_galois_connection(rel in relation_strategy(), a in any::<u64>(), b in any::<u64>()) {
        let x = Subset(a & rel.all_rows().0);
        let y = Subset(b & rel.all_cols().0);
        prop_assert_eq!(rel.upper_approx(x).is_subset_of(y), x.is_subset_of(rel.lower_approx(y)));
    }

    #[test]
    fn enumeration_matches_subset_scan(rel in relation_strategy()) {
        let lat = Lattice::enumerate(&rel).unwrap();
        prop_assert_eq!(lat.elements().to_vec(), scan_closed(&rel));
        prop_assert_eq!(lat.bottom(), rel.closure(Subset::EMPTY));
        prop_assert_eq!(lat.top(), rel.all_rows());
    }

    #[test]
    fn meet_is_intersection_and_join_is_least_upper_bound(rel in relation_strategy(), i in any::<usize>(), j in any::<usize>()) {
        let lat = Lattice::enumerate(&rel).unwrap();
        let els = lat.elements();
        let (x, y) = (els[i % els.len()], els[j % els.len()]);
        prop_assert_eq!(lat.meet(x, y).unwrap(), x.intersection(y));
        let join = lat.join(x, y).unwrap();
        prop_assert!(x.is_subset_of(join) && y.is_subset_of(join));
        for &z in els {
            if x.is_subset_of(z) && y.is_subset_of(z) {
                prop_assert!(join.is_subset_of(z));
            }
        }
    }

    #[test]
    fn diagonal_relations_give_power_sets(n in 1usize..=6) {
        let lat = Lattice::enumerate(&Relation::diagonal(n).unwrap()).unwrap();
        prop_assert_eq!(lat.len(), 1 << n);
        let report = law_report(&lat).unwrap();
        prop_assert!(report.distributive);
        prop_assert_eq!(report.blocks.len(), 1);
    }
}

#[test]
fn two_block_relation_from_text() {
    let text = "\
# two blocks of four, cross-related
1 0 0 0 1 1 1 1
0 1 0 0 1 1 1 1
0 0 1 0 1 1 1 1
0 0 0 1 1 1 1 1
1 1 1 1 1 0 0 0
1 1 1 1 0 1 0 0
1 1 1 1 0 0 1 0
1 1 1 1 0 0 0 1
";
    let rel = Relation::parse(text).unwrap();
    let lat = Lattice::enumerate(&rel).unwrap();
    assert_eq!(lat.len(), 30);
    assert_eq!(scan_closed(&rel).len(), 30);
    let report = law_report(&lat).unwrap();
    assert!(!report.distributive);
    assert!(report.orthomodular);
    assert_eq!(report.orthocomplement, "found");
    assert_eq!(report.shared, vec![Subset::EMPTY, Subset::full(8)]);
    for block in &report.blocks {
        assert_eq!(block.elements.len(), 16);
    }
}

#[test]
fn parse_rejects_ragged_and_foreign_input() {
    assert!(Relation::parse("1 0\n1\n").is_err());
    assert!(Relation::parse("1 2\n0 1\n").is_err());
    assert!(Relation::parse("").is_err());
}
