//! Rough-set approximations over a relation and the lattice of their fixed
//! points.

mod dot;
mod laws;
mod order;
mod relation;

use std::fmt;

use serde::{Serialize, Serializer};

pub use dot::to_dot;
pub use laws::{
    boolean_blocks, check_distributive, check_orthomodular, find_orthocomplement, law_report,
    shared_elements, BooleanBlock, LawReport, Orthomodularity, MAX_LAW_ELEMENTS,
};
pub use order::{Lattice, MAX_ENUM_ROWS};
pub use relation::{build_block_relation, parse_generator_spec, Relation, MAX_SIDE};

/// Set of class indices, bit `i` standing for class `i + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Subset(pub u64);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn full(n: usize) -> Subset {
        if n >= 64 {
            Subset(u64::MAX)
        } else {
            Subset((1u64 << n) - 1)
        }
    }

    /// From zero-based indices.
    pub fn from_indices(idx: impl IntoIterator<Item = usize>) -> Subset {
        Subset(idx.into_iter().fold(0, |acc, i| acc | 1 << i))
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn intersection(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    /// Zero-based indices in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(i)
        })
    }

    /// Label such as `{A1,A3}` using `prefix` for the class name.
    pub fn label(self, prefix: &str) -> String {
        let names: Vec<String> = self.iter().map(|i| format!("{prefix}{}", i + 1)).collect();
        format!("{{{}}}", names.join(","))
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label("A"))
    }
}

impl Serialize for Subset {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels() {
        assert_eq!(Subset::EMPTY.to_string(), "{}");
        assert_eq!(Subset::from_indices([0, 1]).to_string(), "{A1,A2}");
        assert_eq!(Subset::from_indices([2]).label("a"), "{a3}");
    }

    #[test]
    fn set_algebra() {
        let a = Subset::from_indices([0, 2]);
        let b = Subset::from_indices([2, 3]);
        assert_eq!(a.union(b).iter().collect::<Vec<_>>(), vec![0, 2, 3]);
        assert_eq!(a.intersection(b), Subset::from_indices([2]));
        assert!(Subset::from_indices([2]).is_subset_of(a));
        assert!(!a.is_subset_of(b));
        assert_eq!(Subset::full(3).len(), 3);
        assert_eq!(Subset::full(64).len(), 64);
    }
}
