use std::collections::HashMap;

use crate::error::LatticeError;

use super::{Relation, Subset};

/// Row limit for exhaustive fixed-point enumeration.
pub const MAX_ENUM_ROWS: usize = 20;

/// Finite lattice of subsets ordered by inclusion.
///
/// Meets and joins are the greatest element below the intersection and the
/// least element above the union. For a lattice enumerated from a relation
/// the meet is the plain intersection and the join is the closure of the
/// union.
#[derive(Debug, Clone)]
pub struct Lattice {
    universe: usize,
    elements: Vec<Subset>,
    index: HashMap<Subset, usize>,
    relation: Option<Relation>,
}

impl Lattice {
    /// All fixed points of the closure of `rel`, sorted by bitmask.
    pub fn enumerate(rel: &Relation) -> Result<Self, LatticeError> {
        let n = rel.n_rows();
        if n > MAX_ENUM_ROWS {
            return Err(LatticeError::Capacity {
                rows: n,
                max: MAX_ENUM_ROWS,
            });
        }
        let elements: Vec<Subset> = (0u64..1 << n)
            .map(Subset)
            .filter(|&x| rel.closure(x) == x)
            .collect();
        Ok(Lattice::build(n, elements, Some(rel.clone())))
    }

    /// Lattice from an explicit family of subsets of `universe` classes.
    /// Fails unless every pair has a meet and a join inside the family.
    pub fn from_family(universe: usize, family: &[Subset]) -> Result<Self, LatticeError> {
        let full = Subset::full(universe);
        if let Some(x) = family.iter().find(|x| !x.is_subset_of(full)) {
            return Err(LatticeError::NotAnElement(format!(
                "{x} is outside a universe of {universe} classes"
            )));
        }
        let mut elements = family.to_vec();
        elements.sort();
        elements.dedup();
        if elements.is_empty() {
            return Err(LatticeError::NotAnElement("family is empty".into()));
        }
        let lat = Lattice::build(universe, elements, None);
        for &x in &lat.elements {
            for &y in &lat.elements {
                if lat.search_meet(x, y).is_none() || lat.search_join(x, y).is_none() {
                    return Err(LatticeError::NotAnElement(format!(
                        "{x} and {y} lack a unique meet or join"
                    )));
                }
            }
        }
        Ok(lat)
    }

    fn build(universe: usize, elements: Vec<Subset>, relation: Option<Relation>) -> Self {
        let index = elements.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        Lattice {
            universe,
            elements,
            index,
            relation,
        }
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn relation(&self) -> Option<&Relation> {
        self.relation.as_ref()
    }

    /// Elements in increasing bitmask order.
    pub fn elements(&self) -> &[Subset] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, x: Subset) -> bool {
        self.index.contains_key(&x)
    }

    pub fn index_of(&self, x: Subset) -> Option<usize> {
        self.index.get(&x).copied()
    }

    pub fn bottom(&self) -> Subset {
        self.elements[0]
    }

    pub fn top(&self) -> Subset {
        *self.elements.last().expect("lattice is never empty")
    }

    fn check(&self, x: Subset) -> Result<(), LatticeError> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(LatticeError::NotAnElement(x.to_string()))
        }
    }

    pub fn meet(&self, x: Subset, y: Subset) -> Result<Subset, LatticeError> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.meet_unchecked(x, y))
    }

    pub fn join(&self, x: Subset, y: Subset) -> Result<Subset, LatticeError> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.join_unchecked(x, y))
    }

    pub(crate) fn meet_unchecked(&self, x: Subset, y: Subset) -> Subset {
        let m = x.intersection(y);
        if self.contains(m) {
            return m;
        }
        self.search_meet(x, y).expect("validated lattice")
    }

    pub(crate) fn join_unchecked(&self, x: Subset, y: Subset) -> Subset {
        let u = x.union(y);
        if let Some(rel) = &self.relation {
            return rel.closure(u);
        }
        if self.contains(u) {
            return u;
        }
        self.search_join(x, y).expect("validated lattice")
    }

    fn search_meet(&self, x: Subset, y: Subset) -> Option<Subset> {
        let m = x.intersection(y);
        let below: Vec<Subset> = self
            .elements
            .iter()
            .copied()
            .filter(|e| e.is_subset_of(m))
            .collect();
        below
            .iter()
            .copied()
            .find(|&c| below.iter().all(|e| e.is_subset_of(c)))
    }

    fn search_join(&self, x: Subset, y: Subset) -> Option<Subset> {
        let u = x.union(y);
        let above: Vec<Subset> = self
            .elements
            .iter()
            .copied()
            .filter(|e| u.is_subset_of(*e))
            .collect();
        above
            .iter()
            .copied()
            .find(|&c| above.iter().all(|e| c.is_subset_of(*e)))
    }

    /// Covering pairs `(lower, upper)` as element indices.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let mut by_size: Vec<usize> = (0..self.len()).collect();
        by_size.sort_by_key(|&i| (self.elements[i].len(), self.elements[i]));
        let mut out = Vec::new();
        for &i in &by_size {
            let x = self.elements[i];
            let mut found: Vec<Subset> = Vec::new();
            for &j in &by_size {
                let y = self.elements[j];
                if y == x || !x.is_subset_of(y) {
                    continue;
                }
                if found.iter().all(|c| !c.is_subset_of(y)) {
                    found.push(y);
                    out.push((i, j));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Elements covering the bottom.
    pub fn atoms(&self) -> Vec<Subset> {
        let bottom = self.bottom();
        let above: Vec<Subset> = self
            .elements
            .iter()
            .copied()
            .filter(|&e| e != bottom)
            .collect();
        above
            .iter()
            .copied()
            .filter(|&a| above.iter().all(|&e| e == a || !e.is_subset_of(a)))
            .collect()
    }

    /// Length of the longest chain from the bottom to each element.
    pub fn heights(&self) -> Vec<usize> {
        let covers = self.covers();
        let mut height = vec![0usize; self.len()];
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&i| self.elements[i].len());
        let mut up: Vec<Vec<usize>> = vec![Vec::new(); self.len()];
        for &(lo, hi) in &covers {
            up[lo].push(hi);
        }
        for &i in &order {
            for &j in &up[i] {
                height[j] = height[j].max(height[i] + 1);
            }
        }
        height
    }

    /// Every `c` with `x ^ c = bottom` and `x v c = top`.
    pub fn complements(&self, x: Subset) -> Result<Vec<Subset>, LatticeError> {
        self.check(x)?;
        Ok(self.complements_unchecked(x))
    }

    pub(crate) fn complements_unchecked(&self, x: Subset) -> Vec<Subset> {
        let (bottom, top) = (self.bottom(), self.top());
        self.elements
            .iter()
            .copied()
            .filter(|&c| self.meet_unchecked(x, c) == bottom && self.join_unchecked(x, c) == top)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::super::build_block_relation;
    use super::*;

    fn s(idx: &[usize]) -> Subset {
        Subset::from_indices(idx.iter().map(|i| i - 1))
    }

    #[test]
    fn diagonal_gives_the_power_set() {
        let lat = Lattice::enumerate(&Relation::diagonal(3).unwrap()).unwrap();
        assert_eq!(lat.len(), 8);
        assert_eq!(
            lat.elements().iter().map(|e| e.0).collect::<Vec<_>>(),
            (0..8).collect::<Vec<_>>()
        );
        assert_eq!(lat.covers().len(), 12);
        assert_eq!(lat.atoms().len(), 3);
    }

    #[test]
    fn capacity_limit() {
        let r = Relation::diagonal(21).unwrap();
        assert_eq!(
            Lattice::enumerate(&r).unwrap_err(),
            LatticeError::Capacity { rows: 21, max: 20 }
        );
    }

    #[test]
    fn two_filled_blocks_have_thirty_elements() {
        let rel = build_block_relation(&[4, 4], &[], true).unwrap();
        let lat = Lattice::enumerate(&rel).unwrap();
        assert_eq!(lat.len(), 30);
        assert_eq!(lat.bottom(), Subset::EMPTY);
        assert_eq!(lat.top(), rel.all_rows());
        assert_eq!(lat.atoms().len(), 8);
    }

    #[test]
    fn meet_and_join_on_worked_example() {
        let rel = build_block_relation(&[3, 3, 2], &[3], true).unwrap();
        let lat = Lattice::enumerate(&rel).unwrap();
        assert_eq!(lat.join(s(&[1]), s(&[2])).unwrap(), s(&[1, 2, 4, 5]));
        assert_eq!(lat.join(s(&[1]), s(&[6])).unwrap(), rel.all_rows());
        assert_eq!(lat.meet(s(&[1, 2, 4, 5]), s(&[1])).unwrap(), s(&[1]));
        assert!(matches!(
            lat.meet(s(&[1, 2]), s(&[1])),
            Err(LatticeError::NotAnElement(_))
        ));
    }

    #[test]
    fn complements_in_block() {
        let rel = build_block_relation(&[3, 3, 2], &[3], true).unwrap();
        let lat = Lattice::enumerate(&rel).unwrap();
        let comps = lat.complements(s(&[3])).unwrap();
        assert!(comps.contains(&s(&[1, 2, 4, 5])));
        assert!(comps
            .iter()
            .all(|&c| lat.meet(c, s(&[3])).unwrap() == Subset::EMPTY));
    }

    #[test]
    fn family_rejects_non_lattices() {
        // Two incomparable maximal elements and no top.
        let fam = [Subset::EMPTY, s(&[1]), s(&[2])];
        assert!(Lattice::from_family(2, &fam).is_err());
        let ok = [Subset::EMPTY, s(&[1]), s(&[2]), s(&[1, 2])];
        assert_eq!(Lattice::from_family(2, &ok).unwrap().len(), 4);
    }

    #[test]
    fn family_meets_need_not_be_intersections() {
        // Pentagon N5: 0 < a < b < 1 and 0 < c < 1.
        let fam = [Subset::EMPTY, s(&[1]), s(&[1, 2]), s(&[3]), s(&[1, 2, 3])];
        let lat = Lattice::from_family(3, &fam).unwrap();
        assert_eq!(lat.join(s(&[1]), s(&[3])).unwrap(), s(&[1, 2, 3]));
        assert_eq!(lat.meet(s(&[1, 2]), s(&[3])).unwrap(), Subset::EMPTY);
        assert_eq!(lat.heights()[lat.index_of(s(&[1, 2, 3])).unwrap()], 3);
    }
}
