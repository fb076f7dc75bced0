//! Distributivity, orthocomplementation, orthomodularity and Boolean blocks.

use serde::Serialize;

use crate::error::LatticeError;

use super::{Lattice, Subset};

/// Law checks are exhaustive over triples, so they are capped.
pub const MAX_LAW_ELEMENTS: usize = 512;

/// Node budget for the orthocomplement search.
const SEARCH_BUDGET: u64 = 2_000_000;

fn guard(lat: &Lattice) -> Result<(), LatticeError> {
    if lat.len() > MAX_LAW_ELEMENTS {
        Err(LatticeError::TooLarge {
            elements: lat.len(),
            max: MAX_LAW_ELEMENTS,
        })
    } else {
        Ok(())
    }
}

/// First triple `(x, y, z)` in element order with
/// `x ^ (y v z) != (x ^ y) v (x ^ z)`, or `None` when distributive.
pub fn check_distributive(lat: &Lattice) -> Result<Option<[Subset; 3]>, LatticeError> {
    guard(lat)?;
    let els = lat.elements();
    for &x in els {
        for &y in els {
            for &z in els {
                let lhs = lat.meet_unchecked(x, lat.join_unchecked(y, z));
                let rhs = lat.join_unchecked(lat.meet_unchecked(x, y), lat.meet_unchecked(x, z));
                if lhs != rhs {
                    return Ok(Some([x, y, z]));
                }
            }
        }
    }
    Ok(None)
}

/// Outcome of the orthomodularity check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Orthomodularity {
    /// `complement[i]` is the orthocomplement of element `i`.
    Orthomodular {
        complement: Vec<Subset>,
    },
    /// Orthocomplementations exist but none is orthomodular. The witness
    /// `(x, y)` has `x <= y` and `y != x v (x' ^ y)` under `complement`.
    Violated {
        complement: Vec<Subset>,
        witness: (Subset, Subset),
    },
    NoOrthocomplement,
    SearchExhausted,
}

impl Orthomodularity {
    pub fn is_orthomodular(&self) -> bool {
        matches!(self, Orthomodularity::Orthomodular { .. })
    }

    pub fn complement(&self) -> Option<&[Subset]> {
        match self {
            Orthomodularity::Orthomodular { complement }
            | Orthomodularity::Violated { complement, .. } => Some(complement),
            _ => None,
        }
    }
}

struct Search<'a> {
    lat: &'a Lattice,
    candidates: Vec<Vec<usize>>,
    assigned: Vec<Option<usize>>,
    nodes: u64,
    first: Option<Vec<usize>>,
    first_witness: Option<(Subset, Subset)>,
    want_orthomodular: bool,
}

enum Step {
    Done(Vec<usize>),
    Continue,
    Exhausted,
}

impl Search<'_> {
    fn leq(&self, a: usize, b: usize) -> bool {
        let els = self.lat.elements();
        els[a].is_subset_of(els[b])
    }

    fn consistent(&self, x: usize, c: usize) -> bool {
        if x == c {
            return false;
        }
        if self.assigned[c].is_some_and(|v| v != x) {
            return false;
        }
        for (y, z) in self.assigned.iter().enumerate() {
            let Some(z) = *z else { continue };
            for (a, b) in [(x, c), (c, x)] {
                if self.leq(a, y) && !self.leq(z, b) {
                    return false;
                }
                if self.leq(y, a) && !self.leq(b, z) {
                    return false;
                }
            }
        }
        true
    }

    fn run(&mut self) -> Step {
        self.nodes += 1;
        if self.nodes > SEARCH_BUDGET {
            return Step::Exhausted;
        }
        // Most constrained unassigned element first.
        let mut best: Option<(usize, Vec<usize>)> = None;
        for x in 0..self.assigned.len() {
            if self.assigned[x].is_some() {
                continue;
            }
            let opts: Vec<usize> = self.candidates[x]
                .iter()
                .copied()
                .filter(|&c| self.consistent(x, c))
                .collect();
            if opts.is_empty() {
                return Step::Continue;
            }
            if best.as_ref().is_none_or(|(_, b)| opts.len() < b.len()) {
                best = Some((x, opts));
            }
        }
        let Some((x, opts)) = best else {
            let map: Vec<usize> = self.assigned.iter().map(|v| v.expect("complete")).collect();
            let witness = orthomodular_witness(self.lat, &map);
            if self.first.is_none() {
                self.first = Some(map.clone());
                self.first_witness = witness;
            }
            if witness.is_none() || !self.want_orthomodular {
                return Step::Done(map);
            }
            return Step::Continue;
        };
        for c in opts {
            self.assigned[x] = Some(c);
            self.assigned[c] = Some(x);
            match self.run() {
                Step::Continue => {}
                other => return other,
            }
            self.assigned[x] = None;
            self.assigned[c] = None;
        }
        Step::Continue
    }
}

fn orthomodular_witness(lat: &Lattice, comp: &[usize]) -> Option<(Subset, Subset)> {
    let els = lat.elements();
    for (i, &x) in els.iter().enumerate() {
        let xc = els[comp[i]];
        for &y in els {
            if x != y && x.is_subset_of(y) && lat.join_unchecked(x, lat.meet_unchecked(xc, y)) != y
            {
                return Some((x, y));
            }
        }
    }
    None
}

fn search(
    lat: &Lattice,
    want_orthomodular: bool,
) -> Result<(Option<Vec<usize>>, Search<'_>, bool), LatticeError> {
    guard(lat)?;
    let els = lat.elements();
    let candidates = els
        .iter()
        .map(|&x| {
            let mut c: Vec<usize> = lat
                .complements_unchecked(x)
                .into_iter()
                .filter_map(|c| lat.index_of(c))
                .collect();
            // Disjoint, larger complements tend to be the natural choice.
            c.sort_by_key(|&i| {
                (
                    !els[i].intersection(x).is_empty(),
                    usize::MAX - els[i].len(),
                    i,
                )
            });
            c
        })
        .collect();
    let mut s = Search {
        lat,
        candidates,
        assigned: vec![None; els.len()],
        nodes: 0,
        first: None,
        first_witness: None,
        want_orthomodular,
    };
    let (found, exhausted) = match s.run() {
        Step::Done(map) => (Some(map), false),
        Step::Continue => (None, false),
        Step::Exhausted => (None, true),
    };
    Ok((found, s, exhausted))
}

/// Some involutive, order-reversing complementation, indexed like
/// `lat.elements()`.
pub fn find_orthocomplement(lat: &Lattice) -> Result<Option<Vec<Subset>>, LatticeError> {
    let (found, _, _) = search(lat, false)?;
    Ok(found.map(|m| m.iter().map(|&i| lat.elements()[i]).collect()))
}

/// Searches every orthocomplementation for one satisfying the orthomodular
/// law `x <= y  =>  y = x v (x' ^ y)`.
pub fn check_orthomodular(lat: &Lattice) -> Result<Orthomodularity, LatticeError> {
    let (found, s, exhausted) = search(lat, true)?;
    let to_subsets = |m: &[usize]| m.iter().map(|&i| lat.elements()[i]).collect::<Vec<_>>();
    Ok(match (found, s.first, s.first_witness) {
        (Some(m), _, _) => Orthomodularity::Orthomodular {
            complement: to_subsets(&m),
        },
        (None, _, _) if exhausted => Orthomodularity::SearchExhausted,
        (None, Some(first), Some(witness)) => Orthomodularity::Violated {
            complement: to_subsets(&first),
            witness,
        },
        _ => Orthomodularity::NoOrthocomplement,
    })
}

/// A Boolean subalgebra generated by pairwise orthogonal atoms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BooleanBlock {
    pub atoms: Vec<Subset>,
    pub elements: Vec<Subset>,
}

/// Maximal Boolean blocks under the orthocomplement `comp` (indexed like
/// `lat.elements()`).
///
/// Blocks are generated by maximal sets of pairwise orthogonal atoms whose
/// joins form a Boolean algebra with the same bottom and top that is closed
/// under `comp`.
pub fn boolean_blocks(lat: &Lattice, comp: &[Subset]) -> Vec<BooleanBlock> {
    let atoms = lat.atoms();
    let prime = |x: Subset| comp[lat.index_of(x).expect("element")];
    let k = atoms.len();
    let adj: Vec<Vec<bool>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| i != j && atoms[i].is_subset_of(prime(atoms[j])))
                .collect()
        })
        .collect();

    let mut cliques = Vec::new();
    bron_kerbosch(&adj, Vec::new(), (0..k).collect(), Vec::new(), &mut cliques);

    let max_bits = usize::BITS - lat.len().leading_zeros();
    let mut blocks: Vec<BooleanBlock> = cliques
        .into_iter()
        .filter(|c| c.len() as u32 <= max_bits)
        .filter_map(|c| {
            let mut gens: Vec<Subset> = c.iter().map(|&i| atoms[i]).collect();
            gens.sort();
            let n = gens.len();
            let join_of = |mask: usize| {
                (0..n)
                    .filter(|b| mask >> b & 1 == 1)
                    .fold(lat.bottom(), |acc, b| lat.join_unchecked(acc, gens[b]))
            };
            let full = (1usize << n) - 1;
            let image: Vec<Subset> = (0..=full).map(join_of).collect();
            if image[full] != lat.top() {
                return None;
            }
            let mut sorted = image.clone();
            sorted.sort();
            sorted.dedup();
            if sorted.len() != image.len() {
                return None;
            }
            for a in 0..=full {
                if prime(image[a]) != image[full & !a] {
                    return None;
                }
                for b in 0..=full {
                    if lat.meet_unchecked(image[a], image[b]) != image[a & b] {
                        return None;
                    }
                }
            }
            Some(BooleanBlock {
                atoms: gens,
                elements: sorted,
            })
        })
        .collect();
    blocks.sort_by(|a, b| a.atoms.cmp(&b.atoms));
    blocks
}

fn bron_kerbosch(
    adj: &[Vec<bool>],
    r: Vec<usize>,
    mut p: Vec<usize>,
    mut x: Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if p.is_empty() && x.is_empty() {
        out.push(r);
        return;
    }
    let pivot = p
        .iter()
        .chain(&x)
        .copied()
        .max_by_key(|&u| p.iter().filter(|&&v| adj[u][v]).count());
    let pivot = pivot.expect("p or x is non-empty");
    let branch: Vec<usize> = p.iter().copied().filter(|&v| !adj[pivot][v]).collect();
    for v in branch {
        let mut r2 = r.clone();
        r2.push(v);
        let p2 = p.iter().copied().filter(|&u| adj[v][u]).collect();
        let x2 = x.iter().copied().filter(|&u| adj[v][u]).collect();
        bron_kerbosch(adj, r2, p2, x2, out);
        p.retain(|&u| u != v);
        x.push(v);
    }
}

/// Elements belonging to at least two blocks, in bitmask order.
pub fn shared_elements(blocks: &[BooleanBlock]) -> Vec<Subset> {
    let mut all: Vec<Subset> = blocks
        .iter()
        .flat_map(|b| b.elements.iter().copied())
        .collect();
    all.sort();
    let mut shared: Vec<Subset> = all
        .windows(2)
        .filter(|w| w[0] == w[1])
        .map(|w| w[0])
        .collect();
    shared.dedup();
    shared
}

/// Everything the `laws.json` artifact reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LawReport {
    pub elements: usize,
    pub distributive: bool,
    /// Violating triple `(x, y, z)` when not distributive.
    pub witness: Option<[Subset; 3]>,
    pub blocks: Vec<BooleanBlock>,
    pub shared: Vec<Subset>,
    pub orthomodular: bool,
    /// `found`, `violated`, `none` or `search_exhausted`.
    pub orthocomplement: &'static str,
    pub orthomodular_witness: Option<(Subset, Subset)>,
    /// Pairs `(x, x')` of the orthocomplement used, when one exists.
    pub complement_map: Vec<(Subset, Subset)>,
}

pub fn law_report(lat: &Lattice) -> Result<LawReport, LatticeError> {
    let witness = check_distributive(lat)?;
    let om = check_orthomodular(lat)?;
    let (status, om_witness) = match &om {
        Orthomodularity::Orthomodular { .. } => ("found", None),
        Orthomodularity::Violated { witness, .. } => ("violated", Some(*witness)),
        Orthomodularity::NoOrthocomplement => ("none", None),
        Orthomodularity::SearchExhausted => ("search_exhausted", None),
    };
    let (blocks, complement_map) = match om.complement() {
        Some(comp) => (
            boolean_blocks(lat, comp),
            lat.elements()
                .iter()
                .copied()
                .zip(comp.iter().copied())
                .collect(),
        ),
        None => (Vec::new(), Vec::new()),
    };
    Ok(LawReport {
        elements: lat.len(),
        distributive: witness.is_none(),
        witness,
        shared: shared_elements(&blocks),
        blocks,
        orthomodular: om.is_orthomodular(),
        orthocomplement: status,
        orthomodular_witness: om_witness,
        complement_map,
    })
}
