//! Molecule-level cluster/activity dynamics.
//!
//! The state keeps two mirrored views: per molecule (`m0` = cluster index,
//! `m1` = activity) and per cluster (`c0` = size, `c1` = active count,
//! `cl` = ordered membership list). Indices are zero-based; cluster `n`
//! here is cluster `n + 1` in one-based notation.
//!
//! One step runs, in order: a merge attempt, a split attempt, the boundary
//! rules, per-molecule noise, and (when enabled) the interplay kick followed
//! by a second boundary check.

use std::fmt;

use rand::distributions::{Bernoulli, Distribution};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::ConfigError;
use crate::interplay::{self, InterplayOutcome};
use crate::params::SimParams;

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub t: u64,
    /// Cluster index of each molecule.
    pub m0: Vec<usize>,
    /// Activity of each molecule (`true` = active).
    pub m1: Vec<bool>,
    /// Cluster sizes.
    pub c0: Vec<usize>,
    /// Active molecules per cluster.
    pub c1: Vec<usize>,
    /// Membership lists, in insertion order.
    pub cl: Vec<Vec<usize>>,
    rng: ChaCha8Rng,
}

/// Which global activity rule fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    None,
    AllActivated,
    AllInactivated,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepReport {
    pub t: u64,
    /// Merged pair `(p, q)` with `p < q`, `q` absorbed into `p`.
    pub merged: Option<(usize, usize)>,
    /// Split cluster `k` at position `s`.
    pub split: Option<(usize, usize)>,
    pub boundary: Boundary,
    pub noise_p: f64,
    pub noise_flips: usize,
    pub interplay: Option<InterplayOutcome>,
    /// Boundary rule re-evaluated after the interplay kick.
    pub kick_boundary: Boundary,
    pub coherence_flips: usize,
}

/// One violated state invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    LengthMismatch {
        what: &'static str,
        len: usize,
        expected: usize,
    },
    ClusterCountOutOfRange(usize),
    SizeMismatch {
        cluster: usize,
        c0: usize,
        members: usize,
    },
    EmptyCluster(usize),
    ActiveCountMismatch {
        cluster: usize,
        c1: usize,
        actual: usize,
    },
    WrongClusterIndex {
        molecule: usize,
        m0: usize,
        listed_in: usize,
    },
    MoleculeOutOfRange {
        cluster: usize,
        molecule: usize,
    },
    MoleculeMissing(usize),
    MoleculeDuplicated(usize),
    SizeSum {
        total: usize,
        expected: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::LengthMismatch {
                what,
                len,
                expected,
            } => {
                write!(f, "{what} has length {len}, expected {expected}")
            }
            Violation::ClusterCountOutOfRange(c) => write!(f, "cluster count {c} out of range"),
            Violation::SizeMismatch {
                cluster,
                c0,
                members,
            } => {
                write!(
                    f,
                    "cluster {cluster}: c0 = {c0} but {members} members listed"
                )
            }
            Violation::EmptyCluster(n) => write!(f, "cluster {n} is empty"),
            Violation::ActiveCountMismatch {
                cluster,
                c1,
                actual,
            } => {
                write!(
                    f,
                    "cluster {cluster}: c1 = {c1} but {actual} members active"
                )
            }
            Violation::WrongClusterIndex {
                molecule,
                m0,
                listed_in,
            } => write!(
                f,
                "molecule {molecule}: m0 = {m0} but listed in cluster {listed_in}"
            ),
            Violation::MoleculeOutOfRange { cluster, molecule } => {
                write!(f, "cluster {cluster} lists unknown molecule {molecule}")
            }
            Violation::MoleculeMissing(k) => write!(f, "molecule {k} is in no cluster"),
            Violation::MoleculeDuplicated(k) => write!(f, "molecule {k} is listed more than once"),
            Violation::SizeSum { total, expected } => {
                write!(f, "cluster sizes sum to {total}, expected {expected}")
            }
        }
    }
}

impl SimState {
    /// All molecules as inactive monomers, generator seeded from `params.seed`.
    pub fn new(params: &SimParams) -> Result<Self, ConfigError> {
        params.validate()?;
        let n = params.n_molecules;
        Ok(SimState {
            t: 0,
            m0: (0..n).collect(),
            m1: vec![false; n],
            c0: vec![1; n],
            c1: vec![0; n],
            cl: (0..n).map(|k| vec![k]).collect(),
            rng: ChaCha8Rng::seed_from_u64(params.seed),
        })
    }

    /// Builds a state from explicit membership lists and activities.
    ///
    /// Every molecule `0..activity.len()` must appear in exactly one list.
    pub fn from_clusters(
        clusters: Vec<Vec<usize>>,
        activity: Vec<bool>,
        seed: u64,
    ) -> Result<Self, ConfigError> {
        let n = activity.len();
        if n < 2 {
            return Err(ConfigError::invalid(
                "activity",
                "need at least two molecules",
            ));
        }
        let mut state = SimState {
            t: 0,
            m0: vec![usize::MAX; n],
            m1: activity,
            c0: clusters.iter().map(Vec::len).collect(),
            c1: vec![0; clusters.len()],
            cl: clusters,
            rng: ChaCha8Rng::seed_from_u64(seed),
        };
        for (idx, members) in state.cl.iter().enumerate() {
            for &k in members {
                if k >= n {
                    return Err(ConfigError::invalid(
                        "clusters",
                        format!("molecule {k} out of range"),
                    ));
                }
                state.m0[k] = idx;
            }
        }
        state.recount_activity();
        let violations = state.audit();
        if !violations.is_empty() {
            return Err(ConfigError::invalid("clusters", violations[0].to_string()));
        }
        Ok(state)
    }

    pub fn n_molecules(&self) -> usize {
        self.m0.len()
    }

    pub fn c_max(&self) -> usize {
        self.cl.len()
    }

    pub fn active_count(&self) -> usize {
        self.m1.iter().filter(|&&a| a).count()
    }

    pub fn active_ratio(&self, cluster: usize) -> f64 {
        self.c1[cluster] as f64 / self.c0[cluster] as f64
    }

    pub(crate) fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Recomputes every `c1` from the membership lists.
    pub fn recount_activity(&mut self) {
        for (c1, members) in self.c1.iter_mut().zip(&self.cl) {
            *c1 = members.iter().filter(|&&k| self.m1[k]).count();
        }
    }

    /// Absorbs cluster `q` into cluster `p` (`p < q`) and shifts higher
    /// indices down by one.
    pub fn merge_clusters(&mut self, p: usize, q: usize) {
        assert!(p < q && q < self.c_max(), "merge needs p < q < c_max");
        let moved = self.cl.remove(q);
        let moved_active = self.c1.remove(q);
        let moved_size = self.c0.remove(q);
        self.c0[p] += moved_size;
        self.c1[p] += moved_active;
        self.cl[p].extend_from_slice(&moved);
        for &k in &moved {
            self.m0[k] = p;
        }
        for idx in self.m0.iter_mut() {
            if *idx > q {
                *idx -= 1;
            }
        }
    }

    /// Keeps the first `s` members in cluster `k` and moves the rest to a
    /// new last cluster.
    pub fn split_cluster(&mut self, k: usize, s: usize) {
        assert!(
            s >= 1 && s < self.c0[k],
            "split position must be in 1..c0-1"
        );
        let tail = self.cl[k].split_off(s);
        let new_idx = self.c_max();
        for &m in &tail {
            self.m0[m] = new_idx;
        }
        let tail_active = tail.iter().filter(|&&m| self.m1[m]).count();
        self.c0[k] = s;
        self.c1[k] = self.cl[k].iter().filter(|&&m| self.m1[m]).count();
        self.c0.push(tail.len());
        self.c1.push(tail_active);
        self.cl.push(tail);
    }

    /// One merge attempt. Returns the merged pair, if any.
    pub fn attempt_clustering(&mut self, theta_c: f64) -> Option<(usize, usize)> {
        let c_max = self.c_max();
        if c_max < 2 {
            return None;
        }
        let a = self.rng.gen_range(0..c_max);
        let mut b = self.rng.gen_range(0..c_max);
        while b == a {
            b = self.rng.gen_range(0..c_max);
        }
        let (p, q) = if a < b { (a, b) } else { (b, a) };
        if self.active_ratio(p) < theta_c && self.active_ratio(q) < theta_c {
            self.merge_clusters(p, q);
            Some((p, q))
        } else {
            None
        }
    }

    /// Draws a molecule uniformly and returns its cluster, so clusters are
    /// picked with probability proportional to their size.
    pub fn pick_split_candidate(&mut self) -> usize {
        let k = self.rng.gen_range(0..self.n_molecules());
        self.m0[k]
    }

    /// One split attempt. Returns `(cluster, position)` on success.
    pub fn attempt_declustering(&mut self, theta_dec: f64) -> Option<(usize, usize)> {
        let k = self.pick_split_candidate();
        if self.c0[k] < 2 || self.active_ratio(k) <= theta_dec {
            return None;
        }
        let s = self.rng.gen_range(1..self.c0[k]);
        self.split_cluster(k, s);
        Some((k, s))
    }

    /// Global inactivation at full monomerization, global activation at full
    /// aggregation.
    pub fn apply_boundary_rules(&mut self) -> Boundary {
        let n = self.n_molecules();
        if self.c_max() == n {
            self.m1.fill(false);
            self.c1.fill(0);
            Boundary::AllInactivated
        } else if self.c_max() == 1 {
            self.m1.fill(true);
            self.c1[0] = n;
            Boundary::AllActivated
        } else {
            Boundary::None
        }
    }

    /// Flips each molecule's activity independently with probability `p`.
    pub fn apply_noise(&mut self, p: f64) -> usize {
        let flips = if p <= 0.0 {
            0
        } else if p >= 1.0 {
            self.m1.iter_mut().for_each(|a| *a = !*a);
            self.n_molecules()
        } else {
            let coin = Bernoulli::new(p).expect("p checked to lie in (0, 1)");
            let mut flips = 0;
            for a in self.m1.iter_mut() {
                if coin.sample(&mut self.rng) {
                    *a = !*a;
                    flips += 1;
                }
            }
            flips
        };
        if flips > 0 {
            self.recount_activity();
        }
        flips
    }

    pub fn step(&mut self, params: &SimParams) -> StepReport {
        let t = self.t;
        let merged = self.attempt_clustering(params.theta_c);
        let split = self.attempt_declustering(params.theta_dec);
        let boundary = self.apply_boundary_rules();
        let noise_p = params.noise.at(t);
        let noise_flips = self.apply_noise(noise_p);

        let mut report = StepReport {
            t,
            merged,
            split,
            boundary,
            noise_p,
            noise_flips,
            interplay: None,
            kick_boundary: Boundary::None,
            coherence_flips: 0,
        };
        if params.interplay_enabled {
            let outcome = interplay::run(self, params);
            report.coherence_flips = outcome.flips;
            report.interplay = Some(outcome);
            report.kick_boundary = self.apply_boundary_rules();
        }
        self.t += 1;
        report
    }

    /// Every violated invariant; empty when the state is consistent.
    pub fn audit(&self) -> Vec<Violation> {
        let n = self.n_molecules();
        let c_max = self.c_max();
        let mut out = Vec::new();
        if self.m1.len() != n {
            out.push(Violation::LengthMismatch {
                what: "m1",
                len: self.m1.len(),
                expected: n,
            });
            return out;
        }
        for (what, len) in [("c0", self.c0.len()), ("c1", self.c1.len())] {
            if len != c_max {
                out.push(Violation::LengthMismatch {
                    what,
                    len,
                    expected: c_max,
                });
            }
        }
        if !out.is_empty() {
            return out;
        }
        if c_max == 0 || c_max > n {
            out.push(Violation::ClusterCountOutOfRange(c_max));
        }
        let mut seen = vec![0usize; n];
        for (idx, members) in self.cl.iter().enumerate() {
            if members.is_empty() {
                out.push(Violation::EmptyCluster(idx));
            }
            if members.len() != self.c0[idx] {
                out.push(Violation::SizeMismatch {
                    cluster: idx,
                    c0: self.c0[idx],
                    members: members.len(),
                });
            }
            let mut active = 0;
            for &k in members {
                if k >= n {
                    out.push(Violation::MoleculeOutOfRange {
                        cluster: idx,
                        molecule: k,
                    });
                    continue;
                }
                seen[k] += 1;
                if self.m0[k] != idx {
                    out.push(Violation::WrongClusterIndex {
                        molecule: k,
                        m0: self.m0[k],
                        listed_in: idx,
                    });
                }
                if self.m1[k] {
                    active += 1;
                }
            }
            if self.c1[idx] != active {
                out.push(Violation::ActiveCountMismatch {
                    cluster: idx,
                    c1: self.c1[idx],
                    actual: active,
                });
            }
        }
        for (k, &count) in seen.iter().enumerate() {
            match count {
                0 => out.push(Violation::MoleculeMissing(k)),
                1 => {}
                _ => out.push(Violation::MoleculeDuplicated(k)),
            }
        }
        let total: usize = self.c0.iter().sum();
        if total != n {
            out.push(Violation::SizeSum { total, expected: n });
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::NoiseSchedule;

    fn params(n: usize, seed: u64) -> SimParams {
        SimParams {
            n_molecules: n,
            seed,
            ..SimParams::default()
        }
    }

    #[test]
    fn init_is_inactive_monomers() {
        let s = SimState::new(&params(200, 1)).unwrap();
        assert_eq!(s.c_max(), 200);
        assert_eq!(s.active_count(), 0);
        assert!(s.c0.iter().all(|&c| c == 1));
        assert!(s.audit().is_empty());
        let small = SimState::new(&params(2, 1)).unwrap();
        assert_eq!(small.c_max(), 2);
        assert!(SimState::new(&params(1, 1)).is_err());
    }

    #[test]
    fn same_seed_same_state() {
        let p = params(50, 9);
        assert_eq!(SimState::new(&p).unwrap(), SimState::new(&p).unwrap());
    }

    #[test]
    fn merges_two_inactive_singletons() {
        let mut s = SimState::new(&params(2, 3)).unwrap();
        assert_eq!(s.attempt_clustering(0.5), Some((0, 1)));
        assert_eq!(s.c0, vec![2]);
        assert_eq!(s.c1, vec![0]);
        assert_eq!(s.cl, vec![vec![0, 1]]);
        assert!(s.audit().is_empty());
    }

    #[test]
    fn merge_adds_sizes_and_active_counts() {
        let act = vec![true, false, false, false, false];
        let mut s = SimState::from_clusters(vec![vec![0, 1, 2], vec![3, 4]], act, 0).unwrap();
        assert_eq!(s.attempt_clustering(0.5), Some((0, 1)));
        assert_eq!((s.c0[0], s.c1[0]), (5, 1));
        assert_eq!(s.cl[0], vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn merge_requires_strictly_low_ratio() {
        let act = vec![true, false, false, false];
        let mut s = SimState::from_clusters(vec![vec![0, 1], vec![2, 3]], act, 0).unwrap();
        assert_eq!(s.attempt_clustering(0.5), None);
        assert_eq!(s.c_max(), 2);
    }

    #[test]
    fn merge_compacts_higher_indices() {
        let mut s = SimState::new(&params(6, 0)).unwrap();
        s.merge_clusters(1, 3);
        assert_eq!(s.c_max(), 5);
        assert_eq!(s.cl, vec![vec![0], vec![1, 3], vec![2], vec![4], vec![5]]);
        assert_eq!(s.m0, vec![0, 1, 2, 1, 3, 4]);
        assert!(s.audit().is_empty());
    }

    #[test]
    fn split_all_active_cluster() {
        let mut s = SimState::from_clusters(vec![vec![0, 1, 2, 3]], vec![true; 4], 0).unwrap();
        s.split_cluster(0, 1);
        assert_eq!(s.c0, vec![1, 3]);
        assert_eq!(s.c1, vec![1, 3]);
        assert_eq!(s.cl, vec![vec![0], vec![1, 2, 3]]);
        assert_eq!(s.m0, vec![0, 1, 1, 1]);
        assert!(s.audit().is_empty());
    }

    #[test]
    fn split_requires_strictly_high_ratio() {
        let mut s =
            SimState::from_clusters(vec![vec![0, 1, 2, 3]], vec![true, true, false, false], 0)
                .unwrap();
        for _ in 0..100 {
            assert_eq!(s.attempt_declustering(0.5), None);
        }
        assert_eq!(s.c_max(), 1);
    }

    #[test]
    fn monomer_pick_does_not_split() {
        let mut s = SimState::from_clusters(vec![vec![0], vec![1]], vec![true, true], 0).unwrap();
        assert_eq!(s.attempt_declustering(0.0), None);
        assert_eq!(s.c_max(), 2);
    }

    #[test]
    fn boundary_rules() {
        let mut s = SimState::new(&params(200, 0)).unwrap();
        s.m1.fill(true);
        s.recount_activity();
        assert_eq!(s.apply_boundary_rules(), Boundary::AllInactivated);
        assert_eq!(s.active_count(), 0);
        assert!(s.c1.iter().all(|&c| c == 0));

        let act: Vec<bool> = (0..200).map(|k| k % 3 == 0).collect();
        let mut one = SimState::from_clusters(vec![(0..200).collect()], act, 0).unwrap();
        assert_eq!(one.apply_boundary_rules(), Boundary::AllActivated);
        assert_eq!(one.active_count(), 200);
        assert_eq!(one.c1, vec![200]);

        let mut mid = SimState::new(&params(200, 0)).unwrap();
        while mid.c_max() > 57 {
            mid.merge_clusters(0, 1);
        }
        mid.m1[0] = true;
        mid.recount_activity();
        let before = mid.clone();
        assert_eq!(mid.apply_boundary_rules(), Boundary::None);
        assert_eq!(mid, before);
    }

    #[test]
    fn noise_extremes() {
        let mut s = SimState::new(&params(200, 4)).unwrap();
        let before = s.clone();
        assert_eq!(s.apply_noise(0.0), 0);
        assert_eq!(s, before);
        assert_eq!(s.apply_noise(1.0), 200);
        assert_eq!(s.active_count(), 200);
        assert!(s.audit().is_empty());
    }

    #[test]
    fn audit_flags_corrupted_active_count() {
        let mut s = SimState::new(&params(10, 0)).unwrap();
        s.c1[3] = 1;
        let v = s.audit();
        assert_eq!(
            v,
            vec![Violation::ActiveCountMismatch {
                cluster: 3,
                c1: 1,
                actual: 0
            }]
        );
    }

    #[test]
    fn first_noise_free_step_merges() {
        let p = params(200, 17);
        let mut s = SimState::new(&p).unwrap();
        let r = s.step(&p);
        assert!(r.merged.is_some());
        assert_eq!(s.c_max(), 199);
    }

    #[test]
    fn no_split_during_inactive_aggregation() {
        let p = SimParams {
            noise: NoiseSchedule::constant(0.0),
            ..params(200, 5)
        };
        let mut s = SimState::new(&p).unwrap();
        while s.c_max() > 1 {
            let r = s.step(&p);
            assert!(r.split.is_none());
            if s.c_max() > 1 {
                assert_eq!(s.active_count(), 0);
            }
        }
    }
}
