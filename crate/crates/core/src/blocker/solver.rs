//! Exact minimum hitting set by branch and bound.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverCaps {
    pub max_candidates: usize,
    pub max_geodesics: usize,
    /// Search nodes before the solver gives up and keeps its incumbent.
    pub max_nodes: u64,
}

impl Default for SolverCaps {
    fn default() -> Self {
        Self { max_candidates: 5000, max_geodesics: 2000, max_nodes: 5_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverSolution {
    /// Chosen set indices, ascending.
    pub chosen: Vec<usize>,
    pub optimal: bool,
    pub greedy_upper: usize,
    pub lower: usize,
    pub nodes: u64,
}

/// Why a solve stopped short of a certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CapHit {
    Candidates,
    Geodesics,
    Nodes,
}

pub fn greedy(universe: usize, sets: &[FixedBitSet]) -> Option<Vec<usize>> {
    let mut uncovered = FixedBitSet::with_capacity(universe);
    uncovered.insert_range(..);
    let mut chosen = Vec::new();
    while !uncovered.is_clear() {
        let (best, gain) = sets
            .iter()
            .enumerate()
            .map(|(i, s)| (i, s.intersection_count(&uncovered)))
            .fold((usize::MAX, 0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if gain == 0 {
            return None;
        }
        chosen.push(best);
        uncovered.difference_with(&sets[best]);
    }
    chosen.sort_unstable();
    Some(chosen)
}

/// Indices of sets not contained in another set, in input order. Identical
/// sets keep their first occurrence.
pub fn undominated(sets: &[FixedBitSet]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..sets.len()).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(sets[i].count_ones(..)), i));
    let mut kept: Vec<usize> = Vec::new();
    for i in order {
        if sets[i].is_clear() {
            continue;
        }
        if kept.iter().any(|&k| sets[i].is_subset(&sets[k])) {
            continue;
        }
        kept.push(i);
    }
    kept.sort_unstable();
    kept
}

struct Search<'a> {
    sets: &'a [FixedBitSet],
    /// Sets containing each element.
    by_elem: Vec<Vec<usize>>,
    /// Union of all sets meeting each element's set list.
    conflict: Vec<FixedBitSet>,
    /// Elements ordered by how few sets contain them.
    elem_order: Vec<usize>,
    best: Vec<usize>,
    nodes: u64,
    max_nodes: u64,
    aborted: bool,
}

impl Search<'_> {
    fn lower_bound(&self, uncovered: &FixedBitSet) -> usize {
        let mut blocked = FixedBitSet::with_capacity(uncovered.len());
        let mut packing = 0;
        for &e in &self.elem_order {
            if uncovered.contains(e) && !blocked.contains(e) {
                packing += 1;
                blocked.union_with(&self.conflict[e]);
            }
        }
        let remaining = uncovered.count_ones(..);
        let widest = self.sets.iter().map(|s| s.intersection_count(uncovered)).max().unwrap_or(0);
        let volume = if widest == 0 { 0 } else { remaining.div_ceil(widest) };
        packing.max(volume)
    }

    fn recurse(&mut self, uncovered: &FixedBitSet, chosen: &mut Vec<usize>) {
        if uncovered.is_clear() {
            if chosen.len() < self.best.len() {
                self.best = chosen.clone();
            }
            return;
        }
        if self.aborted || chosen.len() + self.lower_bound(uncovered) >= self.best.len() {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            self.aborted = true;
            return;
        }
        let pivot = uncovered
            .ones()
            .min_by_key(|&e| (self.by_elem[e].len(), e))
            .expect("non-empty");
        let mut options: Vec<(usize, usize)> =
            self.by_elem[pivot].iter().map(|&c| (self.sets[c].intersection_count(uncovered), c)).collect();
        options.sort_by_key(|&(gain, c)| (std::cmp::Reverse(gain), c));
        for (_, c) in options {
            let mut next = uncovered.clone();
            next.difference_with(&self.sets[c]);
            chosen.push(c);
            self.recurse(&next, chosen);
            chosen.pop();
            if self.aborted {
                return;
            }
        }
    }
}

/// Minimum number of sets covering `0..universe`.
///
/// Returns `None` when some element lies in no set. When a cap is hit, the
/// best cover found so far is returned with `optimal = false` and the cap.
pub fn solve_cover(universe: usize, sets: &[FixedBitSet], caps: &SolverCaps) -> Option<(CoverSolution, Option<CapHit>)> {
    if universe == 0 {
        let sol = CoverSolution { chosen: Vec::new(), optimal: true, greedy_upper: 0, lower: 0, nodes: 0 };
        return Some((sol, None));
    }
    let greedy_sol = greedy(universe, sets)?;
    let greedy_upper = greedy_sol.len();
    let keep = undominated(sets);
    let cap = if universe > caps.max_geodesics {
        Some(CapHit::Geodesics)
    } else if keep.len() > caps.max_candidates {
        Some(CapHit::Candidates)
    } else {
        None
    };
    if cap.is_some() {
        let sol = CoverSolution { chosen: greedy_sol, optimal: false, greedy_upper, lower: 0, nodes: 0 };
        return Some((sol, cap));
    }
    let reduced: Vec<FixedBitSet> = keep.iter().map(|&i| sets[i].clone()).collect();
    let mut by_elem = vec![Vec::new(); universe];
    for (i, s) in reduced.iter().enumerate() {
        for e in s.ones() {
            by_elem[e].push(i);
        }
    }
    let conflict = by_elem
        .iter()
        .map(|cs| {
            let mut u = FixedBitSet::with_capacity(universe);
            for &c in cs {
                u.union_with(&reduced[c]);
            }
            u
        })
        .collect();
    let mut elem_order: Vec<usize> = (0..universe).collect();
    elem_order.sort_by_key(|&e| (by_elem[e].len(), e));
    // greedy over the reduced family, mapped to reduced indices
    let incumbent = greedy(universe, &reduced).expect("reduction keeps feasibility");
    let mut search = Search {
        sets: &reduced,
        by_elem,
        conflict,
        elem_order,
        best: incumbent,
        nodes: 0,
        max_nodes: caps.max_nodes,
        aborted: false,
    };
    let mut all = FixedBitSet::with_capacity(universe);
    all.insert_range(..);
    let root_lower = search.lower_bound(&all);
    search.recurse(&all, &mut Vec::new());
    let mut chosen: Vec<usize> = search.best.iter().map(|&i| keep[i]).collect();
    chosen.sort_unstable();
    let optimal = !search.aborted;
    let lower = if optimal { chosen.len() } else { root_lower };
    let sol = CoverSolution { chosen, optimal, greedy_upper, lower, nodes: search.nodes };
    Some((sol, if optimal { None } else { Some(CapHit::Nodes) }))
}

/// Smallest cover size by trying every subset in increasing size, up to
/// `limit` sets. Exponential; for cross-checking small instances.
pub fn exhaustive_min_cover(universe: usize, sets: &[FixedBitSet], limit: usize) -> Option<usize> {
    fn rec(sets: &[FixedBitSet], start: usize, left: usize, acc: &FixedBitSet, universe: usize) -> bool {
        if acc.count_ones(..) == universe {
            return true;
        }
        if left == 0 {
            return false;
        }
        (start..sets.len()).any(|i| {
            let mut next = acc.clone();
            next.union_with(&sets[i]);
            rec(sets, i + 1, left - 1, &next, universe)
        })
    }
    let empty = FixedBitSet::with_capacity(universe);
    (0..=limit).find(|&k| rec(sets, 0, k, &empty, universe))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn set(universe: usize, elems: &[usize]) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(universe);
        for &e in elems {
            s.insert(e);
        }
        s
    }

    #[test]
    fn small_cover() {
        let sets = vec![set(4, &[0, 1]), set(4, &[2, 3]), set(4, &[1, 2]), set(4, &[0])];
        let (sol, cap) = solve_cover(4, &sets, &SolverCaps::default()).unwrap();
        assert_eq!(sol.chosen, vec![0, 1]);
        assert!(sol.optimal && cap.is_none());
    }

    #[test]
    fn greedy_is_not_optimal_here() {
        // classic trap: greedy takes the big middle set first
        let u = 6;
        let sets = vec![set(u, &[0, 1, 2]), set(u, &[3, 4, 5]), set(u, &[1, 2, 3, 4])];
        assert_eq!(greedy(u, &sets).unwrap().len(), 3);
        let (sol, _) = solve_cover(u, &sets, &SolverCaps::default()).unwrap();
        assert_eq!(sol.chosen, vec![0, 1]);
        assert_eq!(sol.greedy_upper, 3);
    }

    #[test]
    fn infeasible_and_empty() {
        assert!(solve_cover(2, &[set(2, &[0])], &SolverCaps::default()).is_none());
        let (sol, _) = solve_cover(0, &[], &SolverCaps::default()).unwrap();
        assert!(sol.chosen.is_empty() && sol.optimal);
    }

    #[test]
    fn caps_fall_back_to_greedy() {
        let sets = vec![set(3, &[0]), set(3, &[1]), set(3, &[2])];
        let caps = SolverCaps { max_candidates: 2, ..Default::default() };
        let (sol, cap) = solve_cover(3, &sets, &caps).unwrap();
        assert!(!sol.optimal);
        assert_eq!(cap, Some(CapHit::Candidates));
        assert_eq!(sol.chosen.len(), 3);
    }

    #[test]
    fn dominated_sets_are_dropped() {
        let sets = vec![set(3, &[0]), set(3, &[0, 1]), set(3, &[0, 1]), set(3, &[2]), set(3, &[])];
        assert_eq!(undominated(&sets), vec![1, 3]);
    }

    #[test]
    fn matches_exhaustive_on_random_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let u = rng.gen_range(1..=14);
            let k = rng.gen_range(1..=16);
            let mut sets: Vec<FixedBitSet> = (0..k)
                .map(|_| {
                    let mut s = FixedBitSet::with_capacity(u);
                    for e in 0..u {
                        if rng.gen_bool(0.25) {
                            s.insert(e);
                        }
                    }
                    s
                })
                .collect();
            for e in 0..u {
                let i = rng.gen_range(0..k);
                sets[i].insert(e);
            }
            let (sol, _) = solve_cover(u, &sets, &SolverCaps::default()).unwrap();
            let mut covered = FixedBitSet::with_capacity(u);
            for &c in &sol.chosen {
                covered.union_with(&sets[c]);
            }
            assert_eq!(covered.count_ones(..), u);
            assert_eq!(Some(sol.chosen.len()), exhaustive_min_cover(u, &sets, sol.greedy_upper));
        }
    }
}
