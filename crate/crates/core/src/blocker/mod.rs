//! Blocking thresholds as exact minimum hitting sets, and the recursive
//! pair-splitting construction bounding the counting function.
//!
//! # Candidate points
//!
//! A blocking point is useful only through the set of geodesics it meets.
//! [`build_instance`] keeps a finite candidate list that realizes every
//! such set that can occur in a minimum solution:
//!
//! * a point meeting two segments transversally is one of their pairwise
//!   crossings, which are all listed;
//! * a point meeting several segments only along collinear overlaps lies in
//!   an open cell of the arrangement of overlap intervals on one of them; the
//!   cover set is constant on each cell and only shrinks at cell endpoints,
//!   so the cell midpoint is at least as good;
//! * a point meeting a single segment can be swapped for that segment's
//!   midpoint.
//!
//! Hence replacing each point of an optimal blocking set by its candidate
//! yields a blocking set of the same size, and the optimum over candidates
//! equals the true threshold.

pub mod recursion;
pub mod solver;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use fixedbitset::FixedBitSet;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::flatspace::{
    self, enumerate_family, intersection_candidates, point_on_geodesic, to_f64, FlatError, FlatSpace,
    GeodesicSegment, Intersection, Rational, RationalPoint,
};
pub use recursion::{kappa_sq, recursion_harness, RecursionLevel, RecursionTree};
pub use solver::{exhaustive_min_cover, solve_cover, CapHit, CoverSolution, SolverCaps};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BlockError {
    #[error(transparent)]
    Flat(#[from] FlatError),
    #[error("geodesic {0} is met by no candidate point")]
    Infeasible(usize),
    #[error("midpoint cover fails to block geodesic {0}")]
    MidpointCover(usize),
    #[error("solution fails to block geodesic {0}")]
    InvalidSolution(usize),
    #[error("sampler: {0}")]
    Sampler(String),
    #[error("resource cap: {0}")]
    ResourceCap(String),
}

pub type Result<T> = std::result::Result<T, BlockError>;

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub point: RationalPoint,
    /// Geodesic ids this point lies on.
    pub covers: FixedBitSet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IncidenceInstance {
    pub x: RationalPoint,
    pub y: RationalPoint,
    pub t2: Rational,
    /// The connecting family, in canonical order; ids are indices.
    pub geodesics: Vec<GeodesicSegment>,
    pub candidates: Vec<Candidate>,
    /// Segments of the full family, including endpoint-passing ones.
    pub n: usize,
    pub corner_rejected: usize,
}

impl IncidenceInstance {
    pub fn m(&self) -> usize {
        self.geodesics.len()
    }

    pub fn cover_sets(&self) -> Vec<FixedBitSet> {
        self.candidates.iter().map(|c| c.covers.clone()).collect()
    }
}

/// Per segment, the open cells cut out by overlap endpoints, as midpoints.
fn cell_midpoints(bounds: &BTreeSet<Rational>) -> impl Iterator<Item = Rational> + '_ {
    bounds
        .iter()
        .zip(bounds.iter().skip(1))
        .map(|(a, b)| (*a + *b) / Rational::from_integer(2))
}

pub fn build_instance(space: &FlatSpace, x: &RationalPoint, y: &RationalPoint, t2: Rational) -> Result<IncidenceInstance> {
    let family = enumerate_family(space, x, y, t2)?;
    let n = family.n();
    let geodesics = family.connecting();
    let half = Rational::new(1, 2);

    let pair_results: Vec<(usize, Vec<(usize, Intersection)>)> = (0..geodesics.len())
        .into_par_iter()
        .map(|i| {
            let hits = ((i + 1)..geodesics.len())
                .flat_map(|j| {
                    intersection_candidates(space, &geodesics[i], &geodesics[j]).into_iter().map(move |h| (j, h))
                })
                .collect();
            (i, hits)
        })
        .collect();

    // Every geodesic through a crossing point of (i, j) crosses i or j there,
    // and every geodesic through an interior point of i that does not cross i
    // overlaps it there; so the pair records determine all cover sets.
    let m = geodesics.len();
    let empty = FixedBitSet::with_capacity(m);
    let mut crossing_cover: HashMap<RationalPoint, FixedBitSet> = HashMap::new();
    let mut overlaps: Vec<Vec<(usize, Rational, Rational)>> = vec![Vec::new(); m];
    for (i, hits) in &pair_results {
        for (j, h) in hits {
            match h {
                Intersection::Crossing { point, .. } => {
                    let c = crossing_cover.entry(*point).or_insert_with(|| empty.clone());
                    c.insert(*i);
                    c.insert(*j);
                }
                Intersection::Overlap { s_range, u_range, .. } => {
                    overlaps[*i].push((*j, s_range.0, s_range.1));
                    overlaps[*j].push((*i, u_range.0, u_range.1));
                }
            }
        }
    }
    let on_segment_cover = |i: usize, s: Rational, p: &RationalPoint| {
        let mut c = crossing_cover.get(p).cloned().unwrap_or_else(|| empty.clone());
        c.insert(i);
        for &(k, lo, hi) in &overlaps[i] {
            if lo < s && s < hi {
                c.insert(k);
            }
        }
        c
    };

    let skip: HashSet<RationalPoint> = [space.canonical(x), space.canonical(y)].into_iter().collect();
    let mut mids: BTreeMap<RationalPoint, FixedBitSet> = BTreeMap::new();
    let mut rest: BTreeMap<RationalPoint, FixedBitSet> = BTreeMap::new();
    for (i, g) in geodesics.iter().enumerate() {
        let p = g.point_at(space, half);
        let c = on_segment_cover(i, half, &p);
        mids.entry(p).or_insert_with(|| empty.clone()).union_with(&c);
        let mut bounds: BTreeSet<Rational> = [Rational::from_integer(0), Rational::one()].into_iter().collect();
        for &(_, lo, hi) in &overlaps[i] {
            bounds.extend([lo, hi]);
        }
        for s in cell_midpoints(&bounds) {
            let p = g.point_at(space, s);
            let c = on_segment_cover(i, s, &p);
            rest.entry(p).or_insert_with(|| empty.clone()).union_with(&c);
        }
    }
    for (p, c) in crossing_cover {
        rest.entry(p).or_insert_with(|| empty.clone()).union_with(&c);
    }
    for (p, c) in &mids {
        if let Some(r) = rest.remove(p) {
            debug_assert_eq!(&r, c);
        }
    }

    // Segment midpoints first so they win ties in dedup and branching.
    let mut distinct = HashSet::new();
    let candidates = mids
        .into_iter()
        .chain(rest)
        .filter(|(p, c)| !skip.contains(p) && distinct.insert(c.clone()))
        .map(|(point, covers)| Candidate { point, covers })
        .collect();

    Ok(IncidenceInstance { x: *x, y: *y, t2, geodesics, candidates, n, corner_rejected: family.corner_rejected })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockingSolution {
    pub points: Vec<RationalPoint>,
    /// Candidate indices of the chosen points.
    pub chosen: Vec<usize>,
    pub size: usize,
    pub optimal: bool,
    pub greedy_upper: usize,
    pub lower: usize,
    pub cap: Option<CapHit>,
}

pub fn solve_exact(instance: &IncidenceInstance, caps: &SolverCaps) -> Result<BlockingSolution> {
    let sets = instance.cover_sets();
    let mut hit = FixedBitSet::with_capacity(instance.m());
    for s in &sets {
        hit.union_with(s);
    }
    if let Some(g) = (0..instance.m()).find(|&g| !hit.contains(g)) {
        return Err(BlockError::Infeasible(g));
    }
    let (sol, cap) = solve_cover(instance.m(), &sets, caps).expect("feasibility checked");
    Ok(BlockingSolution {
        points: sol.chosen.iter().map(|&i| instance.candidates[i].point).collect(),
        size: sol.chosen.len(),
        chosen: sol.chosen,
        optimal: sol.optimal,
        greedy_upper: sol.greedy_upper,
        lower: sol.lower,
        cap,
    })
}

/// Index of the first geodesic none of `points` lies on.
pub fn first_unblocked(space: &FlatSpace, points: &[RationalPoint], geodesics: &[GeodesicSegment]) -> Option<usize> {
    geodesics
        .iter()
        .position(|g| points.iter().all(|z| point_on_geodesic(space, z, g).is_empty()))
}

/// The half-lattice translates of `(x + y) / 2`, minus `x` and `y`.
///
/// Every segment `v = y - x + l` has midpoint `(x + y)/2 + l/2`, so these at
/// most four points block the whole connecting family on a torus.
pub fn midpoint_cover(space: &FlatSpace, x: &RationalPoint, y: &RationalPoint) -> Result<Vec<RationalPoint>> {
    let basis = space
        .basis()
        .ok_or_else(|| FlatError::Unsupported("midpoint cover needs a torus".into()))?;
    let half = Rational::new(1, 2);
    let mid = RationalPoint::new((x.x + y.x) * half, (x.y + y.y) * half);
    let skip = [space.canonical(x), space.canonical(y)];
    let mut out = BTreeSet::new();
    for a in 0..2 {
        for b in 0..2 {
            let (a, b) = (Rational::from_integer(a) * half, Rational::from_integer(b) * half);
            let p = space.canonical(&mid.translate([a * basis[0][0] + b * basis[1][0], a * basis[0][1] + b * basis[1][1]]));
            if !skip.contains(&p) {
                out.insert(p);
            }
        }
    }
    Ok(out.into_iter().collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdResult {
    /// `s_t(x, y)` when `optimal`, otherwise an upper bound.
    pub value: usize,
    pub optimal: bool,
    pub n: usize,
    pub m: usize,
    pub candidates: usize,
    pub solution: BlockingSolution,
}

/// `s_t(x, y)` with an exactly re-verified witness. On a torus the midpoint
/// cover is checked first and caps the answer at its size.
pub fn blocking_threshold(
    space: &FlatSpace,
    x: &RationalPoint,
    y: &RationalPoint,
    t2: Rational,
    caps: &SolverCaps,
) -> Result<ThresholdResult> {
    let instance = build_instance(space, x, y, t2)?;
    threshold_of(space, &instance, caps)
}

pub(crate) fn threshold_of(
    space: &FlatSpace,
    instance: &IncidenceInstance,
    caps: &SolverCaps,
) -> Result<ThresholdResult> {
    let mut midpoint = None;
    if space.basis().is_some() {
        let cover = midpoint_cover(space, &instance.x, &instance.y)?;
        if let Some(g) = first_unblocked(space, &cover, &instance.geodesics) {
            return Err(BlockError::MidpointCover(g));
        }
        midpoint = Some(cover);
    }
    let mut solution = solve_exact(instance, caps)?;
    if let Some(cover) = midpoint {
        if !solution.optimal && cover.len() < solution.size && !instance.geodesics.is_empty() {
            solution.points = cover;
            solution.size = solution.points.len();
            solution.chosen.clear();
        }
    }
    if let Some(g) = first_unblocked(space, &solution.points, &instance.geodesics) {
        return Err(BlockError::InvalidSolution(g));
    }
    Ok(ThresholdResult {
        value: solution.size,
        optimal: solution.optimal,
        n: instance.n,
        m: instance.m(),
        candidates: instance.candidates.len(),
        solution,
    })
}

/// Seeded source of rational point pairs with a fixed denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairSampler {
    pub seed: u64,
    pub count: usize,
    pub denominator: i128,
}

impl Default for PairSampler {
    fn default() -> Self {
        Self { seed: 42, count: 10, denominator: 12 }
    }
}

impl PairSampler {
    /// Torus points have lattice coordinates `k / den` in `[0, 1)`; table
    /// points have plane coordinates in `(0, 1)`. Coincident pairs are
    /// rejected.
    pub fn pairs(&self, space: &FlatSpace) -> Result<Vec<(RationalPoint, RationalPoint)>> {
        let den = self.denominator;
        let (lo, hi) = if space.is_billiard() { (1, den - 1) } else { (0, den - 1) };
        if den < 2 || lo > hi || (hi - lo + 1) * (hi - lo + 1) < 2 {
            return Err(BlockError::Sampler(format!("denominator {den} leaves no distinct pairs")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let draw = |rng: &mut ChaCha8Rng| {
            let c = [Rational::new(rng.gen_range(lo..=hi), den), Rational::new(rng.gen_range(lo..=hi), den)];
            RationalPoint::from(space.plane(c))
        };
        let mut out = Vec::with_capacity(self.count);
        while out.len() < self.count {
            let x = draw(&mut rng);
            let y = draw(&mut rng);
            if !space.same_point(&x, &y) {
                out.push((x, y));
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairThreshold {
    pub x: RationalPoint,
    pub y: RationalPoint,
    pub threshold: usize,
    pub optimal: bool,
}

/// Maximum threshold over sampled pairs: a lower bound on the blocking cost.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCost {
    pub value: usize,
    pub pairs: Vec<PairThreshold>,
    pub certified: bool,
}

pub fn blocking_cost_sampled(
    space: &FlatSpace,
    t2: Rational,
    sampler: &PairSampler,
    caps: &SolverCaps,
) -> Result<SampledCost> {
    let pairs = sampler.pairs(space)?;
    cost_over_pairs(space, t2, &pairs, caps)
}

pub fn cost_over_pairs(
    space: &FlatSpace,
    t2: Rational,
    pairs: &[(RationalPoint, RationalPoint)],
    caps: &SolverCaps,
) -> Result<SampledCost> {
    let results: Vec<PairThreshold> = pairs
        .par_iter()
        .map(|(x, y)| {
            let r = blocking_threshold(space, x, y, t2, caps)?;
            Ok(PairThreshold { x: *x, y: *y, threshold: r.value, optimal: r.optimal })
        })
        .collect::<Result<_>>()?;
    Ok(SampledCost {
        value: results.iter().map(|r| r.threshold).max().unwrap_or(0),
        certified: results.iter().all(|r| r.optimal),
        pairs: results,
    })
}

pub(crate) fn num(x: f64) -> Value {
    crate::fmt_sig(x).parse::<f64>().map(|v| json!(v)).unwrap_or(Value::Null)
}

fn point_json(p: &RationalPoint) -> Value {
    let [a, b] = p.to_f64();
    json!([num(a), num(b)])
}

/// `{geodesics, candidates: [{x, y, covers}], solution: {points, size, optimal}}`.
pub fn instance_json(instance: &IncidenceInstance, solution: Option<&BlockingSolution>) -> Value {
    let geodesics: Vec<Value> = instance
        .geodesics
        .iter()
        .enumerate()
        .map(|(i, g)| {
            json!({
                "id": i,
                "vx": num(to_f64(&g.v[0])),
                "vy": num(to_f64(&g.v[1])),
                "len2": num(to_f64(&g.len2)),
            })
        })
        .collect();
    let candidates: Vec<Value> = instance
        .candidates
        .iter()
        .map(|c| {
            let [x, y] = c.point.to_f64();
            json!({ "x": num(x), "y": num(y), "covers": c.covers.ones().collect::<Vec<_>>() })
        })
        .collect();
    let solution = solution.map(|s| {
        json!({
            "points": s.points.iter().map(point_json).collect::<Vec<_>>(),
            "size": s.size,
            "optimal": s.optimal,
        })
    });
    json!({ "geodesics": geodesics, "candidates": candidates, "solution": solution })
}

/// Squared length as a rational, from a decimal `t`.
pub fn t_squared(t: &str) -> Result<Rational> {
    let t = flatspace::parse_rational(t)?;
    Ok(t * t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flatspace::rat;

    fn p(a: (i128, i128), b: (i128, i128)) -> RationalPoint {
        RationalPoint::new(rat(a.0, a.1), rat(b.0, b.1))
    }

    #[test]
    fn two_arc_instance() {
        let t = FlatSpace::unit_torus();
        let inst = build_instance(&t, &RationalPoint::origin(), &p((1, 2), (0, 1)), Rational::one()).unwrap();
        assert_eq!(inst.m(), 2);
        assert_eq!(inst.candidates.len(), 2);
        let sol = solve_exact(&inst, &SolverCaps::default()).unwrap();
        assert_eq!(sol.size, 2);
        assert!(sol.optimal);
    }

    #[test]
    fn empty_instance() {
        let t = FlatSpace::unit_torus();
        let inst = build_instance(&t, &RationalPoint::origin(), &p((1, 2), (1, 2)), rat(1, 100)).unwrap();
        assert_eq!(inst.m(), 0);
        assert!(inst.candidates.is_empty());
        assert_eq!(solve_exact(&inst, &SolverCaps::default()).unwrap().size, 0);
        let r = blocking_threshold(&t, &RationalPoint::origin(), &p((1, 2), (1, 2)), rat(1, 100), &SolverCaps::default())
            .unwrap();
        assert_eq!(r.value, 0);
    }

    #[test]
    fn diagonal_crossing_is_a_candidate() {
        let t = FlatSpace::unit_torus();
        let o = RationalPoint::origin();
        let inst = build_instance(&t, &o, &o, rat(201, 100)).unwrap();
        assert!(inst.candidates.iter().any(|c| c.point == p((1, 2), (1, 2))));
    }

    #[test]
    fn midpoint_cover_bounds_threshold() {
        let t = FlatSpace::unit_torus();
        let x = RationalPoint::origin();
        let y = p((1, 2), (1, 2));
        let cover = midpoint_cover(&t, &x, &y).unwrap();
        assert_eq!(cover.len(), 4);
        let inst = build_instance(&t, &x, &y, rat(36, 1)).unwrap();
        assert_eq!(first_unblocked(&t, &cover, &inst.geodesics), None);
        let r = blocking_threshold(&t, &x, &y, rat(36, 1), &SolverCaps::default()).unwrap();
        assert!((1..=4).contains(&r.value), "{}", r.value);
        assert!(r.optimal);
    }

    #[test]
    fn sampler_is_deterministic() {
        let t = FlatSpace::unit_torus();
        let s = PairSampler { seed: 42, count: 25, denominator: 8 };
        let a = s.pairs(&t).unwrap();
        assert_eq!(a, s.pairs(&t).unwrap());
        assert!(a.iter().all(|(x, y)| !t.same_point(x, y)));
        let b = PairSampler { seed: 43, ..s }.pairs(&t).unwrap();
        assert_ne!(a, b);
        let bil = FlatSpace::square_billiard();
        assert!(s.pairs(&bil).unwrap().iter().all(|(x, _)| x.x > rat(0, 1) && x.x < Rational::one()));
    }

    #[test]
    fn sampled_cost_examples() {
        let t = FlatSpace::unit_torus();
        let s = PairSampler { seed: 1, count: 10, denominator: 6 };
        let c = blocking_cost_sampled(&t, Rational::one(), &s, &SolverCaps::default()).unwrap();
        assert!(c.value <= 4 && c.certified);
        assert_eq!(c.value, c.pairs.iter().map(|p| p.threshold).max().unwrap());
        let tiny = blocking_cost_sampled(&t, rat(1, 10_000), &s, &SolverCaps::default()).unwrap();
        // sampled points are at least 1/6 apart or coincide mod the lattice
        assert_eq!(tiny.value, 0);
    }

    fn scanned_covers(space: &FlatSpace, inst: &IncidenceInstance) -> Vec<FixedBitSet> {
        inst.candidates
            .iter()
            .map(|c| {
                let mut set = FixedBitSet::with_capacity(inst.m());
                for (k, g) in inst.geodesics.iter().enumerate() {
                    if !point_on_geodesic(space, &c.point, g).is_empty() {
                        set.insert(k);
                    }
                }
                set
            })
            .collect()
    }

    #[test]
    fn covers_match_point_scan() {
        let cases = [
            (FlatSpace::unit_torus(), p((0, 1), (0, 1)), p((1, 2), (1, 2)), rat(9, 1)),
            (FlatSpace::unit_torus(), p((0, 1), (0, 1)), p((0, 1), (0, 1)), rat(8, 1)),
            (FlatSpace::unit_torus(), p((0, 1), (0, 1)), p((1, 4), (0, 1)), rat(6, 1)),
            (
                FlatSpace::torus([rat(1, 1), rat(0, 1)], [rat(1, 2), rat(2, 3)]).unwrap(),
                p((1, 5), (1, 7)),
                p((2, 3), (1, 2)),
                rat(7, 1),
            ),
            (FlatSpace::square_billiard(), p((1, 3), (1, 4)), p((1, 2), (2, 3)), rat(5, 1)),
            (FlatSpace::square_billiard(), p((1, 2), (1, 4)), p((1, 2), (3, 4)), rat(6, 1)),
        ];
        for (space, x, y, t2) in cases {
            let inst = build_instance(&space, &x, &y, t2).unwrap();
            assert_eq!(inst.cover_sets(), scanned_covers(&space, &inst), "{x} {y}");
        }
    }

    #[test]
    fn json_shape() {
        let t = FlatSpace::unit_torus();
        let inst = build_instance(&t, &RationalPoint::origin(), &p((1, 2), (0, 1)), Rational::one()).unwrap();
        let sol = solve_exact(&inst, &SolverCaps::default()).unwrap();
        let v = instance_json(&inst, Some(&sol));
        assert_eq!(v["geodesics"].as_array().unwrap().len(), 2);
        assert_eq!(v["candidates"][0]["covers"], json!([1]));
        assert_eq!(v["candidates"][1]["covers"], json!([0]));
        assert_eq!(v["candidates"][0]["x"], json!(0.25));
        assert_eq!(v["solution"]["size"], 2);
        assert_eq!(v["solution"]["optimal"], true);
    }
}
