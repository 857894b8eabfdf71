//! Recursive splitting of a pair `(x, y)` through minimal blocking sets at
//! halving length scales, with the counting inequalities it yields.

use rayon::prelude::*;

use super::{blocking_threshold, BlockError, Result, SolverCaps};
use crate::flatspace::{count, fmt_rational, to_f64, FlatSpace, Rational, RationalPoint};
use crate::harness::{Check, Context};

/// Largest level the harness will expand.
pub const MAX_LEVEL_PAIRS: usize = 200_000;

/// Least `k` with `t / 2^k < delta`, from squared quantities.
pub fn kappa_sq(t2: Rational, delta2: Rational) -> u32 {
    let mut k = 0;
    let mut bound = delta2;
    while t2 >= bound {
        bound *= Rational::from_integer(4);
        k += 1;
    }
    k
}

pub type Pair = (RationalPoint, RationalPoint);

#[derive(Debug, Clone, PartialEq)]
pub struct RecursionLevel {
    pub k: u32,
    /// Squared length scale `(t / 2^k)^2`.
    pub t2: Rational,
    /// Pairs with multiplicity.
    pub pairs: Vec<Pair>,
    /// `m_{t/2^k}(p, q)` per pair.
    pub counts: Vec<usize>,
    /// Minimal blocking set sizes per pair; empty on the last level.
    pub thresholds: Vec<usize>,
    pub optimal: bool,
}

impl RecursionLevel {
    pub fn max_threshold(&self) -> usize {
        self.thresholds.iter().copied().max().unwrap_or(0)
    }

    pub fn count_sum(&self) -> usize {
        self.counts.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecursionTree {
    pub x: RationalPoint,
    pub y: RationalPoint,
    pub t2: Rational,
    pub kappa: u32,
    pub levels: Vec<RecursionLevel>,
    /// Every sub-instance was solved to optimality.
    pub certified: bool,
}

impl RecursionTree {
    pub fn m_t(&self) -> usize {
        self.levels[0].counts[0]
    }

    /// Observed per-level maxima of the thresholds, `s_0, s_1, ...`.
    pub fn observed_thresholds(&self) -> Vec<usize> {
        self.levels.iter().take(self.kappa as usize).map(|l| l.max_threshold()).collect()
    }

    /// Product of the first `k` observed per-level maxima.
    pub fn observed_s_k(&self, k: usize) -> f64 {
        self.observed_thresholds().iter().take(k).map(|&s| s as f64).product()
    }
}

/// Builds `P_0, ..., P_kappa` and checks the level inequalities.
///
/// Thresholds in the cardinality bound are the observed per-level maxima, a
/// stand-in for the sup over all pairs.
pub fn recursion_harness(
    space: &FlatSpace,
    x: &RationalPoint,
    y: &RationalPoint,
    t2: Rational,
    caps: &SolverCaps,
) -> Result<(RecursionTree, Vec<Check>)> {
    let kappa = kappa_sq(t2, space.delta2());
    let mut levels = Vec::new();
    let mut pairs = vec![(*x, *y)];
    let mut certified = true;
    let mut scale2 = t2;
    for k in 0..=kappa {
        if pairs.len() > MAX_LEVEL_PAIRS {
            return Err(BlockError::ResourceCap(format!("recursion level {k} has {} pairs", pairs.len())));
        }
        if k < kappa {
            let results = pairs
                .par_iter()
                .map(|(p, q)| blocking_threshold(space, p, q, scale2, caps))
                .collect::<Result<Vec<_>>>()?;
            let optimal = results.iter().all(|r| r.optimal);
            certified &= optimal;
            let mut next = Vec::new();
            for ((p, q), r) in pairs.iter().zip(&results) {
                for z in &r.solution.points {
                    next.push((*p, *z));
                    next.push((*z, *q));
                }
            }
            levels.push(RecursionLevel {
                k,
                t2: scale2,
                counts: results.iter().map(|r| r.m).collect(),
                thresholds: results.iter().map(|r| r.value).collect(),
                pairs: std::mem::replace(&mut pairs, next),
                optimal,
            });
        } else {
            let counts = pairs
                .par_iter()
                .map(|(p, q)| Ok(count(space, p, q, scale2)?.1))
                .collect::<Result<Vec<_>>>()?;
            levels.push(RecursionLevel {
                k,
                t2: scale2,
                counts,
                thresholds: Vec::new(),
                pairs: std::mem::take(&mut pairs),
                optimal: true,
            });
        }
        scale2 /= Rational::from_integer(4);
    }
    let tree = RecursionTree { x: *x, y: *y, t2, kappa, levels, certified };
    let checks = tree_checks(space, &tree);
    Ok((tree, checks))
}

fn tree_checks(space: &FlatSpace, tree: &RecursionTree) -> Vec<Check> {
    let m_t = tree.m_t();
    let t = to_f64(&tree.t2).sqrt();
    let base = Context::new()
        .with("pair", format!("{} -> {}", tree.x, tree.y))
        .with("t", crate::fmt_sig(t))
        .with("t2", fmt_rational(&tree.t2))
        .with("kappa", tree.kappa.to_string());
    let caveat = "S_k uses observed per-level maxima";
    let mut checks = Vec::new();
    for level in &tree.levels {
        let ctx = base.clone().with("k", level.k.to_string());
        checks.push(Check::leq(
            "recursion-reduction",
            "m_t(x,y) <= sum_{(p,q) in P_k} m_{t/2^k}(p,q)",
            m_t as f64,
            level.count_sum() as f64,
            ctx.clone(),
        ));
        let bound = 2f64.powi(level.k as i32) * tree.observed_s_k(level.k as usize);
        checks.push(
            Check::leq("recursion-cardinality", "|P_k| <= 2^k S_k(t)", level.pairs.len() as f64, bound, ctx)
                .with_caveat(caveat),
        );
    }
    let last = tree.levels.last().expect("at least one level");
    checks.push(Check::leq(
        "recursion-terminal-bound",
        "m_t(x,y) <= |P|",
        m_t as f64,
        last.pairs.len() as f64,
        base.clone(),
    ));
    let terminal_max = last.counts.iter().copied().max().unwrap_or(0);
    let terminal_ctx = base.clone().with("scale2", fmt_rational(&last.t2));
    debug_assert!(last.t2 < space.delta2());
    checks.push(Check::leq(
        "recursion-terminal-count",
        "m_s(p,q) <= 1 for s < delta",
        terminal_max as f64,
        1.0,
        terminal_ctx,
    ));
    let delta = space.delta();
    let s_total = tree.observed_s_k(tree.kappa as usize);
    let anchor = "m_t(x,y) <= (2t/delta) S(t)";
    // kappa <= 1 + log2(t/delta) needs t >= delta
    checks.push(if tree.kappa > 0 {
        Check::leq("recursion-length-bound", anchor, m_t as f64, 2.0 * t / delta * s_total, base)
            .with_caveat(caveat)
    } else {
        Check::skipped("recursion-length-bound", anchor, base)
    });
    checks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flatspace::rat;
    use num_traits::One;

    #[test]
    fn kappa_sq_matches_definition() {
        let d2 = rat(1, 4);
        assert_eq!(kappa_sq(rat(1, 16), d2), 0);
        assert_eq!(kappa_sq(Rational::one(), d2), 2);
        assert_eq!(kappa_sq(rat(4, 1), d2), 3);
        assert_eq!(kappa_sq(rat(1, 4), d2), 1);
    }

    #[test]
    fn short_scale_is_a_single_pair() {
        let t = FlatSpace::unit_torus();
        let x = RationalPoint::origin();
        let y = RationalPoint::new(rat(1, 10), rat(0, 1));
        let (tree, checks) = recursion_harness(&t, &x, &y, rat(1, 9), &SolverCaps::default()).unwrap();
        assert_eq!(tree.kappa, 0);
        assert_eq!(tree.levels.len(), 1);
        assert_eq!(tree.levels[0].pairs, vec![(x, y)]);
        assert!(checks.iter().all(|c| c.pass || c.is_skipped()), "{checks:#?}");
    }

    #[test]
    fn two_arc_tree() {
        let t = FlatSpace::unit_torus();
        let x = RationalPoint::origin();
        let y = RationalPoint::new(rat(1, 2), rat(0, 1));
        let (tree, checks) = recursion_harness(&t, &x, &y, Rational::one(), &SolverCaps::default()).unwrap();
        assert_eq!(tree.kappa, 2);
        assert_eq!(tree.levels.len(), 3);
        assert_eq!(tree.levels[1].pairs.len(), 4);
        assert!(checks.iter().all(|c| c.pass), "{checks:#?}");
        let reductions: Vec<_> = checks.iter().filter(|c| c.name == "recursion-reduction").collect();
        assert_eq!(reductions.len(), 3);
    }

    #[test]
    fn loop_tree() {
        let t = FlatSpace::unit_torus();
        let x = RationalPoint::origin();
        let (tree, checks) = recursion_harness(&t, &x, &x, rat(4, 1), &SolverCaps::default()).unwrap();
        assert_eq!(tree.kappa, 3);
        let bound = checks.iter().find(|c| c.name == "recursion-terminal-bound").unwrap();
        assert!(bound.pass, "{bound:?}");
        assert!(checks.iter().all(|c| c.pass), "{checks:#?}");
    }
}
