//! Uniform count bounds, blocking lower bounds and word growth.

use std::f64::consts::PI;

use num_bigint::BigUint;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::orbit::{orbit_ball, OrbitBall, OrbitBudget};
use super::{polar_from_i, FuchsianPreset, HyperbolicError, Point, PresetKind, Result};
use crate::growth::{rate_estimate, GrowthClass, GrowthSeries, RateMode, DEFAULT_TAIL_FRACTION};

/// Exponential growth rate of an orbit count series.
pub fn entropy_estimate(series: &GrowthSeries) -> Result<GrowthClass> {
    Ok(rate_estimate(series, RateMode::Exponential, DEFAULT_TAIL_FRACTION)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum BoundMode {
    Rigorous,
    /// Maximum over sampled base-point pairs.
    Empirical { seed: u64, samples: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundSource {
    Diameter,
    Systole,
    Sample,
}

/// Upper bound on `#{g : d(p, g q) <= r}` over all base points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UniformBound {
    pub r: f64,
    pub value: f64,
    pub source: BoundSource,
    pub heuristic: bool,
}

/// Orbit points within `r` of `x` have translates of a fundamental domain of
/// diameter `d` inside the ball of radius `r + 2d`, pairwise disjoint.
pub fn diameter_bound(r: f64, d: f64, area: f64) -> f64 {
    2.0 * PI * ((r + 2.0 * d).cosh() - 1.0) / area
}

/// Disks of radius `systole / 2` about orbit points are disjoint and lie in
/// the ball of radius `r + systole / 2`.
pub fn systole_bound(r: f64, systole: f64) -> f64 {
    let h = systole / 2.0;
    ((r + h).cosh() - 1.0) / (h.cosh() - 1.0)
}

fn sample_point(rng: &mut ChaCha8Rng, center: Point, radius: f64) -> Point {
    let z = polar_from_i(radius * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..2.0 * PI));
    z * center.im + center.re
}

pub fn uniform_count_bound(
    preset: &FuchsianPreset,
    r: f64,
    mode: &BoundMode,
    budget: &OrbitBudget,
) -> Result<UniformBound> {
    if !(r >= 0.0 && r.is_finite()) {
        return Err(HyperbolicError::Domain(format!("radius must be finite and non-negative, got {r}")));
    }
    match *mode {
        BoundMode::Rigorous => {
            let (Some(d), Some(area)) = (preset.diameter, preset.area) else {
                return Err(HyperbolicError::Unsupported(format!(
                    "{} has no finite-area fundamental domain",
                    preset.name
                )));
            };
            if preset.kind != PresetKind::Cocompact {
                return Err(HyperbolicError::Unsupported(format!("{} is not cocompact", preset.name)));
            }
            let by_diameter = diameter_bound(r, d, area);
            let (value, source) = match preset.systole.map(|s| systole_bound(r, s)) {
                Some(v) if v < by_diameter => (v, BoundSource::Systole),
                _ => (by_diameter, BoundSource::Diameter),
            };
            Ok(UniformBound { r, value: value.max(1.0), source, heuristic: false })
        }
        BoundMode::Empirical { seed, samples } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let spread = preset.domain_radius.unwrap_or(1.0);
            let mut best = 1u64;
            for _ in 0..samples {
                let p = sample_point(&mut rng, preset.center, spread);
                let q = sample_point(&mut rng, preset.center, spread);
                best = best.max(orbit_ball(preset, p, q, r, budget)?.count(r));
            }
            Ok(UniformBound { r, value: best as f64, source: BoundSource::Sample, heuristic: true })
        }
    }
}

const ANGLE_TOLERANCE: f64 = 1e-9;

/// Flags elements of `ball_y` whose segment from `x` to `g y` passes through
/// another lift of `x` or `y`.
///
/// `ball_x` must hold the orbit of `x` about `x` out to the same radius. In
/// the disk model centered at `x` geodesics through `x` are radii, so a hit
/// is a point at the same angle and smaller distance.
pub fn endpoint_passing(ball_y: &OrbitBall, ball_x: &OrbitBall) -> Vec<bool> {
    let x = ball_y.x;
    let angle = |z: Point| ((z - x) / (z - x.conj())).arg();
    let lift = |m: &super::MobiusMatrix, p: Point| m.apply(p);
    // (angle, displacement, index into ball_y or usize::MAX)
    let mut pts: Vec<(f64, f64, usize)> = Vec::new();
    for (k, e) in ball_y.elements.iter().enumerate() {
        if e.displacement > 0.0 {
            pts.push((angle(lift(&e.matrix, ball_y.y)), e.displacement, k));
        }
    }
    for e in &ball_x.elements {
        if e.displacement > 1e-12 {
            pts.push((angle(lift(&e.matrix, ball_x.y)), e.displacement, usize::MAX));
        }
    }
    let wrapped: Vec<(f64, f64, usize)> = pts
        .iter()
        .filter(|p| p.0 < -PI + ANGLE_TOLERANCE)
        .map(|&(a, d, k)| (a + 2.0 * PI, d, k))
        .collect();
    pts.extend(wrapped);
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut passing = vec![false; ball_y.elements.len()];
    for (i, &(a, d, k)) in pts.iter().enumerate() {
        if k == usize::MAX || passing[k] {
            continue;
        }
        let near = |j: &usize| (pts[*j].0 - a).abs() <= ANGLE_TOLERANCE;
        let hit = |j: usize| pts[j].1 < d - 1e-9;
        let below = (0..i).rev().take_while(near).any(hit);
        let above = (i + 1..pts.len()).take_while(near).any(hit);
        passing[k] = below || above;
    }
    passing
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowerBoundRow {
    pub t: f64,
    /// Orbit count `N(t)`.
    pub n: u64,
    /// `N(t)` less the elements detected passing through an endpoint lift.
    pub m_est: u64,
    pub endpoint_hits: u64,
    /// `U(t / 2)`.
    pub u_half: f64,
    pub bound: f64,
    pub certified: bool,
}

/// Lower bounds `m(t) / (2 U(t/2))` on the blocking threshold over a grid.
pub fn certified_blocking_lower_bound(
    preset: &FuchsianPreset,
    x: Point,
    y: Point,
    grid: &[f64],
    mode: &BoundMode,
    budget: &OrbitBudget,
) -> Result<Vec<LowerBoundRow>> {
    if grid.is_empty() || grid.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(HyperbolicError::Domain("t grid must be non-empty, finite and non-negative".into()));
    }
    let t_max = grid.iter().copied().fold(0.0, f64::max);
    let ball_y = orbit_ball(preset, x, y, t_max, budget)?;
    let ball_x = orbit_ball(preset, x, x, t_max, budget)?;
    let passing = endpoint_passing(&ball_y, &ball_x);
    grid.iter()
        .map(|&t| {
            let n = ball_y.count(t);
            let hits = ball_y.elements[..n as usize].iter().zip(&passing).filter(|(_, &p)| p).count() as u64;
            let u = uniform_count_bound(preset, t / 2.0, mode, budget)?;
            let m_est = n - hits;
            Ok(LowerBoundRow {
                t,
                n,
                m_est,
                endpoint_hits: hits,
                u_half: u.value,
                bound: m_est as f64 / (2.0 * u.value),
                certified: ball_y.is_certified(t) && ball_x.is_certified(t) && !u.heuristic,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WordGroup {
    Free { rank: u32 },
    Abelian { rank: u32 },
}

fn binomial(n: u32, k: u32) -> BigUint {
    (0..k).fold(BigUint::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// Size of the ball of radius `n` in the word metric.
pub fn word_growth(group: WordGroup, n: u32) -> BigUint {
    match group {
        WordGroup::Free { rank } => {
            let k = BigUint::from(2 * rank);
            let mut total = BigUint::one();
            if rank == 0 {
                return total;
            }
            let mut sphere = k.clone();
            for _ in 0..n {
                total += &sphere;
                sphere = sphere * (&k - 1u32);
            }
            total
        }
        // points of Z^k with l1 norm <= n: choose j nonzero coordinates and signs
        WordGroup::Abelian { rank } => (0..=rank.min(n))
            .map(|j| BigUint::from(2u32).pow(j) * binomial(rank, j) * binomial(n, j))
            .sum(),
    }
}
