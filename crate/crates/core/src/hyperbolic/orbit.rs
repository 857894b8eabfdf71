//! Breadth-first enumeration of orbit points inside a ball.
//!
//! Both base points are first moved into the fundamental domain; counts are
//! unchanged because `g -> h_x^-1 g h_y` is a bijection.
//!
//! Cocompact presets prune with the tiling of a Dirichlet domain `F` centered
//! at `c` with circumradius `R` whose side pairings are the generators. For
//! `x, y` in `F`, the segment from `x` to `g y` crosses tiles
//! `h_0 F = F, ..., h_n F = g F` with each `h_{i+1} = h_i s` for a generator
//! `s`, and every `h_i` satisfies `d(x, h_i y) <= d(x, g y) + R + d(c, y)`.
//! Expanding a word only while `d(x, h y) - slack <= t` therefore reaches
//! every `g` with `d(x, g y) <= t`.
//!
//! Schottky presets prune with ping-pong: when `y` lies outside every
//! isometric disk, `w u y` lies in `w_1 ... w_{n-1} D(w_n)` for every reduced
//! extension `w u`, where `D(s)` is the disk `s` maps the outside into. The
//! distance from `x` to that half-plane bounds every extension from below.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    dist, inverse_letter, inverse_word, push_reduced, FuchsianPreset, HyperbolicError, Letter, MobiusMatrix, Point,
    PresetKind, Result,
};
use crate::growth::GrowthSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OrbitBudget {
    pub max_word_length: usize,
    /// Distinct group elements generated before giving up.
    pub max_elements: usize,
}

impl Default for OrbitBudget {
    fn default() -> Self {
        Self { max_word_length: 64, max_elements: 4_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitElement {
    pub word: Vec<Letter>,
    pub matrix: MobiusMatrix,
    /// `d(x, g y)`.
    pub displacement: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CountRow {
    pub t: f64,
    pub count: u64,
    pub certified: bool,
}

/// Orbit points `g y` within `radius` of `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitBall {
    pub x: Point,
    pub y: Point,
    pub radius: f64,
    /// Sorted by displacement, then word.
    pub elements: Vec<OrbitElement>,
    /// Counts are exact for `t` below this value.
    pub certified_radius: f64,
    /// False when the pruning rule is only a heuristic for this preset and
    /// base point.
    pub rigorous: bool,
    pub slack: f64,
    pub depth: usize,
    pub generated: usize,
}

impl OrbitBall {
    pub fn count(&self, t: f64) -> u64 {
        self.elements.partition_point(|e| e.displacement <= t) as u64
    }

    pub fn is_certified(&self, t: f64) -> bool {
        self.rigorous && t <= self.radius && t < self.certified_radius
    }

    pub fn counts(&self, grid: &[f64]) -> Vec<CountRow> {
        grid.iter().map(|&t| CountRow { t, count: self.count(t), certified: self.is_certified(t) }).collect()
    }
}

/// Positive part of a count table as a monotone series.
pub fn count_series(rows: &[CountRow]) -> Result<GrowthSeries> {
    let samples = rows.iter().filter(|r| r.t > 0.0 && r.count > 0).map(|r| (r.t, r.count as f64)).collect();
    Ok(GrowthSeries::new(samples, true)?)
}

enum Pruning {
    Slack(f64),
    HalfPlanes(Vec<(f64, f64)>),
}

struct Node {
    word: Vec<Letter>,
    m: MobiusMatrix,
    disp: f64,
    /// Lower bound on the displacement of anything found only through this
    /// node.
    reach: f64,
}

fn disk_distance(z: Point, (c, r): (f64, f64)) -> f64 {
    let e = (z - c).norm();
    if e <= r {
        0.0
    } else {
        ((e * e - r * r) / (2.0 * r * z.im)).asinh()
    }
}

/// Quantized lookup of group elements up to sign.
struct ElementIndex {
    cells: HashMap<(i64, i64), Vec<MobiusMatrix>>,
    len: usize,
}

const CELL: f64 = 1e-3;

impl ElementIndex {
    fn new() -> Self {
        Self { cells: HashMap::new(), len: 0 }
    }

    fn key(m: &MobiusMatrix) -> (i64, i64) {
        ((m.a / CELL).round() as i64, (m.b / CELL).round() as i64)
    }

    /// Inserts `m` unless an equal element is present; returns whether it
    /// was new.
    fn insert(&mut self, m: MobiusMatrix) -> bool {
        let m = m.normalized();
        let (ka, kb) = Self::key(&m);
        for da in -1..=1 {
            for db in -1..=1 {
                if let Some(list) = self.cells.get(&(ka + da, kb + db)) {
                    if list.iter().any(|o| o.same_element(&m)) {
                        return false;
                    }
                }
            }
        }
        // the other sign normalizes identically except near-zero leads
        let n = m.neg();
        if let Some(list) = self.cells.get(&Self::key(&n)) {
            if list.iter().any(|o| o.same_element(&n)) {
                return false;
            }
        }
        self.cells.entry((ka, kb)).or_default().push(m);
        self.len += 1;
        true
    }
}

fn check_point(z: Point) -> Result<()> {
    if z.im > 0.0 && z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(HyperbolicError::Domain(format!("{z} is not in the upper half-plane")))
    }
}

/// Enumerates `{g : d(x, g y) <= radius}`.
///
/// When the word-length budget runs out first, the ball is returned with a
/// `certified_radius` below `radius`.
pub fn orbit_ball(
    preset: &FuchsianPreset,
    x: Point,
    y: Point,
    radius: f64,
    budget: &OrbitBudget,
) -> Result<OrbitBall> {
    check_point(x)?;
    check_point(y)?;
    if !(radius >= 0.0 && radius.is_finite()) {
        return Err(HyperbolicError::Domain(format!("radius must be finite and non-negative, got {radius}")));
    }
    let reduced = match (preset.reduce_point(x)?, preset.reduce_point(y)?) {
        (Some(a), Some(b)) => Some((a, b)),
        _ => None,
    };
    let (x0, y0) = match &reduced {
        Some(((_, a), (_, b))) => (*a, *b),
        None => (x, y),
    };
    let (pruning, rigorous, slack) = match (preset.kind, &reduced) {
        (PresetKind::Cocompact, Some(_)) => {
            // x0 lies in the domain, so the tile path starts at the identity
            let s = preset.domain_radius.expect("reduction implies a domain") + dist(preset.center, y0);
            (Pruning::Slack(s), true, s)
        }
        (PresetKind::Schottky, Some(_)) => (Pruning::HalfPlanes(preset.target_disks()), true, 0.0),
        _ => {
            let s = preset.max_generator_displacement(y);
            (Pruning::Slack(s), false, s)
        }
    };
    let dedup = preset.kind == PresetKind::Cocompact;
    let letters = preset.letters();
    let mut index = ElementIndex::new();
    index.insert(MobiusMatrix::IDENTITY);
    let d0 = dist(x0, y0);
    let root_reach = match pruning {
        Pruning::Slack(s) => d0 - s,
        Pruning::HalfPlanes(_) => 0.0,
    };
    let mut level = vec![Node { word: Vec::new(), m: MobiusMatrix::IDENTITY, disp: d0, reach: root_reach }];
    let mut kept = Vec::new();
    let mut certified_radius = f64::INFINITY;
    let mut generated = 1usize;
    let mut depth = 0;
    loop {
        kept.extend(level.iter().filter(|n| n.disp <= radius).map(|n| OrbitElement {
            word: n.word.clone(),
            matrix: n.m.normalized(),
            displacement: n.disp,
        }));
        let expand: Vec<&Node> = level.iter().filter(|n| n.reach <= radius).collect();
        if expand.is_empty() {
            break;
        }
        if depth == budget.max_word_length {
            certified_radius = expand.iter().map(|n| n.reach).fold(f64::INFINITY, f64::min);
            break;
        }
        let children: Vec<Vec<Node>> = expand
            .par_iter()
            .map(|n| {
                let back = n.word.last().map(|&l| inverse_letter(l));
                let inv_x = match pruning {
                    Pruning::HalfPlanes(_) => n.m.inverse().apply(x0),
                    Pruning::Slack(_) => x0,
                };
                (0..letters.len() as Letter)
                    .filter(|&s| Some(s) != back)
                    .map(|s| {
                        let m = n.m * letters[s as usize];
                        let disp = dist(x0, m.apply(y0));
                        let reach = match &pruning {
                            Pruning::Slack(sl) => disp - sl,
                            Pruning::HalfPlanes(disks) => disk_distance(inv_x, disks[s as usize]),
                        };
                        let mut word = n.word.clone();
                        word.push(s);
                        Node { word, m, disp, reach }
                    })
                    .collect()
            })
            .collect();
        let mut next = Vec::new();
        for c in children.into_iter().flatten() {
            if dedup && !index.insert(c.m) {
                continue;
            }
            generated += 1;
            if generated > budget.max_elements {
                return Err(HyperbolicError::ResourceCap(format!(
                    "more than {} group elements at word length {}",
                    budget.max_elements,
                    depth + 1
                )));
            }
            next.push(c);
        }
        level = next;
        depth += 1;
    }
    if let Some(((hx, _), (hy, _))) = &reduced {
        // g' in the reduced frame is h_x g' h_y^-1 in the original one
        let (mx, my) = (preset.word_matrix(hx), preset.word_matrix(hy).inverse());
        let tail = inverse_word(hy);
        for e in &mut kept {
            let mut word = hx.clone();
            for &l in e.word.iter().chain(&tail) {
                push_reduced(&mut word, l);
            }
            e.word = word;
            e.matrix = (mx * e.matrix * my).normalized();
        }
    }
    kept.sort_by(|a, b| a.displacement.total_cmp(&b.displacement).then_with(|| a.word.cmp(&b.word)));
    Ok(OrbitBall { x, y, radius, elements: kept, certified_radius, rigorous, slack, depth, generated })
}

/// Exact counts `N(t) = #{g : d(x, g y) <= t}` over a grid.
///
/// Errors when the budget cannot certify the largest grid value. With a
/// heuristic pruning rule the rows come back uncertified instead.
pub fn orbit_count(
    preset: &FuchsianPreset,
    x: Point,
    y: Point,
    grid: &[f64],
    budget: &OrbitBudget,
) -> Result<Vec<CountRow>> {
    let t_max = grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if grid.is_empty() || grid.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(HyperbolicError::Domain("t grid must be non-empty, finite and non-negative".into()));
    }
    let ball = orbit_ball(preset, x, y, t_max, budget)?;
    if ball.rigorous && ball.certified_radius <= t_max {
        return Err(HyperbolicError::BudgetExceeded { certified: ball.certified_radius, requested: t_max });
    }
    Ok(ball.counts(grid))
}

/// Number of new group elements first reached at each word length
/// `0..=max_len`, deduplicated by matrix.
pub fn word_ball(preset: &FuchsianPreset, max_len: usize, budget: &OrbitBudget) -> Result<Vec<u64>> {
    let letters = preset.letters();
    let mut index = ElementIndex::new();
    index.insert(MobiusMatrix::IDENTITY);
    let mut level: Vec<(MobiusMatrix, Option<Letter>)> = vec![(MobiusMatrix::IDENTITY, None)];
    let mut counts = vec![1u64];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (m, last) in &level {
            for s in 0..letters.len() as Letter {
                if Some(inverse_letter(s)) == *last {
                    continue;
                }
                let c = *m * letters[s as usize];
                if index.insert(c) {
                    next.push((c, Some(s)));
                }
            }
        }
        if index.len > budget.max_elements {
            return Err(HyperbolicError::ResourceCap(format!("more than {} group elements", budget.max_elements)));
        }
        counts.push(next.len() as u64);
        level = next;
    }
    Ok(counts)
}
