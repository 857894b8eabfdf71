use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde_json::{json, Value};

use super::commands::{base_context, cells, point_json, recursion_cells, rt};
use super::config::{ExperimentConfig, Geometry};
use super::report::{Check, Context, VerificationReport};
use super::{num, with_workers, HarnessError, Render};
use crate::blocker::{blocking_threshold, kappa_sq};
use crate::flatspace::{fmt_rational, to_f64, FlatSpace, Rational, RationalPoint};
use crate::growth::{transform, FnGrowth, TransformParams};
use crate::hyperbolic::{
    certified_blocking_lower_bound, uniform_count_bound, word_ball, word_growth, BoundMode, FuchsianPreset,
    LowerBoundRow, Point, PresetKind, WordGroup,
};

pub(crate) const SAMPLED_SUP: &str = "sampled-sup: S(t) uses the largest threshold over sampled pairs, a lower bound for the supremum over all pairs";

/// Word length up to which Schottky orbit counts are compared with the free
/// group formula.
const WORD_CHECK_LENGTH: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyRun {
    pub geometry: String,
    pub report: VerificationReport,
    pub details: Value,
}

impl Render for VerifyRun {
    fn to_json(&self) -> Value {
        json!({
            "command": "verify",
            "seed": self.report.seed,
            "geometry": self.geometry,
            "report": self.report,
            "details": self.details,
        })
    }

    fn to_csv(&self) -> Option<String> {
        Some(self.report.to_csv())
    }

    fn passed(&self) -> bool {
        self.report.all_passed()
    }
}

/// Evaluates the counting and blocking inequalities on freshly computed data.
pub fn cmd_verify(cfg: &ExperimentConfig) -> Result<VerifyRun, HarnessError> {
    match cfg.geometry()? {
        Geometry::Flat(space) => verify_flat(cfg, &space),
        Geometry::Hyperbolic(preset) => verify_hyperbolic(cfg, &preset),
    }
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    n: usize,
    m: usize,
    s: usize,
    optimal: bool,
}

/// Sampled blocking cost at one length scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct SampledScale {
    pub value: usize,
    pub certified: bool,
}

/// `prod_{k < kappa(t)} max(1, s(t / 2^k))` over the sampled cost.
pub(crate) fn sampled_s(space: &FlatSpace, t: Rational, cost: &BTreeMap<Rational, SampledScale>) -> f64 {
    let kappa = kappa_sq(t * t, space.delta2());
    let mut scale = t;
    let mut acc = 1.0;
    for _ in 0..kappa {
        acc *= cost[&scale].value.max(1) as f64;
        scale /= Rational::from_integer(2);
    }
    acc
}

/// Every grid value and every scale `t / 2^k` with `k < kappa(t)`.
pub(crate) fn needed_scales(space: &FlatSpace, grid: &[Rational]) -> BTreeSet<Rational> {
    let mut scales: BTreeSet<Rational> = grid.iter().copied().collect();
    for &t in grid {
        let mut scale = t;
        for _ in 0..kappa_sq(t * t, space.delta2()) {
            scales.insert(scale);
            scale /= Rational::from_integer(2);
        }
    }
    scales
}

fn verify_flat(cfg: &ExperimentConfig, space: &FlatSpace) -> Result<VerifyRun, HarnessError> {
    let grid = cfg.grid()?;
    let pairs = cfg.flat_pairs(space)?;
    let scales: Vec<Rational> = needed_scales(space, &grid).into_iter().collect();
    let work = cells(pairs.len(), scales.len());
    let results = with_workers(cfg.workers, || {
        work.par_iter()
            .map(|&(p, k)| {
                let (x, y) = pairs[p];
                let t = scales[k];
                let r = blocking_threshold(space, &x, &y, t * t, &cfg.caps)?;
                Ok(Cell { n: r.n, m: r.m, s: r.value, optimal: r.optimal })
            })
            .collect::<Result<Vec<_>, HarnessError>>()
    })??;
    let cell = |p: usize, t: &Rational| -> Cell {
        let k = scales.binary_search(t).expect("grid values are scales");
        results[p * scales.len() + k]
    };
    let cost: BTreeMap<Rational, SampledScale> = scales
        .iter()
        .map(|t| {
            let cs: Vec<Cell> = (0..pairs.len()).map(|p| cell(p, t)).collect();
            let value = cs.iter().map(|c| c.s).max().unwrap_or(0);
            (*t, SampledScale { value, certified: cs.iter().all(|c| c.optimal) })
        })
        .collect();

    let base = base_context(cfg);
    let delta2 = space.delta2();
    let delta = space.delta();
    let params = TransformParams::new(delta)?;
    let mut checks = Vec::new();
    let mut findings = Vec::new();
    let toggles = cfg.verify;

    for t in &grid {
        let tf = to_f64(t);
        let t_ctx = base.clone().with("t", rt(t)).with("t_exact", fmt_rational(t));
        if toggles.sampled_bounds {
            let s_exact = sampled_s(space, *t, &cost);
            let lookup = |u: f64| -> f64 {
                cost.iter()
                    .find(|(k, _)| (to_f64(k) - u).abs() <= 1e-12 * u)
                    .map_or(f64::NAN, |(_, c)| c.value.max(1) as f64)
            };
            let s_transform = transform(&FnGrowth(lookup), params, tf, None)?;
            checks.push(Check::with_pass(
                "sampled-cost-transform",
                "S(t) = prod_{k < kappa(t)} max(1, s(t/2^k)) agrees with the growth transform",
                s_exact,
                s_transform,
                (s_exact - s_transform).abs() <= 1e-9 * s_exact,
                t_ctx.clone(),
            ));
        }
        for (p, (x, y)) in pairs.iter().enumerate() {
            let c = cell(p, t);
            let ctx = pair_context(&t_ctx, p, x, y).with("optimal", c.optimal.to_string());
            if toggles.chain {
                checks.push(Check::leq("chain-s-m", "s_t(x,y) <= m_t(x,y)", c.s as f64, c.m as f64, ctx.clone()));
                checks.push(Check::leq("chain-m-n", "m_t(x,y) <= n_t(x,y)", c.m as f64, c.n as f64, ctx.clone()));
            }
            if toggles.doubling {
                let anchor = "n_t(x,y) <= t^2/(4 delta^2) m_t(x,y)";
                let lhs = Rational::from_integer(c.n as i128);
                let rhs = *t * *t / (Rational::from_integer(4) * delta2) * Rational::from_integer(c.m as i128);
                if *t * *t >= Rational::from_integer(4) * delta2 {
                    checks.push(Check::with_pass("doubling", anchor, to_f64(&lhs), to_f64(&rhs), lhs <= rhs, ctx.clone()));
                } else {
                    checks.push(Check::skipped("doubling", anchor, ctx.clone()).with_caveat("t < 2 delta"));
                    if lhs > rhs {
                        let ctx: Vec<String> = ["pair_index", "x", "y", "t"]
                            .iter()
                            .map(|k| format!("{k}={}", ctx.get(k).unwrap_or("")))
                            .collect();
                        findings.push(format!(
                            "doubling bound fails below its guard t >= 2 delta: n = {}, t^2/(4 delta^2) m = {} [{}]",
                            c.n,
                            crate::fmt_sig(to_f64(&rhs)),
                            ctx.join(", ")
                        ));
                    }
                }
            }
            if toggles.sampled_bounds {
                let s_total = sampled_s(space, *t, &cost);
                let kappa = kappa_sq(*t * *t, delta2);
                let anchor = "m_t(x,y) <= (2t/delta) S(t)";
                checks.push(if kappa > 0 {
                    Check::leq("length-bound-m", anchor, c.m as f64, 2.0 * tf / delta * s_total, ctx.clone())
                        .with_caveat(SAMPLED_SUP)
                        .heuristic()
                } else {
                    Check::skipped("length-bound-m", anchor, ctx.clone()).with_caveat("kappa(t) = 0")
                });
                let anchor = "n_t(x,y) <= t^3/(2 delta^3) S(t)";
                checks.push(if *t * *t >= Rational::from_integer(4) * delta2 {
                    Check::leq("length-bound-n", anchor, c.n as f64, tf.powi(3) / (2.0 * delta.powi(3)) * s_total, ctx)
                        .with_caveat(SAMPLED_SUP)
                        .heuristic()
                } else {
                    Check::skipped("length-bound-n", anchor, ctx).with_caveat("t < 2 delta")
                });
            }
        }
    }

    let mut trees = Vec::new();
    if toggles.recursion {
        let (t, c) = recursion_cells(cfg, space, &pairs, &grid, Some(cfg.recursion_max_t()?))?;
        trees = t;
        checks.extend(c);
    }
    let sampled: Vec<Value> = cost
        .iter()
        .map(|(t, c)| json!({ "t": num(to_f64(t)), "value": c.value, "certified": c.certified }))
        .collect();
    let details = json!({
        "delta": num(delta),
        "pairs": pairs.iter().map(|(x, y)| json!([point_json(x), point_json(y)])).collect::<Vec<_>>(),
        "sampled_cost": sampled,
        "recursion": trees,
    });
    let report = VerificationReport::new(cfg.seed, checks).with_findings(findings);
    Ok(VerifyRun { geometry: cfg.geometry.clone(), report, details })
}

fn pair_context(base: &Context, p: usize, x: &RationalPoint, y: &RationalPoint) -> Context {
    base.clone().with("pair_index", p.to_string()).with("x", x.to_string()).with("y", y.to_string())
}

/// The configured bound mode, replaced by the sampled bound where the
/// rigorous one does not apply.
pub(crate) fn effective_bound(cfg: &ExperimentConfig, preset: &FuchsianPreset) -> (BoundMode, Option<String>) {
    match (cfg.bound_mode(), preset.kind) {
        (BoundMode::Rigorous, PresetKind::Schottky) => (
            BoundMode::Empirical { seed: cfg.seed, samples: cfg.bound_samples },
            Some("no rigorous uniform count bound for an infinite-area quotient; using the sampled bound".into()),
        ),
        (mode, _) => (mode, None),
    }
}

pub(crate) fn lower_bound_json(rows: &[LowerBoundRow]) -> Vec<Value> {
    rows.iter()
        .map(|r| {
            json!({
                "t": num(r.t),
                "n": r.n,
                "m_est": r.m_est,
                "endpoint_hits": r.endpoint_hits,
                "u_half": num(r.u_half),
                "bound": num(r.bound),
                "certified": r.certified,
            })
        })
        .collect()
}

fn complex_string(z: Point) -> String {
    format!("{} + {}i", crate::fmt_sig(z.re), crate::fmt_sig(z.im))
}

fn verify_hyperbolic(cfg: &ExperimentConfig, preset: &FuchsianPreset) -> Result<VerifyRun, HarnessError> {
    let grid = cfg.grid_f64()?;
    let pairs = cfg.hyperbolic_pairs(preset)?;
    let base = base_context(cfg);
    let (mode, note) = effective_bound(cfg, preset);
    let mut checks = Vec::new();
    let mut findings: Vec<String> = note.into_iter().collect();
    let mut lower = Vec::new();
    if cfg.verify.hyperbolic && !grid.is_empty() {
        for (p, &(x, y)) in pairs.iter().enumerate() {
            let rows = with_workers(cfg.workers, || {
                certified_blocking_lower_bound(preset, x, y, &grid, &mode, &cfg.orbit_budget)
            })??;
            let ctx = base.clone().with("pair_index", p.to_string()).with("x", complex_string(x)).with("y", complex_string(y));
            for w in rows.windows(2) {
                checks.push(Check::leq(
                    "orbit-monotone",
                    "N(t) <= N(t') for t < t'",
                    w[0].n as f64,
                    w[1].n as f64,
                    ctx.clone().with("t", crate::fmt_sig(w[0].t)).with("t_next", crate::fmt_sig(w[1].t)),
                ));
            }
            for r in &rows {
                let c = ctx.clone().with("t", crate::fmt_sig(r.t)).with("certified", r.certified.to_string());
                checks.push(Check::leq("m-est-le-n", "m_est(t) <= N(t)", r.m_est as f64, r.n as f64, c));
                if r.endpoint_hits > 0 {
                    findings.push(format!(
                        "{} orbit elements pass through an endpoint at t = {} (pair {p})",
                        r.endpoint_hits,
                        crate::fmt_sig(r.t)
                    ));
                }
            }
            lower.push(json!({ "pair": p, "rows": lower_bound_json(&rows) }));
        }
        match preset.kind {
            PresetKind::Schottky => {
                let fresh = with_workers(cfg.workers, || word_ball(preset, WORD_CHECK_LENGTH, &cfg.orbit_budget))??;
                let mut total = 0u64;
                for (len, added) in fresh.iter().enumerate() {
                    total += added;
                    let want = word_growth(WordGroup::Free { rank: preset.rank() as u32 }, len as u32);
                    let want = want.to_string().parse::<f64>().unwrap_or(f64::INFINITY);
                    checks.push(Check::with_pass(
                        "free-word-growth",
                        "distinct elements of word length <= n equal 1 + sum_{j=1}^{n} 2k(2k-1)^{j-1}",
                        total as f64,
                        want,
                        total as f64 == want,
                        base.clone().with("n", len.to_string()),
                    ));
                }
            }
            PresetKind::Cocompact => {
                if matches!(mode, BoundMode::Rigorous) {
                    let r = grid[grid.len() - 1] / 2.0;
                    let sampled = BoundMode::Empirical { seed: cfg.seed, samples: cfg.bound_samples };
                    let (rig, emp) = with_workers(cfg.workers, || -> Result<_, HarnessError> {
                        Ok((
                            uniform_count_bound(preset, r, &BoundMode::Rigorous, &cfg.orbit_budget)?,
                            uniform_count_bound(preset, r, &sampled, &cfg.orbit_budget)?,
                        ))
                    })??;
                    checks.push(Check::leq(
                        "uniform-bound-dominates-samples",
                        "max over sampled (p,q) of #{g : d(p, g q) <= r} <= U(r)",
                        emp.value,
                        rig.value,
                        base.clone().with("r", crate::fmt_sig(r)),
                    ));
                }
            }
        }
    }
    let details = json!({
        "bound_mode": serde_json::to_value(mode).expect("bound mode serializes"),
        "lower_bound": lower,
    });
    let report = VerificationReport::new(cfg.seed, checks).with_findings(findings);
    Ok(VerifyRun { geometry: cfg.geometry.clone(), report, details })
}
