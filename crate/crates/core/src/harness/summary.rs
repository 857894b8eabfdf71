use rayon::prelude::*;
use serde_json::{json, Value};

use super::commands::{cells, fit_json, fit_or_note, fit_or_note_class};
use super::config::{ExperimentConfig, Geometry};
use super::verify::{effective_bound, lower_bound_json};
use super::{num, opt_num, with_workers, HarnessError, Render};
use crate::blocker::blocking_threshold;
use crate::flatspace::{count, to_f64, FlatSpace};
use crate::growth::{GrowthClass, GrowthSeries, RateMode};
use crate::hyperbolic::{certified_blocking_lower_bound, count_series, entropy_estimate, FuchsianPreset, PresetKind};

pub const CONSISTENT: &str = "consistent with theorem at desk scale";
pub const INCONSISTENT: &str = "inconsistent with theorem at desk scale";
pub const INSUFFICIENT: &str = "insufficient data";

/// Largest exponential rate of the flat counts still read as zero entropy.
pub const FLAT_ENTROPY_TOLERANCE: f64 = 0.05;

/// Growth summary for one geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub seed: u64,
    pub geometry: String,
    pub verdict: String,
    /// Some field could not be estimated and is null.
    pub partial: bool,
    pub body: Value,
}

impl Render for RunSummary {
    fn to_json(&self) -> Value {
        let mut v = self.body.clone();
        let obj = v.as_object_mut().expect("summary body is an object");
        obj.insert("command".into(), json!("report"));
        obj.insert("seed".into(), json!(self.seed));
        obj.insert("geometry".into(), json!(self.geometry));
        obj.insert("verdict".into(), json!(self.verdict));
        obj.insert("partial".into(), json!(self.partial));
        v
    }
}

fn rate(fit: &Option<GrowthClass>) -> Option<f64> {
    fit.as_ref().and_then(|c| c.kind.parameter())
}

/// Measured growth rates next to what the theory predicts for the geometry.
pub fn cmd_report(cfg: &ExperimentConfig) -> Result<RunSummary, HarnessError> {
    match cfg.geometry()? {
        Geometry::Flat(space) => report_flat(cfg, &space),
        Geometry::Hyperbolic(preset) => report_hyperbolic(cfg, &preset),
    }
}

fn report_flat(cfg: &ExperimentConfig, space: &FlatSpace) -> Result<RunSummary, HarnessError> {
    let grid = cfg.grid()?;
    let pairs = cfg.flat_pairs(space)?;
    let block_max = cfg.block_max_t()?;
    let block_grid: Vec<_> = grid.iter().copied().filter(|t| *t <= block_max).collect();
    let (counts, thresholds) = with_workers(cfg.workers, || -> Result<_, HarnessError> {
        let counts = cells(pairs.len(), grid.len())
            .par_iter()
            .map(|&(p, k)| {
                let (x, y) = pairs[p];
                Ok(count(space, &x, &y, grid[k] * grid[k])?.0)
            })
            .collect::<Result<Vec<_>, HarnessError>>()?;
        let thresholds = cells(pairs.len(), block_grid.len())
            .par_iter()
            .map(|&(p, k)| {
                let (x, y) = pairs[p];
                let r = blocking_threshold(space, &x, &y, block_grid[k] * block_grid[k], &cfg.caps)?;
                Ok((r.value, r.optimal))
            })
            .collect::<Result<Vec<_>, HarnessError>>()?;
        Ok((counts, thresholds))
    })??;

    let n_max: Vec<(f64, usize)> = grid
        .iter()
        .enumerate()
        .map(|(k, t)| (to_f64(t), (0..pairs.len()).map(|p| counts[p * grid.len() + k]).max().unwrap_or(0)))
        .collect();
    let positive: Vec<(f64, f64)> = n_max.iter().filter(|r| r.0 > 0.0 && r.1 > 0).map(|r| (r.0, r.1 as f64)).collect();
    let series = GrowthSeries::new(positive, true);
    let (h_fit, h_note) = fit_or_note(series.clone().map_err(Into::into), RateMode::Exponential)?;
    let (deg_fit, _) = fit_or_note(series.map_err(Into::into), RateMode::Polynomial)?;
    let cost: Vec<Value> = block_grid
        .iter()
        .enumerate()
        .map(|(k, t)| {
            let cs: Vec<(usize, bool)> = (0..pairs.len()).map(|p| thresholds[p * block_grid.len() + k]).collect();
            json!({
                "t": num(to_f64(t)),
                "value": cs.iter().map(|c| c.0).max().unwrap_or(0),
                "certified": cs.iter().all(|c| c.1),
            })
        })
        .collect();
    let threshold_max = thresholds.iter().map(|c| c.0).max();
    let midpoint_bound = space.basis().map(|_| 4usize);
    let h_est = rate(&h_fit);
    let verdict = match (h_est, threshold_max) {
        (Some(h), Some(s)) => {
            if h <= FLAT_ENTROPY_TOLERANCE && midpoint_bound.map_or(true, |b| s <= b) {
                CONSISTENT
            } else {
                INCONSISTENT
            }
        }
        _ => INSUFFICIENT,
    };
    let body = json!({
        "kind": "flat",
        "delta": num(space.delta()),
        "pairs": pairs.len(),
        "counts": n_max.iter().map(|(t, n)| json!({"t": num(*t), "n_max": n})).collect::<Vec<_>>(),
        "h_est": opt_num(h_est),
        "h_fit": fit_json(&h_fit),
        "degree_est": opt_num(rate(&deg_fit)),
        "note": h_note,
        "sampled_cost": cost,
        "threshold_max": threshold_max,
        "midpoint_bound": midpoint_bound,
        "claim": "zero entropy and bounded blocking thresholds: the flat surface is uniformly secure",
    });
    Ok(RunSummary {
        seed: cfg.seed,
        geometry: cfg.geometry.clone(),
        verdict: verdict.into(),
        partial: h_est.is_none() || threshold_max.is_none(),
        body,
    })
}

/// First index from which `values` strictly increase to the end.
fn increasing_from(values: &[f64]) -> Option<usize> {
    if values.len() < 2 {
        return None;
    }
    let mut start = values.len() - 1;
    while start > 0 && values[start - 1] < values[start] {
        start -= 1;
    }
    (start < values.len() - 1).then_some(start)
}

fn report_hyperbolic(cfg: &ExperimentConfig, preset: &FuchsianPreset) -> Result<RunSummary, HarnessError> {
    let grid = cfg.grid_f64()?;
    let (x, y) = cfg.hyperbolic_pairs(preset)?[0];
    let (mode, note) = effective_bound(cfg, preset);
    let rows = if grid.is_empty() {
        Vec::new()
    } else {
        with_workers(cfg.workers, || certified_blocking_lower_bound(preset, x, y, &grid, &mode, &cfg.orbit_budget))??
    };
    let count_rows: Vec<_> = rows
        .iter()
        .map(|r| crate::hyperbolic::CountRow { t: r.t, count: r.n, certified: r.certified })
        .collect();
    let n_fit = count_series(&count_rows).map_err(HarnessError::from).and_then(|s| Ok(entropy_estimate(&s)?));
    let (n_fit, n_note) = fit_or_note_class(n_fit)?;
    let lb: Vec<(f64, f64)> = rows.iter().filter(|r| r.certified && r.bound > 0.0).map(|r| (r.t, r.bound)).collect();
    let (lb_fit, lb_note) = fit_or_note(GrowthSeries::new(lb.clone(), false).map_err(Into::into), RateMode::Exponential)?;
    let rate_n = rate(&n_fit);
    let lb_rate = rate(&lb_fit);
    let ratio = match (rate_n, lb_rate) {
        (Some(n), Some(l)) if n > 0.0 => Some(l / n),
        _ => None,
    };
    let values: Vec<f64> = lb.iter().map(|r| r.1).collect();
    let from = increasing_from(&values);
    let exceeds_one = lb.iter().find(|r| r.1 > 1.0).map(|r| r.0);
    let verdict = match (rate_n, lb_rate) {
        (Some(_), Some(l)) => {
            if l > 0.0 && from.is_some() && exceeds_one.is_some() {
                CONSISTENT
            } else {
                INCONSISTENT
            }
        }
        _ => INSUFFICIENT,
    };
    let notes: Vec<String> = [n_note, lb_note].into_iter().flatten().collect();
    let body = json!({
        "kind": "hyperbolic",
        "preset_kind": if preset.kind == PresetKind::Cocompact { "cocompact" } else { "schottky" },
        "pair": [[num(x.re), num(x.im)], [num(y.re), num(y.im)]],
        "bound_mode": serde_json::to_value(mode).expect("bound mode serializes"),
        "bound_note": note,
        "volume_entropy": if preset.kind == PresetKind::Cocompact { json!(1.0) } else { Value::Null },
        "rate_n": opt_num(rate_n),
        "rate_n_fit": fit_json(&n_fit),
        "lb_rate": opt_num(lb_rate),
        "lb_fit": fit_json(&lb_fit),
        "ratio": opt_num(ratio),
        "ratio_to_half_rate": opt_num(ratio.map(|r| 2.0 * r)),
        "increasing_from": opt_num(from.map(|i| lb[i].0)),
        "first_t_above_one": opt_num(exceeds_one),
        "notes": notes,
        "lower_bound": lower_bound_json(&rows),
        "claim": "blocking thresholds grow at an exponential rate bounded below by a fixed fraction of the counting rate",
    });
    Ok(RunSummary {
        seed: cfg.seed,
        geometry: cfg.geometry.clone(),
        verdict: verdict.into(),
        partial: rate_n.is_none() || lb_rate.is_none(),
        body,
    })
}
