use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::config::{ExperimentConfig, Geometry};
use super::report::{Context, VerificationReport};
use super::{csv_field, num, opt_num, with_workers, HarnessError, Render};
use crate::blocker::{build_instance, instance_json, recursion_harness, threshold_of, RecursionTree};
use crate::flatspace::{count, parse_rational, to_f64, FlatSpace, Rational, RationalPoint};
use crate::growth::{
    kappa_exact, log_transform, rate_estimate, ClosedForm, GrowthClass, GrowthError, GrowthSeries, LnFnGrowth,
    RateMode, TransformParams, DEFAULT_TAIL_FRACTION,
};
use crate::hyperbolic::{count_series, entropy_estimate, orbit_ball, CountRow, Point, PresetKind};
use crate::fmt_sig;

pub(crate) fn point_json(p: &RationalPoint) -> Value {
    let [a, b] = p.to_f64();
    json!([num(a), num(b)])
}

pub(crate) fn complex_json(z: Point) -> Value {
    json!([num(z.re), num(z.im)])
}

pub(crate) fn rt(t: &Rational) -> String {
    fmt_sig(to_f64(t))
}

/// Every `(pair, t)` cell in pair-major order.
pub(crate) fn cells(pairs: usize, grid: usize) -> Vec<(usize, usize)> {
    (0..pairs).flat_map(|p| (0..grid).map(move |k| (p, k))).collect()
}

pub(crate) fn base_context(cfg: &ExperimentConfig) -> Context {
    Context::new().with("geometry", cfg.geometry.clone()).with("seed", cfg.seed.to_string())
}

pub(crate) fn flat_space(cfg: &ExperimentConfig, command: &str) -> Result<FlatSpace, HarnessError> {
    match cfg.geometry()? {
        Geometry::Flat(space) => Ok(space),
        Geometry::Hyperbolic(_) => Err(HarnessError::Config(format!(
            "`{command}` needs a flat geometry; blocking sets are not computed on hyperbolic surfaces"
        ))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlatCountRow {
    pub pair: usize,
    pub x: RationalPoint,
    pub y: RationalPoint,
    pub t: Rational,
    /// `(n, m)` or the engine error.
    pub counts: Result<(usize, usize), String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HyperbolicCountRow {
    pub pair: usize,
    pub x: Point,
    pub y: Point,
    pub row: CountRow,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CountRows {
    Flat(Vec<FlatCountRow>),
    Hyperbolic(Vec<HyperbolicCountRow>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountTable {
    pub seed: u64,
    pub geometry: String,
    pub rows: CountRows,
}

/// `(t, n, m)` per pair on flat geometries, orbit counts on hyperbolic ones.
pub fn cmd_count(cfg: &ExperimentConfig) -> Result<CountTable, HarnessError> {
    let grid = cfg.grid()?;
    let rows = match cfg.geometry()? {
        Geometry::Flat(space) => {
            let pairs = cfg.flat_pairs(&space)?;
            let cells = cells(pairs.len(), grid.len());
            let rows = with_workers(cfg.workers, || {
                cells
                    .par_iter()
                    .map(|&(p, k)| {
                        let (x, y) = pairs[p];
                        let t = grid[k];
                        FlatCountRow { pair: p, x, y, t, counts: count(&space, &x, &y, t * t).map_err(|e| e.to_string()) }
                    })
                    .collect()
            })?;
            CountRows::Flat(rows)
        }
        Geometry::Hyperbolic(preset) => {
            let pairs = cfg.hyperbolic_pairs(&preset)?;
            let grid: Vec<f64> = grid.iter().map(to_f64).collect();
            let mut rows = Vec::new();
            if let Some(&t_max) = grid.last() {
                for (p, &(x, y)) in pairs.iter().enumerate() {
                    let ball = with_workers(cfg.workers, || orbit_ball(&preset, x, y, t_max, &cfg.orbit_budget))??;
                    rows.extend(ball.counts(&grid).into_iter().map(|row| HyperbolicCountRow { pair: p, x, y, row }));
                }
            }
            CountRows::Hyperbolic(rows)
        }
    };
    Ok(CountTable { seed: cfg.seed, geometry: cfg.geometry.clone(), rows })
}

impl Render for CountTable {
    fn to_json(&self) -> Value {
        let rows: Vec<Value> = match &self.rows {
            CountRows::Flat(rows) => rows
                .iter()
                .map(|r| {
                    let (n, m, status) = match &r.counts {
                        Ok((n, m)) => (json!(n), json!(m), "ok".to_string()),
                        Err(e) => (Value::Null, Value::Null, format!("error: {e}")),
                    };
                    json!({
                        "pair": r.pair,
                        "x": point_json(&r.x),
                        "y": point_json(&r.y),
                        "t": num(to_f64(&r.t)),
                        "n": n,
                        "m": m,
                        "status": status,
                    })
                })
                .collect(),
            CountRows::Hyperbolic(rows) => rows
                .iter()
                .map(|r| {
                    json!({
                        "pair": r.pair,
                        "x": complex_json(r.x),
                        "y": complex_json(r.y),
                        "t": num(r.row.t),
                        "count": r.row.count,
                        "certified": r.row.certified,
                    })
                })
                .collect(),
        };
        json!({ "command": "count", "seed": self.seed, "geometry": self.geometry, "rows": rows })
    }

    fn to_csv(&self) -> Option<String> {
        let mut out = String::new();
        match &self.rows {
            CountRows::Flat(rows) => {
                out.push_str("pair,x1,x2,y1,y2,t,n,m,status,seed\n");
                for r in rows {
                    let [x1, x2] = r.x.to_f64();
                    let [y1, y2] = r.y.to_f64();
                    let (n, m, status) = match &r.counts {
                        Ok((n, m)) => (n.to_string(), m.to_string(), "ok".to_string()),
                        Err(e) => (String::new(), String::new(), format!("error: {e}")),
                    };
                    out.push_str(&format!(
                        "{},{},{},{},{},{},{},{},{},{}\n",
                        r.pair,
                        fmt_sig(x1),
                        fmt_sig(x2),
                        fmt_sig(y1),
                        fmt_sig(y2),
                        rt(&r.t),
                        n,
                        m,
                        csv_field(&status),
                        self.seed
                    ));
                }
            }
            CountRows::Hyperbolic(rows) => {
                out.push_str("pair,t,count,certified,seed\n");
                for r in rows {
                    out.push_str(&format!(
                        "{},{},{},{},{}\n",
                        r.pair,
                        fmt_sig(r.row.t),
                        r.row.count,
                        r.row.certified,
                        self.seed
                    ));
                }
            }
        }
        Some(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockRun {
    pub seed: u64,
    pub geometry: String,
    pub instances: Vec<Value>,
}

/// Incidence instances with their minimal blocking sets.
pub fn cmd_block(cfg: &ExperimentConfig) -> Result<BlockRun, HarnessError> {
    let space = flat_space(cfg, "block")?;
    let grid = cfg.grid()?;
    let pairs = cfg.flat_pairs(&space)?;
    let cells = cells(pairs.len(), grid.len());
    let instances = with_workers(cfg.workers, || {
        cells
            .par_iter()
            .map(|&(p, k)| {
                let (x, y) = pairs[p];
                let t = grid[k];
                let instance = build_instance(&space, &x, &y, t * t)?;
                let result = threshold_of(&space, &instance, &cfg.caps)?;
                let mut v = instance_json(&instance, Some(&result.solution));
                let obj = v.as_object_mut().expect("instance json is an object");
                obj.insert("pair".into(), json!(p));
                obj.insert("x".into(), point_json(&x));
                obj.insert("y".into(), point_json(&y));
                obj.insert("t".into(), num(to_f64(&t)));
                obj.insert("n".into(), json!(result.n));
                obj.insert("m".into(), json!(result.m));
                obj.insert("threshold".into(), json!(result.value));
                obj.insert("optimal".into(), json!(result.optimal));
                Ok(v)
            })
            .collect::<Result<Vec<_>, HarnessError>>()
    })??;
    Ok(BlockRun { seed: cfg.seed, geometry: cfg.geometry.clone(), instances })
}

impl Render for BlockRun {
    fn to_json(&self) -> Value {
        json!({ "command": "block", "seed": self.seed, "geometry": self.geometry, "instances": self.instances })
    }
}

pub(crate) fn tree_json(pair: usize, tree: &RecursionTree) -> Value {
    let levels: Vec<Value> = tree
        .levels
        .iter()
        .map(|l| {
            json!({
                "k": l.k,
                "t": num(to_f64(&l.t2).sqrt()),
                "pairs": l.pairs.len(),
                "count_sum": l.count_sum(),
                "max_threshold": if l.thresholds.is_empty() { Value::Null } else { json!(l.max_threshold()) },
                "optimal": l.optimal,
            })
        })
        .collect();
    json!({
        "pair": pair,
        "x": point_json(&tree.x),
        "y": point_json(&tree.y),
        "t": num(to_f64(&tree.t2).sqrt()),
        "kappa": tree.kappa,
        "m": tree.m_t(),
        "certified": tree.certified,
        "levels": levels,
    })
}

/// Recursion trees and their level checks for every `(pair, t)` with
/// `0 < t <= limit`.
pub(crate) fn recursion_cells(
    cfg: &ExperimentConfig,
    space: &FlatSpace,
    pairs: &[(RationalPoint, RationalPoint)],
    grid: &[Rational],
    limit: Option<Rational>,
) -> Result<(Vec<Value>, Vec<super::Check>), HarnessError> {
    let grid: Vec<Rational> =
        grid.iter().copied().filter(|t| limit.map_or(true, |l| *t <= l)).collect();
    let cells = cells(pairs.len(), grid.len());
    let base = base_context(cfg);
    let results = with_workers(cfg.workers, || {
        cells
            .par_iter()
            .map(|&(p, k)| {
                let (x, y) = pairs[p];
                let t = grid[k];
                let (tree, checks) = recursion_harness(space, &x, &y, t * t, &cfg.caps)?;
                let ctx = base.clone().with("pair_index", p.to_string());
                let checks: Vec<_> = checks.into_iter().map(|c| c.with_context(&ctx)).collect();
                Ok((tree_json(p, &tree), checks))
            })
            .collect::<Result<Vec<_>, HarnessError>>()
    })??;
    let mut trees = Vec::new();
    let mut checks = Vec::new();
    for (tree, c) in results {
        trees.push(tree);
        checks.extend(c);
    }
    Ok((trees, checks))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecursionRun {
    pub geometry: String,
    pub trees: Vec<Value>,
    pub report: VerificationReport,
}

/// Recursive splitting through minimal blocking sets, with its counting
/// inequalities checked level by level.
pub fn cmd_recursion(cfg: &ExperimentConfig) -> Result<RecursionRun, HarnessError> {
    let space = flat_space(cfg, "recursion-check")?;
    let pairs = cfg.flat_pairs(&space)?;
    let (trees, checks) = recursion_cells(cfg, &space, &pairs, &cfg.grid()?, None)?;
    Ok(RecursionRun { geometry: cfg.geometry.clone(), trees, report: VerificationReport::new(cfg.seed, checks) })
}

impl Render for RecursionRun {
    fn to_json(&self) -> Value {
        json!({
            "command": "recursion-check",
            "seed": self.report.seed,
            "geometry": self.geometry,
            "trees": self.trees,
            "report": self.report,
        })
    }

    fn to_csv(&self) -> Option<String> {
        Some(self.report.to_csv())
    }

    fn passed(&self) -> bool {
        self.report.all_passed()
    }
}

enum TransformInput {
    Closed(ClosedForm),
    Exp(f64),
    Series(GrowthSeries),
}

fn big(r: &Rational) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

fn parse_function(spec: &str) -> Result<TransformInput, HarnessError> {
    let bad = || HarnessError::Config(format!("unknown transform function `{spec}`"));
    let rat = |s: &str| -> Result<BigRational, HarnessError> {
        Ok(big(&parse_rational(s).map_err(|e| HarnessError::Config(format!("transform function: {e}")))?))
    };
    let parts: Vec<&str> = spec.trim().splitn(2, ':').collect();
    let input = match (parts[0], parts.get(1).copied()) {
        ("const", Some(c)) => TransformInput::Closed(ClosedForm::Constant(rat(c)?)),
        ("linear", None) => TransformInput::Closed(ClosedForm::Linear(BigRational::from_integer(1.into()))),
        ("linear", Some(c)) => TransformInput::Closed(ClosedForm::Linear(rat(c)?)),
        ("monomial", Some(rest)) => {
            let (c, p) = rest.split_once(':').ok_or_else(bad)?;
            let power = p.trim().parse::<u32>().map_err(|_| bad())?;
            TransformInput::Closed(ClosedForm::Monomial { coefficient: rat(c)?, power })
        }
        ("exp", Some(a)) => TransformInput::Exp(a.trim().parse::<f64>().map_err(|_| bad())?),
        ("series", Some(path)) => {
            let file = std::fs::File::open(path.trim())
                .map_err(|e| HarnessError::Config(format!("transform series {path}: {e}")))?;
            TransformInput::Series(GrowthSeries::read_csv(std::io::BufReader::new(file), false)?)
        }
        _ => return Err(bad()),
    };
    Ok(input)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransformRow {
    pub t: f64,
    pub kappa: u32,
    pub value: f64,
    pub ln_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransformTable {
    pub seed: u64,
    pub function: String,
    pub delta: f64,
    pub rows: Vec<TransformRow>,
}

/// The dyadic transform of the configured function on the t grid. Closed
/// forms are evaluated in exact arithmetic.
pub fn cmd_transform(cfg: &ExperimentConfig) -> Result<TransformTable, HarnessError> {
    let input = parse_function(&cfg.transform.function)?;
    let delta_r = parse_rational(&cfg.transform.delta.0).map_err(|e| HarnessError::Config(format!("delta: {e}")))?;
    let params = TransformParams::new(to_f64(&delta_r)).map_err(|e| HarnessError::Config(e.to_string()))?;
    let delta = big(&delta_r);
    let grid = cfg.grid()?;
    let rows = grid
        .iter()
        .map(|t| {
            let tb = big(t);
            let tf = to_f64(t);
            let k = kappa_exact(&tb, &delta)?;
            let (value, ln_value) = match &input {
                TransformInput::Closed(cf) => {
                    let exact = cf.exact_transform(&tb, &delta, Some(k))?;
                    let ln = log_transform(cf, params, tf, Some(k))?;
                    (crate::growth::rational_to_f64(&exact), ln)
                }
                TransformInput::Exp(a) => {
                    let ln = log_transform(&LnFnGrowth(|s: f64| a * s), params, tf, Some(k))?;
                    (ln.exp(), ln)
                }
                TransformInput::Series(s) => {
                    let ln = log_transform(s, params, tf, Some(k))?;
                    (ln.exp(), ln)
                }
            };
            Ok(TransformRow { t: tf, kappa: k, value, ln_value })
        })
        .collect::<Result<Vec<_>, GrowthError>>()?;
    Ok(TransformTable { seed: cfg.seed, function: cfg.transform.function.clone(), delta: params.delta(), rows })
}

impl Render for TransformTable {
    fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| json!({ "t": num(r.t), "kappa": r.kappa, "value": num(r.value), "ln_value": num(r.ln_value) }))
            .collect();
        json!({
            "command": "transform",
            "seed": self.seed,
            "function": self.function,
            "delta": num(self.delta),
            "rows": rows,
        })
    }

    fn to_csv(&self) -> Option<String> {
        let mut out = String::from("t,kappa,value,ln_value,seed\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt_sig(r.t),
                r.kappa,
                fmt_sig(r.value),
                fmt_sig(r.ln_value),
                self.seed
            ));
        }
        Some(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyPair {
    pub pair: usize,
    /// `(t, count, certified)`
    pub rows: Vec<(f64, u64, bool)>,
    pub fit: Option<GrowthClass>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyRun {
    pub seed: u64,
    pub geometry: String,
    /// Volume entropy of the universal cover when it is known.
    pub volume_entropy: Option<f64>,
    pub pairs: Vec<EntropyPair>,
}

pub(crate) fn fit_or_note(
    series: Result<GrowthSeries, HarnessError>,
    mode: RateMode,
) -> Result<(Option<GrowthClass>, Option<String>), HarnessError> {
    fit_or_note_class(series.and_then(|s| Ok(rate_estimate(&s, mode, DEFAULT_TAIL_FRACTION)?)))
}

/// Exponential growth rate of the geodesic count, per pair.
pub fn cmd_entropy(cfg: &ExperimentConfig) -> Result<EntropyRun, HarnessError> {
    let grid = cfg.grid()?;
    let mut out = Vec::new();
    let volume_entropy = match cfg.geometry()? {
        Geometry::Flat(space) => {
            let pairs = cfg.flat_pairs(&space)?;
            let cells = cells(pairs.len(), grid.len());
            let counts = with_workers(cfg.workers, || {
                cells
                    .par_iter()
                    .map(|&(p, k)| {
                        let (x, y) = pairs[p];
                        Ok(count(&space, &x, &y, grid[k] * grid[k])?.0 as u64)
                    })
                    .collect::<Result<Vec<_>, HarnessError>>()
            })??;
            for (p, chunk) in counts.chunks(grid.len().max(1)).enumerate().take(pairs.len()) {
                let rows: Vec<(f64, u64, bool)> = grid.iter().zip(chunk).map(|(t, &n)| (to_f64(t), n, true)).collect();
                let samples = rows.iter().filter(|r| r.0 > 0.0 && r.1 > 0).map(|r| (r.0, r.1 as f64)).collect();
                let (fit, note) = fit_or_note(GrowthSeries::new(samples, true).map_err(Into::into), RateMode::Exponential)?;
                out.push(EntropyPair { pair: p, rows, fit, note });
            }
            Some(0.0)
        }
        Geometry::Hyperbolic(preset) => {
            let pairs = cfg.hyperbolic_pairs(&preset)?;
            let gf: Vec<f64> = grid.iter().map(to_f64).collect();
            for (p, &(x, y)) in pairs.iter().enumerate() {
                let Some(&t_max) = gf.last() else {
                    out.push(EntropyPair { pair: p, rows: Vec::new(), fit: None, note: Some("empty t grid".into()) });
                    continue;
                };
                let ball = with_workers(cfg.workers, || orbit_ball(&preset, x, y, t_max, &cfg.orbit_budget))??;
                let counts = ball.counts(&gf);
                let rows = counts.iter().map(|r| (r.t, r.count, r.certified)).collect();
                let series = count_series(&counts).map_err(HarnessError::from);
                let fit = series.and_then(|s| Ok(entropy_estimate(&s)?));
                let (fit, note) = fit_or_note_class(fit)?;
                out.push(EntropyPair { pair: p, rows, fit, note });
            }
            (preset.kind == PresetKind::Cocompact).then_some(1.0)
        }
    };
    Ok(EntropyRun { seed: cfg.seed, geometry: cfg.geometry.clone(), volume_entropy, pairs: out })
}

pub(crate) fn fit_or_note_class(
    fit: Result<GrowthClass, HarnessError>,
) -> Result<(Option<GrowthClass>, Option<String>), HarnessError> {
    match fit {
        Ok(c) => Ok((Some(c), None)),
        Err(e) if is_short_series(&e) => Ok((None, Some(e.to_string()))),
        Err(e) => Err(e),
    }
}

/// Errors that mean "not enough data to fit" rather than a failed run.
pub(crate) fn is_short_series(e: &HarnessError) -> bool {
    let g = match e {
        HarnessError::Growth(g) => g,
        HarnessError::Hyperbolic(crate::hyperbolic::HyperbolicError::Growth(g)) => g,
        _ => return false,
    };
    matches!(g, GrowthError::InsufficientData { .. } | GrowthError::InvalidSeries(_))
}

pub(crate) fn fit_json(fit: &Option<GrowthClass>) -> Value {
    match fit {
        Some(c) => json!({
            "kind": c.kind.name(),
            "rate": opt_num(c.kind.parameter()),
            "residual": num(c.residual),
            "window": [num(c.window.0), num(c.window.1)],
            "samples": c.samples_used,
        }),
        None => Value::Null,
    }
}

impl Render for EntropyRun {
    fn to_json(&self) -> Value {
        let pairs: Vec<Value> = self
            .pairs
            .iter()
            .map(|p| {
                json!({
                    "pair": p.pair,
                    "rows": p.rows.iter().map(|r| json!({"t": num(r.0), "count": r.1, "certified": r.2})).collect::<Vec<_>>(),
                    "fit": fit_json(&p.fit),
                    "note": p.note,
                })
            })
            .collect();
        json!({
            "command": "entropy",
            "seed": self.seed,
            "geometry": self.geometry,
            "volume_entropy": opt_num(self.volume_entropy),
            "pairs": pairs,
        })
    }

    fn to_csv(&self) -> Option<String> {
        let mut out = String::from("pair,rate,residual,window_start,window_end,samples,seed\n");
        for p in &self.pairs {
            match &p.fit {
                Some(c) => out.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    p.pair,
                    c.kind.parameter().map(fmt_sig).unwrap_or_default(),
                    fmt_sig(c.residual),
                    fmt_sig(c.window.0),
                    fmt_sig(c.window.1),
                    c.samples_used,
                    self.seed
                )),
                None => out.push_str(&format!("{},,,,,0,{}\n", p.pair, self.seed)),
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{PairSpec, TGrid};

    fn cfg(geometry: &str, pairs: &str, grid: &str) -> ExperimentConfig {
        ExperimentConfig {
            geometry: geometry.into(),
            pairs: PairSpec::parse_list(pairs).unwrap(),
            t_grid: grid.parse::<TGrid>().unwrap(),
            ..Default::default()
        }
    }

    #[test]
    fn count_rows_on_the_unit_torus() {
        let table = cmd_count(&cfg("unit-torus", "0 0 1/2 0", "0.4,1")).unwrap();
        assert_eq!(
            table.to_csv().unwrap(),
            "pair,x1,x2,y1,y2,t,n,m,status,seed\n0,0,0,0.5,0,0.4,0,0,ok,42\n0,0,0,0.5,0,1,2,2,ok,42\n"
        );
        let v = table.to_json();
        assert_eq!(v["rows"][1]["n"], 2);
        assert_eq!(v["seed"], 42);
    }

    #[test]
    fn empty_grid_gives_header_only() {
        let table = cmd_count(&cfg("unit-torus", "0 0 1/2 0", "")).unwrap();
        assert_eq!(table.to_csv().unwrap(), "pair,x1,x2,y1,y2,t,n,m,status,seed\n");
        let hyp = cmd_count(&cfg("genus2-octagon", "", "")).unwrap();
        assert_eq!(hyp.to_csv().unwrap(), "pair,t,count,certified,seed\n");
    }

    #[test]
    fn engine_errors_land_in_the_status_column() {
        let table = cmd_count(&cfg("billiard", "1/2 1/2 2 1/2", "1")).unwrap();
        let csv = table.to_csv().unwrap();
        let row = csv.lines().nth(1).unwrap();
        assert!(row.contains(",\"error: unsupported input"), "{row}");
        assert!(row.ends_with(",42"));
    }

    #[test]
    fn hyperbolic_counts_are_flagged_certified() {
        let table = cmd_count(&cfg("genus2-octagon", "0 1 0.2 1.1", "1:5:1")).unwrap();
        let CountRows::Hyperbolic(rows) = &table.rows else { panic!() };
        assert_eq!(rows.len(), 5);
        assert!(rows.iter().all(|r| r.row.certified));
        assert!(rows.windows(2).all(|w| w[0].row.count <= w[1].row.count));
        let tight = ExperimentConfig {
            orbit_budget: crate::hyperbolic::OrbitBudget { max_word_length: 2, ..Default::default() },
            ..cfg("genus2-octagon", "0 1 0.2 1.1", "1:5:1")
        };
        let CountRows::Hyperbolic(rows) = cmd_count(&tight).unwrap().rows else { panic!() };
        assert!(rows.iter().any(|r| !r.row.certified));
    }

    #[test]
    fn block_and_recursion() {
        let c = cfg("unit-torus", "0 0 1/2 0", "1");
        let run = cmd_block(&c).unwrap();
        assert_eq!(run.instances[0]["threshold"], 2);
        assert_eq!(run.instances[0]["m"], 2);
        let rec = cmd_recursion(&c).unwrap();
        assert!(rec.passed(), "{:#?}", rec.report);
        assert_eq!(rec.trees[0]["kappa"], 2);
        assert!(rec.report.checks.iter().all(|c| c.context.get("seed") == Some("42")));
        let err = cmd_block(&cfg("schottky", "", "1")).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn transform_of_the_identity() {
        let mut c = cfg("unit-torus", "", "1,3,8");
        c.transform.function = "linear".into();
        let table = cmd_transform(&c).unwrap();
        // t^k 2^{-k(k-1)/2} with k = 1, 2, 4
        let want = [(1, 1.0), (2, 4.5), (4, 8f64.powi(4) / 64.0)];
        for (row, (k, v)) in table.rows.iter().zip(want) {
            assert_eq!(row.kappa, k);
            assert_eq!(row.value, v);
            assert!((row.ln_value - v.ln()).abs() < 1e-12);
        }
        c.transform.function = "exp:1".into();
        let rows = cmd_transform(&c).unwrap().rows;
        assert!((rows[2].ln_value - (8.0 + 4.0 + 2.0 + 1.0)).abs() < 1e-12);
        c.transform.function = "cosine".into();
        assert!(matches!(cmd_transform(&c), Err(HarnessError::Config(_))));
    }

    #[test]
    fn entropy_runs() {
        let flat = cmd_entropy(&cfg("unit-torus", "0 0 1/3 1/5", "5:80:5")).unwrap();
        let rate = flat.pairs[0].fit.as_ref().unwrap().kind.parameter().unwrap();
        assert!(rate < 0.05, "{rate}");
        let hyp = cmd_entropy(&cfg("genus2-octagon", "", "4:9:1/4")).unwrap();
        let rate = hyp.pairs[0].fit.as_ref().unwrap().kind.parameter().unwrap();
        assert!((0.8..=1.2).contains(&rate), "{rate}");
        let short = cmd_entropy(&cfg("genus2-octagon", "", "2,3")).unwrap();
        assert!(short.pairs[0].fit.is_none() && short.pairs[0].note.is_some());
        assert!(short.to_json()["pairs"][0]["fit"].is_null());
    }
}
