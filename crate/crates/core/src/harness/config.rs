use std::fmt;
use std::path::Path;

use num_traits::Signed;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::HarnessError;
use crate::blocker::{PairSampler, SolverCaps};
use crate::flatspace::{fmt_rational, parse_rational, to_f64, FlatSpace, Rational, RationalPoint};
use crate::hyperbolic::{upper_point, BoundMode, FuchsianPreset, OrbitBudget, Point};

/// Longest t grid a config may expand to.
pub const MAX_GRID_POINTS: usize = 100_000;

fn config_err(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config(msg.into())
}

fn parse_t(s: &str) -> Result<Rational, HarnessError> {
    let t = parse_rational(s).map_err(|e| config_err(format!("t grid: {e}")))?;
    if !t.is_positive() {
        return Err(config_err(format!("t grid: lengths must be positive, got {s}")));
    }
    Ok(t)
}

/// A number written either as a JSON number or a string such as `"1/3"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "ScalarRepr", into = "String")]
pub struct Scalar(pub String);

#[derive(Deserialize)]
#[serde(untagged)]
enum ScalarRepr {
    Text(String),
    Number(serde_json::Number),
}

impl From<ScalarRepr> for Scalar {
    fn from(r: ScalarRepr) -> Self {
        match r {
            ScalarRepr::Text(s) => Scalar(s.trim().to_string()),
            ScalarRepr::Number(n) => Scalar(n.to_string()),
        }
    }
}

impl From<Scalar> for String {
    fn from(s: Scalar) -> Self {
        s.0
    }
}

impl From<&str> for Scalar {
    fn from(s: &str) -> Self {
        Scalar(s.to_string())
    }
}

/// Lengths at which experiments are evaluated.
///
/// Text forms: `a:b:step`, `a:b:*ratio`, or a comma-separated list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TGridRepr", into = "String")]
pub enum TGrid {
    Values(Vec<Rational>),
    Range { start: Rational, stop: Rational, step: Rational },
    /// `start * ratio^k` up to `stop`, each value rounded to 12 significant
    /// digits so the points stay short decimals.
    Geometric { start: Rational, stop: Rational, ratio: Rational },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum TGridRepr {
    Text(String),
    List(Vec<Scalar>),
    Range { start: Scalar, stop: Scalar, step: Scalar },
    Geometric { start: Scalar, stop: Scalar, ratio: Scalar },
}

impl TryFrom<TGridRepr> for TGrid {
    type Error = HarnessError;

    fn try_from(r: TGridRepr) -> Result<Self, HarnessError> {
        let grid = match r {
            TGridRepr::Text(s) => return s.parse(),
            TGridRepr::List(v) => TGrid::Values(v.iter().map(|s| parse_t(&s.0)).collect::<Result<_, _>>()?),
            TGridRepr::Range { start, stop, step } => {
                TGrid::Range { start: parse_t(&start.0)?, stop: parse_t(&stop.0)?, step: parse_t(&step.0)? }
            }
            TGridRepr::Geometric { start, stop, ratio } => {
                TGrid::Geometric { start: parse_t(&start.0)?, stop: parse_t(&stop.0)?, ratio: parse_t(&ratio.0)? }
            }
        };
        grid.points()?;
        Ok(grid)
    }
}

impl std::str::FromStr for TGrid {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, HarnessError> {
        let s = s.trim();
        let s = s.strip_prefix('[').and_then(|r| r.strip_suffix(']')).unwrap_or(s).trim();
        let grid = if s.is_empty() {
            TGrid::Values(Vec::new())
        } else if s.contains(':') {
            let parts: Vec<&str> = s.split(':').map(str::trim).collect();
            let [a, b, c] = parts[..] else {
                return Err(config_err(format!("t grid `{s}` should read a:b:step or a:b:*ratio")));
            };
            match c.strip_prefix('*') {
                Some(r) => TGrid::Geometric { start: parse_t(a)?, stop: parse_t(b)?, ratio: parse_t(r)? },
                None => TGrid::Range { start: parse_t(a)?, stop: parse_t(b)?, step: parse_t(c)? },
            }
        } else {
            TGrid::Values(s.split(',').map(parse_t).collect::<Result<_, _>>()?)
        };
        grid.points()?;
        Ok(grid)
    }
}

impl fmt::Display for TGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = fmt_rational;
        match self {
            TGrid::Values(v) => f.write_str(&v.iter().map(r).collect::<Vec<_>>().join(",")),
            TGrid::Range { start, stop, step } => write!(f, "{}:{}:{}", r(start), r(stop), r(step)),
            TGrid::Geometric { start, stop, ratio } => write!(f, "{}:{}:*{}", r(start), r(stop), r(ratio)),
        }
    }
}

impl From<TGrid> for String {
    fn from(g: TGrid) -> Self {
        g.to_string()
    }
}

impl Default for TGrid {
    fn default() -> Self {
        TGrid::Values(vec![Rational::from_integer(1), Rational::from_integer(2), Rational::from_integer(4)])
    }
}

impl TGrid {
    /// The grid values; errors unless positive, strictly increasing and at
    /// most [`MAX_GRID_POINTS`] long.
    pub fn points(&self) -> Result<Vec<Rational>, HarnessError> {
        let too_long = || config_err(format!("t grid has more than {MAX_GRID_POINTS} points"));
        let points = match self {
            TGrid::Values(v) => v.clone(),
            TGrid::Range { start, stop, step } => {
                if !step.is_positive() {
                    return Err(config_err("t grid step must be positive"));
                }
                let n = ((stop - start) / step).floor();
                if n.is_negative() {
                    return Err(config_err("t grid stop lies below start"));
                }
                if n >= Rational::from_integer(MAX_GRID_POINTS as i128) {
                    return Err(too_long());
                }
                let n = n.to_integer();
                (0..=n).map(|k| start + step * Rational::from_integer(k)).collect()
            }
            TGrid::Geometric { start, stop, ratio } => {
                if !start.is_positive() || *ratio <= Rational::from_integer(1) {
                    return Err(config_err("geometric t grid needs start > 0 and ratio > 1"));
                }
                if stop < start {
                    return Err(config_err("t grid stop lies below start"));
                }
                let (a, b, q) = (to_f64(start), to_f64(stop), to_f64(ratio));
                let mut out = vec![*start];
                let mut k = 1;
                loop {
                    let v = a * q.powi(k);
                    if v > b * (1.0 + 1e-12) {
                        break;
                    }
                    out.push(parse_rational(&crate::fmt_sig(v)).map_err(|e| config_err(e.to_string()))?);
                    if out.len() > MAX_GRID_POINTS {
                        return Err(too_long());
                    }
                    k += 1;
                }
                out
            }
        };
        if points.len() > MAX_GRID_POINTS {
            return Err(too_long());
        }
        if points.iter().any(|t| !t.is_positive()) {
            return Err(config_err("t grid lengths must be positive"));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(config_err("t grid must be strictly increasing"));
        }
        Ok(points)
    }
}

/// A pair of base points, coordinates as written.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairSpec(pub [[Scalar; 2]; 2]);

impl PairSpec {
    /// `x1 x2 y1 y2`, separated by whitespace or commas.
    pub fn parse_line(line: &str) -> Result<Self, HarnessError> {
        let tokens: Vec<&str> = line.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()).collect();
        let [a, b, c, d] = tokens[..] else {
            return Err(config_err(format!("pair `{line}` should have four coordinates")));
        };
        Ok(PairSpec([[a.into(), b.into()], [c.into(), d.into()]]))
    }

    /// One pair per line; blank lines and `#` comments are ignored.
    pub fn parse_list(text: &str) -> Result<Vec<Self>, HarnessError> {
        text.lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(Self::parse_line)
            .collect()
    }

    fn rational(&self) -> Result<(RationalPoint, RationalPoint), HarnessError> {
        let [[a, b], [c, d]] = &self.0;
        let p = |x: &Scalar, y: &Scalar| RationalPoint::parse(&x.0, &y.0).map_err(|e| config_err(format!("pair: {e}")));
        Ok((p(a, b)?, p(c, d)?))
    }

    fn complex(&self) -> Result<(Point, Point), HarnessError> {
        let [[a, b], [c, d]] = &self.0;
        let f = |s: &Scalar| -> Result<f64, HarnessError> {
            match s.0.parse::<f64>() {
                Ok(v) => Ok(v),
                Err(_) => Ok(to_f64(&parse_rational(&s.0).map_err(|e| config_err(format!("pair: {e}")))?)),
            }
        };
        let p = |x: &Scalar, y: &Scalar| -> Result<Point, HarnessError> {
            upper_point(f(x)?, f(y)?).map_err(|e| config_err(format!("pair: {e}")))
        };
        Ok((p(a, b)?, p(c, d)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerConfig {
    pub count: usize,
    pub denominator: i128,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        let d = PairSampler::default();
        Self { count: d.count, denominator: d.denominator }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyToggles {
    /// `s <= m <= n`
    pub chain: bool,
    /// `n <= t^2/(4 delta^2) m`
    pub doubling: bool,
    /// The two bounds through the sampled blocking cost.
    pub sampled_bounds: bool,
    pub recursion: bool,
    pub hyperbolic: bool,
}

impl Default for VerifyToggles {
    fn default() -> Self {
        Self { chain: true, doubling: true, sampled_bounds: true, recursion: true, hyperbolic: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundChoice {
    Rigorous,
    Empirical,
}

/// Function fed to the `transform` command.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransformConfig {
    /// `const:c`, `linear[:c]`, `monomial:c:p`, `exp:a` or `series:<csv path>`.
    pub function: String,
    pub delta: Scalar,
}

impl Default for TransformConfig {
    fn default() -> Self {
        Self { function: "linear".into(), delta: "1".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// `unit-torus`, `torus:a,b,c,d` (basis rows), `square-billiard`, a
    /// bundled hyperbolic preset name, or a preset file path.
    pub geometry: String,
    /// Explicit pairs; when empty, flat geometries sample pairs and
    /// hyperbolic ones use a point near the domain center.
    pub pairs: Vec<PairSpec>,
    pub sampler: SamplerConfig,
    pub t_grid: TGrid,
    pub seed: u64,
    pub caps: SolverCaps,
    pub orbit_budget: OrbitBudget,
    pub workers: Option<usize>,
    pub verify: VerifyToggles,
    pub bound: BoundChoice,
    pub bound_samples: usize,
    pub transform: TransformConfig,
    /// Recursion trees are built only for grid values up to this length.
    pub recursion_max_t: Scalar,
    /// Blocking thresholds in `report` are computed only up to this length.
    pub block_max_t: Scalar,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            geometry: "unit-torus".into(),
            pairs: Vec::new(),
            sampler: SamplerConfig::default(),
            t_grid: TGrid::default(),
            seed: 42,
            caps: SolverCaps::default(),
            orbit_budget: OrbitBudget::default(),
            workers: None,
            verify: VerifyToggles::default(),
            bound: BoundChoice::Rigorous,
            bound_samples: 16,
            transform: TransformConfig::default(),
            recursion_max_t: "4".into(),
            block_max_t: "4".into(),
        }
    }
}

pub enum Geometry {
    Flat(FlatSpace),
    Hyperbolic(FuchsianPreset),
}

impl Geometry {
    pub fn resolve(spec: &str) -> Result<Self, HarnessError> {
        let spec = spec.trim();
        match spec {
            "unit-torus" | "torus" => return Ok(Geometry::Flat(FlatSpace::unit_torus())),
            "square-billiard" | "billiard" => return Ok(Geometry::Flat(FlatSpace::square_billiard())),
            _ => {}
        }
        if let Some(rest) = spec.strip_prefix("torus:") {
            let v = rest
                .split(',')
                .map(|s| parse_rational(s).map_err(|e| config_err(format!("torus basis: {e}"))))
                .collect::<Result<Vec<_>, _>>()?;
            let [a, b, c, d] = v[..] else {
                return Err(config_err("torus basis needs four entries a,b,c,d"));
            };
            return Ok(Geometry::Flat(FlatSpace::torus([a, b], [c, d])?));
        }
        Ok(Geometry::Hyperbolic(FuchsianPreset::resolve(spec)?))
    }
}

impl ExperimentConfig {
    /// JSON when the text starts with `{`, otherwise `key = value` lines.
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let value = if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| config_err(e.to_string()))?
        } else {
            key_values(text)?
        };
        let cfg: Self = serde_json::from_value(value).map_err(|e| config_err(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies `key = value` overrides on top of this config.
    pub fn with_overrides(&self, lines: &[String]) -> Result<Self, HarnessError> {
        let mut base = serde_json::to_value(self).map_err(|e| config_err(e.to_string()))?;
        merge(&mut base, key_values(&lines.join("\n"))?);
        let cfg: Self = serde_json::from_value(base).map_err(|e| config_err(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, HarnessError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        self.t_grid.points()?;
        self.recursion_max_t()?;
        self.block_max_t()?;
        if self.workers == Some(0) {
            return Err(config_err("workers must be positive"));
        }
        if self.bound_samples == 0 {
            return Err(config_err("bound_samples must be positive"));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Vec<Rational>, HarnessError> {
        self.t_grid.points()
    }

    pub fn grid_f64(&self) -> Result<Vec<f64>, HarnessError> {
        Ok(self.grid()?.iter().map(to_f64).collect())
    }

    pub fn geometry(&self) -> Result<Geometry, HarnessError> {
        Geometry::resolve(&self.geometry)
    }

    pub fn recursion_max_t(&self) -> Result<Rational, HarnessError> {
        parse_t(&self.recursion_max_t.0)
    }

    pub fn block_max_t(&self) -> Result<Rational, HarnessError> {
        parse_t(&self.block_max_t.0)
    }

    pub fn pair_sampler(&self) -> PairSampler {
        PairSampler { seed: self.seed, count: self.sampler.count, denominator: self.sampler.denominator }
    }

    pub fn flat_pairs(&self, space: &FlatSpace) -> Result<Vec<(RationalPoint, RationalPoint)>, HarnessError> {
        if self.pairs.is_empty() {
            return Ok(self.pair_sampler().pairs(space)?);
        }
        let pairs = self.pairs.iter().map(PairSpec::rational).collect::<Result<Vec<_>, _>>()?;
        if let Some((x, y)) = pairs.iter().find(|(x, y)| space.same_point(x, y)) {
            return Err(config_err(format!("pair {x} -> {y} has coincident endpoints")));
        }
        Ok(pairs)
    }

    pub fn hyperbolic_pairs(&self, preset: &FuchsianPreset) -> Result<Vec<(Point, Point)>, HarnessError> {
        if self.pairs.is_empty() {
            let c = preset.center;
            return Ok(vec![(c, Point::new(c.re + 0.2 * c.im, 1.1 * c.im))]);
        }
        self.pairs.iter().map(PairSpec::complex).collect()
    }

    pub fn bound_mode(&self) -> BoundMode {
        match self.bound {
            BoundChoice::Rigorous => BoundMode::Rigorous,
            BoundChoice::Empirical => BoundMode::Empirical { seed: self.seed, samples: self.bound_samples },
        }
    }
}

fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, p) => *b = p,
    }
}

/// Turns `key = value` lines into a JSON object. Dotted keys nest, values
/// are read as JSON when they parse and as strings otherwise, and `pairs`
/// takes `x1 x2 y1 y2` groups separated by `;`.
fn key_values(text: &str) -> Result<Value, HarnessError> {
    let mut root = Map::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(config_err(format!("line {}: expected key = value", lineno + 1)));
        };
        let (key, value) = (key.trim(), value.trim());
        let parsed = match key {
            "pairs" => {
                let pairs = value
                    .split(';')
                    .filter(|p| !p.trim().is_empty())
                    .map(PairSpec::parse_line)
                    .collect::<Result<Vec<_>, _>>()?;
                serde_json::to_value(pairs).map_err(|e| config_err(e.to_string()))?
            }
            "t_grid" | "geometry" | "recursion_max_t" | "block_max_t" | "transform.function" | "transform.delta" => {
                Value::String(value.to_string())
            }
            _ => serde_json::from_str(value).unwrap_or_else(|_| Value::String(value.to_string())),
        };
        let mut node = &mut root;
        let parts: Vec<&str> = key.split('.').map(str::trim).collect();
        for part in &parts[..parts.len() - 1] {
            let entry = node.entry(part.to_string()).or_insert_with(|| Value::Object(Map::new()));
            node = entry
                .as_object_mut()
                .ok_or_else(|| config_err(format!("line {}: `{part}` is not a table", lineno + 1)))?;
        }
        let last = parts[parts.len() - 1];
        if node.insert(last.to_string(), parsed).is_some() {
            return Err(config_err(format!("line {}: duplicate key `{key}`", lineno + 1)));
        }
    }
    Ok(Value::Object(root))
}
