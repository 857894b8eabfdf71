//! Growth functions of a positive real variable: the dyadic index
//! `kappa`, the multiplicative dyadic transform and growth-rate fitting.
//!
//! For a scale `delta > 0`, `kappa(t)` is the least `k` with `t / 2^k < delta`
//! and the transform of `f` is
//!
//! ```text
//! F(t) = f(t) * f(t/2) * ... * f(t / 2^(kappa(t) - 1))
//! ```
//!
//! The transform is evaluated in log space so that exponential inputs do not
//! overflow before the final exponentiation.

use std::fmt;
use std::io::{BufRead, Write};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GrowthError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("t = {t} lies outside the sampled range [{lo}, {hi}]")]
    Range { t: f64, lo: f64, hi: f64 },
    #[error("insufficient data: need at least {needed} samples in the fit window, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("invalid series: {0}")]
    InvalidSeries(String),
    #[error("malformed csv at line {line}: {msg}")]
    Csv { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, GrowthError>;

/// Minimum number of tail samples accepted by [`rate_estimate`].
pub const MIN_FIT_SAMPLES: usize = 8;

/// Fraction of the t-range used by rate fits unless configured otherwise.
pub const DEFAULT_TAIL_FRACTION: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformParams {
    delta: f64,
}

impl TransformParams {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(GrowthError::Domain(format!("delta must be positive, got {delta}")));
        }
        Ok(Self { delta })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

/// Least `k` with `t / 2^k < delta`.
///
/// Halving is exact in binary floating point, so the comparison is exact for
/// the given `f64` inputs.
pub fn kappa(t: f64, params: TransformParams) -> Result<u32> {
    if !(t.is_finite() && t > 0.0) {
        return Err(GrowthError::Domain(format!("t must be positive, got {t}")));
    }
    let mut k = 0u32;
    let mut scaled = t;
    while scaled >= params.delta {
        scaled /= 2.0;
        k += 1;
    }
    Ok(k)
}

/// Exact-rational variant of [`kappa`]: least `k` with `t < delta * 2^k`.
pub fn kappa_exact(t: &BigRational, delta: &BigRational) -> Result<u32> {
    if !t.is_positive() || !delta.is_positive() {
        return Err(GrowthError::Domain("t and delta must be positive".into()));
    }
    let mut k = 0u32;
    let mut bound = delta.clone();
    let two = BigRational::from_integer(BigInt::from(2));
    while *t >= bound {
        bound *= &two;
        k += 1;
    }
    Ok(k)
}

/// Anything that can be evaluated as a positive function of `t`.
pub trait GrowthFunction {
    fn value_at(&self, t: f64) -> Result<f64>;

    /// Natural log of the value; overridable for functions known in log form.
    fn ln_value_at(&self, t: f64) -> Result<f64> {
        let v = self.value_at(t)?;
        if !(v > 0.0) {
            return Err(GrowthError::Domain(format!("non-positive value {v} at t = {t}")));
        }
        Ok(v.ln())
    }
}

/// Wraps a closure as a [`GrowthFunction`].
pub struct FnGrowth<F>(pub F);

impl<F: Fn(f64) -> f64> GrowthFunction for FnGrowth<F> {
    fn value_at(&self, t: f64) -> Result<f64> {
        Ok((self.0)(t))
    }
}

/// A closure returning `ln f(t)` directly; used for exponentials whose raw
/// values overflow.
pub struct LnFnGrowth<F>(pub F);

impl<F: Fn(f64) -> f64> GrowthFunction for LnFnGrowth<F> {
    fn value_at(&self, t: f64) -> Result<f64> {
        Ok((self.0)(t).exp())
    }

    fn ln_value_at(&self, t: f64) -> Result<f64> {
        Ok((self.0)(t))
    }
}

/// `ln F(t)` for the dyadic transform, stopping after `k_stop` factors when
/// given (the partial product `S_k`), otherwise after `kappa(t)` factors.
pub fn log_transform<G: GrowthFunction + ?Sized>(
    f: &G,
    params: TransformParams,
    t: f64,
    k_stop: Option<u32>,
) -> Result<f64> {
    let factors = match k_stop {
        Some(k) => k,
        None => kappa(t, params)?,
    };
    let mut acc = 0.0;
    let mut arg = t;
    for _ in 0..factors {
        acc += f.ln_value_at(arg)?;
        arg /= 2.0;
    }
    Ok(acc)
}

/// The dyadic transform `F(t)`; the empty product is 1.
pub fn transform<G: GrowthFunction + ?Sized>(
    f: &G,
    params: TransformParams,
    t: f64,
    k_stop: Option<u32>,
) -> Result<f64> {
    Ok(log_transform(f, params, t, k_stop)?.exp())
}

/// Samples the transform of `f` on the grid `ts`.
pub fn transform_series<G: GrowthFunction + ?Sized>(
    f: &G,
    params: TransformParams,
    ts: &[f64],
) -> Result<GrowthSeries> {
    let samples = ts
        .iter()
        .map(|&t| Ok((t, transform(f, params, t, None)?)))
        .collect::<Result<Vec<_>>>()?;
    GrowthSeries::new(samples, false)
}

/// Closed forms with an exact rational transform.
#[derive(Debug, Clone, PartialEq)]
pub enum ClosedForm {
    /// `f(t) = c`
    Constant(BigRational),
    /// `f(t) = c * t`
    Linear(BigRational),
    /// `f(t) = c * t^p`
    Monomial { coefficient: BigRational, power: u32 },
}

impl ClosedForm {
    pub fn eval_exact(&self, t: &BigRational) -> BigRational {
        match self {
            ClosedForm::Constant(c) => c.clone(),
            ClosedForm::Linear(c) => c * t,
            ClosedForm::Monomial { coefficient, power } => coefficient * pow_rational(t, *power),
        }
    }

    /// Exact transform at rational `t`, with exact `kappa`.
    pub fn exact_transform(
        &self,
        t: &BigRational,
        delta: &BigRational,
        k_stop: Option<u32>,
    ) -> Result<BigRational> {
        let factors = match k_stop {
            Some(k) => k,
            None => kappa_exact(t, delta)?,
        };
        let two = BigRational::from_integer(BigInt::from(2));
        let mut acc = BigRational::one();
        let mut arg = t.clone();
        for _ in 0..factors {
            let v = self.eval_exact(&arg);
            if !v.is_positive() {
                return Err(GrowthError::Domain("closed form is not positive".into()));
            }
            acc *= v;
            arg /= &two;
        }
        Ok(acc)
    }
}

impl GrowthFunction for ClosedForm {
    fn value_at(&self, t: f64) -> Result<f64> {
        let v = match self {
            ClosedForm::Constant(c) => rational_to_f64(c),
            ClosedForm::Linear(c) => rational_to_f64(c) * t,
            ClosedForm::Monomial { coefficient, power } => {
                rational_to_f64(coefficient) * t.powi(*power as i32)
            }
        };
        Ok(v)
    }
}

fn pow_rational(base: &BigRational, exp: u32) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// A sampled positive function of `t` with strictly increasing abscissae.
///
/// Between samples the function is interpolated linearly in `(t, ln value)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthSeries {
    samples: Vec<(f64, f64)>,
    monotone: bool,
}

impl GrowthSeries {
    pub fn new(samples: Vec<(f64, f64)>, monotone: bool) -> Result<Self> {
        for w in samples.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(GrowthError::InvalidSeries(format!(
                    "t values must strictly increase ({} then {})",
                    w[0].0, w[1].0
                )));
            }
            if monotone && w[1].1 < w[0].1 {
                return Err(GrowthError::InvalidSeries(format!(
                    "series flagged monotone but decreases at t = {}",
                    w[1].0
                )));
            }
        }
        for &(t, v) in &samples {
            if !(t.is_finite() && t > 0.0) {
                return Err(GrowthError::InvalidSeries(format!("t must be positive, got {t}")));
            }
            if !(v.is_finite() && v > 0.0) {
                return Err(GrowthError::InvalidSeries(format!(
                    "values must be positive and finite, got {v} at t = {t}"
                )));
            }
        }
        Ok(Self { samples, monotone })
    }

    pub fn from_fn<G: GrowthFunction + ?Sized>(f: &G, ts: &[f64], monotone: bool) -> Result<Self> {
        let samples = ts
            .iter()
            .map(|&t| Ok((t, f.value_at(t)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(samples, monotone)
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn is_monotone(&self) -> bool {
        self.monotone
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn ts(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.0)
    }

    pub fn range(&self) -> Option<(f64, f64)> {
        Some((self.samples.first()?.0, self.samples.last()?.0))
    }

    /// True when the values never decrease; the scan behind the monotone flag.
    pub fn is_non_decreasing(&self) -> bool {
        self.samples.windows(2).all(|w| w[1].1 >= w[0].1)
    }

    /// Restriction to `lo <= t <= hi`.
    pub fn window(&self, lo: f64, hi: f64) -> Vec<(f64, f64)> {
        self.samples.iter().copied().filter(|&(t, _)| t >= lo && t <= hi).collect()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,value")?;
        for &(t, v) in &self.samples {
            writeln!(out, "{},{}", crate::fmt_sig(t), crate::fmt_sig(v))?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R, monotone: bool) -> Result<Self> {
        let mut samples = Vec::new();
        for (i, line) in input.lines().enumerate() {
            let line = line.map_err(|e| GrowthError::Csv { line: i + 1, msg: e.to_string() })?;
            let line = line.trim();
            if i == 0 {
                if line != "t,value" {
                    return Err(GrowthError::Csv { line: 1, msg: format!("expected header `t,value`, got `{line}`") });
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split(',');
            let mut next = |name: &str| -> Result<f64> {
                parts
                    .next()
                    .ok_or_else(|| GrowthError::Csv { line: i + 1, msg: format!("missing {name}") })?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| GrowthError::Csv { line: i + 1, msg: e.to_string() })
            };
            let t = next("t")?;
            let v = next("value")?;
            samples.push((t, v));
        }
        Self::new(samples, monotone)
    }
}

impl GrowthFunction for GrowthSeries {
    fn value_at(&self, t: f64) -> Result<f64> {
        if let Ok(i) = self.samples.binary_search_by(|s| s.0.total_cmp(&t)) {
            return Ok(self.samples[i].1);
        }
        Ok(self.ln_value_at(t)?.exp())
    }

    fn ln_value_at(&self, t: f64) -> Result<f64> {
        let (lo, hi) = self
            .range()
            .ok_or_else(|| GrowthError::InvalidSeries("empty series".into()))?;
        if t < lo || t > hi {
            return Err(GrowthError::Range { t, lo, hi });
        }
        let idx = self.samples.partition_point(|s| s.0 < t);
        let (t1, v1) = self.samples[idx];
        if t1 == t || idx == 0 {
            return Ok(v1.ln());
        }
        let (t0, v0) = self.samples[idx - 1];
        let w = (t - t0) / (t1 - t0);
        Ok((1.0 - w) * v0.ln() + w * v1.ln())
    }
}

/// Regression coordinates used by [`rate_estimate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateMode {
    /// `ln f` against `t`
    Exponential,
    /// `ln f` against `ln t`
    Polynomial,
    /// `ln f` against `(ln t)^2`
    QuasiPolynomial,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GrowthKind {
    Bounded,
    Polynomial { degree: f64 },
    QuasiPolynomial { coefficient: f64 },
    Exponential { rate: f64 },
    SuperExponential,
}

impl GrowthKind {
    pub fn name(&self) -> &'static str {
        match self {
            GrowthKind::Bounded => "bounded",
            GrowthKind::Polynomial { .. } => "polynomial",
            GrowthKind::QuasiPolynomial { .. } => "quasi-polynomial",
            GrowthKind::Exponential { .. } => "exponential",
            GrowthKind::SuperExponential => "super-exponential",
        }
    }

    pub fn parameter(&self) -> Option<f64> {
        match *self {
            GrowthKind::Polynomial { degree } => Some(degree),
            GrowthKind::QuasiPolynomial { coefficient } => Some(coefficient),
            GrowthKind::Exponential { rate } => Some(rate),
            GrowthKind::Bounded | GrowthKind::SuperExponential => None,
        }
    }
}

impl fmt::Display for GrowthKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.parameter() {
            Some(p) => write!(f, "{}({})", self.name(), crate::fmt_sig(p)),
            None => f.write_str(self.name()),
        }
    }
}

/// Outcome of a growth fit.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthClass {
    pub kind: GrowthKind,
    /// Root-mean-square residual of the least-squares line.
    pub residual: f64,
    /// Largest slope between consecutive window samples, a limsup proxy.
    pub max_slope: f64,
    pub window: (f64, f64),
    pub samples_used: usize,
}

#[derive(Serialize)]
struct GrowthClassRecord<'a> {
    kind: &'a str,
    parameter: Option<f64>,
    residual: f64,
    window: [f64; 2],
}

impl Serialize for GrowthClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GrowthClassRecord {
            kind: self.kind.name(),
            parameter: self.kind.parameter(),
            residual: self.residual,
            window: [self.window.0, self.window.1],
        }
        .serialize(s)
    }
}

/// Ordinary least squares `y = slope * x + intercept`; returns
/// `(slope, intercept, rms residual)`.
pub fn least_squares(points: &[(f64, f64)]) -> Option<(f64, f64, f64)> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = points
        .iter()
        .map(|p| {
            let r = p.1 - (slope * p.0 + intercept);
            r * r
        })
        .sum();
    Some((slope, intercept, (ss / n).sqrt()))
}

/// Fits the growth of `f` over the top `tail_fraction` of its t-range.
pub fn rate_estimate(f: &GrowthSeries, mode: RateMode, tail_fraction: f64) -> Result<GrowthClass> {
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(GrowthError::Domain(format!("tail fraction must lie in (0, 1], got {tail_fraction}")));
    }
    let (lo, hi) = f.range().ok_or(GrowthError::InsufficientData { needed: MIN_FIT_SAMPLES, got: 0 })?;
    let start = hi - tail_fraction * (hi - lo);
    let window = f.window(start, hi);
    if window.len() < MIN_FIT_SAMPLES {
        return Err(GrowthError::InsufficientData { needed: MIN_FIT_SAMPLES, got: window.len() });
    }
    let abscissa = |t: f64| match mode {
        RateMode::Exponential => t,
        RateMode::Polynomial => t.ln(),
        RateMode::QuasiPolynomial => t.ln().powi(2),
    };
    let points: Vec<(f64, f64)> = window.iter().map(|&(t, v)| (abscissa(t), v.ln())).collect();
    let (slope, _, residual) = least_squares(&points)
        .ok_or_else(|| GrowthError::InvalidSeries("degenerate fit window".into()))?;
    let max_slope = points
        .windows(2)
        .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
        .fold(f64::NEG_INFINITY, f64::max);
    let value = slope.max(0.0);
    let kind = match mode {
        RateMode::Exponential => GrowthKind::Exponential { rate: value },
        RateMode::Polynomial => GrowthKind::Polynomial { degree: value },
        RateMode::QuasiPolynomial => GrowthKind::QuasiPolynomial { coefficient: value },
    };
    Ok(GrowthClass {
        kind,
        residual,
        max_slope,
        window: (window[0].0, window[window.len() - 1].0),
        samples_used: window.len(),
    })
}

/// Coarse classification of a sampled series.
///
/// Bounded when the tail polynomial degree is below `flat_degree`; otherwise
/// the regression coordinate with the smallest residual wins, with the
/// exponential fit promoted to super-exponential when its max slope keeps
/// growing across the window.
pub fn classify(f: &GrowthSeries, tail_fraction: f64, flat_degree: f64) -> Result<GrowthClass> {
    let poly = rate_estimate(f, RateMode::Polynomial, tail_fraction)?;
    if poly.kind.parameter().unwrap_or(0.0) < flat_degree {
        return Ok(GrowthClass { kind: GrowthKind::Bounded, ..poly });
    }
    let quasi = rate_estimate(f, RateMode::QuasiPolynomial, tail_fraction)?;
    let expo = rate_estimate(f, RateMode::Exponential, tail_fraction)?;
    let mut best = [poly, quasi, expo]
        .into_iter()
        .min_by(|a, b| a.residual.total_cmp(&b.residual))
        .expect("three candidates");
    if let GrowthKind::Exponential { rate } = best.kind {
        if best.max_slope > 4.0 * rate.max(f64::MIN_POSITIVE) && rate > 0.0 {
            best.kind = GrowthKind::SuperExponential;
        }
    }
    Ok(best)
}

/// Big-O envelope claims checkable on sampled data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "claim", rename_all = "kebab-case")]
pub enum Claim {
    /// `f = O(e^{a t})` implies `F = O(e^{(2a + eps) t})`; series are `(f, F)`.
    ExponentialDoubling { a: f64, eps: f64 },
    /// `f = O(t^r)` implies `F = O(t^{alpha log2 t})`; series are `(f, F)`.
    QuasiPolynomial { r: f64, alpha: f64 },
    /// Bounded `f` gives `F = O(t^exponent)`; series are `(f, F)`.
    PolynomialEnvelope { exponent: f64 },
    /// `g = O(f)` implies `G = O(t^alpha F)`; series are `(G, F)`.
    Domination { alpha: f64 },
    /// `g = o(f)` implies `G = O(t^beta F)`; series are `(G, F)`.
    LittleO { beta: f64 },
    /// `f ~ g` implies `G = O(t^alpha F)` and `F = O(t^beta G)`; series are `(G, F)`.
    Equivalent { alpha: f64, beta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheckParams {
    /// Largest multiplicative constant accepted for an envelope.
    pub constant_cap: f64,
    pub tail_fraction: f64,
}

impl Default for BoundCheckParams {
    fn default() -> Self {
        Self { constant_cap: 1e6, tail_fraction: DEFAULT_TAIL_FRACTION }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeCheck {
    pub description: String,
    /// Smallest constant `C` with `lhs <= C * envelope` on the shared range.
    pub constant: f64,
    /// Sample where the ratio peaks.
    pub witness_t: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub claim: Claim,
    pub pass: bool,
    pub checks: Vec<EnvelopeCheck>,
    /// Fitted exponential rate of `F`, for the exponential claim.
    pub measured_rate: Option<f64>,
}

impl BoundReport {
    /// First failing check, if any.
    pub fn witness(&self) -> Option<&EnvelopeCheck> {
        self.checks.iter().find(|c| !c.pass)
    }
}

/// Checks a big-O claim relating two sampled series on their shared range.
///
/// The first series is evaluated at the second series' sample points by
/// log-linear interpolation.
pub fn bound_check(
    first: &GrowthSeries,
    second: &GrowthSeries,
    claim: Claim,
    params: BoundCheckParams,
) -> Result<BoundReport> {
    let (a_lo, a_hi) = first.range().ok_or_else(|| GrowthError::InvalidSeries("empty series".into()))?;
    let (b_lo, b_hi) = second.range().ok_or_else(|| GrowthError::InvalidSeries("empty series".into()))?;
    let lo = a_lo.max(b_lo);
    let hi = a_hi.min(b_hi);
    if lo > hi {
        return Err(GrowthError::Range { t: lo, lo: b_lo, hi: b_hi });
    }
    let shared: Vec<(f64, f64, f64)> = second
        .window(lo, hi)
        .into_iter()
        .map(|(t, v)| Ok((t, first.ln_value_at(t)?, v.ln())))
        .collect::<Result<_>>()?;
    if shared.is_empty() {
        return Err(GrowthError::Range { t: lo, lo: b_lo, hi: b_hi });
    }

    // ln lhs - ln envelope, maximised over the shared samples.
    let envelope = |description: String, log_ratio: &dyn Fn(f64, f64, f64) -> f64| {
        let (witness_t, worst) = shared
            .iter()
            .map(|&(t, lf, lg)| (t, log_ratio(t, lf, lg)))
            .fold((lo, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
        let constant = worst.exp();
        EnvelopeCheck { description, constant, witness_t, pass: constant <= params.constant_cap }
    };

    let mut measured_rate = None;
    let checks = match claim {
        Claim::ExponentialDoubling { a, eps } => {
            let premise = envelope(format!("f <= C e^({a} t)"), &|t, lf, _| lf - a * t);
            let rate = 2.0 * a + eps;
            let conclusion = envelope(format!("F <= C e^({rate} t)"), &|t, _, lg| lg - rate * t);
            let fitted = rate_estimate(second, RateMode::Exponential, params.tail_fraction)?;
            let r = fitted.kind.parameter().unwrap_or(0.0);
            measured_rate = Some(r);
            let rate_check = EnvelopeCheck {
                description: format!("fitted rate of F <= {rate}"),
                constant: r,
                witness_t: fitted.window.1,
                pass: r <= rate,
            };
            vec![premise, conclusion, rate_check]
        }
        Claim::QuasiPolynomial { r, alpha } => {
            let premise = envelope(format!("f <= C t^{r}"), &|t, lf, _| lf - r * t.ln());
            let conclusion = envelope(format!("F <= C t^({alpha} log2 t)"), &|t, _, lg| {
                lg - alpha * t.log2() * t.ln()
            });
            vec![premise, conclusion]
        }
        Claim::PolynomialEnvelope { exponent } => {
            let premise = envelope("f bounded".into(), &|_, lf, _| lf);
            let conclusion = envelope(format!("F <= C t^{exponent}"), &|t, _, lg| lg - exponent * t.ln());
            vec![premise, conclusion]
        }
        Claim::Domination { alpha } => {
            vec![envelope(format!("G <= C t^{alpha} F"), &|t, lg, lf| lg - lf - alpha * t.ln())]
        }
        Claim::LittleO { beta } => {
            vec![envelope(format!("G <= C t^{beta} F"), &|t, lg, lf| lg - lf - beta * t.ln())]
        }
        Claim::Equivalent { alpha, beta } => vec![
            envelope(format!("G <= C t^{alpha} F"), &|t, lg, lf| lg - lf - alpha * t.ln()),
            envelope(format!("F <= C t^{beta} G"), &|t, lg, lf| lf - lg - beta * t.ln()),
        ],
    };
    let pass = checks.iter().all(|c| c.pass);
    Ok(BoundReport { claim, pass, checks, measured_rate })
}

/// Converts a decimal or `p/q` string to an exact rational.
pub fn parse_big_rational(s: &str) -> Option<BigRational> {
    let r = crate::flatspace::parse_rational(s).ok()?;
    Some(BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom())))
}

/// `true` when `x` is an integer power of two times `delta` (a dyadic
/// boundary of `kappa`).
pub fn on_dyadic_boundary(t: &BigRational, delta: &BigRational) -> bool {
    let mut q = t / delta;
    if q < BigRational::one() {
        return false;
    }
    let two = BigRational::from_integer(BigInt::from(2));
    while q > BigRational::one() {
        q /= &two;
        if q.is_zero() {
            return false;
        }
    }
    q == BigRational::one()
}
