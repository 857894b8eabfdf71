//! Orbit counting for discrete isometry groups of the upper half-plane.
//!
//! Points are `Complex64` with positive imaginary part. Group elements are
//! unimodular real matrices up to sign, acting by Mobius transformations.
//! Everything is binary64; rounding error in a product of `L` generators
//! grows roughly linearly in `L`.

mod bounds;
mod orbit;

use std::fmt;
use std::ops::Mul;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::growth::GrowthError;

pub use bounds::{
    certified_blocking_lower_bound, endpoint_passing, entropy_estimate, uniform_count_bound, word_growth,
    BoundMode, BoundSource, LowerBoundRow, UniformBound, WordGroup,
};
pub use orbit::{
    count_series, orbit_ball, orbit_count, word_ball, CountRow, OrbitBall, OrbitBudget, OrbitElement,
};

pub type Point = Complex64;

#[derive(Debug, Error)]
pub enum HyperbolicError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid preset: {0}")]
    InvalidPreset(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("word-length budget exhausted: counts certified only up to t = {certified}, requested {requested}")]
    BudgetExceeded { certified: f64, requested: f64 },
    #[error("resource cap: {0}")]
    ResourceCap(String),
    #[error("preset file: {0}")]
    Io(String),
    #[error(transparent)]
    Growth(#[from] GrowthError),
}

pub type Result<T> = std::result::Result<T, HyperbolicError>;

pub const DET_TOLERANCE: f64 = 1e-12;
pub const RELATOR_TOLERANCE: f64 = 1e-9;
/// Frobenius tolerance for matrix dedup, relative to the matrix norm once
/// entries exceed 1.
pub const DEDUP_TOLERANCE: f64 = 1e-9;

/// Checked upper half-plane point.
pub fn upper_point(re: f64, im: f64) -> Result<Point> {
    if !(im > 0.0) || !re.is_finite() || !im.is_finite() {
        return Err(HyperbolicError::Domain(format!("{re} + {im}i is not in the upper half-plane")));
    }
    Ok(Complex64::new(re, im))
}

/// Hyperbolic distance, `cosh d = 1 + |z - w|^2 / (2 Im z Im w)`.
pub fn hyp_distance(z: Point, w: Point) -> Result<f64> {
    for p in [z, w] {
        if !(p.im > 0.0) {
            return Err(HyperbolicError::Domain(format!("Im {p} <= 0")));
        }
    }
    Ok(dist(z, w))
}

// sinh(d/2) form, stable for nearby points
pub(crate) fn dist(z: Point, w: Point) -> f64 {
    let s = (z - w).norm() / (2.0 * (z.im * w.im).sqrt());
    2.0 * s.asinh()
}

/// Point at distance `r` from `i` in direction `theta`, measured from the
/// upward vertical.
pub(crate) fn polar_from_i(r: f64, theta: f64) -> Point {
    MobiusMatrix::rotation(theta / 2.0).apply(Complex64::new(0.0, r.exp()))
}

/// `[[a, b], [c, d]]` with determinant 1, identified with its negation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "[f64; 4]", from = "[f64; 4]")]
pub struct MobiusMatrix {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl From<MobiusMatrix> for [f64; 4] {
    fn from(m: MobiusMatrix) -> Self {
        [m.a, m.b, m.c, m.d]
    }
}

impl From<[f64; 4]> for MobiusMatrix {
    fn from(e: [f64; 4]) -> Self {
        Self::raw(e[0], e[1], e[2], e[3])
    }
}

impl MobiusMatrix {
    pub const IDENTITY: Self = Self { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let m = Self::raw(a, b, c, d);
        if !m.entries().iter().all(|x| x.is_finite()) || (m.det() - 1.0).abs() > DET_TOLERANCE {
            return Err(HyperbolicError::Domain(format!("det {} != 1 for {m}", m.det())));
        }
        Ok(m)
    }

    pub(crate) const fn raw(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    /// Rotation about `i` by hyperbolic angle `2 phi`.
    pub fn rotation(phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        Self::raw(c, s, -s, c)
    }

    /// Translation of length `l` along the imaginary axis.
    pub fn translation(l: f64) -> Self {
        Self::raw((l / 2.0).exp(), 0.0, 0.0, (-l / 2.0).exp())
    }

    pub fn entries(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.trace().abs() > 2.0
    }

    /// Displacement along the axis, `2 acosh(|tr| / 2)`.
    pub fn translation_length(&self) -> f64 {
        2.0 * (self.trace().abs() / 2.0).max(1.0).acosh()
    }

    pub fn inverse(&self) -> Self {
        Self::raw(self.d, -self.b, -self.c, self.a)
    }

    pub fn neg(&self) -> Self {
        Self::raw(-self.a, -self.b, -self.c, -self.d)
    }

    pub fn apply(&self, z: Point) -> Point {
        (z * self.a + self.b) / (z * self.c + self.d)
    }

    pub fn norm(&self) -> f64 {
        self.entries().iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Sign chosen so the first entry above `1e-9` in magnitude is positive.
    pub fn normalized(&self) -> Self {
        let first = self.entries().into_iter().find(|x| x.abs() > 1e-9).unwrap_or(1.0);
        if first < 0.0 {
            self.neg()
        } else {
            *self
        }
    }

    /// Frobenius distance between the classes of `self` and `other` in PSL(2, R).
    pub fn projective_distance(&self, other: &Self) -> f64 {
        let plus: f64 = self.entries().iter().zip(other.entries()).map(|(x, y)| (x - y).powi(2)).sum();
        let minus: f64 = self.entries().iter().zip(other.entries()).map(|(x, y)| (x + y).powi(2)).sum();
        plus.min(minus).sqrt()
    }

    pub fn same_element(&self, other: &Self) -> bool {
        self.projective_distance(other) <= DEDUP_TOLERANCE * self.norm().max(1.0)
    }

    /// Isometric circle `|cz + d| = 1` as `(center, radius)` on the real line.
    pub fn isometric_circle(&self) -> Option<(f64, f64)> {
        (self.c != 0.0).then(|| (-self.d / self.c, 1.0 / self.c.abs()))
    }
}

impl Mul for MobiusMatrix {
    type Output = Self;

    fn mul(self, o: Self) -> Self {
        Self::raw(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

impl fmt::Display for MobiusMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PresetKind {
    Schottky,
    Cocompact,
}

/// Letters index generators and their inverses: `2i` is generator `i` and
/// `2i + 1` its inverse.
pub type Letter = u8;

pub fn inverse_letter(l: Letter) -> Letter {
    l ^ 1
}

/// Appends `l`, cancelling against the last letter.
pub fn push_reduced(word: &mut Vec<Letter>, l: Letter) {
    if word.last() == Some(&inverse_letter(l)) {
        word.pop();
    } else {
        word.push(l);
    }
}

pub fn inverse_word(word: &[Letter]) -> Vec<Letter> {
    word.iter().rev().map(|&l| inverse_letter(l)).collect()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PresetFile {
    name: String,
    kind: PresetKind,
    generators: Vec<[f64; 4]>,
    #[serde(default)]
    names: Option<Vec<String>>,
    #[serde(default)]
    relator: Option<String>,
    #[serde(rename = "D", default)]
    diameter: Option<f64>,
    #[serde(rename = "A", default)]
    area: Option<f64>,
    #[serde(default)]
    systole: Option<f64>,
    #[serde(default)]
    center: Option<[f64; 2]>,
    #[serde(default)]
    domain_radius: Option<f64>,
}

/// Generators of a discrete group with the metadata the counting bounds need.
#[derive(Debug, Clone, PartialEq)]
pub struct FuchsianPreset {
    pub name: String,
    pub kind: PresetKind,
    pub generators: Vec<MobiusMatrix>,
    /// Lowercase names; the inverse of `a1` is written `A1`.
    pub names: Vec<String>,
    pub relator: Option<Vec<Letter>>,
    /// Diameter of a fundamental domain.
    pub diameter: Option<f64>,
    /// Area of a fundamental domain.
    pub area: Option<f64>,
    /// Lower bound on the length of closed geodesics.
    pub systole: Option<f64>,
    /// Center of a Dirichlet domain whose side pairings are the generators.
    pub center: Point,
    /// Circumradius of that domain about `center`.
    pub domain_radius: Option<f64>,
}

const SCHOTTKY_JSON: &str = include_str!("../../presets/schottky.json");
const OCTAGON_JSON: &str = include_str!("../../presets/genus2-octagon.json");

pub const BUILTIN_PRESETS: [&str; 2] = ["schottky", "genus2-octagon"];

fn default_names(k: usize) -> Vec<String> {
    if k % 2 == 0 {
        (0..k).map(|i| format!("{}{}", if i % 2 == 0 { 'a' } else { 'b' }, i / 2 + 1)).collect()
    } else {
        (0..k).map(|i| format!("g{}", i + 1)).collect()
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

impl FuchsianPreset {
    pub fn schottky() -> Self {
        Self::from_json_str(SCHOTTKY_JSON).expect("bundled preset is valid")
    }

    pub fn genus2_octagon() -> Self {
        Self::from_json_str(OCTAGON_JSON).expect("bundled preset is valid")
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "schottky" => Some(Self::schottky()),
            "genus2-octagon" | "octagon" | "genus2" => Some(Self::genus2_octagon()),
            _ => None,
        }
    }

    /// A bundled preset name or a path to a preset file.
    pub fn resolve(spec: &str) -> Result<Self> {
        match Self::builtin(spec) {
            Some(p) => Ok(p),
            None => Self::load(spec),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| HyperbolicError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    /// Parses and validates a preset.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: PresetFile = serde_json::from_str(text).map_err(|e| HyperbolicError::Io(e.to_string()))?;
        let generators = raw
            .generators
            .iter()
            .map(|g| MobiusMatrix::new(g[0], g[1], g[2], g[3]))
            .collect::<Result<Vec<_>>>()?;
        let names = raw.names.unwrap_or_else(|| default_names(generators.len()));
        let center = match raw.center {
            Some([re, im]) => upper_point(re, im)?,
            None => Complex64::new(0.0, 1.0),
        };
        let mut preset = Self {
            name: raw.name,
            kind: raw.kind,
            generators,
            names,
            relator: None,
            diameter: raw.diameter,
            area: raw.area,
            systole: raw.systole,
            center,
            domain_radius: raw.domain_radius,
        };
        if let Some(rel) = raw.relator {
            preset.relator = Some(preset.parse_word(&rel)?);
        }
        preset.validate()?;
        Ok(preset)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(HyperbolicError::InvalidPreset(format!("{}: {m}", self.name)));
        if self.generators.is_empty() || self.generators.len() > 64 {
            return bad(format!("{} generators", self.generators.len()));
        }
        if self.names.len() != self.generators.len() {
            return bad("names and generators differ in length".into());
        }
        for (i, n) in self.names.iter().enumerate() {
            if !n.starts_with(|c: char| c.is_ascii_lowercase()) || self.names[..i].contains(n) {
                return bad(format!("generator name `{n}` must be unique and start lowercase"));
            }
        }
        for (g, n) in self.generators.iter().zip(&self.names) {
            if (g.det() - 1.0).abs() > DET_TOLERANCE {
                return bad(format!("{n} has determinant {}", g.det()));
            }
            if !g.is_hyperbolic() {
                return bad(format!("{n} has |trace| = {} <= 2", g.trace().abs()));
            }
        }
        for (label, v) in [("D", self.diameter), ("A", self.area), ("systole", self.systole), ("domain_radius", self.domain_radius)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return bad(format!("{label} must be positive, got {v}"));
                }
            }
        }
        match self.kind {
            PresetKind::Cocompact => {
                let Some(rel) = &self.relator else {
                    return bad("cocompact preset needs a relator".into());
                };
                let m = self.word_matrix(rel);
                let err = m.projective_distance(&MobiusMatrix::IDENTITY);
                if err > RELATOR_TOLERANCE {
                    return bad(format!("relator evaluates to {m}, off identity by {err:e}"));
                }
                if self.diameter.is_none() || self.area.is_none() {
                    return bad("cocompact preset needs D and A".into());
                }
            }
            PresetKind::Schottky => {
                let disks = self.schottky_disks()?;
                for i in 0..disks.len() {
                    for j in 0..i {
                        let (ci, ri) = disks[i];
                        let (cj, rj) = disks[j];
                        if (ci - cj).abs() <= ri + rj {
                            return bad(format!(
                                "isometric circles of {} and {} overlap",
                                self.letter_name(i as Letter),
                                self.letter_name(j as Letter)
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Isometric circles indexed by letter.
    fn schottky_disks(&self) -> Result<Vec<(f64, f64)>> {
        self.letters()
            .iter()
            .enumerate()
            .map(|(l, m)| {
                m.isometric_circle().ok_or_else(|| {
                    HyperbolicError::InvalidPreset(format!("{} fixes infinity", self.letter_name(l as Letter)))
                })
            })
            .collect()
    }

    /// Isometric disk of each letter's inverse: the letter maps the exterior
    /// of its own disk into this one.
    pub(crate) fn target_disks(&self) -> Vec<(f64, f64)> {
        let disks = self.schottky_disks().expect("validated schottky preset");
        (0..disks.len()).map(|l| disks[inverse_letter(l as Letter) as usize]).collect()
    }

    /// Whether `z` lies outside every closed isometric disk (Schottky only).
    pub fn in_schottky_domain(&self, z: Point) -> bool {
        match self.schottky_disks() {
            Ok(disks) => disks.iter().all(|&(c, r)| (z - c).norm() > r),
            Err(_) => false,
        }
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    /// Generators and inverses in letter order.
    pub fn letters(&self) -> Vec<MobiusMatrix> {
        self.generators.iter().flat_map(|g| [*g, g.inverse()]).collect()
    }

    pub fn letter_name(&self, l: Letter) -> String {
        let n = &self.names[(l / 2) as usize];
        if l % 2 == 0 {
            n.clone()
        } else {
            capitalize(n)
        }
    }

    pub fn word_string(&self, word: &[Letter]) -> String {
        word.iter().map(|&l| self.letter_name(l)).collect::<Vec<_>>().join(" ")
    }

    pub fn parse_word(&self, text: &str) -> Result<Vec<Letter>> {
        text.split_whitespace()
            .map(|tok| {
                (0..2 * self.rank())
                    .map(|l| l as Letter)
                    .find(|&l| self.letter_name(l) == tok)
                    .ok_or_else(|| HyperbolicError::InvalidPreset(format!("unknown letter `{tok}`")))
            })
            .collect()
    }

    pub fn word_matrix(&self, word: &[Letter]) -> MobiusMatrix {
        let letters = self.letters();
        word.iter().fold(MobiusMatrix::IDENTITY, |acc, &l| acc * letters[l as usize])
    }

    /// Moves `z` into the fundamental domain: returns `(h, z')` with
    /// `z = h z'`. Cocompact presets use the Dirichlet domain about
    /// `center`, Schottky presets the common exterior of the isometric disks.
    /// `None` when the preset carries no domain.
    pub fn reduce_point(&self, z: Point) -> Result<Option<(Vec<Letter>, Point)>> {
        let letters = self.letters();
        let mut word = Vec::new();
        let mut cur = z;
        for _ in 0..10_000 {
            let step = match self.kind {
                PresetKind::Cocompact => {
                    if self.domain_radius.is_none() {
                        return Ok(None);
                    }
                    // d(c, s z) < d(c, z) means z is nearer s^-1 c than c
                    let here = dist(self.center, cur);
                    letters
                        .iter()
                        .enumerate()
                        .map(|(l, m)| (dist(self.center, m.apply(cur)), l as Letter))
                        .filter(|&(d, _)| d < here - 1e-12)
                        .min_by(|a, b| a.0.total_cmp(&b.0))
                        .map(|(_, l)| (l, inverse_letter(l)))
                }
                PresetKind::Schottky => self
                    .target_disks()
                    .iter()
                    .position(|&(c, r)| (cur - c).norm() < r)
                    .map(|l| (inverse_letter(l as Letter), l as Letter)),
            };
            match step {
                None => return Ok(Some((word, cur))),
                Some((apply, append)) => {
                    cur = letters[apply as usize].apply(cur);
                    push_reduced(&mut word, append);
                }
            }
        }
        Err(HyperbolicError::Domain(format!("{z} did not reduce into the fundamental domain")))
    }

    /// Largest `d(z, s z)` over generators `s`.
    pub fn max_generator_displacement(&self, z: Point) -> f64 {
        self.generators.iter().map(|g| dist(z, g.apply(z))).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn i() -> Point {
        Complex64::new(0.0, 1.0)
    }

    #[test]
    fn distance_examples() {
        assert_eq!(hyp_distance(i(), i()).unwrap(), 0.0);
        let d = hyp_distance(i(), Complex64::new(0.0, 4.0)).unwrap();
        assert!((d - 4f64.ln()).abs() < 1e-14);
        // cosh form as a second route
        let (z, w) = (Complex64::new(0.3, 0.7), Complex64::new(-1.2, 2.5));
        let cosh = 1.0 + (z - w).norm_sqr() / (2.0 * z.im * w.im);
        assert!((hyp_distance(z, w).unwrap() - cosh.acosh()).abs() < 1e-12);
        assert!(hyp_distance(i(), Complex64::new(1.0, 0.0)).is_err());
        assert!(hyp_distance(Complex64::new(0.0, -1.0), i()).is_err());
    }

    #[test]
    fn distance_is_isometry_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let (a, c, d) = (rng.gen_range(0.5..3.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let b = (a * d - 1.0) / c;
            let g = MobiusMatrix::new(a, b, c, d).unwrap();
            let z = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.2..3.0));
            let w = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.2..3.0));
            let before = hyp_distance(z, w).unwrap();
            let after = hyp_distance(g.apply(z), g.apply(w)).unwrap();
            assert!((before - after).abs() < 1e-10 * before.max(1.0), "{before} vs {after}");
        }
    }

    #[test]
    fn matrix_basics() {
        assert!(MobiusMatrix::new(2.0, 0.0, 0.0, 1.0).is_err());
        let g = MobiusMatrix::new(3.0, 8.0, 1.0, 3.0).unwrap();
        let id = g * g.inverse();
        assert!(id.same_element(&MobiusMatrix::IDENTITY));
        assert!(g.neg().same_element(&g));
        assert_eq!(g.neg().normalized(), g);
        assert_eq!(g.isometric_circle(), Some((-3.0, 1.0)));
        let t = MobiusMatrix::translation(2.0);
        assert!((t.translation_length() - 2.0).abs() < 1e-12);
        assert!((dist(i(), t.apply(i())) - 2.0).abs() < 1e-12);
        assert!((dist(i(), polar_from_i(1.5, 0.7)) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn bundled_presets_validate() {
        let s = FuchsianPreset::schottky();
        assert_eq!(s.kind, PresetKind::Schottky);
        assert_eq!(s.rank(), 2);
        assert!(s.in_schottky_domain(i()));
        let o = FuchsianPreset::genus2_octagon();
        assert_eq!(o.kind, PresetKind::Cocompact);
        assert_eq!(o.word_string(o.relator.as_ref().unwrap()), "a0 A1 a2 A3 A0 a1 A2 a3");
        assert!((o.area.unwrap() - 4.0 * std::f64::consts::PI).abs() < 1e-12);
        // side pairings translate the center by twice the inradius
        for g in &o.generators {
            assert!((dist(o.center, g.apply(o.center)) - o.systole.unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn validation_rejects_bad_presets() {
        let parabolic = r#"{"name":"p","kind":"schottky","generators":[[1,1,0,1]]}"#;
        assert!(matches!(FuchsianPreset::from_json_str(parabolic), Err(HyperbolicError::InvalidPreset(_))));
        let overlapping = r#"{"name":"o","kind":"schottky","generators":[[3,8,1,3],[3,-8,-1,3]]}"#;
        assert!(matches!(FuchsianPreset::from_json_str(overlapping), Err(HyperbolicError::InvalidPreset(_))));
        let mut text = OCTAGON_JSON.replace("4.6115817893087145", "4.61158");
        text = text.replace("0.2168453354374751", &format!("{}", 1.0 / 4.61158));
        assert!(matches!(FuchsianPreset::from_json_str(&text), Err(HyperbolicError::InvalidPreset(_))));
        let unknown = OCTAGON_JSON.replace("a0 A1", "x0 A1");
        assert!(FuchsianPreset::from_json_str(&unknown).is_err());
    }

    #[test]
    fn default_names_pair_up() {
        let text = r#"{"name":"s","kind":"schottky","generators":[[3,8,1,3],[2,1.5,2,2]]}"#;
        let p = FuchsianPreset::from_json_str(text).unwrap();
        assert_eq!(p.names, vec!["a1", "b1"]);
        assert_eq!(p.parse_word("a1 B1").unwrap(), vec![0, 3]);
    }
}
