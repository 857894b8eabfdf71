//! Exact enumeration of connecting geodesics on flat 2-tori and on the unit
//! square billiard table.
//!
//! All geometry is done in rational arithmetic. Points are mapped to a
//! coordinate frame in which the identification group is a translation
//! lattice `mod * Z^2` plus a finite set of sign flips:
//!
//! * torus: lattice coordinates, `mod = 1`, no flips;
//! * billiard: plane coordinates, `mod = 2`, flips `(±1, ±1)` (unfolding).
//!
//! Every incidence question then reduces to [`exact::line_hits`] after
//! clearing denominators.

pub mod exact;

use std::fmt;
use std::io::Write;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use exact::{line_hits, parse_rational, to_f64};
use exact::{cross, gcd2, lcm_denoms, rational_ceil_div, rational_floor_div, scale};

pub type Rational = Ratio<i128>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlatError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("cannot parse `{0}` as a rational")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, FlatError>;

const ID: [[i128; 2]; 1] = [[1, 1]];
const FLIPS: [[i128; 2]; 4] = [[1, 1], [1, -1], [-1, 1], [-1, -1]];

pub fn rat(n: i128, d: i128) -> Rational {
    Rational::new(n, d)
}

pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalPoint {
    pub x: Rational,
    pub y: Rational,
}

impl RationalPoint {
    pub fn new(x: Rational, y: Rational) -> Self {
        Self { x, y }
    }

    pub fn origin() -> Self {
        Self::new(Rational::zero(), Rational::zero())
    }

    pub fn parse(x: &str, y: &str) -> Result<Self> {
        Ok(Self::new(parse_rational(x)?, parse_rational(y)?))
    }

    pub fn to_f64(&self) -> [f64; 2] {
        [to_f64(&self.x), to_f64(&self.y)]
    }

    pub fn as_array(&self) -> [Rational; 2] {
        [self.x, self.y]
    }

    pub fn translate(&self, c: [Rational; 2]) -> Self {
        Self::new(self.x + c[0], self.y + c[1])
    }
}

impl From<[Rational; 2]> for RationalPoint {
    fn from(a: [Rational; 2]) -> Self {
        Self::new(a[0], a[1])
    }
}

impl fmt::Display for RationalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", fmt_rational(&self.x), fmt_rational(&self.y))
    }
}

impl Serialize for RationalPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [fmt_rational(&self.x), fmt_rational(&self.y)].serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [x, y] = <[String; 2]>::deserialize(d)?;
        RationalPoint::parse(&x, &y).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpaceKind {
    /// Plane modulo the lattice spanned by the two basis vectors.
    Torus { basis: [[Rational; 2]; 2] },
    /// The unit square `[0, 1]^2` with specular reflection.
    SquareBilliard,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlatSpace {
    kind: SpaceKind,
    covolume: Rational,
    shortest: [Rational; 2],
    shortest_len2: Rational,
    delta2: Rational,
    /// Inverse basis matrix, rows map plane vectors to lattice coordinates.
    inverse: [[Rational; 2]; 2],
}

fn dot(a: [Rational; 2], b: [Rational; 2]) -> Rational {
    a[0] * b[0] + a[1] * b[1]
}

fn sub(a: [Rational; 2], b: [Rational; 2]) -> [Rational; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

fn norm2(a: [Rational; 2]) -> Rational {
    dot(a, a)
}

fn canonical_sign(v: [Rational; 2]) -> [Rational; 2] {
    if v[0].is_negative() || (v[0].is_zero() && v[1].is_negative()) {
        [-v[0], -v[1]]
    } else {
        v
    }
}

/// Gauss reduction of a rank-2 lattice basis.
pub fn reduce_basis(b1: [Rational; 2], b2: [Rational; 2]) -> ([Rational; 2], [Rational; 2]) {
    let (mut a, mut b) = (b1, b2);
    loop {
        if norm2(a) > norm2(b) {
            std::mem::swap(&mut a, &mut b);
        }
        let q = dot(a, b) / norm2(a);
        // |q| = 1/2 is already reduced; rounding it would cycle
        if q.abs() <= Rational::new(1, 2) {
            return (a, b);
        }
        let mu = q.round();
        b = [b[0] - mu * a[0], b[1] - mu * a[1]];
    }
}

impl FlatSpace {
    pub fn torus(b1: [Rational; 2], b2: [Rational; 2]) -> Result<Self> {
        let det = b1[0] * b2[1] - b1[1] * b2[0];
        if det.is_zero() {
            return Err(FlatError::Domain("lattice basis is degenerate".into()));
        }
        let (r1, r2) = reduce_basis(b1, b2);
        // Minimality over a reduced basis is certified by the small
        // coefficient box; shorter vectors would need |c| >= 3 otherwise.
        let mut best = r1;
        for c1 in -2i128..=2 {
            for c2 in -2i128..=2 {
                if c1 == 0 && c2 == 0 {
                    continue;
                }
                let (c1, c2) = (Rational::from_integer(c1), Rational::from_integer(c2));
                let v = [c1 * r1[0] + c2 * r2[0], c1 * r1[1] + c2 * r2[1]];
                if norm2(v) < norm2(best) {
                    best = v;
                }
            }
        }
        let shortest = canonical_sign(best);
        let shortest_len2 = norm2(shortest);
        // columns b1, b2; inverse = adj / det
        let inverse = [[b2[1] / det, -b2[0] / det], [-b1[1] / det, b1[0] / det]];
        Ok(Self {
            kind: SpaceKind::Torus { basis: [b1, b2] },
            covolume: det.abs(),
            shortest,
            shortest_len2,
            delta2: shortest_len2 / Rational::from_integer(4),
            inverse,
        })
    }

    pub fn unit_torus() -> Self {
        let (o, z) = (Rational::one(), Rational::zero());
        Self::torus([o, z], [z, o]).expect("unit lattice")
    }

    /// Rectangular torus `R^2 / (a Z x b Z)`.
    pub fn rectangular_torus(a: Rational, b: Rational) -> Result<Self> {
        let z = Rational::zero();
        Self::torus([a, z], [z, b])
    }

    /// The unit square table. Its injectivity scale is fixed at `1/4`.
    pub fn square_billiard() -> Self {
        let (o, z) = (Rational::one(), Rational::zero());
        Self {
            kind: SpaceKind::SquareBilliard,
            covolume: o,
            shortest: [Rational::from_integer(2), z],
            shortest_len2: Rational::from_integer(4),
            delta2: rat(1, 16),
            inverse: [[o, z], [z, o]],
        }
    }

    pub fn kind(&self) -> &SpaceKind {
        &self.kind
    }

    pub fn is_billiard(&self) -> bool {
        matches!(self.kind, SpaceKind::SquareBilliard)
    }

    pub fn covolume(&self) -> Rational {
        self.covolume
    }

    /// Squared injectivity radius used by the recursion and the verifier.
    pub fn delta2(&self) -> Rational {
        self.delta2
    }

    pub fn delta(&self) -> f64 {
        to_f64(&self.delta2).sqrt()
    }

    /// Shortest nonzero lattice vector and its squared length.
    pub fn shortest_vector(&self) -> Result<([Rational; 2], Rational)> {
        match self.kind {
            SpaceKind::Torus { .. } => Ok((self.shortest, self.shortest_len2)),
            SpaceKind::SquareBilliard => {
                Err(FlatError::Unsupported("shortest_vector needs a torus".into()))
            }
        }
    }

    pub fn basis(&self) -> Option<[[Rational; 2]; 2]> {
        match self.kind {
            SpaceKind::Torus { basis } => Some(basis),
            SpaceKind::SquareBilliard => None,
        }
    }

    pub fn modulus(&self) -> i128 {
        if self.is_billiard() {
            2
        } else {
            1
        }
    }

    fn flips(&self) -> &'static [[i128; 2]] {
        if self.is_billiard() {
            &FLIPS
        } else {
            &ID
        }
    }

    /// Frame coordinates of a plane vector or point.
    pub fn coords(&self, p: [Rational; 2]) -> [Rational; 2] {
        let m = &self.inverse;
        [m[0][0] * p[0] + m[0][1] * p[1], m[1][0] * p[0] + m[1][1] * p[1]]
    }

    /// Plane vector from frame coordinates.
    pub fn plane(&self, c: [Rational; 2]) -> [Rational; 2] {
        match self.kind {
            SpaceKind::Torus { basis: [b1, b2] } => {
                [c[0] * b1[0] + c[1] * b2[0], c[0] * b1[1] + c[1] * b2[1]]
            }
            SpaceKind::SquareBilliard => c,
        }
    }

    /// Canonical representative of a point: lattice coordinates in `[0, 1)`
    /// on the torus, the folded point in `[0, 1]^2` on the table.
    pub fn canonical(&self, p: &RationalPoint) -> RationalPoint {
        match self.kind {
            SpaceKind::Torus { .. } => {
                let c = self.coords(p.as_array());
                let c = [c[0] - c[0].floor(), c[1] - c[1].floor()];
                self.plane(c).into()
            }
            SpaceKind::SquareBilliard => {
                let two = Rational::from_integer(2);
                let fold = |v: Rational| {
                    let r = v - (v / two).floor() * two;
                    if r > Rational::one() {
                        two - r
                    } else {
                        r
                    }
                };
                RationalPoint::new(fold(p.x), fold(p.y))
            }
        }
    }

    pub fn same_point(&self, a: &RationalPoint, b: &RationalPoint) -> bool {
        self.canonical(a) == self.canonical(b)
    }

    fn check_endpoint(&self, p: &RationalPoint) -> Result<()> {
        if self.is_billiard() {
            let inside = |v: Rational| v.is_positive() && v < Rational::one();
            if !(inside(p.x) && inside(p.y)) {
                return Err(FlatError::Unsupported(format!(
                    "billiard endpoints must lie in the open unit square, got {p}"
                )));
            }
        }
        Ok(())
    }

    /// Row norms of the inverse basis, for enumeration boxes.
    fn coord_scale(&self) -> [f64; 2] {
        let m = &self.inverse;
        [
            (to_f64(&m[0][0]).powi(2) + to_f64(&m[0][1]).powi(2)).sqrt(),
            (to_f64(&m[1][0]).powi(2) + to_f64(&m[1][1]).powi(2)).sqrt(),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SegmentClass {
    Connecting,
    PassesThroughEndpoint,
}

impl SegmentClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            SegmentClass::Connecting => "connecting",
            SegmentClass::PassesThroughEndpoint => "passes-through-endpoint",
        }
    }
}

/// Unfolding datum of a billiard segment: the target is the image
/// `(s1 * y.x + 2m, s2 * y.y + 2n)` of `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BilliardImage {
    pub sigma: [i8; 2],
    pub shift: [i128; 2],
    pub unfolded: RationalPoint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicSegment {
    pub x: RationalPoint,
    pub y: RationalPoint,
    /// Plane displacement from `x` to the lifted target.
    pub v: [Rational; 2],
    pub image: Option<BilliardImage>,
    pub len2: Rational,
    pub class: SegmentClass,
    cx: [Rational; 2],
    cv: [Rational; 2],
}

impl GeodesicSegment {
    pub fn is_connecting(&self) -> bool {
        self.class == SegmentClass::Connecting
    }

    /// Point at parameter `s` of the constant-speed parametrization.
    pub fn point_at(&self, space: &FlatSpace, s: Rational) -> RationalPoint {
        let c = [self.cx[0] + s * self.cv[0], self.cx[1] + s * self.cv[1]];
        space.canonical(&space.plane(c).into())
    }
}

/// Interior parameters at which a segment meets its own endpoints.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Classification {
    pub through_x: Vec<Rational>,
    pub through_y: Vec<Rational>,
}

impl Classification {
    pub fn class(&self) -> SegmentClass {
        if self.through_x.is_empty() && self.through_y.is_empty() {
            SegmentClass::Connecting
        } else {
            SegmentClass::PassesThroughEndpoint
        }
    }
}

/// All `s` in `(0, 1)` where the line `cx + s cv` meets an image of `cz`.
fn frame_hits(space: &FlatSpace, cx: [Rational; 2], cv: [Rational; 2], cz: [Rational; 2]) -> Vec<Rational> {
    let mut out = Vec::new();
    for f in space.flips() {
        let w = [Rational::from_integer(f[0]) * cz[0] - cx[0], Rational::from_integer(f[1]) * cz[1] - cx[1]];
        let d = lcm_denoms(cv.iter().chain(w.iter()));
        let hits = line_hits(
            [scale(&cv[0], d), scale(&cv[1], d)],
            [scale(&w[0], d), scale(&w[1], d)],
            d * space.modulus(),
        );
        out.extend(hits);
    }
    out.sort();
    out.dedup();
    out
}

/// True when the open segment meets an integer point of the plane, which on
/// the table is an image of a corner.
fn hits_corner(cx: [Rational; 2], cv: [Rational; 2]) -> bool {
    let d = lcm_denoms(cv.iter().chain(cx.iter()));
    !line_hits(
        [scale(&cv[0], d), scale(&cv[1], d)],
        [-scale(&cx[0], d), -scale(&cx[1], d)],
        d,
    )
    .is_empty()
}

pub fn classify(space: &FlatSpace, seg: &GeodesicSegment) -> Classification {
    Classification {
        through_x: frame_hits(space, seg.cx, seg.cv, space.coords(seg.x.as_array())),
        through_y: frame_hits(space, seg.cx, seg.cv, space.coords(seg.y.as_array())),
    }
}

/// Interior parameters where `seg` passes through `z`; empty means `z` does
/// not block it.
pub fn point_on_geodesic(space: &FlatSpace, z: &RationalPoint, seg: &GeodesicSegment) -> Vec<Rational> {
    frame_hits(space, seg.cx, seg.cv, space.coords(z.as_array()))
}

/// Result of an enumeration, with billiard segments dropped for running into
/// a corner.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Family {
    pub segments: Vec<GeodesicSegment>,
    pub corner_rejected: usize,
}

impl Family {
    pub fn n(&self) -> usize {
        self.segments.len()
    }

    pub fn m(&self) -> usize {
        self.segments.iter().filter(|s| s.is_connecting()).count()
    }

    pub fn connecting(&self) -> Vec<GeodesicSegment> {
        self.segments.iter().filter(|s| s.is_connecting()).cloned().collect()
    }
}

fn build_segment(
    space: &FlatSpace,
    x: &RationalPoint,
    y: &RationalPoint,
    cx: [Rational; 2],
    cv: [Rational; 2],
    image: Option<BilliardImage>,
) -> GeodesicSegment {
    let v = space.plane(cv);
    let mut seg = GeodesicSegment {
        x: *x,
        y: *y,
        v,
        image,
        len2: norm2(v),
        class: SegmentClass::Connecting,
        cx,
        cv,
    };
    seg.class = classify(space, &seg).class();
    seg
}

fn int_range(center: f64, radius: f64) -> std::ops::RangeInclusive<i128> {
    ((center - radius).floor() as i128 - 1)..=((center + radius).ceil() as i128 + 1)
}

/// Every geodesic segment from `x` to `y` with `0 < |v|^2 <= t2`, in
/// canonical (lexicographic displacement) order.
pub fn enumerate_family(space: &FlatSpace, x: &RationalPoint, y: &RationalPoint, t2: Rational) -> Result<Family> {
    if !t2.is_positive() {
        return Err(FlatError::Domain("t^2 must be positive".into()));
    }
    space.check_endpoint(x)?;
    space.check_endpoint(y)?;
    let t = to_f64(&t2).sqrt() * (1.0 + 1e-9);
    let cx = space.coords(x.as_array());
    let cy = space.coords(y.as_array());
    let mut found: Vec<(GeodesicSegment, bool)> = match space.kind {
        SpaceKind::Torus { .. } => {
            let cd = sub(cy, cx);
            let sc = space.coord_scale();
            let r0 = int_range(-to_f64(&cd[0]), t * sc[0]);
            let r1 = int_range(-to_f64(&cd[1]), t * sc[1]);
            r0.into_par_iter()
                .flat_map_iter(|l0| {
                    let r1 = r1.clone();
                    r1.filter_map(move |l1| {
                        let cv = [cd[0] + Rational::from_integer(l0), cd[1] + Rational::from_integer(l1)];
                        let len2 = norm2(space.plane(cv));
                        (len2.is_positive() && len2 <= t2).then(|| (build_segment(space, x, y, cx, cv, None), false))
                    })
                })
                .collect()
        }
        SpaceKind::SquareBilliard => FLIPS
            .par_iter()
            .flat_map_iter(|f| {
                let img = [Rational::from_integer(f[0]) * y.x, Rational::from_integer(f[1]) * y.y];
                let two = Rational::from_integer(2);
                let r0 = int_range(to_f64(&(x.x - img[0])) / 2.0, t / 2.0);
                let r1 = int_range(to_f64(&(x.y - img[1])) / 2.0, t / 2.0);
                r0.flat_map(move |m| r1.clone().map(move |n| (m, n))).filter_map(move |(m, n)| {
                    let unfolded = [img[0] + two * Rational::from_integer(m), img[1] + two * Rational::from_integer(n)];
                    let cv = sub(unfolded, cx);
                    let len2 = norm2(cv);
                    if !(len2.is_positive() && len2 <= t2) {
                        return None;
                    }
                    let image = BilliardImage {
                        sigma: [f[0] as i8, f[1] as i8],
                        shift: [m, n],
                        unfolded: unfolded.into(),
                    };
                    let corner = hits_corner(cx, cv);
                    Some((build_segment(space, x, y, cx, cv, Some(image)), corner))
                })
            })
            .collect(),
    };
    found.sort_by(|a, b| a.0.v.cmp(&b.0.v));
    let corner_rejected = found.iter().filter(|f| f.1).count();
    let segments = found.into_iter().filter(|f| !f.1).map(|f| f.0).collect();
    Ok(Family { segments, corner_rejected })
}

pub fn enumerate_geodesics(
    space: &FlatSpace,
    x: &RationalPoint,
    y: &RationalPoint,
    t2: Rational,
) -> Result<Vec<GeodesicSegment>> {
    Ok(enumerate_family(space, x, y, t2)?.segments)
}

/// `(n_t, m_t)`: all segments of length at most `t`, and those not passing
/// through an endpoint.
pub fn count(space: &FlatSpace, x: &RationalPoint, y: &RationalPoint, t2: Rational) -> Result<(usize, usize)> {
    let fam = enumerate_family(space, x, y, t2)?;
    Ok((fam.n(), fam.m()))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Intersection {
    /// Transversal crossing at parameter `s` of the first and `u` of the second segment.
    Crossing { point: RationalPoint, s: Rational, u: Rational },
    /// Collinear overlap; `point` is the overlap midpoint.
    Overlap {
        point: RationalPoint,
        s_range: (Rational, Rational),
        u_range: (Rational, Rational),
    },
}

impl Intersection {
    pub fn point(&self) -> &RationalPoint {
        match self {
            Intersection::Crossing { point, .. } | Intersection::Overlap { point, .. } => point,
        }
    }
}

/// Common interior points of two segments sharing the source `x`.
///
/// Crossings solve `s v - u w' in base + mod Z^2` over the lattice points in
/// the parallelogram `{s v - u w'}`; parallel carriers reduce to interval
/// overlaps along the common line.
pub fn intersection_candidates(space: &FlatSpace, a: &GeodesicSegment, b: &GeodesicSegment) -> Vec<Intersection> {
    assert!(a.cx == b.cx, "segments must share their source point");
    let mut out = Vec::new();
    let cx = a.cx;
    for f in space.flips() {
        let fr = [Rational::from_integer(f[0]), Rational::from_integer(f[1])];
        let w = [fr[0] * b.cv[0], fr[1] * b.cv[1]];
        let base = [fr[0] * cx[0] - cx[0], fr[1] * cx[1] - cx[1]];
        let d = lcm_denoms(a.cv.iter().chain(w.iter()).chain(base.iter()));
        let dv = [scale(&a.cv[0], d), scale(&a.cv[1], d)];
        let dw = [scale(&w[0], d), scale(&w[1], d)];
        let db = [scale(&base[0], d), scale(&base[1], d)];
        let m = d * space.modulus();
        let point_at = |s: Rational| -> RationalPoint {
            let c = [cx[0] + s * a.cv[0], cx[1] + s * a.cv[1]];
            space.canonical(&space.plane(c).into())
        };
        let cr = cross(dv, dw);
        if cr != 0 {
            let corners = [[0, 0], dv, [-dw[0], -dw[1]], [dv[0] - dw[0], dv[1] - dw[1]]];
            let lo = |i: usize| corners.iter().map(|c| c[i]).min().unwrap();
            let hi = |i: usize| corners.iter().map(|c| c[i]).max().unwrap();
            let k0 = rational_ceil_div(lo(0) - db[0], m)..=rational_floor_div(hi(0) - db[0], m);
            for k0 in k0 {
                for k1 in rational_ceil_div(lo(1) - db[1], m)..=rational_floor_div(hi(1) - db[1], m) {
                    let l = [db[0] + m * k0, db[1] + m * k1];
                    let s = Rational::new(cross(l, dw), cr);
                    let u = Rational::new(cross(l, dv), cr);
                    if exact::is_strict_unit(&s) && exact::is_strict_unit(&u) {
                        out.push(Intersection::Crossing { point: point_at(s), s, u });
                    }
                }
            }
        } else {
            let g = gcd2(dv);
            let h = gcd2(dw);
            let p = [dv[0] / g, dv[1] / g];
            let eps = if p[0] * dw[0] + p[1] * dw[1] > 0 { 1 } else { -1 };
            let Some(alpha) = exact::line_offset(p, db, m) else { continue };
            // rho ranges over alpha + m Z inside (-h, g + h)
            let mut rho = alpha + m * rational_ceil_div(-h + 1 - alpha, m);
            while rho < g + h {
                let (i0, i1) = if eps > 0 { (rho, rho + h) } else { (rho - h, rho) };
                let lo = i0.max(0);
                let hi = i1.min(g);
                if lo < hi {
                    let s_range = (Rational::new(lo, g), Rational::new(hi, g));
                    let u_of = |r: i128| Rational::new((r - rho) * eps, h);
                    let (u0, u1) = (u_of(lo), u_of(hi));
                    let u_range = if u0 <= u1 { (u0, u1) } else { (u1, u0) };
                    let mid = Rational::new(lo + hi, 2 * g);
                    out.push(Intersection::Overlap { point: point_at(mid), s_range, u_range });
                }
                rho += m;
            }
        }
    }
    out
}

/// Writes a family as CSV `vx,vy,len2,class`.
pub fn write_family_csv<W: Write>(segments: &[GeodesicSegment], mut out: W) -> std::io::Result<()> {
    writeln!(out, "vx,vy,len2,class")?;
    for s in segments {
        writeln!(
            out,
            "{},{},{},{}",
            crate::fmt_sig(to_f64(&s.v[0])),
            crate::fmt_sig(to_f64(&s.v[1])),
            crate::fmt_sig(to_f64(&s.len2)),
            s.class.as_str()
        )?;
    }
    Ok(())
}
