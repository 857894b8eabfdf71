//! Brute-force oracles shared by the integration tests.

#![allow(dead_code)]

use fixedbitset::FixedBitSet;
use geoblock::flatspace::{rat, to_f64};
use geoblock::{FlatSpace, Rational, RationalPoint};
use num_traits::{Signed, Zero};

pub type V = [Rational; 2];

fn dot(a: V, b: V) -> Rational {
    a[0] * b[0] + a[1] * b[1]
}

fn cross(a: V, b: V) -> Rational {
    a[0] * b[1] - a[1] * b[0]
}

fn norm(a: V) -> f64 {
    to_f64(&dot(a, a)).sqrt()
}

/// All lattice vectors `i b1 + j b2` with `|.| <= r`.
pub fn lattice_ball(b: [V; 2], r: f64) -> Vec<V> {
    let det = to_f64(&cross(b[0], b[1])).abs();
    let ki = (r * norm(b[1]) / det).ceil() as i128 + 1;
    let kj = (r * norm(b[0]) / det).ceil() as i128 + 1;
    let r2 = r * r * (1.0 + 1e-9);
    let mut out = Vec::new();
    for i in -ki..=ki {
        for j in -kj..=kj {
            let (i, j) = (Rational::from_integer(i), Rational::from_integer(j));
            let v = [i * b[0][0] + j * b[1][0], i * b[0][1] + j * b[1][1]];
            if to_f64(&dot(v, v)) <= r2 {
                out.push(v);
            }
        }
    }
    out
}

/// Displacements of all segments `x -> y + l` with `0 < |v|^2 <= t2`, each
/// tagged with whether its interior meets an image of `x` or `y`.
pub fn torus_scan(space: &FlatSpace, x: &RationalPoint, y: &RationalPoint, t2: Rational) -> Vec<(V, bool)> {
    let b = space.basis().expect("torus");
    let d = [y.x - x.x, y.y - x.y];
    let t = to_f64(&t2).sqrt();
    let mut out = Vec::new();
    let lattice = lattice_ball(b, t + norm(d));
    for l in &lattice {
        let v = [d[0] + l[0], d[1] + l[1]];
        let len2 = dot(v, v);
        if len2.is_zero() || len2 > t2 {
            continue;
        }
        let inside = |p: V| cross(v, p).is_zero() && dot(p, v).is_positive() && dot(p, v) < len2;
        let passes = lattice.iter().any(|mu| inside(*mu) || inside([mu[0] + d[0], mu[1] + d[1]]));
        out.push((v, passes));
    }
    out.sort();
    out
}

/// Least number of sets covering `0..universe`, by branching on the first
/// uncovered element.
pub fn min_cover(universe: usize, sets: &[FixedBitSet]) -> Option<usize> {
    fn fits(universe: usize, sets: &[FixedBitSet], covered: &FixedBitSet, k: usize) -> bool {
        let Some(g) = (0..universe).find(|&g| !covered.contains(g)) else {
            return true;
        };
        if k == 0 {
            return false;
        }
        sets.iter().filter(|s| s.contains(g)).any(|s| {
            let mut next = covered.clone();
            next.union_with(s);
            fits(universe, sets, &next, k - 1)
        })
    }
    let empty = FixedBitSet::with_capacity(universe);
    (0..=universe).find(|&k| fits(universe, sets, &empty, k))
}

/// The four half-lattice translates of the midpoint of `x` and `y`.
pub fn midpoints(b: [V; 2], x: &RationalPoint, y: &RationalPoint) -> Vec<V> {
    let h = rat(1, 2);
    let m = [(x.x + y.x) * h, (x.y + y.y) * h];
    [(0, 0), (1, 0), (0, 1), (1, 1)]
        .iter()
        .map(|&(i, j)| {
            let (i, j) = (Rational::from_integer(i) * h, Rational::from_integer(j) * h);
            [m[0] + i * b[0][0] + j * b[1][0], m[1] + i * b[0][1] + j * b[1][1]]
        })
        .collect()
}

/// `p - q` lies in the lattice spanned by `b`.
pub fn congruent(b: [V; 2], p: V, q: V) -> bool {
    let w = [p[0] - q[0], p[1] - q[1]];
    let det = cross(b[0], b[1]);
    (cross(w, b[1]) / det).is_integer() && (cross(b[0], w) / det).is_integer()
}

pub fn point(x: (i128, i128), y: (i128, i128)) -> RationalPoint {
    RationalPoint::new(rat(x.0, x.1), rat(y.0, y.1))
}
