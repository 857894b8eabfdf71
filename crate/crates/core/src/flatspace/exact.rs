//! Integer and rational helpers shared by the flat engines.

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{FlatError, Rational};

/// Parses `p/q`, an integer, or a plain decimal such as `-0.125` or `2.5e-1`
/// into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational, FlatError> {
    let s = s.trim();
    let bad = || FlatError::Parse(s.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: i128 = p.trim().parse().map_err(|_| bad())?;
        let q: i128 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(FlatError::Domain(format!("zero denominator in `{s}`")));
        }
        return Ok(Rational::new(p, q));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut num: i128 = all.parse().map_err(|_| bad())?;
    let scale = exp - frac_part.len() as i32;
    if scale.unsigned_abs() > 30 {
        return Err(FlatError::Domain(format!("`{s}` is out of range")));
    }
    if neg {
        num = -num;
    }
    let p = 10i128.pow(scale.unsigned_abs());
    Ok(if scale >= 0 { Rational::from_integer(num * p) } else { Rational::new(num, p) })
}

pub fn to_f64(r: &Rational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

/// Extended gcd: `(g, a, b)` with `a*x + b*y = g >= 0`.
pub fn ext_gcd(x: i128, y: i128) -> (i128, i128, i128) {
    let e = x.extended_gcd(&y);
    if e.gcd < 0 {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

pub fn lcm_denoms<'a>(values: impl IntoIterator<Item = &'a Rational>) -> i128 {
    values.into_iter().fold(1i128, |acc, r| acc.lcm(r.denom()))
}

/// `r * d` for a multiple `d` of the denominator of `r`.
pub fn scale(r: &Rational, d: i128) -> i128 {
    debug_assert!(d % r.denom() == 0);
    r.numer() * (d / r.denom())
}

pub fn cross(a: [i128; 2], b: [i128; 2]) -> i128 {
    a[0] * b[1] - a[1] * b[0]
}

/// All `s` in `(0, 1)` with `s * v` in `w + m Z^2`, sorted ascending.
///
/// With `g = gcd(v)` and `p = v / g`, pick `a p1 + b p2 = 1`. The unimodular
/// change of basis `(a, b; -p2, p1)` splits the condition into
/// `s g = a w1 + b w2 + m j` for free `j` and `m | p1 w2 - p2 w1`.
pub fn line_hits(v: [i128; 2], w: [i128; 2], m: i128) -> Vec<Rational> {
    assert!(m > 0, "modulus must be positive");
    let (g, a, b) = ext_gcd(v[0], v[1]);
    if g == 0 {
        return Vec::new();
    }
    let p = [v[0] / g, v[1] / g];
    let beta = p[0] * w[1] - p[1] * w[0];
    if beta % m != 0 {
        return Vec::new();
    }
    let alpha = (a * w[0] + b * w[1]).rem_euclid(m);
    let mut out = Vec::new();
    let mut r = if alpha == 0 { m } else { alpha };
    while r < g {
        out.push(Rational::new(r, g));
        r += m;
    }
    out
}

/// Solutions of `r p in w + m Z^2` for primitive `p`, as `alpha + m Z`.
/// Returns `alpha` in `[0, m)` when the coset meets the line.
pub fn line_offset(p: [i128; 2], w: [i128; 2], m: i128) -> Option<i128> {
    let (g, a, b) = ext_gcd(p[0], p[1]);
    debug_assert_eq!(g, 1);
    let beta = p[0] * w[1] - p[1] * w[0];
    if beta % m != 0 {
        return None;
    }
    Some((a * w[0] + b * w[1]).rem_euclid(m))
}

pub fn gcd2(v: [i128; 2]) -> i128 {
    v[0].gcd(&v[1])
}

pub fn rational_floor_div(a: i128, b: i128) -> i128 {
    Integer::div_floor(&a, &b)
}

pub fn rational_ceil_div(a: i128, b: i128) -> i128 {
    -Integer::div_floor(&-a, &b)
}

pub fn is_strict_unit(r: &Rational) -> bool {
    r.is_positive() && *r < Rational::from_integer(1) && !r.is_zero()
}
