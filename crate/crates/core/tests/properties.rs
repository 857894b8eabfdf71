mod common;

use common::{congruent, midpoints, torus_scan, V};
use geoblock::blocker::{blocking_threshold, SolverCaps};
use geoblock::flatspace::{count, enumerate_family, point_on_geodesic, rat};
use geoblock::growth::{kappa, kappa_exact, transform, ClosedForm, FnGrowth, GrowthSeries, TransformParams};
use geoblock::hyperbolic::{orbit_ball, word_growth, OrbitBudget, WordGroup};
use geoblock::{FlatSpace, FuchsianPreset, Rational, RationalPoint};
use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Pow};
use proptest::prelude::*;

fn torus_strategy() -> impl Strategy<Value = FlatSpace> {
    (prop::array::uniform4(-4i128..=4), 1i128..=3).prop_filter_map("degenerate or thin lattice", |(e, den)| {
        let b1 = [rat(e[0], den), rat(e[1], den)];
        let b2 = [rat(e[2], den), rat(e[3], den)];
        let space = FlatSpace::torus(b1, b2).ok()?;
        let covol = space.covolume();
        (space.delta2() >= rat(1, 16) && covol <= rat(4, 1)).then_some(space)
    })
}

fn point_strategy(den: i128) -> impl Strategy<Value = RationalPoint> {
    (0..den, 0..den).prop_map(move |(a, b)| RationalPoint::new(rat(a, den), rat(b, den)))
}

fn interior_point(den: i128) -> impl Strategy<Value = RationalPoint> {
    (1..den, 1..den).prop_map(move |(a, b)| RationalPoint::new(rat(a, den), rat(b, den)))
}

fn t2_strategy(max_num: i128) -> impl Strategy<Value = Rational> {
    (1..=max_num).prop_map(|k| rat(k * k, 16))
}

fn big(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Reduced words of length at most `n` over `2 * rank` letters.
fn reduced_words(rank: u32, n: u32) -> u64 {
    fn go(rank: u32, left: u32, last: Option<u32>) -> u64 {
        if left == 0 {
            return 1;
        }
        1 + (0..2 * rank).filter(|&l| last != Some(l ^ 1)).map(|l| go(rank, left - 1, Some(l))).sum::<u64>()
    }
    go(rank, n, None)
}

proptest! {
    #[test]
    fn transform_is_monotone(
        f in prop::collection::vec(0.1f64..10.0, 64),
        bump in prop::collection::vec(0.0f64..3.0, 64),
        t in 1.0f64..64.0,
    ) {
        let grid: Vec<f64> = (1..=64).map(f64::from).collect();
        let fs = GrowthSeries::new(grid.iter().copied().zip(f.iter().copied()).collect(), false).unwrap();
        let gs = GrowthSeries::new(
            grid.iter().zip(f.iter().zip(&bump)).map(|(&t, (&a, &b))| (t, a * (1.0 + b))).collect(),
            false,
        ).unwrap();
        let p = TransformParams::new(1.0).unwrap();
        let lo = transform(&fs, p, t, None).unwrap();
        let hi = transform(&gs, p, t, None).unwrap();
        prop_assert!(lo <= hi * (1.0 + 1e-12), "{lo} > {hi}");
    }

    #[test]
    fn transform_is_multiplicative(
        c in 0.1f64..10.0, p1 in 0i32..4, a1 in 0.0f64..1.0,
        d in 0.1f64..10.0, p2 in 0i32..4, a2 in 0.0f64..1.0,
        t in 0.01f64..100.0, delta in 0.05f64..4.0,
    ) {
        // rates below 1 keep f * g finite in binary64 up to t = 100
        let f = |t: f64| c * t.powi(p1) * (a1 * t).exp();
        let g = |t: f64| d * t.powi(p2) * (a2 * t).exp();
        let params = TransformParams::new(delta).unwrap();
        let fg = transform(&FnGrowth(|t| f(t) * g(t)), params, t, None).unwrap();
        let prod = transform(&FnGrowth(f), params, t, None).unwrap() * transform(&FnGrowth(g), params, t, None).unwrap();
        prop_assert!(((fg - prod) / prod).abs() <= 1e-12, "{fg} vs {prod}");
    }

    #[test]
    fn kappa_brackets_the_log_ratio(delta in 1e-3f64..1e3, ratio in 1.0f64..1e6) {
        let t = delta * ratio;
        prop_assume!(t >= delta);
        let k = kappa(t, TransformParams::new(delta).unwrap()).unwrap() as i32;
        // log2 t - log2 delta <= k <= log2 t - log2 delta + 1, multiplied out
        prop_assert!(t <= delta * 2f64.powi(k));
        prop_assert!(delta * 2f64.powi(k - 1) <= t);
    }

    #[test]
    fn exact_transform_of_identity(num in 1i64..5000, den in 1i64..50, dn in 1i64..8, dd in 1i64..8) {
        let (t, delta) = (big(num, den), big(dn, dd));
        let k = kappa_exact(&t, &delta).unwrap();
        let expected = Pow::pow(&t, k) / Pow::pow(&big(2, 1), k * k.saturating_sub(1) / 2);
        let got = ClosedForm::Linear(BigRational::one()).exact_transform(&t, &delta, None).unwrap();
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn counts_are_symmetric(space in torus_strategy(), x in point_strategy(6), y in point_strategy(6), t2 in t2_strategy(12)) {
        prop_assert_eq!(count(&space, &x, &y, t2).unwrap(), count(&space, &y, &x, t2).unwrap());
    }

    #[test]
    fn billiard_counts_are_symmetric(x in interior_point(7), y in interior_point(7), t2 in t2_strategy(16)) {
        let b = FlatSpace::square_billiard();
        prop_assert_eq!(count(&b, &x, &y, t2).unwrap(), count(&b, &y, &x, t2).unwrap());
    }

    #[test]
    fn counts_are_translation_invariant(
        space in torus_strategy(), x in point_strategy(6), y in point_strategy(6),
        c in (-12i128..12, -12i128..12, 1i128..7), t2 in t2_strategy(12),
    ) {
        let shift = [rat(c.0, c.2), rat(c.1, c.2)];
        prop_assert_eq!(
            count(&space, &x, &y, t2).unwrap(),
            count(&space, &x.translate(shift), &y.translate(shift), t2).unwrap()
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn enumeration_matches_lattice_scan(space in torus_strategy(), x in point_strategy(5), y in point_strategy(5), t2 in t2_strategy(16)) {
        let fam = enumerate_family(&space, &x, &y, t2).unwrap();
        let got: Vec<(V, bool)> = fam.segments.iter().map(|s| (s.v, !s.is_connecting())).collect();
        prop_assert_eq!(got, torus_scan(&space, &x, &y, t2));
    }

    #[test]
    fn billiard_unfolds_to_four_torus_images(x in interior_point(9), y in interior_point(9), t2 in t2_strategy(20)) {
        let b = FlatSpace::square_billiard();
        let torus = FlatSpace::torus([rat(2, 1), rat(0, 1)], [rat(0, 1), rat(2, 1)]).unwrap();
        let fam = enumerate_family(&b, &x, &y, t2).unwrap();
        let images: usize = [(1, 1), (-1, 1), (1, -1), (-1, -1)]
            .iter()
            .map(|&(s1, s2)| {
                let img = RationalPoint::new(y.x * rat(s1, 1), y.y * rat(s2, 1));
                count(&torus, &x, &img, t2).unwrap().0
            })
            .sum();
        prop_assert_eq!(fam.n() + fam.corner_rejected, images);
    }

    #[test]
    fn thresholds_respect_the_chain(space in torus_strategy(), x in point_strategy(6), y in point_strategy(6), t2 in t2_strategy(8)) {
        prop_assume!(!space.same_point(&x, &y));
        let r = blocking_threshold(&space, &x, &y, t2, &SolverCaps::default()).unwrap();
        prop_assert!(r.value <= r.m && r.m <= r.n, "{} {} {}", r.value, r.m, r.n);
        prop_assert!(r.value <= 4);
        let b = space.basis().unwrap();
        let inst = geoblock::blocker::build_instance(&space, &x, &y, t2).unwrap();
        for g in &inst.geodesics {
            prop_assert!(r.solution.points.iter().any(|z| !point_on_geodesic(&space, z, g).is_empty()));
            let mid = [x.x + g.v[0] / rat(2, 1), x.y + g.v[1] / rat(2, 1)];
            prop_assert!(midpoints(b, &x, &y).iter().any(|p| congruent(b, *p, mid)));
        }
    }

    #[test]
    fn thresholds_grow_with_t(x in point_strategy(8), y in point_strategy(8), a in 1i128..10, b in 1i128..10) {
        let space = FlatSpace::unit_torus();
        prop_assume!(!space.same_point(&x, &y));
        let (lo, hi) = (a.min(b), a.max(b));
        let caps = SolverCaps::default();
        let s_lo = blocking_threshold(&space, &x, &y, rat(lo * lo, 16), &caps).unwrap();
        let s_hi = blocking_threshold(&space, &x, &y, rat(hi * hi, 16), &caps).unwrap();
        prop_assert!(s_lo.optimal && s_hi.optimal);
        prop_assert!(s_lo.value <= s_hi.value);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn orbit_counts_are_isometry_invariant(word in prop::collection::vec(0u8..8, 1..4), shift in 0.0f64..0.3) {
        let preset = FuchsianPreset::genus2_octagon();
        let g = preset.word_matrix(&word);
        let x = preset.center + Complex64::new(shift, 0.1);
        let y = preset.center * Complex64::new(1.2, 0.0);
        let budget = OrbitBudget::default();
        let grid = [1.0, 2.0, 3.0, 4.0];
        let a = orbit_ball(&preset, x, y, 4.0, &budget).unwrap().counts(&grid);
        let b = orbit_ball(&preset, g.apply(x), g.apply(y), 4.0, &budget).unwrap().counts(&grid);
        let ca: Vec<u64> = a.iter().map(|r| r.count).collect();
        let cb: Vec<u64> = b.iter().map(|r| r.count).collect();
        prop_assert_eq!(ca, cb);
    }
}

#[test]
fn free_word_growth_matches_enumeration() {
    for rank in 1..=3 {
        for n in 0..=8 {
            assert_eq!(word_growth(WordGroup::Free { rank }, n), BigUint::from(reduced_words(rank, n)), "rank {rank} n {n}");
        }
    }
}

#[test]
fn quasi_polynomial_fit_of_the_identity_transform() {
    use geoblock::growth::{rate_estimate, transform_series, RateMode};
    let grid: Vec<f64> = (0..=160).map(|i| 2f64.powf(i as f64 / 8.0)).collect();
    let series = transform_series(&FnGrowth(|t: f64| t), TransformParams::new(1.0).unwrap(), &grid).unwrap();
    let fit = rate_estimate(&series, RateMode::QuasiPolynomial, 0.5).unwrap();
    let got = fit.kind.parameter().unwrap();

    // ln F = k ln t - k (k - 1) / 2 ln 2, regressed on (ln t)^2 over the same tail
    let start = grid[160] - 0.5 * (grid[160] - grid[0]);
    let pts: Vec<(f64, f64)> = grid
        .iter()
        .filter(|&&t| t >= start)
        .map(|&t| {
            let mut k = 0.0;
            while t / 2f64.powf(k) >= 1.0 {
                k += 1.0;
            }
            (t.ln().powi(2), k * t.ln() - k * (k - 1.0) / 2.0 * 2f64.ln())
        })
        .collect();
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (sxx, sxy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0 * p.0, a.1 + p.0 * p.1));
    let expected = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    assert!((got - expected).abs() <= 1e-9 * expected, "{got} vs {expected}");
    // the asymptotic coefficient is 1 / (2 ln 2)
    assert!((got - 1.0 / (2.0 * 2f64.ln())).abs() < 0.25, "{got}");
}
