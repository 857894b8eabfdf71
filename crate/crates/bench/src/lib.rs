//! Fixed inputs shared by the benchmarks.

use geoblock::flatspace::rat;
use geoblock::hyperbolic::{upper_point, Point};
use geoblock::{FuchsianPreset, RationalPoint};

/// An off-lattice pair on the unit torus.
pub fn torus_pair() -> (RationalPoint, RationalPoint) {
    (RationalPoint::origin(), RationalPoint::new(rat(1, 3), rat(1, 5)))
}

/// An interior pair on the square table.
pub fn billiard_pair() -> (RationalPoint, RationalPoint) {
    (RationalPoint::new(rat(1, 3), rat(1, 7)), RationalPoint::new(rat(3, 5), rat(5, 9)))
}

/// The preset center and a nearby point.
pub fn hyperbolic_pair(preset: &FuchsianPreset) -> (Point, Point) {
    let c = preset.center;
    (c, upper_point(c.re + 0.2 * c.im, 1.1 * c.im).expect("upper half-plane point"))
}
