//! Counting, blocking and growth analysis for connecting geodesics on flat
//! tori, the square billiard and compact hyperbolic surfaces.

pub mod blocker;
pub mod flatspace;
pub mod growth;
pub mod harness;
pub mod hyperbolic;
pub use flatspace::{
    FlatError, FlatSpace, GeodesicSegment, Rational, RationalPoint, SegmentClass, SpaceKind,
};
pub use blocker::{BlockError, BlockingSolution, IncidenceInstance, RecursionTree, SolverCaps, ThresholdResult};
pub use growth::{GrowthClass, GrowthError, GrowthKind, GrowthSeries, RateMode, TransformParams};
pub use harness::{Check, ExperimentConfig, HarnessError, Render, VerificationReport};
pub use hyperbolic::{FuchsianPreset, HyperbolicError, MobiusMatrix, OrbitBall, PresetKind};

/// Formats a float with 12 significant digits, trailing zeros trimmed.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-6..15).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" {
        "0".to_string()
    } else {
        t.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::fmt_sig;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(fmt_sig(1.0), "1");
        assert_eq!(fmt_sig(0.5), "0.5");
        assert_eq!(fmt_sig(64.0), "64");
        assert_eq!(fmt_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_sig(std::f64::consts::PI * 1000.0), "3141.59265359");
        assert_eq!(fmt_sig(-2.5), "-2.5");
        assert_eq!(fmt_sig(1e20), "1e20");
        assert_eq!(fmt_sig(1.5e-9), "1.5e-9");
        assert_eq!(fmt_sig(0.0), "0");
    }
}
