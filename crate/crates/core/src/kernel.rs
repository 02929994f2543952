//! Complex primitives: `n^-s`, Euler factors `(1 - p^-s)^-1`, and the set of
//! points where some factor is undefined.
//!
//! `p^-s` is evaluated as magnitude `p^-Re(s)` times phase `-Im(s) ln p`, so
//! conjugating `s` conjugates the result exactly. Magnitudes beyond the
//! double range are reported as [`ZetaError::Overflow`] instead of becoming
//! infinities.

use std::f64::consts::{PI, TAU};
use std::ops::RangeInclusive;

use num_complex::Complex64;

use crate::error::{Result, ZetaError};

pub type ComplexValue = Complex64;

/// Default threshold on `|1 - p^-s|` below which a factor is singular.
pub const DEFAULT_SINGULAR_TOL: f64 = 1e-9;

/// ln(f64::MAX)
const LN_MAX: f64 = 709.782_712_893_384;

/// `s` lies within `distance` of the point `2 pi k i / ln prime`, where
/// `prime^-s = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExclusionWitness {
    pub prime: u64,
    pub k: i64,
    pub distance: f64,
}

/// A point on the imaginary axis attached to a prime and an integer index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExclusionPoint {
    pub prime: u64,
    pub k: i64,
    pub s: ComplexValue,
}

pub(crate) fn check_finite(s: ComplexValue) -> Result<()> {
    if s.re.is_finite() && s.im.is_finite() {
        Ok(())
    } else {
        Err(ZetaError::InvalidArgument(format!("s = {s} is not finite")))
    }
}

/// `n^-s` for any `n >= 1`.
pub fn power_term(n: u64, s: ComplexValue) -> Result<ComplexValue> {
    if n == 0 {
        return Err(ZetaError::InvalidArgument("0^-s is undefined".into()));
    }
    check_finite(s)?;
    let ln_n = (n as f64).ln();
    if -s.re * ln_n > LN_MAX {
        return Err(ZetaError::Overflow { base: n, s });
    }
    // pow keeps ~1 ulp where exp(-re ln n) would amplify the rounding of the
    // product by |re ln n|
    let mag = (n as f64).powf(-s.re);
    let (sin, cos) = (-s.im * ln_n).sin_cos();
    let z = Complex64::new(mag * cos, mag * sin);
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(ZetaError::Overflow { base: n, s })
    }
}

pub fn prime_power_term(p: u64, s: ComplexValue) -> Result<ComplexValue> {
    if p < 2 {
        return Err(ZetaError::InvalidArgument(format!(
            "prime base must be at least 2, got {p}"
        )));
    }
    power_term(p, s)
}

/// `(1 - p^-s)^-1`, or [`ZetaError::Singular`] when `|1 - p^-s| < tol`.
pub fn euler_factor(p: u64, s: ComplexValue, tol: f64) -> Result<ComplexValue> {
    let z = prime_power_term(p, s)?;
    euler_factor_from_term(p, s, z, tol)
}

/// Same as [`euler_factor`] when `p^-s` is already known.
pub(crate) fn euler_factor_from_term(
    p: u64,
    s: ComplexValue,
    term: ComplexValue,
    tol: f64,
) -> Result<ComplexValue> {
    if !(tol > 0.0) {
        return Err(ZetaError::InvalidArgument(format!(
            "singularity tolerance must be positive, got {tol}"
        )));
    }
    let denom = Complex64::new(1.0, 0.0) - term;
    let gap = denom.norm();
    if gap < tol {
        return Err(ZetaError::Singular {
            prime: p,
            s,
            gap,
            tol,
        });
    }
    let f = denom.inv();
    if f.re.is_finite() && f.im.is_finite() {
        Ok(f)
    } else {
        Err(ZetaError::Overflow { base: p, s })
    }
}

/// Nearest point with `p^-s = 1` for some `p` in `primes`, if one lies within
/// Euclidean distance `tol` of `s`.
///
/// The singular points of `(1 - p^-s)^-1` are `s = 2 pi k i / ln p` for every
/// integer `k`, including `s = 0`.
pub fn in_exclusion_set(s: ComplexValue, primes: &[u64], tol: f64) -> Option<ExclusionWitness> {
    if s.re.abs() > tol {
        return None;
    }
    let mut best: Option<ExclusionWitness> = None;
    for &p in primes {
        let ln_p = (p as f64).ln();
        let k = (s.im * ln_p / TAU).round();
        let distance = s.re.hypot(s.im - k * TAU / ln_p);
        if distance <= tol && best.is_none_or(|w| distance < w.distance) {
            best = Some(ExclusionWitness {
                prime: p,
                k: k as i64,
                distance,
            });
        }
    }
    best
}

/// Points `2 pi k i / ln p` where `p^-s = 1` and the Euler factor for `p`
/// blows up, ordered by prime then `k`.
pub fn singular_points(primes: &[u64], ks: RangeInclusive<i64>) -> Vec<ExclusionPoint> {
    imaginary_points(primes, ks, |k| TAU * k as f64)
}

/// Points `(1 + 2k) pi i / ln p`, ordered by prime then `k`.
///
/// At these points `p^-s = -1`, so `1 - p^-s = 2` and the factor is regular.
/// They are kept as a fixture contrasting with [`singular_points`].
pub fn explicit_exclusion_points(primes: &[u64], ks: RangeInclusive<i64>) -> Vec<ExclusionPoint> {
    imaginary_points(primes, ks, |k| (1 + 2 * k) as f64 * PI)
}

fn imaginary_points(
    primes: &[u64],
    ks: RangeInclusive<i64>,
    numerator: impl Fn(i64) -> f64,
) -> Vec<ExclusionPoint> {
    primes
        .iter()
        .flat_map(|&p| {
            let ln_p = (p as f64).ln();
            ks.clone().map(move |k| (p, k, ln_p))
        })
        .map(|(p, k, ln_p)| ExclusionPoint {
            prime: p,
            k,
            s: Complex64::new(0.0, numerator(k) / ln_p),
        })
        .collect()
}
