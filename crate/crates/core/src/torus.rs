//! Planar and torus primitives.
//!
//! All coamoeba geometry (barycentres, rays, distances) is done in the
//! fundamental domain `[0, 2π]²` treated as a flat plane. Only the final
//! normalization of angles wraps around the torus.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// An angle on `S¹`, stored as its representative in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Angle(f64);

impl Angle {
    pub const ZERO: Angle = Angle(0.0);
    pub const PI: Angle = Angle(PI);

    /// Normalizes `theta`; panics on non-finite input. Use [`normalize_angle`]
    /// for a fallible version.
    pub fn new(theta: f64) -> Angle {
        normalize_angle(theta).expect("angle must be finite")
    }

    #[inline]
    pub fn radians(self) -> f64 {
        self.0
    }
}

impl From<Angle> for f64 {
    fn from(a: Angle) -> f64 {
        a.0
    }
}

/// Reduces `theta` modulo `2π` into `[0, 2π)`.
pub fn normalize_angle(theta: f64) -> Result<Angle> {
    if !theta.is_finite() {
        return Err(domain(format!("non-finite angle {theta}")));
    }
    Ok(Angle(wrap_tau(theta)))
}

#[inline]
pub(crate) fn wrap_tau(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    // rem_euclid rounds tiny negative inputs up to exactly TAU
    if r >= TAU {
        0.0
    } else {
        r + 0.0
    }
}

/// Signed difference `a - b` reduced to `(-π, π]`.
#[inline]
pub fn wrapped_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

/// Geodesic distance between two angles on the circle.
#[inline]
pub fn circular_distance(a: f64, b: f64) -> f64 {
    wrapped_diff(a, b).abs()
}

/// A point of the fundamental domain `[0, 2π]²`, `u` along φ and `v` along ψ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanePoint {
    pub u: f64,
    pub v: f64,
}

impl PlanePoint {
    pub const fn new(u: f64, v: f64) -> Self {
        PlanePoint { u, v }
    }

    pub fn in_fundamental_domain(&self) -> bool {
        (0.0..=TAU).contains(&self.u) && (0.0..=TAU).contains(&self.v)
    }

    /// `self + s (other - self)`.
    #[inline]
    pub fn lerp(self, other: PlanePoint, s: f64) -> PlanePoint {
        PlanePoint::new(
            self.u + s * (other.u - self.u),
            self.v + s * (other.v - self.v),
        )
    }
}

/// Euclidean distance in the fundamental domain. No wrap-around.
pub fn flat_distance(p: PlanePoint, q: PlanePoint) -> f64 {
    (p.u - q.u).hypot(p.v - q.v)
}

/// Point where the ray from `center` through `through` meets the horizontal
/// line `v = level`. The returned point has `v == level` exactly.
pub fn ray_hit_horizontal(center: PlanePoint, through: PlanePoint, level: f64) -> Result<PlanePoint> {
    let du = through.u - center.u;
    let dv = through.v - center.v;
    if du == 0.0 && dv == 0.0 {
        return Err(Error::Degenerate("ray through its own center".into()));
    }
    if dv == 0.0 {
        return Err(Error::Degenerate(format!(
            "ray from ({}, {}) is parallel to v = {level}",
            center.u, center.v
        )));
    }
    let s = (level - center.v) / dv;
    if s < 0.0 {
        return Err(Error::Degenerate(format!(
            "line v = {level} lies behind the ray origin"
        )));
    }
    Ok(PlanePoint::new(center.u + s * du, level))
}

/// Plain bisection for a root of `f` on `[s_lo, s_hi]`.
///
/// Returns an endpoint directly if `f` vanishes there; otherwise halves the
/// bracket until it is no wider than `tol` and returns its midpoint.
pub fn bisect_root<F>(f: F, s_lo: f64, s_hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(tol > 0.0) || !s_lo.is_finite() || !s_hi.is_finite() {
        return Err(domain("bisection needs finite bounds and tol > 0"));
    }
    let (mut lo, mut hi) = if s_lo <= s_hi { (s_lo, s_hi) } else { (s_hi, s_lo) };
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if !(f_lo * f_hi < 0.0) {
        return Err(Error::Bracket { lo, hi, f_lo, f_hi });
    }
    // 2^-1100 underflows any double interval, so this never truncates early
    for _ in 0..1100 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    const O: PlanePoint = PlanePoint::new(2.0 * PI / 3.0, 4.0 * PI / 3.0);
    const O_PRIME: PlanePoint = PlanePoint::new(4.0 * PI / 3.0, 2.0 * PI / 3.0);

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize_angle(0.0).unwrap().radians(), 0.0);
        // -ψ + 2π with ψ = 0
        assert_eq!(normalize_angle(-0.0 + TAU).unwrap().radians(), 0.0);
        assert_abs_diff_eq!(normalize_angle(7.0 * PI / 3.0).unwrap().radians(), PI / 3.0, epsilon = 1e-15);
        assert_eq!(normalize_angle(-1e-18).unwrap().radians(), 0.0);
        assert!(normalize_angle(f64::NAN).is_err());
        assert!(normalize_angle(f64::INFINITY).is_err());
    }

    #[test]
    fn flat_distance_examples() {
        let d = flat_distance(O, PlanePoint::new(2.0 * PI / 3.0, PI));
        assert_abs_diff_eq!(d, PI / 3.0, epsilon = 1e-15);
        assert_eq!(flat_distance(O, O), 0.0);
        assert_abs_diff_eq!(
            flat_distance(PlanePoint::new(0.0, PI), PlanePoint::new(PI, PI)),
            PI,
            epsilon = 1e-15
        );
    }

    #[test]
    fn ray_hit_examples() {
        let q = ray_hit_horizontal(O, PlanePoint::new(2.0 * PI / 3.0, 7.0 * PI / 6.0), PI).unwrap();
        assert_abs_diff_eq!(q.u, 2.0 * PI / 3.0, epsilon = 1e-15);
        assert_eq!(q.v, PI);

        let q = ray_hit_horizontal(O, PlanePoint::new(0.0, PI), PI).unwrap();
        assert_abs_diff_eq!(q.u, 0.0, epsilon = 1e-15);
        assert_eq!(q.v, PI);

        let q = ray_hit_horizontal(O_PRIME, PlanePoint::new(4.0 * PI / 3.0, 5.0 * PI / 6.0), PI).unwrap();
        assert_abs_diff_eq!(q.u, 4.0 * PI / 3.0, epsilon = 1e-15);
        assert_eq!(q.v, PI);
    }

    #[test]
    fn ray_hit_degenerate() {
        assert!(matches!(ray_hit_horizontal(O, O, PI), Err(Error::Degenerate(_))));
        let flat = PlanePoint::new(1.0, O.v);
        assert!(matches!(ray_hit_horizontal(O, flat, PI), Err(Error::Degenerate(_))));
    }

    #[test]
    fn bisect_examples() {
        let r = bisect_root(|s| s - 0.5, 0.0, 1.0, 1e-12).unwrap();
        assert_abs_diff_eq!(r, 0.5, epsilon = 1e-12);
        let r = bisect_root(|s| s * s - 2.0, 1.0, 2.0, 1e-12).unwrap();
        assert_abs_diff_eq!(r, 2f64.sqrt(), epsilon = 1e-12);
        assert!(matches!(bisect_root(|_| 1.0, 0.0, 1.0, 1e-12), Err(Error::Bracket { .. })));
        assert_eq!(bisect_root(|s| s, 0.0, 1.0, 1e-12).unwrap(), 0.0);
        assert_eq!(bisect_root(|s| s - 1.0, 0.0, 1.0, 1e-12).unwrap(), 1.0);
    }

    #[test]
    fn bisect_error_shrinks_with_tol() {
        let f = |s: f64| s.powi(3) - 0.3;
        let root = 0.3f64.cbrt();
        for tol in [1e-3, 1e-6, 1e-9, 1e-12] {
            let r = bisect_root(f, 0.0, 1.0, tol).unwrap();
            assert!((r - root).abs() <= tol, "tol {tol}: {r} vs {root}");
        }
    }

    fn plane() -> impl Strategy<Value = PlanePoint> {
        (0.0..TAU, 0.0..TAU).prop_map(|(u, v)| PlanePoint::new(u, v))
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(theta in -1e4f64..1e4) {
            let a = normalize_angle(theta).unwrap();
            let b = normalize_angle(a.radians()).unwrap();
            prop_assert_eq!(a, b);
            prop_assert!((0.0..TAU).contains(&a.radians()));
        }

        #[test]
        fn flat_distance_is_a_metric(p in plane(), q in plane(), r in plane()) {
            prop_assert_eq!(flat_distance(p, q), flat_distance(q, p));
            prop_assert!(flat_distance(p, r) <= flat_distance(p, q) + flat_distance(q, r) + 1e-12);
        }

        #[test]
        fn ray_hit_is_collinear(c in plane(), p in plane(), level in 0.0..TAU) {
            prop_assume!((p.v - c.v).abs() > 1e-3);
            prop_assume!((level - c.v) / (p.v - c.v) >= 0.0);
            let q = ray_hit_horizontal(c, p, level).unwrap();
            prop_assert_eq!(q.v, level);
            let cross = (p.u - c.u) * (q.v - c.v) - (p.v - c.v) * (q.u - c.u);
            let scale = flat_distance(c, p) * flat_distance(c, q).max(1.0);
            prop_assert!(cross.abs() <= 1e-12 * scale.max(1.0));
        }
    }
}
