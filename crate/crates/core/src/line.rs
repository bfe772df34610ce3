//! The complex line `1 + z₁ + z₂ = 0` in log/angle coordinates
//! `(x, y, φ, ψ) = (ln|z₁|, ln|z₂|, arg z₁, arg z₂)`.
//!
//! Covers membership, the amoeba and coamoeba, the two parametrizations used
//! for sampling, the subdivision into three pieces, the order-three
//! automorphism and the curves `y = 2x + c` that drive the deformation.

use std::f64::consts::{LN_2, PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::tags::{Major, Side, Sub, TagSet};
use crate::torus::{circular_distance, wrap_tau, Angle, PlanePoint};
use crate::triangle::Triangle;

/// A point is taken to be on the line when `line_residual < ON_LINE_TOL`.
pub const ON_LINE_TOL: f64 = 1e-9;
/// Slack on the inequalities that separate the three pieces.
pub const MAJOR_TIE_TOL: f64 = 1e-10;
/// Slack on `y = 2x + ln 2` when splitting leg from triangle.
pub const GAMMA_TIE_TOL: f64 = 1e-10;
/// Matching tolerance for the three isolated coamoeba points.
const ISOLATED_TOL: f64 = 1e-12;
/// Slack (in barycentric coordinates) for closed coamoeba regions.
const REGION_TOL: f64 = 1e-9;

/// Barycentre of the closed lower triangle: `O = (2π/3, 4π/3)`.
pub const CENTER_LOWER: PlanePoint = PlanePoint::new(2.0 * PI / 3.0, 4.0 * PI / 3.0);
/// Barycentre of the closed upper triangle: `O′ = (4π/3, 2π/3)`.
pub const CENTER_UPPER: PlanePoint = PlanePoint::new(4.0 * PI / 3.0, 2.0 * PI / 3.0);

/// Closed coamoeba triangles `T̄₁` and `T̄₂`.
pub const T1_CLOSED: Triangle = Triangle::new(
    PlanePoint::new(0.0, PI),
    PlanePoint::new(PI, PI),
    PlanePoint::new(PI, TAU),
);
pub const T2_CLOSED: Triangle = Triangle::new(
    PlanePoint::new(PI, 0.0),
    PlanePoint::new(PI, PI),
    PlanePoint::new(TAU, PI),
);

/// The coamoeba of the first piece is `A₁ ∪ A₂`.
pub const A1: Triangle = Triangle::new(PlanePoint::new(0.0, PI), CENTER_LOWER, PlanePoint::new(PI, PI));
pub const A2: Triangle = Triangle::new(PlanePoint::new(PI, PI), CENTER_UPPER, PlanePoint::new(TAU, PI));
pub const B1: Triangle = Triangle::new(CENTER_LOWER, PlanePoint::new(PI, PI), PlanePoint::new(PI, TAU));
pub const B2: Triangle = Triangle::new(PlanePoint::new(PI, 0.0), PlanePoint::new(PI, PI), CENTER_UPPER);
pub const C1: Triangle = Triangle::new(PlanePoint::new(0.0, PI), CENTER_LOWER, PlanePoint::new(PI, TAU));
pub const C2: Triangle = Triangle::new(PlanePoint::new(PI, 0.0), CENTER_UPPER, PlanePoint::new(TAU, PI));

/// Closed coamoeba regions of a major piece.
pub fn coamoeba_regions(major: Major) -> [Triangle; 2] {
    match major {
        Major::H1 => [A1, A2],
        Major::H2 => [B1, B2],
        Major::H3 => [C1, C2],
    }
}

/// A point of `ℝ² × (S¹)²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmbientPoint {
    pub x: f64,
    pub y: f64,
    pub phi: Angle,
    pub psi: Angle,
}

impl AmbientPoint {
    /// Angles are reduced to `[0, 2π)`. Panics on non-finite angles.
    pub fn new(x: f64, y: f64, phi: f64, psi: f64) -> Self {
        AmbientPoint { x, y, phi: Angle::new(phi), psi: Angle::new(psi) }
    }

    pub fn try_new(x: f64, y: f64, phi: f64, psi: f64) -> Result<Self> {
        if !x.is_finite() || !y.is_finite() {
            return Err(domain(format!("non-finite log-coordinates ({x}, {y})")));
        }
        Ok(AmbientPoint {
            x,
            y,
            phi: crate::torus::normalize_angle(phi)?,
            psi: crate::torus::normalize_angle(psi)?,
        })
    }

    #[inline]
    pub fn args(&self) -> PlanePoint {
        PlanePoint::new(self.phi.radians(), self.psi.radians())
    }

    /// `(z₁, z₂)` in `(ℂ*)²`.
    pub fn to_complex(&self) -> (Complex64, Complex64) {
        (
            Complex64::from_polar(self.x.exp(), self.phi.radians()),
            Complex64::from_polar(self.y.exp(), self.psi.radians()),
        )
    }

    /// Distance on `ℝ² × (S¹)²`: Euclidean in `(x, y)`, geodesic on each
    /// circle, combined in quadrature.
    pub fn distance(&self, other: &AmbientPoint) -> f64 {
        let dphi = circular_distance(self.phi.radians(), other.phi.radians());
        let dpsi = circular_distance(self.psi.radians(), other.psi.radians());
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2) + dphi * dphi + dpsi * dpsi).sqrt()
    }
}

/// Which boundary curve of the amoeba a point lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryCurve {
    /// `eˣ − eʸ = 1`, arguments forced to `(π, 0)`.
    XminusY,
    /// `eʸ − eˣ = 1`, arguments forced to `(0, π)`.
    YminusX,
    /// `eˣ + eʸ = 1`, arguments forced to `(π, π)`.
    XplusY,
    None,
}

impl BoundaryCurve {
    pub fn forced_args(self) -> Option<PlanePoint> {
        match self {
            BoundaryCurve::XminusY => Some(PlanePoint::new(PI, 0.0)),
            BoundaryCurve::YminusX => Some(PlanePoint::new(0.0, PI)),
            BoundaryCurve::XplusY => Some(PlanePoint::new(PI, PI)),
            BoundaryCurve::None => None,
        }
    }
}

/// `|e^{x+iφ} + e^{y+iψ} + 1|`.
pub fn line_residual(p: &AmbientPoint) -> f64 {
    let (z1, z2) = p.to_complex();
    (z1 + z2 + 1.0).norm()
}

pub fn on_line(p: &AmbientPoint) -> bool {
    line_residual(p) < ON_LINE_TOL
}

/// Residuals of the two modulus identities
/// `e^{2x} = 1 + 2eʸcosψ + e^{2y}` and `e^{2y} = 1 + 2eˣcosφ + e^{2x}`.
pub fn eq1_residuals(p: &AmbientPoint) -> (f64, f64) {
    let (ex, ey) = (p.x.exp(), p.y.exp());
    let r1 = ex * ex - 1.0 - 2.0 * ey * p.psi.radians().cos() - ey * ey;
    let r2 = ey * ey - 1.0 - 2.0 * ex * p.phi.radians().cos() - ex * ex;
    (r1.abs(), r2.abs())
}

/// Closed amoeba membership.
pub fn amoeba_contains(x: f64, y: f64) -> bool {
    let (ex, ey) = (x.exp(), y.exp());
    ex - ey <= 1.0 && ey - ex <= 1.0 && ex + ey >= 1.0
}

/// Which boundary equation holds, to `tol` relative to `1 + eˣ + eʸ`.
pub fn amoeba_boundary_class(x: f64, y: f64, tol: f64) -> BoundaryCurve {
    let (ex, ey) = (x.exp(), y.exp());
    let scale = 1.0 + ex + ey;
    [
        (BoundaryCurve::XminusY, ex - ey - 1.0),
        (BoundaryCurve::YminusX, ey - ex - 1.0),
        (BoundaryCurve::XplusY, ex + ey - 1.0),
    ]
    .into_iter()
    .map(|(k, r)| (k, r.abs() / scale))
    .filter(|(_, r)| *r <= tol)
    .min_by(|a, b| a.1.total_cmp(&b.1))
    .map_or(BoundaryCurve::None, |(k, _)| k)
}

/// Open triangle `T₁ = {0 < φ < π, π < ψ < φ + π}`.
pub fn in_t1(phi: f64, psi: f64) -> bool {
    0.0 < phi && phi < PI && PI < psi && psi < phi + PI
}

/// Open triangle `T₂ = {π < φ < 2π, φ − π < ψ < π}`.
pub fn in_t2(phi: f64, psi: f64) -> bool {
    PI < phi && phi < TAU && phi - PI < psi && psi < PI
}

/// Coamoeba membership: `T₁ ∪ T₂ ∪ {(0, π), (π, 0), (π, π)}`.
pub fn coamoeba_contains(phi: Angle, psi: Angle) -> bool {
    let (f, s) = (phi.radians(), psi.radians());
    if in_t1(f, s) || in_t2(f, s) {
        return true;
    }
    [(0.0, PI), (PI, 0.0), (PI, PI)]
        .iter()
        .any(|&(a, b)| circular_distance(f, a) <= ISOLATED_TOL && circular_distance(s, b) <= ISOLATED_TOL)
}

/// Inverse of the argument map on the interior part of the line:
/// `(ln(−sinψ / sin(ψ−φ)), ln(sinφ / sin(ψ−φ)), φ, ψ)`.
pub fn coamoeba_lift(phi: Angle, psi: Angle) -> Result<AmbientPoint> {
    let (f, s) = (phi.radians(), psi.radians());
    if !(in_t1(f, s) || in_t2(f, s)) {
        return Err(domain(format!("({f}, {s}) is outside the open coamoeba triangles")));
    }
    let d = (s - f).sin();
    let ex = -s.sin() / d;
    let ey = f.sin() / d;
    if !(ex > 0.0 && ey > 0.0) {
        return Err(domain(format!("({f}, {s}) too close to the coamoeba boundary")));
    }
    Ok(AmbientPoint { x: ex.ln(), y: ey.ln(), phi, psi })
}

/// Global chart `z ↦ (z, −1 − z)` of the line.
pub fn chart_from_complex(re: f64, im: f64) -> Result<AmbientPoint> {
    let z1 = Complex64::new(re, im);
    let z2 = -1.0 - z1;
    let (r1, r2) = (z1.norm(), z2.norm());
    if !(r1 > 0.0 && r2 > 0.0) || !r1.is_finite() {
        return Err(domain(format!("z = {re} + {im}i is excluded from the chart")));
    }
    Ok(AmbientPoint {
        x: r1.ln(),
        y: r2.ln(),
        phi: Angle::new(z1.arg()),
        psi: Angle::new(z2.arg()),
    })
}

/// Inverse of the amoeba projection restricted to `0 ≤ φ ≤ π` (`upper =
/// false`) or `π ≤ φ ≤ 2π` (`upper = true`).
///
/// `φ` is solved from the modulus identity and the point is then rebuilt
/// through the complex chart, so it lies on the line to roundoff; the
/// returned `y` may differ from the requested one by roundoff.
pub fn lift_amoeba(x: f64, y: f64, upper: bool) -> Result<AmbientPoint> {
    if !amoeba_contains(x, y) {
        return Err(domain(format!("({x}, {y}) is outside the amoeba")));
    }
    let (ex, ey) = (x.exp(), y.exp());
    let cos_phi = ((ey * ey - 1.0 - ex * ex) / (2.0 * ex)).clamp(-1.0, 1.0);
    let mut phi = cos_phi.acos();
    if upper {
        phi = TAU - phi;
    }
    chart_from_complex(ex * phi.cos(), ex * phi.sin())
}

/// Majors whose closed inequalities hold at `(x, y)` up to `MAJOR_TIE_TOL`.
pub fn major_tags(x: f64, y: f64) -> TagSet<Major> {
    let t = MAJOR_TIE_TOL;
    let mut s = TagSet::empty();
    if x <= y + t && x <= t {
        s.insert(Major::H1);
    }
    if y <= x + t && y <= t {
        s.insert(Major::H2);
    }
    if x >= -t && y >= -t {
        s.insert(Major::H3);
    }
    s
}

fn require_on_line(p: &AmbientPoint) -> Result<()> {
    let r = line_residual(p);
    if r < ON_LINE_TOL {
        Ok(())
    } else {
        Err(domain(format!("point is off the line (residual {r:e})")))
    }
}

/// Pieces of the subdivision containing `p`.
pub fn classify_major(p: &AmbientPoint) -> Result<TagSet<Major>> {
    require_on_line(p)?;
    Ok(major_tags(p.x, p.y))
}

/// `{Leg}` above `y = 2x + ln 2`, `{Triangle}` below, both on the curve.
pub fn sub_tags(x: f64, y: f64) -> TagSet<Sub> {
    let d = y - 2.0 * x - LN_2;
    if d > GAMMA_TIE_TOL {
        TagSet::single(Sub::Leg)
    } else if d < -GAMMA_TIE_TOL {
        TagSet::single(Sub::Triangle)
    } else {
        TagSet::single(Sub::Triangle).with(Sub::Leg)
    }
}

/// Leg/triangle split of a point of the first piece.
pub fn classify_sub(p: &AmbientPoint) -> Result<TagSet<Sub>> {
    if !classify_major(p)?.contains(Major::H1) {
        return Err(domain(format!("({}, {}) is not in the first piece", p.x, p.y)));
    }
    Ok(sub_tags(p.x, p.y))
}

/// Closed coamoeba of the first piece, `A₁ ∪ A₂`, on the torus.
pub fn in_closed_arg_h1(phi: f64, psi: f64, tol: f64) -> bool {
    let p = PlanePoint::new(phi, psi);
    A1.contains_on_torus(p, tol) || A2.contains_on_torus(p, tol)
}

/// Side of the first piece's coamoeba: `{Lower}` for `φ < π`, `{Upper}` for
/// `φ > π`, both at `φ = π`.
pub fn classify_side(phi: Angle, psi: Angle) -> Result<TagSet<Side>> {
    let (f, s) = (phi.radians(), psi.radians());
    if !in_closed_arg_h1(f, s, REGION_TOL) {
        return Err(domain(format!("({f}, {s}) is outside the closed coamoeba of the first piece")));
    }
    Ok(side_tags(f))
}

pub(crate) fn side_tags(phi: f64) -> TagSet<Side> {
    const EPS: f64 = 1e-12;
    if phi < PI - EPS {
        TagSet::single(Side::Lower)
    } else if phi > PI + EPS {
        TagSet::single(Side::Upper)
    } else {
        TagSet::single(Side::Lower).with(Side::Upper)
    }
}

/// The order-three automorphism `(x, y, φ, ψ) ↦ (−y, x − y, 2π − ψ, φ − ψ + 2π)`,
/// induced by `(z, w) ↦ (1/w, z/w)`.
pub fn lambda_map(p: &AmbientPoint) -> AmbientPoint {
    let (f, s) = (p.phi.radians(), p.psi.radians());
    AmbientPoint {
        x: -p.y,
        y: p.x - p.y,
        phi: Angle::new(TAU - s),
        psi: Angle::new(f - s + TAU),
    }
}

/// Inverse automorphism `(x, y, φ, ψ) ↦ (y − x, −x, ψ − φ, 2π − φ)`.
pub fn lambda_inv(p: &AmbientPoint) -> AmbientPoint {
    let (f, s) = (p.phi.radians(), p.psi.radians());
    AmbientPoint {
        x: p.y - p.x,
        y: -p.x,
        phi: Angle::new(s - f + TAU),
        psi: Angle::new(TAU - f),
    }
}

/// `sin²ψ − k sinφ sin(ψ − φ)`: zero on the coamoeba of `y = 2x + c` with
/// `k = e^{−c}`, positive between that arc and `O`, negative towards `ψ = π`.
pub fn wc_residual(phi: f64, psi: f64, k: f64) -> f64 {
    let s = psi.sin();
    s * s - k * phi.sin() * (psi - phi).sin()
}

/// [`wc_residual`] for the seam curve `y = 2x + ln 2` (`k = ½`).
pub fn gamma1_residual(phi: Angle, psi: Angle) -> f64 {
    wc_residual(phi.radians(), psi.radians(), 0.5)
}

fn require_c(c: f64) -> Result<()> {
    if c.is_finite() && c >= LN_2 {
        Ok(())
    } else {
        Err(domain(format!("c = {c} must be at least ln 2")))
    }
}

/// Abscissae where `y = 2x + c` meets the amoeba boundary: `x_plus` on
/// `eʸ − eˣ = 1` and `x_minus` on `eʸ + eˣ = 1`.
pub fn wc_boundary_x(c: f64) -> Result<(f64, f64)> {
    require_c(c)?;
    let ec = c.exp();
    let root = (1.0 + 4.0 * ec).sqrt();
    let x_plus = ((1.0 + root) / (2.0 * ec)).ln();
    // (√D − 1)/(2eᶜ) rewritten as 2/(√D + 1) to avoid cancellation
    let x_minus = (2.0 / (1.0 + root)).ln();
    Ok((x_plus, x_minus))
}

fn require_wc_range(x: f64, c: f64) -> Result<()> {
    require_c(c)?;
    let (x_plus, x_minus) = wc_boundary_x(c)?;
    let slack = 1e-12 * (1.0 + x.abs());
    if x < x_minus - slack || x > x_plus + slack {
        return Err(domain(format!("x = {x} outside [{x_minus}, {x_plus}] for c = {c}")));
    }
    Ok(())
}

/// Slope `dψ/dφ` of the coamoeba arc of `y = 2x + c`, written in `x`:
/// `(2e^{4x} − 2k²) / (3e^{4x} − k²e^{2x} + k²)`, `k = e^{−c}`.
pub fn argwc_slope(x: f64, c: f64) -> Result<f64> {
    require_wc_range(x, c)?;
    let k2 = (-2.0 * c).exp();
    let (e2, e4) = ((2.0 * x).exp(), (4.0 * x).exp());
    let den = 3.0 * e4 - k2 * e2 + k2;
    if den == 0.0 || !den.is_finite() {
        return Err(Error::Singular(format!("slope denominator vanishes at x = {x}, c = {c}")));
    }
    Ok((2.0 * e4 - 2.0 * k2) / den)
}

/// `d/dx` of [`argwc_slope`]: `4k²e^{2x}(−e^{4x} + 8e^{2x} − k²) / den²`.
pub fn argwc_slope_derivative(x: f64, c: f64) -> Result<f64> {
    require_wc_range(x, c)?;
    let k2 = (-2.0 * c).exp();
    let (e2, e4) = ((2.0 * x).exp(), (4.0 * x).exp());
    let den = 3.0 * e4 - k2 * e2 + k2;
    if den == 0.0 || !den.is_finite() {
        return Err(Error::Singular(format!("slope denominator vanishes at x = {x}, c = {c}")));
    }
    Ok(4.0 * k2 * e2 * (-e4 + 8.0 * e2 - k2) / (den * den))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of(v: f64) -> Sign {
        if v > 0.0 {
            Sign::Positive
        } else if v < 0.0 {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }
}

/// Sign of [`argwc_slope_derivative`], read off its numerator
/// `−e^{4x} + 8e^{2x} − k²`, which is positive exactly when
/// `4 − √(16 − k²) < e^{2x} < 4 + √(16 − k²)`.
pub fn argwc_slope_derivative_sign(x: f64, c: f64) -> Sign {
    let k2 = (-2.0 * c).exp();
    let e2 = (2.0 * x).exp();
    Sign::of(-e2 * e2 + 8.0 * e2 - k2)
}

/// Normalized copy of the plane point's coordinates as angles.
pub(crate) fn plane_to_angles(p: PlanePoint) -> (Angle, Angle) {
    (Angle::new(wrap_tau(p.u)), Angle::new(wrap_tau(p.v)))
}
