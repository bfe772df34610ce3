//! The deformation `Ψₜ` of the line onto the phase tropical line.
//!
//! Everything is built on the first piece `H₁`:
//!
//! * the coamoeba is flowed radially away from `O` (lower side) or `O′`
//!   (upper side), each ray being stretched so that the seam curve
//!   `y = 2x + ln 2` (triangle part) or the point itself (leg part) lands on
//!   `ψ = π` at `t = 1`;
//! * the log-coordinates are contracted to the origin (triangle) or sheared
//!   onto the ray `y = 0` (leg).
//!
//! The other two pieces are pulled back to `H₁` by the order-three
//! automorphism, deformed there and pushed forward again. Points on a seam are
//! evaluated through every applicable branch and the spread is reported.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::line::{
    self, lambda_inv, lambda_map, major_tags, plane_to_angles, side_tags, sub_tags, AmbientPoint, CENTER_LOWER, CENTER_UPPER,
};
use crate::tags::{Major, RegionTag, Side, Sub};
use crate::torus::{bisect_root, flat_distance, ray_hit_horizontal, Angle, PlanePoint};

/// Default bisection tolerance (in ray parameter) for locating the seam arc.
pub const DEFAULT_ROOT_TOL: f64 = 1e-10;
/// Default bound on the disagreement between branches at a seam.
pub const DEFAULT_SEAM_TOL: f64 = 1e-8;
/// Points this close to `O`/`O′` are treated as the centre itself; the ray
/// direction is meaningless below roundoff of `λ` on the centre.
pub const CENTER_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsotopyParams {
    pub t: f64,
    pub root_tol: f64,
    pub seam_tol: f64,
}

impl Default for IsotopyParams {
    fn default() -> Self {
        IsotopyParams { t: 0.0, root_tol: DEFAULT_ROOT_TOL, seam_tol: DEFAULT_SEAM_TOL }
    }
}

impl IsotopyParams {
    pub fn at(t: f64) -> Self {
        IsotopyParams { t, ..Default::default() }
    }

    pub fn with_t(self, t: f64) -> Self {
        IsotopyParams { t, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.t) {
            return Err(domain(format!("t = {} outside [0, 1]", self.t)));
        }
        if !(self.root_tol > 0.0 && self.seam_tol > 0.0) {
            return Err(domain("tolerances must be positive"));
        }
        Ok(())
    }
}

pub fn center_of(side: Side) -> PlanePoint {
    match side {
        Side::Lower => CENTER_LOWER,
        Side::Upper => CENTER_UPPER,
    }
}

/// Per-point data of the radial coamoeba flow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialFrame {
    pub center: PlanePoint,
    /// Where the ray from the centre through the point meets `ψ = π`.
    pub qprime: PlanePoint,
    /// `d(center, qprime)`.
    pub b: f64,
    /// Triangle: distance to the seam arc along the ray. Leg: distance to
    /// the point itself.
    pub a: f64,
}

impl RadialFrame {
    pub fn scale(&self) -> f64 {
        self.b / self.a
    }
}

/// Radial frame of `(φ, ψ)` for the given side of the first piece.
pub fn radial_frame_on(side: Side, phi: Angle, psi: Angle, sub: Sub, root_tol: f64) -> Result<RadialFrame> {
    frame(side, PlanePoint::new(phi.radians(), psi.radians()), sub, root_tol, false)
}

// The seam arc is tangent to the two edge rays at its corners, so `a` has a
// square root singularity in the ray direction there. Points on a piece
// boundary have their ray on an edge exactly and take `a = b`.
fn frame(side: Side, p: PlanePoint, sub: Sub, root_tol: f64, on_edge: bool) -> Result<RadialFrame> {
    let center = center_of(side);
    if flat_distance(p, center) < CENTER_TOL {
        return Err(Error::Degenerate("radial frame requested at the flow centre".into()));
    }
    let qprime = ray_hit_horizontal(center, p, PI)?;
    let b = flat_distance(center, qprime);
    let a = match sub {
        Sub::Leg => flat_distance(center, p),
        Sub::Triangle if on_edge => b,
        Sub::Triangle => {
            let g = arc_residual_from(qprime, center);
            if g(0.0) >= 0.0 {
                b
            } else {
                let r = bisect_root(g, 0.0, 1.0, root_tol).map_err(|e| {
                    Error::Internal(format!("seam arc not bracketed on ray through ({}, {}): {e}", p.u, p.v))
                })?;
                (1.0 - r) * b
            }
        }
    };
    Ok(RadialFrame { center, qprime, b, a })
}

/// Seam arc residual at `qprime + r (center − qprime)`, in coordinates taken
/// from the nearest corner `(kπ, π)` so the cancellation near the corners
/// loses no absolute precision.
fn arc_residual_from(qprime: PlanePoint, center: PlanePoint) -> impl Fn(f64) -> f64 {
    let corner = (qprime.u / PI).round() * PI;
    let (a0, du) = (qprime.u - corner, center.u - qprime.u);
    let dv = center.v - PI;
    move |r: f64| {
        let alpha = a0 + r * du;
        let beta = r * dv;
        let sb = beta.sin();
        sb * sb + 0.5 * alpha.sin() * (beta - alpha).sin()
    }
}

/// Radial frame with the side taken from the point (`O` when `φ ≤ π`).
pub fn radial_frame(phi: Angle, psi: Angle, sub: Sub, root_tol: f64) -> Result<RadialFrame> {
    let side = line::classify_side(phi, psi)?.first().unwrap_or(Side::Lower);
    radial_frame_on(side, phi, psi, sub, root_tol)
}

fn flow_on(side: Side, phi: Angle, psi: Angle, sub: Sub, t: f64, root_tol: f64, on_edge: bool) -> Result<(Angle, Angle)> {
    let center = center_of(side);
    let p = PlanePoint::new(phi.radians(), psi.radians());
    if flat_distance(p, center) < CENTER_TOL {
        return Ok((phi, psi));
    }
    let scale = frame(side, p, sub, root_tol, on_edge)?.scale().powf(t);
    if scale == 1.0 {
        return Ok((phi, psi));
    }
    Ok(plane_to_angles(PlanePoint::new(
        center.u + scale * (p.u - center.u),
        center.v + scale * (p.v - center.v),
    )))
}

/// The radial flow `(φₜ, ψₜ)` on the coamoeba of the first piece.
pub fn coamoeba_flow(phi: Angle, psi: Angle, sub: Sub, t: f64, root_tol: f64) -> Result<(Angle, Angle)> {
    let side = side_tags(phi.radians()).first().unwrap_or(Side::Lower);
    flow_on(side, phi, psi, sub, t, root_tol, false)
}

/// Result of evaluating a piecewise map through every applicable branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    /// Value of the first branch in canonical order.
    pub point: AmbientPoint,
    pub branches: usize,
    /// Largest distance between the returned value and any other branch.
    pub disagreement: f64,
}

fn phi1_branch(p: &AmbientPoint, sub: Sub, side: Side, params: &IsotopyParams) -> Result<AmbientPoint> {
    let t = params.t;
    let on_edge = major_tags(p.x, p.y).len() > 1;
    let (phi_t, psi_t) = flow_on(side, p.phi, p.psi, sub, t, params.root_tol, on_edge)?;
    let (x, y) = match sub {
        Sub::Triangle => (p.x * (1.0 - t), p.y * (1.0 - t)),
        Sub::Leg => (p.x - t * (p.y - LN_2) / 2.0, p.y * (1.0 - t)),
    };
    Ok(AmbientPoint { x, y, phi: phi_t, psi: psi_t })
}

/// One branch value of `Ψₜ` at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branch {
    pub major: Major,
    pub sub: Sub,
    pub side: Side,
    pub point: AmbientPoint,
}

/// All branch values of `Φ₁ᵗ` at a point assumed to be in the first piece.
fn phi1_images(p: &AmbientPoint, params: &IsotopyParams) -> Result<Vec<(Sub, Side, AmbientPoint)>> {
    let subs = sub_tags(p.x, p.y);
    let sides = side_tags(p.phi.radians());
    let mut out = Vec::with_capacity(subs.len() * sides.len());
    for sub in subs.iter() {
        for side in sides.iter() {
            out.push((sub, side, phi1_branch(p, sub, side, params)?));
        }
    }
    Ok(out)
}

fn summarize(images: impl IntoIterator<Item = AmbientPoint>) -> Evaluation {
    let mut it = images.into_iter();
    let point = it.next().expect("at least one branch");
    let mut branches = 1;
    let mut disagreement: f64 = 0.0;
    for q in it {
        branches += 1;
        disagreement = disagreement.max(q.distance(&point));
    }
    Evaluation { point, branches, disagreement }
}

/// Largest distance between any two of the given branch values.
pub fn spread<'a>(points: impl IntoIterator<Item = &'a AmbientPoint>) -> f64 {
    let pts: Vec<_> = points.into_iter().collect();
    let mut worst: f64 = 0.0;
    for (i, p) in pts.iter().enumerate() {
        for q in &pts[i + 1..] {
            worst = worst.max(p.distance(q));
        }
    }
    worst
}

fn check_seam(ev: Evaluation, params: &IsotopyParams, what: &str) -> Result<AmbientPoint> {
    if ev.disagreement > params.seam_tol {
        return Err(Error::Seam { what: what.into(), disagreement: ev.disagreement, tolerance: params.seam_tol });
    }
    Ok(ev.point)
}

fn require_h1(p: &AmbientPoint) -> Result<()> {
    if !line::classify_major(p)?.contains(Major::H1) {
        return Err(domain(format!("({}, {}) is not in the first piece", p.x, p.y)));
    }
    Ok(())
}

/// `Φ₁ᵗ` with branch diagnostics; no seam tolerance is enforced.
pub fn phi1_eval(p: &AmbientPoint, params: &IsotopyParams) -> Result<Evaluation> {
    params.validate()?;
    require_h1(p)?;
    Ok(summarize(phi1_images(p, params)?.into_iter().map(|b| b.2)))
}

/// `Φ₁ᵗ` on the first piece.
pub fn phi1(p: &AmbientPoint, params: &IsotopyParams) -> Result<AmbientPoint> {
    check_seam(phi1_eval(p, params)?, params, "leg/triangle seam")
}

/// Image of `p` under the branch `Φᵢᵗ` belonging to `major`, without gates.
fn major_images(p: &AmbientPoint, major: Major, params: &IsotopyParams) -> Result<Vec<Branch>> {
    let (pulled, push): (AmbientPoint, fn(&AmbientPoint) -> AmbientPoint) = match major {
        Major::H1 => (*p, |q| *q),
        Major::H2 => (lambda_inv(p), lambda_map),
        Major::H3 => (lambda_map(p), lambda_inv),
    };
    Ok(phi1_images(&pulled, params)?
        .into_iter()
        .map(|(sub, side, q)| Branch { major, sub, side, point: push(&q) })
        .collect())
}

/// `Φᵢᵗ` for one major, conjugated through the automorphism for `H₂`, `H₃`.
pub fn phi_major(p: &AmbientPoint, major: Major, params: &IsotopyParams) -> Result<AmbientPoint> {
    params.validate()?;
    if !line::classify_major(p)?.contains(major) {
        return Err(domain(format!("point is not in {major:?}")));
    }
    let images = major_images(p, major, params)?;
    check_seam(summarize(images.into_iter().map(|b| b.point)), params, "leg/triangle seam")
}

/// Every applicable branch of `Ψₜ` at `p` (all majors, and leg/triangle and
/// side within each), in evaluation order.
pub fn psi_t_branches(p: &AmbientPoint, params: &IsotopyParams) -> Result<Vec<Branch>> {
    params.validate()?;
    let majors = line::classify_major(p)?;
    let mut out = Vec::new();
    for major in majors.iter() {
        out.extend(major_images(p, major, params)?);
    }
    Ok(out)
}

/// `Ψₜ` with diagnostics over every applicable branch.
pub fn psi_t_eval(p: &AmbientPoint, params: &IsotopyParams) -> Result<Evaluation> {
    Ok(summarize(psi_t_branches(p, params)?.into_iter().map(|b| b.point)))
}

/// `Ψₜ`; fails if seam branches disagree by more than `params.seam_tol`.
pub fn psi_t(p: &AmbientPoint, params: &IsotopyParams) -> Result<AmbientPoint> {
    check_seam(psi_t_eval(p, params)?, params, "piecewise branches")
}

/// The point of the first piece that `Ψₜ` actually flows for `p`.
pub fn pull_to_h1(p: &AmbientPoint) -> AmbientPoint {
    match major_tags(p.x, p.y).first() {
        Some(Major::H2) => lambda_inv(p),
        Some(Major::H3) => lambda_map(p),
        _ => *p,
    }
}

/// Classification of a point of the line, with `sub`/`side` read on its
/// image in the first piece.
pub fn region_tag(p: &AmbientPoint) -> RegionTag {
    let major = major_tags(p.x, p.y);
    let pulled = pull_to_h1(p);
    RegionTag { major, sub: sub_tags(pulled.x, pulled.y), side: side_tags(pulled.phi.radians()) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::line::{chart_from_complex, coamoeba_lift, line_residual};
    use crate::tropical::{htrop_distance, htrop_subdivision};
    use approx::assert_abs_diff_eq;

    fn worked_point() -> AmbientPoint {
        AmbientPoint::new(-LN_2, (3f64.sqrt() / 2.0).ln(), 2.0 * PI / 3.0, 7.0 * PI / 6.0)
    }

    #[test]
    fn frame_examples() {
        let f = radial_frame(Angle::new(2.0 * PI / 3.0), Angle::new(7.0 * PI / 6.0), Sub::Leg, 1e-10).unwrap();
        assert_eq!(f.center, CENTER_LOWER);
        assert_abs_diff_eq!(f.qprime.u, 2.0 * PI / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.b, PI / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.a, PI / 6.0, epsilon = 1e-15);

        let f = radial_frame(Angle::ZERO, Angle::PI, Sub::Leg, 1e-10).unwrap();
        assert_abs_diff_eq!(f.qprime.u, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.a, f.b, epsilon = 1e-15);
        let f = radial_frame(Angle::ZERO, Angle::PI, Sub::Triangle, 1e-10).unwrap();
        assert_eq!(f.a, f.b);

        for sub in [Sub::Leg, Sub::Triangle] {
            let f = radial_frame(Angle::new(4.0 * PI / 3.0), Angle::new(5.0 * PI / 6.0), sub, 1e-10).unwrap();
            assert_eq!(f.center, CENTER_UPPER);
        }
    }

    #[test]
    fn triangle_frame_lands_on_seam_arc() {
        let f = radial_frame(Angle::new(1.5), Angle::new(3.5), Sub::Triangle, 1e-12).unwrap();
        let q = f.center.lerp(f.qprime, f.a / f.b);
        assert!(line::wc_residual(q.u, q.v, 0.5).abs() < 1e-11);
        assert!(f.a > 0.0 && f.a <= f.b);
    }

    #[test]
    fn frame_at_center_is_degenerate() {
        let r = radial_frame_on(Side::Lower, Angle::new(CENTER_LOWER.u), Angle::new(CENTER_LOWER.v), Sub::Leg, 1e-10);
        assert!(matches!(r, Err(Error::Degenerate(_))));
    }

    #[test]
    fn flow_examples() {
        let (f, s) = coamoeba_flow(Angle::new(2.0 * PI / 3.0), Angle::new(7.0 * PI / 6.0), Sub::Leg, 1.0, 1e-10).unwrap();
        assert_abs_diff_eq!(f.radians(), 2.0 * PI / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.radians(), PI, epsilon = 1e-15);

        let (phi, psi) = (Angle::new(1.3), Angle::new(3.6));
        for sub in [Sub::Leg, Sub::Triangle] {
            assert_eq!(coamoeba_flow(phi, psi, sub, 0.0, 1e-10).unwrap(), (phi, psi));
            let o = (Angle::new(CENTER_LOWER.u), Angle::new(CENTER_LOWER.v));
            assert_eq!(coamoeba_flow(o.0, o.1, sub, 0.6, 1e-10).unwrap(), o);
        }
    }

    #[test]
    fn worked_point_end_to_end() {
        let p = worked_point();
        let img = psi_t(&p, &IsotopyParams::at(1.0)).unwrap();
        assert_abs_diff_eq!(img.x, -0.25 * 3f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(img.y, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(img.phi.radians(), 2.0 * PI / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(img.psi.radians(), PI, epsilon = 1e-12);
    }

    #[test]
    fn origin_fiber_is_fixed() {
        let p = AmbientPoint::new(0.0, 0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0);
        for t in [0.0, 0.3, 0.5, 1.0] {
            let ev = psi_t_eval(&p, &IsotopyParams::at(t)).unwrap();
            assert!(ev.branches >= 3);
            assert!(ev.point.distance(&p) < 1e-14, "t = {t}");
            assert!(ev.disagreement < 1e-14);
        }
    }

    #[test]
    fn identity_at_time_zero() {
        for (f, s) in [(1.0, 3.5), (2.0, 3.5), (4.0, 2.0), (5.5, 2.9), (0.4, 3.4), (2.9, 5.9)] {
            let p = coamoeba_lift(Angle::new(f), Angle::new(s)).unwrap();
            let q = psi_t(&p, &IsotopyParams::at(0.0)).unwrap();
            assert!(q.distance(&p) < 1e-12);
        }
    }

    #[test]
    fn endpoint_lands_on_tropical_line_with_matching_part() {
        for (f, s) in [(1.0, 3.5), (2.0, 3.5), (4.0, 2.0), (5.5, 2.9), (0.4, 3.4), (2.9, 5.9), (0.3, 3.2)] {
            let p = coamoeba_lift(Angle::new(f), Angle::new(s)).unwrap();
            let q = psi_t(&p, &IsotopyParams::at(1.0)).unwrap();
            assert!(htrop_distance(&q).0 < 1e-8, "{p:?} -> {q:?}");
            let major = major_tags(p.x, p.y).first().unwrap();
            assert!(htrop_subdivision(&q).unwrap().contains(major.trop()));
        }
    }

    #[test]
    fn phi1_rejects_other_pieces() {
        let p = lambda_map(&worked_point());
        assert!(phi1(&p, &IsotopyParams::at(0.5)).is_err());
        assert!(phi_major(&p, Major::H2, &IsotopyParams::at(0.5)).is_ok());
        let off = AmbientPoint::new(0.0, 0.0, 0.0, 0.0);
        assert!(psi_t(&off, &IsotopyParams::at(0.5)).is_err());
        assert!(psi_t(&worked_point(), &IsotopyParams::at(1.5)).is_err());
    }

    #[test]
    fn seam_point_branches_agree() {
        // z = 1 gives (0, ln 2, 0, π): on the leg/triangle seam and on H₁ ∩ H₃
        let p = chart_from_complex(1.0, 0.0).unwrap();
        assert!(line_residual(&p) < 1e-15);
        for t in [0.0, 0.25, 0.5, 1.0] {
            let ev = psi_t_eval(&p, &IsotopyParams::at(t)).unwrap();
            assert!(ev.branches >= 2);
            assert!(ev.disagreement < 1e-8, "t = {t}: {}", ev.disagreement);
        }
    }

    #[test]
    fn region_tags_of_worked_point() {
        let tag = region_tag(&worked_point());
        assert_eq!(tag.major.to_string(), "h1");
        assert_eq!(tag.sub.to_string(), "leg");
        assert_eq!(tag.side.to_string(), "lo");
        let tag2 = region_tag(&lambda_map(&worked_point()));
        assert_eq!(tag2.major.to_string(), "h2");
        assert_eq!(tag2.sub, tag.sub);
    }
}
