//! The phase tropical line as an explicit union of four strata:
//!
//! * `Leg1`: `x ≤ 0, y = 0, ψ = π`, φ free;
//! * `Leg2`: `x = 0, y ≤ 0, φ = π`, ψ free;
//! * `Leg3`: `x = y ≥ 0, ψ = φ + π`;
//! * `Vertex`: `x = y = 0` with `(φ, ψ)` in the closed coamoeba `T̄₁ ∪ T̄₂`.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::line::{coamoeba_regions, AmbientPoint, T1_CLOSED, T2_CLOSED};
use crate::tags::{Major, TagSet, TropPart};
use crate::torus::{wrapped_diff, PlanePoint};

/// Default tolerance for "on the tropical line".
pub const TROP_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TropStratum {
    Leg1,
    Leg2,
    Leg3,
    Vertex,
}

impl TropStratum {
    pub const ALL: [TropStratum; 4] = [TropStratum::Leg1, TropStratum::Leg2, TropStratum::Leg3, TropStratum::Vertex];
}

/// Distance from `p` to one stratum: Euclidean in `(x, y)` and flat on the
/// torus in `(φ, ψ)`, combined in quadrature.
pub fn stratum_distance(p: &AmbientPoint, stratum: TropStratum) -> f64 {
    let (x, y) = (p.x, p.y);
    let (f, s) = (p.phi.radians(), p.psi.radians());
    let (dxy, dang) = match stratum {
        TropStratum::Leg1 => (x.max(0.0).hypot(y), wrapped_diff(s, PI).abs()),
        TropStratum::Leg2 => (y.max(0.0).hypot(x), wrapped_diff(f, PI).abs()),
        TropStratum::Leg3 => {
            // nearest point on the ray {(r, r) : r ≥ 0}
            let r = (0.5 * (x + y)).max(0.0);
            ((x - r).hypot(y - r), wrapped_diff(s - f, PI).abs() / SQRT_2)
        }
        TropStratum::Vertex => {
            let q = PlanePoint::new(f, s);
            (x.hypot(y), T1_CLOSED.distance_on_torus(q).min(T2_CLOSED.distance_on_torus(q)))
        }
    };
    dxy.hypot(dang)
}

/// Distance to the phase tropical line and the nearest stratum (first in
/// `Leg1, Leg2, Leg3, Vertex` order on ties).
pub fn htrop_distance(p: &AmbientPoint) -> (f64, TropStratum) {
    TropStratum::ALL
        .into_iter()
        .map(|k| (stratum_distance(p, k), k))
        .fold((f64::INFINITY, TropStratum::Vertex), |best, cur| if cur.0 < best.0 { cur } else { best })
}

/// Which of the three tropical pieces contain `p`, at tolerance `tol`.
pub fn htrop_subdivision_tol(p: &AmbientPoint, tol: f64) -> Result<TagSet<TropPart>> {
    let (d, _) = htrop_distance(p);
    if d > tol {
        return Err(domain(format!("point is {d:e} away from the tropical line")));
    }
    let args = PlanePoint::new(p.phi.radians(), p.psi.radians());
    let in_closed = |major: Major| {
        coamoeba_regions(major)
            .iter()
            .any(|t| t.distance_on_torus(args) <= tol)
    };
    let (x, y) = (p.x, p.y);
    let mut parts = TagSet::empty();
    if y.abs() <= tol && x <= tol && in_closed(Major::H1) {
        parts.insert(TropPart::H1Trop);
    }
    if x.abs() <= tol && y <= tol && in_closed(Major::H2) {
        parts.insert(TropPart::H2Trop);
    }
    if (x - y).abs() <= tol && x >= -tol && in_closed(Major::H3) {
        parts.insert(TropPart::H3Trop);
    }
    Ok(parts)
}

pub fn htrop_subdivision(p: &AmbientPoint) -> Result<TagSet<TropPart>> {
    htrop_subdivision_tol(p, TROP_TOL)
}
