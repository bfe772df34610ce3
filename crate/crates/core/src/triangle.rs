//! Closed triangles in the fundamental domain, with barycentric membership
//! and point-to-triangle distance. The `*_on_torus` variants also try the
//! eight neighbouring translates by multiples of `2π`, so that vertices such
//! as `(2π, π)` and `(0, π)` are identified.

use std::f64::consts::TAU;

use crate::torus::{flat_distance, PlanePoint};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triangle {
    pub a: PlanePoint,
    pub b: PlanePoint,
    pub c: PlanePoint,
}

impl Triangle {
    pub const fn new(a: PlanePoint, b: PlanePoint, c: PlanePoint) -> Self {
        Triangle { a, b, c }
    }

    /// Barycentric coordinates `(λa, λb, λc)` of `p`; they sum to one.
    pub fn barycentric(&self, p: PlanePoint) -> (f64, f64, f64) {
        let (a, b, c) = (self.a, self.b, self.c);
        let det = (b.v - c.v) * (a.u - c.u) + (c.u - b.u) * (a.v - c.v);
        let la = ((b.v - c.v) * (p.u - c.u) + (c.u - b.u) * (p.v - c.v)) / det;
        let lb = ((c.v - a.v) * (p.u - c.u) + (a.u - c.u) * (p.v - c.v)) / det;
        (la, lb, 1.0 - la - lb)
    }

    /// Closed membership; `tol` is a slack on each barycentric coordinate.
    pub fn contains(&self, p: PlanePoint, tol: f64) -> bool {
        let (la, lb, lc) = self.barycentric(p);
        la >= -tol && lb >= -tol && lc >= -tol
    }

    /// Euclidean distance from `p` to the closed triangle (0 inside).
    pub fn distance(&self, p: PlanePoint) -> f64 {
        if self.contains(p, 0.0) {
            return 0.0;
        }
        segment_distance(p, self.a, self.b)
            .min(segment_distance(p, self.b, self.c))
            .min(segment_distance(p, self.c, self.a))
    }

    pub fn contains_on_torus(&self, p: PlanePoint, tol: f64) -> bool {
        translates(p).any(|q| self.contains(q, tol))
    }

    pub fn distance_on_torus(&self, p: PlanePoint) -> f64 {
        translates(p).map(|q| self.distance(q)).fold(f64::INFINITY, f64::min)
    }

    pub fn centroid(&self) -> PlanePoint {
        PlanePoint::new(
            (self.a.u + self.b.u + self.c.u) / 3.0,
            (self.a.v + self.b.v + self.c.v) / 3.0,
        )
    }
}

fn translates(p: PlanePoint) -> impl Iterator<Item = PlanePoint> {
    const SHIFTS: [f64; 3] = [0.0, -TAU, TAU];
    SHIFTS
        .into_iter()
        .flat_map(move |du| SHIFTS.into_iter().map(move |dv| PlanePoint::new(p.u + du, p.v + dv)))
}

fn segment_distance(p: PlanePoint, a: PlanePoint, b: PlanePoint) -> f64 {
    let (du, dv) = (b.u - a.u, b.v - a.v);
    let len2 = du * du + dv * dv;
    if len2 == 0.0 {
        return flat_distance(p, a);
    }
    let s = (((p.u - a.u) * du + (p.v - a.v) * dv) / len2).clamp(0.0, 1.0);
    flat_distance(p, a.lerp(b, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn t1() -> Triangle {
        Triangle::new(
            PlanePoint::new(0.0, PI),
            PlanePoint::new(PI, PI),
            PlanePoint::new(PI, TAU),
        )
    }

    #[test]
    fn barycentre_of_closed_t1() {
        let (la, lb, lc) = t1().barycentric(t1().centroid());
        for l in [la, lb, lc] {
            assert!((l - 1.0 / 3.0).abs() < 1e-15);
        }
        let o = t1().centroid();
        assert!((o.u - 2.0 * PI / 3.0).abs() < 1e-15);
        assert!((o.v - 4.0 * PI / 3.0).abs() < 1e-15);
    }

    #[test]
    fn membership_and_distance() {
        let t = t1();
        assert!(t.contains(PlanePoint::new(PI / 2.0, 5.0 * PI / 4.0), 0.0));
        assert!(!t.contains(PlanePoint::new(PI / 2.0, PI / 4.0), 0.0));
        assert!(t.contains(PlanePoint::new(0.0, PI), 0.0));
        assert_eq!(t.distance(PlanePoint::new(1.0, 4.0)), 0.0);
        assert!((t.distance(PlanePoint::new(1.0, PI - 0.5)) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn torus_identification_of_vertices() {
        // (π, 0) is the vertex (π, 2π) of the closed T₁ seen through the wrap
        assert!(!t1().contains(PlanePoint::new(PI, 0.0), 1e-12));
        assert!(t1().contains_on_torus(PlanePoint::new(PI, 0.0), 1e-12));
        assert_eq!(t1().distance_on_torus(PlanePoint::new(PI, 0.0)), 0.0);
    }
}
