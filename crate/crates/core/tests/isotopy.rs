use std::f64::consts::{LN_2, PI, TAU};

use proptest::prelude::*;

use phasetrop::isotopy::{coamoeba_flow, psi_t, psi_t_eval, pull_to_h1, IsotopyParams};
use phasetrop::line::{
    chart_from_complex, coamoeba_lift, in_closed_arg_h1, lambda_map, major_tags, sub_tags, AmbientPoint,
};
use phasetrop::tags::Sub;
use phasetrop::torus::Angle;
use phasetrop::tropical::{htrop_distance, htrop_subdivision};

/// A point of the line from the complex chart, away from `z = 0, −1`.
fn chart_point() -> impl Strategy<Value = AmbientPoint> {
    (-6.0..6.0f64, 0.0..TAU)
        .prop_filter_map("too close to a puncture", |(lr, th)| {
            let (re, im) = (lr.exp() * th.cos(), lr.exp() * th.sin());
            if (re + 1.0).hypot(im) < 1e-3 {
                return None;
            }
            chart_from_complex(re, im).ok()
        })
}

fn close(a: &AmbientPoint, b: &AmbientPoint, tol: f64) -> bool {
    a.distance(b) < tol
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 512, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn identity_at_zero(p in chart_point()) {
        prop_assert!(close(&psi_t(&p, &IsotopyParams::at(0.0)).unwrap(), &p, 1e-12));
    }

    #[test]
    fn endpoint_on_tropical_line(p in chart_point()) {
        let q = psi_t(&p, &IsotopyParams::at(1.0)).unwrap();
        prop_assert!(htrop_distance(&q).0 < 1e-8);
        let parts = htrop_subdivision(&q).unwrap();
        for m in major_tags(p.x, p.y).iter() {
            prop_assert!(parts.contains(m.trop()));
        }
    }

    #[test]
    fn equivariant_under_lambda(p in chart_point(), t in 0.0..=1.0f64) {
        let params = IsotopyParams::at(t);
        let a = psi_t(&lambda_map(&p), &params).unwrap();
        let b = lambda_map(&psi_t(&p, &params).unwrap());
        prop_assert!(close(&a, &b, 1e-8), "{a:?} vs {b:?}");
    }

    #[test]
    fn flow_stays_in_closed_region(p in chart_point(), t in 0.0..=1.0f64) {
        let q = pull_to_h1(&p);
        for sub in sub_tags(q.x, q.y).iter() {
            let (f, s) = coamoeba_flow(q.phi, q.psi, sub, t, 1e-10).unwrap();
            prop_assert!(in_closed_arg_h1(f.radians(), s.radians(), 1e-9));
        }
    }

    #[test]
    fn continuous_in_time(p in chart_point(), t in 0.0..0.999f64) {
        let a = psi_t(&p, &IsotopyParams::at(t)).unwrap();
        let b = psi_t(&p, &IsotopyParams::at(t + 1e-6)).unwrap();
        prop_assert!(close(&a, &b, 1e-4));
    }

    #[test]
    fn seam_branches_agree(x in -LN_2..0.0f64, upper: bool, t in 0.0..=1.0f64) {
        let p = phasetrop::line::lift_amoeba(x, 2.0 * x + LN_2, upper).unwrap();
        prop_assert_eq!(sub_tags(p.x, p.y).len(), 2);
        let ev = psi_t_eval(&p, &IsotopyParams::at(t)).unwrap();
        prop_assert!(ev.branches >= 2);
        prop_assert!(ev.disagreement < 1e-8);
    }

    #[test]
    fn leg_flow_ends_on_psi_pi(phi in 0.05..3.1f64, frac in 0.01..0.99f64) {
        // points strictly between the seam arc and ψ = π, on a vertical ray
        let p = coamoeba_lift(Angle::new(phi), Angle::new(PI + 0.5 * phi * frac)).unwrap();
        prop_assume!(sub_tags(p.x, p.y) == phasetrop::TagSet::single(Sub::Leg));
        prop_assume!(major_tags(p.x, p.y).first() == Some(phasetrop::Major::H1));
        let (_, s) = coamoeba_flow(p.phi, p.psi, Sub::Leg, 1.0, 1e-10).unwrap();
        prop_assert!((s.radians() - PI).abs() < 1e-12);
    }
}

#[test]
fn boundary_strata_points_keep_their_arguments() {
    for z in [0.3, 1.0, 5.0, -0.2, -0.5, -0.8, -3.0] {
        let p = chart_from_complex(z, 0.0).unwrap();
        for t in [0.25, 0.5, 1.0] {
            let q = psi_t(&p, &IsotopyParams::at(t)).unwrap();
            assert_eq!((q.phi, q.psi), (p.phi, p.psi), "z = {z}, t = {t}");
        }
    }
}

#[test]
fn worked_point_at_intermediate_time() {
    let p = AmbientPoint::new(-LN_2, (3f64.sqrt() / 2.0).ln(), 2.0 * PI / 3.0, 7.0 * PI / 6.0);
    let q = psi_t(&p, &IsotopyParams::at(0.5)).unwrap();
    // leg: factor 2^t on the vertical offset −π/6 from O
    let psi = 4.0 * PI / 3.0 - 2f64.sqrt() * PI / 6.0;
    assert!((q.psi.radians() - psi).abs() < 1e-12);
    assert!((q.phi.radians() - 2.0 * PI / 3.0).abs() < 1e-12);
    assert!((q.x - (p.x - 0.25 * (p.y - LN_2))).abs() < 1e-15);
    assert!((q.y - 0.5 * p.y).abs() < 1e-15);
}

#[test]
fn seam_branches_near_the_corners() {
    // The seam arc leaves its corners (0, π) and (π, π) along the edge rays
    // with only cubic separation, so close to them the triangle branch
    // amplifies argument roundoff like 1/d². Agreement at 1e-8 holds down
    // to |x| = 1e-7 from the corner; closer in, the disagreement stays within
    // twice the distance to the corner.
    for k in 0..=300 {
        let e = 1.0 + 15.0 * k as f64 / 300.0;
        let h = 10f64.powf(-e);
        for (x, corner) in [(-h, 0.0), (-LN_2 + h, PI)] {
            for upper in [false, true] {
                let p = phasetrop::line::lift_amoeba(x, 2.0 * x + LN_2, upper).unwrap();
                let d = (p.phi.radians() - if upper { TAU - corner } else { corner }).hypot(p.psi.radians() - PI);
                for t in [0.5, 1.0] {
                    let ev = psi_t_eval(&p, &IsotopyParams::at(t)).unwrap();
                    if e <= 7.0 {
                        assert!(ev.disagreement < 1e-8, "x = {x:e}: {:e}", ev.disagreement);
                    } else {
                        assert!(ev.disagreement <= 2.0 * d, "x = {x:e}: {:e} vs corner distance {d:e}", ev.disagreement);
                    }
                }
            }
        }
    }
}
