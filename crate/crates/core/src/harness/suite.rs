use std::collections::HashMap;
use std::f64::consts::{LN_2, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::exec::Exec;
use super::sample::{sample_line, sample_wc, SampleSet, Strategy};
use crate::error::{domain, Result};
use crate::isotopy::{center_of, coamoeba_flow, phi1_eval, psi_t_branches, pull_to_h1, spread, Branch, IsotopyParams};
use crate::line::{
    amoeba_boundary_class, argwc_slope, argwc_slope_derivative_sign, coamoeba_contains, coamoeba_lift, eq1_residuals,
    gamma1_residual, in_t1, in_t2, lambda_map, lift_amoeba, line_residual, major_tags, sub_tags, wc_boundary_x,
    wc_residual, AmbientPoint, Sign, A1, A2, ON_LINE_TOL, T1_CLOSED, T2_CLOSED,
};
use crate::tags::{Major, Side, Sub, Tag, TagSet, TropPart};
use crate::torus::{
    bisect_root, circular_distance, flat_distance, normalize_angle, ray_hit_horizontal, Angle, PlanePoint,
};
use crate::tropical::{htrop_distance, htrop_subdivision, htrop_subdivision_tol, stratum_distance, TropStratum, TROP_TOL};

/// Pairs of samples this far apart in the domain must have distinct images.
pub const INJECTIVITY_DELTA: f64 = 0.05;
/// Images closer than this count as coincident.
pub const INJECTIVITY_EPS: f64 = 1e-6;
/// Largest acceptable image/domain length ratio over a mesh edge.
pub const STRETCH_BOUND: f64 = 1e3;

const PROBE_CURVE_N: usize = 64;
const PROBE_WC_N: usize = 100;
const PROBE_RANDOM_N: usize = 1000;
const WC_COLLAPSE_C: [f64; 3] = [LN_2, 2.0, 6.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub sample_count: usize,
}

impl Check {
    fn from_max(name: &str, max: f64, count: usize, tolerance: f64) -> Check {
        Check {
            name: name.into(),
            // JSON has no infinities
            max_residual: if max.is_finite() { max } else { f64::MAX },
            tolerance,
            pass: count > 0 && max <= tolerance,
            sample_count: count,
        }
    }

    /// Largest residual against a tolerance; NaN counts as a failure.
    fn residuals(name: &str, values: impl IntoIterator<Item = f64>, tolerance: f64) -> Check {
        let (mut count, mut max) = (0, 0.0f64);
        for v in values {
            count += 1;
            max = max.max(if v.is_nan() { f64::INFINITY } else { v });
        }
        Check::from_max(name, max, count, tolerance)
    }

    /// One predicate per item; the residual is the number of failures.
    fn predicates(name: &str, oks: impl IntoIterator<Item = bool>) -> Check {
        let (mut count, mut bad) = (0, 0usize);
        for ok in oks {
            count += 1;
            bad += usize::from(!ok);
        }
        Check::from_max(name, bad as f64, count, 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
    pub overall: bool,
}

impl VerificationReport {
    fn new(checks: Vec<Check>) -> Self {
        let overall = !checks.is_empty() && checks.iter().all(|c| c.pass);
        VerificationReport { checks, overall }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// Deliberate defects for exercising the failure paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Fault {
    /// Replace the order-three automorphism by a map of infinite order.
    Lambda,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    pub exec: Exec,
    /// Add generated samples on the seams, the boundary strata and slices
    /// `y = 2x + c`, so that checks on measure-zero sets are never vacuous.
    pub probes: bool,
    pub fault: Option<Fault>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { exec: Exec::default(), probes: true, fault: None }
    }
}

pub fn run_suite(samples: &SampleSet, params: &IsotopyParams, t_grid: &[f64]) -> VerificationReport {
    run_suite_with(samples, params, t_grid, &SuiteOptions::default())
}

/// Runs every check; failures are recorded in the report, never raised.
pub fn run_suite_with(
    samples: &SampleSet,
    params: &IsotopyParams,
    t_grid: &[f64],
    opts: &SuiteOptions,
) -> VerificationReport {
    let mut all = samples.clone();
    if opts.probes {
        if let Ok(s) = sample_line(Strategy::SeamCurves, PROBE_CURVE_N, samples.seed) {
            all = all.union(&s);
        }
        for c in WC_COLLAPSE_C {
            if let Ok(s) = sample_wc(c, PROBE_WC_N) {
                all = all.union(&s);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(samples.seed);
    let lambda: fn(&AmbientPoint) -> AmbientPoint = match opts.fault {
        Some(Fault::Lambda) => corrupted_lambda,
        None => lambda_map,
    };

    let mut checks = Vec::new();
    checks.extend(torus_checks(&mut rng));
    checks.extend(line_checks(&all, lambda, &mut rng));
    checks.extend(slice_checks());
    checks.extend(tropical_checks(lambda, &mut rng));
    checks.extend(isotopy_checks(&all, params, t_grid, opts));
    VerificationReport::new(checks)
}

/// `λ` with the `φ`-dependence of `ψ′` dropped; not of order three.
fn corrupted_lambda(p: &AmbientPoint) -> AmbientPoint {
    let q = lambda_map(p);
    AmbientPoint { psi: Angle::new(q.psi.radians() - p.phi.radians()), ..q }
}

fn torus_checks(rng: &mut ChaCha8Rng) -> Vec<Check> {
    let thetas: Vec<f64> = (0..PROBE_RANDOM_N).map(|_| rng.random_range(-50.0..50.0)).collect();
    let idempotent = Check::predicates(
        "angle normalization is idempotent",
        thetas.iter().map(|&t| match normalize_angle(t) {
            Ok(a) => normalize_angle(a.radians()).map(|b| b == a).unwrap_or(false),
            Err(_) => false,
        }),
    );

    let mut plane = || PlanePoint::new(rng.random_range(0.0..TAU), rng.random_range(0.0..TAU));
    let triples: Vec<_> = (0..PROBE_RANDOM_N).map(|_| (plane(), plane(), plane())).collect();
    let metric = Check::residuals(
        "flat distance is a metric",
        triples.iter().map(|&(p, q, r)| {
            let sym = (flat_distance(p, q) - flat_distance(q, p)).abs();
            let tri = flat_distance(p, r) - flat_distance(p, q) - flat_distance(q, r);
            sym.max(tri).max(0.0)
        }),
        1e-12,
    );

    // rays from O into the lower coamoeba triangle A₁
    let rays: Vec<PlanePoint> = (0..PROBE_RANDOM_N)
        .map(|_| {
            let (a, b) = (rng.random::<f64>(), rng.random::<f64>());
            let (a, b) = if a + b > 1.0 { (1.0 - a, 1.0 - b) } else { (a, b) };
            let o = A1.b;
            PlanePoint::new(
                o.u + a * (A1.a.u - o.u) + b * (A1.c.u - o.u),
                o.v + a * (A1.a.v - o.v) + b * (A1.c.v - o.v),
            )
        })
        .filter(|p| flat_distance(*p, A1.b) > 1e-6)
        .collect();
    let collinear = Check::residuals(
        "ray hits are collinear and on the level line",
        rays.iter().map(|&p| match ray_hit_horizontal(A1.b, p, PI) {
            Ok(q) => {
                let o = A1.b;
                let cross = (p.u - o.u) * (q.v - o.v) - (p.v - o.v) * (q.u - o.u);
                let level = if q.v == PI { 0.0 } else { f64::INFINITY };
                cross.abs().max(level)
            }
            Err(_) => f64::INFINITY,
        }),
        1e-12,
    );

    let roots: Vec<f64> = (0..PROBE_RANDOM_N).map(|_| rng.random_range(0.01..0.99)).collect();
    let bisection = Check::residuals(
        "bisection error is bounded by its tolerance",
        roots.iter().map(|&r| match bisect_root(|s| (s - r).tanh(), 0.0, 1.0, 1e-10) {
            Ok(s) => (s - r).abs(),
            Err(_) => f64::INFINITY,
        }),
        1e-10,
    );
    vec![idempotent, metric, collinear, bisection]
}

fn random_ambient(rng: &mut ChaCha8Rng) -> AmbientPoint {
    AmbientPoint::new(
        rng.random_range(-10.0..10.0),
        rng.random_range(-10.0..10.0),
        rng.random_range(0.0..TAU),
        rng.random_range(0.0..TAU),
    )
}

fn torus_point_distance(p: PlanePoint, q: PlanePoint) -> f64 {
    circular_distance(p.u, q.u).hypot(circular_distance(p.v, q.v))
}

fn line_checks(all: &SampleSet, lambda: fn(&AmbientPoint) -> AmbientPoint, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let pts = &all.points;
    let mut out = Vec::new();

    out.push(Check::residuals("samples lie on the line", pts.iter().map(line_residual), ON_LINE_TOL));
    out.push(Check::predicates(
        "mesh edges join distinct samples",
        all.adjacency.iter().map(|&(a, b)| a != b && a < pts.len() && b < pts.len()),
    ));
    out.push(Check::residuals(
        "modulus identities hold",
        pts.iter().map(|p| {
            let (r1, r2) = eq1_residuals(p);
            r1.max(r2) / (1.0 + p.x.exp() + p.y.exp()).powi(2)
        }),
        1e-11,
    ));
    out.push(Check::residuals(
        "argument lift inverts the argument map",
        pts.iter().filter(|p| open_coamoeba(p)).map(|p| match coamoeba_lift(p.phi, p.psi) {
            Ok(q) => (q.x - p.x).hypot(q.y - p.y),
            Err(_) => f64::INFINITY,
        }),
        1e-10,
    ));
    out.push(Check::residuals(
        "samples project into the amoeba",
        pts.iter().map(|p| {
            let (ex, ey) = (p.x.exp(), p.y.exp());
            let worst = (ex - ey - 1.0).max(ey - ex - 1.0).max(1.0 - ex - ey).max(0.0);
            worst / (1.0 + ex + ey)
        }),
        1e-12,
    ));
    out.push(Check::predicates(
        "sample arguments lie in the coamoeba",
        pts.iter().map(|p| coamoeba_contains(p.phi, p.psi)),
    ));
    out.push(Check::residuals(
        "boundary points carry the forced arguments",
        pts.iter().filter_map(|p| {
            let forced = amoeba_boundary_class(p.x, p.y, 1e-13).forced_args()?;
            Some(torus_point_distance(p.args(), forced))
        }),
        1e-9,
    ));

    let mut lambda_probes: Vec<AmbientPoint> = (0..PROBE_RANDOM_N).map(|_| random_ambient(rng)).collect();
    lambda_probes.extend_from_slice(pts);
    out.push(Check::residuals(
        "lambda has order three",
        lambda_probes.iter().map(|p| lambda(&lambda(&lambda(p))).distance(p)),
        1e-12,
    ));
    out.push(Check::predicates(
        "lambda cycles the three pieces",
        pts.iter().map(|p| {
            let q = lambda(p);
            major_tags(q.x, q.y) == major_tags(p.x, p.y).map(Major::next)
        }),
    ));
    out.push(Check::residuals(
        "lambda preserves the line",
        pts.iter().map(|p| line_residual(&lambda(p))),
        ON_LINE_TOL,
    ));

    let corners = [PlanePoint::new(0.0, PI), PlanePoint::new(PI, PI)];
    out.push(Check::predicates(
        "seam arc residual vanishes exactly on the seam curve",
        pts.iter()
            .zip(&all.tags)
            .filter(|(p, t)| {
                t.major.contains(Major::H1)
                    && open_coamoeba(p)
                    && corners.iter().all(|c| torus_point_distance(p.args(), *c) >= 1e-3)
            })
            .map(|(p, t)| (gamma1_residual(p.phi, p.psi).abs() < 1e-9) == (t.sub.len() == 2)),
    ));
    out
}

fn open_coamoeba(p: &AmbientPoint) -> bool {
    let (f, s) = (p.phi.radians(), p.psi.radians());
    in_t1(f, s) || in_t2(f, s)
}

/// `ψ` of the slice `y = 2x + c` above `φ ∈ (0, π)`, found as the unique
/// zero of the slice residual in the open triangle `T₁`.
fn traced_psi(phi: f64, k: f64) -> Result<f64> {
    bisect_root(|psi| wc_residual(phi, psi, k), PI, PI + phi, 1e-15)
}

/// Interior abscissae of the slice, `m` of them, cell-centred.
fn slice_xs(c: f64, m: usize) -> Result<Vec<f64>> {
    let (x_plus, x_minus) = wc_boundary_x(c)?;
    Ok((0..m).map(|i| x_minus + (i as f64 + 0.5) / m as f64 * (x_plus - x_minus)).collect())
}

fn slice_checks() -> Vec<Check> {
    let k_cs = [LN_2, 4f64.ln(), 8f64.ln()];
    let mut out = Vec::new();

    out.push(Check::residuals(
        "slice endpoints solve the boundary equations",
        [LN_2, 1.0, 2.0, 5.0].iter().map(|&c| match wc_boundary_x(c) {
            Ok((xp, xm)) => {
                let plus = ((2.0 * xp + c).exp() - 1.0 - xp.exp()).abs();
                let minus = ((2.0 * xm + c).exp() + xm.exp() - 1.0).abs();
                plus.max(minus)
            }
            Err(_) => f64::INFINITY,
        }),
        1e-12,
    ));

    out.push(Check::predicates(
        "arc slope decreases along each slice",
        k_cs.iter().flat_map(|&c| {
            let mut pairs: Vec<(f64, f64)> = slice_xs(c, 200)
                .unwrap_or_default()
                .into_iter()
                .filter_map(|x| {
                    let p = lift_amoeba(x, 2.0 * x + c, false).ok()?;
                    Some((p.phi.radians(), argwc_slope(x, c).ok()?))
                })
                .collect();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            let ok = pairs.len() == 200;
            pairs.windows(2).map(|w| w[1].1 < w[0].1).chain(std::iter::once(ok)).collect::<Vec<_>>()
        }),
    ));

    out.push(Check::residuals(
        "arc slope formula matches the traced arc",
        [LN_2, 8f64.ln()].iter().flat_map(|&c| {
            let k = (-c).exp();
            slice_xs(c, 50).unwrap_or_default().into_iter().map(move |x| {
                let slope_fd = || -> Result<f64> {
                    let phi = lift_amoeba(x, 2.0 * x + c, false)?.phi.radians();
                    let h = 1e-5;
                    Ok((traced_psi(phi + h, k)? - traced_psi(phi - h, k)?) / (2.0 * h))
                };
                match (slope_fd(), argwc_slope(x, c)) {
                    (Ok(fd), Ok(s)) => (fd - s).abs() / s.abs(),
                    _ => f64::INFINITY,
                }
            })
        }),
        1e-4,
    ));

    out.push(Check::predicates(
        "slope derivative numerator is positive on each slice",
        k_cs.iter().flat_map(|&c| {
            let (xp, xm) = wc_boundary_x(c).unwrap_or((f64::NAN, f64::NAN));
            (0..=200).map(move |i| {
                let x = xm + i as f64 / 200.0 * (xp - xm);
                argwc_slope_derivative_sign(x, c) == Sign::Positive
            })
        }),
    ));

    out.push(Check::residuals(
        "arc slopes at the corners are at most one half and at least minus one",
        k_cs.iter().map(|&c| match wc_boundary_x(c) {
            Ok((xp, xm)) => match (argwc_slope(xp, c), argwc_slope(xm, c)) {
                (Ok(at_zero_pi), Ok(at_pi_pi)) => (at_zero_pi - 0.5).max(-1.0 - at_pi_pi).max(0.0),
                _ => f64::INFINITY,
            },
            Err(_) => f64::INFINITY,
        }),
        1e-12,
    ));

    // one sign change along every ray from the centre to ψ = π
    let mut rays = Vec::new();
    for k in [0.5, 0.25, 0.125] {
        for side in [Side::Lower, Side::Upper] {
            for j in 0..64 {
                let u = (j as f64 + 0.5) / 64.0 * PI + if side == Side::Upper { PI } else { 0.0 };
                rays.push((k, center_of(side), PlanePoint::new(u, PI)));
            }
        }
    }
    out.push(Check::residuals(
        "rays from the centre cross each slice once",
        rays.iter().map(|&(k, o, q)| (sign_changes(o, q, k, 4000) as f64 - 1.0).abs()),
        0.0,
    ));
    out
}

fn sign_changes(o: PlanePoint, q: PlanePoint, k: f64, steps: usize) -> usize {
    let mut prev = 0.0f64;
    let mut changes = 0;
    for i in 0..=steps {
        let p = o.lerp(q, i as f64 / steps as f64);
        let r = wc_residual(p.u, p.v, k);
        if r != 0.0 {
            if prev != 0.0 && (r > 0.0) != (prev > 0.0) {
                changes += 1;
            }
            prev = r;
        }
    }
    changes
}

fn random_in_closed_coamoeba(rng: &mut ChaCha8Rng) -> PlanePoint {
    let t = if rng.random::<bool>() { T1_CLOSED } else { T2_CLOSED };
    let (a, b) = (rng.random::<f64>(), rng.random::<f64>());
    let (a, b) = if a + b > 1.0 { (1.0 - a, 1.0 - b) } else { (a, b) };
    PlanePoint::new(
        t.a.u + a * (t.b.u - t.a.u) + b * (t.c.u - t.a.u),
        t.a.v + a * (t.b.v - t.a.v) + b * (t.c.v - t.a.v),
    )
}

fn tropical_checks(lambda: fn(&AmbientPoint) -> AmbientPoint, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let per = PROBE_RANDOM_N / 4;
    let mut on = Vec::new();
    let mut displaced = Vec::new();
    for _ in 0..per {
        let r = rng.random_range(0.0..10.0);
        let far = rng.random_range(1.0..5.0);
        let th = rng.random_range(0.0..TAU);
        let d = if rng.random::<bool>() { 0.2 } else { -0.2 };
        let which = rng.random::<bool>();
        on.push(AmbientPoint::new(-r, 0.0, th, PI));
        on.push(AmbientPoint::new(0.0, -r, PI, th));
        on.push(AmbientPoint::new(r, r, th, th + PI));
        let v = random_in_closed_coamoeba(rng);
        on.push(AmbientPoint::new(0.0, 0.0, v.u, v.v));
        displaced.push(if which {
            AmbientPoint::new(-far, d, th, PI)
        } else {
            AmbientPoint::new(-far, 0.0, th, PI + d)
        });
        displaced.push(if which {
            AmbientPoint::new(d, -far, PI, th)
        } else {
            AmbientPoint::new(0.0, -far, PI + d, th)
        });
        displaced.push(if which {
            AmbientPoint::new(far + d, far, th, th + PI)
        } else {
            AmbientPoint::new(far, far, th, th + PI + d)
        });
        // a vertex point pushed towards −x or −y can land on a leg
        displaced.push(if which {
            AmbientPoint::new(0.2, 0.0, v.u, v.v)
        } else {
            AmbientPoint::new(0.0, 0.2, v.u, v.v)
        });
    }
    let strata = Check::residuals("tropical strata contain their constructed points", on.iter().map(|p| htrop_distance(p).0), 1e-12);
    let far = Check::predicates(
        "points displaced off a stratum are far from the tropical line",
        displaced.iter().map(|p| htrop_distance(p).0 > 0.1),
    );
    let cycle = Check::predicates(
        "lambda cycles the tropical pieces",
        on.iter().map(|p| match (htrop_subdivision(p), htrop_subdivision(&lambda(p))) {
            (Ok(before), Ok(after)) => after == before.map(next_part),
            _ => false,
        }),
    );

    let mut args: Vec<PlanePoint> = (0..PROBE_RANDOM_N)
        .map(|_| PlanePoint::new(rng.random_range(0.0..TAU), rng.random_range(0.0..TAU)))
        .collect();
    args.extend([(0.0, PI), (PI, 0.0), (PI, PI), (2.0 * PI / 3.0, 4.0 * PI / 3.0), (0.0, 0.0), (PI / 2.0, PI / 4.0)]
        .map(|(u, v)| PlanePoint::new(u, v)));
    let vertex = Check::predicates(
        "vertex fibre matches the closed coamoeba triangles",
        args.iter().map(|&q| {
            let by_stratum = stratum_distance(&AmbientPoint::new(0.0, 0.0, q.u, q.v), TropStratum::Vertex) <= 1e-12;
            let by_triangles = T1_CLOSED.contains_on_torus(q, 1e-12) || T2_CLOSED.contains_on_torus(q, 1e-12);
            by_stratum == by_triangles
        }),
    );
    vec![strata, far, cycle, vertex]
}

fn next_part(t: TropPart) -> TropPart {
    match t {
        TropPart::H1Trop => TropPart::H2Trop,
        TropPart::H2Trop => TropPart::H3Trop,
        TropPart::H3Trop => TropPart::H1Trop,
    }
}

/// `{0, 1}` plus the valid entries of `t_grid`, sorted, without repeats.
fn time_grid(t_grid: &[f64]) -> Vec<f64> {
    let mut ts: Vec<f64> = t_grid.iter().copied().filter(|t| (0.0..=1.0).contains(t)).collect();
    ts.extend([0.0, 1.0]);
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    ts
}

type Images = Vec<Result<Vec<Branch>>>;

fn isotopy_checks(all: &SampleSet, params: &IsotopyParams, t_grid: &[f64], opts: &SuiteOptions) -> Vec<Check> {
    let exec = opts.exec;
    let pts = &all.points;
    let ts = time_grid(t_grid);
    let images: Vec<Images> = ts
        .iter()
        .map(|&t| {
            let pr = params.with_t(t);
            exec.map(pts, |p| psi_t_branches(p, &pr))
        })
        .collect();
    let first = |k: usize, i: usize| images[k][i].as_ref().ok().map(|b| b[0].point);
    let last = ts.len() - 1;
    let mut out = Vec::new();

    out.push(Check::predicates(
        "time grid lies in the unit interval",
        t_grid.iter().map(|t| (0.0..=1.0).contains(t)),
    ));
    out.push(Check::residuals(
        "deformation is the identity at t = 0",
        (0..pts.len()).map(|i| first(0, i).map_or(f64::INFINITY, |q| q.distance(&pts[i]))),
        1e-12,
    ));
    out.push(Check::residuals(
        "deformation ends on the phase tropical line",
        (0..pts.len()).map(|i| first(last, i).map_or(f64::INFINITY, |q| htrop_distance(&q).0)),
        TROP_TOL,
    ));
    out.push(Check::predicates(
        "each piece ends on its tropical piece",
        (0..pts.len()).map(|i| {
            let Some(q) = first(last, i) else { return false };
            match htrop_subdivision_tol(&q, TROP_TOL) {
                Ok(parts) => all.tags[i].major.iter().all(|m| parts.contains(m.trop())),
                Err(_) => false,
            }
        }),
    ));

    // per-major spread for points where one major has both leg and triangle
    let mut sub_seam = Vec::new();
    let mut major_seam = Vec::new();
    for i in 0..pts.len() {
        let mut on_sub_seam = false;
        let (mut sub_worst, mut major_worst) = (0.0f64, 0.0f64);
        for per_t in &images {
            let branches = match &per_t[i] {
                Ok(b) => b,
                Err(_) => {
                    sub_worst = f64::INFINITY;
                    major_worst = f64::INFINITY;
                    continue;
                }
            };
            let mut heads = Vec::new();
            for m in <Major as Tag>::ALL {
                let group: Vec<&Branch> = branches.iter().filter(|b| b.major == *m).collect();
                if group.is_empty() {
                    continue;
                }
                let subs: TagSet<Sub> = group.iter().map(|b| b.sub).collect();
                if subs.len() == 2 {
                    on_sub_seam = true;
                    sub_worst = sub_worst.max(spread(group.iter().map(|b| &b.point)));
                }
                heads.push(group[0].point);
            }
            major_worst = major_worst.max(spread(&heads));
        }
        if on_sub_seam {
            sub_seam.push(sub_worst);
        }
        if all.tags[i].major.len() >= 2 {
            major_seam.push(major_worst);
        }
    }
    out.push(Check::residuals("leg and triangle branches agree on the seam curve", sub_seam, params.seam_tol));
    out.push(Check::residuals("pieces agree where they meet", major_seam, params.seam_tol));

    let corners = [PlanePoint::new(0.0, PI), PlanePoint::new(PI, PI)];
    let mut fixed_args: Vec<PlanePoint> =
        pts.iter().map(|p| p.args()).filter(|a| corners.iter().any(|c| torus_point_distance(*a, *c) <= 1e-12)).collect();
    if opts.probes {
        fixed_args.extend(corners);
    }
    out.push(Check::residuals(
        "flow fixes the boundary arguments",
        fixed_args.iter().flat_map(|a| {
            let ts = &ts;
            [Sub::Triangle, Sub::Leg].into_iter().flat_map(move |sub| {
                ts.iter().map(move |&t| match coamoeba_flow(Angle::new(a.u), Angle::new(a.v), sub, t, params.root_tol) {
                    Ok((f, s)) => torus_point_distance(PlanePoint::new(f.radians(), s.radians()), *a),
                    Err(_) => f64::INFINITY,
                })
            })
        }),
        1e-12,
    ));

    let ranges = exec.map(pts, |p| {
        let q = pull_to_h1(p);
        let mut worst = 0.0f64;
        for sub in sub_tags(q.x, q.y).iter() {
            for &t in &ts {
                worst = worst.max(match coamoeba_flow(q.phi, q.psi, sub, t, params.root_tol) {
                    Ok((f, s)) => {
                        let a = PlanePoint::new(f.radians(), s.radians());
                        A1.distance_on_torus(a).min(A2.distance_on_torus(a))
                    }
                    Err(_) => f64::INFINITY,
                });
            }
        }
        worst
    });
    out.push(Check::residuals("flow stays in the closed coamoeba of the first piece", ranges, 1e-9));

    let mut collision = 0.0f64;
    for k in 0..ts.len() {
        let imgs: Option<Vec<AmbientPoint>> = (0..pts.len()).map(|i| first(k, i)).collect();
        collision = collision.max(match imgs {
            Some(imgs) => max_collision_distance(pts, &imgs, INJECTIVITY_EPS, exec),
            None => f64::INFINITY,
        });
    }
    out.push(Check::from_max(
        "distant samples have distinct images",
        collision,
        if pts.len() >= 2 { pts.len() } else { 0 },
        INJECTIVITY_DELTA,
    ));
    if let Some(c) = out.last_mut() {
        // equality is a failure here: pairs at exactly δ must stay apart
        c.pass = c.pass && collision < INJECTIVITY_DELTA;
    }

    let legs: Vec<usize> = (0..pts.len())
        .filter(|&i| {
            let q = pull_to_h1(&pts[i]);
            sub_tags(q.x, q.y).contains(Sub::Leg)
        })
        .collect();
    let collapse = exec.map(&legs, |&i| {
        let q = pull_to_h1(&pts[i]);
        let c = q.y - 2.0 * q.x;
        match phi1_eval(&q, &params.with_t(1.0)) {
            Ok(ev) => {
                let r = ev.point;
                (r.x - (LN_2 - c) / 2.0).abs().max(r.y.abs()).max(circular_distance(r.psi.radians(), PI))
            }
            Err(_) => f64::INFINITY,
        }
    });
    out.push(Check::residuals("legs collapse onto the tropical ray", collapse, 1e-8));

    let mut stretch = (0.0f64, 0usize);
    let mut at_zero = 0.0f64;
    for (k, &t) in ts.iter().enumerate() {
        let imgs: Vec<Option<AmbientPoint>> = (0..pts.len()).map(|i| first(k, i)).collect();
        let (max_ratio, dev, n) = edge_ratios(pts, &imgs, &all.adjacency);
        stretch = (stretch.0.max(max_ratio), n);
        if t == 0.0 {
            at_zero = dev;
        }
    }
    out.push(Check::from_max("mesh stretch stays bounded", stretch.0, stretch.1, STRETCH_BOUND));
    out.push(Check::from_max("mesh stretch is one at t = 0", at_zero, stretch.1, 1e-9));
    out
}

/// `(max ratio, max |ratio − 1|, edges used)` of image over domain edge
/// lengths; a missing image counts as an infinite ratio.
fn edge_ratios(pts: &[AmbientPoint], imgs: &[Option<AmbientPoint>], edges: &[(usize, usize)]) -> (f64, f64, usize) {
    let (mut max_ratio, mut dev, mut n) = (0.0f64, 0.0f64, 0);
    for &(a, b) in edges {
        if a >= pts.len() || b >= pts.len() {
            continue;
        }
        let d = pts[a].distance(&pts[b]);
        if d == 0.0 {
            continue;
        }
        n += 1;
        let ratio = match (imgs[a], imgs[b]) {
            (Some(p), Some(q)) => p.distance(&q) / d,
            _ => f64::INFINITY,
        };
        max_ratio = max_ratio.max(ratio);
        dev = dev.max((ratio - 1.0).abs());
    }
    (max_ratio, dev, n)
}

/// Max over mesh edges of image length over domain length at time `t`.
pub fn continuity_proxy(samples: &SampleSet, t: f64) -> Result<f64> {
    if samples.adjacency.is_empty() {
        return Err(domain("continuity proxy needs mesh edges"));
    }
    let params = IsotopyParams::at(t);
    let imgs = Exec::default().map(&samples.points, |p| crate::isotopy::psi_t(p, &params));
    let imgs: Vec<Option<AmbientPoint>> = imgs.into_iter().map(|r| r.map(Some)).collect::<Result<_>>()?;
    Ok(edge_ratios(&samples.points, &imgs, &samples.adjacency).0)
}

/// Largest domain distance between two samples whose images are closer than
/// `eps`, via a hash grid over the images with cells at least `eps` wide.
fn max_collision_distance(domain_pts: &[AmbientPoint], imgs: &[AmbientPoint], eps: f64, exec: Exec) -> f64 {
    let turns = (TAU / eps).floor() as i64;
    let angle_cell = |a: f64| ((a / TAU * turns as f64).floor() as i64).clamp(0, turns - 1);
    let key = |p: &AmbientPoint| {
        [
            (p.x / eps).floor() as i64,
            (p.y / eps).floor() as i64,
            angle_cell(p.phi.radians()),
            angle_cell(p.psi.radians()),
        ]
    };
    let mut grid: HashMap<[i64; 4], Vec<usize>> = HashMap::new();
    for (i, p) in imgs.iter().enumerate() {
        grid.entry(key(p)).or_default().push(i);
    }
    let worst = exec.map_range(imgs.len(), |i| {
        let k = key(&imgs[i]);
        let mut worst = 0.0f64;
        for d0 in -1..=1 {
            for d1 in -1..=1 {
                for d2 in -1..=1 {
                    for d3 in -1..=1 {
                        let nk = [k[0] + d0, k[1] + d1, (k[2] + d2).rem_euclid(turns), (k[3] + d3).rem_euclid(turns)];
                        for &j in grid.get(&nk).map(Vec::as_slice).unwrap_or(&[]) {
                            if j > i && imgs[i].distance(&imgs[j]) < eps {
                                worst = worst.max(domain_pts[i].distance(&domain_pts[j]));
                            }
                        }
                    }
                }
            }
        }
        worst
    });
    worst.into_iter().fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn time_grid_always_has_endpoints() {
        assert_eq!(time_grid(&[]), vec![0.0, 1.0]);
        assert_eq!(time_grid(&[0.5, 0.0, 2.0]), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn sign_change_counter() {
        let o = center_of(Side::Lower);
        assert_eq!(sign_changes(o, PlanePoint::new(1.0, PI), 0.5, 1000), 1);
    }

    #[test]
    fn collision_finds_close_images() {
        let a = AmbientPoint::new(0.0, 0.0, 1.0, 1.0);
        let b = AmbientPoint::new(1.0, 0.0, 1.0, 1.0);
        let d = max_collision_distance(&[a, b], &[a, a], 1e-6, Exec::Sequential);
        assert_eq!(d, 1.0);
        assert_eq!(max_collision_distance(&[a, b], &[a, b], 1e-6, Exec::Sequential), 0.0);
        // wrap-around in the angle cells
        let c = AmbientPoint::new(0.0, 0.0, TAU - 1e-8, 1.0);
        let e = AmbientPoint::new(0.0, 0.0, 1e-8, 1.0);
        assert_eq!(max_collision_distance(&[a, b], &[c, e], 1e-6, Exec::Sequential), 1.0);
    }

    #[test]
    fn vacuous_checks_fail() {
        let s = sample_line(Strategy::CoamoebaGrid, 6, 1).unwrap();
        let opts = SuiteOptions { probes: false, ..Default::default() };
        let r = run_suite_with(&s, &IsotopyParams::default(), &[0.0, 1.0], &opts);
        let seam = r.check("leg and triangle branches agree on the seam curve").unwrap();
        assert_eq!(seam.sample_count, 0);
        assert!(!seam.pass);
        assert!(!r.overall);
    }
}
