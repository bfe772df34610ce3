use std::collections::HashMap;
use std::f64::consts::{LN_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::isotopy::region_tag;
use crate::line::{
    amoeba_boundary_class, amoeba_contains, chart_from_complex, coamoeba_lift, lift_amoeba, line_residual,
    wc_boundary_x, AmbientPoint, BoundaryCurve, ON_LINE_TOL,
};
use crate::tags::RegionTag;
use crate::torus::Angle;

/// Half-width of the `(x, y)` box used to truncate the three tentacles.
pub const LEG_CUTOFF: f64 = 10.0;
/// Relative distance kept from the amoeba boundary by interior grids.
const AMOEBA_MARGIN: f64 = 1e-6;
/// Log-radius range of the complex chart grid.
const CHART_LOG_RADIUS: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    CoamoebaGrid,
    AmoebaLift,
    ComplexChart,
    SeamCurves,
}

impl Strategy {
    pub const ALL: [Strategy; 4] =
        [Strategy::CoamoebaGrid, Strategy::AmoebaLift, Strategy::ComplexChart, Strategy::SeamCurves];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::CoamoebaGrid => "coamoeba",
            Strategy::AmoebaLift => "amoeba",
            Strategy::ComplexChart => "chart",
            Strategy::SeamCurves => "seams",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coamoeba" | "coamoeba-grid" => Ok(Strategy::CoamoebaGrid),
            "amoeba" | "amoeba-lift" => Ok(Strategy::AmoebaLift),
            "chart" | "complex-chart" => Ok(Strategy::ComplexChart),
            "seams" | "seam-curves" => Ok(Strategy::SeamCurves),
            _ => Err(domain(format!("unknown strategy {s:?}"))),
        }
    }
}

/// Points of the line with their region tags and a mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub points: Vec<AmbientPoint>,
    pub tags: Vec<RegionTag>,
    pub adjacency: Vec<(usize, usize)>,
    pub strategy: Strategy,
    pub seed: u64,
}

impl SampleSet {
    pub fn new(points: Vec<AmbientPoint>, adjacency: Vec<(usize, usize)>, strategy: Strategy, seed: u64) -> Self {
        let tags = points.iter().map(region_tag).collect();
        SampleSet { points, tags, adjacency, strategy, seed }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Concatenation; keeps `self`'s strategy and seed.
    pub fn union(&self, other: &SampleSet) -> SampleSet {
        let off = self.points.len();
        let mut out = self.clone();
        out.points.extend_from_slice(&other.points);
        out.tags.extend_from_slice(&other.tags);
        out.adjacency.extend(other.adjacency.iter().map(|&(a, b)| (a + off, b + off)));
        out
    }
}

#[derive(Default)]
struct Builder {
    points: Vec<AmbientPoint>,
    edges: Vec<(usize, usize)>,
}

impl Builder {
    fn push(&mut self, p: Result<AmbientPoint>) -> Option<usize> {
        let p = p.ok()?;
        if !(line_residual(&p) < ON_LINE_TOL) {
            return None;
        }
        self.points.push(p);
        Some(self.points.len() - 1)
    }

    fn edge(&mut self, a: Option<usize>, b: Option<usize>) {
        if let (Some(a), Some(b)) = (a, b) {
            if a != b {
                self.edges.push((a, b));
            }
        }
    }

    /// Polyline through `ids`, skipping dropped points.
    fn chain(&mut self, ids: &[Option<usize>]) {
        let kept: Vec<usize> = ids.iter().flatten().copied().collect();
        for w in kept.windows(2) {
            self.edge(Some(w[0]), Some(w[1]));
        }
    }

    /// Edges between 4-neighbours of a grid keyed by `(i, j)`.
    fn grid_edges(&mut self, grid: &HashMap<(usize, usize), usize>, wrap_j: Option<usize>) {
        let mut keys: Vec<_> = grid.keys().copied().collect();
        keys.sort_unstable();
        for (i, j) in keys {
            let here = grid.get(&(i, j)).copied();
            self.edge(here, grid.get(&(i + 1, j)).copied());
            let jn = match wrap_j {
                Some(m) => (j + 1) % m,
                None => j + 1,
            };
            self.edge(here, grid.get(&(i, jn)).copied());
        }
    }

    fn finish(self, strategy: Strategy, seed: u64) -> SampleSet {
        SampleSet::new(self.points, self.edges, strategy, seed)
    }
}

fn require_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(domain("sample count must be at least 1"))
    } else {
        Ok(())
    }
}

/// Samples of the line by one of the four strategies. `n` is the number of
/// grid nodes per axis (per curve for [`Strategy::SeamCurves`]); the grids
/// are deterministic and `seed` is carried along for the randomized checks
/// of the suite.
pub fn sample_line(strategy: Strategy, n: usize, seed: u64) -> Result<SampleSet> {
    require_n(n)?;
    let b = match strategy {
        Strategy::CoamoebaGrid => coamoeba_grid(n),
        Strategy::AmoebaLift => amoeba_lift(n),
        Strategy::ComplexChart => complex_chart(n),
        Strategy::SeamCurves => seam_curves(n),
    };
    Ok(b.finish(strategy, seed))
}

/// Cell-centred grid over each open triangle, lifted by the inverse
/// argument map. `T₂` is the mirror image `(2π − φ, 2π − ψ)` of `T₁`.
fn coamoeba_grid(n: usize) -> Builder {
    let mut b = Builder::default();
    let h = PI / n as f64;
    for upper in [false, true] {
        let mut grid = HashMap::new();
        for i in 0..n {
            for j in 0..i {
                let (mut phi, mut psi) = ((i as f64 + 0.5) * h, PI + (j as f64 + 0.5) * h);
                if upper {
                    (phi, psi) = (TAU - phi, TAU - psi);
                }
                if let Some(id) = b.push(coamoeba_lift(Angle::new(phi), Angle::new(psi))) {
                    grid.insert((i, j), id);
                }
            }
        }
        b.grid_edges(&grid, None);
    }
    b
}

fn strictly_inside_amoeba(x: f64, y: f64) -> bool {
    amoeba_contains(x, y) && amoeba_boundary_class(x, y, AMOEBA_MARGIN) == BoundaryCurve::None
}

/// Cell-centred grid over the amoeba in `[−10, 10]²`, lifted to both sheets.
fn amoeba_lift(n: usize) -> Builder {
    let mut b = Builder::default();
    let h = 2.0 * LEG_CUTOFF / n as f64;
    for upper in [false, true] {
        let mut grid = HashMap::new();
        for i in 0..n {
            for j in 0..n {
                let (x, y) = (-LEG_CUTOFF + (i as f64 + 0.5) * h, -LEG_CUTOFF + (j as f64 + 0.5) * h);
                if !strictly_inside_amoeba(x, y) {
                    continue;
                }
                if let Some(id) = b.push(lift_amoeba(x, y, upper)) {
                    grid.insert((i, j), id);
                }
            }
        }
        b.grid_edges(&grid, None);
    }
    b
}

/// `(cos θ, sin θ)` for `θ = 2πj/m`, exact on the axes when `4 | m`.
fn unit(j: usize, m: usize) -> (f64, f64) {
    if m.is_multiple_of(4) && j.is_multiple_of(m / 4) {
        return [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)][j / (m / 4) % 4];
    }
    let th = TAU * j as f64 / m as f64;
    (th.cos(), th.sin())
}

/// Log-polar grid `z = ρe^{iθ}` over `ℂ* ∖ {−1}`; the radii include `|z| = 1`
/// and the angles include the real and imaginary axes.
fn complex_chart(n: usize) -> Builder {
    let mut b = Builder::default();
    let half = (n / 2).max(1);
    let m = 4 * n.div_ceil(4);
    let mut grid = HashMap::new();
    for i in 0..=2 * half {
        let rho = ((i as f64 - half as f64) * CHART_LOG_RADIUS / half as f64).exp();
        for j in 0..m {
            let (c, s) = unit(j, m);
            let (re, im) = (rho * c, rho * s);
            if (re + 1.0).hypot(im) < 1e-9 {
                continue;
            }
            if let Some(id) = b.push(chart_from_complex(re, im)) {
                grid.insert((i, j), id);
            }
        }
    }
    b.grid_edges(&grid, Some(m));
    b
}

/// `n` interior points of a curve `s ↦ (x, y)`, `s ∈ (0, 1)`, on both
/// sheets, joined to the given per-sheet endpoints.
fn amoeba_curve(
    b: &mut Builder,
    n: usize,
    curve: impl Fn(f64) -> (f64, f64),
    start: [Option<usize>; 2],
    end: [Option<usize>; 2],
) {
    for (sheet, upper) in [false, true].into_iter().enumerate() {
        let mut ids = vec![start[sheet]];
        for i in 0..n {
            let (x, y) = curve((i as f64 + 0.5) / n as f64);
            ids.push(b.push(lift_amoeba(x, y, upper)));
        }
        ids.push(end[sheet]);
        b.chain(&ids);
    }
}

/// Real points `z` of the chart: one polyline per boundary stratum.
fn boundary_strata(b: &mut Builder, n: usize) {
    let s = |i: usize| -LEG_CUTOFF + 2.0 * LEG_CUTOFF * i as f64 / (n.max(2) - 1) as f64;
    let strata: [fn(f64) -> f64; 3] = [
        |s| s.exp(),                    // z > 0: arguments (0, π)
        |s| -1.0 / (1.0 + (-s).exp()),  // −1 < z < 0: arguments (π, π)
        |s| -1.0 - s.exp(),             // z < −1: arguments (π, 0)
    ];
    for z in strata {
        let ids: Vec<_> = (0..n.max(2)).map(|i| b.push(chart_from_complex(z(s(i)), 0.0))).collect();
        b.chain(&ids);
    }
}

/// The seam curve `y = 2x + ln 2` of the first piece, the three pairwise
/// intersections of the pieces, and the three boundary strata.
fn seam_curves(n: usize) -> Builder {
    let mut b = Builder::default();
    let origin = [b.push(lift_amoeba(0.0, 0.0, false)), b.push(lift_amoeba(0.0, 0.0, true))];
    let half = b.push(chart_from_complex(-0.5, 0.0));
    let one = b.push(chart_from_complex(1.0, 0.0));
    let minus_two = b.push(chart_from_complex(-2.0, 0.0));

    let gamma1 = |s: f64| {
        let x = -LN_2 * (1.0 - s);
        (x, 2.0 * x + LN_2)
    };
    amoeba_curve(&mut b, n, gamma1, [half; 2], [one; 2]);
    amoeba_curve(&mut b, n, |s| (-LN_2 * (1.0 - s), -LN_2 * (1.0 - s)), [half; 2], origin);
    amoeba_curve(&mut b, n, |s| (LN_2 * s, 0.0), origin, [minus_two; 2]);
    amoeba_curve(&mut b, n, |s| (0.0, LN_2 * s), origin, [one; 2]);
    boundary_strata(&mut b, n);
    b
}

/// Points of the slice `y = 2x + c` (`c ≥ ln 2`) of the line on both
/// sheets, strictly between its two boundary abscissae.
pub fn sample_wc(c: f64, n: usize) -> Result<SampleSet> {
    require_n(n)?;
    let (x_plus, x_minus) = wc_boundary_x(c)?;
    let mut b = Builder::default();
    let lo = x_minus.max(-LEG_CUTOFF);
    amoeba_curve(&mut b, n, |s| {
        let x = lo + s * (x_plus - lo);
        (x, 2.0 * x + c)
    }, [None; 2], [None; 2]);
    Ok(b.finish(Strategy::SeamCurves, 0))
}
