//! Synthetic sensor networks with hidden coordinates and geometric ground truth.
//!
//! Two placement kinds are supported. `Uniform` samples the unit square uniformly. `Sparse` does
//! the same after carving 2 to 6 empty discs of radius 0.05 to 0.15 out of it. [`jittered_grid`]
//! is a third, more regular placement used by tests and examples.
//! Edges join every pair within a common radius, calibrated so the realized average degree is
//! within 0.5 of the target.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::detect::{analyze_regions, NegativeRegion, DEFAULT_MIN_AREA};
use crate::error::{Error, Result};
use crate::model::{Hole, Layout, Point, Topology};
use crate::raster::{make_transform, render_with, RenderStyle, ViewTransform};

pub const DEGREE_TOLERANCE: f64 = 0.5;
const MAX_SEARCH_STEPS: usize = 64;
const GRID_JITTER: f64 = 0.4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NetKind {
    Sparse,
    Uniform,
}

impl fmt::Display for NetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NetKind::Sparse => "sparse",
            NetKind::Uniform => "uniform",
        })
    }
}

impl FromStr for NetKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sparse" => Ok(NetKind::Sparse),
            "uniform" => Ok(NetKind::Uniform),
            other => Err(Error::InvalidInput(format!("unknown network kind '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenParams {
    pub n: usize,
    /// Target average degree.
    pub d: f64,
    pub kind: NetKind,
    pub seed: u64,
}

impl GenParams {
    pub fn validate(&self) -> Result<()> {
        if self.n < 4 {
            return Err(Error::InvalidInput(format!(
                "n = {} but a hole needs at least 4 nodes",
                self.n
            )));
        }
        if !(self.d >= 2.0) {
            return Err(Error::InvalidInput(format!("target degree {} below 2", self.d)));
        }
        Ok(())
    }
}

/// An empty disc carved out of a sparse deployment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Void {
    pub center: Point,
    pub radius: f64,
}

/// True coordinates and the holes and non-hole regions derived from them.
#[derive(Clone, Debug)]
pub struct GroundTruth {
    pub coords: Layout,
    pub holes: Vec<Hole>,
    pub negatives: Vec<NegativeRegion>,
    pub style: RenderStyle,
    pub transform: ViewTransform,
}

impl GroundTruth {
    /// Renders `coords` with `style` and classifies enclosed regions.
    pub fn from_coords(
        topology: &Topology,
        coords: Layout,
        style: &RenderStyle,
        min_area: u64,
    ) -> Result<Self> {
        let transform = make_transform(&coords, style);
        let raster = render_with(&coords, topology, style, &transform)?;
        let analysis = analyze_regions(&raster, &coords, &transform, style, min_area)?;
        Ok(GroundTruth {
            holes: analysis.holes.into_iter().map(|h| h.hole).collect(),
            negatives: analysis.negatives,
            coords,
            style: style.clone(),
            transform,
        })
    }
}

#[derive(Clone, Debug)]
pub struct Network {
    pub topology: Topology,
    pub truth: GroundTruth,
    pub radius: f64,
    pub voids: Vec<Void>,
}

/// Generates a network and its ground truth at the default reference canvas.
pub fn generate(params: &GenParams) -> Result<Network> {
    generate_with(params, &RenderStyle::default(), DEFAULT_MIN_AREA)
}

pub fn generate_with(params: &GenParams, style: &RenderStyle, min_area: u64) -> Result<Network> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let (coords, voids) = match params.kind {
        NetKind::Uniform => carved_uniform(params.n, 0, &mut rng)?,
        NetKind::Sparse => {
            let k = rng.gen_range(2..=6);
            carved_uniform(params.n, k, &mut rng)?
        }
    };
    let radius = calibrate_radius(&coords, params.d)
        .map_err(|e| Error::Generation(format!("{e}")))?;
    let topology = unit_disk_topology(&coords, radius)?;
    let truth = GroundTruth::from_coords(&topology, coords, style, min_area)?;
    Ok(Network {
        topology,
        truth,
        radius,
        voids,
    })
}

/// One point per cell of a `ceil(sqrt n)` grid over the unit square, jittered by up to 40% of a
/// cell; when the grid has spare cells, a random subset stays empty.
pub fn jittered_grid(n: usize, rng: &mut ChaCha8Rng) -> Layout {
    let g = (n as f64).sqrt().ceil() as usize;
    let mut cells: Vec<usize> = (0..g * g).collect();
    cells.shuffle(rng);
    cells.truncate(n);
    cells.sort_unstable();
    let step = 1.0 / g as f64;
    Layout::new(
        cells
            .into_iter()
            .map(|c| {
                let (cx, cy) = ((c % g) as f64, (c / g) as f64);
                let jx = rng.gen_range(-GRID_JITTER..GRID_JITTER);
                let jy = rng.gen_range(-GRID_JITTER..GRID_JITTER);
                Point::new((cx + 0.5 + jx) * step, (cy + 0.5 + jy) * step)
            })
            .collect(),
    )
}

fn carved_uniform(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Result<(Layout, Vec<Void>)> {
    let voids: Vec<Void> = (0..k)
        .map(|_| {
            let radius = rng.gen_range(0.05..=0.15);
            let center = Point::new(
                rng.gen_range(radius..1.0 - radius),
                rng.gen_range(radius..1.0 - radius),
            );
            Void { center, radius }
        })
        .collect();
    let mut seen = HashSet::new();
    let mut pts = Vec::with_capacity(n);
    let budget = 1000 * n + 10_000;
    for _ in 0..budget {
        if pts.len() == n {
            break;
        }
        let p = Point::new(rng.gen::<f64>(), rng.gen::<f64>());
        if voids.iter().any(|v| p.distance(v.center) < v.radius) {
            continue;
        }
        if seen.insert((p.x.to_bits(), p.y.to_bits())) {
            pts.push(p);
        }
    }
    if pts.len() < n {
        return Err(Error::Generation("could not place all nodes outside voids".into()));
    }
    Ok((Layout::new(pts), voids))
}

fn pair_distances(points: &[Point]) -> Vec<f64> {
    let n = points.len();
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            out.push(points[i].distance(points[j]));
        }
    }
    out
}

/// Connection radius whose realized average degree is within 0.5 of `d`.
///
/// Binary search over the sorted pairwise distances, so the returned radius is always one of
/// them and the realized degree is exact for `dist <= radius`.
pub fn calibrate_radius(points: &Layout, d: f64) -> Result<f64> {
    let pts = points.positions();
    let n = pts.len();
    if n < 2 {
        return Err(Error::Calibration("need at least 2 points".into()));
    }
    let mut dists = pair_distances(pts);
    if dists.contains(&0.0) {
        return Err(Error::Calibration("coincident points".into()));
    }
    dists.sort_by(f64::total_cmp);
    let degree_at = |r: f64| 2.0 * dists.partition_point(|&x| x <= r) as f64 / n as f64;

    let (mut lo, mut hi) = (0usize, dists.len() - 1);
    for _ in 0..MAX_SEARCH_STEPS {
        if lo > hi {
            break;
        }
        let mid = lo + (hi - lo) / 2;
        let r = dists[mid];
        let deg = degree_at(r);
        if (deg - d).abs() <= DEGREE_TOLERANCE {
            return Ok(r);
        }
        if deg < d {
            lo = mid + 1;
        } else if mid == 0 {
            break;
        } else {
            hi = mid - 1;
        }
    }
    Err(Error::Calibration(format!(
        "average degree {d} unreachable within ±{DEGREE_TOLERANCE} for {n} points"
    )))
}

/// All pairs at distance `<= radius`.
pub fn unit_disk_topology(points: &Layout, radius: f64) -> Result<Topology> {
    let pts = points.positions();
    let mut edges = Vec::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if pts[i].distance(pts[j]) <= radius {
                edges.push((i as u32, j as u32));
            }
        }
    }
    Topology::new(pts.len(), edges)
}

/// Ground-truth holes of `coords` at the default reference canvas.
pub fn ground_truth_holes(topology: &Topology, coords: &Layout) -> Result<Vec<Hole>> {
    Ok(GroundTruth::from_coords(topology, coords.clone(), &RenderStyle::default(), DEFAULT_MIN_AREA)?.holes)
}
