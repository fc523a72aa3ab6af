//! Post-detection identification: flood-fill detected hole regions from their centroids, trace
//! the filled regions' outer contours, and collect the sensors lying on each contour.

mod components;
mod contour;
mod polygon;

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::model::{DetectionBox, Hole, Layout, NodeId, Point};
use crate::raster::{Raster, RenderStyle, Rgb, ViewTransform};

pub use components::{label_components, ComponentStats, Labels};
pub use contour::{trace_outer, Contour};
pub use polygon::{distance_to_polyline, even_odd_inside, point_polygon_test};

/// Result of one seeded fill.
#[derive(Clone, Debug)]
pub struct FillOutcome {
    pub raster: Raster,
    /// False when the seed pixel was not background, in which case the raster is unchanged.
    pub filled: bool,
    pub pixels_filled: u64,
}

/// Fills the 4-connected background region containing `seed` with the style's fill color.
pub fn hole_identify(raster: &Raster, seed: (i64, i64), style: &RenderStyle) -> Result<FillOutcome> {
    let mut out = raster.clone();
    let n = fill_in_place(&mut out, seed, style.background, style.fill_color)?;
    Ok(FillOutcome {
        raster: out,
        filled: n > 0,
        pixels_filled: n,
    })
}

/// Queue-based 4-neighbor fill replacing `target` with `fill`. Returns the number of pixels
/// changed; zero when the seed is not `target`.
pub fn fill_in_place(raster: &mut Raster, seed: (i64, i64), target: Rgb, fill: Rgb) -> Result<u64> {
    if !raster.in_bounds(seed.0, seed.1) {
        return Err(Error::OutOfBounds {
            x: seed.0,
            y: seed.1,
            width: raster.width(),
            height: raster.height(),
        });
    }
    let (sx, sy) = (seed.0 as u32, seed.1 as u32);
    if raster.get(sx, sy) != target || target == fill {
        return Ok(0);
    }
    let (w, h) = (raster.width(), raster.height());
    let mut queue = VecDeque::new();
    raster.set(sx, sy, fill);
    queue.push_back((sx, sy));
    let mut count = 1u64;
    while let Some((x, y)) = queue.pop_front() {
        let neighbors = [
            (y > 0).then(|| (x, y.wrapping_sub(1))),
            (y + 1 < h).then_some((x, y + 1)),
            (x + 1 < w).then_some((x + 1, y)),
            (x > 0).then(|| (x.wrapping_sub(1), y)),
        ];
        for (nx, ny) in neighbors.into_iter().flatten() {
            if raster.get(nx, ny) == target {
                raster.set(nx, ny, fill);
                count += 1;
                queue.push_back((nx, ny));
            }
        }
    }
    Ok(count)
}

/// A filled region with its outer contour.
#[derive(Clone, Debug)]
pub struct FillRegion {
    pub contour: Contour,
    pub stats: ComponentStats,
}

/// Labels `fill`-colored 4-components and traces each outer contour, in row-major start order.
pub fn fill_regions(filled: &Raster, fill: Rgb) -> Vec<FillRegion> {
    let px = filled.pixels();
    let labels = label_components(filled.width(), filled.height(), |i| px[i] == fill);
    (0..labels.components.len())
        .map(|k| FillRegion {
            contour: trace_outer(&labels, k),
            stats: labels.components[k].clone(),
        })
        .collect()
}

/// One contour per maximal 4-connected `fill`-colored region.
pub fn find_contours(filled: &Raster, fill: Rgb) -> Vec<Contour> {
    fill_regions(filled, fill)
        .into_iter()
        .map(|r| r.contour)
        .collect()
}

/// Bucket grid over node pixel positions for range queries.
#[derive(Clone, Debug)]
pub struct NodeIndex {
    cell: i64,
    cols: i64,
    rows: i64,
    buckets: Vec<Vec<NodeId>>,
    pixels: Vec<(i64, i64)>,
}

impl NodeIndex {
    const CELL: i64 = 32;

    pub fn new(layout: &Layout, transform: &ViewTransform, width: u32, height: u32) -> Self {
        let cell = Self::CELL;
        let cols = (width as i64 + cell - 1) / cell;
        let rows = (height as i64 + cell - 1) / cell;
        let pixels = transform.node_pixels(layout);
        let mut buckets = vec![Vec::new(); (cols * rows) as usize];
        for (i, &(x, y)) in pixels.iter().enumerate() {
            let cx = (x / cell).clamp(0, cols - 1);
            let cy = (y / cell).clamp(0, rows - 1);
            buckets[(cy * cols + cx) as usize].push(NodeId(i as u32));
        }
        NodeIndex {
            cell,
            cols,
            rows,
            buckets,
            pixels,
        }
    }

    pub fn pixel(&self, v: NodeId) -> (i64, i64) {
        self.pixels[v.index()]
    }

    /// Candidate nodes whose pixel lies in `[x0, x1] x [y0, y1]` (superset, unsorted).
    pub fn candidates(&self, x0: i64, y0: i64, x1: i64, y1: i64) -> impl Iterator<Item = NodeId> + '_ {
        let c = |v: i64, hi: i64| (v.div_euclid(self.cell)).clamp(0, hi - 1);
        let (cx0, cx1) = (c(x0, self.cols), c(x1, self.cols));
        let (cy0, cy1) = (c(y0, self.rows), c(y1, self.rows));
        (cy0..=cy1)
            .flat_map(move |cy| (cx0..=cx1).map(move |cx| (cy * self.cols + cx) as usize))
            .flat_map(move |b| self.buckets[b].iter().copied())
    }
}

/// Nodes whose pixel position passes [`point_polygon_test`] against `contour`.
pub fn boundary_nodes(contour: &Contour, index: &NodeIndex, tolerance: f64) -> BTreeSet<NodeId> {
    let Some(bb) = contour.bbox() else {
        return BTreeSet::new();
    };
    let pad = tolerance.ceil() as i64 + 1;
    index
        .candidates(
            bb.x0 as i64 - pad,
            bb.y0 as i64 - pad,
            bb.x1 as i64 + pad,
            bb.y1 as i64 + pad,
        )
        .filter(|&v| {
            let (x, y) = index.pixel(v);
            point_polygon_test(Point::new(x as f64, y as f64), contour, tolerance)
        })
        .collect()
}

/// Per contour of the filled raster, the ids of nodes on or inside it, in contour order.
pub fn sensor_identify(
    filled: &Raster,
    layout: &Layout,
    transform: &ViewTransform,
    style: &RenderStyle,
) -> Vec<BTreeSet<NodeId>> {
    let index = NodeIndex::new(layout, transform, filled.width(), filled.height());
    let tol = style.boundary_tolerance();
    find_contours(filled, style.fill_color)
        .iter()
        .map(|c| boundary_nodes(c, &index, tol))
        .collect()
}

/// Fills every detection, then recovers boundary nodes per filled region.
#[derive(Clone, Debug)]
pub struct Identified {
    /// Regions with at least four boundary nodes, in contour order.
    pub holes: Vec<Hole>,
    /// Boundary sets of filled regions with fewer than four nodes.
    pub discarded: Vec<BTreeSet<NodeId>>,
    /// Detections whose centroid was not on background.
    pub skipped: usize,
    pub filled: Raster,
}

pub fn identify_holes(
    raster: &Raster,
    boxes: &[DetectionBox],
    layout: &Layout,
    transform: &ViewTransform,
    style: &RenderStyle,
) -> Result<Identified> {
    let mut filled = raster.clone();
    let mut skipped = 0;
    for b in boxes {
        let n = fill_in_place(&mut filled, b.centroid_pixel(), style.background, style.fill_color)?;
        if n == 0 && filled.get(b.centroid_pixel().0 as u32, b.centroid_pixel().1 as u32) != style.fill_color {
            skipped += 1;
        }
    }
    let index = NodeIndex::new(layout, transform, filled.width(), filled.height());
    let tol = style.boundary_tolerance();
    let mut holes = Vec::new();
    let mut discarded = Vec::new();
    for region in fill_regions(&filled, style.fill_color) {
        let ids = boundary_nodes(&region.contour, &index, tol);
        if ids.len() >= 4 {
            holes.push(Hole::new(
                ids,
                Some(region.stats.area_centroid()),
                region.stats.area,
                Some(region.stats.bbox),
            )?);
        } else {
            discarded.push(ids);
        }
    }
    Ok(Identified {
        holes,
        discarded,
        skipped,
        filled,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Point, Topology};
    use crate::raster::{make_transform, render};

    fn style64() -> RenderStyle {
        RenderStyle::default().with_canvas(64, 64)
    }

    #[test]
    fn all_background_fills_everything() {
        let r = Raster::new(32, 20, Rgb::WHITE).unwrap();
        let out = hole_identify(&r, (5, 5), &RenderStyle::default()).unwrap();
        assert!(out.filled);
        assert_eq!(out.raster.count(Rgb::GREEN), 32 * 20);
    }

    #[test]
    fn seed_on_ink_is_a_no_op() {
        let mut r = Raster::new(32, 32, Rgb::WHITE).unwrap();
        r.set(5, 5, Rgb::BLACK);
        let out = hole_identify(&r, (5, 5), &RenderStyle::default()).unwrap();
        assert!(!out.filled);
        assert_eq!(out.raster, r);
    }

    #[test]
    fn seed_out_of_bounds_errors() {
        let r = Raster::new(32, 32, Rgb::WHITE).unwrap();
        assert!(matches!(
            hole_identify(&r, (32, 0), &RenderStyle::default()),
            Err(Error::OutOfBounds { .. })
        ));
        assert!(hole_identify(&r, (-1, 3), &RenderStyle::default()).is_err());
    }

    #[test]
    fn fill_is_idempotent() {
        let l = Layout::new(vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ]);
        let s = style64();
        let r = render(&l, &Topology::cycle(4), &s).unwrap();
        let once = hole_identify(&r, (32, 32), &s).unwrap();
        let twice = hole_identify(&once.raster, (32, 32), &s).unwrap();
        assert!(once.filled && !twice.filled);
        assert_eq!(once.raster, twice.raster);
    }

    #[test]
    fn no_fill_pixels_no_contours() {
        let r = Raster::new(32, 32, Rgb::WHITE).unwrap();
        assert!(find_contours(&r, Rgb::GREEN).is_empty());
    }

    #[test]
    fn ten_by_ten_square_has_36_contour_pixels() {
        let mut r = Raster::new(32, 32, Rgb::WHITE).unwrap();
        for y in 5..15 {
            for x in 7..17 {
                r.set(x, y, Rgb::GREEN);
            }
        }
        let cs = find_contours(&r, Rgb::GREEN);
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].len(), 36);
        assert_eq!(cs[0].points()[0], (7, 5));
        assert_eq!(cs[0].points()[1], (8, 5), "clockwise start heads east");
        assert!(cs[0].signed_area2() > 0);
        let uniq: BTreeSet<_> = cs[0].points().iter().collect();
        assert_eq!(uniq.len(), 36);
    }

    #[test]
    fn two_regions_ordered_row_major() {
        let mut r = Raster::new(32, 32, Rgb::WHITE).unwrap();
        for (x0, y0) in [(20u32, 2u32), (2, 10)] {
            for y in y0..y0 + 4 {
                for x in x0..x0 + 4 {
                    r.set(x, y, Rgb::GREEN);
                }
            }
        }
        let cs = find_contours(&r, Rgb::GREEN);
        assert_eq!(cs.len(), 2);
        assert_eq!(cs[0].points()[0], (20, 2));
        assert_eq!(cs[1].points()[0], (2, 10));
    }

    #[test]
    fn thin_and_tiny_regions_trace() {
        let mut r = Raster::new(16, 16, Rgb::WHITE).unwrap();
        r.set(3, 3, Rgb::GREEN);
        r.set(8, 8, Rgb::GREEN);
        r.set(9, 8, Rgb::GREEN);
        let cs = find_contours(&r, Rgb::GREEN);
        assert_eq!(cs[0].points(), &[(3, 3)]);
        assert_eq!(cs[1].points(), &[(8, 8), (9, 8)]);
    }

    #[test]
    fn square_hole_identifies_corner_nodes() {
        let l = Layout::new(vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ]);
        let s = RenderStyle::default();
        let t = make_transform(&l, &s);
        let r = render(&l, &Topology::cycle(4), &s).unwrap();
        let filled = hole_identify(&r, (512, 512), &s).unwrap().raster;
        let sets = sensor_identify(&filled, &l, &t, &s);
        assert_eq!(sets, vec![(0..4).map(NodeId).collect::<BTreeSet<_>>()]);
    }

    #[test]
    fn no_fill_regions_no_sets() {
        let l = Layout::new(vec![Point::new(0.0, 0.0), Point::new(1.0, 1.0)]);
        let s = RenderStyle::default();
        let t = make_transform(&l, &s);
        let r = render(&l, &Topology::empty(2), &s).unwrap();
        assert!(sensor_identify(&r, &l, &t, &s).is_empty());
    }

    #[test]
    fn convex_pentagon_excludes_distant_node() {
        // Ring 0..5 on a circle, node 5 far away and unconnected.
        let mut pts: Vec<Point> = (0..5)
            .map(|i| {
                let a = std::f64::consts::TAU * i as f64 / 5.0;
                Point::new(a.cos(), a.sin())
            })
            .collect();
        pts.push(Point::new(4.0, 4.0));
        let l = Layout::new(pts);
        let topo = Topology::new(6, (0..5).map(|i| (i, (i + 1) % 5))).unwrap();
        let s = RenderStyle::default();
        let t = make_transform(&l, &s);
        let r = render(&l, &topo, &s).unwrap();
        let seed = t.to_pixel(Point::new(0.0, 0.0));
        let filled = hole_identify(&r, seed, &s).unwrap();
        assert!(filled.filled);
        let sets = sensor_identify(&filled.raster, &l, &t, &s);
        assert_eq!(sets.len(), 1);
        assert_eq!(sets[0], (0..5).map(NodeId).collect::<BTreeSet<_>>());
    }
}
