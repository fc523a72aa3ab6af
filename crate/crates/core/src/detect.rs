//! Hole detectors: a deterministic raster reference detector and an importer for boxes produced
//! by an external model. Both satisfy [`HoleDetector`].

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::holeid::{boundary_nodes, label_components, trace_outer, Labels, NodeIndex};
use crate::model::{parse_detections, DetectionBox, Hole, Layout, NodeId, Point};
use crate::raster::{Raster, RenderStyle, ViewTransform};

/// Minimum region area in pixels for a hole at the reference canvas.
pub const DEFAULT_MIN_AREA: u64 = 25;
/// Default confidence cut for imported detections.
pub const DEFAULT_CONFIDENCE: f64 = 0.25;

/// Anything that turns a rendered layout into detection boxes.
pub trait HoleDetector: Send {
    fn detect(
        &mut self,
        raster: &Raster,
        layout: &Layout,
        transform: &ViewTransform,
    ) -> Result<Vec<DetectionBox>>;
}

/// A hole found by region analysis with the background pixel used as its fill seed.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionHole {
    pub hole: Hole,
    pub seed: (u32, u32),
}

/// An enclosed background region that is not a hole: fewer than four boundary nodes, or
/// smaller than the area threshold.
#[derive(Clone, Debug, PartialEq)]
pub struct NegativeRegion {
    pub seed: (u32, u32),
    pub area_px: u64,
    pub boundary: BTreeSet<NodeId>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RegionAnalysis {
    pub holes: Vec<RegionHole>,
    pub negatives: Vec<NegativeRegion>,
}

/// Classifies every maximal 4-connected background region not touching the canvas border.
///
/// Regions are visited in row-major order of their topmost-leftmost pixel.
pub fn analyze_regions(
    raster: &Raster,
    layout: &Layout,
    transform: &ViewTransform,
    style: &RenderStyle,
    min_area: u64,
) -> Result<RegionAnalysis> {
    let px = raster.pixels();
    let bg = style.background;
    let labels = label_components(raster.width(), raster.height(), |i| px[i] == bg);
    let index = NodeIndex::new(layout, transform, raster.width(), raster.height());
    let tol = style.boundary_tolerance();

    let mut out = RegionAnalysis::default();
    for (k, comp) in labels.components.iter().enumerate() {
        if comp.touches_border {
            continue;
        }
        let contour = trace_outer(&labels, k);
        let boundary = boundary_nodes(&contour, &index, tol);
        let seed = seed_pixel(&labels, k);
        if comp.area >= min_area && boundary.len() >= 4 {
            let hole = Hole::new(
                boundary,
                Some(comp.area_centroid()),
                comp.area,
                Some(comp.bbox),
            )?;
            out.holes.push(RegionHole { hole, seed });
        } else {
            out.negatives.push(NegativeRegion {
                seed,
                area_px: comp.area,
                boundary,
            });
        }
    }
    Ok(out)
}

/// The area-centroid pixel when it belongs to the region, else the nearest region pixel.
fn seed_pixel(labels: &Labels, k: usize) -> (u32, u32) {
    let c = labels.components[k].area_centroid();
    let (rx, ry) = (c.x.round() as i64, c.y.round() as i64);
    if labels.at(rx, ry) == k as u32 + 1 {
        return (rx as u32, ry as u32);
    }
    let mut best = labels.components[k].first;
    let mut best_d = f64::INFINITY;
    for (x, y) in labels.pixels_of(k) {
        let d = Point::new(x as f64, y as f64).distance(c);
        if d < best_d {
            best_d = d;
            best = (x, y);
        }
    }
    best
}

fn to_box(rh: &RegionHole) -> DetectionBox {
    let bbox = rh.hole.bbox().expect("region holes carry a bbox");
    DetectionBox {
        category: rh.hole.category(),
        cx: rh.seed.0 as f64,
        cy: rh.seed.1 as f64,
        w: bbox.width() as f64,
        h: bbox.height() as f64,
        confidence: 1.0,
    }
}

/// Reference detection: one box per enclosed background region of at least `min_area` pixels
/// with at least four boundary nodes. Confidence is always 1.
pub fn detect_reference(
    raster: &Raster,
    layout: &Layout,
    transform: &ViewTransform,
    style: &RenderStyle,
    min_area: u64,
) -> Result<Vec<DetectionBox>> {
    let analysis = analyze_regions(raster, layout, transform, style, min_area)?;
    Ok(analysis.holes.iter().map(to_box).collect())
}

/// Parses an external `.det` file, validates against the raster size and drops boxes below
/// `threshold` confidence.
pub fn load_external(text: &str, raster_dims: (u32, u32), threshold: f64) -> Result<Vec<DetectionBox>> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::InvalidInput(format!(
            "confidence threshold {threshold} outside [0, 1]"
        )));
    }
    Ok(parse_detections(text, Some(raster_dims))?
        .into_iter()
        .filter(|b| b.confidence >= threshold)
        .collect())
}

#[derive(Clone, Debug)]
pub struct ReferenceDetector {
    pub style: RenderStyle,
    pub min_area: u64,
}

impl ReferenceDetector {
    pub fn new(style: RenderStyle) -> Self {
        ReferenceDetector {
            style,
            min_area: DEFAULT_MIN_AREA,
        }
    }
}

impl HoleDetector for ReferenceDetector {
    fn detect(
        &mut self,
        raster: &Raster,
        layout: &Layout,
        transform: &ViewTransform,
    ) -> Result<Vec<DetectionBox>> {
        detect_reference(raster, layout, transform, &self.style, self.min_area)
    }
}

/// Replays a fixed set of imported boxes on every call.
#[derive(Clone, Debug)]
pub struct ExternalDetector {
    boxes: Vec<DetectionBox>,
}

impl ExternalDetector {
    pub fn new(boxes: Vec<DetectionBox>) -> Self {
        ExternalDetector { boxes }
    }
}

impl HoleDetector for ExternalDetector {
    fn detect(
        &mut self,
        raster: &Raster,
        _layout: &Layout,
        _transform: &ViewTransform,
    ) -> Result<Vec<DetectionBox>> {
        for b in &self.boxes {
            b.validate(raster.width(), raster.height())
                .map_err(Error::Detector)?;
        }
        Ok(self.boxes.clone())
    }
}
