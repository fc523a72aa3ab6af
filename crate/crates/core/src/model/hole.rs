use std::collections::BTreeSet;
use std::fmt;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::model::{NodeId, Point};

/// Hole class by boundary-node count: 4, 5, 6, or 7 and above.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HoleCategory {
    Four,
    Five,
    Six,
    KNode,
}

impl HoleCategory {
    pub const ALL: [HoleCategory; 4] = [Self::Four, Self::Five, Self::Six, Self::KNode];

    /// Fewer than four boundary nodes is not a hole.
    pub fn from_boundary_count(count: usize) -> Result<Self> {
        match count {
            0..=3 => Err(Error::NotAHole(count)),
            4 => Ok(Self::Four),
            5 => Ok(Self::Five),
            6 => Ok(Self::Six),
            _ => Ok(Self::KNode),
        }
    }

    /// Class index used in training label files.
    pub fn index(self) -> u8 {
        match self {
            Self::Four => 0,
            Self::Five => 1,
            Self::Six => 2,
            Self::KNode => 3,
        }
    }

    pub fn from_index(i: u8) -> Option<Self> {
        Self::ALL.get(i as usize).copied()
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Four => "hole4",
            Self::Five => "hole5",
            Self::Six => "hole6",
            Self::KNode => "holek",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.label() == s)
    }

    /// Whether `count` boundary nodes fall in this class.
    pub fn admits(self, count: usize) -> bool {
        Self::from_boundary_count(count).is_ok_and(|c| c == self)
    }
}

impl fmt::Display for HoleCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Axis-aligned pixel rectangle, `x0..x1` by `y0..y1` (end-exclusive).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PixelRect {
    pub x0: u32,
    pub y0: u32,
    pub x1: u32,
    pub y1: u32,
}

impl PixelRect {
    pub fn width(&self) -> u32 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> u32 {
        self.y1 - self.y0
    }

    pub fn contains(&self, x: u32, y: u32) -> bool {
        x >= self.x0 && x < self.x1 && y >= self.y0 && y < self.y1
    }

    /// Grows each side by `pad` pixels, clamped to a `width x height` canvas.
    pub fn padded(&self, pad: u32, width: u32, height: u32) -> PixelRect {
        PixelRect {
            x0: self.x0.saturating_sub(pad),
            y0: self.y0.saturating_sub(pad),
            x1: (self.x1 + pad).min(width),
            y1: (self.y1 + pad).min(height),
        }
    }
}

/// An enclosed empty region surrounded by at least four sensors.
#[derive(Clone, Debug, PartialEq)]
pub struct Hole {
    boundary: BTreeSet<NodeId>,
    centroid: Option<Point>,
    area_px: u64,
    category: HoleCategory,
    bbox: Option<PixelRect>,
}

impl Hole {
    pub fn new(
        boundary: BTreeSet<NodeId>,
        centroid: Option<Point>,
        area_px: u64,
        bbox: Option<PixelRect>,
    ) -> Result<Self> {
        let category = HoleCategory::from_boundary_count(boundary.len())?;
        Ok(Hole {
            boundary,
            centroid,
            area_px,
            category,
            bbox,
        })
    }

    pub fn boundary(&self) -> &BTreeSet<NodeId> {
        &self.boundary
    }

    /// Area centroid in the pixel space the hole was derived in; absent for holes read from file.
    pub fn centroid(&self) -> Option<Point> {
        self.centroid
    }

    pub fn area_px(&self) -> u64 {
        self.area_px
    }

    pub fn category(&self) -> HoleCategory {
        self.category
    }

    pub fn bbox(&self) -> Option<PixelRect> {
        self.bbox
    }

    pub fn sorted_ids(&self) -> Vec<NodeId> {
        self.boundary.iter().copied().collect()
    }
}

/// A detector output in pixel space.
///
/// `(cx, cy)` is the predicted hole centroid; `w`, `h` are the region extents.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectionBox {
    pub category: HoleCategory,
    pub cx: f64,
    pub cy: f64,
    pub w: f64,
    pub h: f64,
    pub confidence: f64,
}

impl DetectionBox {
    /// Checks the centroid lies on the canvas, extents are positive and fit, confidence is in `[0, 1]`.
    pub fn validate(&self, width: u32, height: u32) -> std::result::Result<(), String> {
        let (w, h) = (width as f64, height as f64);
        if !(self.cx >= 0.0 && self.cx < w) {
            return Err(format!("cx {} outside raster width {width}", self.cx));
        }
        if !(self.cy >= 0.0 && self.cy < h) {
            return Err(format!("cy {} outside raster height {height}", self.cy));
        }
        if !(self.w > 0.0 && self.w <= w && self.h > 0.0 && self.h <= h) {
            return Err(format!(
                "box extents {}x{} invalid for raster {width}x{height}",
                self.w, self.h
            ));
        }
        if !(0.0..=1.0).contains(&self.confidence) {
            return Err(format!("confidence {} outside [0, 1]", self.confidence));
        }
        Ok(())
    }

    /// The centroid pixel the fill starts from.
    pub fn centroid_pixel(&self) -> (i64, i64) {
        (self.cx.round() as i64, self.cy.round() as i64)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DetectionRecord {
    category: String,
    cx: f64,
    cy: f64,
    w: f64,
    h: f64,
    conf: f64,
}

/// Parses line-delimited detection records. When `bounds` is given every box is checked against it.
pub fn parse_detections(text: &str, bounds: Option<(u32, u32)>) -> Result<Vec<DetectionBox>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let rec: DetectionRecord = serde_json::from_str(line)
            .map_err(|e| Error::parse(lineno, format!("bad record: {e}")))?;
        let category = HoleCategory::from_label(&rec.category).ok_or_else(|| {
            Error::parse(lineno, format!("unknown category '{}'", rec.category))
        })?;
        let b = DetectionBox {
            category,
            cx: rec.cx,
            cy: rec.cy,
            w: rec.w,
            h: rec.h,
            confidence: rec.conf,
        };
        if !(0.0..=1.0).contains(&b.confidence) {
            return Err(Error::parse(lineno, "confidence outside [0, 1]"));
        }
        if let Some((w, h)) = bounds {
            b.validate(w, h).map_err(|m| Error::parse(lineno, m))?;
        }
        out.push(b);
    }
    Ok(out)
}

pub fn write_detections(boxes: &[DetectionBox]) -> String {
    let mut out = String::new();
    for b in boxes {
        out.push_str(&format!(
            "{{\"category\":\"{}\",\"cx\":{:.6},\"cy\":{:.6},\"w\":{:.6},\"h\":{:.6},\"conf\":{:.6}}}\n",
            b.category.label(),
            b.cx,
            b.cy,
            b.w,
            b.h,
            b.confidence
        ));
    }
    out
}

/// Writes `.gt` / `.holes` lines: `category,area_px,id id id ...`.
pub fn write_holes(holes: &[Hole]) -> String {
    let mut out = String::new();
    for h in holes {
        let ids: Vec<String> = h.boundary.iter().map(|v| v.to_string()).collect();
        out.push_str(&format!(
            "{},{},{}\n",
            h.category.label(),
            h.area_px,
            ids.join(" ")
        ));
    }
    out
}

pub fn parse_holes(text: &str) -> Result<Vec<Hole>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.splitn(3, ',');
        let (Some(cat), Some(area), Some(ids)) = (fields.next(), fields.next(), fields.next())
        else {
            return Err(Error::parse(lineno, "expected 'category,area_px,ids'"));
        };
        let category = HoleCategory::from_label(cat.trim())
            .ok_or_else(|| Error::parse(lineno, format!("unknown category '{cat}'")))?;
        let area_px: u64 = area
            .trim()
            .parse()
            .map_err(|_| Error::parse(lineno, format!("bad area '{area}'")))?;
        let boundary = ids
            .split_whitespace()
            .map(|s| s.parse::<u32>().map(NodeId))
            .collect::<std::result::Result<BTreeSet<_>, _>>()
            .map_err(|_| Error::parse(lineno, "bad boundary id"))?;
        let hole = Hole::new(boundary, None, area_px, None)
            .map_err(|e| Error::parse(lineno, e.to_string()))?;
        if hole.category != category {
            return Err(Error::parse(
                lineno,
                format!(
                    "category {cat} inconsistent with {} boundary nodes",
                    hole.boundary.len()
                ),
            ));
        }
        out.push(hole);
    }
    Ok(out)
}

/// One sample of the sensitivity/specificity time series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalRecord {
    pub t: f64,
    pub iteration: u64,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
}
