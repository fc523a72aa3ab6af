//! Training-set preparation for learned detectors: cut hole patches, redraw holes without
//! unrelated edges, and write normalized `category cx cy w h` label files.
//!
//! Holes are always emitted in ascending order of their smallest boundary id.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{Hole, HoleCategory, Layout, PixelRect, Topology};
use crate::raster::{render_reduced, Raster, RenderStyle, MIN_DIM};

/// Padding on each side as a fraction of the hole's bounding-box extent.
pub const PATCH_PADDING: f64 = 0.10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PrepMode {
    /// One cropped patch per hole.
    Segmented,
    /// One redraw per hole showing only its boundary nodes and their edges.
    Reduced,
    /// The full render with every hole labeled.
    Full,
}

impl FromStr for PrepMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "segmented" => Ok(PrepMode::Segmented),
            "reduced" => Ok(PrepMode::Reduced),
            "full" => Ok(PrepMode::Full),
            other => Err(Error::InvalidInput(format!("unknown prep mode '{other}'"))),
        }
    }
}

/// 4, 5, 6 keep their own class; 7 or more collapse into the k-node class.
pub fn classify_k_node(hole: &Hole) -> Result<HoleCategory> {
    HoleCategory::from_boundary_count(hole.boundary().len())
}

/// Box in image-relative coordinates, all in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormBox {
    pub cx: f64,
    pub cy: f64,
    pub w: f64,
    pub h: f64,
}

impl NormBox {
    /// Normalizes an end-exclusive pixel rectangle against a `width x height` image.
    pub fn from_rect(r: PixelRect, width: u32, height: u32) -> NormBox {
        let (w, h) = (width as f64, height as f64);
        NormBox {
            cx: (r.x0 + r.x1) as f64 / 2.0 / w,
            cy: (r.y0 + r.y1) as f64 / 2.0 / h,
            w: r.width() as f64 / w,
            h: r.height() as f64 / h,
        }
    }

    /// Pixel-space extent `(x0, y0, x1, y1)` as reals.
    pub fn denormalize(&self, width: u32, height: u32) -> (f64, f64, f64, f64) {
        let (w, h) = (width as f64, height as f64);
        (
            (self.cx - self.w / 2.0) * w,
            (self.cy - self.h / 2.0) * h,
            (self.cx + self.w / 2.0) * w,
            (self.cy + self.h / 2.0) * h,
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainingObject {
    pub category: HoleCategory,
    pub bbox: NormBox,
}

impl TrainingObject {
    pub fn label_line(&self) -> String {
        let b = &self.bbox;
        format!(
            "{} {:.6} {:.6} {:.6} {:.6}",
            self.category.index(),
            b.cx,
            b.cy,
            b.w,
            b.h
        )
    }
}

pub fn parse_labels(text: &str) -> Result<Vec<TrainingObject>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 5 {
            return Err(Error::parse(i + 1, format!("expected 5 fields, got {}", f.len())));
        }
        let category = f[0]
            .parse::<u8>()
            .ok()
            .and_then(HoleCategory::from_index)
            .ok_or_else(|| Error::parse(i + 1, format!("bad category '{}'", f[0])))?;
        let mut v = [0.0; 4];
        for (k, s) in f[1..].iter().enumerate() {
            v[k] = s
                .parse::<f64>()
                .ok()
                .filter(|x| (0.0..=1.0).contains(x))
                .ok_or_else(|| Error::parse(i + 1, format!("bad coordinate '{s}'")))?;
        }
        out.push(TrainingObject {
            category,
            bbox: NormBox { cx: v[0], cy: v[1], w: v[2], h: v[3] },
        });
    }
    Ok(out)
}

/// One image with its label file contents.
#[derive(Clone, Debug)]
pub struct TrainingImage {
    pub name: String,
    pub raster: Raster,
    pub objects: Vec<TrainingObject>,
}

impl TrainingImage {
    pub fn labels(&self) -> String {
        let mut s = String::new();
        for o in &self.objects {
            let _ = writeln!(s, "{}", o.label_line());
        }
        s
    }
}

fn hole_bbox(hole: &Hole) -> Result<PixelRect> {
    hole.bbox()
        .ok_or_else(|| Error::InvalidInput("hole has no pixel bounding box".into()))
}

/// Bounding box grown by 10% of its extent per side (at least one pixel), clamped to the
/// canvas, then widened to the minimum raster size where the canvas allows.
pub fn patch_rect(bbox: PixelRect, width: u32, height: u32) -> PixelRect {
    let pad = |extent: u32| ((extent as f64 * PATCH_PADDING).ceil() as u32).max(1);
    let (px, py) = (pad(bbox.width()), pad(bbox.height()));
    let mut r = PixelRect {
        x0: bbox.x0.saturating_sub(px),
        y0: bbox.y0.saturating_sub(py),
        x1: (bbox.x1 + px).min(width),
        y1: (bbox.y1 + py).min(height),
    };
    let grow = |lo: &mut u32, hi: &mut u32, limit: u32| {
        while *hi - *lo < MIN_DIM.min(limit) {
            if *lo > 0 {
                *lo -= 1;
            }
            if *hi - *lo < MIN_DIM.min(limit) && *hi < limit {
                *hi += 1;
            }
        }
    };
    grow(&mut r.x0, &mut r.x1, width);
    grow(&mut r.y0, &mut r.y1, height);
    r
}

/// One padded cutout per hole, in the order given.
pub fn segment_holes(raster: &Raster, holes: &[Hole]) -> Result<Vec<(PixelRect, Raster)>> {
    holes
        .iter()
        .map(|h| {
            let rect = patch_rect(hole_bbox(h)?, raster.width(), raster.height());
            Ok((rect, raster.crop(rect)?))
        })
        .collect()
}

fn ordered(holes: &[Hole]) -> Vec<&Hole> {
    let mut v: Vec<&Hole> = holes.iter().collect();
    v.sort_by_key(|h| h.sorted_ids());
    v
}

/// Inputs shared by every emission mode.
pub struct PrepInput<'a> {
    pub render: &'a Raster,
    pub holes: &'a [Hole],
    pub layout: &'a Layout,
    pub topology: &'a Topology,
    pub style: &'a RenderStyle,
}

/// Builds training images for `mode`. Image names are `{stem}` for the full render and
/// `{stem}_{k:03}` per hole otherwise.
pub fn emit_training_objects(input: &PrepInput<'_>, mode: PrepMode, stem: &str) -> Result<Vec<TrainingImage>> {
    let holes = ordered(input.holes);
    let (w, h) = (input.render.width(), input.render.height());
    match mode {
        PrepMode::Full => {
            let objects = holes
                .iter()
                .map(|hole| {
                    Ok(TrainingObject {
                        category: classify_k_node(hole)?,
                        bbox: NormBox::from_rect(hole_bbox(hole)?, w, h),
                    })
                })
                .collect::<Result<_>>()?;
            Ok(vec![TrainingImage {
                name: stem.to_string(),
                raster: input.render.clone(),
                objects,
            }])
        }
        PrepMode::Segmented => holes
            .iter()
            .enumerate()
            .map(|(k, hole)| {
                let bbox = hole_bbox(hole)?;
                let rect = patch_rect(bbox, w, h);
                let local = PixelRect {
                    x0: bbox.x0 - rect.x0,
                    y0: bbox.y0 - rect.y0,
                    x1: bbox.x1 - rect.x0,
                    y1: bbox.y1 - rect.y0,
                };
                Ok(TrainingImage {
                    name: format!("{stem}_{k:03}"),
                    raster: input.render.crop(rect)?,
                    objects: vec![TrainingObject {
                        category: classify_k_node(hole)?,
                        bbox: NormBox::from_rect(local, rect.width(), rect.height()),
                    }],
                })
            })
            .collect(),
        PrepMode::Reduced => holes
            .iter()
            .enumerate()
            .map(|(k, hole)| {
                let bbox = hole_bbox(hole)?;
                let red = render_reduced(input.layout, input.topology, hole, input.style)?;
                let (rw, rh) = (red.raster.width() as i64, red.raster.height() as i64);
                let clip = |v: u32, o: i64, lim: i64| (v as i64 - o).clamp(0, lim) as u32;
                let local = PixelRect {
                    x0: clip(bbox.x0, red.origin.0, rw),
                    y0: clip(bbox.y0, red.origin.1, rh),
                    x1: clip(bbox.x1, red.origin.0, rw),
                    y1: clip(bbox.y1, red.origin.1, rh),
                };
                Ok(TrainingImage {
                    name: format!("{stem}_{k:03}"),
                    objects: vec![TrainingObject {
                        category: classify_k_node(hole)?,
                        bbox: NormBox::from_rect(local, red.raster.width(), red.raster.height()),
                    }],
                    raster: red.raster,
                })
            })
            .collect(),
    }
}

/// Writes `{name}.png` and `{name}.txt` per image.
pub fn write_training_set(images: &[TrainingImage], dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    for img in images {
        img.raster.save_png(dir.join(format!("{}.png", img.name)))?;
        fs::write(dir.join(format!("{}.txt", img.name)), img.labels())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::NodeId;

    fn hole_with(ids: std::ops::Range<u32>, bbox: PixelRect) -> Hole {
        Hole::new(ids.map(NodeId).collect(), None, 1, Some(bbox)).unwrap()
    }

    #[test]
    fn k_node_table() {
        let r = PixelRect { x0: 0, y0: 0, x1: 1, y1: 1 };
        assert_eq!(classify_k_node(&hole_with(0..4, r)).unwrap(), HoleCategory::Four);
        assert_eq!(classify_k_node(&hole_with(0..6, r)).unwrap(), HoleCategory::Six);
        assert_eq!(classify_k_node(&hole_with(0..9, r)).unwrap(), HoleCategory::KNode);
    }

    #[test]
    fn normalization_example() {
        let b = NormBox::from_rect(PixelRect { x0: 256, y0: 256, x1: 512, y1: 512 }, 1024, 1024);
        assert_eq!((b.cx, b.cy, b.w, b.h), (0.375, 0.375, 0.25, 0.25));
        let o = TrainingObject { category: HoleCategory::Five, bbox: b };
        assert_eq!(o.label_line(), "1 0.375000 0.375000 0.250000 0.250000");
        assert_eq!(parse_labels(&o.label_line()).unwrap(), vec![o]);
    }

    #[test]
    fn corner_patch_is_clamped_and_contains_box() {
        let bbox = PixelRect { x0: 0, y0: 0, x1: 30, y1: 20 };
        let r = patch_rect(bbox, 100, 100);
        assert_eq!((r.x0, r.y0), (0, 0));
        assert_eq!((r.x1, r.y1), (33, 22));
        let tiny = patch_rect(PixelRect { x0: 50, y0: 50, x1: 52, y1: 52 }, 100, 100);
        assert!(tiny.width() >= MIN_DIM && tiny.height() >= MIN_DIM);
        assert!(tiny.x0 <= 50 && tiny.x1 >= 52);
    }

    #[test]
    fn bad_label_lines() {
        assert!(parse_labels("4 0.5 0.5 0.1 0.1").is_err());
        assert!(parse_labels("0 1.5 0.5 0.1 0.1").is_err());
        assert!(parse_labels("0 0.5 0.5").is_err());
        assert!(parse_labels("\n").unwrap().is_empty());
    }
}
