//! Domain types shared across the toolkit and their text file formats.
//!
//! | extension | content                                              |
//! |-----------|------------------------------------------------------|
//! | `.top`    | `n m` header, then `m` lines of `u v`                 |
//! | `.lay`    | one `id,x,y` line per node, six decimals              |
//! | `.det`    | one JSON record per line (external detections)        |
//! | `.boxes`  | same record shape as `.det`, written by the detector  |
//! | `.gt`     | `category,area_px,id id id ...` per ground-truth hole |
//! | `.holes`  | same shape as `.gt`, written by identification        |

mod hole;
mod layout;
mod topology;

pub use hole::{
    parse_detections, parse_holes, write_detections, write_holes, DetectionBox, EvalRecord, Hole,
    HoleCategory, PixelRect,
};
pub use layout::{Layout, Point};
pub use topology::{NodeId, Topology};
