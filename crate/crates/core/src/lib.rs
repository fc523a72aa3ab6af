//! Coverage-hole discovery in location-free wireless sensor networks.
//!
//! A network is only a connectivity graph. A force-directed engine draws it, the drawing is
//! rasterized, enclosed empty regions are detected in the raster, and the sensors on their
//! rims are reported as hole boundaries.

pub mod dataprep;
pub mod detect;
pub mod error;
pub mod fdlayout;
pub mod holeid;
pub mod model;
pub mod netgen;
pub mod pipeline;
pub mod raster;

pub use error::{Error, Result};
pub use model::{DetectionBox, EvalRecord, Hole, HoleCategory, Layout, NodeId, Point, Topology};
