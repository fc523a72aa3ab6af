//! Renders a layout, runs the reference detector and writes the image plus detections.
//!
//! `cargo run --example render_and_detect -- [out_dir]`

use std::path::PathBuf;

use holegraph::detect::{detect_reference, DEFAULT_MIN_AREA};
use holegraph::model::write_detections;
use holegraph::netgen::{generate, GenParams, NetKind};
use holegraph::raster::{make_transform, render_with, RenderStyle};

fn main() -> anyhow::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("holegraph-detect"));
    std::fs::create_dir_all(&out)?;

    let net = generate(&GenParams { n: 200, d: 7.0, kind: NetKind::Sparse, seed: 5 })?;
    let style = RenderStyle::default();
    let layout = &net.truth.coords;
    let transform = make_transform(layout, &style);
    let image = render_with(layout, &net.topology, &style, &transform)?;
    let boxes = detect_reference(&image, layout, &transform, &style, DEFAULT_MIN_AREA)?;

    image.save_png(out.join("net.png"))?;
    std::fs::write(out.join("net.det"), write_detections(&boxes))?;
    for b in &boxes {
        println!("{:?} at ({:.0}, {:.0}) size {:.0}x{:.0}", b.category, b.cx, b.cy, b.w, b.h);
    }
    println!("{} detections, {} ground-truth holes -> {}", boxes.len(), net.truth.holes.len(), out.display());
    Ok(())
}
