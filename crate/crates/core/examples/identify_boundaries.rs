//! Flood-fills detected holes, recovers their boundary sensors and scores them against
//! ground truth.
//!
//! `cargo run --example identify_boundaries`

use holegraph::detect::{detect_reference, DEFAULT_MIN_AREA};
use holegraph::holeid::identify_holes;
use holegraph::netgen::{generate, GenParams, NetKind};
use holegraph::pipeline::{evaluate, match_holes, DEFAULT_JACCARD};
use holegraph::raster::{make_transform, render_with, RenderStyle};

fn main() -> anyhow::Result<()> {
    let net = generate(&GenParams { n: 250, d: 6.0, kind: NetKind::Sparse, seed: 9 })?;
    let style = RenderStyle::default();
    let layout = &net.truth.coords;
    let tr = make_transform(layout, &style);
    let image = render_with(layout, &net.topology, &style, &tr)?;
    let boxes = detect_reference(&image, layout, &tr, &style, DEFAULT_MIN_AREA)?;
    let found = identify_holes(&image, &boxes, layout, &tr, &style)?;

    let matching = match_holes(&found.holes, &net.truth.holes, DEFAULT_JACCARD)?;
    for m in &matching.pairs {
        let h = &found.holes[m.detected];
        println!("hole with {} boundary sensors matches truth #{} (jaccard {:.2})", h.boundary().len(), m.truth, m.jaccard);
    }
    let c = evaluate(&found.holes, &net.truth, DEFAULT_JACCARD)?;
    println!("tp {} fn {} fp {} tn {}", c.tp, c.fn_, c.fp, c.tn);
    println!("sensitivity {:?} specificity {:?}", c.sensitivity(), c.specificity());
    Ok(())
}
