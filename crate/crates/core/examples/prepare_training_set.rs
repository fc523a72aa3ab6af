//! Builds detector training data in all three modes: segmented patches, reduced redraws and
//! full renders.
//!
//! `cargo run --example prepare_training_set -- [out_dir]`

use std::path::PathBuf;

use holegraph::dataprep::{emit_training_objects, write_training_set, PrepInput, PrepMode};
use holegraph::netgen::{generate, GenParams, NetKind};
use holegraph::raster::{make_transform, render_with, RenderStyle};

fn main() -> anyhow::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("holegraph-train"));
    let style = RenderStyle::default();

    for seed in 0..3 {
        let net = generate(&GenParams { n: 200, d: 6.5, kind: NetKind::Sparse, seed })?;
        let layout = &net.truth.coords;
        let image = render_with(layout, &net.topology, &style, &make_transform(layout, &style))?;
        let input = PrepInput { render: &image, holes: &net.truth.holes, layout, topology: &net.topology, style: &style };
        for mode in [PrepMode::Segmented, PrepMode::Reduced, PrepMode::Full] {
            let images = emit_training_objects(&input, mode, &format!("s{seed}"))?;
            let dir = out.join(format!("{mode:?}").to_lowercase());
            write_training_set(&images, &dir)?;
            let objects: usize = images.iter().map(|i| i.objects.len()).sum();
            println!("seed {seed} {mode:?}: {} images, {objects} labels", images.len());
        }
    }
    println!("written to {}", out.display());
    Ok(())
}
