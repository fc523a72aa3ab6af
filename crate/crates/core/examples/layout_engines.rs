//! Drives each force-directed engine step by step and tracks how well the drawing
//! preserves hop lengths.
//!
//! `cargo run --example layout_engines`

use holegraph::fdlayout::{Algo, EngineConfig, KkEngine, KkParams, KkPhase, LayoutEngine};
use holegraph::netgen::{generate, GenParams, NetKind};
use holegraph::{Layout, Topology};

/// Coefficient of variation of edge lengths; 0 means every edge has the same length.
fn edge_spread(t: &Topology, l: &Layout) -> f64 {
    let lens: Vec<f64> = t.edges().iter().map(|&(u, v)| l.position(u).distance(l.position(v))).collect();
    let mean = lens.iter().sum::<f64>() / lens.len() as f64;
    let var = lens.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / lens.len() as f64;
    var.sqrt() / mean
}

fn main() -> anyhow::Result<()> {
    let net = generate(&GenParams { n: 150, d: 7.0, kind: NetKind::Sparse, seed: 2 })?;
    let t = &net.topology;
    println!("ground truth spread {:.3}", edge_spread(t, &net.truth.coords));

    for algo in [Algo::Dh, Algo::Fa2, Algo::KkMsDs] {
        let mut engine = EngineConfig::default_for(algo)?.build(t, 7)?;
        let mut report = Vec::new();
        for step in 1..=200 {
            engine.iterate()?;
            if step % 50 == 0 {
                report.push(format!("{step}:{:.3}", edge_spread(t, engine.snapshot())));
            }
        }
        println!("{algo:>6} {}", report.join("  "));
    }

    // The KK engine also exposes its multi-stage progress.
    let mut kk = KkEngine::new(t, KkParams::default(), 7)?;
    while kk.phase() != KkPhase::Done {
        kk.iterate()?;
    }
    println!(
        "kkmsds finished after {} sweeps, tree covers {} nodes, stability ratio {:.4}",
        kk.iteration(),
        kk.working_tree_size(),
        kk.ratio()
    );
    Ok(())
}
