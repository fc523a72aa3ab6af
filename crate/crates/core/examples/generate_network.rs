//! Generates sparse and uniform networks and reports what the generator calibrated.
//!
//! `cargo run --example generate_network -- [n] [avg_degree] [seed]`

use holegraph::netgen::{generate, GenParams, NetKind};

fn main() -> anyhow::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n = args.first().map(|s| s.parse()).transpose()?.unwrap_or(200);
    let d = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(7.0);
    let seed = args.get(2).map(|s| s.parse()).transpose()?.unwrap_or(1);

    for kind in [NetKind::Uniform, NetKind::Sparse] {
        let net = generate(&GenParams { n, d, kind, seed })?;
        println!(
            "{kind:>7}: {} edges, degree {:.2} (asked {d}), radius {:.4}, {} voids, {} holes",
            net.topology.edge_count(),
            net.topology.average_degree(),
            net.radius,
            net.voids.len(),
            net.truth.holes.len(),
        );
        for h in net.truth.holes.iter().take(3) {
            let ids: Vec<String> = h.sorted_ids().iter().map(|v| v.to_string()).collect();
            println!("         {:?} hole, {} px: {}", h.category(), h.area_px(), ids.join(" "));
        }
    }
    Ok(())
}
