//! The full loop: layout, render, detect, identify and evaluate until the boundary sets
//! settle, then export the time series.
//!
//! `cargo run --release --example run_pipeline -- [dh|fa2|kkmsds] [out_dir]`

use std::path::PathBuf;

use holegraph::detect::ReferenceDetector;
use holegraph::fdlayout::{Algo, EngineConfig};
use holegraph::netgen::{generate, GenParams, NetKind};
use holegraph::pipeline::{run_pipeline, write_timeseries, Clock, PipelineConfig, StopCriteria};

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let algo: Algo = args.next().as_deref().unwrap_or("kkmsds").parse()?;
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("holegraph-run"));

    let net = generate(&GenParams { n: 120, d: 8.0, kind: NetKind::Sparse, seed: 3 })?;
    let mut engine = EngineConfig::default_for(algo)?.build(&net.topology, 1)?;
    let config = PipelineConfig {
        style: Default::default(),
        detect_every: 2,
        clock: Clock::Virtual { dt: 0.1 },
        max_iterations: Some(300),
        ..PipelineConfig::default()
    };
    let mut detector = ReferenceDetector::new(config.style.clone());
    let stop = StopCriteria { t_max: 60.0, stable_iters: 10 };

    let outcome = run_pipeline(&net.topology, engine.as_mut(), &mut detector, &stop, Some(&net.truth), &config)?;
    let c = outcome.final_confusion().expect("ground truth was supplied");
    println!(
        "{algo}: stopped ({}) at pass {}, reporting pass {} with {} holes",
        outcome.stop,
        outcome.last_iteration,
        outcome.final_iteration,
        outcome.holes.len()
    );
    println!("sensitivity {:?}, specificity {:?}", c.sensitivity(), c.specificity());

    write_timeseries(&outcome.log.eval_records(), &out, "timeseries")?;
    println!("time series in {}", out.display());
    Ok(())
}
