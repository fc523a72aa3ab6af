//! Sweeps a small grid of network sizes and degrees in parallel and prints the summary table.
//!
//! `cargo run --release --example experiment_grid`

use holegraph::fdlayout::Algo;
use holegraph::pipeline::{run_experiment, summary_csv, Clock, GridSpec, PipelineConfig, StopCriteria};

fn main() -> anyhow::Result<()> {
    let grid = GridSpec::parse(&["n=60,90 d=6,8 kind=sparse".to_string()])?;
    let config = PipelineConfig { clock: Clock::Virtual { dt: 0.1 }, max_iterations: Some(200), ..PipelineConfig::default() };
    let stop = StopCriteria { t_max: 30.0, stable_iters: 10 };
    let rows = run_experiment(&grid, Algo::KkMsDs, &[1, 2], &stop, &config, None)?;
    print!("{}", summary_csv(&rows));
    Ok(())
}
