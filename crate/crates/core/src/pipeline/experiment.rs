//! Grid of independent pipeline runs over network size, degree, kind and seed.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use super::{run_pipeline, write_timeseries, PipelineConfig, StopCriteria, StopReason};
use crate::detect::ReferenceDetector;
use crate::error::{Error, Result};
use crate::fdlayout::{Algo, EngineConfig};
use crate::netgen::{generate_with, GenParams, NetKind};

#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub ns: Vec<usize>,
    pub ds: Vec<f64>,
    pub kinds: Vec<NetKind>,
}

impl GridSpec {
    /// Parses terms like `n=100,200 d=6,8 kind=sparse`; terms may also be separated by `;`.
    pub fn parse(terms: &[String]) -> Result<Self> {
        let mut grid = GridSpec {
            ns: Vec::new(),
            ds: Vec::new(),
            kinds: vec![NetKind::Sparse, NetKind::Uniform],
        };
        let bad = |t: &str| Error::InvalidInput(format!("bad grid term '{t}'"));
        for term in terms.iter().flat_map(|t| t.split([';', ' '])).filter(|t| !t.is_empty()) {
            let (key, vals) = term.split_once('=').ok_or_else(|| bad(term))?;
            let vals = vals.split(',').filter(|v| !v.is_empty());
            match key {
                "n" => grid.ns = vals.map(|v| v.parse().map_err(|_| bad(term))).collect::<Result<_>>()?,
                "d" => grid.ds = vals.map(|v| v.parse().map_err(|_| bad(term))).collect::<Result<_>>()?,
                "kind" => grid.kinds = vals.map(str::parse).collect::<Result<_>>()?,
                _ => return Err(bad(term)),
            }
        }
        if grid.ns.is_empty() || grid.ds.is_empty() || grid.kinds.is_empty() {
            return Err(Error::InvalidInput("grid needs n=... and d=...".into()));
        }
        Ok(grid)
    }

    pub fn cells(&self, seeds: &[u64]) -> Vec<GenParams> {
        let mut out = Vec::new();
        for &kind in &self.kinds {
            for &n in &self.ns {
                for &d in &self.ds {
                    for &seed in seeds {
                        out.push(GenParams { n, d, kind, seed });
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRow {
    pub params: GenParams,
    pub realized_degree: f64,
    pub truth_holes: usize,
    pub final_iteration: u64,
    pub last_iteration: u64,
    pub stop: StopReason,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
    pub first_pass_secs: f64,
}

/// Runs every grid cell as an independent pipeline, concurrently. Rows come back in grid order.
/// With `out_dir`, each run's time series is written under `{kind}_n{n}_d{d}_s{seed}`.
pub fn run_experiment(
    grid: &GridSpec,
    algo: Algo,
    seeds: &[u64],
    stop: &StopCriteria,
    config: &PipelineConfig,
    out_dir: Option<&Path>,
) -> Result<Vec<ExperimentRow>> {
    grid.cells(seeds)
        .par_iter()
        .map(|p| {
            let net = generate_with(p, &config.style, crate::detect::DEFAULT_MIN_AREA)?;
            let engine_cfg = match algo {
                Algo::Identity => EngineConfig::Identity(net.truth.coords.clone()),
                other => EngineConfig::default_for(other)?,
            };
            let mut engine = engine_cfg.build(&net.topology, p.seed)?;
            let mut detector = ReferenceDetector::new(config.style.clone());
            let out = run_pipeline(&net.topology, engine.as_mut(), &mut detector, stop, Some(&net.truth), config)
                .map_err(|a| a.error)?;
            if let Some(dir) = out_dir {
                let name = format!("{}_n{}_d{}_s{}", p.kind, p.n, p.d, p.seed);
                write_timeseries(&out.log.eval_records(), &dir.join(name), "timeseries")?;
            }
            let c = out.final_confusion();
            Ok(ExperimentRow {
                params: *p,
                realized_degree: net.topology.average_degree(),
                truth_holes: net.truth.holes.len(),
                final_iteration: out.final_iteration,
                last_iteration: out.last_iteration,
                stop: out.stop,
                sensitivity: c.and_then(|c| c.sensitivity()),
                specificity: c.and_then(|c| c.specificity()),
                first_pass_secs: out.log.first_pass.map_or(0.0, |d| d.as_secs_f64()),
            })
        })
        .collect()
}

/// One line per run. Wall-clock timing is left out so the file is reproducible.
pub fn summary_csv(rows: &[ExperimentRow]) -> String {
    let opt = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
    let mut s = String::from(
        "kind,n,d,seed,realized_degree,truth_holes,final_iteration,last_iteration,stop,sensitivity,specificity\n",
    );
    for r in rows {
        let p = &r.params;
        let _ = writeln!(
            s,
            "{},{},{},{},{:.4},{},{},{},{},{},{}",
            p.kind,
            p.n,
            p.d,
            p.seed,
            r.realized_degree,
            r.truth_holes,
            r.final_iteration,
            r.last_iteration,
            r.stop,
            opt(r.sensitivity),
            opt(r.specificity),
        );
    }
    s
}
