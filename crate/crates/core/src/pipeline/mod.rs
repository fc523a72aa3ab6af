//! The detection loop: advance the layout, render, detect, identify boundaries, and stop once
//! the boundary sets have been stable long enough or the time budget is spent.

mod eval;
mod experiment;
mod plot;

use std::fmt;
use std::time::{Duration, Instant};

use crate::detect::HoleDetector;
use crate::error::{Error, Result};
use crate::fdlayout::LayoutEngine;
use crate::holeid::identify_holes;
use crate::model::{EvalRecord, Hole, Layout, NodeId, Topology};
use crate::netgen::GroundTruth;
use crate::raster::{make_transform, render_with, RenderStyle};

pub use eval::{
    compute_metrics, evaluate, jaccard, match_holes, Confusion, Match, Matching, DEFAULT_JACCARD,
};
pub use experiment::{run_experiment, summary_csv, ExperimentRow, GridSpec};
pub use plot::{emit_timeseries, write_timeseries, TimeSeries, CSV_HEADER};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StopCriteria {
    /// Time budget in seconds.
    pub t_max: f64,
    /// Consecutive iterations with unchanged boundary sets that end the run.
    pub stable_iters: u32,
}

impl Default for StopCriteria {
    fn default() -> Self {
        StopCriteria {
            t_max: 600.0,
            stable_iters: 10,
        }
    }
}

impl StopCriteria {
    pub fn validate(&self) -> Result<()> {
        if self.t_max > 0.0 && self.stable_iters > 0 {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("invalid stop criteria {self:?}")))
        }
    }
}

/// Source of the elapsed-time column.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Clock {
    Wall,
    /// Iteration `k` happens at `k * dt` seconds; makes logs reproducible byte for byte.
    Virtual { dt: f64 },
}

impl std::str::FromStr for Clock {
    type Err = Error;
    /// `wall`, or `virtual:DT` with `DT` in seconds.
    fn from_str(s: &str) -> Result<Self> {
        if s == "wall" {
            return Ok(Clock::Wall);
        }
        s.strip_prefix("virtual:")
            .and_then(|dt| dt.parse::<f64>().ok())
            .filter(|dt| *dt > 0.0)
            .map(|dt| Clock::Virtual { dt })
            .ok_or_else(|| Error::InvalidInput(format!("bad clock '{s}', expected wall or virtual:DT")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    pub style: RenderStyle,
    /// Engine iterations between detection passes.
    pub detect_every: u32,
    pub clock: Clock,
    pub jaccard_min: f64,
    /// Hard cap on detection passes, independent of time.
    pub max_iterations: Option<u64>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            style: RenderStyle::default(),
            detect_every: 1,
            clock: Clock::Wall,
            jaccard_min: DEFAULT_JACCARD,
            max_iterations: None,
        }
    }
}

/// Canonical form of one pass's result: sorted id lists, themselves sorted.
pub type BoundarySets = Vec<Vec<NodeId>>;

pub fn boundary_sets(holes: &[Hole]) -> BoundarySets {
    let mut sets: BoundarySets = holes.iter().map(|h| h.sorted_ids()).collect();
    sets.sort();
    sets
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationLog {
    pub iteration: u64,
    pub elapsed: f64,
    pub boundary_sets: BoundarySets,
    pub confusion: Option<Confusion>,
}

impl IterationLog {
    pub fn eval_record(&self) -> Option<EvalRecord> {
        self.confusion.map(|c| EvalRecord {
            t: self.elapsed,
            iteration: self.iteration,
            sensitivity: c.sensitivity(),
            specificity: c.specificity(),
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunLog {
    pub iterations: Vec<IterationLog>,
    /// Wall time until the first detection pass finished, whatever the clock.
    pub first_pass: Option<Duration>,
}

impl RunLog {
    pub fn eval_records(&self) -> Vec<EvalRecord> {
        self.iterations.iter().filter_map(IterationLog::eval_record).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    Stable,
    TimeLimit,
    IterationLimit,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StopReason::Stable => "stable",
            StopReason::TimeLimit => "time",
            StopReason::IterationLimit => "iterations",
        })
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub holes: Vec<Hole>,
    pub layout: Layout,
    /// Iteration whose result is reported as final.
    pub final_iteration: u64,
    /// Iteration at which the loop ended.
    pub last_iteration: u64,
    pub stop: StopReason,
    pub log: RunLog,
}

impl RunOutcome {
    pub fn final_confusion(&self) -> Option<Confusion> {
        self.log
            .iterations
            .iter()
            .find(|it| it.iteration == self.final_iteration)
            .and_then(|it| it.confusion)
    }
}

/// A run cut short by an engine or detector error, with everything logged until then.
#[derive(Debug)]
pub struct Aborted {
    pub error: Error,
    pub log: RunLog,
}

impl fmt::Display for Aborted {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "run aborted after {} iterations: {}", self.log.iterations.len(), self.error)
    }
}

impl std::error::Error for Aborted {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

struct Candidate {
    iteration: u64,
    layout: Layout,
    holes: Vec<Hole>,
}

/// Runs the loop until the stop criteria fire.
///
/// On a stability stop the reported result is the one from the first iteration of the stable
/// streak: sets first seen at iteration `k` and unchanged through `k + stable_iters` end the run
/// at `k + stable_iters` with iteration `k` as final. On a time or iteration stop the latest
/// result is final.
pub fn run_pipeline(
    topology: &Topology,
    engine: &mut dyn LayoutEngine,
    detector: &mut dyn HoleDetector,
    stop: &StopCriteria,
    truth: Option<&GroundTruth>,
    config: &PipelineConfig,
) -> Result<RunOutcome, Aborted> {
    let mut log = RunLog::default();
    macro_rules! bail {
        ($e:expr) => {
            match $e {
                Ok(v) => v,
                Err(error) => return Err(Aborted { error, log }),
            }
        };
    }
    bail!(stop.validate());
    bail!(config.style.validate());
    if config.detect_every == 0 {
        bail!(Err(Error::InvalidInput("detect_every must be positive".into())));
    }

    let start = Instant::now();
    let mut streak = 0u32;
    let mut candidate: Option<Candidate> = None;
    let mut iteration = 0u64;
    loop {
        iteration += 1;
        for _ in 0..config.detect_every {
            bail!(engine.iterate());
        }
        let layout = engine.snapshot();
        let transform = make_transform(layout, &config.style);
        let raster = bail!(render_with(layout, topology, &config.style, &transform));
        let boxes = bail!(detector
            .detect(&raster, layout, &transform)
            .map_err(|e| Error::Detector(e.to_string())));
        let found = bail!(identify_holes(&raster, &boxes, layout, &transform, &config.style));
        let confusion = match truth {
            Some(gt) => Some(bail!(evaluate(&found.holes, gt, config.jaccard_min))),
            None => None,
        };
        let elapsed = match config.clock {
            Clock::Wall => start.elapsed().as_secs_f64(),
            Clock::Virtual { dt } => iteration as f64 * dt,
        };
        if log.first_pass.is_none() {
            log.first_pass = Some(start.elapsed());
        }
        let sets = boundary_sets(&found.holes);
        let unchanged = log.iterations.last().is_some_and(|prev| prev.boundary_sets == sets);
        log.iterations.push(IterationLog {
            iteration,
            elapsed,
            boundary_sets: sets,
            confusion,
        });
        if unchanged {
            streak += 1;
        } else {
            streak = 0;
            candidate = Some(Candidate {
                iteration,
                layout: layout.clone(),
                holes: found.holes.clone(),
            });
        }

        let reason = if streak >= stop.stable_iters {
            Some(StopReason::Stable)
        } else if elapsed > stop.t_max {
            Some(StopReason::TimeLimit)
        } else if config.max_iterations.is_some_and(|m| iteration >= m) {
            Some(StopReason::IterationLimit)
        } else {
            None
        };
        if let Some(stop) = reason {
            let (final_iteration, layout, holes) = if stop == StopReason::Stable {
                let c = candidate.take().expect("a streak always has a start");
                (c.iteration, c.layout, c.holes)
            } else {
                (iteration, layout.clone(), found.holes)
            };
            return Ok(RunOutcome {
                holes,
                layout,
                final_iteration,
                last_iteration: iteration,
                stop,
                log,
            });
        }
    }
}
