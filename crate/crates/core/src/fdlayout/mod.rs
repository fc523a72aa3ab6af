//! Force-directed layout engines behind one stepping contract.
//!
//! Every engine owns its state, advances one unit of work per [`LayoutEngine::iterate`] call and
//! exposes the current drawing through [`LayoutEngine::snapshot`]. The batch functions
//! ([`dh_layout`], [`fa2_layout`], [`kkmsds_layout`]) are thin loops over the same engines, so a
//! snapshot after `k` calls is exactly the batch result for `k` iterations.

mod dh;
mod fa2;
mod kk;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Layout, Point, Topology};

pub use dh::{dh_accept, dh_energy, dh_layout, DhEngine, DhParams};
pub use fa2::{fa2_attraction, fa2_layout, fa2_repulsion, repulsion_forces, Fa2Engine, Fa2Params};
pub use kk::{
    kk_stable_ratio, kk_stiffness_update, kkmsds_layout, start_node, KkEngine, KkParams, KkPhase,
};

/// Distance substituted for coincident nodes before any `1/d` term.
pub const MIN_DIST: f64 = 1e-9;

pub trait LayoutEngine: Send {
    /// Advances one engine-defined unit of work. Fails only if positions stop being finite.
    fn iterate(&mut self) -> Result<()>;
    /// The drawing after the most recent `iterate`.
    fn snapshot(&self) -> &Layout;
    /// Number of completed `iterate` calls.
    fn iteration(&self) -> u64;
}

/// Replays fixed coordinates forever; with ground-truth coordinates this is the identity engine.
#[derive(Clone, Debug)]
pub struct FixedEngine {
    layout: Layout,
    iteration: u64,
}

impl FixedEngine {
    pub fn new(layout: Layout) -> Self {
        FixedEngine { layout, iteration: 0 }
    }
}

impl LayoutEngine for FixedEngine {
    fn iterate(&mut self) -> Result<()> {
        self.iteration += 1;
        Ok(())
    }

    fn snapshot(&self) -> &Layout {
        &self.layout
    }

    fn iteration(&self) -> u64 {
        self.iteration
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algo {
    Dh,
    Fa2,
    KkMsDs,
    Identity,
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algo::Dh => "dh",
            Algo::Fa2 => "fa2",
            Algo::KkMsDs => "kkmsds",
            Algo::Identity => "identity",
        })
    }
}

impl FromStr for Algo {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dh" => Ok(Algo::Dh),
            "fa2" => Ok(Algo::Fa2),
            "kkmsds" | "kk" => Ok(Algo::KkMsDs),
            "identity" => Ok(Algo::Identity),
            other => Err(Error::InvalidInput(format!("unknown layout algorithm '{other}'"))),
        }
    }
}

/// Engine choice with its parameters.
#[derive(Clone, Debug)]
pub enum EngineConfig {
    Dh(DhParams),
    Fa2(Fa2Params),
    KkMsDs(KkParams),
    /// Fixed coordinates, typically the ground truth.
    Identity(Layout),
}

impl EngineConfig {
    /// Default parameters for `algo`. `Identity` needs coordinates and is rejected here.
    pub fn default_for(algo: Algo) -> Result<Self> {
        match algo {
            Algo::Dh => Ok(EngineConfig::Dh(DhParams::default())),
            Algo::Fa2 => Ok(EngineConfig::Fa2(Fa2Params::default())),
            Algo::KkMsDs => Ok(EngineConfig::KkMsDs(KkParams::default())),
            Algo::Identity => Err(Error::InvalidInput(
                "identity layout requires ground-truth coordinates".into(),
            )),
        }
    }

    pub fn build(&self, topology: &Topology, seed: u64) -> Result<Box<dyn LayoutEngine>> {
        Ok(match self {
            EngineConfig::Dh(p) => Box::new(DhEngine::new(topology, p.clone(), seed)?),
            EngineConfig::Fa2(p) => Box::new(Fa2Engine::new(topology, p.clone(), seed)?),
            EngineConfig::KkMsDs(p) => Box::new(KkEngine::new(topology, p.clone(), seed)?),
            EngineConfig::Identity(l) => {
                if l.len() != topology.node_count() {
                    return Err(Error::InvalidInput(format!(
                        "coordinates for {} nodes, topology has {}",
                        l.len(),
                        topology.node_count()
                    )));
                }
                Box::new(FixedEngine::new(l.clone()))
            }
        })
    }
}

/// Seeded uniform positions in a square of side `sqrt(n)`.
pub(crate) fn random_layout(n: usize, rng: &mut ChaCha8Rng) -> Layout {
    let side = (n as f64).sqrt().max(1.0);
    Layout::new(
        (0..n)
            .map(|_| Point::new(rng.gen::<f64>() * side, rng.gen::<f64>() * side))
            .collect(),
    )
}

/// Deterministic unit direction for a coincident pair, so forces stay finite and antisymmetric.
pub(crate) fn tie_direction(i: usize, j: usize) -> Point {
    let a = (i as f64 * 0.618_033_988_75 + j as f64 * 0.414_213_562_37).fract() * std::f64::consts::TAU;
    Point::new(a.cos(), a.sin())
}

pub(crate) fn check_finite(layout: &Layout, engine: &str) -> Result<()> {
    match layout.positions().iter().position(|p| !p.is_finite()) {
        Some(i) => Err(Error::Engine(format!("{engine}: node {i} has a non-finite position"))),
        None => Ok(()),
    }
}
