//! Simulated-annealing layout with a shrinking move radius.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_finite, random_layout, LayoutEngine, MIN_DIST};
use crate::error::{Error, Result};
use crate::model::{Layout, Point, Topology};

#[derive(Clone, Debug, PartialEq)]
pub struct DhParams {
    pub boltzmann_k: f64,
    pub initial_temperature: f64,
    /// Per-pass factor applied to both the move radius and the temperature.
    pub shrink: f64,
    /// `None` uses the world extent, the side of the initial square.
    pub radius_weight: Option<f64>,
    /// Moves per pass; `None` means one per node.
    pub inner_trials: Option<usize>,
    /// Moves whose acceptance probability falls below this floor are always rejected.
    pub epsilon: f64,
    pub iterations: usize,
    /// Restrict the attractive `d` term to edges instead of every pair.
    pub edge_attraction: bool,
}

impl Default for DhParams {
    fn default() -> Self {
        DhParams {
            boltzmann_k: 1.0,
            initial_temperature: 10.0,
            shrink: 0.93,
            radius_weight: None,
            inner_trials: None,
            epsilon: 1e-6,
            iterations: 200,
            edge_attraction: false,
        }
    }
}

impl DhParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.boltzmann_k > 0.0
            && self.initial_temperature > 0.0
            && self.shrink > 0.0
            && self.shrink < 1.0
            && self.radius_weight.is_none_or(|r| r > 0.0)
            && self.inner_trials.is_none_or(|t| t > 0)
            && self.epsilon > 0.0
            && self.epsilon < 1.0
            && self.iterations > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("invalid DH parameters {self:?}")))
        }
    }
}

#[inline]
fn pair_energy(d: f64) -> f64 {
    let d = d.max(MIN_DIST);
    d + 1.0 / d
}

/// `sum over i<j of d + 1/d`; coincident pairs count at distance 1e-9.
pub fn dh_energy(layout: &Layout) -> f64 {
    let p = layout.positions();
    let mut e = 0.0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            e += pair_energy(p[i].distance(p[j]));
        }
    }
    e
}

/// Metropolis acceptance: improvements always pass, otherwise `u < exp(-dE / kT)` as long as
/// that probability is at least `epsilon`.
pub fn dh_accept(e_old: f64, e_new: f64, temperature: f64, k: f64, u: f64, epsilon: f64) -> bool {
    let delta = e_new - e_old;
    if delta <= 0.0 {
        return true;
    }
    let p = (-delta / (k * temperature)).exp();
    p >= epsilon && u < p
}

pub struct DhEngine {
    params: DhParams,
    neighbors: Vec<Vec<usize>>,
    current: Layout,
    energy: f64,
    best: Layout,
    best_energy: f64,
    radius: f64,
    temperature: f64,
    trials: usize,
    rng: ChaCha8Rng,
    iteration: u64,
}

impl DhEngine {
    pub fn new(topology: &Topology, params: DhParams, seed: u64) -> Result<Self> {
        params.validate()?;
        let n = topology.node_count();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let current = random_layout(n, &mut rng);
        let neighbors = topology
            .nodes()
            .map(|v| topology.neighbors(v).iter().map(|u| u.index()).collect())
            .collect();
        let world = (n as f64).sqrt().max(1.0);
        let extent = current
            .bounding_box()
            .map_or(0.0, |(lo, hi)| (hi.x - lo.x).max(hi.y - lo.y));
        let radius = (params.radius_weight.unwrap_or(world) / 5.0).max(extent / 5.0);
        let mut engine = DhEngine {
            trials: params.inner_trials.unwrap_or(n),
            temperature: params.initial_temperature,
            neighbors,
            best: current.clone(),
            current,
            energy: 0.0,
            best_energy: 0.0,
            radius,
            rng,
            iteration: 0,
            params,
        };
        engine.energy = engine.total_energy();
        engine.best_energy = engine.energy;
        Ok(engine)
    }

    fn total_energy(&self) -> f64 {
        if !self.params.edge_attraction {
            return dh_energy(&self.current);
        }
        let p = self.current.positions();
        let mut e = 0.0;
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                e += 1.0 / p[i].distance(p[j]).max(MIN_DIST);
            }
            for &j in &self.neighbors[i] {
                if j > i {
                    e += p[i].distance(p[j]);
                }
            }
        }
        e
    }

    /// Energy of node `i` at `at` against every other node's current position.
    fn node_energy(&self, i: usize, at: Point) -> f64 {
        let p = self.current.positions();
        let mut e = 0.0;
        if self.params.edge_attraction {
            for (j, &q) in p.iter().enumerate() {
                if j != i {
                    e += 1.0 / at.distance(q).max(MIN_DIST);
                }
            }
            for &j in &self.neighbors[i] {
                e += at.distance(p[j]);
            }
        } else {
            for (j, &q) in p.iter().enumerate() {
                if j != i {
                    e += pair_energy(at.distance(q));
                }
            }
        }
        e
    }

    /// Energy of the best layout so far, matching [`LayoutEngine::snapshot`].
    pub fn energy(&self) -> f64 {
        self.best_energy
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

impl LayoutEngine for DhEngine {
    fn iterate(&mut self) -> Result<()> {
        self.iteration += 1;
        let n = self.current.len();
        if n < 2 {
            return Ok(());
        }
        for _ in 0..self.trials {
            let i = self.rng.gen_range(0..n);
            let angle = self.rng.gen::<f64>() * std::f64::consts::TAU;
            let step = self.rng.gen::<f64>() * self.radius;
            let u = self.rng.gen::<f64>();
            let from = self.current.positions()[i];
            let to = from + Point::new(angle.cos(), angle.sin()) * step;
            let delta = self.node_energy(i, to) - self.node_energy(i, from);
            let (k, t, eps) = (self.params.boltzmann_k, self.temperature, self.params.epsilon);
            if dh_accept(self.energy, self.energy + delta, t, k, u, eps) {
                self.current.positions_mut()[i] = to;
                self.energy += delta;
            }
        }
        // Re-sum to keep incremental drift out of the best-energy bookkeeping.
        self.energy = self.total_energy();
        if self.energy < self.best_energy {
            self.best_energy = self.energy;
            self.best.clone_from(&self.current);
        }
        self.radius *= self.params.shrink;
        self.temperature *= self.params.shrink;
        check_finite(&self.current, "dh")
    }

    /// Lowest-energy layout seen so far.
    fn snapshot(&self) -> &Layout {
        &self.best
    }

    fn iteration(&self) -> u64 {
        self.iteration
    }
}

pub fn dh_layout(topology: &Topology, params: &DhParams, seed: u64) -> Result<Layout> {
    let mut engine = DhEngine::new(topology, params.clone(), seed)?;
    for _ in 0..params.iterations {
        engine.iterate()?;
    }
    Ok(engine.best)
}
