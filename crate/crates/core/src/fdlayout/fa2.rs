//! ForceAtlas2-style layout: degree-weighted repulsion, logarithmic attraction, gravity and
//! adaptive per-node speed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{check_finite, random_layout, tie_direction, LayoutEngine};
use crate::error::{Error, Result};
use crate::model::{Layout, Point, Topology};

const REPULSION_MIN_DIST: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct Fa2Params {
    pub repulsion_scale: f64,
    pub gravity: f64,
    pub attraction_scale: f64,
    pub global_speed: f64,
    pub iterations: usize,
    /// Largest displacement of one node in one iteration.
    pub max_step: f64,
}

impl Default for Fa2Params {
    fn default() -> Self {
        Fa2Params {
            repulsion_scale: 10.0,
            gravity: 1.0,
            attraction_scale: 1.0,
            global_speed: 1.0,
            iterations: 500,
            max_step: 10.0,
        }
    }
}

impl Fa2Params {
    pub fn validate(&self) -> Result<()> {
        let ok = self.repulsion_scale > 0.0
            && self.gravity >= 0.0
            && self.attraction_scale > 0.0
            && self.global_speed > 0.0
            && self.iterations > 0
            && self.max_step > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("invalid FA2 parameters {self:?}")))
        }
    }
}

/// `ln(1 + d)`.
pub fn fa2_attraction(dist: f64) -> f64 {
    dist.ln_1p()
}

/// `k (deg_u + 1)(deg_v + 1) / d`, with `d = 0` replaced by 1e-6.
pub fn fa2_repulsion(deg_u: usize, deg_v: usize, dist: f64, k: f64) -> f64 {
    let d = if dist > 0.0 { dist } else { REPULSION_MIN_DIST };
    k * ((deg_u as f64 + 1.0) * (deg_v as f64 + 1.0)) / d
}

/// Repulsion impulse on every node, accumulated pair by pair as equal and opposite vectors.
pub fn repulsion_forces(layout: &Layout, degrees: &[usize], k: f64) -> Vec<Point> {
    let p = layout.positions();
    let mut f = vec![Point::default(); p.len()];
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            let delta = p[i] - p[j];
            let d = delta.norm();
            let dir = if d > 0.0 { delta * (1.0 / d) } else { tie_direction(i, j) };
            let push = dir * fa2_repulsion(degrees[i], degrees[j], d, k);
            f[i] = f[i] + push;
            f[j] = f[j] - push;
        }
    }
    f
}

pub struct Fa2Engine {
    params: Fa2Params,
    edges: Vec<(usize, usize)>,
    degrees: Vec<usize>,
    layout: Layout,
    prev_force: Vec<Point>,
    speed: f64,
    iteration: u64,
}

impl Fa2Engine {
    pub fn new(topology: &Topology, params: Fa2Params, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::with_layout(topology, params, random_layout(topology.node_count(), &mut rng))
    }

    pub fn with_layout(topology: &Topology, params: Fa2Params, layout: Layout) -> Result<Self> {
        params.validate()?;
        if layout.len() != topology.node_count() {
            return Err(Error::InvalidInput("layout does not cover topology".into()));
        }
        let n = layout.len();
        Ok(Fa2Engine {
            edges: topology.edges().iter().map(|&(u, v)| (u.index(), v.index())).collect(),
            degrees: topology.nodes().map(|v| topology.degree(v)).collect(),
            layout,
            prev_force: vec![Point::default(); n],
            speed: 1.0,
            iteration: 0,
            params,
        })
    }

    fn forces(&self) -> Vec<Point> {
        let p = self.layout.positions();
        let mut f = repulsion_forces(&self.layout, &self.degrees, self.params.repulsion_scale);
        for (i, fi) in f.iter_mut().enumerate() {
            let d = p[i].norm();
            if d > 0.0 {
                let mass = self.degrees[i] as f64 + 1.0;
                *fi = *fi - p[i] * (mass * self.params.gravity / d);
            }
        }
        for &(u, v) in &self.edges {
            let delta = p[v] - p[u];
            let d = delta.norm();
            if d > 0.0 {
                let pull = delta * (self.params.attraction_scale * fa2_attraction(d) / d);
                f[u] = f[u] + pull;
                f[v] = f[v] - pull;
            }
        }
        f
    }
}

impl LayoutEngine for Fa2Engine {
    fn iterate(&mut self) -> Result<()> {
        self.iteration += 1;
        if self.layout.is_empty() {
            return Ok(());
        }
        let f = self.forces();
        let mut swinging = 0.0;
        let mut traction = 0.0;
        let swing: Vec<f64> = f
            .iter()
            .zip(&self.prev_force)
            .zip(&self.degrees)
            .map(|((&now, &before), &deg)| {
                let mass = deg as f64 + 1.0;
                let s = (now - before).norm();
                swinging += mass * s;
                traction += mass * (now + before).norm() / 2.0;
                s
            })
            .collect();

        // Global speed follows traction over swinging, never growing more than 50% per step.
        if swinging > 0.0 {
            let target = self.params.global_speed * traction / swinging;
            self.speed = target.min(1.5 * self.speed);
        }
        let cap = self.params.max_step;
        for (i, p) in self.layout.positions_mut().iter_mut().enumerate() {
            let factor = self.speed / (1.0 + (self.speed * swing[i]).sqrt());
            let mut step = f[i] * factor;
            let len = step.norm();
            if len > cap {
                step = step * (cap / len);
            }
            *p = *p + step;
        }
        self.prev_force = f;
        check_finite(&self.layout, "fa2")
    }

    fn snapshot(&self) -> &Layout {
        &self.layout
    }

    fn iteration(&self) -> u64 {
        self.iteration
    }
}

pub fn fa2_layout(topology: &Topology, params: &Fa2Params, seed: u64) -> Result<Layout> {
    let mut engine = Fa2Engine::new(topology, params.clone(), seed)?;
    for _ in 0..params.iterations {
        engine.iterate()?;
    }
    Ok(engine.layout)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formula_values() {
        assert_eq!(fa2_attraction(0.0), 0.0);
        assert!((fa2_attraction(std::f64::consts::E - 1.0) - 1.0).abs() < 1e-12);
        assert!(fa2_attraction(2.0) > fa2_attraction(1.0));
        assert_eq!(fa2_repulsion(0, 0, 1.0, 1.0), 1.0);
        assert!((fa2_repulsion(3, 3, 2.0, 1.0) - 8.0).abs() < 1e-12);
        assert!((fa2_repulsion(2, 5, 4.0, 1.0) * 2.0 - fa2_repulsion(5, 2, 2.0, 1.0)).abs() < 1e-12);
        assert!(fa2_repulsion(1, 1, 0.0, 1.0).is_finite());
    }

    #[test]
    fn disconnected_pair_separates() {
        let t = Topology::empty(2);
        let l = Layout::new(vec![Point::new(-0.5, 0.0), Point::new(0.5, 0.0)]);
        let mut e = Fa2Engine::with_layout(&t, Fa2Params::default(), l).unwrap();
        e.iterate().unwrap();
        let p = e.snapshot().positions();
        assert!(p[0].distance(p[1]) > 1.0);
    }

    #[test]
    fn distant_edge_contracts() {
        let t = Topology::new(2, [(0, 1)]).unwrap();
        let l = Layout::new(vec![Point::new(-50.0, 0.0), Point::new(50.0, 0.0)]);
        let params = Fa2Params {
            repulsion_scale: 1e-3,
            gravity: 0.0,
            ..Fa2Params::default()
        };
        let mut e = Fa2Engine::with_layout(&t, params, l).unwrap();
        e.iterate().unwrap();
        let p = e.snapshot().positions();
        assert!(p[0].distance(p[1]) < 100.0);
    }

    #[test]
    fn coincident_nodes_get_pushed_apart() {
        let t = Topology::empty(2);
        let l = Layout::new(vec![Point::new(1.0, 1.0); 2]);
        let mut e = Fa2Engine::with_layout(&t, Fa2Params::default(), l).unwrap();
        e.iterate().unwrap();
        let p = e.snapshot().positions();
        assert!(p[0].distance(p[1]) > 0.0);
    }
}
