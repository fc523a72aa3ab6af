//! Multi-scale Kamada-Kawai with decaying stiffness.
//!
//! A working tree (WT) starts at the node with the highest average neighbor degree and grows by
//! two hops per stage. Within a stage, batches of the stiffest WT nodes take localized stress
//! majorization steps whose length is capped by the node's stiffness, which decays with every
//! update. Nodes outside WT sit on the WT node nearest to them in hops. Once WT spans the
//! component, stiffness is reset and the whole graph is refined.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_finite, tie_direction, LayoutEngine};
use crate::error::{Error, Result};
use crate::model::{Layout, NodeId, Point, Topology};

const UNREACHED: u16 = u16::MAX;

#[derive(Clone, Debug, PartialEq)]
pub struct KkParams {
    /// Spring weights are `K / d^2` for hop distance `d`.
    pub spring_constant: f64,
    pub decay_rate: f64,
    /// Stiffness decrement scale; initial stiffness is `energy / (1 - decay_rate)`.
    pub energy: f64,
    /// Stable-state threshold on the edge-length deviation ratio.
    pub epsilon: f64,
    pub batch_fraction: f64,
    /// Target length of one hop.
    pub edge_length: f64,
    /// Budget of sweeps over the whole run.
    pub max_sweeps: usize,
    /// Sweeps after which a growth stage expands regardless of convergence.
    pub stage_sweeps: usize,
    /// Relative change in the ratio below which a stage counts as stalled.
    pub stall_tolerance: f64,
}

impl Default for KkParams {
    fn default() -> Self {
        KkParams {
            spring_constant: 1.0,
            decay_rate: 0.9,
            energy: 1.0,
            epsilon: 0.05,
            batch_fraction: 0.05,
            edge_length: 1.0,
            max_sweeps: 400,
            stage_sweeps: 15,
            stall_tolerance: 1e-4,
        }
    }
}

impl KkParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.spring_constant > 0.0
            && self.decay_rate > 0.0
            && self.decay_rate < 1.0
            && self.energy > 0.0
            && self.epsilon > 0.0
            && self.batch_fraction > 0.0
            && self.batch_fraction <= 1.0
            && self.edge_length > 0.0
            && self.max_sweeps > 0
            && self.stage_sweeps > 0
            && self.stall_tolerance >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("invalid KK-MS-DS parameters {self:?}")))
        }
    }

    fn initial_stiffness(&self) -> f64 {
        self.energy / (1.0 - self.decay_rate)
    }
}

/// `max(0, m - z p^t)`.
pub fn kk_stiffness_update(m: f64, z: f64, p: f64, t: u32) -> f64 {
    (m - z * p.powi(t as i32)).max(0.0)
}

/// `sum |L' - L| / sum L`.
pub fn kk_stable_ratio(current: &[f64], input: &[f64]) -> Result<f64> {
    if current.is_empty() || current.len() != input.len() {
        return Err(Error::InvalidInput(format!(
            "length lists of size {} and {}",
            current.len(),
            input.len()
        )));
    }
    let dev: f64 = current.iter().zip(input).map(|(a, b)| (a - b).abs()).sum();
    Ok(dev / input.iter().sum::<f64>())
}

fn average_neighbor_degree(topology: &Topology, v: NodeId) -> f64 {
    let nb = topology.neighbors(v);
    if nb.is_empty() {
        return 0.0;
    }
    nb.iter().map(|&u| topology.degree(u)).sum::<usize>() as f64 / nb.len() as f64
}

fn start_among(topology: &Topology, nodes: &[NodeId]) -> Option<NodeId> {
    let mut best: Option<(NodeId, f64)> = None;
    for &v in nodes {
        let a = average_neighbor_degree(topology, v);
        match best {
            Some((b, ba)) if ba > a || (ba == a && b < v) => {}
            _ => best = Some((v, a)),
        }
    }
    best.map(|(v, _)| v)
}

/// Node with the highest average neighbor degree, lowest id on ties.
pub fn start_node(topology: &Topology) -> Option<NodeId> {
    start_among(topology, &topology.nodes().collect::<Vec<_>>())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KkPhase {
    Growing,
    Refining,
    Done,
}

pub struct KkEngine {
    params: KkParams,
    n: usize,
    adjacency: Vec<Vec<usize>>,
    /// Row-major hop distances among main-component nodes.
    hops: Vec<u16>,
    main: Vec<usize>,
    others: Vec<Vec<usize>>,
    in_wt: Vec<bool>,
    wt: Vec<usize>,
    owner: Vec<usize>,
    pos: Vec<Point>,
    layout: Layout,
    stiffness: Vec<f64>,
    updates: Vec<u32>,
    wt_edges: Vec<(usize, usize)>,
    phase: KkPhase,
    stage_sweeps: usize,
    total_sweeps: usize,
    prev_ratio: Option<f64>,
    ratio: f64,
    rng: ChaCha8Rng,
    iteration: u64,
}

impl KkEngine {
    pub fn new(topology: &Topology, params: KkParams, seed: u64) -> Result<Self> {
        params.validate()?;
        let n = topology.node_count();
        let adjacency: Vec<Vec<usize>> = topology
            .nodes()
            .map(|v| topology.neighbors(v).iter().map(|u| u.index()).collect())
            .collect();
        let mut comps = topology.components();
        let main_ids = if comps.is_empty() { Vec::new() } else { comps.remove(0) };
        let mut main: Vec<usize> = main_ids.iter().map(|v| v.index()).collect();
        main.sort_unstable();
        let others = comps
            .into_iter()
            .map(|c| c.into_iter().map(|v| v.index()).collect())
            .collect();

        let mut hops = vec![UNREACHED; n * n];
        for &s in &main {
            let row = &mut hops[s * n..(s + 1) * n];
            row[s] = 0;
            let mut q = VecDeque::from([s]);
            while let Some(v) = q.pop_front() {
                let d = row[v];
                for &u in &adjacency[v] {
                    if row[u] == UNREACHED {
                        row[u] = d.saturating_add(1).min(UNREACHED - 1);
                        q.push_back(u);
                    }
                }
            }
        }

        let mut engine = KkEngine {
            n,
            adjacency,
            hops,
            others,
            in_wt: vec![false; n],
            wt: Vec::new(),
            owner: (0..n).collect(),
            pos: vec![Point::default(); n],
            layout: Layout::new(vec![Point::default(); n]),
            stiffness: vec![0.0; n],
            updates: vec![0; n],
            wt_edges: Vec::new(),
            phase: KkPhase::Growing,
            stage_sweeps: 0,
            total_sweeps: 0,
            prev_ratio: None,
            ratio: f64::INFINITY,
            rng: ChaCha8Rng::seed_from_u64(seed),
            iteration: 0,
            params,
            main: Vec::new(),
        };
        let main_nodes: Vec<NodeId> = main.iter().map(|&v| NodeId(v as u32)).collect();
        engine.main = main;
        match start_among(topology, &main_nodes) {
            Some(s) => {
                let s = s.index();
                engine.in_wt[s] = true;
                engine.wt.push(s);
                engine.stiffness[s] = engine.params.initial_stiffness();
                engine.expand();
            }
            None => engine.phase = KkPhase::Done,
        }
        if engine.main.len() <= 1 {
            engine.phase = KkPhase::Done;
        }
        engine.sync();
        Ok(engine)
    }

    fn hop(&self, i: usize, j: usize) -> u16 {
        self.hops[i * self.n + j]
    }

    pub fn phase(&self) -> KkPhase {
        self.phase
    }

    /// Stable-state ratio after the last sweep.
    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn working_tree_size(&self) -> usize {
        self.wt.len()
    }

    /// Adds every main-component node within two hops of WT. Returns false if none remain.
    fn expand(&mut self) -> bool {
        let mut depth = vec![u8::MAX; self.n];
        let mut q: VecDeque<usize> = self.wt.iter().copied().collect();
        for &v in &self.wt {
            depth[v] = 0;
        }
        let mut fresh = Vec::new();
        while let Some(v) = q.pop_front() {
            if depth[v] >= 2 {
                continue;
            }
            for &u in &self.adjacency[v] {
                if depth[u] == u8::MAX {
                    depth[u] = depth[v] + 1;
                    fresh.push(u);
                    q.push_back(u);
                }
            }
        }
        if fresh.is_empty() {
            return false;
        }
        fresh.sort_unstable_by_key(|&u| (depth[u], u));
        let jitter = 0.5 * self.params.edge_length;
        let m0 = self.params.initial_stiffness();
        for &u in &fresh {
            let placed: Vec<Point> = self.adjacency[u]
                .iter()
                .filter(|&&w| self.in_wt[w])
                .map(|&w| self.pos[w])
                .collect();
            let base = placed.iter().fold(Point::default(), |a, &b| a + b) * (1.0 / placed.len() as f64);
            let angle = self.rng.gen::<f64>() * std::f64::consts::TAU;
            let rad = jitter * self.rng.gen::<f64>().sqrt();
            self.pos[u] = base + Point::new(angle.cos(), angle.sin()) * rad;
            self.in_wt[u] = true;
            self.wt.push(u);
            self.stiffness[u] = m0;
            self.updates[u] = 0;
        }
        self.wt.sort_unstable();
        self.wt_edges = self
            .wt
            .iter()
            .flat_map(|&v| self.adjacency[v].iter().filter(move |&&u| u > v).map(move |&u| (v, u)))
            .filter(|&(_, u)| self.in_wt[u])
            .collect();
        self.assign_owners();
        true
    }

    /// Multi-source BFS from WT in id order: every other main node follows its first claimant.
    fn assign_owners(&mut self) {
        let mut seen = vec![false; self.n];
        let mut q = VecDeque::new();
        for &v in &self.wt {
            seen[v] = true;
            self.owner[v] = v;
            q.push_back(v);
        }
        while let Some(v) = q.pop_front() {
            for &u in &self.adjacency[v] {
                if !seen[u] {
                    seen[u] = true;
                    self.owner[u] = self.owner[v];
                    q.push_back(u);
                }
            }
        }
    }

    /// Weighted-average stress step for node `i` against all of WT, capped at its stiffness.
    fn relax(&mut self, i: usize) {
        let xi = self.pos[i];
        let (mut num, mut den) = (Point::default(), 0.0);
        for &j in &self.wt {
            let h = self.hop(i, j);
            if j == i || h == UNREACHED {
                continue;
            }
            let d = h as f64 * self.params.edge_length;
            let w = self.params.spring_constant / (d * d);
            let delta = xi - self.pos[j];
            let len = delta.norm();
            let dir = if len > 0.0 { delta * (1.0 / len) } else { tie_direction(i, j) };
            num = num + (self.pos[j] + dir * d) * w;
            den += w;
        }
        if den == 0.0 {
            return;
        }
        let mut step = num * (1.0 / den) - xi;
        let cap = self.stiffness[i];
        let len = step.norm();
        if len > cap {
            step = if cap > 0.0 { step * (cap / len) } else { Point::default() };
        }
        self.pos[i] = xi + step;
        self.stiffness[i] = kk_stiffness_update(
            self.stiffness[i],
            self.params.energy,
            self.params.decay_rate,
            self.updates[i],
        );
        self.updates[i] += 1;
    }

    fn sweep(&mut self) {
        let batches = (1.0 / self.params.batch_fraction).ceil() as usize;
        let size = ((self.wt.len() as f64 * self.params.batch_fraction).ceil() as usize).max(1);
        let mut order = self.wt.clone();
        for _ in 0..batches {
            order.sort_by(|&a, &b| self.stiffness[b].total_cmp(&self.stiffness[a]).then(a.cmp(&b)));
            for &v in order.iter().take(size) {
                self.relax(v);
            }
        }
    }

    /// Ratio over WT edges after rescaling lengths to the target mean; the drawing's overall
    /// scale is irrelevant once rendered, only its shape is.
    fn current_ratio(&self) -> f64 {
        if self.wt_edges.is_empty() {
            return 0.0;
        }
        let mut cur: Vec<f64> = self.wt_edges.iter().map(|&(u, v)| self.pos[u].distance(self.pos[v])).collect();
        let total: f64 = cur.iter().sum();
        if total > 0.0 {
            let s = self.params.edge_length * cur.len() as f64 / total;
            cur.iter_mut().for_each(|x| *x *= s);
        }
        let target = vec![self.params.edge_length; cur.len()];
        kk_stable_ratio(&cur, &target).unwrap_or(0.0)
    }

    fn reset_stiffness(&mut self) {
        let m0 = self.params.initial_stiffness();
        for &v in &self.wt {
            self.stiffness[v] = m0;
            self.updates[v] = 0;
        }
    }

    /// Copies WT positions to the snapshot and places collapsed and detached nodes.
    fn sync(&mut self) {
        let out = self.layout.positions_mut();
        for &v in &self.main {
            out[v] = self.pos[self.owner[v]];
        }
        if self.others.is_empty() {
            return;
        }
        let m = self.main.len().max(1) as f64;
        let center = self.main.iter().fold(Point::default(), |a, &v| a + self.pos[v]) * (1.0 / m);
        let reach = self
            .main
            .iter()
            .map(|&v| self.pos[v].distance(center))
            .fold(0.0, f64::max);
        let l = self.params.edge_length;
        let ring = reach + 2.0 * l;
        let k = self.others.len() as f64;
        for (c, comp) in self.others.iter().enumerate() {
            let a = std::f64::consts::TAU * c as f64 / k;
            let anchor = center + Point::new(a.cos(), a.sin()) * ring;
            let s = comp.len() as f64;
            for (idx, &v) in comp.iter().enumerate() {
                out[v] = if comp.len() == 1 {
                    anchor
                } else {
                    let b = std::f64::consts::TAU * idx as f64 / s;
                    anchor + Point::new(b.cos(), b.sin()) * (0.5 * l)
                };
            }
        }
    }
}

impl LayoutEngine for KkEngine {
    fn iterate(&mut self) -> Result<()> {
        self.iteration += 1;
        if self.phase == KkPhase::Done {
            return Ok(());
        }
        self.sweep();
        self.total_sweeps += 1;
        self.stage_sweeps += 1;
        let r = self.current_ratio();
        self.ratio = r;
        let stalled = self
            .prev_ratio
            .is_some_and(|p| (p - r).abs() <= self.params.stall_tolerance * p.max(1e-12));
        let settled = r < self.params.epsilon || stalled;
        self.prev_ratio = Some(r);
        match self.phase {
            KkPhase::Growing if settled || self.stage_sweeps >= self.params.stage_sweeps => {
                if !self.expand() {
                    self.reset_stiffness();
                    self.phase = KkPhase::Refining;
                }
                self.stage_sweeps = 0;
                self.prev_ratio = None;
            }
            KkPhase::Refining if settled => self.phase = KkPhase::Done,
            _ => {}
        }
        if self.total_sweeps >= self.params.max_sweeps {
            self.phase = KkPhase::Done;
        }
        self.sync();
        check_finite(&self.layout, "kkmsds")
    }

    fn snapshot(&self) -> &Layout {
        &self.layout
    }

    fn iteration(&self) -> u64 {
        self.iteration
    }
}

/// Runs to the stable state or the sweep budget.
pub fn kkmsds_layout(topology: &Topology, params: &KkParams, seed: u64) -> Result<Layout> {
    let mut engine = KkEngine::new(topology, params.clone(), seed)?;
    while engine.phase != KkPhase::Done {
        engine.iterate()?;
    }
    Ok(engine.layout)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stiffness_examples() {
        assert_eq!(kk_stiffness_update(2.0, 0.0, 0.9, 3), 2.0);
        assert!((kk_stiffness_update(1.0, 0.5, 0.5, 1) - 0.75).abs() < 1e-12);
        assert_eq!(kk_stiffness_update(0.1, 1.0, 0.9, 0), 0.0);
        assert!((kk_stiffness_update(1.0, 1.0, 0.5, 200) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ratio_examples() {
        assert_eq!(kk_stable_ratio(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(kk_stable_ratio(&[2.0, 0.0], &[1.0, 1.0]).unwrap(), 1.0);
        assert!(kk_stable_ratio(&[], &[]).is_err());
        assert!(kk_stable_ratio(&[1.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn start_node_prefers_rich_neighbors_then_low_id() {
        // star 0-{1,2,3} plus tail 3-4: leaves 1,2 see degree 3, node 4 sees degree 2
        let t = Topology::new(5, [(0, 1), (0, 2), (0, 3), (3, 4)]).unwrap();
        assert_eq!(start_node(&t), Some(NodeId(1)));
        assert_eq!(start_node(&Topology::cycle(5)), Some(NodeId(0)));
        assert_eq!(start_node(&Topology::empty(0)), None);
    }

    #[test]
    fn square_edges_equal() {
        let l = kkmsds_layout(&Topology::cycle(4), &KkParams::default(), 7).unwrap();
        let p = l.positions();
        let lens: Vec<f64> = (0..4).map(|i| p[i].distance(p[(i + 1) % 4])).collect();
        let mean = lens.iter().sum::<f64>() / 4.0;
        for x in lens {
            assert!((x - mean).abs() <= 0.05 * mean, "{x} vs {mean}");
        }
    }

    #[test]
    fn lattice_reaches_stable_state() {
        let k = 10u32;
        let mut edges = Vec::new();
        for y in 0..k {
            for x in 0..k {
                let i = y * k + x;
                if x + 1 < k {
                    edges.push((i, i + 1));
                }
                if y + 1 < k {
                    edges.push((i, i + k));
                }
            }
        }
        let t = Topology::new(100, edges).unwrap();
        let mut e = KkEngine::new(&t, KkParams::default(), 1).unwrap();
        while e.phase() != KkPhase::Done {
            e.iterate().unwrap();
        }
        assert!(e.ratio() < 0.05, "r = {}", e.ratio());
    }

    #[test]
    fn empty_and_single() {
        let mut e = KkEngine::new(&Topology::empty(0), KkParams::default(), 1).unwrap();
        e.iterate().unwrap();
        assert!(e.snapshot().is_empty());
        assert_eq!(e.phase(), KkPhase::Done);
        let mut e = KkEngine::new(&Topology::empty(1), KkParams::default(), 1).unwrap();
        e.iterate().unwrap();
        assert_eq!(e.snapshot().len(), 1);
    }

    #[test]
    fn detached_components_are_placed_apart() {
        let t = Topology::new(7, [(0, 1), (1, 2), (2, 3), (3, 0), (4, 5)]).unwrap();
        let l = kkmsds_layout(&t, &KkParams::default(), 2).unwrap();
        let p = l.positions();
        assert!(p.iter().all(|q| q.is_finite()));
        assert!(p[4].distance(p[0]) > 0.5);
        assert!(p[6].distance(p[4]) > 0.5);
    }
}
