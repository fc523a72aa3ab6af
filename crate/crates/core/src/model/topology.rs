use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

/// Dense sensor identifier in `0..n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for NodeId {
    fn from(v: u32) -> Self {
        NodeId(v)
    }
}

/// Undirected communication graph. Edges are stored canonically (`u < v`) and sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Topology {
    n: usize,
    edges: Vec<(NodeId, NodeId)>,
    adjacency: Vec<Vec<NodeId>>,
}

impl Topology {
    /// Builds a topology, dropping duplicate edges regardless of orientation.
    pub fn new<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::InvalidInput(format!("self-loop on node {u}")));
            }
            if u as usize >= n || v as usize >= n {
                return Err(Error::InvalidInput(format!(
                    "endpoint out of range: ({u}, {v}) with n = {n}"
                )));
            }
            set.insert((u.min(v), u.max(v)));
        }
        Ok(Self::from_canonical(n, set))
    }

    fn from_canonical(n: usize, set: BTreeSet<(u32, u32)>) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        let edges: Vec<_> = set
            .into_iter()
            .map(|(u, v)| {
                adjacency[u as usize].push(NodeId(v));
                adjacency[v as usize].push(NodeId(u));
                (NodeId(u), NodeId(v))
            })
            .collect();
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Topology {
            n,
            edges,
            adjacency,
        }
    }

    /// A graph on `n` nodes without edges.
    pub fn empty(n: usize) -> Self {
        Self::from_canonical(n, BTreeSet::new())
    }

    /// The `k`-cycle `0-1-...-(k-1)-0`.
    pub fn cycle(k: usize) -> Self {
        let edges = (0..k).map(|i| (i as u32, ((i + 1) % k) as u32));
        Self::new(k, edges).expect("cycle edges are valid")
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.n as u32).map(NodeId)
    }

    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adjacency[v.index()]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adjacency[v.index()].len()
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.adjacency[u.index()].binary_search(&v).is_ok()
    }

    /// `2|E| / n`, zero for an empty node set.
    pub fn average_degree(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            2.0 * self.edges.len() as f64 / self.n as f64
        }
    }

    /// BFS hop counts from `src`; unreachable nodes get `u32::MAX`.
    pub fn hop_distances(&self, src: NodeId) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.n];
        let mut queue = VecDeque::new();
        dist[src.index()] = 0;
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            let du = dist[u.index()];
            for &w in self.neighbors(u) {
                if dist[w.index()] == u32::MAX {
                    dist[w.index()] = du + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Connected components, each sorted, ordered by size descending then smallest member.
    pub fn components(&self) -> Vec<Vec<NodeId>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            let mut comp = vec![NodeId(start as u32)];
            seen[start] = true;
            let mut head = 0;
            while head < comp.len() {
                let u = comp[head];
                head += 1;
                for &w in self.neighbors(u) {
                    if !seen[w.index()] {
                        seen[w.index()] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
        out
    }

    /// Parses the `.top` format: an `n m` header followed by `m` edge lines `u v`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());

        let (hline, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "missing 'n m' header"))?;
        let (n, m) = parse_pair(header)
            .ok_or_else(|| Error::parse(hline, format!("malformed header '{header}'")))?;
        let n = n as usize;

        let mut set = BTreeSet::new();
        let mut count = 0usize;
        for (lineno, line) in lines {
            let (u, v) = parse_pair(line)
                .ok_or_else(|| Error::parse(lineno, format!("malformed edge line '{line}'")))?;
            if u as usize >= n || v as usize >= n {
                return Err(Error::parse(lineno, "endpoint out of range"));
            }
            if u == v {
                return Err(Error::parse(lineno, "self-loop"));
            }
            count += 1;
            if count > m as usize {
                return Err(Error::parse(lineno, format!("more than {m} edge lines")));
            }
            set.insert((u.min(v), u.max(v)));
        }
        if count != m as usize {
            return Err(Error::parse(
                hline,
                format!("header declares {m} edges, found {count}"),
            ));
        }
        Ok(Self::from_canonical(n, set))
    }

    /// Writes the `.top` format with canonical, sorted edges.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.edges.len());
        for (u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }
}

fn parse_pair(line: &str) -> Option<(u32, u32)> {
    let mut it = line.split_whitespace();
    let a = it.next()?.parse().ok()?;
    let b = it.next()?.parse().ok()?;
    if it.next().is_some() {
        return None;
    }
    Some((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_square_cycle() {
        let t = Topology::parse("4 4\n0 1\n1 2\n2 3\n3 0").unwrap();
        assert_eq!(t.node_count(), 4);
        assert_eq!(t.edge_count(), 4);
        assert_eq!(t.average_degree(), 2.0);
    }

    #[test]
    fn parses_triangle() {
        let t = Topology::parse("3 3\n0 1\n1 2\n2 0").unwrap();
        assert_eq!(t.edge_count(), 3);
        assert!(t.has_edge(NodeId(0), NodeId(2)));
    }

    #[test]
    fn endpoint_out_of_range_names_line() {
        let err = Topology::parse("2 1\n0 2").unwrap_err();
        match err {
            Error::Parse { line, msg } => {
                assert_eq!(line, 2);
                assert!(msg.contains("endpoint out of range"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(
            Topology::parse("2 1\n0 2").unwrap_err().to_string(),
            "parse error, line 2: endpoint out of range"
        );
    }

    #[test]
    fn self_loop_and_malformed_lines_are_rejected() {
        assert!(matches!(
            Topology::parse("3 1\n1 1"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            Topology::parse("3 2\n0 1\n1 x"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            Topology::parse("3 2\n0 1"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn duplicate_edges_collapse_order_insensitively() {
        let t = Topology::parse("3 3\n0 1\n1 0\n1 2").unwrap();
        assert_eq!(t.edge_count(), 2);
    }

    #[test]
    fn components_sorted_by_size() {
        let t = Topology::new(5, [(3, 4), (0, 1), (1, 2)]).unwrap();
        let c = t.components();
        assert_eq!(c.len(), 2);
        assert_eq!(c[0], vec![NodeId(0), NodeId(1), NodeId(2)]);
    }
}
