//! Owned-graph representation and metric primitives.
//!
//! Graphs are simple and undirected over dense vertex ids `0..n`. An
//! [`OwnedGraph`] additionally records, for every edge, which endpoint
//! bought it: the set of neighbors `v` bought by `u` is exactly `u`'s
//! strategy in the game. Unreachable is always represented as `None`,
//! never as a sentinel distance that could leak into cost arithmetic.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("edge ({0}, {1}) already present")]
    DuplicateEdge(usize, usize),
    #[error("edge ({0}, {1}) not present")]
    MissingEdge(usize, usize),
    #[error("vertex {0} out of range (n = {1})")]
    VertexOutOfRange(usize, usize),
    #[error("owner {owner} is not an endpoint of edge ({u}, {v})")]
    BadOwner { u: usize, v: usize, owner: usize },
}

#[derive(Debug, Error)]
pub enum ReadError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Simple undirected graph with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    n: usize,
    m: usize,
    adj: Vec<Vec<usize>>,
}

impl SimpleGraph {
    pub fn new(n: usize) -> Self {
        SimpleGraph {
            n,
            m: 0,
            adj: vec![Vec::new(); n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adj[u]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    fn check_endpoints(&self, u: usize, v: usize) -> Result<(), GraphError> {
        if u >= self.n {
            return Err(GraphError::VertexOutOfRange(u, self.n));
        }
        if v >= self.n {
            return Err(GraphError::VertexOutOfRange(v, self.n));
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        Ok(())
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        self.check_endpoints(u, v)?;
        match self.adj[u].binary_search(&v) {
            Ok(_) => return Err(GraphError::DuplicateEdge(u, v)),
            Err(pos) => self.adj[u].insert(pos, v),
        }
        let pos = self.adj[v].binary_search(&u).unwrap_err();
        self.adj[v].insert(pos, u);
        self.m += 1;
        Ok(())
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        self.check_endpoints(u, v)?;
        match self.adj[u].binary_search(&v) {
            Ok(pos) => self.adj[u].remove(pos),
            Err(_) => return Err(GraphError::MissingEdge(u, v)),
        };
        let pos = self.adj[v].binary_search(&u).unwrap();
        self.adj[v].remove(pos);
        self.m -= 1;
        Ok(())
    }

    /// Edges as `(u, v)` pairs with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| {
            self.adj[u]
                .iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    /// Exact unweighted shortest-path distances from `u`; `None` marks
    /// unreachable vertices.
    pub fn bfs_distances(&self, u: usize) -> Vec<Option<usize>> {
        assert!(u < self.n, "vertex {} out of range (n = {})", u, self.n);
        let mut dist = vec![None; self.n];
        dist[u] = Some(0);
        let mut queue = VecDeque::new();
        queue.push_back(u);
        while let Some(x) = queue.pop_front() {
            let dx = dist[x].unwrap();
            for &y in &self.adj[x] {
                if dist[y].is_none() {
                    dist[y] = Some(dx + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Max distance from `u`, or `None` if some vertex is unreachable.
    pub fn eccentricity(&self, u: usize) -> Option<usize> {
        let dist = self.bfs_distances(u);
        let mut ecc = 0;
        for d in dist {
            ecc = ecc.max(d?);
        }
        Some(ecc)
    }

    /// Max eccentricity, or `None` if the graph is disconnected.
    pub fn diameter(&self) -> Option<usize> {
        if self.n == 0 {
            return Some(0);
        }
        let mut diam = 0;
        for u in 0..self.n {
            diam = diam.max(self.eccentricity(u)?);
        }
        Some(diam)
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        self.bfs_distances(0).iter().all(|d| d.is_some())
    }

    /// Shortest cycle length, or `None` if the graph is acyclic.
    ///
    /// For each edge we BFS between its endpoints with that edge banned;
    /// exact and fast enough at desk scale.
    pub fn girth(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (u, v) in self.edges() {
            if let Some(d) = self.distance_avoiding_edge(u, v) {
                let cycle = d + 1;
                best = Some(best.map_or(cycle, |b| b.min(cycle)));
            }
        }
        best
    }

    /// Distance from `u` to `v` without using the edge `(u, v)`.
    fn distance_avoiding_edge(&self, u: usize, v: usize) -> Option<usize> {
        let mut dist = vec![None; self.n];
        dist[u] = Some(0);
        let mut queue = VecDeque::new();
        queue.push_back(u);
        while let Some(x) = queue.pop_front() {
            let dx = dist[x].unwrap();
            for &y in &self.adj[x] {
                if x == u && y == v {
                    continue;
                }
                if dist[y].is_none() {
                    dist[y] = Some(dx + 1);
                    if y == v {
                        return Some(dx + 1);
                    }
                    queue.push_back(y);
                }
            }
        }
        None
    }

    /// The `h`-th power: same vertices, edge `(u, v)` iff `0 < d(u, v) <= h`.
    pub fn power(&self, h: usize) -> SimpleGraph {
        let mut out = SimpleGraph::new(self.n);
        if h == 0 {
            return out;
        }
        for u in 0..self.n {
            for (v, d) in self.bfs_distances(u).into_iter().enumerate() {
                if u < v {
                    if let Some(d) = d {
                        if d <= h {
                            out.add_edge(u, v).expect("power edges are fresh");
                        }
                    }
                }
            }
        }
        out
    }
}

/// Simple undirected graph where every edge records the endpoint that
/// bought it. `strategy(u)` is the set of neighbors `u` bought.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OwnedGraph {
    topo: SimpleGraph,
    bought: Vec<BTreeSet<usize>>,
}

impl OwnedGraph {
    pub fn new(n: usize) -> Self {
        OwnedGraph {
            topo: SimpleGraph::new(n),
            bought: vec![BTreeSet::new(); n],
        }
    }

    pub fn n(&self) -> usize {
        self.topo.n
    }

    pub fn edge_count(&self) -> usize {
        self.topo.m
    }

    pub fn degree(&self, u: usize) -> usize {
        self.topo.degree(u)
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        self.topo.neighbors(u)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.topo.has_edge(u, v)
    }

    pub fn topology(&self) -> &SimpleGraph {
        &self.topo
    }

    pub fn add_edge(&mut self, u: usize, v: usize, owner: usize) -> Result<(), GraphError> {
        if owner != u && owner != v {
            return Err(GraphError::BadOwner { u, v, owner });
        }
        self.topo.add_edge(u, v)?;
        let other = if owner == u { v } else { u };
        self.bought[owner].insert(other);
        Ok(())
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        self.topo.remove_edge(u, v)?;
        self.bought[u].remove(&v);
        self.bought[v].remove(&u);
        Ok(())
    }

    pub fn owner(&self, u: usize, v: usize) -> Result<usize, GraphError> {
        if !self.has_edge(u, v) {
            return Err(GraphError::MissingEdge(u, v));
        }
        if self.bought[u].contains(&v) {
            Ok(u)
        } else {
            Ok(v)
        }
    }

    /// The strategy of `u`: neighbors whose connecting edge `u` bought.
    pub fn strategy(&self, u: usize) -> &BTreeSet<usize> {
        &self.bought[u]
    }

    pub fn bought_count(&self, u: usize) -> usize {
        self.bought[u].len()
    }

    /// Neighbors that bought their edge towards `u`.
    pub fn in_neighbors(&self, u: usize) -> Vec<usize> {
        self.topo.neighbors(u)
            .iter()
            .copied()
            .filter(|&v| self.bought[v].contains(&u))
            .collect()
    }

    /// Replace `u`'s owned edges with edges towards `endpoints`.
    ///
    /// Edges bought by others towards `u` persist. Fails if an endpoint
    /// collides with an edge someone else already owns.
    pub fn set_strategy(&mut self, u: usize, endpoints: &BTreeSet<usize>) -> Result<(), GraphError> {
        for &e in endpoints {
            if e >= self.n() {
                return Err(GraphError::VertexOutOfRange(e, self.n()));
            }
            if e == u {
                return Err(GraphError::SelfLoop(u));
            }
            if !self.bought[u].contains(&e) && self.has_edge(u, e) {
                return Err(GraphError::DuplicateEdge(u, e));
            }
        }
        let old: Vec<usize> = self.bought[u].iter().copied().collect();
        for v in old {
            self.remove_edge(u, v)?;
        }
        for &e in endpoints {
            self.add_edge(u, e, u)?;
        }
        Ok(())
    }

    /// Edges as `(u, v, owner)` with `u < v`, in lexicographic order.
    pub fn edges_with_owner(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.topo.edges().map(move |(u, v)| {
            let owner = if self.bought[u].contains(&v) { u } else { v };
            (u, v, owner)
        })
    }

    /// Canonical strategy profile: sorted `(owner, endpoint)` pairs.
    pub fn profile(&self) -> Vec<(usize, usize)> {
        let mut pairs: Vec<(usize, usize)> = (0..self.n())
            .flat_map(|u| self.bought[u].iter().map(move |&v| (u, v)))
            .collect();
        pairs.sort_unstable();
        pairs
    }

    pub fn bfs_distances(&self, u: usize) -> Vec<Option<usize>> {
        self.topo.bfs_distances(u)
    }

    pub fn eccentricity(&self, u: usize) -> Option<usize> {
        self.topo.eccentricity(u)
    }

    pub fn diameter(&self) -> Option<usize> {
        self.topo.diameter()
    }

    pub fn girth(&self) -> Option<usize> {
        self.topo.girth()
    }

    pub fn is_connected(&self) -> bool {
        self.topo.is_connected()
    }

    /// Serialize to the plain-text edge-list format:
    /// a `ncg n=<n>` header, then one `u v owner` line per edge.
    pub fn to_edge_list_string(&self) -> String {
        let mut out = String::new();
        writeln!(out, "ncg n={}", self.n()).unwrap();
        for (u, v, owner) in self.edges_with_owner() {
            writeln!(out, "{} {} {}", u, v, owner).unwrap();
        }
        out
    }

    pub fn from_edge_list_str(s: &str) -> Result<Self, ReadError> {
        let mut lines = s.lines().enumerate();
        let (_, header) = lines.next().ok_or(ReadError::Malformed {
            line: 1,
            msg: "empty input".into(),
        })?;
        let n: usize = header
            .strip_prefix("ncg n=")
            .and_then(|rest| rest.trim().parse().ok())
            .ok_or(ReadError::Malformed {
                line: 1,
                msg: format!("expected header `ncg n=<n>`, got `{}`", header),
            })?;
        let mut g = OwnedGraph::new(n);
        for (idx, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let mut next_field = |name: &str| -> Result<usize, ReadError> {
                it.next()
                    .and_then(|t| t.parse().ok())
                    .ok_or(ReadError::Malformed {
                        line: idx + 1,
                        msg: format!("missing or invalid {}", name),
                    })
            };
            let u = next_field("vertex")?;
            let v = next_field("vertex")?;
            let owner = next_field("owner")?;
            if it.next().is_some() {
                return Err(ReadError::Malformed {
                    line: idx + 1,
                    msg: "trailing tokens after `u v owner`".into(),
                });
            }
            g.add_edge(u, v, owner)?;
        }
        Ok(g)
    }

    pub fn write_to_file<P: AsRef<Path>>(&self, path: P) -> Result<(), std::io::Error> {
        std::fs::write(path, self.to_edge_list_string())
    }

    pub fn read_from_file<P: AsRef<Path>>(path: P) -> Result<Self, ReadError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_edge_list_str(&text)
    }
}
