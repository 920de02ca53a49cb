//! Undirected interaction networks.
//!
//! Everything downstream couples oscillators through a simple graph: the
//! adjacency matrix `A` is symmetric, zero on the diagonal, and every node
//! has degree at least one. [`Network`] enforces those invariants at
//! construction together with connectedness, so the dynamics layer never has
//! to re-validate topology.
//!
//! Supported families: complete graphs, Watts–Strogatz small-world rings,
//! Erdős–Rényi G(n, p), Barabási–Albert preferential attachment, and
//! explicit edge lists loaded from disk. Generators that can produce a
//! disconnected sample resample with a fresh sub-seed up to a fixed retry
//! budget instead of failing outright.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Adjacency is additionally materialised as a dense boolean matrix for
/// graphs up to this many nodes (fast membership tests; tiny memory).
const DENSE_LIMIT: usize = 2048;

/// How many times a random-graph generator may resample before giving up on
/// connectedness.
const MAX_RESAMPLE: u64 = 100;

/// RNG stream block reserved for network generation (attempt `k` uses stream
/// `NETWORK_STREAM_BASE + k`); kept well away from the dynamics streams so a
/// shared master seed never aliases draws.
const NETWORK_STREAM_BASE: u64 = 100;

/// Column interpretation for edge-list files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Indexing {
    /// Node ids start at 0.
    ZeroBased,
    /// Node ids start at 1 (converted on load).
    OneBased,
}

/// Graph family plus its family-specific parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NetworkKind {
    /// All-to-all coupling.
    Complete,
    /// Watts–Strogatz ring: each node is wired to its `k` nearest
    /// neighbours, then every lattice edge is rewired with probability `p`.
    /// `k` must be even with `2 <= k < n`.
    WattsStrogatz { k: usize, p: f64 },
    /// Erdős–Rényi G(n, p): every unordered pair is an edge independently
    /// with probability `p`.
    ErdosRenyi { p: f64 },
    /// Barabási–Albert growth: nodes arrive one at a time and attach `m`
    /// edges preferentially to high-degree targets.
    BarabasiAlbert { m: usize },
    /// Edges read from a whitespace-separated file; see [`load_edge_list`].
    EdgeList { path: PathBuf, indexing: Indexing },
}

/// Full recipe for a network: family, size, and generation seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub kind: NetworkKind,
    /// Number of nodes. For [`NetworkKind::EdgeList`], `0` means "take the
    /// size from the file"; a positive value must match the file.
    pub n: usize,
    pub seed: u64,
}

impl NetworkSpec {
    pub fn complete(n: usize) -> Self {
        NetworkSpec { kind: NetworkKind::Complete, n, seed: 0 }
    }

    pub fn watts_strogatz(n: usize, k: usize, p: f64, seed: u64) -> Self {
        NetworkSpec { kind: NetworkKind::WattsStrogatz { k, p }, n, seed }
    }

    pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Self {
        NetworkSpec { kind: NetworkKind::ErdosRenyi { p }, n, seed }
    }

    pub fn barabasi_albert(n: usize, m: usize, seed: u64) -> Self {
        NetworkSpec { kind: NetworkKind::BarabasiAlbert { m }, n, seed }
    }

    /// The same spec with a different seed (used by batch runners that give
    /// every realisation its own topology draw).
    pub fn with_seed(&self, seed: u64) -> Self {
        let mut s = self.clone();
        s.seed = seed;
        s
    }

    /// The same spec resized to `n` nodes (used by finite-size scans).
    pub fn with_n(&self, n: usize) -> Self {
        let mut s = self.clone();
        s.n = n;
        s
    }
}

/// A validated undirected graph.
///
/// Invariants (checked at construction): symmetric 0/1 adjacency, zero
/// diagonal, minimum degree 1, single connected component.
#[derive(Debug, Clone)]
pub struct Network {
    n: usize,
    /// Sorted neighbour lists, one per node.
    adj: Vec<Vec<u32>>,
    degree: Vec<u32>,
    /// Row-major dense adjacency, only kept for `n <= DENSE_LIMIT`.
    dense: Option<Vec<bool>>,
    complete: bool,
}

impl Network {
    /// Build a network from an undirected edge set over `n` nodes.
    ///
    /// Duplicate edges (in either orientation) collapse to one; self-loops
    /// are rejected. Fails if any node ends up isolated or the graph is
    /// disconnected.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!(
                "a network needs at least 2 nodes, got {n}"
            )));
        }
        let mut sets: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); n];
        for &(a, b) in edges {
            if a == b {
                return Err(Error::InvalidParameter(format!(
                    "self-loop on node {a} is not allowed"
                )));
            }
            let (a, b) = (a as usize, b as usize);
            if a >= n || b >= n {
                return Err(Error::InvalidParameter(format!(
                    "edge ({a}, {b}) references a node outside 0..{n}"
                )));
            }
            sets[a].insert(b as u32);
            sets[b].insert(a as u32);
        }
        Self::from_neighbour_sets(sets)
    }

    fn from_neighbour_sets(sets: Vec<BTreeSet<u32>>) -> Result<Self> {
        let n = sets.len();
        let adj: Vec<Vec<u32>> = sets.into_iter().map(|s| s.into_iter().collect()).collect();
        let degree: Vec<u32> = adj.iter().map(|a| a.len() as u32).collect();
        if let Some(i) = degree.iter().position(|&d| d == 0) {
            return Err(Error::Disconnected(format!("node {i} is isolated")));
        }
        let dense = if n <= DENSE_LIMIT {
            let mut d = vec![false; n * n];
            for (i, nbrs) in adj.iter().enumerate() {
                for &j in nbrs {
                    d[i * n + j as usize] = true;
                }
            }
            Some(d)
        } else {
            None
        };
        let complete = degree.iter().all(|&d| d as usize == n - 1);
        let net = Network { n, adj, degree, dense, complete };
        if !net.is_connected() {
            return Err(Error::Disconnected(format!(
                "graph on {n} nodes has more than one component"
            )));
        }
        debug_assert!(net.check_symmetry());
        Ok(net)
    }

    fn check_symmetry(&self) -> bool {
        self.adj.iter().enumerate().all(|(i, nbrs)| {
            nbrs.iter().all(|&j| {
                j as usize != i && self.adj[j as usize].binary_search(&(i as u32)).is_ok()
            })
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Total number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.degree.iter().map(|&d| d as usize).sum::<usize>() / 2
    }

    pub fn degree(&self, i: usize) -> usize {
        self.degree[i] as usize
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degree
    }

    pub fn neighbours(&self, i: usize) -> &[u32] {
        &self.adj[i]
    }

    /// True when every pair of distinct nodes is adjacent (the dynamics use
    /// this to switch to an O(n) mean-field accumulation).
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        match &self.dense {
            Some(d) => d[i * self.n + j],
            None => self.adj[i].binary_search(&(j as u32)).is_ok(),
        }
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut queue = std::collections::VecDeque::new();
        seen[0] = true;
        queue.push_back(0u32);
        let mut count = 1usize;
        while let Some(u) = queue.pop_front() {
            for &v in &self.adj[u as usize] {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == self.n
    }

    /// Exact average shortest-path length over unordered node pairs,
    /// computed with one breadth-first search per source.
    pub fn aspl(&self) -> f64 {
        let mut total: u64 = 0;
        let mut dist = vec![u32::MAX; self.n];
        let mut queue = std::collections::VecDeque::new();
        for s in 0..self.n {
            dist.fill(u32::MAX);
            dist[s] = 0;
            queue.clear();
            queue.push_back(s as u32);
            while let Some(u) = queue.pop_front() {
                let du = dist[u as usize];
                for &v in &self.adj[u as usize] {
                    if dist[v as usize] == u32::MAX {
                        dist[v as usize] = du + 1;
                        queue.push_back(v);
                    }
                }
            }
            total += dist.iter().map(|&d| d as u64).sum::<u64>();
        }
        // Each unordered pair is counted twice (once per direction).
        total as f64 / (self.n as f64 * (self.n as f64 - 1.0))
    }
}

/// Generate (or load) the network described by `spec`.
///
/// Random families draw from a ChaCha stream derived from `spec.seed`;
/// samples that come out disconnected are retried with a fresh sub-stream,
/// at most [`MAX_RESAMPLE`] times.
pub fn generate(spec: &NetworkSpec) -> Result<Network> {
    match &spec.kind {
        NetworkKind::Complete => complete(spec.n),
        NetworkKind::EdgeList { path, indexing } => {
            let net = load_edge_list(path, *indexing)?;
            if spec.n != 0 && spec.n != net.n() {
                return Err(Error::InvalidParameter(format!(
                    "edge list has {} nodes but the spec says {}",
                    net.n(),
                    spec.n
                )));
            }
            Ok(net)
        }
        NetworkKind::WattsStrogatz { k, p } => {
            retry_connected(spec, |rng| watts_strogatz(spec.n, *k, *p, rng))
        }
        NetworkKind::ErdosRenyi { p } => {
            retry_connected(spec, |rng| erdos_renyi(spec.n, *p, rng))
        }
        NetworkKind::BarabasiAlbert { m } => {
            retry_connected(spec, |rng| barabasi_albert(spec.n, *m, rng))
        }
    }
}

fn retry_connected(
    spec: &NetworkSpec,
    mut build: impl FnMut(&mut rand_chacha::ChaCha8Rng) -> Result<Network>,
) -> Result<Network> {
    let mut last = String::new();
    for attempt in 0..MAX_RESAMPLE {
        let mut stream = rng::substream(spec.seed, NETWORK_STREAM_BASE + attempt);
        match build(&mut stream) {
            Ok(net) => return Ok(net),
            Err(Error::Disconnected(msg)) => last = msg,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Disconnected(format!(
        "still disconnected after {MAX_RESAMPLE} attempts (last: {last})"
    )))
}

fn complete(n: usize) -> Result<Network> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "complete graph needs n >= 2, got {n}"
        )));
    }
    let sets: Vec<BTreeSet<u32>> = (0..n)
        .map(|i| (0..n as u32).filter(|&j| j as usize != i).collect())
        .collect();
    Network::from_neighbour_sets(sets)
}

fn watts_strogatz(n: usize, k: usize, p: f64, rng: &mut rand_chacha::ChaCha8Rng) -> Result<Network> {
    if k % 2 != 0 || k < 2 || k >= n {
        return Err(Error::InvalidParameter(format!(
            "Watts-Strogatz needs even k with 2 <= k < n, got k = {k}, n = {n}"
        )));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "rewiring probability must lie in [0, 1], got {p}"
        )));
    }
    let mut sets: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); n];
    for j in 1..=k / 2 {
        for i in 0..n {
            let t = (i + j) % n;
            sets[i].insert(t as u32);
            sets[t].insert(i as u32);
        }
    }
    // Rewire each lattice edge (i, i+j) with probability p, keeping the
    // i-endpoint and drawing a fresh partner uniformly among non-neighbours.
    for j in 1..=k / 2 {
        for i in 0..n {
            if rng.random::<f64>() >= p {
                continue;
            }
            if sets[i].len() == n - 1 {
                continue; // node already saturated, nothing to rewire to
            }
            let w = loop {
                let c = rng.random_range(0..n as u32);
                if c as usize != i && !sets[i].contains(&c) {
                    break c;
                }
            };
            let t = ((i + j) % n) as u32;
            sets[i].remove(&t);
            sets[t as usize].remove(&(i as u32));
            sets[i].insert(w);
            sets[w as usize].insert(i as u32);
        }
    }
    Network::from_neighbour_sets(sets)
}

fn erdos_renyi(n: usize, p: f64, rng: &mut rand_chacha::ChaCha8Rng) -> Result<Network> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "edge probability must lie in [0, 1], got {p}"
        )));
    }
    let mut sets: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < p {
                sets[i].insert(j as u32);
                sets[j].insert(i as u32);
            }
        }
    }
    Network::from_neighbour_sets(sets)
}

fn barabasi_albert(n: usize, m: usize, rng: &mut rand_chacha::ChaCha8Rng) -> Result<Network> {
    if m < 1 || m >= n {
        return Err(Error::InvalidParameter(format!(
            "Barabasi-Albert needs 1 <= m < n, got m = {m}, n = {n}"
        )));
    }
    let mut sets: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); n];
    // Degree-weighted sampling via the classic repeated-node list: every
    // edge endpoint is appended once, so drawing uniformly from the list is
    // drawing proportionally to degree.
    let mut repeated: Vec<u32> = Vec::with_capacity(2 * m * n);
    let mut targets: Vec<u32> = (0..m as u32).collect();
    for v in m..n {
        for &t in &targets {
            sets[v].insert(t);
            sets[t as usize].insert(v as u32);
        }
        repeated.extend_from_slice(&targets);
        repeated.extend(std::iter::repeat(v as u32).take(m));
        let mut next = BTreeSet::new();
        while next.len() < m {
            next.insert(repeated[rng.random_range(0..repeated.len())]);
        }
        targets = next.into_iter().collect();
    }
    Network::from_neighbour_sets(sets)
}

/// Load an undirected edge list from a text file.
///
/// One edge per line as two whitespace-separated integers; blank lines and
/// lines starting with `#` or `%` are skipped. Duplicate edges collapse to
/// one; a self-loop is an error that names the offending line. With
/// [`Indexing::OneBased`], ids are shifted down by one on load. The node
/// count is `max id + 1` after shifting; every node must end up connected.
pub fn load_edge_list(path: &Path, indexing: Indexing) -> Result<Network> {
    let text = std::fs::read_to_string(path)?;
    let mut edges: Vec<(u32, u32)> = Vec::new();
    let mut max_id: u32 = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('%') {
            continue;
        }
        let mut tok = line.split_whitespace();
        let (a, b) = match (tok.next(), tok.next()) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(Error::EdgeListParse {
                    line: line_no,
                    reason: format!("expected two node ids, got {line:?}"),
                })
            }
        };
        if tok.next().is_some() {
            return Err(Error::EdgeListParse {
                line: line_no,
                reason: format!("expected exactly two node ids, got {line:?}"),
            });
        }
        let parse = |s: &str| -> Result<u64> {
            s.parse::<u64>().map_err(|_| Error::EdgeListParse {
                line: line_no,
                reason: format!("{s:?} is not a non-negative integer"),
            })
        };
        let (mut u, mut v) = (parse(a)?, parse(b)?);
        if indexing == Indexing::OneBased {
            if u == 0 || v == 0 {
                return Err(Error::EdgeListParse {
                    line: line_no,
                    reason: "node id 0 is invalid in a one-based file".into(),
                });
            }
            u -= 1;
            v -= 1;
        }
        if u == v {
            return Err(Error::EdgeListParse {
                line: line_no,
                reason: format!("self-loop on node {u}"),
            });
        }
        if u > u32::MAX as u64 || v > u32::MAX as u64 {
            return Err(Error::EdgeListParse {
                line: line_no,
                reason: "node id exceeds the supported range".into(),
            });
        }
        max_id = max_id.max(u as u32).max(v as u32);
        edges.push((u as u32, v as u32));
    }
    if edges.is_empty() {
        return Err(Error::InvalidParameter("edge list file contains no edges".into()));
    }
    Network::from_edges(max_id as usize + 1, &edges)
}
