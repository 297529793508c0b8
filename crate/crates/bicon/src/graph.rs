//! Undirected simple graphs over dense integer node IDs, plus ingestion,
//! generators for the test corpus, the lower-bound gadget, and DOT export.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

pub type NodeId = usize;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: expected two node ids, got {content:?}")]
    MalformedLine { line: usize, content: String },
    #[error("line {line}: self-loop on node {node}")]
    SelfLoopLine { line: usize, node: NodeId },
    #[error("edge list is empty; node count cannot be inferred")]
    EmptyEdgeList,
    #[error("self-loop on node {node}")]
    SelfLoop { node: NodeId },
    #[error("node {node} out of range for graph with {n} nodes")]
    NodeOutOfRange { node: NodeId, n: usize },
    #[error("unsatisfiable generator parameters: {reason}")]
    UnsatisfiableParams { reason: String },
    #[error("graph must be connected")]
    Disconnected,
    #[error("edge {0} not present in graph")]
    EdgeNotInGraph(Edge),
    #[error("graph has {n} nodes, exceeding the cycle enumeration cap of {cap}")]
    NodeCapExceeded { n: usize, cap: usize },
    #[error("simple cycle count exceeds the cap of {cap}")]
    CycleCapExceeded { cap: usize },
}

/// An unordered pair of distinct nodes, stored with the smaller ID first.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Edge(NodeId, NodeId);

impl Edge {
    pub fn new(u: NodeId, v: NodeId) -> Edge {
        assert_ne!(u, v, "edge endpoints must differ");
        if u < v {
            Edge(u, v)
        } else {
            Edge(v, u)
        }
    }

    pub fn u(&self) -> NodeId {
        self.0
    }

    pub fn v(&self) -> NodeId {
        self.1
    }

    pub fn endpoints(&self) -> (NodeId, NodeId) {
        (self.0, self.1)
    }

    /// The endpoint that is not `x`. Panics if `x` is not an endpoint.
    pub fn other(&self, x: NodeId) -> NodeId {
        if x == self.0 {
            self.1
        } else {
            assert_eq!(x, self.1, "node {x} is not an endpoint of {self}");
            self.0
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.0, self.1)
    }
}

impl fmt::Debug for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.0, self.1)
    }
}

/// Immutable undirected simple graph. Neighbor lists are sorted ascending so
/// that every traversal in the crate is deterministic.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<Edge>,
    adj: Vec<Vec<NodeId>>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, m={}, edges={:?})", self.n, self.edges.len(), self.edges)
    }
}

impl Graph {
    /// Builds a graph over nodes `0..n`. Duplicate edges collapse.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Graph, GraphError>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        if n == 0 {
            return Err(GraphError::UnsatisfiableParams {
                reason: "graph must have at least one node".into(),
            });
        }
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u == v {
                return Err(GraphError::SelfLoop { node: u });
            }
            for x in [u, v] {
                if x >= n {
                    return Err(GraphError::NodeOutOfRange { node: x, n });
                }
            }
            set.insert(Edge::new(u, v));
        }
        let mut adj = vec![Vec::new(); n];
        for e in &set {
            adj[e.u()].push(e.v());
            adj[e.v()].push(e.u());
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph { n, edges: set, adj })
    }

    /// Parses a whitespace-separated edge list. Lines whose first non-blank
    /// character is `#` are comments; node count is `max id + 1`.
    pub fn parse_edge_list(text: &str) -> Result<Graph, GraphError> {
        let mut edges = Vec::new();
        let mut max_id = 0usize;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut parts = trimmed.split_whitespace();
            let (a, b) = match (parts.next(), parts.next(), parts.next()) {
                (Some(a), Some(b), None) => (a, b),
                _ => {
                    return Err(GraphError::MalformedLine { line, content: trimmed.into() });
                }
            };
            let parse = |s: &str| {
                s.parse::<usize>().map_err(|_| GraphError::MalformedLine {
                    line,
                    content: trimmed.to_string(),
                })
            };
            let (u, v) = (parse(a)?, parse(b)?);
            if u == v {
                return Err(GraphError::SelfLoopLine { line, node: u });
            }
            max_id = max_id.max(u).max(v);
            edges.push((u, v));
        }
        if edges.is_empty() {
            return Err(GraphError::EmptyEdgeList);
        }
        Graph::from_edges(max_id + 1, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        u != v && self.edges.contains(&Edge::new(u, v))
    }

    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adj[v]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adj[v].len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        0..self.n
    }

    /// True iff every node is reachable from node 0.
    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut queue = std::collections::VecDeque::new();
        seen[0] = true;
        queue.push_back(0);
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &w in self.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.n
    }

    /// Serializes the graph back to the edge-list format accepted by
    /// [`Graph::parse_edge_list`].
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for e in &self.edges {
            out.push_str(&format!("{} {}\n", e.u(), e.v()));
        }
        out
    }

    /// Replaces edge `e = (u, v)` by a subdivision node `w` carrying a pendant
    /// bridge, a triangle through `w`, and a second triangle hung off `w` by a
    /// bridge. New nodes are `n..n+7` in the order `w, p, t1, t2, s1, s2, s3`.
    pub fn attach_gadget(&self, e: Edge) -> Result<Graph, GraphError> {
        if !self.edges.contains(&e) {
            return Err(GraphError::EdgeNotInGraph(e));
        }
        let (u, v) = e.endpoints();
        let w = self.n;
        let p = self.n + 1;
        let t1 = self.n + 2;
        let t2 = self.n + 3;
        let s1 = self.n + 4;
        let s2 = self.n + 5;
        let s3 = self.n + 6;
        let mut edges: Vec<(NodeId, NodeId)> = self
            .edges
            .iter()
            .filter(|&&old| old != e)
            .map(Edge::endpoints)
            .collect();
        edges.extend([
            (u, w),
            (w, v),
            (w, p),
            (w, t1),
            (w, t2),
            (t1, t2),
            (w, s1),
            (s1, s2),
            (s1, s3),
            (s2, s3),
        ]);
        Graph::from_edges(self.n + 7, edges)
    }

    /// The ten edges [`Graph::attach_gadget`] adds when applied to a graph
    /// with this many nodes, in construction order.
    pub fn gadget_edges(n: usize, e: Edge) -> [Edge; 10] {
        let (u, v) = e.endpoints();
        let (w, p, t1, t2, s1, s2, s3) = (n, n + 1, n + 2, n + 3, n + 4, n + 5, n + 6);
        [
            Edge::new(u, w),
            Edge::new(w, v),
            Edge::new(w, p),
            Edge::new(w, t1),
            Edge::new(w, t2),
            Edge::new(t1, t2),
            Edge::new(w, s1),
            Edge::new(s1, s2),
            Edge::new(s1, s3),
            Edge::new(s2, s3),
        ]
    }

    /// Renders the graph as DOT. With a classification, bridges are dashed and
    /// labeled, and nodes are colored by component. Output is byte-stable.
    pub fn to_dot(&self, classification: Option<&EdgeClassification>) -> String {
        const PALETTE: [&str; 10] = [
            "lightblue", "lightsalmon", "palegreen", "khaki", "plum", "lightcyan", "wheat",
            "pink", "lightgray", "aquamarine",
        ];
        let mut out = String::from("graph G {\n  node [shape=circle];\n");
        match classification {
            Some(c) => {
                let mut distinct: Vec<usize> = c.component_label.clone();
                distinct.sort_unstable();
                distinct.dedup();
                for v in self.nodes() {
                    let label = c.component_label[v];
                    let idx = distinct.binary_search(&label).unwrap();
                    out.push_str(&format!(
                        "  {v} [label=\"{v}\\nc{label}\", style=filled, fillcolor={}];\n",
                        PALETTE[idx % PALETTE.len()]
                    ));
                }
                for e in &self.edges {
                    if c.bridges.contains(e) {
                        out.push_str(&format!(
                            "  {} -- {} [style=dashed, label=\"bridge\"];\n",
                            e.u(),
                            e.v()
                        ));
                    } else {
                        out.push_str(&format!("  {} -- {};\n", e.u(), e.v()));
                    }
                }
            }
            None => {
                for v in self.nodes() {
                    out.push_str(&format!("  {v} [label=\"{v}\"];\n"));
                }
                for e in &self.edges {
                    out.push_str(&format!("  {} -- {};\n", e.u(), e.v()));
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

/// The output of classifying every edge of a connected graph: the bridge set,
/// its complement (edges on simple cycles), and a per-node component label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeClassification {
    pub bridges: BTreeSet<Edge>,
    pub cycle_edges: BTreeSet<Edge>,
    pub component_label: Vec<usize>,
}

impl EdgeClassification {
    /// Label-agnostic partition comparison: the oracle labels components by
    /// minimum node ID while the protocol labels them by preorder label.
    pub fn same_partition(&self, other: &EdgeClassification) -> bool {
        same_partition(&self.component_label, &other.component_label)
    }
}

/// True iff two labelings induce the same partition of `0..n`.
pub fn same_partition(a: &[usize], b: &[usize]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    normalize_labels(a) == normalize_labels(b)
}

fn normalize_labels(labels: &[usize]) -> Vec<usize> {
    let mut map = std::collections::BTreeMap::new();
    let mut next = 0usize;
    labels
        .iter()
        .map(|&l| {
            *map.entry(l).or_insert_with(|| {
                let id = next;
                next += 1;
                id
            })
        })
        .collect()
}

/// Deterministic generators for the test corpus.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum GenSpec {
    Path { n: usize },
    Cycle { n: usize },
    Tree { n: usize },
    Barbell { k: usize },
    RandomConnected { n: usize, p: f64 },
}

/// Builds a connected graph from a spec. The same `(spec, seed)` always yields
/// the same graph.
pub fn generate(spec: &GenSpec, seed: u64) -> Result<Graph, GraphError> {
    let unsat = |reason: &str| GraphError::UnsatisfiableParams { reason: reason.into() };
    match *spec {
        GenSpec::Path { n } => {
            if n < 1 {
                return Err(unsat("path needs n >= 1"));
            }
            Graph::from_edges(n, (1..n).map(|i| (i - 1, i)))
        }
        GenSpec::Cycle { n } => {
            if n < 3 {
                return Err(unsat("cycle needs n >= 3"));
            }
            Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)))
        }
        GenSpec::Tree { n } => {
            if n < 1 {
                return Err(unsat("tree needs n >= 1"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let edges: Vec<_> = (1..n).map(|i| (rng.gen_range(0..i), i)).collect();
            Graph::from_edges(n, edges)
        }
        GenSpec::Barbell { k } => {
            if k < 3 {
                return Err(unsat("barbell needs cliques of size k >= 3"));
            }
            let mut edges = Vec::new();
            for base in [0, k] {
                for i in 0..k {
                    for j in i + 1..k {
                        edges.push((base + i, base + j));
                    }
                }
            }
            edges.push((k - 1, k));
            Graph::from_edges(2 * k, edges)
        }
        GenSpec::RandomConnected { n, p } => {
            if n < 1 {
                return Err(unsat("random graph needs n >= 1"));
            }
            if !(0.0..=1.0).contains(&p) {
                return Err(unsat("edge probability must lie in [0, 1]"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(p) {
                        edges.push((u, v));
                    }
                }
            }
            // Augment across components until connected.
            loop {
                let g = Graph::from_edges(n, edges.iter().copied())?;
                let comps = component_sets(&g);
                if comps.len() == 1 {
                    return Ok(g);
                }
                let a = &comps[0];
                let b = &comps[1];
                let u = a[rng.gen_range(0..a.len())];
                let v = b[rng.gen_range(0..b.len())];
                edges.push((u, v));
            }
        }
    }
}

/// Connected components as sorted node lists, ordered by smallest member.
fn component_sets(g: &Graph) -> Vec<Vec<NodeId>> {
    let mut seen = vec![false; g.n()];
    let mut comps = Vec::new();
    for start in g.nodes() {
        if seen[start] {
            continue;
        }
        let mut comp = vec![start];
        seen[start] = true;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &w in g.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                    queue.push_back(w);
                }
            }
        }
        comp.sort_unstable();
        comps.push(comp);
    }
    comps
}
