//! Sequential ground truth: bridge finding by edge deletion and by low-link
//! traversal, component labeling, diameter, simple-cycle enumeration, and the
//! cycle-witness radius.
//!
//! The deletion brute force is the definitional oracle; the low-link routine
//! is an independent second route, and the two are cross-checked in tests and
//! in the corpus harness.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::graph::{Edge, EdgeClassification, Graph, GraphError, NodeId};

/// BFS distances from `src`; `None` for unreachable nodes.
pub fn bfs_distances(g: &Graph, src: NodeId) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.n()];
    dist[src] = Some(0);
    let mut queue = VecDeque::from([src]);
    while let Some(v) = queue.pop_front() {
        let d = dist[v].unwrap();
        for &w in g.neighbors(v) {
            if dist[w].is_none() {
                dist[w] = Some(d + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

fn reachable_avoiding(g: &Graph, src: NodeId, skip: Option<Edge>) -> usize {
    let mut seen = vec![false; g.n()];
    seen[src] = true;
    let mut count = 1;
    let mut queue = VecDeque::from([src]);
    while let Some(v) = queue.pop_front() {
        for &w in g.neighbors(v) {
            if let Some(e) = skip {
                if Edge::new(v, w) == e {
                    continue;
                }
            }
            if !seen[w] {
                seen[w] = true;
                count += 1;
                queue.push_back(w);
            }
        }
    }
    count
}

/// Definitional bridge oracle: an edge is a bridge iff deleting it disconnects
/// the graph. Tests every edge by brute force.
pub fn bridges_brute_force(g: &Graph) -> Result<BTreeSet<Edge>, GraphError> {
    if !g.is_connected() {
        return Err(GraphError::Disconnected);
    }
    let mut bridges = BTreeSet::new();
    for &e in g.edges() {
        if reachable_avoiding(g, e.u(), Some(e)) != g.n() {
            bridges.insert(e);
        }
    }
    Ok(bridges)
}

/// Linear-time bridge finding via discovery/low values on a DFS tree.
pub fn bridges_lowlink(g: &Graph) -> Result<BTreeSet<Edge>, GraphError> {
    if !g.is_connected() {
        return Err(GraphError::Disconnected);
    }
    Ok(lowlink_bridges_any(g))
}

/// Low-link bridges without a connectivity precondition; used on the partial
/// subgraphs the local algorithm accumulates.
pub(crate) fn lowlink_bridges_any(g: &Graph) -> BTreeSet<Edge> {
    const UNSET: usize = usize::MAX;
    struct Dfs<'a> {
        g: &'a Graph,
        disc: Vec<usize>,
        low: Vec<usize>,
        time: usize,
        bridges: BTreeSet<Edge>,
    }
    impl Dfs<'_> {
        fn visit(&mut self, v: NodeId, parent: Option<NodeId>) {
            self.disc[v] = self.time;
            self.low[v] = self.time;
            self.time += 1;
            for &w in self.g.neighbors(v) {
                if self.disc[w] == UNSET {
                    self.visit(w, Some(v));
                    self.low[v] = self.low[v].min(self.low[w]);
                    if self.low[w] > self.disc[v] {
                        self.bridges.insert(Edge::new(v, w));
                    }
                } else if Some(w) != parent {
                    self.low[v] = self.low[v].min(self.disc[w]);
                }
            }
        }
    }
    let mut dfs = Dfs {
        g,
        disc: vec![UNSET; g.n()],
        low: vec![UNSET; g.n()],
        time: 0,
        bridges: BTreeSet::new(),
    };
    for v in g.nodes() {
        if dfs.disc[v] == UNSET {
            dfs.visit(v, None);
        }
    }
    dfs.bridges
}

/// The bridge set of a connected graph, by the definitional route.
pub fn bridges_oracle(g: &Graph) -> Result<BTreeSet<Edge>, GraphError> {
    bridges_brute_force(g)
}

/// Labels each node with the smallest node ID in its edge-biconnected
/// component (the connected components after deleting all bridges).
pub fn components_oracle(g: &Graph) -> Result<Vec<usize>, GraphError> {
    let bridges = bridges_oracle(g)?;
    Ok(components_after_deleting(g, &bridges))
}

pub(crate) fn components_after_deleting(g: &Graph, removed: &BTreeSet<Edge>) -> Vec<usize> {
    let mut label = vec![usize::MAX; g.n()];
    for start in g.nodes() {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = start;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &w in g.neighbors(v) {
                if label[w] == usize::MAX && !removed.contains(&Edge::new(v, w)) {
                    label[w] = start;
                    queue.push_back(w);
                }
            }
        }
    }
    label
}

/// Bridges, cycle edges, and component labels of a connected graph.
pub fn classify_oracle(g: &Graph) -> Result<EdgeClassification, GraphError> {
    let bridges = bridges_oracle(g)?;
    let cycle_edges = g.edges().iter().filter(|e| !bridges.contains(e)).copied().collect();
    let component_label = components_after_deleting(g, &bridges);
    Ok(EdgeClassification { bridges, cycle_edges, component_label })
}

/// Maximum BFS distance over all node pairs.
pub fn diameter(g: &Graph) -> Result<usize, GraphError> {
    if !g.is_connected() {
        return Err(GraphError::Disconnected);
    }
    let mut best = 0;
    for v in g.nodes() {
        for d in bfs_distances(g, v).into_iter().flatten() {
            best = best.max(d);
        }
    }
    Ok(best)
}

/// True iff there are two edge-disjoint paths between `x` and `y`, decided by
/// two rounds of BFS augmentation on the unit-capacity flow network.
pub fn two_edge_disjoint_paths(g: &Graph, x: NodeId, y: NodeId) -> bool {
    if x == y {
        return true;
    }
    let mut cap: BTreeMap<(NodeId, NodeId), u8> = BTreeMap::new();
    for e in g.edges() {
        cap.insert((e.u(), e.v()), 1);
        cap.insert((e.v(), e.u()), 1);
    }
    let mut augment = || -> bool {
        let mut pred: Vec<Option<NodeId>> = vec![None; g.n()];
        pred[x] = Some(x);
        let mut queue = VecDeque::from([x]);
        while let Some(v) = queue.pop_front() {
            for &w in g.neighbors(v) {
                if pred[w].is_none() && cap[&(v, w)] > 0 {
                    pred[w] = Some(v);
                    queue.push_back(w);
                }
            }
        }
        if pred[y].is_none() {
            return false;
        }
        let mut v = y;
        while v != x {
            let u = pred[v].unwrap();
            *cap.get_mut(&(u, v)).unwrap() -= 1;
            *cap.get_mut(&(v, u)).unwrap() += 1;
            v = u;
        }
        true
    };
    augment() && augment()
}

/// True iff `x` and `y` stay connected no matter which single edge is deleted.
pub fn same_component_by_deletion(g: &Graph, x: NodeId, y: NodeId) -> bool {
    if x == y {
        return true;
    }
    g.edges().iter().all(|&e| {
        let mut seen = vec![false; g.n()];
        seen[x] = true;
        let mut queue = VecDeque::from([x]);
        while let Some(v) = queue.pop_front() {
            for &w in g.neighbors(v) {
                if Edge::new(v, w) == e || seen[w] {
                    continue;
                }
                seen[w] = true;
                queue.push_back(w);
            }
        }
        seen[y]
    })
}

/// Caps guarding the exponential simple-cycle enumeration.
#[derive(Clone, Copy, Debug)]
pub struct CycleCaps {
    pub max_nodes: usize,
    pub max_cycles: usize,
}

impl Default for CycleCaps {
    fn default() -> Self {
        CycleCaps { max_nodes: 12, max_cycles: 1_000_000 }
    }
}

/// Enumerates every simple cycle as a vertex sequence, each cycle exactly
/// once. Cycles are rooted at their smallest vertex and oriented so the
/// second vertex is smaller than the last.
pub fn enumerate_simple_cycles(g: &Graph, caps: CycleCaps) -> Result<Vec<Vec<NodeId>>, GraphError> {
    if g.n() > caps.max_nodes {
        return Err(GraphError::NodeCapExceeded { n: g.n(), cap: caps.max_nodes });
    }
    let mut cycles = Vec::new();
    let mut in_path = vec![false; g.n()];
    let mut path: Vec<NodeId> = Vec::new();

    fn extend(
        g: &Graph,
        root: NodeId,
        path: &mut Vec<NodeId>,
        in_path: &mut Vec<bool>,
        cycles: &mut Vec<Vec<NodeId>>,
        cap: usize,
    ) -> Result<(), GraphError> {
        let v = *path.last().unwrap();
        for &w in g.neighbors(v) {
            if w == root && path.len() >= 3 && path[1] < *path.last().unwrap() {
                if cycles.len() >= cap {
                    return Err(GraphError::CycleCapExceeded { cap });
                }
                cycles.push(path.clone());
            } else if w > root && !in_path[w] {
                path.push(w);
                in_path[w] = true;
                extend(g, root, path, in_path, cycles, cap)?;
                in_path[w] = false;
                path.pop();
            }
        }
        Ok(())
    }

    for root in g.nodes() {
        path.clear();
        path.push(root);
        in_path[root] = true;
        extend(g, root, &mut path, &mut in_path, &mut cycles, caps.max_cycles)?;
        in_path[root] = false;
    }
    Ok(cycles)
}

/// The cycle-witness radius: for each cycle edge, the cheapest cycle through
/// it, where a cycle's cost is the smallest radius from which some vertex
/// sees the whole cycle; then the maximum over cycle edges. Zero when the
/// graph has no cycle edges.
pub fn cycle_witness_radius(g: &Graph, caps: CycleCaps) -> Result<usize, GraphError> {
    if !g.is_connected() {
        return Err(GraphError::Disconnected);
    }
    let classification = classify_oracle(g)?;
    if classification.cycle_edges.is_empty() {
        return Ok(0);
    }
    let cycles = enumerate_simple_cycles(g, caps)?;
    let dist: Vec<Vec<usize>> = g
        .nodes()
        .map(|v| bfs_distances(g, v).into_iter().map(|d| d.unwrap()).collect())
        .collect();

    let mut best: BTreeMap<Edge, usize> = BTreeMap::new();
    for cycle in &cycles {
        let radius = g
            .nodes()
            .map(|v| cycle.iter().map(|&u| dist[v][u]).max().unwrap())
            .min()
            .unwrap();
        for i in 0..cycle.len() {
            let e = Edge::new(cycle[i], cycle[(i + 1) % cycle.len()]);
            let slot = best.entry(e).or_insert(usize::MAX);
            *slot = (*slot).min(radius);
        }
    }
    let mut upsilon = 0;
    for e in &classification.cycle_edges {
        let r = best
            .get(e)
            .copied()
            .unwrap_or_else(|| panic!("cycle edge {e} not covered by any enumerated cycle"));
        upsilon = upsilon.max(r);
    }
    Ok(upsilon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, same_partition, GenSpec};

    fn p3() -> Graph {
        generate(&GenSpec::Path { n: 3 }, 0).unwrap()
    }

    fn c4() -> Graph {
        generate(&GenSpec::Cycle { n: 4 }, 0).unwrap()
    }

    fn barbell3() -> Graph {
        generate(&GenSpec::Barbell { k: 3 }, 0).unwrap()
    }

    #[test]
    fn bridges_on_named_graphs() {
        let want_p3: BTreeSet<Edge> = [Edge::new(0, 1), Edge::new(1, 2)].into();
        assert_eq!(bridges_oracle(&p3()).unwrap(), want_p3);
        assert!(bridges_oracle(&c4()).unwrap().is_empty());
        let want_bb: BTreeSet<Edge> = [Edge::new(2, 3)].into();
        assert_eq!(bridges_oracle(&barbell3()).unwrap(), want_bb);
    }

    #[test]
    fn bridges_reject_disconnected() {
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        assert_eq!(bridges_oracle(&g), Err(GraphError::Disconnected));
        assert_eq!(bridges_lowlink(&g), Err(GraphError::Disconnected));
        assert_eq!(diameter(&g), Err(GraphError::Disconnected));
    }

    #[test]
    fn components_on_named_graphs() {
        assert_eq!(components_oracle(&c4()).unwrap(), vec![0, 0, 0, 0]);
        assert_eq!(components_oracle(&p3()).unwrap(), vec![0, 1, 2]);
        assert_eq!(components_oracle(&barbell3()).unwrap(), vec![0, 0, 0, 3, 3, 3]);
    }

    #[test]
    fn diameter_on_named_graphs() {
        assert_eq!(diameter(&c4()).unwrap(), 2);
        assert_eq!(diameter(&p3()).unwrap(), 2);
        assert_eq!(diameter(&barbell3()).unwrap(), 3);
        let single = Graph::from_edges(1, std::iter::empty()).unwrap();
        assert_eq!(diameter(&single).unwrap(), 0);
    }

    #[test]
    fn cycle_enumeration_counts() {
        assert!(enumerate_simple_cycles(&p3(), CycleCaps::default()).unwrap().is_empty());
        assert_eq!(enumerate_simple_cycles(&c4(), CycleCaps::default()).unwrap().len(), 1);
        assert_eq!(enumerate_simple_cycles(&barbell3(), CycleCaps::default()).unwrap().len(), 2);
        // K4 has 4 triangles and 3 four-cycles.
        let k4 = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(enumerate_simple_cycles(&k4, CycleCaps::default()).unwrap().len(), 7);
    }

    #[test]
    fn cycle_enumeration_caps() {
        let g = generate(&GenSpec::Cycle { n: 13 }, 0).unwrap();
        assert_eq!(
            enumerate_simple_cycles(&g, CycleCaps::default()),
            Err(GraphError::NodeCapExceeded { n: 13, cap: 12 })
        );
        let k4 = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(
            enumerate_simple_cycles(&k4, CycleCaps { max_nodes: 12, max_cycles: 3 }),
            Err(GraphError::CycleCapExceeded { cap: 3 })
        );
    }

    #[test]
    fn witness_radius_on_named_graphs() {
        let caps = CycleCaps::default();
        assert_eq!(cycle_witness_radius(&p3(), caps).unwrap(), 0);
        let star = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(cycle_witness_radius(&star, caps).unwrap(), 0);
        assert_eq!(cycle_witness_radius(&c4(), caps).unwrap(), 2);
        // Each triangle of the barbell is fully visible from any of its own
        // vertices at distance 1, so the radius is 1.
        assert_eq!(cycle_witness_radius(&barbell3(), caps).unwrap(), 1);
        let c6 = generate(&GenSpec::Cycle { n: 6 }, 0).unwrap();
        assert_eq!(cycle_witness_radius(&c6, caps).unwrap(), 3);
    }

    #[test]
    fn witness_radius_bounded_by_diameter() {
        for seed in 0..40 {
            let g = generate(&GenSpec::RandomConnected { n: 9, p: 0.3 }, seed).unwrap();
            let upsilon = cycle_witness_radius(&g, CycleCaps::default()).unwrap();
            let classification = classify_oracle(&g).unwrap();
            if !classification.cycle_edges.is_empty() {
                assert!(upsilon <= diameter(&g).unwrap(), "seed {seed}");
            }
        }
    }

    #[test]
    fn gadget_bridge_contract() {
        let p2 = Graph::from_edges(2, [(0, 1)]).unwrap();
        let g = p2.attach_gadget(Edge::new(0, 1)).unwrap();
        let bridges = bridges_oracle(&g).unwrap();
        let want: BTreeSet<Edge> =
            [Edge::new(0, 2), Edge::new(1, 2), Edge::new(2, 3), Edge::new(2, 6)].into();
        assert_eq!(bridges, want);
    }

    #[test]
    fn gadget_local_facts() {
        // (u,w) and (w,v) inherit e's bridgeness; (w,p) and (w,s1) are always
        // bridges; triangle edges never are.
        for (spec, e, was_bridge) in [
            (GenSpec::Path { n: 4 }, Edge::new(1, 2), true),
            (GenSpec::Cycle { n: 5 }, Edge::new(0, 1), false),
            (GenSpec::Barbell { k: 3 }, Edge::new(2, 3), true),
            (GenSpec::Barbell { k: 3 }, Edge::new(0, 1), false),
        ] {
            let g = generate(&spec, 0).unwrap();
            assert_eq!(bridges_oracle(&g).unwrap().contains(&e), was_bridge);
            let n = g.n();
            let (w, p, t1, t2, s1, s2, s3) = (n, n + 1, n + 2, n + 3, n + 4, n + 5, n + 6);
            let g2 = g.attach_gadget(e).unwrap();
            let bridges = bridges_oracle(&g2).unwrap();
            assert_eq!(bridges.contains(&Edge::new(e.u(), w)), was_bridge);
            assert_eq!(bridges.contains(&Edge::new(w, e.v())), was_bridge);
            assert!(bridges.contains(&Edge::new(w, p)));
            assert!(bridges.contains(&Edge::new(w, s1)));
            for t in [Edge::new(w, t1), Edge::new(w, t2), Edge::new(t1, t2)] {
                assert!(!bridges.contains(&t));
            }
            for t in [Edge::new(s1, s2), Edge::new(s1, s3), Edge::new(s2, s3)] {
                assert!(!bridges.contains(&t));
            }
        }
    }

    #[test]
    fn two_flow_matches_deletion_relation() {
        for seed in 0..30 {
            let g = generate(&GenSpec::RandomConnected { n: 8, p: 0.25 }, seed).unwrap();
            for x in g.nodes() {
                for y in x + 1..g.n() {
                    assert_eq!(
                        same_component_by_deletion(&g, x, y),
                        two_edge_disjoint_paths(&g, x, y),
                        "seed {seed}, pair ({x},{y})"
                    );
                }
            }
        }
    }

    #[test]
    fn lemma_equivalences_per_edge() {
        // same label <=> not a bridge <=> endpoints still connected without
        // the edge.
        for seed in 0..40 {
            let g = generate(&GenSpec::RandomConnected { n: 10, p: 0.3 }, seed).unwrap();
            let classification = classify_oracle(&g).unwrap();
            for &e in g.edges() {
                let same_label = classification.component_label[e.u()]
                    == classification.component_label[e.v()];
                let not_bridge = !classification.bridges.contains(&e);
                let in_cycle = {
                    let mut seen = vec![false; g.n()];
                    seen[e.u()] = true;
                    let mut queue = VecDeque::from([e.u()]);
                    while let Some(v) = queue.pop_front() {
                        for &w in g.neighbors(v) {
                            if Edge::new(v, w) != e && !seen[w] {
                                seen[w] = true;
                                queue.push_back(w);
                            }
                        }
                    }
                    seen[e.v()]
                };
                assert_eq!(same_label, not_bridge, "seed {seed} edge {e}");
                assert_eq!(not_bridge, in_cycle, "seed {seed} edge {e}");
            }
        }
    }

    #[test]
    fn oracle_partitions_match_labels() {
        for seed in 0..20 {
            let g = generate(&GenSpec::RandomConnected { n: 12, p: 0.2 }, seed).unwrap();
            let labels = components_oracle(&g).unwrap();
            assert!(same_partition(&labels, &labels));
            for (v, &l) in labels.iter().enumerate() {
                assert!(l <= v, "label must be the minimum member");
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            /// The deletion brute force and the low-link traversal agree on
            /// arbitrary connected graphs.
            #[test]
            fn brute_force_agrees_with_lowlink(
                n in 2usize..24,
                p in 0.0f64..1.0,
                seed in 0u64..u64::MAX,
            ) {
                let g = generate(&GenSpec::RandomConnected { n, p }, seed).unwrap();
                prop_assert_eq!(
                    bridges_brute_force(&g).unwrap(),
                    bridges_lowlink(&g).unwrap()
                );
            }

            /// Endpoints of an edge share a component label iff the edge is
            /// not a bridge.
            #[test]
            fn labels_split_exactly_at_bridges(
                n in 2usize..20,
                p in 0.0f64..0.6,
                seed in 0u64..u64::MAX,
            ) {
                let g = generate(&GenSpec::RandomConnected { n, p }, seed).unwrap();
                let classification = classify_oracle(&g).unwrap();
                for &e in g.edges() {
                    let same = classification.component_label[e.u()]
                        == classification.component_label[e.v()];
                    prop_assert_eq!(same, !classification.bridges.contains(&e));
                }
            }
        }
    }
}
