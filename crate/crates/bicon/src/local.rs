//! All-nodes-initiated local bridge finding with unbounded messages.
//!
//! Every round each node broadcasts its accumulated topology knowledge to all
//! neighbors and reclassifies: an edge counts as a non-bridge once it lies on
//! a cycle inside the node's known subgraph, so no bridge is ever marked.
//! The doubling runner re-runs the algorithm with budgets 1, 2, 4, ... while
//! carrying the (monotone) marks across restarts, so its output stabilizes to
//! the correct classification without knowing the witness radius in advance.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::graph::{Edge, Graph, GraphError, NodeId};
use crate::oracle;
use crate::sim::{
    build, Initiator, Knowledge, Message, Metrics, NodeBehavior, NodeSeed, Outgoing, Received,
    SimConfig, SimError,
};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum LocalError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("doubling schedule did not stabilize within {horizon} rounds")]
    HorizonExhausted { horizon: u64 },
}

/// Per-node state: the settled adjacency knowledge and the monotone set of
/// edges known to lie on a cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalNode {
    id: NodeId,
    n: usize,
    neighbors: Vec<NodeId>,
    knowledge: Knowledge,
    marks: BTreeSet<Edge>,
}

impl LocalNode {
    pub fn init(seed: &NodeSeed<'_>, base_marks: BTreeSet<Edge>) -> LocalNode {
        let mut adj = BTreeMap::new();
        adj.insert(seed.id, seed.neighbors.to_vec());
        LocalNode {
            id: seed.id,
            n: seed.n,
            neighbors: seed.neighbors.to_vec(),
            knowledge: Knowledge { adj },
            marks: base_marks,
        }
    }

    /// Nodes whose full adjacency this node knows. After `t` rounds this is
    /// exactly the radius-`t` ball around the node.
    pub fn settled(&self) -> BTreeSet<NodeId> {
        self.knowledge.settled_nodes().collect()
    }

    pub fn marks(&self) -> &BTreeSet<Edge> {
        &self.marks
    }

    fn recompute_marks(&mut self) {
        let edges = self.knowledge.known_edges();
        let known = Graph::from_edges(self.n, edges.iter().map(Edge::endpoints))
            .expect("known subgraph is well-formed");
        let bridges = oracle::lowlink_bridges_any(&known);
        for e in edges {
            if !bridges.contains(&e) {
                self.marks.insert(e);
            }
        }
    }
}

impl NodeBehavior for LocalNode {
    fn step(&mut self, _round: u64, inbox: &[Received]) -> Vec<Outgoing> {
        for r in inbox {
            match &r.msg {
                Message::Knowledge(k) => self.knowledge.merge(k),
                other => panic!("local node {}: unexpected {} message", self.id, other.kind()),
            }
        }
        self.recompute_marks();
        self.neighbors
            .iter()
            .map(|&w| Outgoing { to: w, msg: Message::Knowledge(self.knowledge.clone()) })
            .collect()
    }

    fn is_terminal(&self) -> bool {
        false
    }
}

/// Per-round snapshots of a bounded local run. Index `t` is the state after
/// `t` synchronous exchanges.
#[derive(Clone, Debug)]
pub struct LocalRun {
    pub snapshots: Vec<Vec<BTreeSet<Edge>>>,
    pub settled: Vec<Vec<BTreeSet<NodeId>>>,
    pub metrics: Metrics,
}

impl LocalRun {
    pub fn final_marks(&self) -> &[BTreeSet<Edge>] {
        self.snapshots.last().expect("at least the round-0 snapshot")
    }

    /// One JSON object per round with each node's settled set and non-bridge
    /// marks, for plotting stabilization curves.
    pub fn snapshots_jsonl(&self) -> String {
        let mut out = String::new();
        for (round, marks) in self.snapshots.iter().enumerate() {
            let line = serde_json::json!({
                "round": round,
                "settled": self.settled[round],
                "non_bridges": marks,
            });
            out.push_str(&line.to_string());
            out.push('\n');
        }
        out
    }
}

pub fn run_local(graph: &Graph, horizon: u64) -> Result<LocalRun, SimError> {
    let empty = vec![BTreeSet::new(); graph.n()];
    run_local_with_base(graph, horizon, &empty)
}

/// Runs the local algorithm for `horizon` exchanges, seeding each node's mark
/// set from `base` (used by the doubling schedule to carry output across
/// restarts).
pub fn run_local_with_base(
    graph: &Graph,
    horizon: u64,
    base: &[BTreeSet<Edge>],
) -> Result<LocalRun, SimError> {
    assert_eq!(base.len(), graph.n());
    let config = SimConfig {
        initiator: Initiator::All,
        congest: false,
        max_rounds: horizon + 1,
        ..SimConfig::default()
    };
    let mut sim = build(graph, config, |seed| {
        let marks = base[seed.id].clone();
        LocalNode::init(&seed, marks)
    })?;
    let mut snapshots = Vec::with_capacity(horizon as usize + 1);
    let mut settled = Vec::with_capacity(horizon as usize + 1);
    for _ in 0..=horizon {
        sim.step()?;
        snapshots.push(sim.nodes().iter().map(|node| node.marks.clone()).collect());
        settled.push(sim.nodes().iter().map(LocalNode::settled).collect());
    }
    Ok(LocalRun { snapshots, settled, metrics: sim.metrics().clone() })
}

/// True iff under `marks`, both endpoints of every edge classify it exactly
/// as the bridge oracle does.
pub fn endpoint_correct(graph: &Graph, bridges: &BTreeSet<Edge>, marks: &[BTreeSet<Edge>]) -> bool {
    graph.edges().iter().all(|e| {
        let non_bridge = !bridges.contains(e);
        marks[e.u()].contains(e) == non_bridge && marks[e.v()].contains(e) == non_bridge
    })
}

/// True iff every non-bridge is marked at some node and no bridge is marked
/// anywhere.
pub fn union_correct(graph: &Graph, bridges: &BTreeSet<Edge>, marks: &[BTreeSet<Edge>]) -> bool {
    graph.edges().iter().all(|e| {
        let marked_somewhere = marks.iter().any(|m| m.contains(e));
        marked_somewhere == !bridges.contains(e)
    })
}

/// True iff no bridge is marked non-bridge at any node.
pub fn sound(bridges: &BTreeSet<Edge>, marks: &[BTreeSet<Edge>]) -> bool {
    marks.iter().all(|m| m.is_disjoint(bridges))
}

/// First round whose classification is correct at both endpoints of every
/// edge and stays correct through the run's horizon.
pub fn classification_correct_round(
    run: &LocalRun,
    graph: &Graph,
    bridges: &BTreeSet<Edge>,
) -> Option<u64> {
    let correct: Vec<bool> = run
        .snapshots
        .iter()
        .map(|marks| endpoint_correct(graph, bridges, marks))
        .collect();
    let mut from = None;
    for r in (0..correct.len()).rev() {
        if correct[r] {
            from = Some(r as u64);
        } else {
            break;
        }
    }
    from
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhaseReport {
    pub budget: u64,
    pub cumulative_rounds_end: u64,
    pub union_correct: bool,
    pub endpoint_correct: bool,
}

#[derive(Clone, Debug)]
pub struct DoublingReport {
    pub phases: Vec<PhaseReport>,
    /// Cumulative round from which the carried output is permanently correct
    /// at both endpoints of every edge.
    pub correct_from_round: u64,
    pub total_messages: u64,
    pub final_marks: Vec<BTreeSet<Edge>>,
}

/// Runs budget-1, 2, 4, ... phases of the local algorithm, resetting topology
/// knowledge between phases but carrying marks, until a phase ends with the
/// correct classification at every edge endpoint.
pub fn doubling_run(graph: &Graph, horizon: u64) -> Result<DoublingReport, LocalError> {
    let bridges = oracle::bridges_lowlink(graph)?;
    let mut base: Vec<BTreeSet<Edge>> = vec![BTreeSet::new(); graph.n()];
    let mut correct_by_round = vec![endpoint_correct(graph, &bridges, &base)];
    let mut phases = Vec::new();
    let mut cumulative = 0u64;
    let mut total_messages = 0u64;
    let mut budget = 1u64;
    loop {
        if cumulative + budget > horizon {
            return Err(LocalError::HorizonExhausted { horizon });
        }
        let run = run_local_with_base(graph, budget, &base)?;
        for t in 1..=budget as usize {
            correct_by_round.push(endpoint_correct(graph, &bridges, &run.snapshots[t]));
        }
        cumulative += budget;
        total_messages += run.metrics.total_messages;
        base = run.final_marks().to_vec();
        let endpoint_ok = *correct_by_round.last().unwrap();
        phases.push(PhaseReport {
            budget,
            cumulative_rounds_end: cumulative,
            union_correct: union_correct(graph, &bridges, &base),
            endpoint_correct: endpoint_ok,
        });
        if endpoint_ok {
            break;
        }
        budget *= 2;
    }
    // Marks only grow and never cover a bridge, so correctness is monotone.
    debug_assert!(correct_by_round.windows(2).all(|w| w[0] <= w[1]));
    let correct_from_round =
        correct_by_round.iter().position(|&c| c).expect("final phase is correct") as u64;
    Ok(DoublingReport { phases, correct_from_round, total_messages, final_marks: base })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GenSpec};
    use crate::oracle::{bfs_distances, bridges_oracle, cycle_witness_radius, CycleCaps};

    #[test]
    fn tree_is_correct_from_round_zero() {
        let g = generate(&GenSpec::Tree { n: 7 }, 3).unwrap();
        let bridges = bridges_oracle(&g).unwrap();
        let run = run_local(&g, 6).unwrap();
        assert_eq!(classification_correct_round(&run, &g, &bridges), Some(0));
        for marks in &run.snapshots {
            assert!(marks.iter().all(BTreeSet::is_empty), "no cycle is ever claimed");
        }
    }

    #[test]
    fn c4_settles_by_round_two_and_marks_by_round_one() {
        let g = generate(&GenSpec::Cycle { n: 4 }, 0).unwrap();
        let bridges = bridges_oracle(&g).unwrap();
        let run = run_local(&g, 4).unwrap();
        for v in g.nodes() {
            assert_eq!(run.settled[2][v].len(), 4, "radius-2 balls cover C4");
        }
        // Frontier edges reveal the full cycle one exchange earlier.
        let measured = classification_correct_round(&run, &g, &bridges).unwrap();
        assert_eq!(measured, 1);
        let upsilon = cycle_witness_radius(&g, CycleCaps::default()).unwrap();
        assert_eq!(upsilon, 2);
        assert!(measured <= 2 * upsilon as u64);
    }

    #[test]
    fn barbell_correct_within_twice_upsilon() {
        let g = generate(&GenSpec::Barbell { k: 3 }, 0).unwrap();
        let bridges = bridges_oracle(&g).unwrap();
        let upsilon = cycle_witness_radius(&g, CycleCaps::default()).unwrap();
        let run = run_local(&g, 2 * upsilon as u64 + 2).unwrap();
        let measured = classification_correct_round(&run, &g, &bridges).unwrap();
        assert!(measured <= 2 * upsilon as u64, "measured {measured}, upsilon {upsilon}");
    }

    #[test]
    fn knowledge_growth_equals_balls() {
        let g = generate(&GenSpec::RandomConnected { n: 10, p: 0.25 }, 7).unwrap();
        let run = run_local(&g, 5).unwrap();
        for (t, settled) in run.settled.iter().enumerate() {
            for v in g.nodes() {
                let ball: BTreeSet<NodeId> = bfs_distances(&g, v)
                    .into_iter()
                    .enumerate()
                    .filter(|(_, d)| d.map_or(false, |d| d <= t))
                    .map(|(u, _)| u)
                    .collect();
                assert_eq!(settled[v], ball, "round {t} node {v}");
            }
        }
    }

    #[test]
    fn soundness_and_monotonicity_on_random_graphs() {
        for seed in 0..25 {
            let g = generate(&GenSpec::RandomConnected { n: 9, p: 0.3 }, seed).unwrap();
            let bridges = bridges_oracle(&g).unwrap();
            let run = run_local(&g, 8).unwrap();
            for marks in &run.snapshots {
                assert!(sound(&bridges, marks), "seed {seed}");
            }
            for v in g.nodes() {
                for t in 1..run.snapshots.len() {
                    assert!(
                        run.snapshots[t - 1][v].is_subset(&run.snapshots[t][v]),
                        "marks must only grow (seed {seed}, node {v}, round {t})"
                    );
                }
            }
        }
    }

    #[test]
    fn doubling_on_c4() {
        let g = generate(&GenSpec::Cycle { n: 4 }, 0).unwrap();
        let report = doubling_run(&g, 64).unwrap();
        assert!(report.phases.last().unwrap().endpoint_correct);
        assert_eq!(report.correct_from_round, 1);
        let upsilon = cycle_witness_radius(&g, CycleCaps::default()).unwrap() as u64;
        assert!(report.correct_from_round <= 8 * upsilon + 4);
        for phase in &report.phases {
            if phase.budget >= upsilon {
                assert!(phase.union_correct);
            }
        }
    }

    #[test]
    fn doubling_on_tree_is_immediately_stable() {
        let g = generate(&GenSpec::Tree { n: 8 }, 11).unwrap();
        let report = doubling_run(&g, 16).unwrap();
        assert_eq!(report.correct_from_round, 0);
        assert_eq!(report.phases.len(), 1);
        assert!(report.phases[0].endpoint_correct);
    }

    #[test]
    fn doubling_horizon_exhaustion() {
        let g = generate(&GenSpec::Cycle { n: 6 }, 0).unwrap();
        match doubling_run(&g, 1) {
            Err(LocalError::HorizonExhausted { horizon: 1 }) => {}
            other => panic!("expected horizon exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn congest_mode_rejects_knowledge_payloads() {
        let g = generate(&GenSpec::Cycle { n: 6 }, 0).unwrap();
        let config = SimConfig {
            initiator: Initiator::All,
            congest: true,
            max_rounds: 10,
            ..SimConfig::default()
        };
        let mut sim = build(&g, config, |seed| LocalNode::init(&seed, BTreeSet::new())).unwrap();
        // Round 0 sends bare stars which may fit; by round 1 merged payloads
        // exceed the cap.
        let result = sim.step().and_then(|_| sim.step()).and_then(|_| sim.step());
        assert!(matches!(result, Err(SimError::MessageTooLarge { .. })));
    }
}
