//! Deterministic synchronous message-passing engine.
//!
//! A round delivers exactly the messages sent in the previous round, then
//! steps every node. Node step functions are pure in (own state, own inbox,
//! round), so the engine's node-iteration order within a round is
//! unobservable; the default order is ascending node ID and a reversed order
//! exists to test exactly that. In CONGEST mode the engine enforces one
//! message per directed edge per round and the logarithmic bit bound.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Edge, Graph, NodeId};

/// Bits spent on the message kind tag. Eleven kinds fit in four bits, fixed
/// for trace stability.
pub const KIND_TAG_BITS: usize = 4;

/// Bits needed to write any value in `0..=n`.
pub fn label_width(n: usize) -> usize {
    (n + 1).next_power_of_two().trailing_zeros() as usize
}

/// The CONGEST per-message bit budget for an `n`-node network.
pub fn congest_bit_cap(n: usize) -> usize {
    KIND_TAG_BITS + 2 * label_width(n)
}

/// Full adjacency knowledge of a set of "settled" nodes; the payload of the
/// unbounded-message local algorithm.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Knowledge {
    pub adj: BTreeMap<NodeId, Vec<NodeId>>,
}

impl Knowledge {
    pub fn settled_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.adj.keys().copied()
    }

    /// Distinct undirected edges incident to at least one settled node.
    pub fn known_edges(&self) -> BTreeSet<Edge> {
        let mut edges = BTreeSet::new();
        for (&u, neighbors) in &self.adj {
            for &w in neighbors {
                edges.insert(Edge::new(u, w));
            }
        }
        edges
    }

    pub fn merge(&mut self, other: &Knowledge) {
        for (&u, neighbors) in &other.adj {
            self.adj.entry(u).or_insert_with(|| neighbors.clone());
        }
    }
}

/// Wire messages. The first eleven kinds carry at most two node labels and
/// respect the CONGEST bound; `Knowledge` exists only for the
/// unbounded-message mode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Message {
    Explore,
    Child,
    NonChild,
    SubtreeDone,
    ComputeDesc,
    DescValue(usize),
    SetPreLabel(usize),
    CrossEdgeFrom(usize),
    MarkUpTo(usize, usize),
    Null,
    ComponentIs(usize),
    Knowledge(Knowledge),
}

impl Message {
    pub fn kind(&self) -> &'static str {
        match self {
            Message::Explore => "Explore",
            Message::Child => "Child",
            Message::NonChild => "NonChild",
            Message::SubtreeDone => "SubtreeDone",
            Message::ComputeDesc => "ComputeDesc",
            Message::DescValue(_) => "DescValue",
            Message::SetPreLabel(_) => "SetPreLabel",
            Message::CrossEdgeFrom(_) => "CrossEdgeFrom",
            Message::MarkUpTo(_, _) => "MarkUpTo",
            Message::Null => "Null",
            Message::ComponentIs(_) => "ComponentIs",
            Message::Knowledge(_) => "Knowledge",
        }
    }

    /// The labels carried, in the (a, b) slots.
    pub fn labels(&self) -> (Option<usize>, Option<usize>) {
        match *self {
            Message::DescValue(a)
            | Message::SetPreLabel(a)
            | Message::CrossEdgeFrom(a)
            | Message::ComponentIs(a) => (Some(a), None),
            Message::MarkUpTo(a, b) => (Some(a), Some(b)),
            _ => (None, None),
        }
    }

    /// Accounted size in bits: the kind tag plus one label width per carried
    /// label. `Knowledge` reports its serialized (nodes, edges) list size.
    pub fn bit_size(&self, n: usize) -> usize {
        let w = label_width(n);
        match self {
            Message::Knowledge(k) => {
                KIND_TAG_BITS + w * (k.adj.len() + 2 * k.known_edges().len())
            }
            m => {
                let (a, b) = m.labels();
                KIND_TAG_BITS + w * (a.iter().count() + b.iter().count())
            }
        }
    }
}

/// A message with its sender, as seen by the recipient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Received {
    pub from: NodeId,
    pub msg: Message,
}

/// A message with its destination, as produced by a node step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outgoing {
    pub to: NodeId,
    pub msg: Message,
}

/// Everything a node is given at initialization time.
pub struct NodeSeed<'a> {
    pub id: NodeId,
    pub neighbors: &'a [NodeId],
    pub is_initiator: bool,
    pub n: usize,
}

/// A protocol node. Steps must be pure in (state, inbox, round): a node may
/// read nothing else, and a node that has never received a message and is not
/// an initiator must do nothing.
pub trait NodeBehavior: Clone + PartialEq + fmt::Debug {
    fn step(&mut self, round: u64, inbox: &[Received]) -> Vec<Outgoing>;
    fn is_terminal(&self) -> bool;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Initiator {
    Single(NodeId),
    All,
}

#[derive(Clone, Debug)]
pub struct SimConfig {
    pub initiator: Initiator,
    pub max_rounds: u64,
    /// Enforce one message per directed edge per round and the bit cap.
    pub congest: bool,
    pub seed: u64,
    pub record_trace: bool,
    /// Step nodes in descending ID order; exists to test order-independence.
    pub reverse_node_order: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            initiator: Initiator::Single(0),
            max_rounds: 100_000,
            congest: true,
            seed: 0,
            record_trace: false,
            reverse_node_order: false,
        }
    }
}

/// Cumulative run statistics.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Metrics {
    pub rounds: u64,
    pub total_messages: u64,
    pub max_message_bits: usize,
    pub per_edge_counts: BTreeMap<Edge, u64>,
}

impl Metrics {
    pub fn per_edge_total(&self) -> u64 {
        self.per_edge_counts.values().sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "rounds": self.rounds,
            "total_messages": self.total_messages,
            "max_message_bits": self.max_message_bits,
            "per_edge_counts": self
                .per_edge_counts
                .iter()
                .map(|(e, c)| serde_json::json!([[e.u(), e.v()], c]))
                .collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceEvent {
    pub round: u64,
    pub from: NodeId,
    pub to: NodeId,
    pub kind: &'static str,
    pub a: Option<usize>,
    pub b: Option<usize>,
    pub bits: usize,
}

/// What one engine step did.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundReport {
    pub round: u64,
    pub delivered: usize,
    pub sent: usize,
    pub acted: Vec<NodeId>,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("graph must be connected")]
    Disconnected,
    #[error("initiator {initiator} out of range for {n} nodes")]
    InvalidInitiator { initiator: NodeId, n: usize },
    #[error("round {round}: node {from} sent to non-neighbor {to}")]
    NonNeighborSend { from: NodeId, to: NodeId, round: u64 },
    #[error("round {round}: node {from} sent twice on directed edge to {to}")]
    DuplicateSend { from: NodeId, to: NodeId, round: u64 },
    #[error("round {round}: message from {from} to {to} is {bits} bits, cap {cap}")]
    MessageTooLarge { from: NodeId, to: NodeId, round: u64, bits: usize, cap: usize },
    #[error("round {round}: node {node} acted without ever receiving a message")]
    EventDrivenViolation { node: NodeId, round: u64 },
    #[error("no quiescence within {rounds} rounds")]
    NonTermination { rounds: u64 },
    #[error("simulation has not reached quiescence")]
    NotTerminated,
}

/// The round engine: node states, in-flight messages, and metrics.
pub struct Simulation<N: NodeBehavior> {
    graph: Graph,
    config: SimConfig,
    nodes: Vec<N>,
    activated: Vec<bool>,
    inflight: Vec<(NodeId, NodeId, Message)>,
    round: u64,
    metrics: Metrics,
    trace: Vec<TraceEvent>,
}

/// Initializes one node per graph vertex via `factory` and a simulation at
/// round zero with zeroed metrics.
pub fn build<N, F>(graph: &Graph, config: SimConfig, mut factory: F) -> Result<Simulation<N>, SimError>
where
    N: NodeBehavior,
    F: FnMut(NodeSeed<'_>) -> N,
{
    if !graph.is_connected() {
        return Err(SimError::Disconnected);
    }
    if let Initiator::Single(i) = config.initiator {
        if i >= graph.n() {
            return Err(SimError::InvalidInitiator { initiator: i, n: graph.n() });
        }
    }
    let is_initiator =
        |v: NodeId| matches!(config.initiator, Initiator::All) || config.initiator == Initiator::Single(v);
    let nodes: Vec<N> = graph
        .nodes()
        .map(|id| {
            factory(NodeSeed {
                id,
                neighbors: graph.neighbors(id),
                is_initiator: is_initiator(id),
                n: graph.n(),
            })
        })
        .collect();
    let activated = graph.nodes().map(is_initiator).collect();
    Ok(Simulation {
        graph: graph.clone(),
        config,
        nodes,
        activated,
        inflight: Vec::new(),
        round: 0,
        metrics: Metrics::default(),
        trace: Vec::new(),
    })
}

impl<N: NodeBehavior> Simulation<N> {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn nodes(&self) -> &[N] {
        &self.nodes
    }

    pub fn metrics(&self) -> &Metrics {
        &self.metrics
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn trace(&self) -> &[TraceEvent] {
        &self.trace
    }

    /// One trace event per line, as JSON objects.
    pub fn trace_jsonl(&self) -> String {
        let mut out = String::new();
        for event in &self.trace {
            out.push_str(&serde_json::to_string(event).expect("trace serializes"));
            out.push('\n');
        }
        out
    }

    /// No messages in flight and every node terminal.
    pub fn is_quiescent(&self) -> bool {
        self.inflight.is_empty() && self.nodes.iter().all(|n| n.is_terminal())
    }

    /// Delivers last round's messages, steps every node, and collects the new
    /// outboxes, enforcing the CONGEST contract and the event-driven rule.
    pub fn step(&mut self) -> Result<RoundReport, SimError> {
        let round = self.round;
        let n = self.graph.n();

        let mut inboxes: Vec<Vec<Received>> = vec![Vec::new(); n];
        let delivered = self.inflight.len();
        for (from, to, msg) in self.inflight.drain(..) {
            inboxes[to].push(Received { from, msg });
        }
        for inbox in &mut inboxes {
            inbox.sort_by_key(|r| r.from);
        }

        let order: Vec<NodeId> = if self.config.reverse_node_order {
            (0..n).rev().collect()
        } else {
            (0..n).collect()
        };

        let cap = congest_bit_cap(n);
        let mut new_inflight = Vec::new();
        let mut sent_dirs: BTreeSet<(NodeId, NodeId)> = BTreeSet::new();
        let mut acted = Vec::new();
        let mut sent = 0usize;

        for id in order {
            let inbox = &inboxes[id];
            let outbox = if !self.activated[id] && inbox.is_empty() {
                // Event-driven rule: an untouched non-initiator must not act.
                let before = self.nodes[id].clone();
                let outbox = self.nodes[id].step(round, inbox);
                if !outbox.is_empty() || self.nodes[id] != before {
                    return Err(SimError::EventDrivenViolation { node: id, round });
                }
                outbox
            } else {
                if !inbox.is_empty() {
                    self.activated[id] = true;
                }
                self.nodes[id].step(round, inbox)
            };

            if !inbox.is_empty() || !outbox.is_empty() {
                acted.push(id);
            }
            for Outgoing { to, msg } in outbox {
                if !self.graph.has_edge(id, to) {
                    return Err(SimError::NonNeighborSend { from: id, to, round });
                }
                if self.config.congest {
                    if !sent_dirs.insert((id, to)) {
                        return Err(SimError::DuplicateSend { from: id, to, round });
                    }
                }
                let bits = msg.bit_size(n);
                if self.config.congest && bits > cap {
                    return Err(SimError::MessageTooLarge { from: id, to, round, bits, cap });
                }
                sent += 1;
                self.metrics.total_messages += 1;
                self.metrics.max_message_bits = self.metrics.max_message_bits.max(bits);
                *self.metrics.per_edge_counts.entry(Edge::new(id, to)).or_insert(0) += 1;
                if self.config.record_trace {
                    let (a, b) = msg.labels();
                    self.trace.push(TraceEvent { round, from: id, to, kind: msg.kind(), a, b, bits });
                }
                new_inflight.push((id, to, msg));
            }
        }
        acted.sort_unstable();

        self.inflight = new_inflight;
        self.round += 1;
        self.metrics.rounds += 1;
        Ok(RoundReport { round, delivered, sent, acted })
    }

    /// Steps until quiescence, erroring out after `config.max_rounds` steps.
    pub fn run_to_quiescence(&mut self) -> Result<Metrics, SimError> {
        for _ in 0..self.config.max_rounds {
            if self.is_quiescent() {
                return Ok(self.metrics.clone());
            }
            self.step()?;
        }
        if self.is_quiescent() {
            Ok(self.metrics.clone())
        } else {
            Err(SimError::NonTermination { rounds: self.round })
        }
    }

    /// Runs exactly `rounds` steps, for protocols without termination.
    pub fn run_rounds(&mut self, rounds: u64) -> Result<(), SimError> {
        for _ in 0..rounds {
            self.step()?;
        }
        Ok(())
    }
}
