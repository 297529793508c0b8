//! The five-phase distributed edge-biconnectivity protocol.
//!
//! Phase 1 builds a rooted BFS tree from the initiator and detects completion
//! with a SubtreeDone convergecast. Phase 2 convergecasts descendant counts.
//! Phase 3 downcasts preorder labels, which make every subtree a contiguous
//! label interval. Phase 4 floods one `CrossEdgeFrom` per cross-edge
//! direction and convergecasts `MarkUpTo` intervals, so that each node learns
//! whether the edge to its parent lies on a cycle. Phase 5 downcasts
//! component labels along non-bridge tree edges and broadcasts them across
//! every edge, so both endpoints of a bridge can see the labels differ.
//!
//! A node sends at most one message per directed edge per round and every
//! message carries at most two labels, so the whole run stays inside the
//! CONGEST budget enforced by the engine.

use std::collections::{BTreeMap, BTreeSet};

use crate::graph::{Edge, EdgeClassification, Graph, NodeId};
use crate::sim::{
    build, Initiator, Message, Metrics, NodeBehavior, NodeSeed, Outgoing, Received, SimConfig,
    SimError, Simulation,
};

/// Number of tree descendants including the node itself: `1 + sum(children)`.
pub fn desc_total(child_counts: &[usize]) -> usize {
    1 + child_counts.iter().sum::<usize>()
}

/// Preorder labels for the children of a node labeled `label`, given the
/// children's descendant counts in child order: the i-th child gets
/// `label + 1 + sum of earlier children's counts`.
pub fn prelabel_children(label: usize, ordered_child_descs: &[usize]) -> Vec<usize> {
    let mut next = label + 1;
    ordered_child_descs
        .iter()
        .map(|&d| {
            let l = next;
            next += d;
            l
        })
        .collect()
}

/// True iff preorder label `x` belongs to the subtree of the node with
/// preorder label `k` and `num_desc` descendants, i.e. `k <= x < k + num_desc`.
pub fn in_descendant_interval(x: usize, k: usize, num_desc: usize) -> bool {
    k <= x && x < k + num_desc
}

/// Folds one phase-4 message into the running `(u_min, v_max)` pair.
pub fn merge_mark(
    u_min: usize,
    v_max: usize,
    msg: &Message,
) -> Result<(usize, usize), InvalidMarkMessage> {
    match *msg {
        Message::MarkUpTo(u, v) => Ok((u_min.min(u), v_max.max(v))),
        Message::CrossEdgeFrom(l) => Ok((u_min.min(l), v_max.max(l))),
        Message::Null => Ok((u_min, v_max)),
        ref other => Err(InvalidMarkMessage { kind: other.kind() }),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("message kind {kind} cannot be merged into a mark interval")]
pub struct InvalidMarkMessage {
    pub kind: &'static str,
}

/// The phase-4 decision at a node with preorder label `k` and `num_desc`
/// descendants, after all expected non-parent messages were merged: if both
/// `u_min` and `v_max` fall inside the node's own subtree interval, the edge
/// to the parent is a bridge and a `Null` goes up; otherwise the parent edge
/// lies on a cycle and `MarkUpTo(u_min, v_max)` goes up.
pub fn decide_bridge(
    k: usize,
    num_desc: usize,
    u_min: usize,
    v_max: usize,
) -> (bool, Message) {
    if in_descendant_interval(u_min, k, num_desc) && in_descendant_interval(v_max, k, num_desc) {
        (true, Message::Null)
    } else {
        (false, Message::MarkUpTo(u_min, v_max))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Idle,
    Bfs,
    CountDesc,
    PreLabelWait,
    Marking,
    Labeling,
    Done,
}

/// Per-node protocol state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiconNode {
    id: NodeId,
    n: usize,
    neighbors: Vec<NodeId>,
    is_root: bool,
    phase: Phase,
    depth: Option<u64>,
    parent: Option<NodeId>,
    children: BTreeSet<NodeId>,
    cross: BTreeSet<NodeId>,
    unclassified: BTreeSet<NodeId>,
    done_children: BTreeSet<NodeId>,
    child_desc: BTreeMap<NodeId, usize>,
    num_desc: Option<usize>,
    pre_label: Option<usize>,
    interval: Option<(usize, usize)>,
    pending_replies: usize,
    under_bridge: bool,
    marked_to_parent: bool,
    component: Option<usize>,
    parent_component: Option<usize>,
    explore_sent: bool,
    subtree_done_sent: bool,
    desc_sent: bool,
    marking_sent: bool,
    decided: bool,
    broadcast_sent: bool,
    armed_round: u64,
    decided_round: u64,
    skip_cross_edge_messages: bool,
}

impl BiconNode {
    pub fn init(seed: &NodeSeed<'_>, skip_cross_edge_messages: bool) -> BiconNode {
        let mut node = BiconNode {
            id: seed.id,
            n: seed.n,
            neighbors: seed.neighbors.to_vec(),
            is_root: seed.is_initiator,
            phase: if seed.is_initiator { Phase::Bfs } else { Phase::Idle },
            depth: if seed.is_initiator { Some(0) } else { None },
            parent: None,
            children: BTreeSet::new(),
            cross: BTreeSet::new(),
            unclassified: seed.neighbors.iter().copied().collect(),
            done_children: BTreeSet::new(),
            child_desc: BTreeMap::new(),
            num_desc: None,
            pre_label: None,
            interval: None,
            pending_replies: 0,
            under_bridge: false,
            marked_to_parent: false,
            component: None,
            parent_component: None,
            explore_sent: false,
            subtree_done_sent: false,
            desc_sent: false,
            marking_sent: false,
            decided: false,
            broadcast_sent: false,
            armed_round: 0,
            decided_round: 0,
            skip_cross_edge_messages,
        };
        if seed.is_initiator && seed.n == 1 {
            node.num_desc = Some(1);
            node.pre_label = Some(1);
            node.component = Some(1);
            node.under_bridge = true;
            node.phase = Phase::Done;
        }
        node
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn parent(&self) -> Option<NodeId> {
        self.parent
    }

    pub fn depth(&self) -> Option<u64> {
        self.depth
    }

    pub fn children(&self) -> &BTreeSet<NodeId> {
        &self.children
    }

    pub fn cross_neighbors(&self) -> &BTreeSet<NodeId> {
        &self.cross
    }

    pub fn num_desc(&self) -> Option<usize> {
        self.num_desc
    }

    pub fn pre_label(&self) -> Option<usize> {
        self.pre_label
    }

    pub fn under_bridge(&self) -> bool {
        self.under_bridge
    }

    pub fn marked_to_parent(&self) -> bool {
        self.marked_to_parent
    }

    pub fn component(&self) -> Option<usize> {
        self.component
    }

    fn discover(&mut self, round: u64, senders: &[NodeId], out: &mut Vec<Outgoing>) {
        self.phase = Phase::Bfs;
        self.depth = Some(round);
        let parent = *senders.iter().min().unwrap();
        self.parent = Some(parent);
        for &s in senders {
            assert!(
                self.unclassified.remove(&s),
                "node {}: neighbor {s} classified twice",
                self.id
            );
            if s != parent {
                self.cross.insert(s);
                out.push(Outgoing { to: s, msg: Message::NonChild });
            }
        }
        out.push(Outgoing { to: parent, msg: Message::Child });
        for &w in &self.unclassified {
            out.push(Outgoing { to: w, msg: Message::Explore });
        }
    }

    fn classify_child(&mut self, from: NodeId) {
        assert!(
            self.unclassified.remove(&from),
            "node {}: neighbor {from} classified twice",
            self.id
        );
        self.children.insert(from);
    }

    fn classify_cross(&mut self, from: NodeId) {
        assert!(
            self.unclassified.remove(&from),
            "node {}: neighbor {from} classified twice",
            self.id
        );
        self.cross.insert(from);
    }

    fn on_mark_input(&mut self, from: NodeId, msg: &Message) {
        match msg {
            Message::CrossEdgeFrom(_) => {
                assert!(self.cross.contains(&from), "node {}: CrossEdgeFrom off a non-cross edge", self.id)
            }
            _ => assert!(self.children.contains(&from), "node {}: mark reply from non-child", self.id),
        }
        let (u, v) = self
            .interval
            .unwrap_or_else(|| panic!("node {}: phase-4 message before interval armed", self.id));
        self.interval = Some(merge_mark(u, v, msg).expect("phase-4 kinds only"));
        assert!(self.pending_replies > 0, "node {}: unexpected phase-4 reply", self.id);
        self.pending_replies -= 1;
    }

    /// Sends `SetPreLabel` to every child (ascending node ID) and initializes
    /// the phase-4 interval and reply count.
    fn start_marking(&mut self, round: u64, out: &mut Vec<Outgoing>) {
        let k = self.pre_label.unwrap();
        let descs: Vec<usize> = self.children.iter().map(|c| self.child_desc[c]).collect();
        let labels = prelabel_children(k, &descs);
        for (&child, &label) in self.children.iter().zip(labels.iter()) {
            out.push(Outgoing { to: child, msg: Message::SetPreLabel(label) });
        }
        let nd = self.num_desc.unwrap();
        self.interval = Some((k, k + nd - 1));
        self.pending_replies = self.children.len()
            + if self.skip_cross_edge_messages { 0 } else { self.cross.len() };
        self.armed_round = round;
        self.marking_sent = false;
        self.phase = Phase::Marking;
    }

    fn progress(&mut self, round: u64, out: &mut Vec<Outgoing>, sent_to_parent: &mut bool) {
        match self.phase {
            Phase::Idle | Phase::Done | Phase::PreLabelWait => {}
            Phase::Bfs => {
                if self.is_root && !self.explore_sent {
                    for &w in &self.neighbors {
                        out.push(Outgoing { to: w, msg: Message::Explore });
                    }
                    self.explore_sent = true;
                }
                if self.unclassified.is_empty()
                    && self.done_children.len() == self.children.len()
                {
                    if self.is_root {
                        self.phase = Phase::CountDesc;
                    } else if !*sent_to_parent {
                        out.push(Outgoing { to: self.parent.unwrap(), msg: Message::SubtreeDone });
                        *sent_to_parent = true;
                        self.subtree_done_sent = true;
                        self.phase = Phase::CountDesc;
                    }
                }
            }
            Phase::CountDesc => {
                if self.child_desc.len() == self.children.len() {
                    let descs: Vec<usize> =
                        self.children.iter().map(|c| self.child_desc[c]).collect();
                    if self.is_root {
                        let nd = desc_total(&descs);
                        assert_eq!(nd, self.n, "root must count the whole tree");
                        self.num_desc = Some(nd);
                        self.pre_label = Some(1);
                        self.start_marking(round, out);
                    } else if !self.desc_sent && !*sent_to_parent {
                        let nd = desc_total(&descs);
                        self.num_desc = Some(nd);
                        out.push(Outgoing {
                            to: self.parent.unwrap(),
                            msg: Message::DescValue(nd),
                        });
                        *sent_to_parent = true;
                        self.desc_sent = true;
                        self.phase = Phase::PreLabelWait;
                    }
                }
            }
            Phase::Marking => {
                if !self.marking_sent && round > self.armed_round {
                    self.marking_sent = true;
                    if !self.skip_cross_edge_messages {
                        let k = self.pre_label.unwrap();
                        for &w in &self.cross {
                            out.push(Outgoing { to: w, msg: Message::CrossEdgeFrom(k) });
                        }
                    }
                }
                if self.marking_sent && self.pending_replies == 0 && !self.decided {
                    let (u_min, v_max) = self.interval.unwrap();
                    let (under, reply) =
                        decide_bridge(self.pre_label.unwrap(), self.num_desc.unwrap(), u_min, v_max);
                    if self.is_root {
                        assert!(under, "root interval covers every label");
                    }
                    self.under_bridge = under;
                    if !under {
                        self.marked_to_parent = true;
                    }
                    if !self.is_root {
                        assert!(!*sent_to_parent, "phase-4 reply would collide on the parent edge");
                        out.push(Outgoing { to: self.parent.unwrap(), msg: reply });
                        *sent_to_parent = true;
                    }
                    self.decided = true;
                    self.decided_round = round;
                    self.phase = Phase::Labeling;
                }
            }
            Phase::Labeling => {
                if !self.broadcast_sent && round > self.decided_round {
                    if self.is_root || self.under_bridge {
                        self.component = self.pre_label;
                    } else if self.parent_component.is_some() {
                        self.component = self.parent_component;
                    }
                    if let Some(c) = self.component {
                        for &w in &self.neighbors {
                            out.push(Outgoing { to: w, msg: Message::ComponentIs(c) });
                        }
                        self.broadcast_sent = true;
                    }
                }
                if self.broadcast_sent && (self.is_root || self.parent_component.is_some()) {
                    self.phase = Phase::Done;
                }
            }
        }
    }
}

impl NodeBehavior for BiconNode {
    fn step(&mut self, round: u64, inbox: &[Received]) -> Vec<Outgoing> {
        let mut out = Vec::new();
        let mut sent_to_parent = false;

        let discovered_now = if self.phase == Phase::Idle {
            let senders: Vec<NodeId> = inbox
                .iter()
                .filter(|r| r.msg == Message::Explore)
                .map(|r| r.from)
                .collect();
            if !senders.is_empty() {
                self.discover(round, &senders, &mut out);
                sent_to_parent = true;
                true
            } else {
                false
            }
        } else {
            false
        };

        for r in inbox {
            match &r.msg {
                Message::Explore => {
                    if !discovered_now {
                        // A crossing Explore from a same-depth neighbor.
                        self.classify_cross(r.from);
                    }
                }
                Message::Child => self.classify_child(r.from),
                Message::NonChild => self.classify_cross(r.from),
                Message::SubtreeDone => {
                    assert!(self.children.contains(&r.from), "SubtreeDone from non-child");
                    assert!(self.done_children.insert(r.from), "duplicate SubtreeDone");
                }
                Message::DescValue(d) => {
                    assert!(self.children.contains(&r.from), "DescValue from non-child");
                    assert!(self.child_desc.insert(r.from, *d).is_none(), "duplicate DescValue");
                }
                Message::SetPreLabel(l) => {
                    assert_eq!(self.phase, Phase::PreLabelWait, "early SetPreLabel");
                    assert_eq!(Some(r.from), self.parent, "SetPreLabel from non-parent");
                    self.pre_label = Some(*l);
                    self.start_marking(round, &mut out);
                }
                msg @ (Message::CrossEdgeFrom(_) | Message::MarkUpTo(_, _) | Message::Null) => {
                    self.on_mark_input(r.from, msg);
                }
                Message::ComponentIs(c) => {
                    if Some(r.from) == self.parent {
                        assert!(self.parent_component.is_none(), "duplicate parent label");
                        self.parent_component = Some(*c);
                    }
                }
                Message::ComputeDesc | Message::Knowledge(_) => {
                    panic!("node {}: unexpected {} message", self.id, r.msg.kind())
                }
            }
        }

        self.progress(round, &mut out, &mut sent_to_parent);
        out
    }

    fn is_terminal(&self) -> bool {
        self.phase == Phase::Done
    }
}

/// Node factory for the protocol, with an optional fault-injection hook that
/// suppresses all `CrossEdgeFrom` traffic (used as a negative control in the
/// corpus harness: without cross-edge reports every tree edge looks like a
/// bridge).
#[derive(Clone, Debug, Default)]
pub struct BiconProtocol {
    pub skip_cross_edge_messages: bool,
}

impl BiconProtocol {
    pub fn node(&self, seed: &NodeSeed<'_>) -> BiconNode {
        BiconNode::init(seed, self.skip_cross_edge_messages)
    }
}

/// Everything the terminated protocol left behind, extracted from node state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiconOutcome {
    pub classification: EdgeClassification,
    pub parents: Vec<Option<NodeId>>,
    pub depths: Vec<u64>,
    pub pre_labels: Vec<usize>,
    pub num_desc: Vec<usize>,
    pub under_bridge: Vec<bool>,
    pub marked_tree_edges: BTreeSet<Edge>,
    pub cross_edges: BTreeSet<Edge>,
}

impl BiconOutcome {
    pub fn tree_edges(&self) -> BTreeSet<Edge> {
        self.parents
            .iter()
            .enumerate()
            .filter_map(|(v, p)| p.map(|p| Edge::new(v, p)))
            .collect()
    }
}

/// Reads the result off a quiescent simulation: an edge is a bridge iff its
/// endpoints hold different component labels.
pub fn extract_result(sim: &Simulation<BiconNode>) -> Result<BiconOutcome, SimError> {
    if !sim.is_quiescent() {
        return Err(SimError::NotTerminated);
    }
    let nodes = sim.nodes();
    let graph = sim.graph();
    let component_label: Vec<usize> =
        nodes.iter().map(|s| s.component.expect("terminal node has a label")).collect();
    let mut bridges = BTreeSet::new();
    let mut cycle_edges = BTreeSet::new();
    for &e in graph.edges() {
        if component_label[e.u()] == component_label[e.v()] {
            cycle_edges.insert(e);
        } else {
            bridges.insert(e);
        }
    }
    let mut marked_tree_edges = BTreeSet::new();
    let mut cross_edges = BTreeSet::new();
    for node in nodes {
        if node.marked_to_parent {
            marked_tree_edges.insert(Edge::new(node.id, node.parent.unwrap()));
        }
        for &w in &node.cross {
            cross_edges.insert(Edge::new(node.id, w));
        }
    }
    // Cross classification must be symmetric.
    for e in &cross_edges {
        assert!(nodes[e.u()].cross.contains(&e.v()) && nodes[e.v()].cross.contains(&e.u()));
    }
    Ok(BiconOutcome {
        classification: EdgeClassification { bridges, cycle_edges, component_label },
        parents: nodes.iter().map(|s| s.parent).collect(),
        depths: nodes.iter().map(|s| s.depth.expect("all nodes joined the tree")).collect(),
        pre_labels: nodes.iter().map(|s| s.pre_label.expect("all nodes labeled")).collect(),
        num_desc: nodes.iter().map(|s| s.num_desc.expect("all nodes counted")).collect(),
        under_bridge: nodes.iter().map(|s| s.under_bridge).collect(),
        marked_tree_edges,
        cross_edges,
    })
}

/// Recomputes the preorder labels sequentially from a parent array, visiting
/// children in ascending node-ID order; the independent check for the
/// distributed labeling.
pub fn sequential_preorder(parents: &[Option<NodeId>]) -> Vec<usize> {
    let n = parents.len();
    let mut children: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    let mut root = None;
    for (v, p) in parents.iter().enumerate() {
        match p {
            Some(p) => children[*p].push(v),
            None => {
                assert!(root.is_none(), "exactly one root expected");
                root = Some(v);
            }
        }
    }
    let mut labels = vec![0usize; n];
    let mut next = 1usize;
    let mut stack = vec![root.expect("tree has a root")];
    while let Some(v) = stack.pop() {
        labels[v] = next;
        next += 1;
        // Reverse so the smallest child is visited first.
        for &c in children[v].iter().rev() {
            stack.push(c);
        }
    }
    labels
}

#[derive(Clone, Debug)]
pub struct BiconRun {
    pub outcome: BiconOutcome,
    pub metrics: Metrics,
}

/// Default round budget: generous against the protocol's linear-in-height
/// running time.
pub fn default_round_budget(n: usize) -> u64 {
    20 * n as u64 + 20
}

/// Builds and runs the protocol to quiescence from `initiator`.
pub fn run_protocol(graph: &Graph, initiator: NodeId) -> Result<BiconRun, SimError> {
    let config = SimConfig {
        initiator: Initiator::Single(initiator),
        max_rounds: default_round_budget(graph.n()),
        ..SimConfig::default()
    };
    run_protocol_with(graph, &BiconProtocol::default(), config)
}

/// As [`run_protocol`] but with an explicit config and protocol hooks.
pub fn run_protocol_with(
    graph: &Graph,
    protocol: &BiconProtocol,
    config: SimConfig,
) -> Result<BiconRun, SimError> {
    let mut sim = build_protocol_sim(graph, protocol, config)?;
    let metrics = sim.run_to_quiescence()?;
    let outcome = extract_result(&sim)?;
    Ok(BiconRun { outcome, metrics })
}

pub fn build_protocol_sim(
    graph: &Graph,
    protocol: &BiconProtocol,
    config: SimConfig,
) -> Result<Simulation<BiconNode>, SimError> {
    build(graph, config, |seed| protocol.node(&seed))
}
