//! Command implementations behind the `bicon` binary: run a protocol on one
//! graph, sweep correctness and complexity over corpora, and run the
//! silent-edge gadget experiment.

use std::collections::BTreeSet;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context};
use rayon::prelude::*;
use serde::Serialize;

use crate::corpus;
use crate::graph::{generate, Edge, GenSpec, Graph, NodeId};
use crate::local;
use crate::oracle::{self, CycleCaps};
use crate::protocol::{
    self, run_protocol_with, sequential_preorder, BiconProtocol,
};
use crate::sim::{congest_bit_cap, Initiator, SimConfig};

#[derive(Clone, Debug)]
pub enum InputSpec {
    File(PathBuf),
    Gen(GenSpec),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    /// Single-initiator five-phase protocol under CONGEST limits.
    Congest,
    /// All-initiated unbounded-message local bridge finding.
    Local,
    /// Local bridge finding under the doubling budget schedule.
    Doubling,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitiatorArg {
    Node(NodeId),
    All,
}

/// Parses `KIND:PARAMS` generator specs such as `cycle:8`, `path:5`,
/// `tree:12`, `barbell:4`, `random:20,0.3`.
pub fn parse_gen_spec(s: &str) -> anyhow::Result<GenSpec> {
    let (kind, params) = s
        .split_once(':')
        .ok_or_else(|| anyhow!("generator spec must look like KIND:PARAMS, got {s:?}"))?;
    let usize_param = || {
        params
            .parse::<usize>()
            .with_context(|| format!("generator {kind} takes one integer size, got {params:?}"))
    };
    match kind {
        "path" => Ok(GenSpec::Path { n: usize_param()? }),
        "cycle" => Ok(GenSpec::Cycle { n: usize_param()? }),
        "tree" => Ok(GenSpec::Tree { n: usize_param()? }),
        "barbell" => Ok(GenSpec::Barbell { k: usize_param()? }),
        "random" => {
            let (n, p) = params
                .split_once(',')
                .ok_or_else(|| anyhow!("random takes N,P (e.g. random:20,0.3)"))?;
            Ok(GenSpec::RandomConnected {
                n: n.trim().parse().context("random node count")?,
                p: p.trim().parse().context("random edge probability")?,
            })
        }
        other => bail!("unknown generator kind {other:?} (path|cycle|tree|barbell|random)"),
    }
}

pub fn parse_initiator(s: &str) -> anyhow::Result<InitiatorArg> {
    if s.eq_ignore_ascii_case("all") {
        Ok(InitiatorArg::All)
    } else {
        Ok(InitiatorArg::Node(s.parse().context("initiator must be a node id or 'all'")?))
    }
}

pub fn load_graph(input: &InputSpec, seed: u64) -> anyhow::Result<Graph> {
    match input {
        InputSpec::File(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            Ok(Graph::parse_edge_list(&text)?)
        }
        InputSpec::Gen(spec) => Ok(generate(spec, seed)?),
    }
}

/// Cycle-enumeration caps, honoring the `BICON_CYCLE_CAP` override for the
/// node cap.
pub fn cycle_caps_from_env() -> CycleCaps {
    let mut caps = CycleCaps::default();
    if let Ok(value) = std::env::var("BICON_CYCLE_CAP") {
        if let Ok(cap) = value.parse::<usize>() {
            caps.max_nodes = cap;
        }
    }
    caps
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub input: InputSpec,
    pub seed: u64,
    pub initiator: Option<InitiatorArg>,
    pub mode: Mode,
    pub max_rounds: Option<u64>,
    pub out: Option<PathBuf>,
    pub trace: Option<PathBuf>,
    pub dot: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub mode: String,
    pub n: usize,
    pub m: usize,
    pub diameter: usize,
    pub rounds: u64,
    pub total_messages: u64,
    pub max_message_bits: usize,
    pub congest_bit_cap: usize,
    pub rounds_over_diameter: Option<f64>,
    pub messages_over_m: Option<f64>,
    pub bridges: usize,
    pub components: usize,
    pub upsilon: Option<usize>,
    pub correct_from_round: Option<u64>,
}

impl std::fmt::Display for RunSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "graph: n={} m={} diameter={}", self.n, self.m, self.diameter)?;
        writeln!(f, "mode: {}", self.mode)?;
        write!(f, "rounds: {}", self.rounds)?;
        if let Some(r) = self.rounds_over_diameter {
            write!(f, " (rounds/diameter = {r:.2})")?;
        }
        writeln!(f)?;
        write!(f, "messages: {}", self.total_messages)?;
        if let Some(r) = self.messages_over_m {
            write!(f, " (messages/m = {r:.2})")?;
        }
        writeln!(f)?;
        writeln!(
            f,
            "max message bits: {} (congest cap {})",
            self.max_message_bits, self.congest_bit_cap
        )?;
        writeln!(f, "bridges: {}, components: {}", self.bridges, self.components)?;
        if let Some(u) = self.upsilon {
            writeln!(f, "cycle-witness radius: {u}")?;
        }
        if let Some(r) = self.correct_from_round {
            writeln!(f, "correct from round: {r}")?;
        }
        Ok(())
    }
}

fn write_if_requested(path: &Option<PathBuf>, contents: &str) -> anyhow::Result<()> {
    if let Some(path) = path {
        std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn distinct_count(labels: &[usize]) -> usize {
    labels.iter().collect::<BTreeSet<_>>().len()
}

/// Executes one run according to the config, writes any requested result,
/// trace, and DOT files, and returns a printable summary.
pub fn cmd_run(config: &RunConfig) -> anyhow::Result<RunSummary> {
    if config.max_rounds == Some(0) {
        bail!("--max-rounds must be at least 1");
    }
    let graph = load_graph(&config.input, config.seed)?;
    if !graph.is_connected() {
        bail!("graph must be connected");
    }
    let diam = oracle::diameter(&graph)?;
    let n = graph.n();
    let m = graph.m();
    let ratio = |x: u64, d: usize| if d == 0 { None } else { Some(x as f64 / d as f64) };

    match config.mode {
        Mode::Congest => {
            let initiator = match config.initiator {
                None => 0,
                Some(InitiatorArg::Node(v)) => v,
                Some(InitiatorArg::All) => bail!("congest mode needs a single initiator node"),
            };
            let sim_config = SimConfig {
                initiator: Initiator::Single(initiator),
                max_rounds: config.max_rounds.unwrap_or(12 * diam as u64 + 12),
                record_trace: config.trace.is_some(),
                seed: config.seed,
                ..SimConfig::default()
            };
            let mut sim =
                protocol::build_protocol_sim(&graph, &BiconProtocol::default(), sim_config)?;
            let metrics = sim.run_to_quiescence()?;
            let outcome = protocol::extract_result(&sim)?;
            let result = serde_json::json!({
                "components": outcome.classification.component_label,
                "bridges": outcome.classification.bridges,
                "tree": outcome.parents,
                "metrics": metrics.to_json(),
            });
            write_if_requested(&config.out, &format!("{:#}\n", result))?;
            write_if_requested(&config.trace, &sim.trace_jsonl())?;
            write_if_requested(&config.dot, &graph.to_dot(Some(&outcome.classification)))?;
            Ok(RunSummary {
                mode: format!("congest (initiator {initiator})"),
                n,
                m,
                diameter: diam,
                rounds: metrics.rounds,
                total_messages: metrics.total_messages,
                max_message_bits: metrics.max_message_bits,
                congest_bit_cap: congest_bit_cap(n),
                rounds_over_diameter: ratio(metrics.rounds, diam),
                messages_over_m: ratio(metrics.total_messages, m),
                bridges: outcome.classification.bridges.len(),
                components: distinct_count(&outcome.classification.component_label),
                upsilon: None,
                correct_from_round: None,
            })
        }
        Mode::Local | Mode::Doubling => {
            if matches!(config.initiator, Some(InitiatorArg::Node(_))) {
                bail!("local and doubling modes initiate all nodes; use --initiator all");
            }
            let caps = cycle_caps_from_env();
            let upsilon = if n <= caps.max_nodes {
                oracle::cycle_witness_radius(&graph, caps).ok()
            } else {
                None
            };
            let (marks, rounds, messages, max_bits, correct_from, phases_json) =
                if config.mode == Mode::Local {
                    let horizon = config.max_rounds.unwrap_or(2 * diam as u64 + 4);
                    let run = local::run_local(&graph, horizon)?;
                    let bridges = oracle::bridges_lowlink(&graph)?;
                    let correct = local::classification_correct_round(&run, &graph, &bridges);
                    (
                        run.final_marks().to_vec(),
                        horizon,
                        run.metrics.total_messages,
                        run.metrics.max_message_bits,
                        correct,
                        serde_json::Value::Null,
                    )
                } else {
                    let horizon = config.max_rounds.unwrap_or(8 * diam as u64 + 16);
                    let report = local::doubling_run(&graph, horizon)?;
                    let phases = serde_json::json!(report
                        .phases
                        .iter()
                        .map(|p| serde_json::json!({
                            "budget": p.budget,
                            "cumulative_rounds": p.cumulative_rounds_end,
                            "union_correct": p.union_correct,
                            "endpoint_correct": p.endpoint_correct,
                        }))
                        .collect::<Vec<_>>());
                    let rounds = report.phases.last().map_or(0, |p| p.cumulative_rounds_end);
                    (
                        report.final_marks,
                        rounds,
                        report.total_messages,
                        0,
                        Some(report.correct_from_round),
                        phases,
                    )
                };
            // Union classification: marks are sound, so any mark proves a
            // non-bridge.
            let mut non_bridges: BTreeSet<Edge> = BTreeSet::new();
            for m in &marks {
                non_bridges.extend(m.iter().copied());
            }
            let bridges: BTreeSet<Edge> =
                graph.edges().iter().filter(|e| !non_bridges.contains(e)).copied().collect();
            let result = serde_json::json!({
                "mode": if config.mode == Mode::Local { "local" } else { "doubling" },
                "rounds": rounds,
                "assumed_bridges": bridges,
                "non_bridges": non_bridges,
                "upsilon": upsilon,
                "correct_from_round": correct_from,
                "phases": phases_json,
            });
            write_if_requested(&config.out, &format!("{:#}\n", result))?;
            if config.dot.is_some() {
                let labels = oracle::components_after_deleting(&graph, &bridges);
                let classification = crate::graph::EdgeClassification {
                    cycle_edges: non_bridges.clone(),
                    bridges: bridges.clone(),
                    component_label: labels,
                };
                write_if_requested(&config.dot, &graph.to_dot(Some(&classification)))?;
            }
            Ok(RunSummary {
                mode: if config.mode == Mode::Local { "local (all initiators)".into() } else { "doubling (all initiators)".into() },
                n,
                m,
                diameter: diam,
                rounds,
                total_messages: messages,
                max_message_bits: max_bits,
                congest_bit_cap: congest_bit_cap(n),
                rounds_over_diameter: ratio(rounds, diam),
                messages_over_m: ratio(messages, m),
                bridges: bridges.len(),
                components: 0,
                upsilon,
                correct_from_round: correct_from,
            })
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckConfig {
    /// Run the protocol on every labeled connected graph with up to this many
    /// nodes; 0 disables the exhaustive sweep.
    pub exhaustive_max_n: usize,
    pub random_count: usize,
    pub random_max_n: usize,
    /// Random corpus entry `i` uses seed `base_seed + i`.
    pub base_seed: u64,
    pub round_factor: u64,
    pub round_slack: u64,
    pub message_factor: u64,
    pub message_slack: u64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            exhaustive_max_n: 7,
            random_count: 500,
            random_max_n: 60,
            base_seed: 1,
            round_factor: 12,
            round_slack: 12,
            message_factor: 8,
            message_slack: 8,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Mismatch {
    pub corpus: String,
    pub index: u64,
    pub kind: String,
    pub detail: String,
    pub edge_list: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CorpusReport {
    pub graphs: u64,
    pub mismatches: u64,
    pub max_round_ratio: f64,
    pub max_message_ratio: f64,
    pub examples: Vec<Mismatch>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub config: CheckConfig,
    pub exhaustive: Option<CorpusReport>,
    pub random: Option<CorpusReport>,
    pub ok: bool,
}

impl CheckReport {
    pub fn to_json(&self) -> String {
        format!("{}\n", serde_json::to_string_pretty(self).expect("report serializes"))
    }
}

struct Verdict {
    index: u64,
    mismatches: Vec<(String, String)>,
    round_ratio: f64,
    msg_ratio: f64,
    edge_list: String,
}

/// Runs the protocol and every oracle check on one graph.
fn check_graph(g: &Graph, index: u64, initiator: NodeId, protocol: &BiconProtocol, cfg: &CheckConfig) -> Verdict {
    let mut mismatches: Vec<(String, String)> = Vec::new();
    let mut push = |kind: &str, detail: String| mismatches.push((kind.into(), detail));
    let diam = oracle::diameter(g).expect("corpus graphs are connected") as u64;
    let round_bound = cfg.round_factor * diam + cfg.round_slack;
    let msg_bound = cfg.message_factor * g.m() as u64 + cfg.message_slack;

    let oracle_cls = oracle::classify_oracle(g).expect("connected");
    let lowlink = oracle::bridges_lowlink(g).expect("connected");
    if lowlink != oracle_cls.bridges {
        push(
            "oracle-disagreement",
            format!("lowlink found {:?}, deletion found {:?}", lowlink, oracle_cls.bridges),
        );
    }

    let sim_config = SimConfig {
        initiator: Initiator::Single(initiator),
        max_rounds: round_bound.max(1),
        ..SimConfig::default()
    };
    let mut round_ratio = 0.0;
    let mut msg_ratio = 0.0;
    match run_protocol_with(g, protocol, sim_config) {
        Err(e) => push("protocol-error", e.to_string()),
        Ok(run) => {
            if run.outcome.classification.bridges != oracle_cls.bridges {
                push(
                    "bridge-mismatch",
                    format!(
                        "protocol {:?}, oracle {:?}",
                        run.outcome.classification.bridges, oracle_cls.bridges
                    ),
                );
            }
            if !run.outcome.classification.same_partition(&oracle_cls) {
                push(
                    "partition-mismatch",
                    format!(
                        "protocol labels {:?}, oracle labels {:?}",
                        run.outcome.classification.component_label, oracle_cls.component_label
                    ),
                );
            }
            let mut marked = run.outcome.marked_tree_edges.clone();
            marked.extend(run.outcome.cross_edges.iter().copied());
            if marked != oracle_cls.cycle_edges {
                push(
                    "cycle-set-mismatch",
                    format!("marked+cross {:?}, oracle C {:?}", marked, oracle_cls.cycle_edges),
                );
            }
            if run.outcome.pre_labels != sequential_preorder(&run.outcome.parents) {
                push("preorder-mismatch", format!("labels {:?}", run.outcome.pre_labels));
            }
            for &e in g.edges() {
                if run.metrics.per_edge_counts.get(&e).copied().unwrap_or(0) == 0 {
                    push("silent-edge", format!("edge {e} carried no message"));
                }
            }
            if run.metrics.max_message_bits > congest_bit_cap(g.n()) {
                push(
                    "bit-cap",
                    format!(
                        "{} bits > cap {}",
                        run.metrics.max_message_bits,
                        congest_bit_cap(g.n())
                    ),
                );
            }
            if run.metrics.rounds > round_bound {
                push("round-bound", format!("{} rounds > {round_bound}", run.metrics.rounds));
            }
            if run.metrics.total_messages > msg_bound {
                push(
                    "message-bound",
                    format!("{} messages > {msg_bound}", run.metrics.total_messages),
                );
            }
            round_ratio = run.metrics.rounds as f64 / diam.max(1) as f64;
            msg_ratio = run.metrics.total_messages as f64 / g.m().max(1) as f64;
        }
    }
    let edge_list = if mismatches.is_empty() { String::new() } else { g.to_edge_list() };
    Verdict { index, mismatches, round_ratio, msg_ratio, edge_list }
}

fn fold_verdicts(corpus: &str, verdicts: impl IntoIterator<Item = Verdict>) -> CorpusReport {
    let mut report = CorpusReport::default();
    let mut examples = Vec::new();
    for v in verdicts {
        report.graphs += 1;
        report.max_round_ratio = report.max_round_ratio.max(v.round_ratio);
        report.max_message_ratio = report.max_message_ratio.max(v.msg_ratio);
        report.mismatches += v.mismatches.len() as u64;
        for (kind, detail) in v.mismatches {
            examples.push(Mismatch {
                corpus: corpus.to_string(),
                index: v.index,
                kind,
                detail,
                edge_list: v.edge_list.clone(),
            });
        }
    }
    examples.sort_by(|a, b| (a.index, &a.kind).cmp(&(b.index, &b.kind)));
    examples.truncate(25);
    report.examples = examples;
    report
}

pub fn cmd_check(config: &CheckConfig) -> anyhow::Result<CheckReport> {
    cmd_check_with_protocol(config, &BiconProtocol::default())
}

/// As [`cmd_check`], with an explicit protocol so fault-injected builds can be
/// verified to produce mismatches.
pub fn cmd_check_with_protocol(
    config: &CheckConfig,
    protocol: &BiconProtocol,
) -> anyhow::Result<CheckReport> {
    let exhaustive = if config.exhaustive_max_n == 0 {
        None
    } else {
        let mut verdicts: Vec<Verdict> = Vec::new();
        for n in 1..=config.exhaustive_max_n {
            let pairs = corpus::edge_pairs(n);
            let total = 1u64 << pairs.len();
            let mut batch: Vec<Verdict> = (0..total)
                .into_par_iter()
                .filter(|&mask| corpus::mask_connected(n, &pairs, mask))
                .map(|mask| {
                    let g = corpus::graph_from_mask(n, &pairs, mask);
                    check_graph(&g, mask, 0, protocol, config)
                })
                .collect();
            verdicts.append(&mut batch);
        }
        Some(fold_verdicts("exhaustive", verdicts))
    };

    let random = if config.random_count == 0 {
        None
    } else {
        let entries = corpus::random_corpus(config.random_count, config.random_max_n, config.base_seed);
        let verdicts: Vec<Verdict> = entries
            .par_iter()
            .map(|entry| {
                let g = entry.build();
                let initiator = (entry.seed as usize) % g.n();
                check_graph(&g, entry.index as u64, initiator, protocol, config)
            })
            .collect();
        Some(fold_verdicts("random", verdicts))
    };

    let ok = exhaustive.as_ref().map_or(true, |r| r.mismatches == 0)
        && random.as_ref().map_or(true, |r| r.mismatches == 0);
    Ok(CheckReport { config: config.clone(), exhaustive, random, ok })
}

#[derive(Clone, Debug, Serialize)]
pub struct GadgetConfig {
    #[serde(skip)]
    pub input: InputSpec,
    pub seed: u64,
    pub edge: (NodeId, NodeId),
    pub initiator: NodeId,
}

#[derive(Clone, Debug, Serialize)]
pub struct GadgetEdgeVerdict {
    pub edge: Edge,
    pub protocol_bridge: bool,
    pub oracle_bridge: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GadgetReport {
    pub silent_edges: Vec<Edge>,
    pub coverage_ok: bool,
    pub gadget_edges: Vec<GadgetEdgeVerdict>,
    pub classification_ok: bool,
    pub ok: bool,
}

/// Confirms that the protocol leaves no edge silent on `G`, then attaches the
/// subdivision gadget to the given edge and checks all ten new edges are
/// classified exactly as the bridge oracle says.
pub fn cmd_gadget(config: &GadgetConfig) -> anyhow::Result<GadgetReport> {
    let graph = load_graph(&config.input, config.seed)?;
    if !graph.is_connected() {
        bail!("graph must be connected");
    }
    let (u, v) = config.edge;
    if u == v || !graph.has_edge(u, v) {
        bail!("edge {u}-{v} is not in the graph");
    }
    let e = Edge::new(u, v);

    let run = protocol::run_protocol(&graph, config.initiator)?;
    let silent_edges: Vec<Edge> = graph
        .edges()
        .iter()
        .filter(|&&edge| run.metrics.per_edge_counts.get(&edge).copied().unwrap_or(0) == 0)
        .copied()
        .collect();
    let coverage_ok = silent_edges.is_empty();

    let modified = graph.attach_gadget(e)?;
    let rerun = protocol::run_protocol(&modified, config.initiator)?;
    let oracle_bridges = oracle::bridges_oracle(&modified)?;
    let gadget_edges: Vec<GadgetEdgeVerdict> = Graph::gadget_edges(graph.n(), e)
        .into_iter()
        .map(|edge| GadgetEdgeVerdict {
            edge,
            protocol_bridge: rerun.outcome.classification.bridges.contains(&edge),
            oracle_bridge: oracle_bridges.contains(&edge),
        })
        .collect();
    let classification_ok =
        gadget_edges.iter().all(|g| g.protocol_bridge == g.oracle_bridge);
    Ok(GadgetReport {
        silent_edges,
        coverage_ok,
        gadget_edges,
        classification_ok,
        ok: coverage_ok && classification_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gen_spec_parsing() {
        assert_eq!(parse_gen_spec("cycle:8").unwrap(), GenSpec::Cycle { n: 8 });
        assert_eq!(parse_gen_spec("barbell:4").unwrap(), GenSpec::Barbell { k: 4 });
        match parse_gen_spec("random:20,0.3").unwrap() {
            GenSpec::RandomConnected { n: 20, p } => assert!((p - 0.3).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        assert!(parse_gen_spec("mesh:9").is_err());
        assert!(parse_gen_spec("cycle").is_err());
    }

    #[test]
    fn initiator_parsing() {
        assert_eq!(parse_initiator("3").unwrap(), InitiatorArg::Node(3));
        assert_eq!(parse_initiator("all").unwrap(), InitiatorArg::All);
        assert!(parse_initiator("x").is_err());
    }

    #[test]
    fn run_barbell_and_check_result_shape() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("result.json");
        let dot = dir.path().join("graph.dot");
        let config = RunConfig {
            input: InputSpec::Gen(GenSpec::Barbell { k: 3 }),
            seed: 0,
            initiator: Some(InitiatorArg::Node(0)),
            mode: Mode::Congest,
            max_rounds: None,
            out: Some(out.clone()),
            trace: None,
            dot: Some(dot.clone()),
        };
        let summary = cmd_run(&config).unwrap();
        assert_eq!(summary.bridges, 1);
        assert_eq!(summary.components, 2);
        let json: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
        assert_eq!(json["bridges"], serde_json::json!([[2, 3]]));
        assert_eq!(json["components"].as_array().unwrap().len(), 6);
        assert_eq!(json["tree"].as_array().unwrap().len(), 6);
        let dot_text = std::fs::read_to_string(&dot).unwrap();
        assert_eq!(dot_text.matches("dashed").count(), 1);
    }

    #[test]
    fn run_rejects_bad_configs() {
        let base = RunConfig {
            input: InputSpec::Gen(GenSpec::Cycle { n: 4 }),
            seed: 0,
            initiator: None,
            mode: Mode::Congest,
            max_rounds: None,
            out: None,
            trace: None,
            dot: None,
        };
        let zero = RunConfig { max_rounds: Some(0), ..base.clone() };
        assert!(cmd_run(&zero).is_err());
        let all_congest = RunConfig { initiator: Some(InitiatorArg::All), ..base.clone() };
        assert!(cmd_run(&all_congest).is_err());
        let node_local = RunConfig {
            mode: Mode::Local,
            initiator: Some(InitiatorArg::Node(1)),
            ..base.clone()
        };
        assert!(cmd_run(&node_local).is_err());
    }

    #[test]
    fn run_rejects_disconnected_input() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.edges");
        std::fs::write(&path, "0 1\n2 3\n").unwrap();
        let config = RunConfig {
            input: InputSpec::File(path),
            seed: 0,
            initiator: None,
            mode: Mode::Congest,
            max_rounds: None,
            out: None,
            trace: None,
            dot: None,
        };
        let err = cmd_run(&config).unwrap_err();
        assert!(err.to_string().contains("connected"));
    }

    #[test]
    fn check_small_corpus_passes() {
        let config = CheckConfig {
            exhaustive_max_n: 5,
            random_count: 30,
            random_max_n: 25,
            ..CheckConfig::default()
        };
        let report = cmd_check(&config).unwrap();
        assert!(report.ok, "{}", report.to_json());
        let exhaustive = report.exhaustive.unwrap();
        assert_eq!(exhaustive.graphs, 1 + 1 + 4 + 38 + 728);
        assert_eq!(exhaustive.mismatches, 0);
        let random = report.random.unwrap();
        assert_eq!(random.graphs, 30);
        assert!(random.max_message_ratio <= 8.0 + 8.0);
    }

    #[test]
    fn corrupted_protocol_is_caught() {
        let config = CheckConfig {
            exhaustive_max_n: 4,
            random_count: 0,
            ..CheckConfig::default()
        };
        let protocol = BiconProtocol { skip_cross_edge_messages: true };
        let report = cmd_check_with_protocol(&config, &protocol).unwrap();
        assert!(!report.ok);
        let exhaustive = report.exhaustive.unwrap();
        assert!(exhaustive.mismatches > 0);
        assert!(!exhaustive.examples.is_empty());
        assert!(!exhaustive.examples[0].edge_list.is_empty());
    }

    #[test]
    fn gadget_command_on_c4() {
        let config = GadgetConfig {
            input: InputSpec::Gen(GenSpec::Cycle { n: 4 }),
            seed: 0,
            edge: (0, 1),
            initiator: 0,
        };
        let report = cmd_gadget(&config).unwrap();
        assert!(report.ok, "{report:?}");
        assert!(report.coverage_ok);
        assert_eq!(report.gadget_edges.len(), 10);
        // C4's edge is not a bridge, so neither subdivision half is.
        assert!(!report.gadget_edges[0].oracle_bridge);
    }

    #[test]
    fn gadget_command_on_p2_finds_four_bridges() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p2.edges");
        std::fs::write(&path, "0 1\n").unwrap();
        let config = GadgetConfig {
            input: InputSpec::File(path),
            seed: 0,
            edge: (0, 1),
            initiator: 0,
        };
        let report = cmd_gadget(&config).unwrap();
        assert!(report.ok);
        let bridge_count =
            report.gadget_edges.iter().filter(|g| g.oracle_bridge).count();
        assert_eq!(bridge_count, 4);
    }

    #[test]
    fn gadget_rejects_missing_edge() {
        let config = GadgetConfig {
            input: InputSpec::Gen(GenSpec::Cycle { n: 4 }),
            seed: 0,
            edge: (0, 2),
            initiator: 0,
        };
        assert!(cmd_gadget(&config).is_err());
    }

    #[test]
    fn cycle_cap_env_override() {
        std::env::set_var("BICON_CYCLE_CAP", "9");
        let caps = cycle_caps_from_env();
        std::env::remove_var("BICON_CYCLE_CAP");
        assert_eq!(caps.max_nodes, 9);
        assert_eq!(cycle_caps_from_env().max_nodes, CycleCaps::default().max_nodes);
    }

    #[test]
    fn run_outputs_are_byte_stable() {
        let dir = tempfile::tempdir().unwrap();
        let read = |name: &str| std::fs::read(dir.path().join(name)).unwrap();
        for pass in ["a", "b"] {
            let config = RunConfig {
                input: InputSpec::Gen(GenSpec::RandomConnected { n: 12, p: 0.3 }),
                seed: 5,
                initiator: None,
                mode: Mode::Congest,
                max_rounds: None,
                out: Some(dir.path().join(format!("{pass}.json"))),
                trace: Some(dir.path().join(format!("{pass}.jsonl"))),
                dot: Some(dir.path().join(format!("{pass}.dot"))),
            };
            cmd_run(&config).unwrap();
        }
        assert_eq!(read("a.json"), read("b.json"));
        assert_eq!(read("a.jsonl"), read("b.jsonl"));
        assert_eq!(read("a.dot"), read("b.dot"));
        assert!(!read("a.jsonl").is_empty());
    }

    #[test]
    fn local_mode_run() {
        let config = RunConfig {
            input: InputSpec::Gen(GenSpec::Barbell { k: 3 }),
            seed: 0,
            initiator: Some(InitiatorArg::All),
            mode: Mode::Local,
            max_rounds: None,
            out: None,
            trace: None,
            dot: None,
        };
        let summary = cmd_run(&config).unwrap();
        assert_eq!(summary.bridges, 1, "union classification finds the single bridge");
        assert_eq!(summary.upsilon, Some(1));
        assert!(summary.correct_from_round.unwrap() <= 2);
    }

    #[test]
    fn doubling_mode_run() {
        let config = RunConfig {
            input: InputSpec::Gen(GenSpec::Cycle { n: 6 }),
            seed: 0,
            initiator: None,
            mode: Mode::Doubling,
            max_rounds: None,
            out: None,
            trace: None,
            dot: None,
        };
        let summary = cmd_run(&config).unwrap();
        assert_eq!(summary.bridges, 0);
        assert!(summary.correct_from_round.is_some());
    }
}
