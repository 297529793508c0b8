//! Edge-biconnectivity on synchronous message-passing networks.
//!
//! The crate has three layers:
//!
//! * [`graph`] and [`oracle`] — an immutable undirected graph type with
//!   parsing, generators, and DOT export, plus sequential ground truth:
//!   bridges by edge deletion and by low-link traversal, edge-biconnected
//!   component labels, diameter, and the cycle-witness radius.
//! * [`sim`] — a deterministic synchronous round engine that enforces the
//!   CONGEST contract (one message per directed edge per round, logarithmic
//!   message size) and accounts rounds, messages, and bits.
//! * [`protocol`] and [`local`] — the distributed algorithms: a
//!   single-initiator five-phase protocol that labels edge-biconnected
//!   components in time proportional to the BFS-tree height with a constant
//!   number of messages per edge, and an all-initiated unbounded-message
//!   local algorithm whose convergence is governed by the cycle-witness
//!   radius.
//!
//! ```
//! use bicon::graph::{generate, GenSpec};
//! use bicon::oracle;
//! use bicon::protocol;
//!
//! let g = generate(&GenSpec::Barbell { k: 3 }, 0).unwrap();
//! let run = protocol::run_protocol(&g, 0).unwrap();
//! let oracle_bridges = oracle::bridges_oracle(&g).unwrap();
//! assert_eq!(run.outcome.classification.bridges, oracle_bridges);
//! ```
//!
//! The `bicon` binary and the `examples/` directory expose the same
//! machinery: `bicon run` executes one protocol on one graph, `bicon check`
//! sweeps correctness and complexity bounds over exhaustive and random
//! corpora, and `bicon gadget` runs the silent-edge experiment.

pub mod cli;
pub mod corpus;
pub mod graph;
pub mod local;
pub mod oracle;
pub mod protocol;
pub mod sim;

pub use graph::{Edge, EdgeClassification, GenSpec, Graph, GraphError, NodeId};
pub use sim::{Initiator, Message, Metrics, SimConfig, SimError, Simulation};
