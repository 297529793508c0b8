//! Run the single-initiator protocol on a barbell graph, print the metrics,
//! and cross-check the distributed answer against the sequential oracle.

use bicon::graph::{generate, GenSpec};
use bicon::oracle;
use bicon::protocol::{self, BiconProtocol};
use bicon::sim::{congest_bit_cap, SimConfig};

fn main() {
    let graph = generate(&GenSpec::Barbell { k: 4 }, 0).unwrap();
    let config = SimConfig { record_trace: true, ..SimConfig::default() };
    let mut sim = protocol::build_protocol_sim(&graph, &BiconProtocol::default(), config).unwrap();
    let metrics = sim.run_to_quiescence().unwrap();
    let outcome = protocol::extract_result(&sim).unwrap();

    let diam = oracle::diameter(&graph).unwrap();
    println!("barbell(4): n={} m={} diameter={}", graph.n(), graph.m(), diam);
    println!(
        "rounds={} ({}x diameter), messages={} ({:.2}x m), max bits={} (cap {})",
        metrics.rounds,
        metrics.rounds / diam as u64,
        metrics.total_messages,
        metrics.total_messages as f64 / graph.m() as f64,
        metrics.max_message_bits,
        congest_bit_cap(graph.n()),
    );
    println!("components: {:?}", outcome.classification.component_label);
    println!("bridges:    {:?}", outcome.classification.bridges);

    let oracle_bridges = oracle::bridges_oracle(&graph).unwrap();
    assert_eq!(outcome.classification.bridges, oracle_bridges);
    println!("matches the deletion oracle: yes");

    println!("\nfirst six trace events:");
    for event in sim.trace().iter().take(6) {
        println!("  {}", serde_json::to_string(event).unwrap());
    }
}
