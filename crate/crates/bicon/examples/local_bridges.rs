//! The all-initiated local algorithm: watch per-node knowledge and non-bridge
//! marks grow round by round on a barbell graph.

use bicon::graph::{generate, GenSpec};
use bicon::local;
use bicon::oracle::{self, CycleCaps};

fn main() {
    let graph = generate(&GenSpec::Barbell { k: 3 }, 0).unwrap();
    let bridges = oracle::bridges_oracle(&graph).unwrap();
    let upsilon = oracle::cycle_witness_radius(&graph, CycleCaps::default()).unwrap();
    println!("barbell(3): bridges {:?}, cycle-witness radius {upsilon}", bridges);

    let run = local::run_local(&graph, 2 * upsilon as u64 + 2).unwrap();
    for (round, marks) in run.snapshots.iter().enumerate() {
        println!("\nafter round {round}:");
        for v in graph.nodes() {
            println!(
                "  node {v}: knows {:?}, non-bridges {:?}",
                run.settled[round][v], marks[v]
            );
        }
        assert!(local::sound(&bridges, marks), "no bridge is ever marked");
    }

    let correct = local::classification_correct_round(&run, &graph, &bridges).unwrap();
    println!("\nboth endpoints of every edge are correct from round {correct} (bound 2*upsilon = {})", 2 * upsilon);
}
