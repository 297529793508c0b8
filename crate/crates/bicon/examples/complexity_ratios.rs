//! Measure how the protocol's rounds and messages scale against the diameter
//! and edge count across densities.

use bicon::graph::{generate, GenSpec};
use bicon::oracle;
use bicon::protocol;

fn main() {
    println!("{:>4} {:>6} {:>5} {:>5} {:>7} {:>8} {:>12} {:>11}", "n", "p", "m", "diam", "rounds", "messages", "rounds/diam", "messages/m");
    for &p in &[0.0, 0.1, 0.3, 0.7] {
        for &n in &[10, 20, 40, 60] {
            let g = generate(&GenSpec::RandomConnected { n, p }, n as u64).unwrap();
            let diam = oracle::diameter(&g).unwrap();
            let run = protocol::run_protocol(&g, 0).unwrap();
            println!(
                "{:>4} {:>6.2} {:>5} {:>5} {:>7} {:>8} {:>12.2} {:>11.2}",
                n,
                p,
                g.m(),
                diam,
                run.metrics.rounds,
                run.metrics.total_messages,
                run.metrics.rounds as f64 / diam.max(1) as f64,
                run.metrics.total_messages as f64 / g.m() as f64,
            );
            assert!(run.metrics.rounds <= 12 * diam as u64 + 12);
            assert!(run.metrics.total_messages <= 8 * g.m() as u64 + 8);
        }
    }
}
