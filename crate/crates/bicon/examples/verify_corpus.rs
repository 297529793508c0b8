//! Sweep the protocol and both oracles over a small corpus: every connected
//! graph with up to five nodes plus forty random graphs.

use bicon::cli::{cmd_check, CheckConfig};

fn main() {
    let config = CheckConfig {
        exhaustive_max_n: 5,
        random_count: 40,
        random_max_n: 30,
        ..CheckConfig::default()
    };
    let report = cmd_check(&config).unwrap();
    print!("{}", report.to_json());
    assert!(report.ok);
}
