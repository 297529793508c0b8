//! The doubling budget schedule: guess the cycle-witness radius as 1, 2, 4,
//! ... and rerun the local algorithm, carrying marks across restarts, until
//! the classification stabilizes.

use bicon::graph::{generate, GenSpec};
use bicon::local;
use bicon::oracle::{self, CycleCaps};

fn main() {
    for (name, spec) in [
        ("cycle(8)", GenSpec::Cycle { n: 8 }),
        ("barbell(3)", GenSpec::Barbell { k: 3 }),
        ("tree(9)", GenSpec::Tree { n: 9 }),
    ] {
        let graph = generate(&spec, 1).unwrap();
        let upsilon = oracle::cycle_witness_radius(&graph, CycleCaps::default()).unwrap() as u64;
        let report = local::doubling_run(&graph, 8 * upsilon + 8).unwrap();
        println!("{name}: upsilon {upsilon}");
        for phase in &report.phases {
            println!(
                "  budget {:>2} (rounds so far {:>2}): union-correct {}, endpoint-correct {}",
                phase.budget,
                phase.cumulative_rounds_end,
                phase.union_correct,
                phase.endpoint_correct
            );
        }
        println!(
            "  permanently correct from round {} (bound 8*upsilon+4 = {})\n",
            report.correct_from_round,
            8 * upsilon + 4
        );
        assert!(report.correct_from_round <= 8 * upsilon + 4);
    }
}
