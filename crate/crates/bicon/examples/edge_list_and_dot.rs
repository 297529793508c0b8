//! Parse an edge-list, classify it sequentially, and emit DOT with bridges
//! dashed and nodes colored by component.

use bicon::graph::Graph;
use bicon::oracle;

const EDGE_LIST: &str = "\
# two triangles joined by a path through node 6
0 1
1 2
0 2
3 4
4 5
3 5
2 6
6 3
";

fn main() {
    let graph = Graph::parse_edge_list(EDGE_LIST).unwrap();
    println!("parsed n={} m={}", graph.n(), graph.m());
    let classification = oracle::classify_oracle(&graph).unwrap();
    println!("bridges: {:?}", classification.bridges);
    println!("labels:  {:?}", classification.component_label);
    println!("\n{}", graph.to_dot(Some(&classification)));
}
