//! Test corpora: exhaustive enumeration of labeled connected graphs by edge
//! subset, and deterministic random corpora with varied density.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{GenSpec, Graph, NodeId};

/// The fixed vertex-pair order used to interpret edge-subset masks.
pub fn edge_pairs(n: usize) -> Vec<(NodeId, NodeId)> {
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for u in 0..n {
        for v in u + 1..n {
            pairs.push((u, v));
        }
    }
    pairs
}

/// Union-find connectivity check for the graph encoded by `mask`, without
/// materializing it.
pub fn mask_connected(n: usize, pairs: &[(NodeId, NodeId)], mask: u64) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut components = n;
    for (i, &(u, v)) in pairs.iter().enumerate() {
        if mask >> i & 1 == 1 {
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru != rv {
                parent[ru] = rv;
                components -= 1;
            }
        }
    }
    components == 1
}

pub fn graph_from_mask(n: usize, pairs: &[(NodeId, NodeId)], mask: u64) -> Graph {
    let edges = pairs
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, &e)| e);
    Graph::from_edges(n, edges).expect("mask encodes a simple graph")
}

/// All masks over `edge_pairs(n)` that encode connected graphs, ascending.
pub fn connected_masks(n: usize) -> impl Iterator<Item = u64> {
    let pairs = edge_pairs(n);
    (0..1u64 << pairs.len()).filter(move |&mask| mask_connected(n, &pairs, mask))
}

/// One graph of a deterministic random corpus.
#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub index: usize,
    pub seed: u64,
    pub spec: GenSpec,
}

impl CorpusEntry {
    pub fn build(&self) -> Graph {
        crate::graph::generate(&self.spec, self.seed).expect("corpus specs are satisfiable")
    }
}

/// `count` connected graphs with 2..=max_n nodes and cycled edge densities
/// (density 0 yields the augmentation spanning tree). Entry `i` uses seed
/// `base_seed + i`, so the default base of 1 gives seeds `1..=count`.
pub fn random_corpus(count: usize, max_n: usize, base_seed: u64) -> Vec<CorpusEntry> {
    const DENSITIES: [f64; 7] = [0.0, 0.08, 0.15, 0.25, 0.4, 0.6, 0.85];
    assert!(max_n >= 2);
    (0..count)
        .map(|index| {
            let seed = base_seed + index as u64;
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_c0de);
            let n = rng.gen_range(2..=max_n);
            let p = DENSITIES[index % DENSITIES.len()];
            CorpusEntry { index, seed, spec: GenSpec::RandomConnected { n, p } }
        })
        .collect()
}
