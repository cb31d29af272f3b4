#![allow(dead_code)]

use raag_core::Graph;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn graph_from_bits(n: usize, bits: u64) -> Graph {
    let mut edges = Vec::new();
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            if bits >> k & 1 == 1 {
                edges.push((i, j));
            }
            k += 1;
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

pub fn random_graph(rng: &mut impl Rng, n: usize) -> Graph {
    let pairs = n * (n - 1) / 2;
    let bits = if pairs == 0 {
        0
    } else {
        rng.gen::<u64>() & ((1u64 << pairs) - 1)
    };
    graph_from_bits(n, bits)
}

pub fn random_relabel(rng: &mut impl Rng, g: &Graph) -> Graph {
    let mut perm: Vec<usize> = (0..g.n()).collect();
    perm.shuffle(rng);
    g.permute(&perm)
}

pub fn all_classes(max_n: usize) -> Vec<Graph> {
    (1..=max_n)
        .flat_map(|n| raag_core::autgrp::enumerate_graphs(n).unwrap())
        .collect()
}
