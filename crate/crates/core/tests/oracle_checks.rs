//! Exhaustive ground truth: BFS tables, optimality gaps, Steiner trees against
//! brute force, and sampler frequencies.

use cnotopt::bench::{sample_rng, sample_walk_circuit};
use cnotopt::gf2::gl_order;
use cnotopt::oracle::{exhaustive_gap, gap_for, optimal_size_table, optimality_gap};
use cnotopt::rowcol::synthesize_rowcol;
use cnotopt::sbe::{synthesize_sbe, SbeParams};
use cnotopt::{CnotGate, GF2Matrix, TopologyGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn table_sizes_match_group_order() {
    for n in 2..=4 {
        for g in [TopologyGraph::path(n).unwrap(), TopologyGraph::complete(n).unwrap()] {
            assert_eq!(optimal_size_table(&g).unwrap().len() as u128, gl_order(n as u32));
        }
    }
    assert_eq!(gl_order(3), 168);
    assert_eq!(gl_order(4), 20160);
}

#[test]
fn distances_are_consistent_with_single_moves() {
    // Every matrix at distance d > 0 has a neighbour at d - 1 and none below.
    let g = TopologyGraph::path(3).unwrap();
    let t = optimal_size_table(&g).unwrap();
    for (key, d) in t.entries() {
        let m = GF2Matrix::decode(3, key);
        let mut best = usize::MAX;
        for (u, v) in g.edges() {
            for (c, tgt) in [(u, v), (v, u)] {
                let mut next = m.clone();
                next.row_add(c, tgt).unwrap();
                best = best.min(t.get(&next).unwrap());
            }
        }
        if d > 0 {
            assert_eq!(best, d - 1);
        }
    }
}

#[test]
fn trivial_gaps_are_zero() {
    let g = TopologyGraph::path(3).unwrap();
    let t = optimal_size_table(&g).unwrap();
    let synth = |m: &GF2Matrix| synthesize_rowcol(m, &g);
    assert_eq!(gap_for(&t, &GF2Matrix::identity(3), &synth).unwrap(), 0);
    let mut e = GF2Matrix::identity(3);
    e.row_add(1, 2).unwrap();
    assert_eq!(t.get(&e), Some(1));
    assert_eq!(gap_for(&t, &e, &synth).unwrap(), 0);
}

#[test]
fn rowcol_never_beats_bfs() {
    for g in [TopologyGraph::path(3).unwrap(), TopologyGraph::complete(3).unwrap(), TopologyGraph::path(4).unwrap()] {
        let stats = exhaustive_gap(&g, &|m| synthesize_rowcol(m, &g)).unwrap();
        assert_eq!(stats.samples as u128, gl_order(g.num_vertices() as u32));
        assert_eq!(stats.histogram.iter().sum::<usize>(), stats.samples);
    }
}

#[test]
fn sbe_never_beats_bfs() {
    let g = TopologyGraph::complete(4).unwrap();
    let stats = exhaustive_gap(&g, &|m| synthesize_sbe(m, &g, SbeParams { k: 1, s: 1 })).unwrap();
    assert_eq!(stats.samples, 20160);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let sampled = optimality_gap(&g, &|m| synthesize_rowcol(m, &g), 200, &mut rng).unwrap();
    assert_eq!(sampled.samples, 200);
    assert!(sampled.mean >= 0.0);
}

/// Minimum Steiner tree edge count by enumerating vertex subsets.
fn steiner_opt(g: &TopologyGraph, terminals: &[usize]) -> usize {
    let n = g.num_vertices();
    let need: u32 = terminals.iter().map(|&t| 1u32 << t).sum();
    let mut best = usize::MAX;
    for set in 0u32..(1 << n) {
        if set & need != need {
            continue;
        }
        let start = terminals[0];
        let mut seen = 1u32 << start;
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &w in g.neighbors(v) {
                if set >> w & 1 == 1 && seen >> w & 1 == 0 {
                    seen |= 1 << w;
                    stack.push(w);
                }
            }
        }
        if seen == set {
            best = best.min(set.count_ones() as usize - 1);
        }
    }
    best
}

#[test]
fn steiner_within_twice_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..300 {
        let n = rng.random_range(2..10);
        let mut edges = Vec::new();
        for v in 1..n {
            edges.push((rng.random_range(0..v), v));
        }
        for _ in 0..rng.random_range(0..2 * n) {
            let (u, v) = (rng.random_range(0..n), rng.random_range(0..n));
            if u < v && !edges.contains(&(u, v)) {
                edges.push((u, v));
            }
        }
        let g = TopologyGraph::from_edges(n, &edges).unwrap();
        let mut terminals: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.4)).collect();
        if terminals.is_empty() {
            terminals.push(rng.random_range(0..n));
        }
        let tree = g.steiner_tree_2approx(&terminals).unwrap();
        let size = tree.node_count() - 1;
        let opt = steiner_opt(&g, &terminals);
        assert!(size <= 2 * opt, "tree {size} vs optimum {opt} on {edges:?} for {terminals:?}");
        assert!(size >= opt);
        for (c, p) in tree.tree.edges() {
            assert!(g.has_edge(c, p));
        }
    }
}

#[test]
fn walk_sampler_direction_is_fair() {
    // Chi-square with one degree of freedom; 10.83 is the 0.1% critical value.
    let g = TopologyGraph::path(2).unwrap();
    let trials = 10_000;
    let forward = (0..trials)
        .filter(|&s| sample_walk_circuit(&g, 1, &mut sample_rng(s as u64, 1, 0)).gates()[0] == CnotGate::new(0, 1))
        .count() as f64;
    let half = trials as f64 / 2.0;
    let chi2 = 2.0 * (forward - half).powi(2) / half;
    assert!(chi2 < 10.83, "chi-square {chi2}");
}

#[test]
fn walk_sampler_edges_are_uniform() {
    let g = TopologyGraph::preset("t20").unwrap();
    let edges = g.edges();
    let c = sample_walk_circuit(&g, 100_000, &mut sample_rng(9, 0, 0));
    let mut counts = vec![0f64; edges.len()];
    for gate in c.gates() {
        let key = (gate.control.min(gate.target), gate.control.max(gate.target));
        counts[edges.iter().position(|&e| e == key).unwrap()] += 1.0;
    }
    let expect = 100_000.0 / edges.len() as f64;
    let chi2: f64 = counts.iter().map(|c| (c - expect).powi(2) / expect).sum();
    // 18 degrees of freedom (19 edges); 42.3 is the 0.1% critical value.
    assert_eq!(edges.len(), 19);
    assert!(chi2 < 42.3, "chi-square {chi2}");
}
