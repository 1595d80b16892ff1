//! Seeded random instances shared by the integration tests.
#![allow(dead_code)]

use dynkin_core::solver::QuittingGame;
use dynkin_core::stopping::{EventTree, NodeSpec};
use dynkin_core::{SinglePeriodGame, Tolerance, WeightSystem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point on the simplex, scaled to `total`.
pub fn simplex(rng: &mut ChaCha8Rng, m: usize, total: f64) -> Vec<f64> {
    let e: Vec<f64> = (0..m).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.iter().map(|v| total * v / s).collect()
}

pub fn uniform(rng: &mut ChaCha8Rng, m: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..m).map(|_| rng.random_range(lo..hi)).collect()
}

pub fn weights(rng: &mut ChaCha8Rng, m: usize, total: f64) -> WeightSystem {
    WeightSystem::new(simplex(rng, m, total), Tolerance::DEFAULT).expect("valid generators")
}

pub fn single_game(rng: &mut ChaCha8Rng, m: usize, total: f64) -> SinglePeriodGame {
    let w = weights(rng, m, total);
    let x = uniform(rng, m, -10.0, 10.0);
    let p = uniform(rng, m, -10.0, 10.0);
    SinglePeriodGame::new(w, x, p).expect("matching dimensions")
}

/// Tree of the given depth with one or two children per internal node.
pub fn tree(rng: &mut ChaCha8Rng, m: usize, depth: usize) -> EventTree {
    let mut specs = vec![NodeSpec {
        x: uniform(rng, m, -10.0, 10.0),
        children: vec![],
    }];
    let mut frontier = vec![0];
    for _ in 0..depth {
        let mut next = Vec::new();
        for parent in frontier {
            let kids = rng.random_range(1..=2);
            let split = rng.random_range(0.1..0.9);
            for c in 0..kids {
                let prob = if kids == 1 {
                    1.0
                } else if c == 0 {
                    split
                } else {
                    1.0 - split
                };
                specs.push(NodeSpec {
                    x: uniform(rng, m, -10.0, 10.0),
                    children: vec![],
                });
                let id = specs.len() - 1;
                specs[parent].children.push((id, prob));
                next.push(id);
            }
        }
        frontier = next;
    }
    EventTree::new(specs, 0, Tolerance::DEFAULT).expect("well-formed tree")
}

pub fn quitting_game(rng: &mut ChaCha8Rng, m: usize, horizon: usize, total: f64) -> QuittingGame {
    let w = weights(rng, m, total);
    let rows = (0..=horizon)
        .map(|_| uniform(rng, m, -10.0, 10.0))
        .collect();
    QuittingGame::new(w, rows).expect("valid quitting game")
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0f64, |acc, (x, y)| acc.max((x - y).abs()))
}
