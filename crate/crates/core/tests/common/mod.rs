#![allow(dead_code)]

use merge_trees::merge_tree::{MergeTree, WeightedMergeTree};
use merge_trees::pl_function::PlFunction;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Multiples of 1/4 so that ties and exact sums show up often.
fn step<R: Rng>(rng: &mut R, lo: u32, hi: u32) -> f64 {
    rng.random_range(lo..=hi) as f64 * 0.25
}

/// Random merge tree with `leaves` leaves, 2- or 3-way merges and up to
/// `order_two` extra order-2 vertices.
pub fn random_tree<R: Rng>(rng: &mut R, leaves: usize, order_two: usize) -> MergeTree<f64> {
    let mut parents: Vec<Option<usize>> = Vec::new();
    let mut heights: Vec<f64> = Vec::new();
    let mut comps: Vec<usize> = Vec::new();
    for _ in 0..leaves {
        comps.push(heights.len());
        parents.push(None);
        heights.push(step(rng, 0, 8));
    }
    while comps.len() > 1 {
        let k = if comps.len() >= 3 && rng.random_bool(0.3) { 3 } else { 2 };
        let mut picked: Vec<usize> = sample(rng, comps.len(), k).into_vec();
        picked.sort_unstable_by(|a, b| b.cmp(a));
        let id = heights.len();
        let mut top: f64 = f64::NEG_INFINITY;
        for i in picked {
            let c = comps.swap_remove(i);
            parents[c] = Some(id);
            top = top.max(heights[c]);
        }
        parents.push(None);
        heights.push(top + step(rng, 1, 6));
        comps.push(id);
    }
    for _ in 0..order_two {
        let v = rng.random_range(0..heights.len());
        let id = heights.len();
        let h = match parents[v] {
            Some(p) => (heights[v] + heights[p]) / 2.0,
            None => heights[v] + step(rng, 1, 4),
        };
        parents.push(parents[v]);
        heights.push(h);
        parents[v] = Some(id);
    }
    let root = heights.len();
    let top = parents.iter().position(|p| p.is_none()).unwrap();
    parents[top] = Some(root);
    parents.push(None);
    heights.push(f64::INFINITY);
    MergeTree::from_parents(&parents, &heights).unwrap()
}

/// A pair of random trees truncated at a common `K`.
pub fn random_pair<R: Rng>(rng: &mut R, max_leaves: usize, order_two: usize) -> (WeightedMergeTree<f64>, WeightedMergeTree<f64>) {
    let l1 = rng.random_range(1..=max_leaves);
    let l2 = rng.random_range(1..=max_leaves);
    let o1 = rng.random_range(0..=order_two);
    let o2 = rng.random_range(0..=order_two);
    let a = random_tree(rng, l1, o1);
    let b = random_tree(rng, l2, o2);
    let k = a.max_finite_height().max(b.max_finite_height()) + step(rng, 0, 4);
    (a.truncate(k).unwrap(), b.truncate(k).unwrap())
}

/// Random PL function on `0..n` with values on a coarse grid (ties likely
/// when `coarse`).
pub fn random_function<R: Rng>(rng: &mut R, n: usize, coarse: bool) -> PlFunction<f64> {
    let ys: Vec<f64> = (0..n)
        .map(|_| {
            if coarse {
                rng.random_range(0..6) as f64
            } else {
                rng.random_range(-10.0..10.0)
            }
        })
        .collect();
    PlFunction::on_integer_grid("f", ys).unwrap()
}
