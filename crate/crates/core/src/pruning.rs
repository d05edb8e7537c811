//! Leaf pruning of weighted merge trees and the elbow curve used to pick a
//! pruning threshold.

use std::io::Write;

use crate::error::{Error, Result};
use crate::merge_tree::{MergeTree, NodeId, WeightedMergeTree};
use crate::pl_function::PlFunction;
use crate::scalar::{cmp, Scalar};

/// The branch hanging from `leaf`: the topmost vertex of the chain of
/// single-child vertices above it, and the father of that vertex.
fn branch<T: Scalar>(tree: &MergeTree<T>, leaf: NodeId) -> (NodeId, NodeId) {
    let mut v = leaf;
    loop {
        let p = tree.parent(v).expect("leaf is not the root");
        if p == tree.root() || tree.children(p).len() > 1 {
            return (v, p);
        }
        v = p;
    }
}

/// Leaf of minimal branch weight (ties: smallest id) among the branches
/// whose father is not the root.
fn lightest_leaf<T: Scalar>(tree: &MergeTree<T>) -> Option<(NodeId, T)> {
    tree.leaves()
        .into_iter()
        .filter_map(|l| {
            let (_, father) = branch(tree, l);
            (father != tree.root()).then(|| (l, tree.height(father) - tree.height(l)))
        })
        .min_by(|a, b| cmp(&a.1, &b.1).then(a.0.cmp(&b.0)))
}

/// One pruning step; `None` when the tree is a fixed point for `eps`.
fn step<T: Scalar>(t: &WeightedMergeTree<T>, eps: T) -> Option<(WeightedMergeTree<T>, T)> {
    let (leaf, w) = lightest_leaf(t.tree())?;
    if !(w < eps) {
        return None;
    }
    let mut tree: MergeTree<T> = t.tree().clone();
    let (top, father) = branch(&tree, leaf);
    let mut v = leaf;
    loop {
        let up = tree.parent(v).expect("chain lies below the father");
        tree.delete_node(v);
        if v == top {
            break;
        }
        v = up;
    }
    if father != tree.root() && tree.children(father).len() == 1 {
        tree.ghost_node(father);
    }
    let next = WeightedMergeTree::new(tree, t.k()).expect("pruning keeps heights below K");
    Some((next, w))
}

/// Deletes the lightest branch (a leaf together with the single-child
/// vertices above it) if its weight is below `eps`, ghosting its father
/// when it is left with a single child. Vertex ids are preserved.
pub fn prune_step<T: Scalar>(t: &WeightedMergeTree<T>, eps: T) -> WeightedMergeTree<T> {
    match step(t, eps) {
        Some((next, _)) => next,
        None => t.clone(),
    }
}

/// Iterates [`prune_step`] to its fixed point.
pub fn prune<T: Scalar>(t: &WeightedMergeTree<T>, eps: T) -> WeightedMergeTree<T> {
    prune_with_log(t, eps).0
}

/// Pruned tree together with the weights of the removed leaves, in removal
/// order.
pub fn prune_with_log<T: Scalar>(t: &WeightedMergeTree<T>, eps: T) -> (WeightedMergeTree<T>, Vec<T>) {
    let mut cur = t.clone();
    let mut removed = Vec::new();
    while let Some((next, w)) = step(&cur, eps) {
        removed.push(w);
        cur = next;
    }
    (cur, removed)
}

/// Threshold for a fraction of the value range `[lo, hi]`.
pub fn threshold_from_fraction<T: Scalar>(fraction: T, lo: T, hi: T) -> Result<T> {
    if !(fraction >= T::zero()) || !(hi >= lo) {
        return Err(Error::Parameter(format!(
            "pruning fraction must be nonnegative and the range ordered, got {fraction} over [{lo}, {hi}]"
        )));
    }
    Ok(fraction * (hi - lo))
}

/// Functional counterpart of [`prune`]: raises the basin of each pruned
/// leaf up to its merge height. The result `g` satisfies
/// `0 <= g - f < eps` and its merge tree is isomorphic to the pruned tree.
pub fn prune_function<T: Scalar>(f: &PlFunction<T>, eps: T) -> Result<PlFunction<T>> {
    let mut g = f.clone();
    let k = g.max_value();
    loop {
        let t = MergeTree::from_function(&g).truncate(k)?;
        let Some((leaf, w)) = lightest_leaf(t.tree()) else {
            return Ok(g);
        };
        if !(w < eps) {
            return Ok(g);
        }
        let level = t.tree().height(branch(t.tree(), leaf).1);
        // leaves are numbered left to right, as minimum plateaus
        let plateau = g.critical_profile().minima[leaf];
        g = raise_basin(&g, plateau.start, level)?;
    }
}

/// Sets `f` to `level` on the component of `{f < level}` containing the
/// breakpoint `seed`, adding the crossing points as breakpoints.
fn raise_basin<T: Scalar>(f: &PlFunction<T>, seed: usize, level: T) -> Result<PlFunction<T>> {
    let (xs, ys) = (f.xs(), f.ys());
    let n = xs.len();
    let mut lo = seed;
    while lo > 0 && ys[lo - 1] < level {
        lo -= 1;
    }
    let mut hi = seed;
    while hi + 1 < n && ys[hi + 1] < level {
        hi += 1;
    }
    let crossing = |i: usize, j: usize| {
        // point on segment i..j where the value equals level
        let t = (level - ys[i]) / (ys[j] - ys[i]);
        xs[i] + t * (xs[j] - xs[i])
    };
    let mut nx = Vec::with_capacity(n + 2);
    let mut ny = Vec::with_capacity(n + 2);
    nx.extend_from_slice(&xs[..lo]);
    ny.extend_from_slice(&ys[..lo]);
    if lo > 0 && ys[lo - 1] > level {
        let x = crossing(lo, lo - 1);
        if x > xs[lo - 1] && x < xs[lo] {
            nx.push(x);
            ny.push(level);
        }
    }
    for &x in &xs[lo..=hi] {
        nx.push(x);
        ny.push(level);
    }
    if hi + 1 < n && ys[hi + 1] > level {
        let x = crossing(hi, hi + 1);
        if x > xs[hi] && x < xs[hi + 1] {
            nx.push(x);
            ny.push(level);
        }
    }
    nx.extend_from_slice(&xs[hi + 1..]);
    ny.extend_from_slice(&ys[hi + 1..]);
    PlFunction::new(f.id(), nx, ny)
}

/// Average number of leaves of the pruned trees over a threshold grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ElbowCurve<T> {
    pub thresholds: Vec<T>,
    pub avg_leaves: Vec<T>,
}

impl<T: Scalar> ElbowCurve<T> {
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["threshold", "avg_leaves"])?;
        for (t, a) in self.thresholds.iter().zip(&self.avg_leaves) {
            w.write_record([t.to_string(), a.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Elbow curve over an increasing grid. Pruning at a larger threshold
/// continues the deletion sequence of a smaller one, so each tree is pruned
/// incrementally along the grid.
pub fn elbow_curve<T: Scalar>(trees: &[WeightedMergeTree<T>], grid: &[T]) -> Result<ElbowCurve<T>> {
    if grid.is_empty() {
        return Err(Error::Parameter("empty threshold grid".into()));
    }
    if trees.is_empty() {
        return Err(Error::Parameter("no trees to prune".into()));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) || !(grid[0] >= T::zero()) {
        return Err(Error::Parameter(
            "thresholds must be nonnegative and strictly increasing".into(),
        ));
    }
    let mut totals = vec![0usize; grid.len()];
    for t in trees {
        let mut cur = t.clone();
        for (i, &eps) in grid.iter().enumerate() {
            cur = prune(&cur, eps);
            totals[i] += cur.leaf_count();
        }
    }
    let n = T::of(trees.len() as f64);
    Ok(ElbowCurve {
        thresholds: grid.to_vec(),
        avg_leaves: totals.iter().map(|&c| T::of(c as f64) / n).collect(),
    })
}

/// `count` evenly spaced thresholds from `lo` to `hi` inclusive.
pub fn linear_grid<T: Scalar>(lo: T, hi: T, count: usize) -> Vec<T> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|i| lo + (hi - lo) * T::of(i as f64 / (count - 1) as f64))
            .collect(),
    }
}
