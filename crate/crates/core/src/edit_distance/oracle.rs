//! Exhaustive edit distance for small trees.
//!
//! Every pair of deletion sets is tried; after deleting, all order-2
//! vertices are ghosted and the two reduced trees are compared by a
//! minimal-cost isomorphism over all child permutations.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::merge_tree::WeightedMergeTree;
use crate::scalar::Scalar;

pub const MAX_LEAVES: usize = 4;
pub const MAX_VERTICES: usize = 9;

#[derive(Debug, Clone)]
struct Reduced<T> {
    weight: Vec<T>,
    children: Vec<Vec<usize>>,
    top: usize,
}

impl<T: Scalar> Reduced<T> {
    fn shape(&self, v: usize) -> String {
        let mut parts: Vec<String> = self.children[v].iter().map(|&c| self.shape(c)).collect();
        parts.sort();
        format!("({})", parts.concat())
    }

    fn match_cost(&self, u: usize, other: &Self, v: usize) -> T {
        let own = (self.weight[u] - other.weight[v]).abs();
        let a = &self.children[u];
        let b = &other.children[v];
        if a.len() != b.len() {
            return T::infinity();
        }
        let mut used = vec![false; b.len()];
        own + self.best_pairing(a, 0, other, b, &mut used)
    }

    fn best_pairing(&self, a: &[usize], i: usize, other: &Self, b: &[usize], used: &mut [bool]) -> T {
        if i == a.len() {
            return T::zero();
        }
        let mut best = T::infinity();
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                let c = self.match_cost(a[i], other, b[j]) + self.best_pairing(a, i + 1, other, b, used);
                used[j] = false;
                if c < best {
                    best = c;
                }
            }
        }
        best
    }
}

/// All reductions of a tree: (deletion cost, shape, reduced tree).
fn reductions<T: Scalar>(t: &WeightedMergeTree<T>) -> Vec<(T, String, Reduced<T>)> {
    let tree = t.tree();
    let root = tree.root();
    let vertices: Vec<usize> = tree.nodes().filter(|&v| v != root).collect();
    let mut out = Vec::new();
    for mask in 0u32..(1 << vertices.len()) {
        let deleted = |v: usize| {
            vertices
                .iter()
                .position(|&x| x == v)
                .is_some_and(|i| mask & (1 << i) != 0)
        };
        let cost: T = vertices
            .iter()
            .filter(|&&v| deleted(v))
            .map(|&v| t.weight(v))
            .sum();
        // surviving father of every kept vertex
        let kept: Vec<usize> = vertices.iter().copied().filter(|&v| !deleted(v)).collect();
        if kept.is_empty() {
            continue;
        }
        let mut up = HashMap::new();
        let mut count: HashMap<usize, usize> = HashMap::new();
        for &v in &kept {
            let mut p = tree.parent(v).expect("non-root");
            while p != root && deleted(p) {
                p = tree.parent(p).expect("non-root");
            }
            up.insert(v, p);
            *count.entry(p).or_default() += 1;
        }
        if count.get(&root) != Some(&1) {
            continue;
        }
        // ghost order-2 vertices: a kept vertex is reduced unless it has
        // exactly one kept child
        let is_ghost = |v: usize| count.get(&v) == Some(&1);
        let reduced: Vec<usize> = kept.iter().copied().filter(|&v| !is_ghost(v)).collect();
        let index: HashMap<usize, usize> = reduced.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut weight = vec![T::zero(); reduced.len()];
        let mut children = vec![Vec::new(); reduced.len()];
        let mut top = usize::MAX;
        for (i, &v) in reduced.iter().enumerate() {
            let mut w = t.weight(v);
            let mut p = up[&v];
            while p != root && is_ghost(p) {
                w = w + t.weight(p);
                p = up[&p];
            }
            weight[i] = w;
            if p == root {
                top = i;
            } else {
                children[index[&p]].push(i);
            }
        }
        let r = Reduced {
            weight,
            children,
            top,
        };
        let shape = r.shape(top);
        out.push((cost, shape, r));
    }
    out
}

/// Minimal mapping cost by exhaustive enumeration. Trees are limited to
/// [`MAX_LEAVES`] leaves and [`MAX_VERTICES`] vertices, root included.
pub fn d_edit_bruteforce<T: Scalar>(t1: &WeightedMergeTree<T>, t2: &WeightedMergeTree<T>) -> Result<T> {
    for t in [t1, t2] {
        if t.leaf_count() > MAX_LEAVES || t.tree().len() > MAX_VERTICES {
            return Err(Error::Size(format!(
                "exhaustive search supports at most {MAX_LEAVES} leaves and {MAX_VERTICES} vertices, got {} and {}",
                t.leaf_count(),
                t.tree().len()
            )));
        }
    }
    if t1.k() != t2.k() {
        return Err(Error::Parameter("trees truncated at different K".into()));
    }
    let r1 = reductions(t1);
    type Entry<'a, T> = &'a (T, String, Reduced<T>);
    let mut by_shape: HashMap<&str, Vec<Entry<T>>> = HashMap::new();
    let r2 = reductions(t2);
    for r in &r2 {
        by_shape.entry(r.1.as_str()).or_default().push(r);
    }
    let mut best = T::infinity();
    for (c1, shape, a) in &r1 {
        let Some(candidates) = by_shape.get(shape.as_str()) else {
            continue;
        };
        for (c2, _, b) in candidates {
            let base = *c1 + *c2;
            if !(base < best) {
                continue;
            }
            let total = base + a.match_cost(a.top, b, b.top);
            if total < best {
                best = total;
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::merge_tree::MergeTree;

    const INF: f64 = f64::INFINITY;

    fn wt(parents: &[Option<usize>], heights: &[f64], k: f64) -> WeightedMergeTree<f64> {
        MergeTree::from_parents(parents, heights).unwrap().truncate(k).unwrap()
    }

    #[test]
    fn small_cases() {
        let cherry = wt(&[Some(2), Some(2), Some(3), None], &[3.0, 0.0, 4.0, INF], 6.0);
        let edge = wt(&[Some(1), None], &[0.0, INF], 6.0);
        assert_eq!(d_edit_bruteforce(&cherry, &cherry).unwrap(), 0.0);
        assert_eq!(d_edit_bruteforce(&cherry, &edge).unwrap(), 1.0);
        // a vanishing edge: shrinking beats deleting and inserting
        let short = wt(&[Some(1), None], &[5.5, INF], 6.0);
        assert_eq!(d_edit_bruteforce(&edge, &short).unwrap(), 5.5);
    }

    #[test]
    fn size_cap() {
        let five = wt(
            &[Some(5), Some(5), Some(5), Some(5), Some(5), Some(6), None],
            &[0.0, 0.0, 0.0, 0.0, 0.0, 1.0, INF],
            2.0,
        );
        assert!(matches!(d_edit_bruteforce(&five, &five), Err(Error::Size(_))));
    }
}
