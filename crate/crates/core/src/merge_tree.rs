//! Merge trees: construction from sublevel sets, normalization, truncation,
//! lowest common ancestors, cutting and JSON serialization.
//!
//! A [`MergeTree`] is a rooted tree whose root sits at height `+∞` and has a
//! single child. Leaves are births of sublevel-set components (local minima),
//! internal vertices are merges. Node identifiers are slot indices; trees
//! produced by the constructors are dense, while edited trees may contain
//! removed slots until [`MergeTree::compact`] is called.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pl_function::{ExtremumKind, PlFunction};
use crate::scalar::Scalar;
use crate::union_find::UnionFind;

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq)]
struct Node<T> {
    parent: Option<NodeId>,
    children: Vec<NodeId>,
    height: T,
    alive: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MergeTree<T> {
    nodes: Vec<Node<T>>,
    root: NodeId,
}

impl<T: Scalar> MergeTree<T> {
    /// Builds and validates a tree from a parent table. Exactly one entry
    /// must be `None` (the root, at height `+∞`).
    pub fn from_parents(parents: &[Option<NodeId>], heights: &[T]) -> Result<Self> {
        if parents.len() != heights.len() {
            return Err(Error::Validation(
                "parent and height tables differ in length".into(),
            ));
        }
        let roots: Vec<_> = (0..parents.len()).filter(|&v| parents[v].is_none()).collect();
        let root = match roots.as_slice() {
            [r] => *r,
            [] => return Err(Error::Validation("no root node".into())),
            _ => return Err(Error::Validation(format!("{} root nodes", roots.len()))),
        };
        let mut nodes: Vec<Node<T>> = heights
            .iter()
            .zip(parents)
            .map(|(&height, &parent)| Node {
                parent,
                children: Vec::new(),
                height,
                alive: true,
            })
            .collect();
        for (v, p) in parents.iter().enumerate() {
            if let Some(p) = *p {
                if p >= nodes.len() {
                    return Err(Error::Validation(format!("node {v} has unknown parent {p}")));
                }
                nodes[p].children.push(v);
            }
        }
        let tree = Self { nodes, root };
        tree.validate()?;
        Ok(tree)
    }

    /// Checks every structural and height invariant.
    pub fn validate(&self) -> Result<()> {
        let root = self.root;
        if !self.nodes[root].alive || self.nodes[root].parent.is_some() {
            return Err(Error::Validation("root is not a live parentless node".into()));
        }
        if self.nodes[root].height != T::infinity() {
            return Err(Error::Validation("root height must be +inf".into()));
        }
        if self.nodes[root].children.len() != 1 {
            return Err(Error::Validation(format!(
                "root must have exactly one child, found {}",
                self.nodes[root].children.len()
            )));
        }
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![root];
        let mut count = 0;
        while let Some(v) = stack.pop() {
            if seen[v] {
                return Err(Error::Validation(format!("node {v} reached twice")));
            }
            seen[v] = true;
            count += 1;
            for &c in &self.nodes[v].children {
                let child = &self.nodes[c];
                if !child.alive || child.parent != Some(v) {
                    return Err(Error::Validation(format!("inconsistent edge {c} -> {v}")));
                }
                if !child.height.is_finite() {
                    return Err(Error::Validation(format!("node {c} has non-finite height")));
                }
                if !(child.height < self.nodes[v].height) {
                    return Err(Error::Validation(format!(
                        "height of node {c} ({}) is not below its father {v} ({})",
                        child.height, self.nodes[v].height
                    )));
                }
                stack.push(c);
            }
        }
        if count != self.len() {
            return Err(Error::Validation("tree is not connected".into()));
        }
        Ok(())
    }

    /// Merge tree of the sublevel-set filtration of a piecewise-linear function.
    ///
    /// Leaves are the minimum plateaus (left to right, ids `0..L`), internal
    /// vertices are created in increasing height. Merges that happen at the
    /// same height and involve a common component produce one vertex.
    pub fn from_function(f: &PlFunction<T>) -> Self {
        let profile = f.critical_profile();
        let leaf_count = profile.minima.len();
        let mut nodes: Vec<Node<T>> = profile
            .minima
            .iter()
            .map(|m| Node {
                parent: None,
                children: Vec::new(),
                height: m.height,
                alive: true,
            })
            .collect();

        // interior maxima, as (height, left minimum, right minimum)
        let mut merges: Vec<(T, usize, usize)> = Vec::new();
        let mut mins_seen = 0usize;
        let mut pending: Option<T> = None;
        for (kind, plateau) in profile.ordered() {
            match kind {
                ExtremumKind::Minimum => {
                    if let Some(h) = pending.take() {
                        merges.push((h, mins_seen - 1, mins_seen));
                    }
                    mins_seen += 1;
                }
                ExtremumKind::Maximum => {
                    if mins_seen > 0 {
                        pending = Some(plateau.height);
                    }
                }
            }
        }
        merges.sort_by(|a, b| crate::scalar::cmp(&a.0, &b.0).then(a.1.cmp(&b.1)));

        let mut uf = UnionFind::new(leaf_count);
        let mut component_node: Vec<NodeId> = (0..leaf_count).collect();
        let mut i = 0;
        while i < merges.len() {
            let h = merges[i].0;
            let mut j = i;
            while j < merges.len() && merges[j].0 == h {
                j += 1;
            }
            let mut before: Vec<usize> = Vec::new();
            for &(_, l, r) in &merges[i..j] {
                before.push(uf.find(l));
                before.push(uf.find(r));
            }
            before.sort_unstable();
            before.dedup();
            for &(_, l, r) in &merges[i..j] {
                uf.union(l, r);
            }
            let mut groups: Vec<(usize, Vec<NodeId>)> = Vec::new();
            for old in before {
                let new_rep = uf.find(old);
                let child = component_node[old];
                match groups.iter_mut().find(|(rep, _)| *rep == new_rep) {
                    Some((_, members)) => members.push(child),
                    None => groups.push((new_rep, vec![child])),
                }
            }
            for (rep, mut children) in groups {
                children.sort_unstable();
                let id = nodes.len();
                for &c in &children {
                    nodes[c].parent = Some(id);
                }
                nodes.push(Node {
                    parent: None,
                    children,
                    height: h,
                    alive: true,
                });
                component_node[rep] = id;
            }
            i = j;
        }

        let top = component_node[uf.find(0)];
        let root = nodes.len();
        nodes[top].parent = Some(root);
        nodes.push(Node {
            parent: None,
            children: vec![top],
            height: T::infinity(),
            alive: true,
        });
        Self { nodes, root }
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    /// The unique child of the root (the last merge, or the only leaf).
    pub fn top(&self) -> NodeId {
        self.nodes[self.root].children[0]
    }

    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.nodes[v].parent
    }

    pub fn children(&self, v: NodeId) -> &[NodeId] {
        &self.nodes[v].children
    }

    pub fn height(&self, v: NodeId) -> T {
        self.nodes[v].height
    }

    pub fn contains(&self, v: NodeId) -> bool {
        v < self.nodes.len() && self.nodes[v].alive
    }

    pub fn is_leaf(&self, v: NodeId) -> bool {
        self.nodes[v].children.is_empty()
    }

    /// Live node ids in increasing order.
    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).filter(move |&v| self.nodes[v].alive)
    }

    /// Number of live nodes, root included.
    pub fn len(&self) -> usize {
        self.nodes.iter().filter(|n| n.alive).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Upper bound (exclusive) on node ids.
    pub fn capacity(&self) -> usize {
        self.nodes.len()
    }

    pub fn leaves(&self) -> Vec<NodeId> {
        self.nodes().filter(|&v| self.is_leaf(v)).collect()
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes().filter(|&v| self.is_leaf(v)).count()
    }

    /// Non-root, non-leaf vertices.
    pub fn internal_vertices(&self) -> Vec<NodeId> {
        self.nodes()
            .filter(|&v| v != self.root && !self.is_leaf(v))
            .collect()
    }

    pub fn max_finite_height(&self) -> T {
        self.nodes()
            .filter(|&v| v != self.root)
            .map(|v| self.height(v))
            .fold(T::neg_infinity(), T::max)
    }

    pub fn min_height(&self) -> T {
        self.nodes()
            .map(|v| self.height(v))
            .fold(T::infinity(), T::min)
    }

    pub fn depth(&self, mut v: NodeId) -> usize {
        let mut d = 0;
        while let Some(p) = self.parent(v) {
            v = p;
            d += 1;
        }
        d
    }

    /// Nodes of `sub(v)` in post-order (children before fathers).
    pub fn postorder_from(&self, v: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![(v, false)];
        while let Some((u, expanded)) = stack.pop() {
            if expanded {
                out.push(u);
            } else {
                stack.push((u, true));
                for &c in self.children(u).iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        out
    }

    pub fn postorder(&self) -> Vec<NodeId> {
        self.postorder_from(self.root)
    }

    /// Whether `a ≤ b` in the tree order (b is a, or an ancestor of a).
    pub fn is_ancestor_or_self(&self, b: NodeId, mut a: NodeId) -> bool {
        loop {
            if a == b {
                return true;
            }
            match self.parent(a) {
                Some(p) => a = p,
                None => return false,
            }
        }
    }

    /// Lowest common ancestor of a non-empty set of vertices.
    pub fn lca(&self, vs: &[NodeId]) -> Result<NodeId> {
        let (&first, rest) = vs
            .split_first()
            .ok_or_else(|| Error::Parameter("lca of an empty vertex set".into()))?;
        let mut acc = first;
        for &v in rest {
            let (mut a, mut b) = (acc, v);
            let (mut da, mut db) = (self.depth(a), self.depth(b));
            while da > db {
                a = self.parent(a).expect("depth is consistent");
                da -= 1;
            }
            while db > da {
                b = self.parent(b).expect("depth is consistent");
                db -= 1;
            }
            while a != b {
                a = self.parent(a).expect("common root");
                b = self.parent(b).expect("common root");
            }
            acc = a;
        }
        Ok(acc)
    }

    /// Removes every order-2 vertex other than the root, concatenating the
    /// two adjacent edges. Surviving heights are unchanged.
    pub fn normalize(&self) -> Self {
        let mut t = self.clone();
        let order_two: Vec<NodeId> = t
            .nodes()
            .filter(|&v| v != t.root && t.children(v).len() == 1)
            .collect();
        for v in order_two {
            t.ghost_node(v);
        }
        t.compact().0
    }

    /// Whether the tree has no order-2 vertex besides the root.
    pub fn is_normalized(&self) -> bool {
        self.nodes()
            .all(|v| v == self.root || self.children(v).len() != 1)
    }

    /// Weighted tree obtained by replacing the root height with `k`.
    pub fn truncate(&self, k: T) -> Result<WeightedMergeTree<T>> {
        WeightedMergeTree::new(self.clone(), k)
    }

    /// `sub(v)` for every `v` with `height(v) ≤ h < height(father(v))`,
    /// each re-rooted under a fresh `+∞` root.
    pub fn cut_at_height(&self, h: T) -> Vec<Self> {
        self.cut_vertices(h)
            .into_iter()
            .map(|v| self.subtree(v))
            .collect()
    }

    /// Vertices whose subtrees form the cut at height `h`.
    pub fn cut_vertices(&self, h: T) -> Vec<NodeId> {
        self.nodes()
            .filter(|&v| v != self.root)
            .filter(|&v| {
                let p = self.parent(v).expect("non-root vertex has a father");
                self.height(v) <= h && h < self.height(p)
            })
            .collect()
    }

    /// The subtree rooted at `v`, hung below a fresh `+∞` root.
    pub fn subtree(&self, v: NodeId) -> Self {
        let order = self.postorder_from(v);
        let index: HashMap<NodeId, NodeId> =
            order.iter().enumerate().map(|(i, &u)| (u, i)).collect();
        let root = order.len();
        let mut nodes: Vec<Node<T>> = order
            .iter()
            .map(|&u| Node {
                parent: if u == v {
                    Some(root)
                } else {
                    self.parent(u).map(|p| index[&p])
                },
                children: self.children(u).iter().map(|c| index[c]).collect(),
                height: self.height(u),
                alive: true,
            })
            .collect();
        nodes.push(Node {
            parent: None,
            children: vec![index[&v]],
            height: T::infinity(),
            alive: true,
        });
        Self { nodes, root }
    }

    /// Dense copy; the returned table maps old ids to new ids.
    pub fn compact(&self) -> (Self, Vec<Option<NodeId>>) {
        let mut map = vec![None; self.nodes.len()];
        for (new, old) in self.nodes().enumerate() {
            map[old] = Some(new);
        }
        let nodes = self
            .nodes()
            .map(|v| Node {
                parent: self.parent(v).map(|p| map[p].expect("live father")),
                children: self
                    .children(v)
                    .iter()
                    .map(|c| map[*c].expect("live child"))
                    .collect(),
                height: self.height(v),
                alive: true,
            })
            .collect();
        let root = map[self.root].expect("live root");
        (Self { nodes, root }, map)
    }

    /// A string identifying the isomorphism class (structure and exact heights).
    pub fn canonical_form(&self) -> String {
        self.canonical_at(self.root)
    }

    fn canonical_at(&self, v: NodeId) -> String {
        let mut children: Vec<String> =
            self.children(v).iter().map(|&c| self.canonical_at(c)).collect();
        children.sort();
        let h = self.height(v).as_f64();
        let bits = if h == 0.0 { 0u64 } else { h.to_bits() };
        format!("({:016x}{})", bits, children.concat())
    }

    /// Exact isomorphism of structure and heights, ignoring node labels.
    pub fn is_isomorphic(&self, other: &Self) -> bool {
        self.canonical_form() == other.canonical_form()
    }

    /// Isomorphism after removing order-2 vertices, with heights compared up
    /// to `tol`.
    pub fn equivalent(&self, other: &Self, tol: T) -> bool {
        let a = self.normalize();
        let b = other.normalize();
        a.len() == b.len() && match_within(&a, a.root, &b, b.root, tol)
    }

    pub(crate) fn ghost_node(&mut self, v: NodeId) {
        debug_assert_eq!(self.nodes[v].children.len(), 1);
        let child = self.nodes[v].children[0];
        let parent = self.nodes[v].parent.expect("ghosted vertex is not the root");
        self.nodes[child].parent = Some(parent);
        let slot = self.nodes[parent]
            .children
            .iter()
            .position(|&c| c == v)
            .expect("vertex is listed among its father's children");
        self.nodes[parent].children[slot] = child;
        self.nodes[v].alive = false;
        self.nodes[v].children.clear();
        self.nodes[v].parent = None;
    }

    /// Deletes the edge above `v`: its children are adopted by its father.
    pub(crate) fn delete_node(&mut self, v: NodeId) {
        let parent = self.nodes[v].parent.expect("deleted vertex is not the root");
        let children = std::mem::take(&mut self.nodes[v].children);
        for &c in &children {
            self.nodes[c].parent = Some(parent);
        }
        let slot = self.nodes[parent]
            .children
            .iter()
            .position(|&c| c == v)
            .expect("vertex is listed among its father's children");
        self.nodes[parent].children.splice(slot..=slot, children);
        self.nodes[v].alive = false;
        self.nodes[v].parent = None;
    }

    /// Adds a vertex below `parent` adopting `adopt` (a subset of the
    /// children of `parent`). Returns the new id.
    pub(crate) fn insert_node(&mut self, parent: NodeId, adopt: &[NodeId], height: T) -> NodeId {
        let id = self.nodes.len();
        self.nodes[parent].children.retain(|c| !adopt.contains(c));
        self.nodes[parent].children.push(id);
        for &c in adopt {
            self.nodes[c].parent = Some(id);
        }
        self.nodes.push(Node {
            parent: Some(parent),
            children: adopt.to_vec(),
            height,
            alive: true,
        });
        id
    }

    pub(crate) fn set_height(&mut self, v: NodeId, h: T) {
        self.nodes[v].height = h;
    }

    pub fn to_json(&self, k: Option<T>) -> String {
        serde_json::to_string_pretty(&self.to_document(None, k)).expect("tree serializes")
    }

    pub fn to_document(&self, id: Option<String>, k: Option<T>) -> TreeDocument {
        TreeDocument {
            id,
            k: k.map(Scalar::as_f64),
            nodes: self
                .nodes()
                .map(|v| NodeDocument {
                    id: v as i64,
                    parent: self.parent(v).map(|p| p as i64),
                    height: if v == self.root {
                        HeightValue::Sentinel("inf".into())
                    } else {
                        HeightValue::Finite(self.height(v).as_f64())
                    },
                })
                .collect(),
        }
    }

    /// Parses a tree document; returns the tree and its optional `K`.
    pub fn from_json(text: &str) -> Result<(Self, Option<T>)> {
        let doc: TreeDocument = serde_json::from_str(text)?;
        Self::from_document(&doc)
    }

    pub fn from_document(doc: &TreeDocument) -> Result<(Self, Option<T>)> {
        let mut index: HashMap<i64, NodeId> = HashMap::new();
        for (i, n) in doc.nodes.iter().enumerate() {
            if index.insert(n.id, i).is_some() {
                return Err(Error::Parse(format!("duplicate node id {}", n.id)));
            }
        }
        let mut parents = Vec::with_capacity(doc.nodes.len());
        let mut heights = Vec::with_capacity(doc.nodes.len());
        for n in &doc.nodes {
            let parent = match n.parent {
                Some(p) => Some(
                    *index
                        .get(&p)
                        .ok_or_else(|| Error::Parse(format!("unknown parent id {p}")))?,
                ),
                None => None,
            };
            let height = match &n.height {
                HeightValue::Finite(h) => T::of(*h),
                HeightValue::Sentinel(s) if s == "inf" => T::infinity(),
                HeightValue::Sentinel(s) => {
                    return Err(Error::Parse(format!("unrecognised height {s:?}")))
                }
            };
            if parent.is_none() && height != T::infinity() {
                return Err(Error::Validation(
                    "the node without parent must have height \"inf\"".into(),
                ));
            }
            if parent.is_some() && !height.is_finite() {
                return Err(Error::Validation(format!(
                    "node {} has a parent but an infinite height",
                    n.id
                )));
            }
            parents.push(parent);
            heights.push(height);
        }
        let tree = Self::from_parents(&parents, &heights)?;
        let k = doc.k.map(T::of);
        if let Some(k) = k {
            if k < tree.max_finite_height() {
                return Err(Error::InvalidK {
                    k: k.as_f64(),
                    height: tree.max_finite_height().as_f64(),
                });
            }
        }
        Ok((tree, k))
    }
}

fn match_within<T: Scalar>(a: &MergeTree<T>, u: NodeId, b: &MergeTree<T>, v: NodeId, tol: T) -> bool {
    let (ha, hb) = (a.height(u), b.height(v));
    let heights_match = if ha.is_infinite() || hb.is_infinite() {
        ha == hb
    } else {
        (ha - hb).abs() <= tol
    };
    if !heights_match || a.children(u).len() != b.children(v).len() {
        return false;
    }
    let bc = b.children(v).to_vec();
    let mut used = vec![false; bc.len()];
    fn assign<T: Scalar>(
        a: &MergeTree<T>,
        ac: &[NodeId],
        b: &MergeTree<T>,
        bc: &[NodeId],
        used: &mut [bool],
        tol: T,
    ) -> bool {
        let Some((&first, rest)) = ac.split_first() else {
            return true;
        };
        for j in 0..bc.len() {
            if !used[j] && match_within(a, first, b, bc[j], tol) {
                used[j] = true;
                if assign(a, rest, b, bc, used, tol) {
                    return true;
                }
                used[j] = false;
            }
        }
        false
    }
    assign(a, a.children(u), b, &bc, &mut used, tol)
}

/// Serialized form of a merge tree.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TreeDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(rename = "K")]
    pub k: Option<f64>,
    pub nodes: Vec<NodeDocument>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct NodeDocument {
    pub id: i64,
    pub parent: Option<i64>,
    pub height: HeightValue,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum HeightValue {
    Finite(f64),
    Sentinel(String),
}

/// A merge tree truncated at `K`, carrying nonnegative edge weights.
///
/// `weight(v) = h'(father(v)) - h'(v)` where `h'` equals the height except at
/// the root, where it is `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedMergeTree<T> {
    tree: MergeTree<T>,
    k: T,
    weights: Vec<T>,
}

impl<T: Scalar> WeightedMergeTree<T> {
    pub fn new(tree: MergeTree<T>, k: T) -> Result<Self> {
        let max = tree.max_finite_height();
        if !(k >= max) || !k.is_finite() {
            return Err(Error::InvalidK {
                k: k.as_f64(),
                height: max.as_f64(),
            });
        }
        let mut weights = vec![T::zero(); tree.capacity()];
        for v in tree.nodes() {
            if let Some(p) = tree.parent(v) {
                let hp = if p == tree.root() { k } else { tree.height(p) };
                weights[v] = hp - tree.height(v);
            }
        }
        Ok(Self { tree, k, weights })
    }

    pub fn tree(&self) -> &MergeTree<T> {
        &self.tree
    }

    pub fn into_tree(self) -> MergeTree<T> {
        self.tree
    }

    pub fn k(&self) -> T {
        self.k
    }

    /// Weight of the edge between `v` and its father (zero for the root).
    pub fn weight(&self, v: NodeId) -> T {
        self.weights[v]
    }

    /// `h'`: the height, with the root replaced by `K`.
    pub fn truncated_height(&self, v: NodeId) -> T {
        if v == self.tree.root() {
            self.k
        } else {
            self.tree.height(v)
        }
    }

    pub fn total_weight(&self) -> T {
        self.tree.nodes().map(|v| self.weights[v]).sum()
    }

    pub fn leaf_count(&self) -> usize {
        self.tree.leaf_count()
    }

    /// Same tree truncated at a different constant.
    pub fn retruncate(&self, k: T) -> Result<Self> {
        Self::new(self.tree.clone(), k)
    }

    pub fn normalize(&self) -> Self {
        Self::new(self.tree.normalize(), self.k).expect("normalization keeps heights")
    }

    pub fn compact(&self) -> Self {
        Self::new(self.tree.compact().0, self.k).expect("compaction keeps heights")
    }

    pub fn to_json(&self) -> String {
        self.tree.to_json(Some(self.k))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let (tree, k) = MergeTree::from_json(text)?;
        let k = k.ok_or_else(|| Error::Parse("weighted tree document needs a numeric K".into()))?;
        Self::new(tree, k)
    }

    pub(crate) fn tree_mut(&mut self) -> &mut MergeTree<T> {
        &mut self.tree
    }

    pub(crate) fn set_weight(&mut self, v: NodeId, w: T) {
        if v >= self.weights.len() {
            self.weights.resize(v + 1, T::zero());
        }
        self.weights[v] = w;
    }

    /// Recomputes heights from weights, top-down from `K`.
    pub(crate) fn refresh_heights(&mut self) {
        let root = self.tree.root();
        let mut stack: Vec<NodeId> = self.tree.children(root).to_vec();
        while let Some(v) = stack.pop() {
            let p = self.tree.parent(v).expect("non-root");
            let hp = if p == root { self.k } else { self.tree.height(p) };
            let h = hp - self.weights[v];
            self.tree.set_height(v, h);
            stack.extend_from_slice(self.tree.children(v));
        }
        if self.weights.len() < self.tree.capacity() {
            self.weights.resize(self.tree.capacity(), T::zero());
        }
    }
}
