//! Edit distance between weighted merge trees.
//!
//! The distance is the minimal cost of a mapping: a set of deleted vertices
//! (paid by edge weight), ghosted order-2 vertices (free) and coupled
//! vertices whose contracted edges are paid by their weight difference.
//! [`d_edit`] solves this exactly with a dynamic program over vertex pairs;
//! [`oracle::d_edit_bruteforce`] enumerates deletion sets for small trees.

use serde::{Deserialize, Serialize};

use crate::assignment;
use crate::error::{Error, Result};
use crate::merge_tree::{NodeId, WeightedMergeTree};
use crate::scalar::Scalar;

pub mod oracle;

/// A single edit on a weighted merge tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Edit<T> {
    /// Sets the weight of the edge above `node`.
    Shrink { node: NodeId, weight: T },
    /// Removes `node`; its children are adopted by its father.
    Delete { node: NodeId },
    /// Adds a vertex below `parent` adopting `children` (a subset of the
    /// children of `parent`, possibly empty for a new leaf).
    Insert {
        parent: NodeId,
        children: Vec<NodeId>,
        weight: T,
    },
    /// Removes an order-2 vertex, joining its two edges.
    Ghost { node: NodeId },
    /// Splits the edge above `node`, leaving `weight` below the new vertex.
    Split { node: NodeId, weight: T },
}

/// Certificate of an optimal mapping. Every live vertex of each tree is in
/// exactly one of its couple, deletion or ghosting sets; the roots are
/// coupled with each other.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Mapping {
    pub couples: Vec<(NodeId, NodeId)>,
    pub deletions1: Vec<NodeId>,
    pub deletions2: Vec<NodeId>,
    pub ghostings1: Vec<NodeId>,
    pub ghostings2: Vec<NodeId>,
}

impl Mapping {
    fn sort(&mut self) {
        self.couples.sort_unstable();
        self.deletions1.sort_unstable();
        self.deletions2.sort_unstable();
        self.ghostings1.sort_unstable();
        self.ghostings2.sort_unstable();
    }
}

fn check_node<T: Scalar>(t: &WeightedMergeTree<T>, v: NodeId) -> Result<()> {
    if !t.tree().contains(v) {
        return Err(Error::Edit(format!("node {v} is not in the tree")));
    }
    if v == t.tree().root() {
        return Err(Error::Edit("the root edge cannot be edited".into()));
    }
    Ok(())
}

fn father_is_root<T: Scalar>(t: &WeightedMergeTree<T>, v: NodeId) -> bool {
    t.tree().parent(v) == Some(t.tree().root())
}

fn check_edit<T: Scalar>(t: &WeightedMergeTree<T>, e: &Edit<T>) -> Result<()> {
    let tree = t.tree();
    match e {
        Edit::Shrink { node, weight } => {
            check_node(t, *node)?;
            let ok = weight.is_finite()
                && (*weight > T::zero() || (*weight == T::zero() && father_is_root(t, *node)));
            if !ok {
                return Err(Error::Edit(format!("cannot shrink node {node} to weight {weight}")));
            }
        }
        Edit::Delete { node } => {
            check_node(t, *node)?;
            if father_is_root(t, *node) && tree.children(*node).len() != 1 {
                return Err(Error::Edit(format!(
                    "deleting node {node} would leave the root with {} children",
                    tree.children(*node).len()
                )));
            }
        }
        Edit::Ghost { node } => {
            check_node(t, *node)?;
            if tree.children(*node).len() != 1 {
                return Err(Error::Edit(format!("node {node} is not an order-2 vertex")));
            }
        }
        Edit::Split { node, weight } => {
            check_node(t, *node)?;
            let old = t.weight(*node);
            let upper_ok = *weight < old || (*weight == old && father_is_root(t, *node));
            if !(*weight > T::zero()) || !upper_ok {
                return Err(Error::Edit(format!(
                    "cannot split the edge of weight {old} above node {node} at {weight}"
                )));
            }
        }
        Edit::Insert {
            parent,
            children,
            weight,
        } => {
            if !tree.contains(*parent) {
                return Err(Error::Edit(format!("node {parent} is not in the tree")));
            }
            if !(*weight > T::zero()) || !weight.is_finite() {
                return Err(Error::Edit(format!("inserted weight must be positive, got {weight}")));
            }
            let mut seen = children.clone();
            seen.sort_unstable();
            seen.dedup();
            if seen.len() != children.len()
                || children.iter().any(|c| tree.parent(*c) != Some(*parent) || !tree.contains(*c))
            {
                return Err(Error::Edit(format!(
                    "adopted vertices must be distinct children of {parent}"
                )));
            }
            if *parent == tree.root() && children.as_slice() != [tree.top()] {
                return Err(Error::Edit("an insertion below the root must adopt its child".into()));
            }
        }
    }
    Ok(())
}

/// Cost of an edit: weight change for shrinking, edge weight for deletion
/// and insertion, zero for ghosting and splitting.
pub fn edit_cost<T: Scalar>(e: &Edit<T>, t: &WeightedMergeTree<T>) -> Result<T> {
    check_edit(t, e)?;
    Ok(match e {
        Edit::Shrink { node, weight } => (t.weight(*node) - *weight).abs(),
        Edit::Delete { node } => t.weight(*node),
        Edit::Insert { weight, .. } => *weight,
        Edit::Ghost { .. } | Edit::Split { .. } => T::zero(),
    })
}

/// Applies an edit. Vertex ids are stable; inserted and split vertices get
/// the next free id.
pub fn apply_edit<T: Scalar>(t: &WeightedMergeTree<T>, e: &Edit<T>) -> Result<WeightedMergeTree<T>> {
    check_edit(t, e)?;
    let mut out = t.clone();
    match e {
        Edit::Shrink { node, weight } => out.set_weight(*node, *weight),
        Edit::Delete { node } => out.tree_mut().delete_node(*node),
        Edit::Ghost { node } => {
            let child = t.tree().children(*node)[0];
            let joined = t.weight(child) + t.weight(*node);
            out.tree_mut().ghost_node(*node);
            out.set_weight(child, joined);
        }
        Edit::Split { node, weight } => {
            let parent = t.tree().parent(*node).expect("checked non-root");
            let old = t.weight(*node);
            let id = out.tree_mut().insert_node(parent, &[*node], T::zero());
            out.set_weight(*node, *weight);
            out.set_weight(id, old - *weight);
        }
        Edit::Insert {
            parent,
            children,
            weight,
        } => {
            let id = out.tree_mut().insert_node(*parent, children, T::zero());
            out.set_weight(id, *weight);
        }
    }
    out.refresh_heights();
    Ok(out)
}

/// Applies a sequence of edits, returning the final tree and the summed cost.
pub fn replay<T: Scalar>(t: &WeightedMergeTree<T>, edits: &[Edit<T>]) -> Result<(WeightedMergeTree<T>, T)> {
    let mut cur = t.clone();
    let mut total = T::zero();
    for e in edits {
        total = total + edit_cost(e, &cur)?;
        cur = apply_edit(&cur, e)?;
    }
    Ok((cur, total))
}

/// Per-tree tables used by the solver, indexed by post-order position.
struct Side<'a, T> {
    t: &'a WeightedMergeTree<T>,
    /// non-root vertices in post-order
    ids: Vec<NodeId>,
    pos: Vec<usize>,
    father: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    weight: Vec<T>,
    height: Vec<T>,
    /// total weight of the subtree, own edge included
    sw: Vec<T>,
    /// `sub(v)` as a contiguous post-order range `first[v]..=v`
    first: Vec<usize>,
    /// deletion cost of the side branches hanging off the path from `c`
    /// down to `a`, stored per `c` and offset `a - first[c]`
    path_cost: Vec<Vec<T>>,
    frontiers: Vec<Vec<Frontier<T>>>,
}

#[derive(Debug, Clone)]
struct Frontier<T> {
    cost: T,
    expanded: Vec<usize>,
    items: Vec<usize>,
}

const NONE: usize = usize::MAX;

impl<'a, T: Scalar> Side<'a, T> {
    fn new(t: &'a WeightedMergeTree<T>) -> Self {
        let tree = t.tree();
        let root = tree.root();
        let ids: Vec<NodeId> = tree
            .postorder()
            .into_iter()
            .filter(|&v| v != root)
            .collect();
        let n = ids.len();
        let mut pos = vec![NONE; tree.capacity()];
        for (i, &v) in ids.iter().enumerate() {
            pos[v] = i;
        }
        let father: Vec<Option<usize>> = ids
            .iter()
            .map(|&v| tree.parent(v).filter(|&p| p != root).map(|p| pos[p]))
            .collect();
        let children: Vec<Vec<usize>> = ids
            .iter()
            .map(|&v| tree.children(v).iter().map(|&c| pos[c]).collect())
            .collect();
        let weight: Vec<T> = ids.iter().map(|&v| t.weight(v)).collect();
        let height: Vec<T> = ids.iter().map(|&v| tree.height(v)).collect();
        let mut sw = vec![T::zero(); n];
        let mut first = vec![0; n];
        for i in 0..n {
            sw[i] = weight[i] + children[i].iter().map(|&c| sw[c]).sum::<T>();
            first[i] = children[i].first().map_or(i, |&c| first[c]);
        }
        let mut path_cost = Vec::with_capacity(n);
        for c in 0..n {
            let mut row = vec![T::zero(); c - first[c] + 1];
            // pre-order walk from c: descending into child x of g adds the
            // weights of x's siblings
            let mut stack = vec![c];
            while let Some(g) = stack.pop() {
                let base = row[g - first[c]];
                let total: T = children[g].iter().map(|&x| sw[x]).sum();
                for &x in &children[g] {
                    row[x - first[c]] = base + (total - sw[x]);
                    stack.push(x);
                }
            }
            path_cost.push(row);
        }
        let mut side = Self {
            t,
            ids,
            pos,
            father,
            children,
            weight,
            height,
            sw,
            first,
            path_cost,
            frontiers: Vec::new(),
        };
        side.frontiers = side.build_frontiers();
        side
    }

    fn len(&self) -> usize {
        self.ids.len()
    }

    /// Every way of deleting an upper-closed set of internal vertices
    /// strictly below each vertex, with the resulting child items.
    fn build_frontiers(&self) -> Vec<Vec<Frontier<T>>> {
        let n = self.len();
        // options for a single child x: keep it as an item, or delete it and
        // combine options of its own children
        let mut options: Vec<Vec<Frontier<T>>> = Vec::with_capacity(n);
        let mut frontiers: Vec<Vec<Frontier<T>>> = Vec::with_capacity(n);
        for v in 0..n {
            let mut combos = vec![Frontier {
                cost: T::zero(),
                expanded: Vec::new(),
                items: Vec::new(),
            }];
            for &c in &self.children[v] {
                let mut next = Vec::with_capacity(combos.len() * options[c].len());
                for a in &combos {
                    for b in &options[c] {
                        let mut expanded = a.expanded.clone();
                        expanded.extend_from_slice(&b.expanded);
                        let mut items = a.items.clone();
                        items.extend_from_slice(&b.items);
                        next.push(Frontier {
                            cost: a.cost + b.cost,
                            expanded,
                            items,
                        });
                    }
                }
                combos = next;
            }
            let mut own = vec![Frontier {
                cost: T::zero(),
                expanded: Vec::new(),
                items: vec![v],
            }];
            if !self.children[v].is_empty() {
                for f in &combos {
                    let mut expanded = vec![v];
                    expanded.extend_from_slice(&f.expanded);
                    own.push(Frontier {
                        cost: self.weight[v] + f.cost,
                        expanded,
                        items: f.items.clone(),
                    });
                }
            }
            options.push(own);
            combos.sort_by(|a, b| crate::scalar::cmp(&a.cost, &b.cost));
            frontiers.push(combos);
        }
        frontiers
    }

    /// `h'` of the father of `v` (K for the root).
    fn father_height(&self, v: usize) -> T {
        match self.father[v] {
            Some(p) => self.height[p],
            None => self.t.k(),
        }
    }

    fn path_cost(&self, c: usize, a: usize) -> T {
        self.path_cost[c][a - self.first[c]]
    }

    /// Vertices strictly between `a` and `c` (c included, a excluded),
    /// walking up from `a`.
    fn path_above(&self, c: usize, a: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut x = a;
        while x != c {
            x = self.father[x].expect("a lies below c");
            out.push(x);
        }
        out
    }

    fn subtree(&self, v: usize) -> impl Iterator<Item = usize> {
        self.first[v]..=v
    }
}

struct Solver<'a, T> {
    s1: Side<'a, T>,
    s2: Side<'a, T>,
    /// cost of coupling two vertices whose upper chains are already paid
    coupled: Vec<T>,
    coupled_arg: Vec<(u32, u32)>,
    /// cost of pairing two items, chains included
    chain: Vec<T>,
    chain_arg: Vec<(u32, u32)>,
}

impl<'a, T: Scalar> Solver<'a, T> {
    fn new(t1: &'a WeightedMergeTree<T>, t2: &'a WeightedMergeTree<T>) -> Self {
        let s1 = Side::new(t1);
        let s2 = Side::new(t2);
        let size = s1.len() * s2.len();
        Self {
            s1,
            s2,
            coupled: vec![T::zero(); size],
            coupled_arg: vec![(0, 0); size],
            chain: vec![T::zero(); size],
            chain_arg: vec![(0, 0); size],
        }
    }

    fn at(&self, a: usize, b: usize) -> usize {
        a * self.s2.len() + b
    }

    fn run(&mut self) {
        for a in 0..self.s1.len() {
            for b in 0..self.s2.len() {
                self.solve_coupled(a, b);
                self.solve_chain(a, b);
            }
        }
    }

    /// Cost of matching two item lists: couples or whole-subtree deletions.
    fn assign(&self, items1: &[usize], items2: &[usize]) -> (T, Vec<usize>) {
        let (n1, n2) = (items1.len(), items2.len());
        let del1: Vec<T> = items1.iter().map(|&i| self.s1.sw[i]).collect();
        let del2: Vec<T> = items2.iter().map(|&j| self.s2.sw[j]).collect();
        if n1 == 0 || n2 == 0 {
            let total = del1.iter().copied().sum::<T>() + del2.iter().copied().sum::<T>();
            return (total, (0..n1).map(|i| n2 + i).collect());
        }
        if n1 == 1 && n2 == 1 {
            let pair = self.chain[self.at(items1[0], items2[0])];
            let apart = del1[0] + del2[0];
            return if pair <= apart {
                (pair, vec![0])
            } else {
                (apart, vec![1])
            };
        }
        let size = n1 + n2;
        let mut cost = vec![vec![T::zero(); size]; size];
        for i in 0..size {
            for j in 0..size {
                cost[i][j] = match (i < n1, j < n2) {
                    (true, true) => self.chain[self.at(items1[i], items2[j])],
                    (true, false) => del1[i],
                    (false, true) => del2[j],
                    (false, false) => T::zero(),
                };
            }
        }
        let (perm, total) = assignment::solve(&cost);
        (total, perm[..n1].to_vec())
    }

    fn solve_coupled(&mut self, a: usize, b: usize) {
        let idx = self.at(a, b);
        let f1 = &self.s1.frontiers[a];
        let f2 = &self.s2.frontiers[b];
        // mass below each vertex, own edge excluded
        let m1 = self.s1.sw[a] - self.s1.weight[a];
        let m2 = self.s2.sw[b] - self.s2.weight[b];
        let mut best = T::infinity();
        let mut arg = (0u32, 0u32);
        for (i, e1) in f1.iter().enumerate() {
            if !(e1.cost < best) && i > 0 {
                break;
            }
            for (j, e2) in f2.iter().enumerate() {
                let spent = e1.cost + e2.cost;
                if !(spent < best) && (i, j) != (0, 0) {
                    break;
                }
                let bound = spent + ((m1 - e1.cost) - (m2 - e2.cost)).abs();
                if !(bound < best) && (i, j) != (0, 0) {
                    continue;
                }
                let (c, _) = self.assign(&e1.items, &e2.items);
                let total = spent + c;
                if total < best || (i, j) == (0, 0) {
                    best = total;
                    arg = (i as u32, j as u32);
                }
            }
        }
        self.coupled[idx] = best;
        self.coupled_arg[idx] = arg;
    }

    fn solve_chain(&mut self, c: usize, d: usize) {
        let top = self.s1.father_height(c) - self.s2.father_height(d);
        let top = if self.s1.father[c].is_none() && self.s2.father[d].is_none() {
            T::zero()
        } else {
            top
        };
        let mut best = T::infinity();
        let mut arg = (c as u32, d as u32);
        for a in self.s1.subtree(c) {
            let pa = self.s1.path_cost(c, a);
            if !(pa < best) {
                continue;
            }
            for b in self.s2.subtree(d) {
                let pb = self.s2.path_cost(d, b);
                let base = pa + pb;
                if !(base < best) {
                    continue;
                }
                let shrink = (top - (self.s1.height[a] - self.s2.height[b])).abs();
                let total = base + shrink + self.coupled[self.at(a, b)];
                if total < best {
                    best = total;
                    arg = (a as u32, b as u32);
                }
            }
        }
        let idx = self.at(c, d);
        self.chain[idx] = best;
        self.chain_arg[idx] = arg;
    }

    fn certificate(&self) -> Mapping {
        let mut m = Mapping::default();
        m.couples
            .push((self.s1.t.tree().root(), self.s2.t.tree().root()));
        let top1 = self.s1.pos[self.s1.t.tree().top()];
        let top2 = self.s2.pos[self.s2.t.tree().top()];
        self.emit_chain(top1, top2, &mut m);
        m.sort();
        m
    }

    fn delete_subtree1(&self, v: usize, m: &mut Mapping) {
        m.deletions1
            .extend(self.s1.subtree(v).map(|x| self.s1.ids[x]));
    }

    fn delete_subtree2(&self, v: usize, m: &mut Mapping) {
        m.deletions2
            .extend(self.s2.subtree(v).map(|x| self.s2.ids[x]));
    }

    fn emit_chain(&self, c: usize, d: usize, m: &mut Mapping) {
        let (a, b) = self.chain_arg[self.at(c, d)];
        let (a, b) = (a as usize, b as usize);
        let mut on_path = vec![a];
        for g in self.s1.path_above(c, a) {
            m.ghostings1.push(self.s1.ids[g]);
            for &x in &self.s1.children[g] {
                if !on_path.contains(&x) {
                    self.delete_subtree1(x, m);
                }
            }
            on_path.push(g);
        }
        let mut on_path = vec![b];
        for g in self.s2.path_above(d, b) {
            m.ghostings2.push(self.s2.ids[g]);
            for &x in &self.s2.children[g] {
                if !on_path.contains(&x) {
                    self.delete_subtree2(x, m);
                }
            }
            on_path.push(g);
        }
        self.emit_coupled(a, b, m);
    }

    fn emit_coupled(&self, a: usize, b: usize, m: &mut Mapping) {
        m.couples.push((self.s1.ids[a], self.s2.ids[b]));
        let (i, j) = self.coupled_arg[self.at(a, b)];
        let e1 = &self.s1.frontiers[a][i as usize];
        let e2 = &self.s2.frontiers[b][j as usize];
        m.deletions1
            .extend(e1.expanded.iter().map(|&x| self.s1.ids[x]));
        m.deletions2
            .extend(e2.expanded.iter().map(|&x| self.s2.ids[x]));
        let (_, rows) = self.assign(&e1.items, &e2.items);
        let mut matched2 = vec![false; e2.items.len()];
        for (r, &col) in rows.iter().enumerate() {
            if col < e2.items.len() {
                matched2[col] = true;
                self.emit_chain(e1.items[r], e2.items[col], m);
            } else {
                self.delete_subtree1(e1.items[r], m);
            }
        }
        for (col, &used) in matched2.iter().enumerate() {
            if !used {
                self.delete_subtree2(e2.items[col], m);
            }
        }
    }
}

fn check_same_k<T: Scalar>(t1: &WeightedMergeTree<T>, t2: &WeightedMergeTree<T>) -> Result<()> {
    if t1.k() != t2.k() {
        return Err(Error::Parameter(format!(
            "trees truncated at different K ({} and {})",
            t1.k(),
            t2.k()
        )));
    }
    Ok(())
}

/// Exact edit distance with an optimal mapping certificate.
pub fn d_edit<T: Scalar>(t1: &WeightedMergeTree<T>, t2: &WeightedMergeTree<T>) -> Result<(T, Mapping)> {
    check_same_k(t1, t2)?;
    let mut solver = Solver::new(t1, t2);
    solver.run();
    let top = solver.at(solver.s1.pos[t1.tree().top()], solver.s2.pos[t2.tree().top()]);
    let d = solver.chain[top];
    Ok((d, solver.certificate()))
}

/// Exact edit distance without building the certificate.
pub fn d_edit_value<T: Scalar>(t1: &WeightedMergeTree<T>, t2: &WeightedMergeTree<T>) -> Result<T> {
    check_same_k(t1, t2)?;
    let mut solver = Solver::new(t1, t2);
    solver.run();
    let top = solver.at(solver.s1.pos[t1.tree().top()], solver.s2.pos[t2.tree().top()]);
    Ok(solver.chain[top])
}

/// A tree reduced by a mapping: surviving coupled vertices with the summed
/// weight of their contracted edges.
struct Reduced<T> {
    father: Vec<Option<NodeId>>,
    weight: Vec<T>,
}

fn reduce<T: Scalar>(
    t: &WeightedMergeTree<T>,
    deleted: &[NodeId],
    ghosted: &[NodeId],
    coupled: &[NodeId],
) -> Result<Reduced<T>> {
    let tree = t.tree();
    let cap = tree.capacity();
    let mut role = vec![0u8; cap];
    for &v in deleted {
        role[v] |= 1;
    }
    for &v in ghosted {
        role[v] |= 2;
    }
    for &v in coupled {
        role[v] |= 4;
    }
    for v in tree.nodes() {
        if ![1, 2, 4].contains(&role[v]) {
            return Err(Error::Edit(format!("vertex {v} is not covered exactly once")));
        }
    }
    if role[tree.root()] != 4 {
        return Err(Error::Edit("the root must be coupled".into()));
    }
    let mut father = vec![None; cap];
    let mut weight = vec![T::zero(); cap];
    let mut kept_children = vec![0usize; cap];
    for v in tree.nodes() {
        if role[v] == 1 || v == tree.root() {
            continue;
        }
        let mut p = tree.parent(v).expect("non-root");
        while role[p] == 1 {
            p = tree.parent(p).expect("root is never deleted");
        }
        kept_children[p] += 1;
    }
    for v in tree.nodes() {
        if role[v] == 2 && kept_children[v] != 1 {
            return Err(Error::Edit(format!("ghosted vertex {v} does not have order 2")));
        }
    }
    for &v in coupled {
        if v == tree.root() {
            continue;
        }
        let mut w = t.weight(v);
        let mut p = tree.parent(v).expect("non-root");
        loop {
            match role[p] {
                1 => {}
                2 => w = w + t.weight(p),
                _ => break,
            }
            p = tree.parent(p).expect("root is coupled");
        }
        father[v] = Some(p);
        weight[v] = w;
    }
    Ok(Reduced { father, weight })
}

/// Cost of a mapping, checked for validity: deleted and ghosted vertices
/// must leave two trees whose coupled vertices correspond father to father.
pub fn mapping_cost<T: Scalar>(t1: &WeightedMergeTree<T>, t2: &WeightedMergeTree<T>, m: &Mapping) -> Result<T> {
    let c1: Vec<NodeId> = m.couples.iter().map(|c| c.0).collect();
    let c2: Vec<NodeId> = m.couples.iter().map(|c| c.1).collect();
    let r1 = reduce(t1, &m.deletions1, &m.ghostings1, &c1)?;
    let r2 = reduce(t2, &m.deletions2, &m.ghostings2, &c2)?;
    let mut partner = vec![None; t1.tree().capacity()];
    for &(a, b) in &m.couples {
        partner[a] = Some(b);
    }
    let mut cost = m.deletions1.iter().map(|&v| t1.weight(v)).sum::<T>()
        + m.deletions2.iter().map(|&v| t2.weight(v)).sum::<T>();
    for &(a, b) in &m.couples {
        if a == t1.tree().root() || b == t2.tree().root() {
            if a != t1.tree().root() || b != t2.tree().root() {
                return Err(Error::Edit("roots must be coupled together".into()));
            }
            continue;
        }
        let fa = r1.father[a].expect("coupled non-root has a father");
        let fb = r2.father[b].expect("coupled non-root has a father");
        if partner[fa] != Some(fb) {
            return Err(Error::Edit(format!("couple ({a}, {b}) does not preserve fathers")));
        }
        cost = cost + (r1.weight[a] - r2.weight[b]).abs();
    }
    Ok(cost)
}

/// Turns a mapping into an explicit edit path from `t1` to a tree equal to
/// `t2` up to order-2 vertices. Ids in the returned edits refer to the tree
/// as it is when each edit is applied.
pub fn mapping_to_edits<T: Scalar>(t1: &WeightedMergeTree<T>, t2: &WeightedMergeTree<T>, m: &Mapping) -> Result<Vec<Edit<T>>> {
    mapping_cost(t1, t2, m)?;
    let mut edits = Vec::new();
    for &v in &m.deletions1 {
        edits.push(Edit::Delete { node: v });
    }
    for &v in &m.ghostings1 {
        edits.push(Edit::Ghost { node: v });
    }
    let c2: Vec<NodeId> = m.couples.iter().map(|c| c.1).collect();
    let r2 = reduce(t2, &m.deletions2, &m.ghostings2, &c2)?;
    for &(a, b) in &m.couples {
        if b != t2.tree().root() {
            edits.push(Edit::Shrink {
                node: a,
                weight: r2.weight[b],
            });
        }
    }
    // Reduce t2 forward, recording what each step removed, then undo the
    // steps in reverse on the edited t1.
    enum Step<T> {
        Deleted { node: NodeId, parent: NodeId, children: Vec<NodeId>, weight: T },
        Ghosted { node: NodeId, child: NodeId, child_weight: T },
    }
    let mut steps = Vec::new();
    let mut cur = t2.clone();
    for &v in &m.deletions2 {
        steps.push(Step::Deleted {
            node: v,
            parent: cur.tree().parent(v).expect("non-root"),
            children: cur.tree().children(v).to_vec(),
            weight: cur.weight(v),
        });
        cur = apply_edit(&cur, &Edit::Delete { node: v })?;
    }
    for &v in &m.ghostings2 {
        let child = cur.tree().children(v)[0];
        steps.push(Step::Ghosted {
            node: v,
            child,
            child_weight: cur.weight(child),
        });
        cur = apply_edit(&cur, &Edit::Ghost { node: v })?;
    }
    let mut to_current = vec![None; t2.tree().capacity()];
    for &(a, b) in &m.couples {
        to_current[b] = Some(a);
    }
    let mut next_id = t1.tree().capacity();
    let lookup = |map: &[Option<NodeId>], v: NodeId| -> Result<NodeId> {
        map[v].ok_or_else(|| Error::Edit(format!("vertex {v} of the target has no image yet")))
    };
    for step in steps.into_iter().rev() {
        match step {
            Step::Ghosted {
                node,
                child,
                child_weight,
            } => {
                edits.push(Edit::Split {
                    node: lookup(&to_current, child)?,
                    weight: child_weight,
                });
                to_current[node] = Some(next_id);
                next_id += 1;
            }
            Step::Deleted {
                node,
                parent,
                children,
                weight,
            } => {
                let children = children
                    .iter()
                    .map(|&c| lookup(&to_current, c))
                    .collect::<Result<Vec<_>>>()?;
                edits.push(Edit::Insert {
                    parent: lookup(&to_current, parent)?,
                    children,
                    weight,
                });
                to_current[node] = Some(next_id);
                next_id += 1;
            }
        }
    }
    Ok(edits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::merge_tree::MergeTree;

    const INF: f64 = f64::INFINITY;

    fn wt(parents: &[Option<usize>], heights: &[f64], k: f64) -> WeightedMergeTree<f64> {
        MergeTree::from_parents(parents, heights).unwrap().truncate(k).unwrap()
    }

    /// Cherry with leaf weights (1, 4) and root edge 2, K = 6.
    fn cherry() -> WeightedMergeTree<f64> {
        wt(&[Some(2), Some(2), Some(3), None], &[3.0, 0.0, 4.0, INF], 6.0)
    }

    fn edge(w: f64, k: f64) -> WeightedMergeTree<f64> {
        wt(&[Some(1), None], &[k - w, INF], k)
    }

    #[test]
    fn edit_costs() {
        let c = cherry();
        let chain = apply_edit(&c, &Edit::Delete { node: 0 }).unwrap();
        assert_eq!(edit_cost(&Edit::Ghost { node: 2 }, &chain).unwrap(), 0.0);
        let e = edge(3.0, 6.0);
        assert_eq!(edit_cost(&Edit::Shrink { node: 0, weight: 5.0 }, &e).unwrap(), 2.0);
        let t = wt(&[Some(2), Some(2), Some(3), None], &[2.5, 0.0, 4.0, INF], 6.0);
        assert_eq!(edit_cost(&Edit::Delete { node: 0 }, &t).unwrap(), 1.5);
    }

    #[test]
    fn delete_then_ghost() {
        let c = cherry();
        let chain = apply_edit(&c, &Edit::Delete { node: 0 }).unwrap();
        assert_eq!(chain.tree().children(2), &[1]);
        assert_eq!((chain.weight(1), chain.weight(2)), (4.0, 2.0));
        let single = apply_edit(&chain, &Edit::Ghost { node: 2 }).unwrap();
        assert_eq!(single.tree().len(), 2);
        assert_eq!(single.weight(1), 6.0);
        assert_eq!(single.tree().height(1), 0.0);
    }

    #[test]
    fn shrink_and_back() {
        let c = cherry();
        let s = apply_edit(&c, &Edit::Shrink { node: 1, weight: 2.5 }).unwrap();
        let back = apply_edit(&s, &Edit::Shrink { node: 1, weight: 4.0 }).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn inapplicable_edits() {
        let c = cherry();
        let root = c.tree().root();
        assert!(matches!(apply_edit(&c, &Edit::Delete { node: root }), Err(Error::Edit(_))));
        assert!(matches!(apply_edit(&c, &Edit::Ghost { node: 2 }), Err(Error::Edit(_))));
        assert!(matches!(apply_edit(&c, &Edit::Delete { node: 2 }), Err(Error::Edit(_))));
        assert!(apply_edit(&c, &Edit::Shrink { node: 0, weight: -1.0 }).is_err());
        assert!(edit_cost(&Edit::Split { node: 0, weight: 1.0 }, &c).is_err());
    }

    #[test]
    fn split_and_insert() {
        let c = cherry();
        let s = apply_edit(&c, &Edit::Split { node: 1, weight: 1.5 }).unwrap();
        assert_eq!(s.weight(4), 2.5);
        assert_eq!(s.tree().height(4), 1.5);
        assert_eq!(d_edit(&s, &c).unwrap().0, 0.0);
        let i = apply_edit(
            &c,
            &Edit::Insert {
                parent: 2,
                children: vec![],
                weight: 0.75,
            },
        )
        .unwrap();
        assert_eq!(i.leaf_count(), 3);
        assert_eq!(edit_cost(&Edit::Delete { node: 4 }, &i).unwrap(), 0.75);
    }

    #[test]
    fn distance_examples() {
        let c = cherry();
        let (d, m) = d_edit(&c, &c).unwrap();
        assert_eq!(d, 0.0);
        assert_eq!(m.couples, vec![(0, 0), (1, 1), (2, 2), (3, 3)]);
        assert_eq!(d_edit(&edge(3.0, 6.0), &edge(5.0, 6.0)).unwrap().0, 2.0);
        let (d, m) = d_edit(&c, &edge(6.0, 6.0)).unwrap();
        assert_eq!(d, 1.0);
        assert_eq!(m.deletions1, vec![0]);
        assert_eq!(m.ghostings1, vec![2]);
        assert!(d_edit(&c, &edge(6.0, 7.0)).is_err());
    }

    #[test]
    fn internal_deletion_is_used() {
        // ((a, b), c) against (a, b, c): deleting the inner vertex is cheap
        let t1 = wt(
            &[Some(3), Some(3), Some(4), Some(4), Some(5), None],
            &[0.0, 0.0, 0.0, 1.0, 1.1, INF],
            2.0,
        );
        let t2 = wt(&[Some(3), Some(3), Some(3), Some(4), None], &[0.0, 0.0, 0.0, 1.1, INF], 2.0);
        let (d, m) = d_edit(&t1, &t2).unwrap();
        assert!((d - 0.3).abs() < 1e-12, "{d}");
        assert_eq!(m.deletions1, vec![3]);
        assert!((mapping_cost(&t1, &t2, &m).unwrap() - d).abs() < 1e-12);
    }

    #[test]
    fn certificate_replays() {
        let t1 = wt(
            &[Some(3), Some(3), Some(4), Some(4), Some(5), None],
            &[0.0, 0.5, 0.2, 1.0, 2.0, INF],
            3.0,
        );
        let t2 = wt(&[Some(2), Some(2), Some(3), None], &[0.3, 1.5, 2.5, INF], 3.0);
        let (d, m) = d_edit(&t1, &t2).unwrap();
        let edits = mapping_to_edits(&t1, &t2, &m).unwrap();
        let (out, cost) = replay(&t1, &edits).unwrap();
        assert!((cost - d).abs() < 1e-9);
        assert!(out.tree().equivalent(t2.tree(), 1e-9));
    }

    #[test]
    fn f32_trees() {
        let t1 = MergeTree::<f32>::from_parents(&[Some(2), Some(2), Some(3), None], &[3.0, 0.0, 4.0, f32::INFINITY])
            .unwrap()
            .truncate(6.0)
            .unwrap();
        let t2 = MergeTree::<f32>::from_parents(&[Some(1), None], &[0.0, f32::INFINITY])
            .unwrap()
            .truncate(6.0)
            .unwrap();
        assert_eq!(d_edit_value(&t1, &t2).unwrap(), 1.0f32);
    }
}
