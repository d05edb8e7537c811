//! 0-dimensional persistence diagrams of sublevel-set filtrations and their
//! p-Wasserstein distances.

use std::io::{Read, Write};

use crate::assignment;
use crate::error::{Error, Result};
use crate::merge_tree::{MergeTree, NodeId};
use crate::pl_function::PlFunction;
use crate::scalar::{cmp, Scalar};
use crate::union_find::UnionFind;

#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceDiagram<T> {
    /// Finite `(birth, death)` pairs with `death > birth`.
    pub points: Vec<(T, T)>,
    /// Birth of the class that never dies.
    pub essential: Option<T>,
    /// When set, the essential class takes part in distances as `(birth, K)`.
    pub k: Option<T>,
}

impl<T: Scalar> PersistenceDiagram<T> {
    pub fn new(points: Vec<(T, T)>, essential: Option<T>) -> Self {
        let mut d = Self {
            points,
            essential,
            k: None,
        };
        d.sort();
        d
    }

    pub fn empty() -> Self {
        Self::new(Vec::new(), None)
    }

    fn sort(&mut self) {
        self.points
            .sort_by(|a, b| cmp(&a.0, &b.0).then(cmp(&a.1, &b.1)));
    }

    /// Materializes the essential class at `K` for distance computations.
    pub fn with_k(mut self, k: T) -> Self {
        self.k = Some(k);
        self
    }

    /// Excludes the essential class from distance computations.
    pub fn without_k(mut self) -> Self {
        self.k = None;
        self
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Finite points plus the materialized essential class, if any.
    pub fn distance_points(&self) -> Vec<(T, T)> {
        let mut pts = self.points.clone();
        if let (Some(b), Some(k)) = (self.essential, self.k) {
            pts.push((b, k));
        }
        pts
    }

    /// Persistences `death - birth` of the finite points, sorted.
    pub fn persistences(&self) -> Vec<T> {
        let mut p: Vec<T> = self.points.iter().map(|&(b, d)| d - b).collect();
        p.sort_by(cmp);
        p
    }

    /// Writes `birth,death` rows; the essential row uses `K` when
    /// materialized and `inf` otherwise.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["birth", "death"])?;
        for &(b, d) in &self.points {
            w.write_record([b.to_string(), d.to_string()])?;
        }
        if let Some(b) = self.essential {
            let death = match self.k {
                Some(k) => k.to_string(),
                None => "inf".to_string(),
            };
            w.write_record([b.to_string(), death])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a `birth,death` table. Rows with death `inf` become the
    /// essential class.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let mut points = Vec::new();
        let mut essential = None;
        for (i, row) in r.records().enumerate() {
            let row = row?;
            let line = i as u64 + 2;
            let parse = |s: &str| -> Result<f64> {
                s.trim().parse::<f64>().map_err(|e| Error::Ingestion {
                    id: "diagram".into(),
                    line,
                    message: format!("{s:?}: {e}"),
                })
            };
            let b = parse(row.get(0).unwrap_or(""))?;
            let d = parse(row.get(1).unwrap_or(""))?;
            if d.is_infinite() {
                if essential.replace(T::of(b)).is_some() {
                    return Err(Error::Ingestion {
                        id: "diagram".into(),
                        line,
                        message: "more than one essential class".into(),
                    });
                }
            } else if d > b {
                points.push((T::of(b), T::of(d)));
            } else {
                return Err(Error::Ingestion {
                    id: "diagram".into(),
                    line,
                    message: format!("death {d} is not above birth {b}"),
                });
            }
        }
        Ok(Self::new(points, essential))
    }
}

/// Diagram of a merge tree by the elder rule: at every vertex the branch
/// holding the lowest leaf survives (ties: smaller leaf id), the others die.
pub fn pd_from_merge_tree<T: Scalar>(tree: &MergeTree<T>) -> PersistenceDiagram<T> {
    // oldest leaf of each subtree, as (height, leaf id)
    let mut oldest: Vec<Option<(T, NodeId)>> = vec![None; tree.capacity()];
    let mut points = Vec::new();
    for v in tree.postorder() {
        if tree.is_leaf(v) {
            oldest[v] = Some((tree.height(v), v));
            continue;
        }
        let branches: Vec<(T, NodeId)> = tree
            .children(v)
            .iter()
            .map(|&c| oldest[c].expect("children precede fathers"))
            .collect();
        let survivor = *branches
            .iter()
            .min_by(|a, b| cmp(&a.0, &b.0).then(a.1.cmp(&b.1)))
            .expect("internal vertex has children");
        if v != tree.root() {
            for &(birth, leaf) in &branches {
                if leaf != survivor.1 {
                    points.push((birth, tree.height(v)));
                }
            }
        }
        oldest[v] = Some(survivor);
    }
    let essential = oldest[tree.root()].map(|(h, _)| h);
    PersistenceDiagram::new(points, essential)
}

/// Diagram of a PL function computed directly on its breakpoints, without
/// building the merge tree.
pub fn pd_from_function<T: Scalar>(f: &PlFunction<T>) -> PersistenceDiagram<T> {
    let ys = f.ys();
    let n = ys.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| cmp(&ys[a], &ys[b]).then(a.cmp(&b)));
    let mut uf = UnionFind::new(n);
    let mut active = vec![false; n];
    // birth of each component, keyed by representative: (height, index)
    let mut birth: Vec<(T, usize)> = (0..n).map(|i| (ys[i], i)).collect();
    let mut points = Vec::new();
    for &i in &order {
        active[i] = true;
        for j in [i.wrapping_sub(1), i + 1] {
            if j >= n || !active[j] {
                continue;
            }
            let (ri, rj) = (uf.find(i), uf.find(j));
            if ri == rj {
                continue;
            }
            let (bi, bj) = (birth[ri], birth[rj]);
            let older_first = cmp(&bi.0, &bj.0).then(bi.1.cmp(&bj.1)).is_le();
            let (elder, younger) = if older_first { (bi, bj) } else { (bj, bi) };
            if ys[i] > younger.0 {
                points.push((younger.0, ys[i]));
            }
            let r = uf.union(ri, rj);
            birth[r] = elder;
        }
    }
    let essential = order.first().map(|&i| ys[i]);
    PersistenceDiagram::new(points, essential)
}

/// Drops every finite point with persistence below `eps`.
pub fn threshold_pd<T: Scalar>(d: &PersistenceDiagram<T>, eps: T) -> PersistenceDiagram<T> {
    PersistenceDiagram {
        points: d
            .points
            .iter()
            .copied()
            .filter(|&(b, de)| !(de - b < eps))
            .collect(),
        essential: d.essential,
        k: d.k,
    }
}

fn check_compatible<T: Scalar>(d1: &PersistenceDiagram<T>, d2: &PersistenceDiagram<T>, p: T) -> Result<()> {
    if !(p >= T::one()) || !p.is_finite() {
        return Err(Error::Parameter(format!("Wasserstein order must be finite and >= 1, got {p}")));
    }
    let materialized = |d: &PersistenceDiagram<T>| d.essential.is_some() && d.k.is_some();
    match (materialized(d1), materialized(d2)) {
        (true, true) if d1.k != d2.k => Err(Error::Parameter(
            "essential classes materialized at different K".into(),
        )),
        (true, false) | (false, true) => Err(Error::Parameter(
            "essential class materialized in only one diagram".into(),
        )),
        _ => Ok(()),
    }
}

fn linf<T: Scalar>(a: (T, T), b: (T, T)) -> T {
    (a.0 - b.0).abs().max((a.1 - b.1).abs())
}

fn to_diagonal<T: Scalar>(a: (T, T)) -> T {
    (a.1 - a.0) / T::of(2.0)
}

/// p-Wasserstein distance between two diagrams (L∞ ground metric), solved
/// exactly as an assignment on the diagonal-augmented bipartite graph.
pub fn wasserstein<T: Scalar>(d1: &PersistenceDiagram<T>, d2: &PersistenceDiagram<T>, p: T) -> Result<T> {
    check_compatible(d1, d2, p)?;
    let a = d1.distance_points();
    let b = d2.distance_points();
    let (n, m) = (a.len(), b.len());
    let size = n + m;
    let mut cost = vec![vec![T::zero(); size]; size];
    for i in 0..size {
        for j in 0..size {
            cost[i][j] = match (i < n, j < m) {
                (true, true) => linf(a[i], b[j]).powf(p),
                (true, false) => to_diagonal(a[i]).powf(p),
                (false, true) => to_diagonal(b[j]).powf(p),
                (false, false) => T::zero(),
            };
        }
    }
    let (_, total) = assignment::solve(&cost);
    Ok(total.max(T::zero()).powf(p.recip()))
}

/// Exhaustive enumeration of partial matchings; a test oracle for diagrams
/// with at most five points each.
pub fn wasserstein_bruteforce<T: Scalar>(
    d1: &PersistenceDiagram<T>,
    d2: &PersistenceDiagram<T>,
    p: T,
) -> Result<T> {
    check_compatible(d1, d2, p)?;
    let a = d1.distance_points();
    let b = d2.distance_points();
    if a.len() > 5 || b.len() > 5 {
        return Err(Error::Size("brute-force Wasserstein supports at most 5 points".into()));
    }
    fn go<T: Scalar>(a: &[(T, T)], b: &[(T, T)], i: usize, used: &mut [bool], p: T) -> T {
        if i == a.len() {
            return b
                .iter()
                .zip(used.iter())
                .filter(|(_, &u)| !u)
                .map(|(&q, _)| to_diagonal(q).powf(p))
                .sum();
        }
        let mut best = to_diagonal(a[i]).powf(p) + go(a, b, i + 1, used, p);
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                best = best.min(linf(a[i], b[j]).powf(p) + go(a, b, i + 1, used, p));
                used[j] = false;
            }
        }
        best
    }
    let total = go(&a, &b, 0, &mut vec![false; b.len()], p);
    Ok(total.powf(p.recip()))
}
