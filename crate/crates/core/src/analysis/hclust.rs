use std::io::Write;

use nalgebra::RealField;

use super::{real, DistanceMatrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Linkage {
    Single,
    Average,
    Complete,
}

impl std::str::FromStr for Linkage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single" => Ok(Linkage::Single),
            "average" => Ok(Linkage::Average),
            "complete" => Ok(Linkage::Complete),
            other => Err(Error::Parameter(format!("unknown linkage {other:?}"))),
        }
    }
}

/// Merge of clusters `a` and `b`. Singletons are `0..n`; the cluster made
/// by merge `k` is `n + k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge<T> {
    pub a: usize,
    pub b: usize,
    pub height: T,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram<T> {
    pub n: usize,
    pub merges: Vec<Merge<T>>,
}

impl<T: RealField + Copy> Dendrogram<T> {
    /// `a,b,height,size` rows.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["a", "b", "height", "size"])?;
        for m in &self.merges {
            w.write_record([m.a.to_string(), m.b.to_string(), m.height.to_string(), m.size.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Agglomerative clustering with Lance-Williams updates. The closest pair
/// of active clusters is merged; ties go to the smallest cluster ids.
pub fn hclust<T: RealField + Copy>(d: &DistanceMatrix<T>, linkage: Linkage) -> Result<Dendrogram<T>> {
    let n = d.len();
    if n < 2 {
        return Err(Error::Parameter("clustering needs at least two points".into()));
    }
    let total = 2 * n - 1;
    let mut dist = vec![vec![T::zero(); total]; total];
    for (i, row) in dist.iter_mut().enumerate().take(n) {
        for (j, v) in row.iter_mut().enumerate().take(n) {
            *v = d.get(i, j);
        }
    }
    let mut size = vec![0usize; total];
    size[..n].fill(1);
    let mut active: Vec<usize> = (0..n).collect();
    let mut merges = Vec::with_capacity(n - 1);
    for step in 0..n - 1 {
        let mut best: Option<(usize, usize)> = None;
        for (x, &i) in active.iter().enumerate() {
            for &j in &active[x + 1..] {
                if best.is_none_or(|(bi, bj)| dist[i][j] < dist[bi][bj]) {
                    best = Some((i, j));
                }
            }
        }
        let (a, b) = best.expect("two active clusters");
        let new = n + step;
        let height = dist[a][b];
        size[new] = size[a] + size[b];
        for &k in &active {
            if k == a || k == b {
                continue;
            }
            let v = match linkage {
                Linkage::Single => dist[a][k].min(dist[b][k]),
                Linkage::Complete => dist[a][k].max(dist[b][k]),
                Linkage::Average => {
                    let (sa, sb): (T, T) = (real(size[a] as f64), real(size[b] as f64));
                    (sa * dist[a][k] + sb * dist[b][k]) / (sa + sb)
                }
            };
            dist[new][k] = v;
            dist[k][new] = v;
        }
        active.retain(|&k| k != a && k != b);
        active.push(new);
        merges.push(Merge {
            a,
            b,
            height,
            size: size[new],
        });
    }
    Ok(Dendrogram { n, merges })
}

/// For each leaf, the height of the first merge involving its singleton.
pub fn merging_heights<T: RealField + Copy>(dend: &Dendrogram<T>) -> Vec<T> {
    let mut out = vec![T::zero(); dend.n];
    for m in &dend.merges {
        for c in [m.a, m.b] {
            if c < dend.n {
                out[c] = m.height;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three() -> DistanceMatrix<f64> {
        let ids = vec!["a".into(), "b".into(), "c".into()];
        DistanceMatrix::from_fn(ids, |i, j| if (i, j) == (0, 1) { 1.0 } else { 5.0 }).unwrap()
    }

    #[test]
    fn two_points() {
        let d = DistanceMatrix::from_fn(vec!["x".into(), "y".into()], |_, _| 2.5).unwrap();
        for l in [Linkage::Single, Linkage::Average, Linkage::Complete] {
            let h = hclust(&d, l).unwrap();
            assert_eq!(h.merges, vec![Merge { a: 0, b: 1, height: 2.5, size: 2 }]);
            assert_eq!(merging_heights(&h), vec![2.5, 2.5]);
        }
    }

    #[test]
    fn hand_agglomeration() {
        for l in [Linkage::Single, Linkage::Average, Linkage::Complete] {
            let h = hclust(&three(), l).unwrap();
            assert_eq!(h.merges[0], Merge { a: 0, b: 1, height: 1.0, size: 2 });
            assert_eq!(h.merges[1], Merge { a: 2, b: 3, height: 5.0, size: 3 });
            assert_eq!(merging_heights(&h), vec![1.0, 1.0, 5.0]);
        }
    }

    #[test]
    fn outlier_joins_last() {
        let xs = [0.0f64, 0.1, 0.25, 0.3, 9.0];
        let ids = (0..5).map(|i| i.to_string()).collect();
        let d = DistanceMatrix::from_fn(ids, |i, j| (xs[i] - xs[j]).abs()).unwrap();
        let h = merging_heights(&hclust(&d, Linkage::Average).unwrap());
        assert!(h[..4].iter().all(|&x| x < h[4]));
    }
}
