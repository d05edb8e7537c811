//! Height-indexed summaries of merge trees and pointwise group bands.

use std::fmt;
use std::io::Write;

use crate::error::{Error, Result};
use crate::merge_tree::MergeTree;
use crate::scalar::{cmp, Scalar};

pub const DEFAULT_GRID_POINTS: usize = 512;

/// Number of leaves born at or below `h`.
pub fn nleaves_stat<T: Scalar>(t: &MergeTree<T>, h: T) -> usize {
    t.leaves().into_iter().filter(|&l| t.height(l) <= h).count()
}

/// Number of completed merges at or below `h`. A vertex joining `k`
/// components counts as `k - 1` merges, so that `nleaves - nint` is the
/// number of components alive at `h`.
pub fn nint_stat<T: Scalar>(t: &MergeTree<T>, h: T) -> usize {
    t.nodes()
        .filter(|&v| v != t.root() && !t.is_leaf(v) && t.height(v) <= h)
        .map(|v| t.children(v).len() - 1)
        .sum()
}

fn leaf_counts<T: Scalar>(t: &MergeTree<T>) -> Vec<usize> {
    let mut counts = vec![0usize; t.capacity()];
    for v in t.postorder() {
        counts[v] = if t.is_leaf(v) {
            1
        } else {
            t.children(v).iter().map(|&c| counts[c]).sum()
        };
    }
    counts
}

fn var_with_counts<T: Scalar>(t: &MergeTree<T>, counts: &[usize], h: T) -> Option<T> {
    let cut = t.cut_vertices(h);
    if cut.is_empty() {
        return None;
    }
    let total = T::of(counts[t.root()] as f64);
    let fractions: Vec<T> = cut.iter().map(|&v| T::of(counts[v] as f64) / total).collect();
    let n = T::of(fractions.len() as f64);
    let mean = fractions.iter().copied().sum::<T>() / n;
    Some(fractions.iter().map(|&x| (x - mean) * (x - mean)).sum::<T>() / n)
}

/// Population variance of the leaf fractions of the subtrees in the cut at
/// `h`; `None` when the cut is empty.
pub fn var_stat<T: Scalar>(t: &MergeTree<T>, h: T) -> Option<T> {
    var_with_counts(t, &leaf_counts(t), h)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Statistic {
    Var,
    NLeaves,
    NInt,
}

impl Statistic {
    pub const ALL: [Statistic; 3] = [Statistic::Var, Statistic::NLeaves, Statistic::NInt];

    pub fn name(self) -> &'static str {
        match self {
            Statistic::Var => "var",
            Statistic::NLeaves => "nleaves",
            Statistic::NInt => "nint",
        }
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "var" => Ok(Statistic::Var),
            "nleaves" => Ok(Statistic::NLeaves),
            "nint" => Ok(Statistic::NInt),
            other => Err(Error::Parameter(format!("unknown statistic {other:?}"))),
        }
    }
}

/// A statistic evaluated on a height grid; missing values are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct StatCurve<T> {
    pub tree_id: String,
    pub statistic: Statistic,
    pub grid: Vec<T>,
    pub values: Vec<Option<T>>,
}

pub fn stat_curve<T: Scalar>(t: &MergeTree<T>, tree_id: &str, statistic: Statistic, grid: &[T]) -> StatCurve<T> {
    let counts = leaf_counts(t);
    let values = grid
        .iter()
        .map(|&h| match statistic {
            Statistic::Var => var_with_counts(t, &counts, h),
            Statistic::NLeaves => Some(T::of(nleaves_stat(t, h) as f64)),
            Statistic::NInt => Some(T::of(nint_stat(t, h) as f64)),
        })
        .collect();
    StatCurve {
        tree_id: tree_id.to_string(),
        statistic,
        grid: grid.to_vec(),
        values,
    }
}

/// Equispaced grid of `count` heights covering `[lo, hi]`.
pub fn height_grid<T: Scalar>(lo: T, hi: T, count: usize) -> Vec<T> {
    crate::pruning::linear_grid(lo, hi, count)
}

/// Pointwise summaries of the curves of one group and statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct Band<T> {
    pub group: usize,
    pub statistic: Statistic,
    pub grid: Vec<T>,
    pub median: Vec<Option<T>>,
    pub mean: Vec<Option<T>>,
    pub q1: Vec<Option<T>>,
    pub q3: Vec<Option<T>>,
}

/// Linear-interpolation quantile of sorted data (the default of R and NumPy).
pub fn quantile<T: Scalar>(sorted: &[T], q: T) -> Option<T> {
    if sorted.is_empty() {
        return None;
    }
    let pos = q * T::of((sorted.len() - 1) as f64);
    let lo = pos.floor();
    let i = lo.to_usize().unwrap_or(0).min(sorted.len() - 1);
    let j = (i + 1).min(sorted.len() - 1);
    let frac = pos - lo;
    Some(sorted[i] + frac * (sorted[j] - sorted[i]))
}

/// Per-group, per-statistic median, mean and quartile curves. Missing
/// values are skipped pointwise.
pub fn group_bands<T: Scalar>(curves: &[StatCurve<T>], labels: &[usize]) -> Result<Vec<Band<T>>> {
    if curves.len() != labels.len() {
        return Err(Error::Parameter(format!(
            "{} curves but {} labels",
            curves.len(),
            labels.len()
        )));
    }
    let Some(first) = curves.first() else {
        return Ok(Vec::new());
    };
    if curves.iter().any(|c| c.grid != first.grid) {
        return Err(Error::Parameter("curves are evaluated on different grids".into()));
    }
    let mut keys: Vec<(usize, Statistic)> = curves
        .iter()
        .zip(labels)
        .map(|(c, &l)| (l, c.statistic))
        .collect();
    keys.sort();
    keys.dedup();
    let grid = first.grid.clone();
    let mut bands = Vec::with_capacity(keys.len());
    for (group, statistic) in keys {
        let members: Vec<&StatCurve<T>> = curves
            .iter()
            .zip(labels)
            .filter(|(c, &l)| l == group && c.statistic == statistic)
            .map(|(c, _)| c)
            .collect();
        let mut band = Band {
            group,
            statistic,
            grid: grid.clone(),
            median: Vec::with_capacity(grid.len()),
            mean: Vec::with_capacity(grid.len()),
            q1: Vec::with_capacity(grid.len()),
            q3: Vec::with_capacity(grid.len()),
        };
        for i in 0..grid.len() {
            let mut vals: Vec<T> = members.iter().filter_map(|c| c.values[i]).collect();
            vals.sort_by(cmp);
            band.median.push(quantile(&vals, T::of(0.5)));
            band.q1.push(quantile(&vals, T::of(0.25)));
            band.q3.push(quantile(&vals, T::of(0.75)));
            band.mean.push(if vals.is_empty() {
                None
            } else {
                Some(vals.iter().copied().sum::<T>() / T::of(vals.len() as f64))
            });
        }
        bands.push(band);
    }
    Ok(bands)
}

fn cell<T: Scalar>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// `tree_id,statistic,h,value` rows; missing values are empty cells.
pub fn write_curves_csv<T: Scalar, W: Write>(curves: &[StatCurve<T>], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["tree_id", "statistic", "h", "value"])?;
    for c in curves {
        for (h, v) in c.grid.iter().zip(&c.values) {
            w.write_record([c.tree_id.clone(), c.statistic.to_string(), h.to_string(), cell(*v)])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `group,statistic,h,median,mean,q1,q3` rows.
pub fn write_bands_csv<T: Scalar, W: Write>(bands: &[Band<T>], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["group", "statistic", "h", "median", "mean", "q1", "q3"])?;
    for b in bands {
        for i in 0..b.grid.len() {
            w.write_record([
                b.group.to_string(),
                b.statistic.to_string(),
                b.grid[i].to_string(),
                cell(b.median[i]),
                cell(b.mean[i]),
                cell(b.q1[i]),
                cell(b.q3[i]),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cherry() -> MergeTree<f64> {
        MergeTree::from_parents(&[Some(2), Some(2), Some(3), None], &[0.0, 1.0, 2.0, f64::INFINITY]).unwrap()
    }

    #[test]
    fn counts() {
        let t = cherry();
        assert_eq!(nleaves_stat(&t, -1.0), 0);
        assert_eq!(nleaves_stat(&t, 0.5), 1);
        assert_eq!(nint_stat(&t, 1.5), 0);
        assert_eq!(nint_stat(&t, 2.0), 1);
    }

    #[test]
    fn variance() {
        let t = cherry();
        assert_eq!(var_stat(&t, -1.0), None);
        assert_eq!(var_stat(&t, 0.5), Some(0.0));
        assert_eq!(var_stat(&t, 1.5), Some(0.0));
        assert_eq!(var_stat(&t, 3.0), Some(0.0));
        let three = MergeTree::from_parents(
            &[Some(3), Some(3), Some(4), Some(4), Some(5), None],
            &[0.0, 0.0, 0.0, 1.0, 2.0, f64::INFINITY],
        )
        .unwrap();
        // fractions 2/3 and 1/3
        assert!((var_stat(&three, 1.5).unwrap() - 1.0 / 36.0).abs() < 1e-15);
    }

    #[test]
    fn quantiles() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.5), Some(2.5));
        assert_eq!(quantile(&v, 0.25), Some(1.75));
        assert_eq!(quantile(&v, 1.0), Some(4.0));
        assert_eq!(quantile::<f64>(&[], 0.5), None);
    }

    #[test]
    fn bands() {
        let t = cherry();
        let grid = height_grid(-1.0, 3.0, 9);
        let c = stat_curve(&t, "a", Statistic::NLeaves, &grid);
        let b = group_bands(std::slice::from_ref(&c), &[0]).unwrap();
        assert_eq!(b[0].median, c.values);
        assert_eq!(b[0].q1, c.values);
        assert_eq!(b[0].q3, c.values);
        let b = group_bands(&[c.clone(), c.clone()], &[1, 1]).unwrap();
        assert_eq!(b[0].q1, b[0].q3);
        let other = stat_curve(&t, "b", Statistic::NLeaves, &grid[1..]);
        assert!(group_bands(&[c, other], &[0, 0]).is_err());
    }

    #[test]
    fn csv_layout() {
        let t = cherry();
        let c = stat_curve(&t, "a", Statistic::Var, &[-1.0, 0.5]);
        let mut buf = Vec::new();
        write_curves_csv(&[c], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "tree_id,statistic,h,value\na,var,-1,\na,var,0.5,0\n");
    }
}
