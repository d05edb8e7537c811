use std::io::Write;

use nalgebra::{DMatrix, RealField, SymmetricEigen};

use super::{real, DistanceMatrix};
use crate::error::{Error, Result};

/// Classical MDS coordinates (one row per id).
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding<T: RealField> {
    pub ids: Vec<String>,
    pub coords: DMatrix<T>,
    /// Eigenvalues of the double-centered matrix, in decreasing order.
    pub eigenvalues: Vec<T>,
    /// Eigenvalues below zero (beyond rounding) in the whole spectrum.
    pub negative_eigenvalues: usize,
    /// Selected dimensions whose eigenvalue was clipped to zero.
    pub clipped: usize,
}

/// Torgerson scaling: eigen-decomposition of `-1/2 J D² J`, keeping the
/// `m` largest eigenvalues. Negative eigenvalues give zero columns.
pub fn classical_mds<T: RealField + Copy>(d: &DistanceMatrix<T>, m: usize) -> Result<Embedding<T>> {
    let n = d.len();
    if n == 0 {
        return Err(Error::Parameter("cannot embed an empty matrix".into()));
    }
    if m == 0 || m > (n - 1).max(1) {
        return Err(Error::Parameter(format!(
            "embedding dimension {m} outside 1..={} for {n} points",
            (n - 1).max(1)
        )));
    }
    let sq = d.values().map(|x| x * x);
    let row_means: Vec<T> = (0..n).map(|i| sq.row(i).sum() / real(n as f64)).collect();
    let grand = row_means.iter().copied().fold(T::zero(), |a, b| a + b) / real(n as f64);
    let half: T = real(0.5);
    let b = DMatrix::from_fn(n, n, |i, j| -half * (sq[(i, j)] - row_means[i] - row_means[j] + grand));
    let eig = SymmetricEigen::new(b);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let eigenvalues: Vec<T> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let scale = eigenvalues
        .iter()
        .map(|x| x.abs())
        .fold(T::zero(), |a, b| a.max(b));
    let tol = scale * real(1e-9);
    let negative_eigenvalues = eigenvalues.iter().filter(|&&x| x < -tol).count();
    let mut coords = DMatrix::zeros(n, m);
    let mut clipped = 0;
    for (col, &k) in order.iter().take(m).enumerate() {
        let lambda = eig.eigenvalues[k];
        if lambda <= tol {
            clipped += 1;
            continue;
        }
        let v = eig.eigenvectors.column(k);
        // sign convention: largest-magnitude entry positive
        let mut pivot = 0;
        for i in 1..n {
            if v[i].abs() > v[pivot].abs() {
                pivot = i;
            }
        }
        let sign = if v[pivot] < T::zero() { -T::one() } else { T::one() };
        let s = lambda.sqrt() * sign;
        for i in 0..n {
            coords[(i, col)] = v[i] * s;
        }
    }
    Ok(Embedding {
        ids: d.ids().to_vec(),
        coords,
        eigenvalues,
        negative_eigenvalues,
        clipped,
    })
}

/// `id,c1..cm` rows.
pub fn write_embedding_csv<T: RealField + Copy, W: Write>(e: &Embedding<T>, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["id".to_string()];
    header.extend((1..=e.coords.ncols()).map(|k| format!("c{k}")));
    w.write_record(&header)?;
    for (i, id) in e.ids.iter().enumerate() {
        let mut row = vec![id.clone()];
        row.extend(e.coords.row(i).iter().map(|x| x.to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn euclid(points: &[Vec<f64>]) -> DistanceMatrix<f64> {
        let ids = (0..points.len()).map(|i| i.to_string()).collect();
        DistanceMatrix::from_fn(ids, |i, j| {
            points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        })
        .unwrap()
    }

    fn embedded_distance(e: &Embedding<f64>, i: usize, j: usize) -> f64 {
        (e.coords.row(i) - e.coords.row(j)).norm()
    }

    #[test]
    fn collinear_points() {
        let d = euclid(&[vec![0.0], vec![3.0], vec![4.0]]);
        let e = classical_mds(&d, 1).unwrap();
        assert!((embedded_distance(&e, 0, 1) - 3.0).abs() < 1e-10);
        assert!((embedded_distance(&e, 0, 2) - 4.0).abs() < 1e-10);
        assert!((embedded_distance(&e, 1, 2) - 1.0).abs() < 1e-10);
        assert_eq!(e.negative_eigenvalues, 0);
    }

    #[test]
    fn single_point_and_ranges() {
        let d = euclid(&[vec![1.0, 2.0]]);
        let e = classical_mds(&d, 1).unwrap();
        assert_eq!(e.coords[(0, 0)], 0.0);
        let d = euclid(&[vec![0.0], vec![1.0], vec![2.0]]);
        assert!(classical_mds(&d, 0).is_err());
        assert!(classical_mds(&d, 3).is_err());
    }

    #[test]
    fn non_euclidean_input_reports_negatives() {
        // a 4-cycle metric with long diagonals is not Euclidean
        let ids = (0..4).map(|i| i.to_string()).collect();
        let d = DistanceMatrix::from_fn(ids, |i, j| if (j - i) % 2 == 0 { 2.0 } else { 1.0 }).unwrap();
        let e = classical_mds(&d, 3).unwrap();
        assert!(e.negative_eigenvalues >= 1);
        assert_eq!(e.clipped, 1);
        assert!(e.coords.column(2).iter().all(|&x| x == 0.0));
    }
}
