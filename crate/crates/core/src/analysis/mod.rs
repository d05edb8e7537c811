//! Statistics on distance matrices: the mixed metric, classical MDS, QDA
//! with leave-one-out cross-validation and hierarchical clustering.

use std::io::{Read, Write};

use nalgebra::{DMatrix, RealField};

use crate::error::{Error, Result};

mod hclust;
mod mds;
mod qda;

pub use hclust::{hclust, merging_heights, Dendrogram, Linkage, Merge};
pub use mds::{classical_mds, write_embedding_csv, Embedding};
pub use qda::{grid_search, loocv, loocv_accuracy, qda_fit, GridSearch, LoocvReport, QdaModel};

pub(crate) fn real<T: RealField>(x: f64) -> T {
    nalgebra::convert(x)
}

/// Labeled symmetric matrix of pairwise distances.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix<T: RealField> {
    ids: Vec<String>,
    values: DMatrix<T>,
}

impl<T: RealField + Copy> DistanceMatrix<T> {
    /// Validates symmetry, zero diagonal, finiteness and nonnegativity.
    pub fn new(ids: Vec<String>, values: DMatrix<T>) -> Result<Self> {
        let n = ids.len();
        if values.nrows() != n || values.ncols() != n {
            return Err(Error::Parameter(format!(
                "{} ids for a {}x{} matrix",
                n,
                values.nrows(),
                values.ncols()
            )));
        }
        for i in 0..n {
            if values[(i, i)] != T::zero() {
                return Err(Error::Numeric(format!("nonzero diagonal entry at {}", ids[i])));
            }
            for j in 0..n {
                let v = values[(i, j)];
                if !v.is_finite() || v < T::zero() {
                    return Err(Error::Numeric(format!(
                        "entry ({}, {}) = {v} is not a finite nonnegative distance",
                        ids[i], ids[j]
                    )));
                }
                if v != values[(j, i)] {
                    return Err(Error::Numeric(format!(
                        "matrix is not symmetric at ({}, {})",
                        ids[i], ids[j]
                    )));
                }
            }
        }
        Ok(Self { ids, values })
    }

    /// Fills the upper triangle with `f(i, j)` and mirrors it.
    pub fn from_fn(ids: Vec<String>, mut f: impl FnMut(usize, usize) -> T) -> Result<Self> {
        let n = ids.len();
        let mut values = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                let v = f(i, j);
                values[(i, j)] = v;
                values[(j, i)] = v;
            }
        }
        Self::new(ids, values)
    }

    /// Builds from a list of upper-triangle entries `(i, j, d)` with `i < j`.
    pub fn from_pairs(ids: Vec<String>, pairs: &[(usize, usize, T)]) -> Result<Self> {
        let n = ids.len();
        let mut values = DMatrix::zeros(n, n);
        for &(i, j, d) in pairs {
            values[(i, j)] = d;
            values[(j, i)] = d;
        }
        Self::new(ids, values)
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn values(&self) -> &DMatrix<T> {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[(i, j)]
    }

    /// Writes the matrix with ids as the first row and column.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["id".to_string()];
        header.extend(self.ids.iter().cloned());
        w.write_record(&header)?;
        for i in 0..self.len() {
            let mut row = vec![self.ids[i].clone()];
            row.extend((0..self.len()).map(|j| self.values[(i, j)].to_string()));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let header = r.headers()?.clone();
        let ids: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        let n = ids.len();
        let mut values = DMatrix::zeros(n, n);
        let mut rows = 0;
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            let line = i as u64 + 2;
            let bad = |message: String| Error::Ingestion {
                id: rec.get(0).unwrap_or("").to_string(),
                line,
                message,
            };
            if i >= n {
                return Err(bad("more rows than ids".into()));
            }
            if rec.get(0) != Some(ids[i].as_str()) {
                return Err(bad(format!("row id does not match column id {}", ids[i])));
            }
            if rec.len() != n + 1 {
                return Err(bad(format!("expected {} values, found {}", n, rec.len() - 1)));
            }
            for j in 0..n {
                let s = rec.get(j + 1).unwrap_or("").trim();
                let v: f64 = s.parse().map_err(|e| bad(format!("{s:?}: {e}")))?;
                values[(i, j)] = real(v);
            }
            rows += 1;
        }
        if rows != n {
            return Err(Error::Ingestion {
                id: String::new(),
                line: rows as u64 + 1,
                message: format!("expected {n} rows, found {rows}"),
            });
        }
        Self::new(ids, values)
    }
}

/// Entrywise `sqrt(w * dc² + (1 - w) * dr²)`.
pub fn mixed_distance<T: RealField + Copy>(dc: &DistanceMatrix<T>, dr: &DistanceMatrix<T>, w: T) -> Result<DistanceMatrix<T>> {
    if dc.ids != dr.ids {
        return Err(Error::Parameter("matrices have different ids".into()));
    }
    if !(w >= T::zero() && w <= T::one()) {
        return Err(Error::Parameter(format!("mixing weight {w} outside [0, 1]")));
    }
    let values = if w == T::one() {
        dc.values.clone()
    } else if w == T::zero() {
        dr.values.clone()
    } else {
        dc.values
            .zip_map(&dr.values, |c, r| (w * c * c + (T::one() - w) * r * r).sqrt())
    };
    DistanceMatrix::new(dc.ids.clone(), values)
}
