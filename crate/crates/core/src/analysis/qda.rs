use nalgebra::{Cholesky, DMatrix, DVector, Dyn, RealField};

use super::{classical_mds, mixed_distance, real, DistanceMatrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
struct ClassFit<T: RealField> {
    label: usize,
    log_prior: T,
    mean: DVector<T>,
    chol: Cholesky<T, Dyn>,
    log_det: T,
    regularized: bool,
}

/// Quadratic discriminant analysis: one Gaussian per class.
#[derive(Debug, Clone)]
pub struct QdaModel<T: RealField> {
    classes: Vec<ClassFit<T>>,
}

/// Fits per-class means, covariances (unbiased) and priors. Singular
/// covariances get a ridge of `1e-6 * trace / dim`.
pub fn qda_fit<T: RealField + Copy>(points: &DMatrix<T>, labels: &[usize]) -> Result<QdaModel<T>> {
    let (n, dim) = points.shape();
    if labels.len() != n {
        return Err(Error::Fit(format!("{n} points but {} labels", labels.len())));
    }
    let mut classes: Vec<usize> = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::Fit("at least two classes are needed".into()));
    }
    let mut fits = Vec::with_capacity(classes.len());
    for &label in &classes {
        let rows: Vec<usize> = (0..n).filter(|&i| labels[i] == label).collect();
        let k = rows.len();
        if k < 2 {
            return Err(Error::Fit(format!("class {label} has fewer than two members")));
        }
        let mut mean = DVector::zeros(dim);
        for &i in &rows {
            mean += points.row(i).transpose();
        }
        mean /= real::<T>(k as f64);
        let mut cov = DMatrix::zeros(dim, dim);
        for &i in &rows {
            let d = points.row(i).transpose() - &mean;
            cov += &d * d.transpose();
        }
        cov /= real::<T>((k - 1) as f64);
        let mut regularized = false;
        let chol = match (k > dim).then(|| Cholesky::new(cov.clone())).flatten() {
            Some(c) if c.l().diagonal().iter().all(|&x| x > T::zero()) => c,
            _ => {
                regularized = true;
                let trace = cov.trace();
                let ridge = if trace > T::zero() {
                    real::<T>(1e-6) * trace / real(dim as f64)
                } else {
                    real(1e-6)
                };
                let mut reg = cov.clone();
                for j in 0..dim {
                    reg[(j, j)] += ridge;
                }
                Cholesky::new(reg)
                    .ok_or_else(|| Error::Fit(format!("covariance of class {label} is not positive definite")))?
            }
        };
        let log_det = chol
            .l()
            .diagonal()
            .iter()
            .fold(T::zero(), |acc, &x| acc + x.ln())
            * real(2.0);
        fits.push(ClassFit {
            label,
            log_prior: (real::<T>(k as f64) / real(n as f64)).ln(),
            mean,
            chol,
            log_det,
            regularized,
        });
    }
    Ok(QdaModel { classes: fits })
}

impl<T: RealField + Copy> QdaModel<T> {
    pub fn labels(&self) -> Vec<usize> {
        self.classes.iter().map(|c| c.label).collect()
    }

    /// Whether any class covariance needed the ridge.
    pub fn regularized(&self) -> bool {
        self.classes.iter().any(|c| c.regularized)
    }

    /// Gaussian log-density plus log prior, per class (constants dropped).
    pub fn scores(&self, x: &DVector<T>) -> Vec<T> {
        self.classes
            .iter()
            .map(|c| {
                let d = x - &c.mean;
                let z = c.chol.l().solve_lower_triangular(&d).expect("nonsingular factor");
                let half: T = real(0.5);
                c.log_prior - half * (c.log_det + z.norm_squared())
            })
            .collect()
    }

    /// Class with the highest score; ties go to the smallest label.
    pub fn predict(&self, x: &DVector<T>) -> usize {
        let scores = self.scores(x);
        let mut best = 0;
        for k in 1..scores.len() {
            if scores[k] > scores[best] {
                best = k;
            }
        }
        self.classes[best].label
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoocvReport<T> {
    pub accuracy: T,
    pub m: usize,
    /// Predicted label per unit; `None` when the fold could not be fit.
    pub predictions: Vec<Option<usize>>,
    /// Sorted distinct labels indexing the confusion matrix.
    pub classes: Vec<usize>,
    /// `confusion[true][predicted]`; failed folds are not counted.
    pub confusion: Vec<Vec<usize>>,
    pub negative_eigenvalues: usize,
}

/// Leave-one-out accuracy of QDA on the `m`-dimensional classical MDS
/// embedding of the whole matrix. Folds whose fit fails count as errors.
pub fn loocv<T: RealField + Copy>(d: &DistanceMatrix<T>, labels: &[usize], m: usize) -> Result<LoocvReport<T>> {
    let n = d.len();
    if labels.len() != n {
        return Err(Error::Parameter(format!("{n} units but {} labels", labels.len())));
    }
    let emb = classical_mds(d, m)?;
    let mut classes = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    let mut confusion = vec![vec![0usize; classes.len()]; classes.len()];
    let mut predictions = Vec::with_capacity(n);
    let mut correct = 0usize;
    for held in 0..n {
        let keep: Vec<usize> = (0..n).filter(|&i| i != held).collect();
        let train = emb.coords.select_rows(&keep);
        let train_labels: Vec<usize> = keep.iter().map(|&i| labels[i]).collect();
        let pred = qda_fit(&train, &train_labels)
            .ok()
            .map(|model| model.predict(&emb.coords.row(held).transpose()));
        if let Some(p) = pred {
            let t = classes.binary_search(&labels[held]).expect("known label");
            let q = classes.binary_search(&p).expect("predicted label is a training label");
            confusion[t][q] += 1;
            if p == labels[held] {
                correct += 1;
            }
        }
        predictions.push(pred);
    }
    Ok(LoocvReport {
        accuracy: real::<T>(correct as f64) / real(n as f64),
        m,
        predictions,
        classes,
        confusion,
        negative_eigenvalues: emb.negative_eigenvalues,
    })
}

pub fn loocv_accuracy<T: RealField + Copy>(d: &DistanceMatrix<T>, labels: &[usize], m: usize) -> Result<T> {
    Ok(loocv(d, labels, m)?.accuracy)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSearch<T> {
    pub w: T,
    pub m: usize,
    pub report: LoocvReport<T>,
    /// Every evaluated `(w, m, accuracy)`.
    pub table: Vec<(T, usize, T)>,
}

/// Maximizes LOOCV accuracy over mixing weights and dimensions; ties go to
/// the smallest `w`, then the smallest `m`. Without `dr` only `w = 1`
/// (the `dc` matrix alone) is meaningful and `ws` is ignored.
pub fn grid_search<T: RealField + Copy>(
    dc: &DistanceMatrix<T>,
    dr: Option<&DistanceMatrix<T>>,
    labels: &[usize],
    ws: &[T],
    ms: &[usize],
) -> Result<GridSearch<T>> {
    if ms.is_empty() || (dr.is_some() && ws.is_empty()) {
        return Err(Error::Parameter("empty search grid".into()));
    }
    let ws: Vec<T> = if dr.is_some() { ws.to_vec() } else { vec![T::one()] };
    let max_m = dc.len().saturating_sub(1).max(1);
    let mut best: Option<GridSearch<T>> = None;
    let mut table = Vec::new();
    for &w in &ws {
        let d = match dr {
            Some(dr) => mixed_distance(dc, dr, w)?,
            None => dc.clone(),
        };
        for &m in ms.iter().filter(|&&m| m >= 1 && m <= max_m) {
            let report = loocv(&d, labels, m)?;
            table.push((w, m, report.accuracy));
            if best.as_ref().is_none_or(|b| report.accuracy > b.report.accuracy) {
                best = Some(GridSearch {
                    w,
                    m,
                    report,
                    table: Vec::new(),
                });
            }
        }
    }
    let mut best = best.ok_or_else(|| Error::Parameter("no admissible embedding dimension".into()))?;
    best.table = table;
    Ok(best)
}
