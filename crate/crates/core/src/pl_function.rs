//! Piecewise-linear functions on a compact interval.
//!
//! A [`PlFunction`] is the linear interpolant of a finite set of breakpoints
//! `(xs[i], ys[i])` with strictly increasing abscissas. Everything downstream
//! (merge trees, persistence diagrams) only looks at the ordinates and their
//! order along the abscissa.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct PlFunction<T> {
    id: String,
    xs: Vec<T>,
    ys: Vec<T>,
}

/// A maximal run of consecutive breakpoints sharing the same ordinate.
///
/// `start` and `end` are inclusive breakpoint indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plateau<T> {
    pub start: usize,
    pub end: usize,
    pub height: T,
}

/// Local minima and maxima of a piecewise-linear function, left to right.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalProfile<T> {
    pub minima: Vec<Plateau<T>>,
    pub maxima: Vec<Plateau<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    Minimum,
    Maximum,
}

impl<T> CriticalProfile<T> {
    /// Extrema merged in abscissa order.
    pub fn ordered(&self) -> Vec<(ExtremumKind, &Plateau<T>)> {
        let mut out: Vec<_> = self
            .minima
            .iter()
            .map(|p| (ExtremumKind::Minimum, p))
            .chain(self.maxima.iter().map(|p| (ExtremumKind::Maximum, p)))
            .collect();
        out.sort_by_key(|(_, p)| p.start);
        out
    }
}

impl<T: Scalar> PlFunction<T> {
    pub fn new(id: impl Into<String>, xs: Vec<T>, ys: Vec<T>) -> Result<Self> {
        let id = id.into();
        if xs.len() != ys.len() {
            return Err(Error::Domain(format!(
                "function {id}: {} abscissas but {} ordinates",
                xs.len(),
                ys.len()
            )));
        }
        if xs.len() < 2 {
            return Err(Error::Domain(format!(
                "function {id}: at least two breakpoints are required"
            )));
        }
        if xs.iter().chain(ys.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("function {id}: non-finite value")));
        }
        if let Some(i) = xs.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::Domain(format!(
                "function {id}: abscissas not strictly increasing at index {}",
                i + 1
            )));
        }
        Ok(Self { id, xs, ys })
    }

    /// Builds a function sampled on `0, 1, …, n-1`.
    pub fn on_integer_grid(id: impl Into<String>, ys: Vec<T>) -> Result<Self> {
        let xs = (0..ys.len()).map(|i| T::of(i as f64)).collect();
        Self::new(id, xs, ys)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn xs(&self) -> &[T] {
        &self.xs
    }

    pub fn ys(&self) -> &[T] {
        &self.ys
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn domain(&self) -> (T, T) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    pub fn min_value(&self) -> T {
        self.ys.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max_value(&self) -> T {
        self.ys.iter().copied().fold(T::neg_infinity(), T::max)
    }

    pub fn evaluate(&self, x: T) -> Result<T> {
        let (lo, hi) = self.domain();
        if !(x >= lo && x <= hi) {
            return Err(Error::Domain(format!(
                "x = {x} outside [{lo}, {hi}] of function {}",
                self.id
            )));
        }
        Ok(self.eval_unchecked(x))
    }

    fn eval_unchecked(&self, x: T) -> T {
        // index of the first breakpoint strictly greater than x
        let j = self.xs.partition_point(|&v| v <= x);
        if j == 0 {
            return self.ys[0];
        }
        let i = j - 1;
        if self.xs[i] == x || j == self.xs.len() {
            return self.ys[i];
        }
        interpolate(self.xs[i], self.ys[i], self.xs[j], self.ys[j], x)
    }

    pub fn critical_profile(&self) -> CriticalProfile<T> {
        let runs = self.runs();
        let mut minima = Vec::new();
        let mut maxima = Vec::new();
        for (k, run) in runs.iter().enumerate() {
            let prev = k.checked_sub(1).map(|p| runs[p].height);
            let next = runs.get(k + 1).map(|r| r.height);
            let h = run.height;
            let below_neighbours = prev.is_none_or(|p| p > h) && next.is_none_or(|n| n > h);
            let above_neighbours = prev.is_none_or(|p| p < h) && next.is_none_or(|n| n < h);
            if below_neighbours {
                minima.push(*run);
            } else if above_neighbours {
                maxima.push(*run);
            }
        }
        CriticalProfile { minima, maxima }
    }

    /// Maximal runs of equal consecutive ordinates.
    fn runs(&self) -> Vec<Plateau<T>> {
        let mut runs: Vec<Plateau<T>> = Vec::new();
        for (i, &y) in self.ys.iter().enumerate() {
            match runs.last_mut() {
                Some(run) if run.height == y => run.end = i,
                _ => runs.push(Plateau {
                    start: i,
                    end: i,
                    height: y,
                }),
            }
        }
        runs
    }

    /// Exact sup-norm of `self - other` over a shared domain.
    pub fn sup_distance(&self, other: &Self) -> Result<T> {
        if self.domain() != other.domain() {
            return Err(Error::Domain(format!(
                "functions {} and {} have different domains",
                self.id, other.id
            )));
        }
        let mut grid: Vec<T> = self.xs.iter().chain(other.xs.iter()).copied().collect();
        grid.sort_by(crate::scalar::cmp);
        grid.dedup();
        Ok(grid
            .into_iter()
            .map(|x| (self.eval_unchecked(x) - other.eval_unchecked(x)).abs())
            .fold(T::zero(), T::max))
    }

    /// Returns `self ∘ warp`.
    ///
    /// `warp` must be strictly increasing and map its domain onto the domain
    /// of `self`. Breakpoints of the result are the breakpoints of `warp`
    /// together with the preimages of the breakpoints of `self`; ordinates at
    /// those preimages are copied verbatim.
    pub fn reparametrize(&self, warp: &Self) -> Result<Self> {
        if let Some(i) = warp.ys.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::InvalidWarp(format!(
                "warp {} is not strictly increasing at index {}",
                warp.id,
                i + 1
            )));
        }
        let (lo, hi) = self.domain();
        let (wlo, whi) = (warp.ys[0], warp.ys[warp.ys.len() - 1]);
        if wlo != lo || whi != hi {
            return Err(Error::InvalidWarp(format!(
                "warp image [{wlo}, {whi}] differs from domain [{lo}, {hi}]"
            )));
        }

        // (abscissa, ordinate, carries an exact ordinate of self)
        let mut points: Vec<(T, T, bool)> = Vec::with_capacity(self.len() + warp.len());
        for (&x, &y) in self.xs.iter().zip(&self.ys) {
            points.push((warp.inverse_unchecked(x), y, true));
        }
        for (&u, &x) in warp.xs.iter().zip(&warp.ys) {
            points.push((u, self.eval_unchecked(x), false));
        }
        points.sort_by(|a, b| crate::scalar::cmp(&a.0, &b.0).then(b.2.cmp(&a.2)));

        let mut xs: Vec<T> = Vec::with_capacity(points.len());
        let mut ys: Vec<T> = Vec::with_capacity(points.len());
        let mut exact_last = false;
        for (u, y, exact) in points {
            if xs.last() == Some(&u) {
                if exact && exact_last {
                    return Err(Error::InvalidWarp(format!(
                        "warp {} is too steep to separate breakpoints of {}",
                        warp.id, self.id
                    )));
                }
                continue;
            }
            xs.push(u);
            ys.push(y);
            exact_last = exact;
        }
        Self::new(self.id.clone(), xs, ys)
    }

    /// Abscissa `u` with `self(u) = y`, for a strictly increasing function.
    fn inverse_unchecked(&self, y: T) -> T {
        let j = self.ys.partition_point(|&v| v <= y);
        if j == 0 {
            return self.xs[0];
        }
        let i = j - 1;
        if self.ys[i] == y || j == self.ys.len() {
            return self.xs[i];
        }
        interpolate(self.ys[i], self.xs[i], self.ys[j], self.xs[j], y)
    }
}

/// Linear interpolation clamped to the ordinate range of the segment, so
/// rounding never produces a value outside `[min(y0, y1), max(y0, y1)]`.
fn interpolate<T: Scalar>(x0: T, y0: T, x1: T, y1: T, x: T) -> T {
    let t = (x - x0) / (x1 - x0);
    let y = y0 + (y1 - y0) * t;
    y.max(y0.min(y1)).min(y0.max(y1))
}
