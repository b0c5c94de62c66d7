use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Relative tolerance used when deciding whether a time lies on a grid point.
const ALIGN_RTOL: f64 = 1e-9;

/// Uniform grid `start + k * step` for `0 <= k <= count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid<T> {
    start: T,
    step: T,
    count: usize,
}

impl<T: Scalar> Grid<T> {
    pub fn new(start: T, step: T, count: usize) -> Result<Self> {
        if !(step > T::zero()) || !step.is_finite() {
            return Err(Error::Domain(format!("grid step must be positive, got {step}")));
        }
        if count == 0 {
            return Err(Error::Domain("grid needs at least one interval".into()));
        }
        if !start.is_finite() {
            return Err(Error::Domain("grid start must be finite".into()));
        }
        Ok(Self { start, step, count })
    }

    /// Grid on `[start, end]` with the given step; the length must be a whole number of steps.
    pub fn covering(start: T, end: T, step: T) -> Result<Self> {
        if !(step > T::zero()) {
            return Err(Error::Domain(format!("grid step must be positive, got {step}")));
        }
        let n = steps_in(end - start, step)?;
        Self::new(start, step, n)
    }

    pub fn start(&self) -> T {
        self.start
    }

    pub fn step(&self) -> T {
        self.step
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn end(&self) -> T {
        self.point(self.count)
    }

    pub fn len(&self) -> T {
        self.step * T::from_usize_lossy(self.count)
    }

    pub fn point(&self, k: usize) -> T {
        self.start + self.step * T::from_usize_lossy(k)
    }

    pub fn points(&self) -> impl Iterator<Item = T> + '_ {
        (0..=self.count).map(move |k| self.point(k))
    }

    /// Composite trapezoid weights; they sum to `count * step`.
    pub fn trapezoid_weights(&self) -> Vec<T> {
        let half = self.step / T::lit(2.0);
        (0..=self.count)
            .map(|k| if k == 0 || k == self.count { half } else { self.step })
            .collect()
    }

    /// Index `k` with `point(k) == t`, or an alignment error.
    pub fn index_of(&self, t: T) -> Result<usize> {
        let k = steps_in(t - self.start, self.step).or_else(|e| if t == self.start { Ok(0) } else { Err(e) })?;
        if k > self.count {
            return Err(Error::GridAlignment(format!(
                "time {t} lies beyond the grid end {}",
                self.end()
            )));
        }
        Ok(k)
    }

    /// Same start and step, different number of intervals.
    pub fn with_count(&self, count: usize) -> Result<Self> {
        Self::new(self.start, self.step, count)
    }
}

/// Number of whole steps in `span`; errors unless `span` is a non-negative multiple of `step`.
pub(crate) fn steps_in<T: Scalar>(span: T, step: T) -> Result<usize> {
    if span < T::zero() {
        return Err(Error::GridAlignment(format!("negative span {span}")));
    }
    let ratio = span / step;
    let n = ratio.round();
    let tol = T::lit(ALIGN_RTOL) * (T::one() + ratio.abs()) + T::epsilon() * T::lit(16.0) * ratio.abs();
    if (ratio - n).abs() > tol {
        return Err(Error::GridAlignment(format!(
            "{span} is not a multiple of the step {step}"
        )));
    }
    n.to_usize()
        .ok_or_else(|| Error::GridAlignment(format!("span {span} too large")))
}
