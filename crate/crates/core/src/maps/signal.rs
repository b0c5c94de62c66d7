use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{Grid, NormTag};
use crate::scalar::Scalar;

/// A `U`-valued input or output signal on `[0, count * step)`, constant on each cell
/// `[k h, (k + 1) h)`.
///
/// The `L1` norm is `h * sum_k |u_k|_U` where `|.|_U` is given by `unorm`
/// (`Sup`, or a `Product` of sup-norm blocks).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputSignal<T> {
    grid: Grid<T>,
    width: usize,
    values: Vec<T>,
    unorm: NormTag<T>,
}

impl<T: Scalar> InputSignal<T> {
    pub fn new(grid: Grid<T>, width: usize, values: Vec<T>, unorm: NormTag<T>) -> Result<Self> {
        if grid.start() != T::zero() {
            return Err(Error::Domain("signals live on grids starting at 0".into()));
        }
        if width == 0 || values.len() != grid.count() * width {
            return Err(Error::Dimension(format!(
                "{} values for {} cells of width {width}",
                values.len(),
                grid.count()
            )));
        }
        if let Some(n) = unorm.product_len() {
            if n != width {
                return Err(Error::Dimension(format!("U-norm covers {n} of {width} components")));
            }
        }
        Ok(Self {
            grid,
            width,
            values,
            unorm,
        })
    }

    pub fn zeros(grid: Grid<T>, width: usize, unorm: NormTag<T>) -> Result<Self> {
        Self::new(grid, width, vec![T::zero(); grid.count() * width], unorm)
    }

    /// Scalar-valued signal with the absolute value as `U`-norm.
    pub fn scalar(grid: Grid<T>, values: Vec<T>) -> Result<Self> {
        Self::new(grid, 1, values, NormTag::Sup)
    }

    /// Cell values `f(t_k + h/2)` at cell midpoints.
    pub fn from_fn(grid: Grid<T>, width: usize, unorm: NormTag<T>, f: impl Fn(T) -> Vec<T>) -> Result<Self> {
        let half = T::lit(0.5) * grid.step();
        let mut values = Vec::with_capacity(grid.count() * width);
        for k in 0..grid.count() {
            let v = f(grid.point(k) + half);
            if v.len() != width {
                return Err(Error::Dimension(format!("signal function returned {} values", v.len())));
            }
            values.extend(v);
        }
        Self::new(grid, width, values, unorm)
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn step(&self) -> T {
        self.grid.step()
    }

    pub fn count(&self) -> usize {
        self.grid.count()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn unorm(&self) -> &NormTag<T> {
        &self.unorm
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn cell(&self, k: usize) -> &[T] {
        &self.values[k * self.width..(k + 1) * self.width]
    }

    pub fn cell_mut(&mut self, k: usize) -> &mut [T] {
        &mut self.values[k * self.width..(k + 1) * self.width]
    }

    /// `|u_k|_U` for every cell.
    pub fn pointwise_norms(&self) -> Vec<T> {
        self.values.chunks(self.width).map(|c| self.unorm.eval(c)).collect()
    }

    /// `L1(0, T; U)` norm.
    pub fn norm(&self) -> T {
        self.step() * self.pointwise_norms().into_iter().sum::<T>()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == T::zero())
    }

    /// Same signal with new cell values.
    pub fn with_values(&self, values: Vec<T>) -> Result<Self> {
        Self::new(self.grid, self.width, values, self.unorm.clone())
    }

    /// Restriction to the first `count` cells.
    pub fn truncated(&self, count: usize) -> Result<Self> {
        if count > self.count() {
            return Err(Error::Domain(format!(
                "cannot restrict {} cells to {count}",
                self.count()
            )));
        }
        Self::new(
            self.grid.with_count(count)?,
            self.width,
            self.values[..count * self.width].to_vec(),
            self.unorm.clone(),
        )
    }

    /// Extension by zero to `count` cells.
    pub fn zero_padded(&self, count: usize) -> Result<Self> {
        let mut values = self.values.clone();
        values.resize(count.max(self.count()) * self.width, T::zero());
        Self::new(
            self.grid.with_count(count.max(self.count()))?,
            self.width,
            values,
            self.unorm.clone(),
        )
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.values.len() != other.values.len() || self.width != other.width {
            return Err(Error::Dimension("signals of different shapes".into()));
        }
        Ok(())
    }

    pub fn axpy(&self, a: T, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| *x + a * *y)
            .collect();
        self.with_values(values)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.axpy(T::one(), other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(-T::one(), other)
    }

    pub fn scaled(&self, a: T) -> Self {
        Self {
            values: self.values.iter().map(|v| *v * a).collect(),
            ..self.clone()
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        self.check_same(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs())))
    }

    /// `L1` norm of the difference.
    pub fn l1_distance(&self, other: &Self) -> Result<T> {
        Ok(self.sub(other)?.norm())
    }
}
